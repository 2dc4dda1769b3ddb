"""
TLB Model
LRU set of folio ids; one entry covers a whole folio of any order
"""

from collections import OrderedDict


class TlbModel:
    """Fully associative LRU TLB proxy"""

    def __init__(self, capacity: int = 1536):
        if capacity < 1:
            raise ValueError(f"TLB capacity must be positive, got {capacity}")
        self.capacity = capacity
        self._entries: "OrderedDict[int, None]" = OrderedDict()
        self.hits = 0
        self.misses = 0

    def touch(self, folio_id: int) -> bool:
        """
        Look up a folio, filling on miss

        Returns:
            True on hit
        """
        entries = self._entries
        if folio_id in entries:
            entries.move_to_end(folio_id)
            self.hits += 1
            return True

        self.misses += 1
        entries[folio_id] = None
        if len(entries) > self.capacity:
            entries.popitem(last=False)
        return False

    def invalidate(self, folio_id: int) -> None:
        self._entries.pop(folio_id, None)

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, folio_id: int) -> bool:
        return folio_id in self._entries

    def misses_per_1k(self, events: int) -> float:
        if events == 0:
            return 0.0
        return self.misses * 1000.0 / events
