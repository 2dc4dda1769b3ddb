"""
Buddy Allocator
Per-tier 4 KB frame allocation with buddy free lists (orders 0..9) and
per-epoch bandwidth accounting
"""

import heapq
from typing import Dict, List, Set, Tuple

from core_model import MAX_ORDER, SUBPAGES_PER_THP
from errors import AllocatorError, DoubleFree, NoContiguousBlock


class TierState:
    """One memory tier: buddy free lists, allocation records and bandwidth counters"""

    def __init__(self, name: str, frame_count: int,
                 peak_bandwidth: int = 64 * 1024 * 1024,
                 base_latency: float = 1.0,
                 logger=None):
        """
        Initialize an empty tier

        Args:
            name: Tier name used in messages
            frame_count: Number of 4 KB frames, a multiple of 512
            peak_bandwidth: Bytes per epoch at 100% utilization
            base_latency: Access cost on an idle tier
            logger: Logger instance
        """
        if frame_count <= 0 or frame_count % SUBPAGES_PER_THP != 0:
            raise ValueError(f"{name}: frame_count must be a positive multiple of "
                             f"{SUBPAGES_PER_THP}, got {frame_count}")
        if peak_bandwidth <= 0:
            raise ValueError(f"{name}: peak_bandwidth must be positive")

        self.name = name
        self.frame_count = frame_count
        self.peak_bandwidth = peak_bandwidth
        self.base_latency = base_latency
        self.logger = logger

        self.free_lists: List[Set[int]] = [set() for _ in range(MAX_ORDER + 1)]
        self._heaps: List[List[int]] = [[] for _ in range(MAX_ORDER + 1)]
        self.allocated: Dict[int, int] = {}
        self.used_frames = 0

        for base in range(0, frame_count, 1 << MAX_ORDER):
            self._push(MAX_ORDER, base)

        # Bandwidth consumed in the current epoch
        self.background_bytes = 0
        self.demand_bytes = 0
        self.migration_bytes = 0

    # Free-list helpers

    def _push(self, order: int, base: int) -> None:
        self.free_lists[order].add(base)
        heapq.heappush(self._heaps[order], base)

    def _pop_lowest(self, order: int) -> int:
        """Remove and return the lowest free block of an order, or -1"""
        heap = self._heaps[order]
        free = self.free_lists[order]
        while heap:
            base = heapq.heappop(heap)
            # Entries removed by merges stay in the heap until popped
            if base in free:
                free.remove(base)
                return base
        return -1

    # Allocation

    @property
    def free_frames(self) -> int:
        return self.frame_count - self.used_frames

    @property
    def used_fraction(self) -> float:
        return self.used_frames / self.frame_count

    def alloc_contiguous(self, order: int) -> int:
        """
        Allocate an aligned block of 2^order frames

        Args:
            order: Block order in [0, 9]

        Returns:
            Base frame of the block

        Raises:
            NoContiguousBlock: no free block of this order or larger; the tier is unchanged
        """
        if not 0 <= order <= MAX_ORDER:
            raise ValueError(f"order must be in [0, {MAX_ORDER}], got {order}")

        for current in range(order, MAX_ORDER + 1):
            base = self._pop_lowest(current)
            if base < 0:
                continue
            # Split buddy-style, keeping the low half each time
            while current > order:
                current -= 1
                self._push(current, base + (1 << current))
            self.allocated[base] = order
            self.used_frames += 1 << order
            return base

        raise NoContiguousBlock(self.name, order)

    def free_folio(self, frame: int, order: int) -> None:
        """
        Return a block to the free lists, coalescing with free buddies

        Raises:
            DoubleFree: the block is not currently allocated at this order
        """
        if self.allocated.get(frame) != order:
            raise DoubleFree(f"{self.name}: block at frame {frame} order {order} is not allocated")

        del self.allocated[frame]
        self.used_frames -= 1 << order

        while order < MAX_ORDER:
            buddy = frame ^ (1 << order)
            if buddy not in self.free_lists[order]:
                break
            self.free_lists[order].discard(buddy)
            frame = min(frame, buddy)
            order += 1
        self._push(order, frame)

    def reserve_frame(self, frame: int) -> None:
        """
        Allocate one specific frame, splitting whichever free block holds it

        Raises:
            AllocatorError: the frame is not free
        """
        if not 0 <= frame < self.frame_count:
            raise AllocatorError(f"{self.name}: frame {frame} out of range")

        for order in range(MAX_ORDER + 1):
            base = frame & ~((1 << order) - 1)
            if base in self.free_lists[order]:
                break
        else:
            raise AllocatorError(f"{self.name}: frame {frame} is not free")

        self.free_lists[order].discard(base)
        while order > 0:
            order -= 1
            half = 1 << order
            if frame >= base + half:
                self._push(order, base)
                base += half
            else:
                self._push(order, base + half)

        self.allocated[frame] = 0
        self.used_frames += 1

    def split_block(self, frame: int, from_order: int, to_order: int) -> List[int]:
        """
        Re-record an allocated block as 2^(from-to) allocated blocks of to_order

        Returns:
            Base frames of the pieces, lowest first
        """
        if self.allocated.get(frame) != from_order:
            raise AllocatorError(f"{self.name}: block at frame {frame} order {from_order} "
                                 f"is not allocated")
        if not 0 <= to_order <= from_order:
            raise ValueError(f"cannot split order {from_order} into order {to_order}")

        del self.allocated[frame]
        step = 1 << to_order
        pieces = [frame + i * step for i in range(1 << (from_order - to_order))]
        for piece in pieces:
            self.allocated[piece] = to_order
        return pieces

    def fragment_checkerboard(self, fraction: float = 1.0) -> int:
        """
        Pin every even-indexed frame in the leading fraction of the tier

        Args:
            fraction: Share of the tier to fragment, from the lowest frame

        Returns:
            Number of frames pinned
        """
        if not 0.0 <= fraction <= 1.0:
            raise ValueError(f"fragment fraction must be in [0, 1], got {fraction}")
        span = int(self.frame_count * fraction)
        pinned = 0
        for frame in range(0, span, 2):
            self.reserve_frame(frame)
            pinned += 1

        if self.logger:
            self.logger.info(f"{self.name} tier fragmented: {pinned} frames pinned "
                             f"over the first {span} frames")
        return pinned

    def free_blocks(self, order: int) -> List[int]:
        return sorted(self.free_lists[order])

    def free_block_list(self) -> List[Tuple[int, int]]:
        """Every free block as (base, order), sorted by base"""
        return sorted((base, order) for order, bases in enumerate(self.free_lists) for base in bases)

    # Bandwidth

    def begin_epoch(self, background_bytes: int = 0) -> None:
        self.background_bytes = background_bytes
        self.demand_bytes = 0
        self.migration_bytes = 0

    @property
    def consumed_bandwidth(self) -> int:
        return self.background_bytes + self.demand_bytes + self.migration_bytes

    def utilization(self) -> float:
        """Consumed over peak bandwidth, clamped to [0, 2]"""
        return min(max(self.consumed_bandwidth / self.peak_bandwidth, 0.0), 2.0)

    def pressure(self) -> float:
        """Non-migration traffic (background plus demand) over peak bandwidth"""
        return (self.background_bytes + self.demand_bytes) / self.peak_bandwidth

    def access_cost(self, slope: float) -> float:
        return self.base_latency * (1.0 + slope * self.utilization())
