"""
Read/Write Sketch
Dual blocked counting Bloom filter answering approximate per-page read and
write counts, and the write ratio derived from them
"""

import threading
from typing import List

import mmh3
import numpy as np

from core_model import PAGE_SHIFT


COUNTERS_PER_BLOCK = 64     # one 64-byte cache line of 8-bit counters
COUNTER_SATURATION = 255
DEFAULT_BLOCKS = 4096
DEFAULT_HASHES = 4


def fold_seed(seed: int) -> int:
    """32-bit hash seed that still depends on every bit of a 64-bit seed"""
    return (seed ^ (seed >> 32)) & 0xFFFFFFFF


class BlockedCbf:
    """
    Blocked counting Bloom filter

    Every key maps to one 64-counter block and to k counters inside it, so a
    Get or Update touches a single cache line. Updates are conservative: only
    the counters currently at the minimum are incremented.

    Memory: blocks * 64 bytes (256 KB with defaults).
    """

    def __init__(self, blocks: int = DEFAULT_BLOCKS, k: int = DEFAULT_HASHES,
                 hash_seed: int = 0):
        if blocks < 1:
            raise ValueError(f"blocks must be positive, got {blocks}")
        if not 1 <= k <= 10:
            raise ValueError(f"k must be in [1, 10], got {k}")
        self.blocks = blocks
        self.k = k
        self.hash_seed = hash_seed
        self._mmh_seed = fold_seed(hash_seed)
        self.counters = np.zeros((blocks, COUNTERS_PER_BLOCK), dtype=np.uint8)
        self._lock = threading.Lock()

    def locate(self, page: int):
        """
        Hash a page to its block and the k counter slots inside it

        Args:
            page: Byte address; truncated to its 4 KB page number

        Returns:
            (block index, list of k slot indices in [0, 64))
        """
        key = (page >> PAGE_SHIFT).to_bytes(8, 'little')
        h1, h2 = mmh3.hash64(key, self._mmh_seed, signed=False)
        block = h1 % self.blocks
        # 6 bits per slot; k <= 10 keeps every slot inside one 64-bit word
        slots = [(h2 >> (6 * i)) & (COUNTERS_PER_BLOCK - 1) for i in range(self.k)]
        return block, slots

    def update(self, page: int) -> None:
        """Conservative increment of the counters holding the current minimum"""
        block, slots = self.locate(page)
        with self._lock:
            row = self.counters[block]
            values = [int(row[s]) for s in slots]
            low = min(values)
            if low >= COUNTER_SATURATION:
                return
            for s in set(slots):
                if int(row[s]) == low:
                    row[s] = low + 1

    def get(self, page: int) -> int:
        """Estimated count: the minimum of the k counters"""
        block, slots = self.locate(page)
        row = self.counters[block]
        return min(int(row[s]) for s in slots)

    def decay(self) -> None:
        """Halve every counter"""
        with self._lock:
            self.counters >>= 1

    def load(self) -> float:
        """Fraction of counters that are non-zero"""
        return float(np.count_nonzero(self.counters)) / self.counters.size

    def memory_bytes(self) -> int:
        return self.counters.nbytes


class DualBcbf:
    """Paired read and write filters sharing geometry with distinct seeds"""

    def __init__(self, blocks: int = DEFAULT_BLOCKS, k: int = DEFAULT_HASHES, seed: int = 0):
        read_seed = fold_seed(seed)
        write_seed = (read_seed ^ 0x9E3779B9) & 0xFFFFFFFF
        self.reads = BlockedCbf(blocks, k, read_seed)
        self.writes = BlockedCbf(blocks, k, write_seed)

    def record(self, page: int, is_write: bool) -> None:
        if is_write:
            self.writes.update(page)
        else:
            self.reads.update(page)

    def write_ratio(self, page: int) -> float:
        """
        Write share of a page's observed accesses

        Args:
            page: Byte address of the page

        Returns:
            w_min / (w_min + r_min); 0.0 for a page never seen
        """
        w_min = self.writes.get(page)
        r_min = self.reads.get(page)
        if w_min + r_min == 0:
            return 0.0
        return w_min / (w_min + r_min)

    def decay(self) -> None:
        self.reads.decay()
        self.writes.decay()

    def filters(self) -> List[BlockedCbf]:
        return [self.reads, self.writes]


def cbf_update(f: BlockedCbf, page: int) -> None:
    f.update(page)


def cbf_get(f: BlockedCbf, page: int) -> int:
    return f.get(page)


def cbf_decay(f: BlockedCbf) -> None:
    f.decay()


def write_ratio(d: DualBcbf, page: int) -> float:
    return d.write_ratio(page)
