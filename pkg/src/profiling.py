"""
Access Profiling
Bernoulli sampling of access events folded into the global subpage histogram
"""

import csv
import random
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Tuple, Union

import numpy as np

from core_model import AccessEvent, SUBPAGES_PER_THP, THP_SIZE, PAGE_SHIFT, subpage_index
from errors import ConfigError


COUNTER_MAX = np.uint64(np.iinfo(np.uint64).max)
MAX_DECAY_SHIFT = 10


class Sampler:
    """Seeded per-access sampler standing in for a hardware event sampler"""

    def __init__(self, sample_prob: float, seed: int):
        if not 0.0 <= sample_prob <= 1.0:
            raise ValueError(f"sample_prob must be in [0, 1], got {sample_prob}")
        self.sample_prob = sample_prob
        self._rng = random.Random(seed)
        self._seed = seed

    @property
    def seed(self) -> int:
        return self._seed

    def sample(self, ev: AccessEvent) -> bool:
        """Return True with probability sample_prob; one PRNG draw per event"""
        return self._rng.random() < self.sample_prob


@dataclass(frozen=True)
class HistogramSnapshot:
    """Consistent copy of a histogram: 512 counters and their sum"""
    counts: np.ndarray
    total: int

    @property
    def is_empty(self) -> bool:
        return self.total == 0


class SubpageHistogram:
    """
    Global subpage histogram

    One 512-slot counter array per workload. Every sampled address is folded
    onto its subpage offset within the enclosing 2 MB region, so the size is
    512 x 8 B regardless of the working set.
    """

    def __init__(self):
        self.counts = np.zeros(SUBPAGES_PER_THP, dtype=np.uint64)
        self.total = 0
        self._lock = threading.Lock()

    def record_sample(self, vaddr: int) -> None:
        """Count one sample at the subpage slot of vaddr; saturates silently"""
        slot = subpage_index(vaddr)
        with self._lock:
            if self.counts[slot] != COUNTER_MAX:
                self.counts[slot] += np.uint64(1)
                self.total += 1

    def record_batch(self, vaddrs: Union[np.ndarray, Iterable[int]]) -> None:
        """
        Aggregate a burst of samples in a single pass

        Args:
            vaddrs: Sampled addresses
        """
        addrs = np.asarray(vaddrs, dtype=np.uint64)
        if addrs.size == 0:
            return
        slots = (addrs & np.uint64(THP_SIZE - 1)) >> np.uint64(PAGE_SHIFT)
        increments = np.bincount(slots.astype(np.int64), minlength=SUBPAGES_PER_THP).astype(np.uint64)

        with self._lock:
            headroom = COUNTER_MAX - self.counts
            applied = np.minimum(increments, headroom)
            self.counts += applied
            self.total = sum(self.counts.tolist())

    def snapshot(self) -> HistogramSnapshot:
        """Return a copy that later records do not affect"""
        with self._lock:
            return HistogramSnapshot(counts=self.counts.copy(), total=self.total)

    def decay(self, shift: int) -> None:
        """
        Age every counter by a right shift

        Args:
            shift: Number of halvings, capped at 10 per call
        """
        if shift < 0:
            raise ValueError(f"decay shift must be non-negative, got {shift}")
        shift = min(shift, MAX_DECAY_SHIFT)
        if shift == 0:
            return
        with self._lock:
            self.counts >>= np.uint64(shift)
            self.total = sum(self.counts.tolist())

    def to_bytes(self) -> bytes:
        """Serialized form: 512 little-endian u64 counters followed by the u64 total"""
        with self._lock:
            total = min(self.total, int(COUNTER_MAX))
            return self.counts.astype('<u8').tobytes() + total.to_bytes(8, 'little')

    @classmethod
    def from_counts(cls, counts: Iterable[int]) -> 'SubpageHistogram':
        values = np.asarray(list(counts), dtype=np.uint64)
        if values.shape != (SUBPAGES_PER_THP,):
            raise ValueError(f"histogram needs {SUBPAGES_PER_THP} counters, got {values.shape[0]}")
        hist = cls()
        hist.counts[:] = values
        hist.total = sum(values.tolist())
        return hist


# Functional aliases matching the operation names used by the policy code

def record_sample(h: SubpageHistogram, vaddr: int) -> None:
    h.record_sample(vaddr)


def snapshot(h: SubpageHistogram) -> Tuple[np.ndarray, int]:
    snap = h.snapshot()
    return snap.counts, snap.total


def decay(h: SubpageHistogram, shift: int) -> None:
    h.decay(shift)


def write_histogram_csv(path: Union[str, Path], snap: HistogramSnapshot) -> None:
    """Dump a snapshot as a 512-row (slot, count) CSV with a header"""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(['slot', 'count'])
        for slot, count in enumerate(snap.counts.tolist()):
            writer.writerow([slot, count])


def read_histogram_csv(path: Union[str, Path]) -> HistogramSnapshot:
    """
    Load a histogram CSV written by write_histogram_csv

    Args:
        path: CSV file with 512 (slot, count) rows, header optional

    Returns:
        HistogramSnapshot

    Raises:
        ConfigError: file missing or not exactly 512 well-formed rows
    """
    if not Path(path).is_file():
        raise ConfigError(f"Histogram file not found: {path}")

    try:
        with open(path, 'r', newline='', encoding='utf-8') as f:
            rows = list(csv.reader(f))
    except (UnicodeDecodeError, csv.Error) as e:
        raise ConfigError(f"{path}: histogram is not a readable UTF-8 CSV: {e}")

    counts = [None] * SUBPAGES_PER_THP
    for line_no, row in enumerate(rows, 1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if line_no == 1 and row[0].strip().lower() == 'slot':
            continue
        if len(row) != 2:
            raise ConfigError(f"{path}:{line_no}: expected 'slot,count', got {row!r}")
        try:
            slot, count = int(row[0]), int(row[1])
        except ValueError:
            raise ConfigError(f"{path}:{line_no}: non-integer field in {row!r}")
        if not 0 <= slot < SUBPAGES_PER_THP or count < 0 or count > int(COUNTER_MAX):
            raise ConfigError(f"{path}:{line_no}: slot or count out of range in {row!r}")
        if counts[slot] is not None:
            raise ConfigError(f"{path}:{line_no}: duplicate slot {slot}")
        counts[slot] = count

    missing = [i for i, c in enumerate(counts) if c is None]
    if missing:
        raise ConfigError(
            f"{path}: histogram needs {SUBPAGES_PER_THP} rows, {len(missing)} slots missing"
        )

    values = np.asarray(counts, dtype=np.uint64)
    return HistogramSnapshot(counts=values, total=sum(values.tolist()))


def profile_trace(events: Iterable[AccessEvent], sample_prob: float, seed: int,
                  batch_size: int = 4096) -> SubpageHistogram:
    """
    Run a trace through the sampler alone and fold the samples into a fresh histogram

    Samples are aggregated batch_size at a time with record_batch.
    """
    sampler = Sampler(sample_prob, seed)
    hist = SubpageHistogram()
    pending = []
    for ev in events:
        if sampler.sample(ev):
            pending.append(ev.vaddr)
            if len(pending) >= batch_size:
                hist.record_batch(pending)
                pending = []
    hist.record_batch(pending)
    return hist
