"""
Workload
Seeded synthetic access traces (Uniform, Zipfian, HotBlocks, Strided) and the
binary trace file codec
"""

import math
from dataclasses import dataclass, asdict, fields
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple, Union

import numpy as np

from core_model import AccessEvent, PAGE_SIZE, THP_SIZE
from errors import BadMagic, InvalidSpec, TruncatedFile


TRACE_MAGIC = b"TSIMTRC1"
RECORD_DTYPE = np.dtype([('tick', '<u8'), ('word', '<u8')])
RECORD_SIZE = RECORD_DTYPE.itemsize          # 16 bytes
VADDR_BITS = 56
VADDR_LIMIT = 1 << VADDR_BITS
FLAG_WRITE = 0x01
ACCESS_GRANULE = 64                          # addresses are cache-line aligned


class TraceKind(Enum):
    UNIFORM = "Uniform"
    ZIPFIAN = "Zipfian"
    HOT_BLOCKS = "HotBlocks"
    STRIDED = "Strided"


@dataclass(frozen=True)
class TraceSpec:
    """
    Recipe for a synthetic trace

    Only the parameters of the selected kind are used: zipf_s and scramble
    for Zipfian; block_bytes, hot_fraction, hot_weight and hot_offset for
    HotBlocks; stride for Strided.
    """
    kind: TraceKind = TraceKind.UNIFORM
    n_events: int = 100000
    region_bytes: int = 64 * THP_SIZE
    write_fraction: float = 0.0
    seed: int = 0
    zipf_s: float = 0.99
    scramble: bool = False
    block_bytes: int = 64 * 1024
    hot_fraction: float = 1.0
    hot_weight: float = 0.9
    hot_offset: int = 0
    stride: int = PAGE_SIZE

    def validate(self) -> None:
        """
        Raises:
            InvalidSpec: naming the offending parameter
        """
        if not isinstance(self.kind, TraceKind):
            raise InvalidSpec(f"unknown trace kind {self.kind!r}")
        if self.n_events < 0:
            raise InvalidSpec(f"n_events must be non-negative, got {self.n_events}")
        if self.region_bytes <= 0 or self.region_bytes % THP_SIZE != 0:
            raise InvalidSpec(f"region_bytes must be a positive multiple of 2 MB, got {self.region_bytes}")
        if self.region_bytes > VADDR_LIMIT:
            raise InvalidSpec("region_bytes exceeds the 56-bit address space")
        if not 0.0 <= self.write_fraction <= 1.0:
            raise InvalidSpec(f"write_fraction must be in [0, 1], got {self.write_fraction}")
        if self.seed < 0:
            raise InvalidSpec(f"seed must be non-negative, got {self.seed}")

        if self.kind == TraceKind.ZIPFIAN and self.zipf_s <= 0:
            raise InvalidSpec(f"Zipfian skew must be positive, got {self.zipf_s}")
        if self.kind == TraceKind.HOT_BLOCKS:
            if not 0 < self.block_bytes <= THP_SIZE or self.block_bytes % ACCESS_GRANULE != 0:
                raise InvalidSpec(f"block_bytes must be a multiple of {ACCESS_GRANULE} "
                                  f"in (0, 2 MB], got {self.block_bytes}")
            if not 0 <= self.hot_offset or self.hot_offset + self.block_bytes > THP_SIZE:
                raise InvalidSpec("hot window must lie inside its 2 MB region")
            if self.hot_offset % ACCESS_GRANULE != 0:
                raise InvalidSpec(f"hot_offset must be a multiple of {ACCESS_GRANULE}")
            if not 0.0 < self.hot_fraction <= 1.0:
                raise InvalidSpec(f"hot_fraction must be in (0, 1], got {self.hot_fraction}")
            if not 0.0 <= self.hot_weight <= 1.0:
                raise InvalidSpec(f"hot_weight must be in [0, 1], got {self.hot_weight}")
        if self.kind == TraceKind.STRIDED and (self.stride <= 0 or self.stride % ACCESS_GRANULE != 0):
            raise InvalidSpec(f"stride must be a positive multiple of {ACCESS_GRANULE}, got {self.stride}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TraceSpec':
        """
        Build a spec from a config mapping

        Raises:
            InvalidSpec: unknown kind, unknown key or invalid value
        """
        names = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise InvalidSpec(f"unknown trace keys: {unknown}")
        values = dict(data)
        if 'kind' in values and not isinstance(values['kind'], TraceKind):
            try:
                values['kind'] = TraceKind(values['kind'])
            except ValueError:
                raise InvalidSpec(f"trace kind must be one of {[k.value for k in TraceKind]}, "
                                  f"got {values['kind']!r}")
        spec = cls(**values)
        spec.validate()
        return spec

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['kind'] = self.kind.value
        return data


def _zipf_pages(spec: TraceSpec, rng: np.random.Generator) -> np.ndarray:
    pages = spec.region_bytes // PAGE_SIZE
    ranks = np.arange(1, pages + 1, dtype=np.float64)
    weights = 1.0 / np.power(ranks, spec.zipf_s)
    weights /= weights.sum()
    # Rank r lands on page r-1 unless scrambled through a seeded permutation
    page_of_rank = rng.permutation(pages) if spec.scramble else np.arange(pages)
    return page_of_rank[rng.choice(pages, size=spec.n_events, p=weights)] * PAGE_SIZE


def _hot_block_addresses(spec: TraceSpec, rng: np.random.Generator) -> np.ndarray:
    n = spec.n_events
    regions = spec.region_bytes // THP_SIZE
    hot_regions = min(regions, math.ceil(spec.hot_fraction * regions))
    is_hot = np.zeros(regions, dtype=bool)
    is_hot[rng.permutation(regions)[:hot_regions]] = True

    region = rng.integers(0, regions, size=n)
    in_window = is_hot[region] & (rng.random(n) < spec.hot_weight)
    window_offset = spec.hot_offset + rng.integers(0, spec.block_bytes // ACCESS_GRANULE, size=n) * ACCESS_GRANULE
    region_offset = rng.integers(0, THP_SIZE // ACCESS_GRANULE, size=n) * ACCESS_GRANULE
    return region * THP_SIZE + np.where(in_window, window_offset, region_offset)


def generate(spec: TraceSpec) -> List[AccessEvent]:
    """
    Generate a trace; equal specs give identical traces

    Args:
        spec: Trace recipe

    Returns:
        Events with ticks 0..n-1

    Raises:
        InvalidSpec: the spec fails validation
    """
    spec.validate()
    n = spec.n_events
    if n == 0:
        return []
    rng = np.random.default_rng(spec.seed)

    if spec.kind == TraceKind.UNIFORM:
        vaddrs = rng.integers(0, spec.region_bytes // ACCESS_GRANULE, size=n) * ACCESS_GRANULE
    elif spec.kind == TraceKind.ZIPFIAN:
        pages = _zipf_pages(spec, rng)
        vaddrs = pages + rng.integers(0, PAGE_SIZE // ACCESS_GRANULE, size=n) * ACCESS_GRANULE
    elif spec.kind == TraceKind.HOT_BLOCKS:
        vaddrs = _hot_block_addresses(spec, rng)
    else:
        vaddrs = (np.arange(n, dtype=np.int64) * spec.stride) % spec.region_bytes

    writes = rng.random(n) < spec.write_fraction
    return [AccessEvent(tick, vaddr, is_write)
            for tick, (vaddr, is_write) in enumerate(zip(vaddrs.tolist(), writes.tolist()))]


def write_trace(path: Union[str, Path], events: Sequence[AccessEvent]) -> int:
    """
    Write events in the binary trace format

    Layout: 8-byte magic, then one 16-byte little-endian record per event
    (u64 tick, u64 word with the vaddr in the low 56 bits and flags above).

    Returns:
        Bytes written
    """
    records = np.empty(len(events), dtype=RECORD_DTYPE)
    for i, ev in enumerate(events):
        if not 0 <= ev.vaddr < VADDR_LIMIT:
            raise InvalidSpec(f"event {i}: vaddr {ev.vaddr:#x} does not fit in 56 bits")
        flags = FLAG_WRITE if ev.is_write else 0
        records[i] = (ev.tick, ev.vaddr | (flags << VADDR_BITS))

    payload = TRACE_MAGIC + records.tobytes()
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'wb') as f:
        f.write(payload)
    return len(payload)


def read_trace(path: Union[str, Path]) -> List[AccessEvent]:
    """
    Read a binary trace file

    Raises:
        BadMagic: the file does not start with the trace magic
        TruncatedFile: the file ends inside the magic or a record
    """
    with open(path, 'rb') as f:
        data = f.read()

    head = data[:len(TRACE_MAGIC)]
    if head != TRACE_MAGIC[:len(head)]:
        raise BadMagic(f"{path}: not a trace file")
    if len(head) < len(TRACE_MAGIC):
        raise TruncatedFile(f"{path}: file ends inside the header ({len(data)} bytes)")

    body = data[len(TRACE_MAGIC):]
    if len(body) % RECORD_SIZE != 0:
        raise TruncatedFile(f"{path}: {len(body) % RECORD_SIZE} trailing bytes after "
                            f"{len(body) // RECORD_SIZE} records")

    records = np.frombuffer(body, dtype=RECORD_DTYPE)
    ticks = records['tick'].tolist()
    words = records['word'].tolist()
    return [AccessEvent(tick, word & (VADDR_LIMIT - 1), bool((word >> VADDR_BITS) & FLAG_WRITE))
            for tick, word in zip(ticks, words)]


def trace_stats(events: Sequence[AccessEvent]) -> Tuple[int, int, int]:
    """(events, writes, highest vaddr) of a trace; highest is -1 when empty"""
    writes = sum(1 for ev in events if ev.is_write)
    top = max((ev.vaddr for ev in events), default=-1)
    return len(events), writes, top
