"""Tests for trace generation and the binary trace codec"""

from collections import Counter

import numpy as np
import pytest

from core_model import AccessEvent, THP_SIZE
from errors import BadMagic, InvalidSpec, TruncatedFile
from workload import (
    TRACE_MAGIC,
    TraceKind,
    TraceSpec,
    generate,
    read_trace,
    trace_stats,
    write_trace,
)

KB = 1024


def test_uniform_stays_in_region():
    events = generate(TraceSpec(kind=TraceKind.UNIFORM, n_events=512,
                                region_bytes=THP_SIZE, seed=5))
    assert len(events) == 512
    assert all(0 <= ev.vaddr < THP_SIZE for ev in events)
    assert [ev.tick for ev in events] == list(range(512))


def test_hot_blocks_concentrate_in_window():
    spec = TraceSpec(kind=TraceKind.HOT_BLOCKS, n_events=100_000, region_bytes=16 * THP_SIZE,
                     block_bytes=512 * KB, hot_weight=0.9, seed=1)
    events = generate(spec)
    in_window = sum(1 for ev in events if ev.vaddr % THP_SIZE < 512 * KB)
    assert in_window / len(events) >= 0.85


def test_hot_blocks_offset_and_fraction():
    spec = TraceSpec(kind=TraceKind.HOT_BLOCKS, n_events=20_000, region_bytes=8 * THP_SIZE,
                     block_bytes=64 * KB, hot_offset=256 * KB, hot_fraction=0.5,
                     hot_weight=1.0, seed=2)
    events = generate(spec)
    per_region = Counter()
    for ev in events:
        offset = ev.vaddr % THP_SIZE
        if 256 * KB <= offset < 320 * KB:
            per_region[ev.vaddr // THP_SIZE] += 1
    hot_regions = [r for r, n in per_region.items() if n > 1000]
    assert len(hot_regions) == 4


def test_generation_is_deterministic():
    for kind in TraceKind:
        spec = TraceSpec(kind=kind, n_events=2000, region_bytes=4 * THP_SIZE,
                         write_fraction=0.3, seed=9)
        assert generate(spec) == generate(spec)


def test_seed_changes_trace():
    a = generate(TraceSpec(n_events=100, seed=1))
    b = generate(TraceSpec(n_events=100, seed=2))
    assert a != b


def test_write_fraction():
    events = generate(TraceSpec(n_events=10_000, write_fraction=0.3, seed=4))
    writes = trace_stats(events)[1]
    assert 2700 <= writes <= 3300
    assert trace_stats(generate(TraceSpec(n_events=500, seed=4)))[1] == 0


def test_strided_wraps():
    events = generate(TraceSpec(kind=TraceKind.STRIDED, n_events=1000, region_bytes=THP_SIZE,
                                stride=4096))
    assert events[511].vaddr == 511 * 4096
    assert events[512].vaddr == 0


def test_zipf_rank_frequency_is_monotone():
    spec = TraceSpec(kind=TraceKind.ZIPFIAN, n_events=1_000_000, region_bytes=32 * THP_SIZE,
                     zipf_s=0.99, seed=8)
    pages = Counter(ev.vaddr >> 12 for ev in generate(spec))
    top = [pages[p] for p in range(16)]
    assert all(a >= b for a, b in zip(top, top[1:]))


def test_zipf_scramble_moves_hot_page():
    base = dict(kind=TraceKind.ZIPFIAN, n_events=50_000, region_bytes=4 * THP_SIZE, seed=8)
    plain = Counter(ev.vaddr >> 12 for ev in generate(TraceSpec(**base)))
    scrambled = Counter(ev.vaddr >> 12 for ev in generate(TraceSpec(scramble=True, **base)))
    assert plain.most_common(1)[0][0] == 0
    assert scrambled.most_common(1)[0][1] == pytest.approx(plain[0], rel=0.1)


def test_addresses_are_cache_line_aligned():
    for kind in TraceKind:
        events = generate(TraceSpec(kind=kind, n_events=1000, region_bytes=2 * THP_SIZE, seed=3))
        assert all(ev.vaddr % 64 == 0 for ev in events)


@pytest.mark.parametrize("values", [
    {'region_bytes': 3 * KB},
    {'write_fraction': 1.5},
    {'kind': TraceKind.ZIPFIAN, 'zipf_s': 0.0},
    {'kind': TraceKind.HOT_BLOCKS, 'block_bytes': 4 * THP_SIZE},
    {'kind': TraceKind.HOT_BLOCKS, 'hot_offset': THP_SIZE - 32 * KB, 'block_bytes': 64 * KB},
    {'kind': TraceKind.STRIDED, 'stride': 100},
])
def test_invalid_specs(values):
    with pytest.raises(InvalidSpec):
        generate(TraceSpec(**values))


def test_from_dict_rejects_unknown_key_and_kind():
    with pytest.raises(InvalidSpec):
        TraceSpec.from_dict({'kind': 'Uniform', 'events': 5})
    with pytest.raises(InvalidSpec):
        TraceSpec.from_dict({'kind': 'Gaussian'})
    assert TraceSpec.from_dict({'kind': 'HotBlocks'}).kind == TraceKind.HOT_BLOCKS


def test_empty_trace_file_is_magic_only(tmp_path):
    path = tmp_path / "empty.trace"
    assert write_trace(path, []) == 8
    assert path.read_bytes() == TRACE_MAGIC
    assert read_trace(path) == []


def test_three_events_take_56_bytes(tmp_path):
    events = [AccessEvent(0, 0x1000, False), AccessEvent(1, 0x2040, True),
              AccessEvent(2, (1 << 56) - 64, False)]
    path = tmp_path / "three.trace"
    assert write_trace(path, events) == 56
    assert read_trace(path) == events


def test_generated_trace_round_trips(tmp_path):
    rng = np.random.default_rng(0)
    for i in range(1000):
        spec = TraceSpec(kind=TraceKind(rng.choice([k.value for k in TraceKind])),
                         n_events=int(rng.integers(0, 300)), write_fraction=0.5, seed=i)
        events = generate(spec)
        path = tmp_path / f"t{i}.trace"
        write_trace(path, events)
        assert read_trace(path) == events


def test_bad_magic(tmp_path):
    path = tmp_path / "bad.trace"
    path.write_bytes(b"NOTATRCE" + bytes(16))
    with pytest.raises(BadMagic):
        read_trace(path)


def test_truncated_record(tmp_path):
    path = tmp_path / "short.trace"
    write_trace(path, [AccessEvent(0, 0, False), AccessEvent(1, 64, False)])
    path.write_bytes(path.read_bytes()[:-5])
    with pytest.raises(TruncatedFile):
        read_trace(path)


def test_truncated_header(tmp_path):
    path = tmp_path / "stub.trace"
    path.write_bytes(TRACE_MAGIC[:4])
    with pytest.raises(TruncatedFile):
        read_trace(path)


def test_vaddr_must_fit_56_bits(tmp_path):
    with pytest.raises(InvalidSpec):
        write_trace(tmp_path / "big.trace", [AccessEvent(0, 1 << 56, False)])
