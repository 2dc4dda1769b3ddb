"""Tests for the simulated machine: access path, hint faults, demotion and the event loop"""

import pytest

from core_model import (
    AccessEvent,
    DuplexMode,
    FolioOrder,
    PolicyConfig,
    PolicyKind,
    THP_SIZE,
    TierId,
)
from errors import ConfigError, SlowTierFull, UnmappedAddress
from memory_simulator import (
    MemoryState,
    MigrationOutcome,
    SimConfig,
    access,
    demote_if_pressured,
    hint_fault,
    region_for,
    run_scenario,
)
from profiling import SubpageHistogram
from run_report import EventLog
from workload import TraceKind, TraceSpec, generate

KB = 1024


def contended(ms):
    ms.slow.begin_epoch(ms.sim_cfg.slow_peak_bytes)


def fragment_against_thp(ms):
    """Pin the first frame of every 2 MB block so order 9 fails but order 7 fits"""
    for base in range(0, ms.fast.frame_count, 512):
        ms.fast.reserve_frame(base)


# Access path

def test_fast_access_on_idle_system(small_sim_cfg, policy_cfg):
    ms = MemoryState(small_sim_cfg, policy_cfg)
    ms.install_folio(0, FolioOrder.SIZE_2M, TierId.FAST)
    assert access(ms, AccessEvent(0, 0x40, False)) == small_sim_cfg.fast_base_latency


def test_slow_access_at_full_utilization_costs_double(small_sim_cfg, policy_cfg):
    ms = MemoryState(small_sim_cfg, policy_cfg)
    ms.map_region(THP_SIZE)
    contended(ms)
    cost = ms.access(AccessEvent(0, 0x80, False))
    assert cost == pytest.approx(2 * small_sim_cfg.slow_base_latency)


def test_second_access_same_folio_hits_tlb(small_sim_cfg, policy_cfg):
    ms = MemoryState(small_sim_cfg, policy_cfg)
    ms.map_region(THP_SIZE)
    ms.access(AccessEvent(0, 0, False))
    ms.access(AccessEvent(1, 0x1000, True))
    assert ms.report.tlb_misses == 1
    assert ms.report.tlb_hits == 1


def test_slow_access_feeds_traffic_window(small_sim_cfg, policy_cfg):
    ms = MemoryState(small_sim_cfg, policy_cfg)
    ms.map_region(THP_SIZE)
    ms.access(AccessEvent(0, 0, False))
    ms.access(AccessEvent(1, 64, True))
    ms.access(AccessEvent(2, 128, True))
    assert ms.traffic.totals() == (64, 128)
    assert ms.slow.demand_bytes == 192


def test_unmapped_access(small_sim_cfg, policy_cfg):
    ms = MemoryState(small_sim_cfg, policy_cfg)
    ms.map_region(THP_SIZE)
    with pytest.raises(UnmappedAddress):
        ms.access(AccessEvent(0, THP_SIZE + 5, False))


def test_map_region_too_large(policy_cfg):
    ms = MemoryState(SimConfig(fast_frames=512, slow_frames=1024), policy_cfg)
    with pytest.raises(SlowTierFull):
        ms.map_region(3 * THP_SIZE)


# Hint faults

def test_default_hooks_promote_whole_thp(small_sim_cfg, policy_cfg):
    ms = MemoryState(small_sim_cfg, policy_cfg, PolicyKind.NO_SPLIT)
    ms.map_region(2 * THP_SIZE)
    contended(ms)
    folio = ms.folio_at(0)
    outcome = hint_fault(ms, folio, 0x3000)
    assert outcome == MigrationOutcome.PROMOTED
    assert ms.report.promote_success == 1
    assert ms.report.promoted_bytes == THP_SIZE
    assert ms.report.split_events == 0
    assert ms.folio_at(0).tier == TierId.FAST
    assert ms.check_frame_conservation()


def test_tier_bpf_splits_to_512k_on_fragmented_fast_tier(small_sim_cfg, policy_cfg, hot128_counts):
    ms = MemoryState(small_sim_cfg, policy_cfg, PolicyKind.TIER_BPF)
    ms.map_region(2 * THP_SIZE)
    fragment_against_thp(ms)
    ms.histogram = SubpageHistogram.from_counts(hot128_counts)
    contended(ms)

    outcome = ms.hint_fault(ms.folio_at(0), 0x1000)
    report = ms.report
    assert outcome == MigrationOutcome.PROMOTED
    assert report.splits_by_order[int(FolioOrder.SIZE_512K)] == 1
    assert report.promote_success == 1
    assert report.promote_fail == 0
    assert report.promoted_bytes == 512 * KB

    head = ms.folio_at(0)
    assert head.order == FolioOrder.SIZE_512K
    assert head.tier == TierId.FAST
    for offset in (512 * KB, 1024 * KB, 1536 * KB):
        child = ms.folio_at(offset)
        assert child.order == FolioOrder.SIZE_512K
        assert child.tier == TierId.SLOW
    assert report.hot_subfolios == 1
    assert report.total_subfolios == 4
    assert ms.check_frame_conservation()


def test_whole_thp_fails_on_fragmented_fast_tier(small_sim_cfg, policy_cfg):
    ms = MemoryState(small_sim_cfg, policy_cfg, PolicyKind.NO_SPLIT)
    ms.map_region(THP_SIZE)
    fragment_against_thp(ms)
    assert ms.hint_fault(ms.folio_at(0), 0) == MigrationOutcome.FAILED
    assert ms.report.promote_fail == 1
    assert ms.report.promote_fail_pages == 512
    assert ms.folio_at(0).tier == TierId.SLOW


def test_splitting_gate_closed_without_contention(small_sim_cfg, policy_cfg, hot128_counts):
    ms = MemoryState(small_sim_cfg, policy_cfg, PolicyKind.TIER_BPF)
    ms.map_region(THP_SIZE)
    ms.histogram = SubpageHistogram.from_counts(hot128_counts)
    ms.begin_epoch()
    assert not ms.contention_active()
    ms.hint_fault(ms.folio_at(0), 0)
    assert ms.report.split_events == 0
    assert ms.folio_at(0).order == FolioOrder.SIZE_2M


def test_flat_histogram_migrates_whole(small_sim_cfg, policy_cfg, uniform_counts):
    ms = MemoryState(small_sim_cfg, policy_cfg, PolicyKind.TIER_BPF)
    ms.map_region(THP_SIZE)
    ms.histogram = SubpageHistogram.from_counts(uniform_counts)
    contended(ms)
    ms.hint_fault(ms.folio_at(0), 0)
    assert ms.report.split_events == 0
    assert ms.report.decisions_by_reason == {'FlatDistribution': 1}
    assert ms.report.promoted_bytes == THP_SIZE


def test_full_4k_split_promotes_hot_pages_and_fault_page(small_sim_cfg, policy_cfg):
    counts = [0] * 512
    for slot in (4, 5, 6):
        counts[slot] = 50
    ms = MemoryState(small_sim_cfg, policy_cfg, PolicyKind.FULL_4K_SPLIT)
    ms.map_region(THP_SIZE)
    ms.histogram = SubpageHistogram.from_counts(counts)

    ms.hint_fault(ms.folio_at(0), 100 * 4096)
    assert ms.report.splits_by_order[0] == 1
    assert ms.report.promote_success == 4
    assert ms.report.promote_success_pages == 4
    promoted = {vaddr >> 12 for vaddr in range(0, THP_SIZE, 4096)
                if ms.folio_at(vaddr).tier == TierId.FAST}
    assert promoted == {4, 5, 6, 100}


def test_prevented_fault_splits_and_moves_nothing(small_sim_cfg, policy_cfg, hot128_counts):
    with EventLog(keep=True) as log:
        ms = MemoryState(small_sim_cfg, policy_cfg, PolicyKind.TIER_BPF_ADMISSION, event_log=log)
        ms.map_region(THP_SIZE)
        ms.histogram = SubpageHistogram.from_counts(hot128_counts)
        contended(ms)
        ms.traffic.add(write_bytes=1 << 30)

        outcome = ms.hint_fault(ms.folio_at(0), 0x2000)

    assert outcome == MigrationOutcome.DEFERRED
    report = ms.report
    assert report.admission_prevented == 1
    assert report.admission_prevented_read_heavy == 1
    assert report.split_events == 0
    assert report.bytes_migrated == 0
    assert ms.folio_at(0).order == FolioOrder.SIZE_2M

    (record,) = log.records
    assert record['verdict'] == 'Prevent'
    assert record['split_events'] == 0
    assert record['bytes_migrated'] == 0


def test_half_duplex_admission_allows_without_sketch(small_sim_cfg, hot128_counts):
    cfg = PolicyConfig(duplex_mode=DuplexMode.HALF_DUPLEX)
    with EventLog(keep=True) as log:
        ms = MemoryState(small_sim_cfg, cfg, PolicyKind.TIER_BPF_ADMISSION, event_log=log)
        ms.map_region(THP_SIZE)
        ms.histogram = SubpageHistogram.from_counts(hot128_counts)
        contended(ms)
        ms.traffic.add(write_bytes=1 << 30)

        outcome = ms.hint_fault(ms.folio_at(0), 0x2000)

    assert ms.sketch is None
    assert outcome != MigrationOutcome.DEFERRED
    assert ms.report.admission_prevented == 0
    assert ms.report.admission_allowed == 0
    (record,) = log.records
    assert record['verdict'] == 'Allow'
    assert 'page_class' not in record


def test_hint_fault_requires_slow_folio(small_sim_cfg, policy_cfg):
    ms = MemoryState(small_sim_cfg, policy_cfg)
    folio = ms.install_folio(0, FolioOrder.SIZE_2M, TierId.FAST)
    with pytest.raises(ValueError):
        ms.hint_fault(folio, 0)


def test_armed_folio_faults_on_next_access(small_sim_cfg, policy_cfg):
    ms = MemoryState(small_sim_cfg, policy_cfg)
    ms.map_region(THP_SIZE)
    assert ms.scan() == 1
    ms.access(AccessEvent(0, 0x40, False))
    assert ms.report.faults == 1
    assert ms.folio_at(0).tier == TierId.FAST


def test_late_fault_is_cold(policy_cfg):
    cfg = SimConfig(fast_frames=2048, slow_frames=8192, hot_fault_latency=0)
    ms = MemoryState(cfg, policy_cfg)
    ms.map_region(THP_SIZE)
    ms.scan()
    ms.access(AccessEvent(0, 0, False))
    assert ms.report.faults == 0
    assert ms.report.faults_cold == 1
    assert ms.folio_at(0).tier == TierId.SLOW


def test_split_children_cover_parent(small_sim_cfg, policy_cfg):
    ms = MemoryState(small_sim_cfg, policy_cfg)
    ms.map_region(THP_SIZE)
    parent = ms.folio_at(0)
    children = ms.split_folio(parent, FolioOrder.SIZE_64K)
    assert len(children) == 32
    assert children[0].owner_vaddr == 0
    assert children[-1].end_vaddr == THP_SIZE
    for left, right in zip(children, children[1:]):
        assert left.end_vaddr == right.owner_vaddr
        assert right.base_frame - left.base_frame == 16
    assert parent.id not in ms.folios
    assert ms.check_frame_conservation()


# Demotion

def demotion_machine(count, fast_frames=512):
    ms = MemoryState(SimConfig(fast_frames=fast_frames, slow_frames=1024), PolicyConfig())
    touches = [(i * 7) % count + 1 for i in range(count)]
    folios = [ms.install_folio(i * 128 * KB, FolioOrder.SIZE_128K, TierId.FAST, last_touch=t)
              for i, t in enumerate(touches)]
    return ms, folios


def test_no_demotion_below_watermark():
    ms, _ = demotion_machine(8)
    assert ms.fast.used_fraction == 0.5
    assert demote_if_pressured(ms, 0.9) == 0


def test_demotes_oldest_first():
    ms, folios = demotion_machine(16)
    assert ms.fast.used_fraction == 1.0
    assert demote_if_pressured(ms, 0.5) == 8

    demoted = {f.last_touch for f in folios if f.tier == TierId.SLOW}
    assert demoted == set(range(1, 9))
    assert ms.report.demotions == 8
    assert ms.report.demoted_bytes == 8 * 128 * KB
    assert ms.check_frame_conservation()


def test_recent_access_protects_from_demotion():
    ms, folios = demotion_machine(16)
    oldest = min(folios, key=lambda f: f.last_touch)
    ms.tick = 100
    ms.access(AccessEvent(0, oldest.owner_vaddr, False))
    ms.demote_if_pressured(0.5)
    assert oldest.tier == TierId.FAST


def test_demotion_queue_tracks_folios_not_accesses():
    ms, folios = demotion_machine(16)
    oldest = sorted(folios, key=lambda f: f.last_touch)[:8]
    ms.tick = 100
    for _ in range(1000):
        for folio in oldest:
            ms.access(AccessEvent(0, folio.owner_vaddr, False))
    assert len(ms._fast_lru) == 16

    assert ms.demote_if_pressured(0.5) == 8
    assert all(f.tier == TierId.FAST for f in oldest)
    demoted = {f.last_touch for f in folios if f.tier == TierId.SLOW}
    assert demoted == set(range(9, 17))
    assert len(ms._fast_lru) == 8


def test_demotion_into_full_slow_tier():
    ms = MemoryState(SimConfig(fast_frames=512, slow_frames=512), PolicyConfig())
    ms.map_region(THP_SIZE)
    ms.install_folio(THP_SIZE, FolioOrder.SIZE_64K, TierId.FAST)
    with pytest.raises(SlowTierFull):
        ms.demote_if_pressured(0.0)


# Event loop

def hot_trace(n_events=20000, seed=3, write_fraction=0.0):
    spec = TraceSpec(kind=TraceKind.HOT_BLOCKS, n_events=n_events, region_bytes=8 * THP_SIZE,
                     block_bytes=64 * KB, hot_weight=0.9, seed=seed,
                     write_fraction=write_fraction)
    return generate(spec)


def test_empty_trace_reports_zeros(small_sim_cfg, policy_cfg):
    report = run_scenario(small_sim_cfg, policy_cfg, [], PolicyKind.TIER_BPF)
    assert report.events == 0
    assert report.promote_success == report.promote_fail == report.demotions == 0
    assert report.split_events == 0
    assert report.latency_proxy_total == 0.0
    assert report.throughput_proxy == 0.0


def test_run_is_deterministic(small_sim_cfg):
    cfg = small_sim_cfg.with_contention(100)
    policy_cfg = PolicyConfig(sample_prob=0.05, rng_seed=11)
    events = hot_trace()
    first = run_scenario(cfg, policy_cfg, events, PolicyKind.TIER_BPF, name="det")
    second = run_scenario(cfg, policy_cfg, events, PolicyKind.TIER_BPF, name="det")
    assert first.to_dict() == second.to_dict()
    assert first.to_csv_row() == second.to_csv_row()


def test_no_splits_without_contention(small_sim_cfg):
    report = run_scenario(small_sim_cfg, PolicyConfig(sample_prob=0.05), hot_trace(),
                          PolicyKind.TIER_BPF)
    assert report.faults > 0
    assert report.split_events == 0


def test_contended_run_splits_and_accounts_bytes(small_sim_cfg):
    report = run_scenario(small_sim_cfg.with_contention(100), PolicyConfig(sample_prob=1.0),
                          hot_trace(), PolicyKind.TIER_BPF)
    assert report.split_events > 0
    assert report.promoted_bytes == report.promote_success_pages * 4096
    assert report.bytes_migrated == report.promoted_bytes + report.demoted_bytes
    assert 0.0 < report.hot_subfolio_fraction <= 1.0


def test_event_log_matches_counters(small_sim_cfg, tmp_path):
    path = tmp_path / "faults.ndjson"
    with EventLog(str(path), keep=True) as log:
        report = run_scenario(small_sim_cfg.with_contention(100), PolicyConfig(sample_prob=0.05),
                              hot_trace(), PolicyKind.TIER_BPF, event_log=log)
    assert len(log.records) == report.faults
    assert sum(r['split_events'] for r in log.records) == report.split_events
    assert sum(r['bytes_migrated'] for r in log.records) == report.promoted_bytes
    assert path.read_text().count("\n") == report.faults


def test_region_for():
    assert region_for([]) == 0
    assert region_for([AccessEvent(0, 5, False)]) == THP_SIZE
    assert region_for([AccessEvent(0, THP_SIZE, False)]) == 2 * THP_SIZE


def test_sim_config_validation():
    with pytest.raises(ConfigError):
        SimConfig(fast_frames=1000)
    with pytest.raises(ConfigError):
        SimConfig(fragmentation='random')
    with pytest.raises(ConfigError):
        SimConfig.from_dict({'base_system': 'Linux'})
    assert SimConfig(slow_peak_bytes=1000, contention_pct=50).background_bytes == 500
