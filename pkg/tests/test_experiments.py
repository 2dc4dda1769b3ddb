"""
End-to-end experiment checks on the example scenarios

These replay full traces and take tens of seconds; run them with
`pytest -m slow` or skip them with `-m "not slow"`.
"""

import os
from dataclasses import replace

import pytest

from config_manager import ConfigManager
from conftest import ROOT
from core_model import PolicyKind
from experiment_runner import ExperimentRunner, load_events
from memory_simulator import run_scenario
from run_report import EventLog

pytestmark = pytest.mark.slow


def example(name):
    return ConfigManager(os.path.join(ROOT, 'config', name), settings_path="").get_scenario()


def run(scenario, policy, contention=None, event_log=None):
    events, region = load_events(scenario)
    sim_cfg = scenario.sim_cfg if contention is None else scenario.sim_cfg.with_contention(contention)
    return run_scenario(sim_cfg, scenario.policy_cfg, events, policy,
                        name=scenario.name, region_bytes=region, event_log=event_log)


@pytest.fixture(scope="module")
def sweep_reports(tmp_path_factory):
    runner = ExperimentRunner(str(tmp_path_factory.mktemp("sweep")))
    reports = runner.sweep(example('sweep.example.json'))
    return {(r.policy, r.contention_pct): r for r in reports}


def test_fragmented_fast_tier():
    scenario = example('fragmentation.example.json')
    no_split = run(scenario, PolicyKind.NO_SPLIT)
    tier_bpf = run(scenario, PolicyKind.TIER_BPF)

    attempts = no_split.promote_success + no_split.promote_fail
    assert no_split.promote_fail / attempts >= 0.9
    assert tier_bpf.promote_fail <= no_split.promote_fail / 10
    assert tier_bpf.promote_success >= 1.5 * no_split.promote_success


def test_contention_gate_and_trend(sweep_reports):
    idle_base = sweep_reports[("NoSplit", 0)]
    idle_bpf = sweep_reports[("TierBpf", 0)]
    assert idle_bpf.split_events == 0
    assert abs(idle_bpf.throughput_proxy - idle_base.throughput_proxy) <= 0.02 * idle_base.throughput_proxy

    busy_base = sweep_reports[("NoSplit", 100)]
    busy_bpf = sweep_reports[("TierBpf", 100)]
    assert busy_bpf.split_events > 0
    assert busy_bpf.throughput_proxy >= 1.05 * busy_base.throughput_proxy


def test_tlb_ordering(sweep_reports):
    scenario = example('sweep.example.json')
    full_4k = run(scenario, PolicyKind.FULL_4K_SPLIT, contention=100)
    no_split = sweep_reports[("NoSplit", 100)].tlb_misses_per_1k
    tier_bpf = sweep_reports[("TierBpf", 100)].tlb_misses_per_1k
    assert no_split <= tier_bpf <= full_4k.tlb_misses_per_1k
    assert no_split < full_4k.tlb_misses_per_1k


def test_zipf_hot_subfolios_are_a_minority():
    report = run(example('zipf.example.json'), PolicyKind.TIER_BPF)
    assert report.split_events > 0
    assert 0.0 < report.hot_subfolio_fraction <= 0.6


def test_prevented_faults_never_split(tmp_path):
    scenario = example('admission.example.yaml')
    with EventLog(str(tmp_path / "faults.ndjson"), keep=True) as log:
        report = run(scenario, PolicyKind.TIER_BPF_ADMISSION, event_log=log)

    prevented = [r for r in log.records if r['verdict'] == 'Prevent']
    assert prevented
    assert report.admission_prevented == len(prevented)
    assert all(r['page_class'] == 'ReadHeavy' for r in prevented)
    assert all(r['split_events'] == 0 and r['bytes_migrated'] == 0 for r in prevented)
    assert report.admission_prevented_read_heavy == report.admission_prevented


def test_parallel_sweep_matches_serial(tmp_path):
    scenario = example('sweep.example.json')
    scenario.trace = replace(scenario.trace, n_events=20000)
    serial = ExperimentRunner(str(tmp_path / "serial")).sweep(scenario, [0, 100])
    parallel = ExperimentRunner(str(tmp_path / "parallel")).sweep(scenario, [0, 100], jobs=2)
    assert [r.to_dict() for r in serial] == [r.to_dict() for r in parallel]
    serial_csv = (tmp_path / "serial" / "results.csv").read_text()
    assert serial_csv == (tmp_path / "parallel" / "results.csv").read_text()
