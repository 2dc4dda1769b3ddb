"""
Experiment Runner
Single runs, contention sweeps and trace profiling on top of the simulator,
with report files written to an output directory
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from config_manager import Scenario
from core_model import AccessEvent, PolicyConfig, PolicyKind, THP_SIZE
from errors import ConfigError
from memory_simulator import SimConfig, region_for, run_scenario
from profiling import HistogramSnapshot, profile_trace, write_histogram_csv
from run_report import EventLog, ReportWriter, RunReport
from workload import generate, read_trace


@dataclass
class RunOutput:
    """Report plus the files written for it"""
    report: RunReport
    report_path: str
    csv_path: str


def load_events(scenario: Scenario) -> Tuple[List[AccessEvent], int]:
    """
    Events and mapped region size for a scenario

    Returns:
        (events, region_bytes)

    Raises:
        ConfigError: the trace file is missing
    """
    if scenario.trace is not None:
        events = generate(scenario.trace)
        region = scenario.region_bytes or scenario.trace.region_bytes
    else:
        if not scenario.trace_path or not Path(scenario.trace_path).is_file():
            raise ConfigError(f"Trace file not found: {scenario.trace_path}")
        events = read_trace(scenario.trace_path)
        region = scenario.region_bytes or region_for(events)
    if region % THP_SIZE != 0:
        raise ConfigError(f"region_bytes must be a multiple of 2 MB, got {region}")
    return events, region


def _sweep_cell(args: Tuple[SimConfig, PolicyConfig, List[AccessEvent], PolicyKind, str, int]) -> RunReport:
    sim_cfg, policy_cfg, events, policy, name, region = args
    return run_scenario(sim_cfg, policy_cfg, events, policy, name=name, region_bytes=region or None)


class ExperimentRunner:
    """Runs scenarios and writes their reports"""

    def __init__(self, output_dir: str = "results", logger=None):
        """
        Initialize experiment runner

        Args:
            output_dir: Directory for reports and results.csv
            logger: Logger instance
        """
        self.output_dir = output_dir
        self.logger = logger
        self.writer = ReportWriter(output_dir, logger=logger)

    def run(self, scenario: Scenario, event_log_path: Optional[str] = None) -> RunOutput:
        """
        Run the scenario's first policy at its configured contention

        Writes <name>.report.json and appends one row to results.csv.
        """
        events, region = load_events(scenario)
        with EventLog(event_log_path) as event_log:
            report = run_scenario(
                scenario.sim_cfg, scenario.policy_cfg, events, scenario.policy,
                name=scenario.name, region_bytes=region or None,
                event_log=event_log, logger=self.logger,
            )

        report_path = self.writer.write_json_report(report)
        csv_path = self.writer.append_csv_row(report)
        return RunOutput(report, report_path, csv_path)

    def sweep(self, scenario: Scenario, levels: Optional[Sequence[float]] = None,
              jobs: int = 1) -> List[RunReport]:
        """
        Run every (policy, contention level) pair and write a fresh results.csv

        Args:
            scenario: Scenario with one or more policies
            levels: Contention percentages; defaults to the scenario's levels
            jobs: Worker processes; 1 runs in-process

        Returns:
            Reports ordered by policy (config order) then level (given order)
        """
        levels = list(levels if levels is not None else scenario.contention_levels)
        events, region = load_events(scenario)

        cells = [
            (scenario.sim_cfg.with_contention(level), scenario.policy_cfg, events,
             policy, scenario.name, region)
            for policy in scenario.policies
            for level in levels
        ]
        if self.logger:
            self.logger.info(f"Sweep {scenario.name}: {len(scenario.policies)} policies x "
                             f"{len(levels)} levels, {len(events)} events, jobs={jobs}")

        if jobs > 1 and len(cells) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                # map preserves submission order
                reports = list(pool.map(_sweep_cell, cells))
        else:
            reports = [_sweep_cell(cell) for cell in cells]

        if self.logger:
            for report in reports:
                self.logger.log_sweep_row(report.scenario, report.policy,
                                          report.contention_pct, report.throughput_proxy)

        self.writer.write_results_csv(reports)
        return reports

    def profile(self, scenario: Scenario, out_path: str) -> HistogramSnapshot:
        """Sample the scenario's trace into a histogram and dump it as CSV"""
        events, _ = load_events(scenario)
        hist = profile_trace(events, scenario.policy_cfg.sample_prob, scenario.policy_cfg.rng_seed)
        snap = hist.snapshot()
        write_histogram_csv(out_path, snap)
        if self.logger:
            self.logger.info(f"Profiled {len(events)} events: {snap.total} samples -> {out_path}")
        return snap
