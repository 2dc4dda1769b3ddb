"""
TierSim - Main Entry Point
Command-line front end for the tiered-memory migration simulator
"""

import argparse
import json
import os
import sys
from typing import List, Optional

# Add src directory to path
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), 'src'))

from config_manager import ConfigManager, DEFAULT_SETTINGS_PATH, parse_levels, parse_policy
from core_model import PolicyConfig, SUBPAGES_PER_THP
from errors import ConfigError, TraceError
from experiment_runner import ExperimentRunner
from logger import init_logger, init_logger_from_config
from profiling import read_histogram_csv
from run_report import text_summary
from split_policy import decide_split
from workload import TraceKind, TraceSpec, generate, write_trace


EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


class SimulationEngine:
    """Main simulator controller: one method per subcommand"""

    def __init__(self, config_path: Optional[str] = None,
                 settings_path: str = DEFAULT_SETTINGS_PATH,
                 out_dir: str = "results"):
        """
        Initialize simulation engine

        Args:
            config_path: Scenario file; optional for split-analyze and gen-trace
            settings_path: User settings file for {KEY} placeholders
            out_dir: Directory for reports
        """
        self.config_path = config_path
        self.settings_path = settings_path
        self.out_dir = out_dir
        self.config = None
        self.logger = None
        self.runner = None

    def initialize(self) -> None:
        """
        Load configuration and logging

        Raises:
            ConfigError: the scenario file is missing or invalid
        """
        if self.config_path:
            self.config = ConfigManager(self.config_path, self.settings_path)
            self.logger = init_logger_from_config(self.config.get_logging_config())
            self.logger.info(f"Configuration loaded from {self.config_path}")
        else:
            self.logger = init_logger()
        self.runner = ExperimentRunner(self.out_dir, logger=self.logger)

    def _scenario(self, seed: Optional[int]):
        if self.config is None:
            raise ConfigError("--config is required for this command")
        scenario = self.config.get_scenario()
        if seed is not None:
            scenario = scenario.with_seed(seed)
        return scenario

    def cmd_run(self, seed: Optional[int] = None, event_log: Optional[str] = None,
                policy: Optional[str] = None, contention: Optional[str] = None) -> int:
        scenario = self._scenario(seed)
        if policy:
            scenario.policies = [parse_policy(policy)]
        if contention:
            levels = parse_levels(contention)
            if len(levels) != 1:
                raise ConfigError("run takes a single --contention level")
            scenario.sim_cfg = scenario.sim_cfg.with_contention(levels[0])

        output = self.runner.run(scenario, event_log_path=event_log)
        print(text_summary(output.report))
        print(f"✓ Report: {output.report_path}")
        print(f"✓ Results: {output.csv_path}")
        return EXIT_OK

    def cmd_sweep(self, seed: Optional[int] = None, contention: Optional[str] = None,
                  jobs: int = 1) -> int:
        scenario = self._scenario(seed)
        levels = parse_levels(contention) if contention else None
        reports = self.runner.sweep(scenario, levels, jobs=jobs)

        print(f"{'policy':<22}{'contention':>11}{'promoted':>10}{'failed':>8}{'throughput':>14}")
        for report in reports:
            print(f"{report.policy:<22}{report.contention_pct:>10g}%{report.promote_success:>10}"
                  f"{report.promote_fail:>8}{report.throughput_proxy:>14.6f}")
        print(f"✓ Results: {os.path.join(self.out_dir, 'results.csv')} ({len(reports)} rows)")
        return EXIT_OK

    def cmd_gen_trace(self, out: str, seed: Optional[int] = None,
                      kind: Optional[str] = None, n_events: Optional[int] = None,
                      region_mb: Optional[int] = None) -> int:
        if self.config is not None:
            spec = self._scenario(seed).trace
            if spec is None:
                raise ConfigError(f"{self.config_path}: gen-trace needs a 'trace' spec")
        else:
            values = {}
            if kind:
                values['kind'] = kind
            if n_events is not None:
                values['n_events'] = n_events
            if region_mb is not None:
                values['region_bytes'] = region_mb << 20
            if seed is not None:
                values['seed'] = seed
            spec = TraceSpec.from_dict(values)

        events = generate(spec)
        size = write_trace(out, events)
        if self.logger:
            self.logger.info(f"Trace {spec.kind.value}: {len(events)} events -> {out}")
        print(f"✓ Wrote {len(events)} events ({size} bytes) to {out}")
        return EXIT_OK

    def cmd_split_analyze(self, histogram_csv: str, fault_subpage: int = 0) -> int:
        if not 0 <= fault_subpage < SUBPAGES_PER_THP:
            raise ConfigError(f"--fault-subpage must be in [0, {SUBPAGES_PER_THP}), got {fault_subpage}")
        snap = read_histogram_csv(histogram_csv)
        if snap.is_empty:
            raise ConfigError(f"{histogram_csv}: histogram has no samples")
        cfg = self.config.get_policy_config() if self.config is not None else PolicyConfig()
        decision = decide_split(snap.counts, cfg, fault_subpage)
        print(json.dumps(decision.to_dict(), indent=2))
        return EXIT_OK

    def cmd_profile(self, out: str, seed: Optional[int] = None) -> int:
        snap = self.runner.profile(self._scenario(seed), out)
        print(f"✓ Histogram: {out} ({snap.total} samples)")
        return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tiersim",
        description="Deterministic tiered-memory page-migration simulator",
    )
    parser.add_argument("--settings", default=DEFAULT_SETTINGS_PATH,
                        help="KEY=VALUE file for {KEY} placeholders in configs")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run one scenario")
    run.add_argument("--config", required=True, help="Scenario file")
    run.add_argument("--seed", type=int, help="Override the scenario seed")
    run.add_argument("--event-log", help="Write per-fault events as NDJSON")
    run.add_argument("--policy", help="Override the scenario policy")
    run.add_argument("--contention", help="Override the contention level (percent)")
    run.add_argument("--out-dir", default="results")

    sweep = sub.add_parser("sweep", help="Sweep policies over contention levels")
    sweep.add_argument("--config", required=True, help="Scenario file")
    sweep.add_argument("--contention", help="Comma-separated levels, e.g. 0,25,50,100")
    sweep.add_argument("--seed", type=int, help="Override the scenario seed")
    sweep.add_argument("--jobs", type=int, default=1, help="Worker processes")
    sweep.add_argument("--out-dir", default="results")

    gen = sub.add_parser("gen-trace", help="Generate a binary trace file")
    gen.add_argument("--config", help="Scenario file with a 'trace' spec")
    gen.add_argument("--kind", choices=[k.value for k in TraceKind])
    gen.add_argument("--events", type=int, dest="n_events")
    gen.add_argument("--region-mb", type=int)
    gen.add_argument("--seed", type=int)
    gen.add_argument("--out", required=True, help="Trace file to write")

    split = sub.add_parser("split-analyze", help="Split decision for a histogram CSV")
    split.add_argument("histogram_csv")
    split.add_argument("--config", help="Scenario file supplying policy tunables")
    split.add_argument("--fault-subpage", type=int, default=0)

    prof = sub.add_parser("profile", help="Sample a trace into a histogram CSV")
    prof.add_argument("--config", required=True, help="Scenario file")
    prof.add_argument("--seed", type=int)
    prof.add_argument("--out", required=True, help="Histogram CSV to write")

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the process exit code"""
    args = build_parser().parse_args(argv)
    engine = SimulationEngine(getattr(args, 'config', None), args.settings,
                              getattr(args, 'out_dir', "results"))

    try:
        engine.initialize()
        if args.command == "run":
            return engine.cmd_run(args.seed, args.event_log, args.policy, args.contention)
        if args.command == "sweep":
            if args.jobs < 1:
                raise ConfigError("--jobs must be at least 1")
            return engine.cmd_sweep(args.seed, args.contention, args.jobs)
        if args.command == "gen-trace":
            return engine.cmd_gen_trace(args.out, args.seed, args.kind, args.n_events, args.region_mb)
        if args.command == "split-analyze":
            return engine.cmd_split_analyze(args.histogram_csv, args.fault_subpage)
        return engine.cmd_profile(args.out, args.seed)

    except (ConfigError, TraceError) as e:
        print(f"✗ {e}", file=sys.stderr)
        if engine.logger:
            engine.logger.error(f"{args.command} failed: {e}")
        return EXIT_CONFIG
    except Exception as e:
        print(f"✗ {args.command} error: {e}", file=sys.stderr)
        if engine.logger:
            engine.logger.critical(f"{args.command} error: {e}", exc_info=True)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
