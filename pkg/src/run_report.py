"""
Run Report
Per-scenario counters and their CSV, JSON and text renderings, plus the
per-fault newline-delimited JSON event log
"""

import csv
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from core_model import FolioOrder, REPORTED_SPLIT_ORDERS


CSV_COLUMNS: List[str] = [
    'scenario', 'policy', 'contention_pct',
    'promote_success', 'promote_fail', 'demotions',
    'split_64k', 'split_128k', 'split_256k', 'split_512k', 'split_1m',
    'hot_subfolio_pct', 'tlb_mpki', 'bytes_migrated',
    'admit_allowed', 'admit_prevented',
    'latency_total', 'throughput_proxy', 'seed',
]


def _json_level(level: float):
    """Integral levels stay integers in JSON (50 rather than 50.0)"""
    return int(level) if float(level).is_integer() else float(level)


def _empty_splits() -> Dict[int, int]:
    return {int(FolioOrder.SIZE_4K): 0, **{int(order): 0 for order in REPORTED_SPLIT_ORDERS}}


@dataclass
class RunReport:
    """Counters collected over one scenario run; all counters only grow"""
    scenario: str = ""
    policy: str = ""
    contention_pct: float = 0.0
    seed: int = 0

    events: int = 0
    faults: int = 0
    faults_cold: int = 0

    promote_success: int = 0
    promote_fail: int = 0
    promote_success_pages: int = 0
    promote_fail_pages: int = 0
    demotions: int = 0
    promoted_bytes: int = 0
    demoted_bytes: int = 0

    splits_by_order: Dict[int, int] = field(default_factory=_empty_splits)
    hot_subfolios: int = 0
    total_subfolios: int = 0
    decisions_by_reason: Dict[str, int] = field(default_factory=dict)

    tlb_hits: int = 0
    tlb_misses: int = 0

    admission_allowed: int = 0
    admission_prevented: int = 0
    admission_prevented_read_heavy: int = 0
    admission_prevented_write_heavy: int = 0

    latency_proxy_total: float = 0.0

    @property
    def bytes_migrated(self) -> int:
        return self.promoted_bytes + self.demoted_bytes

    @property
    def hot_subfolio_fraction(self) -> float:
        if self.total_subfolios == 0:
            return 0.0
        return self.hot_subfolios / self.total_subfolios

    @property
    def tlb_misses_per_1k(self) -> float:
        if self.events == 0:
            return 0.0
        return self.tlb_misses * 1000.0 / self.events

    @property
    def throughput_proxy(self) -> float:
        if self.latency_proxy_total <= 0.0:
            return 0.0
        return self.events / self.latency_proxy_total

    @property
    def split_events(self) -> int:
        return sum(self.splits_by_order.values())

    def count_decision(self, reason: str) -> None:
        self.decisions_by_reason[reason] = self.decisions_by_reason.get(reason, 0) + 1

    def to_csv_row(self) -> Dict[str, str]:
        """One results.csv row in CSV_COLUMNS order"""
        row = {
            'scenario': self.scenario,
            'policy': self.policy,
            'contention_pct': f"{self.contention_pct:g}",
            'promote_success': str(self.promote_success),
            'promote_fail': str(self.promote_fail),
            'demotions': str(self.demotions),
            'hot_subfolio_pct': f"{100.0 * self.hot_subfolio_fraction:.2f}",
            'tlb_mpki': f"{self.tlb_misses_per_1k:.4f}",
            'bytes_migrated': str(self.bytes_migrated),
            'admit_allowed': str(self.admission_allowed),
            'admit_prevented': str(self.admission_prevented),
            'latency_total': f"{self.latency_proxy_total:.3f}",
            'throughput_proxy': f"{self.throughput_proxy:.6f}",
            'seed': str(self.seed),
        }
        for order in REPORTED_SPLIT_ORDERS:
            row[f"split_{order.label}"] = str(self.splits_by_order.get(int(order), 0))
        return {column: row[column] for column in CSV_COLUMNS}

    def to_dict(self) -> Dict[str, Any]:
        """Full report for JSON output"""
        return {
            'scenario': self.scenario,
            'policy': self.policy,
            'contention_pct': _json_level(self.contention_pct),
            'seed': self.seed,
            'events': self.events,
            'faults': self.faults,
            'faults_cold': self.faults_cold,
            'promote_success': self.promote_success,
            'promote_fail': self.promote_fail,
            'promote_success_pages': self.promote_success_pages,
            'promote_fail_pages': self.promote_fail_pages,
            'demotions': self.demotions,
            'promoted_bytes': self.promoted_bytes,
            'demoted_bytes': self.demoted_bytes,
            'bytes_migrated': self.bytes_migrated,
            'splits_by_order': {FolioOrder(o).label: n for o, n in sorted(self.splits_by_order.items())},
            'hot_subfolios': self.hot_subfolios,
            'total_subfolios': self.total_subfolios,
            'hot_subfolio_fraction': self.hot_subfolio_fraction,
            'decisions_by_reason': dict(sorted(self.decisions_by_reason.items())),
            'tlb_hits': self.tlb_hits,
            'tlb_misses': self.tlb_misses,
            'tlb_misses_per_1k': self.tlb_misses_per_1k,
            'admission_allowed': self.admission_allowed,
            'admission_prevented': self.admission_prevented,
            'admission_prevented_read_heavy': self.admission_prevented_read_heavy,
            'admission_prevented_write_heavy': self.admission_prevented_write_heavy,
            'latency_proxy_total': self.latency_proxy_total,
            'throughput_proxy': self.throughput_proxy,
        }


class ReportWriter:
    """Writes run reports to an output directory"""

    def __init__(self, output_dir: str = "results", logger=None):
        """
        Initialize report writer

        Args:
            output_dir: Directory to save reports
            logger: Logger instance
        """
        self.output_dir = output_dir
        self.logger = logger

    def _ensure_dir(self) -> None:
        Path(self.output_dir).mkdir(parents=True, exist_ok=True)

    def write_json_report(self, report: RunReport, name: Optional[str] = None) -> str:
        """
        Save one report as <name>.report.json

        Returns:
            Path to the generated JSON file
        """
        self._ensure_dir()
        report_path = os.path.join(self.output_dir, f"{name or report.scenario}.report.json")
        with open(report_path, 'w', encoding='utf-8') as f:
            json.dump(report.to_dict(), f, indent=2)
            f.write("\n")

        if self.logger:
            self.logger.info(f"Report written: {report_path}")
        return report_path

    def append_csv_row(self, report: RunReport, filename: str = "results.csv") -> str:
        """Append one row to the results CSV, writing the header for a new file"""
        self._ensure_dir()
        csv_path = os.path.join(self.output_dir, filename)
        new_file = not os.path.exists(csv_path) or os.path.getsize(csv_path) == 0
        with open(csv_path, 'a', newline='', encoding='utf-8') as f:
            writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS, lineterminator='\n')
            if new_file:
                writer.writeheader()
            writer.writerow(report.to_csv_row())
        return csv_path

    def write_results_csv(self, reports: Sequence[RunReport], filename: str = "results.csv") -> str:
        """Write a fresh results CSV with one row per report, in the given order"""
        self._ensure_dir()
        csv_path = os.path.join(self.output_dir, filename)
        with open(csv_path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS, lineterminator='\n')
            writer.writeheader()
            for report in reports:
                writer.writerow(report.to_csv_row())

        if self.logger:
            self.logger.info(f"Results written: {csv_path} ({len(reports)} rows)")
        return csv_path


def text_summary(report: RunReport) -> str:
    """Brief text summary for console display"""
    lines = []
    lines.append(f"=== {report.scenario} [{report.policy}] contention {report.contention_pct:g}% ===")
    lines.append(f"Events: {report.events}  Faults: {report.faults} (cold {report.faults_cold})")
    lines.append(f"Promotions: {report.promote_success} ok / {report.promote_fail} failed  "
                 f"Demotions: {report.demotions}")
    splits = ", ".join(f"{FolioOrder(o).label}={n}" for o, n in sorted(report.splits_by_order.items()) if n)
    lines.append(f"Splits: {splits or 'none'}  Hot subfolios: {100.0 * report.hot_subfolio_fraction:.1f}%")
    lines.append(f"Admission: {report.admission_allowed} allowed / {report.admission_prevented} prevented")
    lines.append(f"TLB misses/1K: {report.tlb_misses_per_1k:.3f}  "
                 f"Bytes migrated: {report.bytes_migrated}")
    lines.append(f"Throughput proxy: {report.throughput_proxy:.6f}")
    return "\n".join(lines)


class EventLog:
    """Per-fault event sink streaming newline-delimited JSON"""

    def __init__(self, path: Optional[str] = None, keep: bool = False):
        """
        Args:
            path: NDJSON file to stream to; nothing is written when omitted
            keep: Also keep records in memory
        """
        self.path = path
        self.keep = keep
        self.records: List[Dict[str, Any]] = []
        self._handle = None
        if path:
            Path(path).parent.mkdir(parents=True, exist_ok=True)
            self._handle = open(path, 'w', encoding='utf-8')

    @property
    def enabled(self) -> bool:
        return self._handle is not None or self.keep

    def write(self, record: Dict[str, Any]) -> None:
        if self.keep:
            self.records.append(record)
        if self._handle is not None:
            self._handle.write(json.dumps(record, sort_keys=True) + "\n")

    def close(self) -> None:
        if self._handle is not None:
            self._handle.close()
            self._handle = None

    def __enter__(self) -> 'EventLog':
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self.close()


def read_event_log(path: str) -> List[Dict[str, Any]]:
    with open(path, 'r', encoding='utf-8') as f:
        return [json.loads(line) for line in f if line.strip()]
