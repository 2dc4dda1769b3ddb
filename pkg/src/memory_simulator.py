"""
Memory Simulator
Deterministic two-tier memory: folio table, interval hint-fault scanning,
the hook-ordered migration pipeline, watermark demotion and bandwidth-aware
latency accounting
"""

import heapq
from dataclasses import dataclass, asdict, fields, replace
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Set, Tuple

import numpy as np

from admission_policy import TrafficWindow
from buddy_allocator import TierState
from core_model import (
    AccessEvent,
    AdmissionVerdict,
    BaseSystem,
    Folio,
    FolioOrder,
    PAGE_SHIFT,
    PolicyConfig,
    PolicyKind,
    RwClass,
    THP_SHIFT,
    THP_SIZE,
    TierId,
    subpage_index,
)
from errors import ConfigError, NoContiguousBlock, SlowTierFull, UnmappedAddress
from hooks import HookRegistry, bind_policy, needs_sketch
from profiling import Sampler, SubpageHistogram
from run_report import EventLog, RunReport
from rwsketch import DualBcbf
from split_policy import SplitDecision
from tlb_model import TlbModel


FRAGMENTATION_MODES = ('none', 'checkerboard')


@dataclass(frozen=True)
class SimConfig:
    """Simulator geometry, cost model and event-loop knobs"""
    fast_frames: int = 16384
    slow_frames: int = 131072
    fast_base_latency: float = 1.0
    slow_base_latency: float = 2.5
    fast_peak_bytes: int = 1 << 30
    slow_peak_bytes: int = 64 << 20
    latency_slope: float = 1.0
    epoch_events: int = 8192
    scan_interval: int = 2048
    scan_batch: int = 64
    hot_fault_latency: int = 1024
    demotion_watermark: float = 0.95
    decay_interval_epochs: int = 4
    decay_shift: int = 1
    traffic_window: int = 8
    access_bytes: int = 64
    background_write_fraction: float = 0.5
    base_system: BaseSystem = BaseSystem.AUTONUMA
    tpp_headroom: float = 0.05
    cbf_blocks: int = 4096
    cbf_hashes: int = 4
    contention_pct: float = 0.0
    fragmentation: str = 'none'
    fragment_fraction: float = 1.0

    def __post_init__(self):
        for name in ('fast_frames', 'slow_frames'):
            value = getattr(self, name)
            if not isinstance(value, int) or value <= 0 or value % 512 != 0:
                raise ConfigError(f"'{name}' must be a positive multiple of 512, got {value!r}")
        for name in ('fast_peak_bytes', 'slow_peak_bytes', 'epoch_events', 'scan_interval',
                     'decay_interval_epochs', 'traffic_window', 'access_bytes', 'cbf_blocks'):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ConfigError(f"'{name}' must be a positive integer, got {value!r}")
        for name in ('scan_batch', 'hot_fault_latency'):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 0:
                raise ConfigError(f"'{name}' must be a non-negative integer, got {value!r}")
        for name in ('fast_base_latency', 'slow_base_latency'):
            if getattr(self, name) <= 0:
                raise ConfigError(f"'{name}' must be positive")
        if self.latency_slope < 0:
            raise ConfigError("'latency_slope' must be non-negative")
        if not 0.0 < self.demotion_watermark <= 1.0:
            raise ConfigError(f"'demotion_watermark' must be in (0, 1], got {self.demotion_watermark}")
        if not 0.0 <= self.tpp_headroom < self.demotion_watermark:
            raise ConfigError("'tpp_headroom' must be in [0, demotion_watermark)")
        if not isinstance(self.decay_shift, int) or not 0 <= self.decay_shift <= 10:
            raise ConfigError(f"'decay_shift' must be an integer in [0, 10], got {self.decay_shift!r}")
        if not 1 <= self.cbf_hashes <= 10:
            raise ConfigError(f"'cbf_hashes' must be in [1, 10], got {self.cbf_hashes}")
        if not 0.0 <= self.background_write_fraction <= 1.0:
            raise ConfigError("'background_write_fraction' must be in [0, 1]")
        if not 0.0 <= self.contention_pct <= 200.0:
            raise ConfigError(f"'contention_pct' must be in [0, 200], got {self.contention_pct}")
        if self.fragmentation not in FRAGMENTATION_MODES:
            raise ConfigError(f"'fragmentation' must be one of {list(FRAGMENTATION_MODES)}, "
                              f"got {self.fragmentation!r}")
        if not 0.0 <= self.fragment_fraction <= 1.0:
            raise ConfigError("'fragment_fraction' must be in [0, 1]")
        if not isinstance(self.base_system, BaseSystem):
            raise ConfigError(f"'base_system' must be a BaseSystem, got {self.base_system!r}")

    @classmethod
    def field_names(cls) -> Tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SimConfig':
        """Build from the flat config mapping; unknown keys are ignored"""
        values = {name: data[name] for name in cls.field_names() if name in data}
        if 'base_system' in values and not isinstance(values['base_system'], BaseSystem):
            try:
                values['base_system'] = BaseSystem(values['base_system'])
            except ValueError:
                raise ConfigError(f"'base_system' must be one of "
                                  f"{[b.value for b in BaseSystem]}, got {values['base_system']!r}")
        return cls(**values)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['base_system'] = self.base_system.value
        return data

    def with_contention(self, contention_pct: float) -> 'SimConfig':
        return replace(self, contention_pct=contention_pct)

    @property
    def background_bytes(self) -> int:
        """Background slow-tier traffic per epoch"""
        return int(self.slow_peak_bytes * self.contention_pct / 100.0)


class MigrationOutcome(Enum):
    DEFERRED = "Deferred"
    PROMOTED = "Promoted"
    PARTIAL = "Partial"
    FAILED = "Failed"


class MemoryState:
    """
    The simulated machine

    Every mapped 2 MB virtual region is covered by non-overlapping folios;
    page_owner maps each 4 KB virtual page to the id of the folio holding it.
    """

    def __init__(self, sim_cfg: SimConfig, policy_cfg: PolicyConfig,
                 policy: PolicyKind = PolicyKind.NO_SPLIT,
                 hooks: Optional[HookRegistry] = None,
                 event_log: Optional[EventLog] = None,
                 logger=None):
        """
        Build an empty two-tier machine

        Args:
            sim_cfg: Simulator configuration
            policy_cfg: Policy tunables
            policy: Migration policy; its hooks are bound unless hooks is given
            hooks: Explicit hook registry
            event_log: Per-fault event sink
            logger: Logger instance
        """
        self.sim_cfg = sim_cfg
        self.policy_cfg = policy_cfg
        self.policy = policy
        self.logger = logger
        self.event_log = event_log

        self.fast = TierState('fast', sim_cfg.fast_frames, sim_cfg.fast_peak_bytes,
                              sim_cfg.fast_base_latency, logger)
        self.slow = TierState('slow', sim_cfg.slow_frames, sim_cfg.slow_peak_bytes,
                              sim_cfg.slow_base_latency, logger)

        self.folios: Dict[int, Folio] = {}
        self.page_owner = np.full(0, -1, dtype=np.int64)
        self._next_id = 0
        self.tick = 0

        self.armed: Dict[int, int] = {}
        self.scan_cursor = 0
        self._fast_lru: List[Tuple[int, int]] = []
        self._lru_queued: Set[int] = set()

        self.tlb = TlbModel(policy_cfg.tlb_entries)
        self.histogram = SubpageHistogram()
        self.sampler = Sampler(policy_cfg.sample_prob, policy_cfg.rng_seed)
        self.traffic = TrafficWindow(sim_cfg.traffic_window)
        self.sketch: Optional[DualBcbf] = None
        if needs_sketch(policy, policy_cfg):
            self.sketch = DualBcbf(sim_cfg.cbf_blocks, sim_cfg.cbf_hashes, policy_cfg.rng_seed)
        self._record_rw = self.sketch is not None

        self.hooks = hooks if hooks is not None else bind_policy(
            policy, policy_cfg, self.sketch, self.traffic)
        self.report = RunReport(policy=policy.value, contention_pct=sim_cfg.contention_pct,
                                seed=policy_cfg.rng_seed)
        self.epochs_completed = 0

    # Folio table

    def _new_folio(self, base_frame: int, order: FolioOrder, tier: TierId,
                   owner_vaddr: int, last_touch: int = 0) -> Folio:
        folio = Folio(self._next_id, base_frame, order, tier, owner_vaddr, last_touch)
        self._next_id += 1
        self.folios[folio.id] = folio
        first = owner_vaddr >> PAGE_SHIFT
        self.page_owner[first:first + order.frames] = folio.id
        if tier == TierId.FAST:
            self._queue_lru(folio)
        return folio

    def _queue_lru(self, folio: Folio) -> None:
        """Give a fast folio its single demotion-heap entry; later touches refresh it lazily"""
        if folio.id not in self._lru_queued:
            self._lru_queued.add(folio.id)
            heapq.heappush(self._fast_lru, (folio.last_touch, folio.id))

    def _ensure_pages(self, end_vaddr: int) -> None:
        pages = end_vaddr >> PAGE_SHIFT
        if pages > self.page_owner.size:
            grown = np.full(pages, -1, dtype=np.int64)
            grown[:self.page_owner.size] = self.page_owner
            self.page_owner = grown

    def map_region(self, region_bytes: int) -> int:
        """
        Map [0, region_bytes) as 2 MB folios on the slow tier

        Returns:
            Number of THPs mapped

        Raises:
            SlowTierFull: the slow tier cannot hold the region
        """
        if region_bytes <= 0 or region_bytes % THP_SIZE != 0:
            raise ValueError(f"region_bytes must be a positive multiple of 2 MB, got {region_bytes}")
        self._ensure_pages(region_bytes)
        count = 0
        for vaddr in range(0, region_bytes, THP_SIZE):
            if self.page_owner[vaddr >> PAGE_SHIFT] >= 0:
                continue
            try:
                base = self.slow.alloc_contiguous(FolioOrder.SIZE_2M)
            except NoContiguousBlock:
                raise SlowTierFull(f"slow tier cannot map {region_bytes} bytes "
                                   f"({self.slow.frame_count} frames)")
            self._new_folio(base, FolioOrder.SIZE_2M, TierId.SLOW, vaddr)
            count += 1

        if self.logger:
            self.logger.info(f"Mapped {count} THPs ({region_bytes >> 20} MB) on the slow tier")
        return count

    def install_folio(self, vaddr: int, order: FolioOrder, tier: TierId,
                      last_touch: int = 0) -> Folio:
        """Map one folio at vaddr directly on a tier, bypassing the slow-tier placement"""
        if vaddr % order.size_bytes != 0:
            raise ValueError(f"vaddr {vaddr:#x} is not aligned to {order.label}")
        self._ensure_pages(vaddr + order.size_bytes)
        first = vaddr >> PAGE_SHIFT
        if (self.page_owner[first:first + order.frames] >= 0).any():
            raise ValueError(f"range at {vaddr:#x} is already mapped")
        state = self.fast if tier == TierId.FAST else self.slow
        base = state.alloc_contiguous(order)
        return self._new_folio(base, order, tier, vaddr, last_touch)

    def folio_at(self, vaddr: int) -> Folio:
        """
        Folio mapping an address

        Raises:
            UnmappedAddress: the address is outside every mapped folio
        """
        vpn = vaddr >> PAGE_SHIFT
        if vaddr < 0 or vpn >= self.page_owner.size or self.page_owner[vpn] < 0:
            raise UnmappedAddress(f"address {vaddr:#x} is not mapped")
        return self.folios[int(self.page_owner[vpn])]

    def tier_of(self, tier: TierId) -> TierState:
        return self.fast if tier == TierId.FAST else self.slow

    def split_folio(self, folio: Folio, order: FolioOrder) -> List[Folio]:
        """
        Replace a folio by aligned children of a smaller order, in vaddr order

        Children get new ids; the parent's TLB entry and arming are dropped.
        """
        tier = self.tier_of(folio.tier)
        pieces = tier.split_block(folio.base_frame, int(folio.order), int(order))
        del self.folios[folio.id]
        self.tlb.invalidate(folio.id)
        self.armed.pop(folio.id, None)

        step = order.size_bytes
        return [
            self._new_folio(base, order, folio.tier, folio.owner_vaddr + i * step, folio.last_touch)
            for i, base in enumerate(pieces)
        ]

    # Bandwidth

    def begin_epoch(self) -> None:
        background = self.sim_cfg.background_bytes
        self.slow.begin_epoch(background)
        self.fast.begin_epoch(0)
        if background:
            writes = int(background * self.sim_cfg.background_write_fraction)
            self.traffic.add(read_bytes=background - writes, write_bytes=writes)

    def contention_active(self) -> bool:
        """Slow-tier demand plus background traffic at or above the splitting gate"""
        return self.slow.pressure() >= self.policy_cfg.contention_gate

    def end_epoch(self) -> int:
        """
        Close the current epoch: periodic decay, demotion, traffic window rotation

        Returns:
            Number of folios demoted
        """
        self.epochs_completed += 1
        if self.epochs_completed % self.sim_cfg.decay_interval_epochs == 0:
            self.histogram.decay(self.sim_cfg.decay_shift)
            if self.sketch is not None:
                self.sketch.decay()

        watermark = self.sim_cfg.demotion_watermark
        if self.sim_cfg.base_system == BaseSystem.TPP:
            watermark -= self.sim_cfg.tpp_headroom
        demoted = self.demote_if_pressured(watermark)
        self.traffic.rotate()
        return demoted

    # Event path

    def access(self, ev: AccessEvent) -> float:
        """
        Apply one access event

        Returns:
            Latency cost of the access

        Raises:
            UnmappedAddress: ev.vaddr is not mapped
        """
        folio = self.folio_at(ev.vaddr)
        self.tick += 1
        folio.last_touch = self.tick
        report = self.report
        report.events += 1

        tier = self.fast if folio.tier == TierId.FAST else self.slow
        cost = tier.access_cost(self.sim_cfg.latency_slope)
        report.latency_proxy_total += cost

        size = self.sim_cfg.access_bytes
        tier.demand_bytes += size
        if folio.tier == TierId.SLOW:
            if ev.is_write:
                self.traffic.add(write_bytes=size)
            else:
                self.traffic.add(read_bytes=size)
        else:
            self._queue_lru(folio)

        if self.tlb.touch(folio.id):
            report.tlb_hits += 1
        else:
            report.tlb_misses += 1

        if self.sampler.sample(ev):
            self.histogram.record_sample(ev.vaddr)
            if self._record_rw:
                self.sketch.record(ev.vaddr, ev.is_write)

        armed_at = self.armed.pop(folio.id, None)
        if armed_at is not None and folio.tier == TierId.SLOW:
            if self.tick - armed_at <= self.sim_cfg.hot_fault_latency:
                self.hint_fault(folio, ev.vaddr)
            else:
                report.faults_cold += 1
        return cost

    def _armable(self, folio_id: int) -> bool:
        """Unarmed, or armed long enough ago that its next fault would count as cold"""
        armed_at = self.armed.get(folio_id)
        return armed_at is None or self.tick - armed_at > self.sim_cfg.hot_fault_latency

    def scan(self) -> int:
        """
        Arm up to scan_batch slow-tier folios, round-robin in vaddr order

        Returns:
            Number of folios armed
        """
        total_pages = self.page_owner.size
        if total_pages == 0:
            return 0
        armed = 0
        visited = 0
        cursor = self.scan_cursor
        while armed < self.sim_cfg.scan_batch and visited < total_pages:
            owner = int(self.page_owner[cursor])
            step = 1
            if owner >= 0:
                folio = self.folios[owner]
                step = folio.order.frames - ((cursor - (folio.owner_vaddr >> PAGE_SHIFT)))
                if folio.tier == TierId.SLOW and self._armable(folio.id):
                    self.armed[folio.id] = self.tick
                    armed += 1
            visited += step
            cursor = (cursor + step) % total_pages
        self.scan_cursor = cursor
        return armed

    # Migration

    def _promote(self, folio: Folio) -> bool:
        """Move one slow folio to the fast tier; False on NoContiguousBlock"""
        report = self.report
        try:
            base = self.fast.alloc_contiguous(int(folio.order))
        except NoContiguousBlock:
            report.promote_fail += 1
            report.promote_fail_pages += folio.order.frames
            if self.logger:
                self.logger.log_migration("PROMOTE", folio.id, int(folio.order), "FAILED",
                                          f"vaddr={folio.owner_vaddr:#x}")
            return False

        self.slow.free_folio(folio.base_frame, int(folio.order))
        folio.base_frame = base
        folio.tier = TierId.FAST
        self.armed.pop(folio.id, None)
        self._queue_lru(folio)

        size = folio.size_bytes
        self.slow.migration_bytes += size
        self.fast.migration_bytes += size
        self.traffic.add(read_bytes=size)
        report.promote_success += 1
        report.promote_success_pages += folio.order.frames
        report.promoted_bytes += size
        if self.logger:
            self.logger.log_migration("PROMOTE", folio.id, int(folio.order), "SUCCESS",
                                      f"vaddr={folio.owner_vaddr:#x}")
        return True

    def hint_fault(self, folio: Folio, fault_vaddr: int) -> MigrationOutcome:
        """
        Run the migration pipeline for a hint fault on a slow-tier folio

        Order: admission, splitting gate, split order, target selection, promotion.
        A Prevent verdict ends the fault before anything is split or moved.

        Args:
            folio: Faulting folio
            fault_vaddr: Address of the faulting access

        Returns:
            MigrationOutcome
        """
        if folio.tier != TierId.SLOW:
            raise ValueError(f"hint fault on folio {folio.id} outside the slow tier")
        report = self.report
        report.faults += 1
        record: Dict[str, Any] = {
            'tick': self.tick,
            'folio': folio.id,
            'vaddr': fault_vaddr,
            'folio_order': int(folio.order),
        }

        admission = self.hooks.migrate_admission(fault_vaddr)
        if admission.page_class is not None:
            record['page_class'] = admission.page_class.value
            record['traffic_class'] = admission.traffic_class.value
        record['verdict'] = admission.verdict.value

        if admission.verdict == AdmissionVerdict.PREVENT:
            report.admission_prevented += 1
            if admission.page_class == RwClass.WRITE_HEAVY:
                report.admission_prevented_write_heavy += 1
            else:
                report.admission_prevented_read_heavy += 1
            if self.logger:
                self.logger.log_migration("ADMIT", folio.id, int(folio.order), "DEFERRED",
                                          f"page={record.get('page_class')} "
                                          f"traffic={record.get('traffic_class')}")
            self._log_fault(record, None, [], 0, 0, MigrationOutcome.DEFERRED)
            return MigrationOutcome.DEFERRED
        if admission.page_class is not None:
            report.admission_allowed += 1

        decision: Optional[SplitDecision] = None
        if (folio.order == FolioOrder.SIZE_2M and self.hooks.splits
                and (not self.hooks.split_gated or self.contention_active())):
            counts = self.histogram.snapshot().counts
            decision = self.hooks.pick_split_order(counts, subpage_index(fault_vaddr))
            report.count_decision(decision.reason.value)

        if decision is not None and decision.is_split:
            children = self.split_folio(folio, decision.order)
            report.splits_by_order[int(decision.order)] += 1
            report.total_subfolios += len(children)
            report.hot_subfolios += len(decision.hot_windows)
            if self.logger:
                self.logger.log_migration("SPLIT", folio.id, int(decision.order), "SUCCESS",
                                          f"reason={decision.reason.value} "
                                          f"targets={len(decision.targets)}")
            targets = [child for w, child in enumerate(children)
                       if not self.hooks.subpage_is_cold(decision, w)]
        else:
            targets = [folio]

        promoted_bytes = 0
        promoted = 0
        for target in targets:
            if self._promote(target):
                promoted += 1
                promoted_bytes += target.size_bytes

        if promoted == len(targets):
            outcome = MigrationOutcome.PROMOTED
        elif promoted:
            outcome = MigrationOutcome.PARTIAL
        else:
            outcome = MigrationOutcome.FAILED
        self._log_fault(record, decision, targets, promoted, promoted_bytes, outcome)
        return outcome

    def _log_fault(self, record: Dict[str, Any], decision: Optional[SplitDecision],
                   targets: List[Folio], promoted: int, promoted_bytes: int,
                   outcome: MigrationOutcome) -> None:
        if self.event_log is None or not self.event_log.enabled:
            return
        split = decision is not None and decision.is_split
        record.update({
            'outcome': outcome.value,
            'split_events': 1 if split else 0,
            'split_order': int(decision.order) if split else None,
            'reason': decision.reason.value if decision is not None else None,
            'entropy': decision.entropy if decision is not None else None,
            'targets': [t.owner_vaddr for t in targets],
            'promoted': promoted,
            'failed': len(targets) - promoted,
            'bytes_migrated': promoted_bytes,
        })
        self.event_log.write(record)

    def _pop_lru_fast(self) -> Optional[Folio]:
        """Least-recently-touched fast folio, skipping stale heap entries"""
        heap = self._fast_lru
        while heap:
            touched, folio_id = heapq.heappop(heap)
            self._lru_queued.discard(folio_id)
            folio = self.folios.get(folio_id)
            if folio is None or folio.tier != TierId.FAST:
                continue
            if folio.last_touch != touched:
                # Touched since queued: requeue at its current position
                self._queue_lru(folio)
                continue
            return folio
        return None

    def demote_if_pressured(self, watermark: float) -> int:
        """
        Demote least-recently-touched fast folios while fast use exceeds watermark

        Returns:
            Number of folios demoted

        Raises:
            SlowTierFull: the slow tier has no block for a victim
        """
        demoted = 0
        while self.fast.used_fraction > watermark:
            victim = self._pop_lru_fast()
            if victim is None:
                break
            order = int(victim.order)
            try:
                base = self.slow.alloc_contiguous(order)
            except NoContiguousBlock:
                self._queue_lru(victim)
                raise SlowTierFull(f"no slow-tier block of order {order} for folio {victim.id}")

            self.fast.free_folio(victim.base_frame, order)
            victim.base_frame = base
            victim.tier = TierId.SLOW

            size = victim.size_bytes
            self.fast.migration_bytes += size
            self.slow.migration_bytes += size
            self.traffic.add(write_bytes=size)
            self.report.demotions += 1
            self.report.demoted_bytes += size
            demoted += 1
            if self.logger:
                self.logger.log_migration("DEMOTE", victim.id, order, "SUCCESS",
                                          f"last_touch={victim.last_touch}")
        return demoted

    def check_frame_conservation(self) -> bool:
        """used + free == frame_count and the folio table agrees with both tiers"""
        for tier_id, tier in ((TierId.FAST, self.fast), (TierId.SLOW, self.slow)):
            free = sum(len(blocks) << order for order, blocks in enumerate(tier.free_lists))
            if free + tier.used_frames != tier.frame_count:
                return False
            mapped = sum(f.order.frames for f in self.folios.values() if f.tier == tier_id)
            if mapped > tier.used_frames:
                return False
        return True


def access(ms: MemoryState, ev: AccessEvent) -> float:
    return ms.access(ev)


def hint_fault(ms: MemoryState, folio: Folio, fault_vaddr: int) -> MigrationOutcome:
    return ms.hint_fault(folio, fault_vaddr)


def demote_if_pressured(ms: MemoryState, watermark: float) -> int:
    return ms.demote_if_pressured(watermark)


def region_for(events: Iterable[AccessEvent]) -> int:
    """Smallest 2 MB-aligned region covering every address of a trace"""
    top = -1
    for ev in events:
        if ev.vaddr > top:
            top = ev.vaddr
    if top < 0:
        return 0
    return ((top >> THP_SHIFT) + 1) << THP_SHIFT


def run_scenario(sim_cfg: SimConfig, policy_cfg: PolicyConfig,
                 events: List[AccessEvent], policy: PolicyKind,
                 name: str = "scenario",
                 region_bytes: Optional[int] = None,
                 event_log: Optional[EventLog] = None,
                 logger=None) -> RunReport:
    """
    Drive one scenario through the event loop

    Args:
        sim_cfg: Simulator configuration, including contention and fragmentation
        policy_cfg: Policy tunables; rng_seed seeds every random choice
        events: Access trace
        policy: Migration policy
        name: Scenario name for the report
        region_bytes: Mapped region; defaults to the trace's covering region
        event_log: Per-fault event sink
        logger: Logger instance

    Returns:
        RunReport
    """
    ms = MemoryState(sim_cfg, policy_cfg, policy, event_log=event_log, logger=logger)
    ms.report.scenario = name

    if sim_cfg.fragmentation == 'checkerboard':
        ms.fast.fragment_checkerboard(sim_cfg.fragment_fraction)

    if region_bytes is None:
        region_bytes = region_for(events)
    if region_bytes:
        ms.map_region(region_bytes)

    if logger:
        logger.log_run_status("STARTED", f"{name} policy={policy.value} "
                                         f"contention={sim_cfg.contention_pct:g}% "
                                         f"events={len(events)}")

    epoch_events = sim_cfg.epoch_events
    scan_interval = sim_cfg.scan_interval
    if events:
        ms.begin_epoch()
    for index, ev in enumerate(events, start=1):
        ms.access(ev)
        if index % scan_interval == 0:
            ms.scan()
        if index % epoch_events == 0:
            ms.end_epoch()
            if index < len(events):
                ms.begin_epoch()

    if logger:
        report = ms.report
        logger.log_run_status("FINISHED", f"{name} policy={policy.value} "
                                          f"promoted={report.promote_success} "
                                          f"failed={report.promote_fail} "
                                          f"demoted={report.demotions} "
                                          f"throughput_proxy={report.throughput_proxy:.6f}")
    return ms.report
