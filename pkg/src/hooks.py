"""
Hooks
Migration-pipeline hook points and the per-policy bindings that fill them.
An empty slot keeps the default behavior: no split, every subfolio hot,
every migration allowed.
"""

from dataclasses import dataclass
from typing import Callable, Dict, NamedTuple, Optional

import numpy as np

from admission_policy import TrafficWindow, admit, classify_page, classify_traffic
from core_model import (
    AdmissionVerdict,
    DuplexMode,
    PolicyConfig,
    PolicyKind,
    RwClass,
    TrafficClass,
)
from rwsketch import DualBcbf
from split_policy import SplitDecision, decide_base_page_split, decide_split


class AdmissionResult(NamedTuple):
    """Verdict plus the classes it was derived from (None under the default hook)"""
    verdict: AdmissionVerdict
    page_class: Optional[RwClass] = None
    traffic_class: Optional[TrafficClass] = None


ALLOW_ALL = AdmissionResult(AdmissionVerdict.ALLOW)

SplitHook = Callable[[np.ndarray, int], SplitDecision]
ColdHook = Callable[[SplitDecision, int], bool]
AdmissionHook = Callable[[int], AdmissionResult]


@dataclass
class HookRegistry:
    """
    The three hook points of the migration pipeline, in call order:
    migrate_admission, pick_split_order, subpage_is_cold.

    split_gated says whether the split hook only runs while the slow tier
    is contended.
    """
    migrate_admission_hook: Optional[AdmissionHook] = None
    pick_split_order_hook: Optional[SplitHook] = None
    subpage_is_cold_hook: Optional[ColdHook] = None
    split_gated: bool = True

    @property
    def splits(self) -> bool:
        return self.pick_split_order_hook is not None

    def migrate_admission(self, fault_vaddr: int) -> AdmissionResult:
        if self.migrate_admission_hook is None:
            return ALLOW_ALL
        return self.migrate_admission_hook(fault_vaddr)

    def pick_split_order(self, counts: np.ndarray, fault_subpage: int) -> Optional[SplitDecision]:
        """SplitDecision from the bound hook, or None for the default (migrate whole)"""
        if self.pick_split_order_hook is None:
            return None
        return self.pick_split_order_hook(counts, fault_subpage)

    def subpage_is_cold(self, decision: SplitDecision, window: int) -> bool:
        if self.subpage_is_cold_hook is None:
            return False
        return self.subpage_is_cold_hook(decision, window)

    def describe(self) -> Dict[str, str]:
        """Bound/default state of each hook point"""
        def state(hook) -> str:
            return getattr(hook, '__name__', 'bound') if hook is not None else 'default'
        return {
            'migrate_admission': state(self.migrate_admission_hook),
            'pick_split_order': state(self.pick_split_order_hook),
            'subpage_is_cold': state(self.subpage_is_cold_hook),
            'split_gated': str(self.split_gated),
        }


def _target_is_cold(decision: SplitDecision, window: int) -> bool:
    return window not in decision.targets


def bind_policy(kind: PolicyKind, cfg: PolicyConfig,
                sketch: Optional[DualBcbf] = None,
                traffic: Optional[TrafficWindow] = None) -> HookRegistry:
    """
    Build the hook registry for a migration policy

    Args:
        kind: Policy to bind
        cfg: Policy configuration the hooks close over
        sketch: Read/write sketch, required for full-duplex TierBpfPlusAdmission
        traffic: Slow-tier traffic window, required for full-duplex TierBpfPlusAdmission

    Returns:
        HookRegistry; NoSplit leaves every slot at its default
    """
    if kind == PolicyKind.NO_SPLIT:
        return HookRegistry()

    if kind == PolicyKind.FULL_4K_SPLIT:
        def pick_base_pages(counts: np.ndarray, fault_subpage: int) -> SplitDecision:
            return decide_base_page_split(counts, cfg, fault_subpage)
        return HookRegistry(
            pick_split_order_hook=pick_base_pages,
            subpage_is_cold_hook=_target_is_cold,
            split_gated=False,
        )

    def pick_density_order(counts: np.ndarray, fault_subpage: int) -> SplitDecision:
        return decide_split(counts, cfg, fault_subpage)

    registry = HookRegistry(
        pick_split_order_hook=pick_density_order,
        subpage_is_cold_hook=_target_is_cold,
    )
    if kind == PolicyKind.TIER_BPF or cfg.duplex_mode == DuplexMode.HALF_DUPLEX:
        # Half-duplex admission always allows, so the default slot stands in
        return registry

    if sketch is None or traffic is None:
        raise ValueError("admission binding needs a read/write sketch and a traffic window")

    def duplex_admission(fault_vaddr: int) -> AdmissionResult:
        page_class = classify_page(sketch, fault_vaddr, cfg.write_heavy_cut)
        traffic_class = classify_traffic(traffic, cfg.traffic_theta)
        return AdmissionResult(admit(page_class, traffic_class, cfg.duplex_mode),
                               page_class, traffic_class)

    registry.migrate_admission_hook = duplex_admission
    return registry


def needs_sketch(kind: PolicyKind, cfg: PolicyConfig) -> bool:
    """The read/write sketch exists only for admission on full-duplex links"""
    return kind == PolicyKind.TIER_BPF_ADMISSION and cfg.duplex_mode == DuplexMode.FULL_DUPLEX
