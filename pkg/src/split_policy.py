"""
Split Policy
Contention-gated mTHP splitting: flat-distribution detection, coverage-based
hot threshold, hot/cold map, heat-density order selection and migration
target selection, all computed from a histogram snapshot
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import accumulate
from typing import Dict, FrozenSet, Optional, Sequence, Tuple, Union

import numpy as np

from core_model import (
    CANDIDATE_SPLIT_ORDERS,
    FolioOrder,
    PolicyConfig,
    SplitReason,
    SUBPAGES_PER_THP,
)
from errors import AllZeroHistogram, MisalignedWindow


Number = Union[float, Fraction]

_LOG2_SLOTS = math.log2(SUBPAGES_PER_THP)


def _exact(value: Number) -> Fraction:
    """Exact rational form of a configured fraction (0.8 -> 4/5)"""
    if isinstance(value, Fraction):
        return value
    return Fraction(str(value))


def _as_counts(counts: Union[np.ndarray, Sequence[int]]) -> np.ndarray:
    values = np.asarray(counts, dtype=np.uint64)
    if values.shape != (SUBPAGES_PER_THP,):
        raise ValueError(f"expected {SUBPAGES_PER_THP} counters, got shape {values.shape}")
    return values


@dataclass(frozen=True)
class HotMap:
    """Binary hot/cold classification of the 512 subpages"""
    bits: np.ndarray
    threshold_used: int
    kstar: int

    @property
    def hot_count(self) -> int:
        return int(self.bits.sum())

    def window_hot_counts(self, length: int) -> np.ndarray:
        """Number of hot subpages in each aligned window of the given length"""
        return self.bits.reshape(-1, length).sum(axis=1, dtype=np.int64)


@dataclass(frozen=True)
class SplitDecision:
    """Chosen folio order plus the subfolio windows to migrate"""
    order: FolioOrder
    targets: FrozenSet[int]
    entropy: float
    reason: SplitReason
    threshold: Optional[int] = None
    kstar: Optional[int] = None
    hot_windows: FrozenSet[int] = field(default_factory=frozenset)

    @property
    def is_split(self) -> bool:
        return self.order != FolioOrder.SIZE_2M

    @property
    def window_count(self) -> int:
        return SUBPAGES_PER_THP >> self.order.value

    def to_dict(self) -> Dict[str, object]:
        return {
            'order': int(self.order),
            'size_bytes': self.order.size_bytes,
            'targets': sorted(self.targets),
            'hot_windows': sorted(self.hot_windows),
            'entropy': self.entropy,
            'threshold': self.threshold,
            'kstar': self.kstar,
            'reason': self.reason.value,
        }


def normalized_entropy(counts: Union[np.ndarray, Sequence[int]]) -> float:
    """
    Normalized Shannon entropy of the subpage distribution

    Args:
        counts: 512 counters

    Returns:
        Entropy divided by log2(512); 0 for one slot, 1 for uniform

    Raises:
        AllZeroHistogram: every counter is zero
    """
    values = _as_counts(counts)
    total = sum(values.tolist())
    if total == 0:
        raise AllZeroHistogram("normalized entropy is undefined for an empty histogram")

    nonzero = values[values > 0].astype(np.float64)
    p = nonzero / float(total)
    entropy = float(-(p * np.log2(p)).sum()) / _LOG2_SLOTS
    # Rounding can push a one-hot histogram to -0.0 or a uniform one past 1
    return min(max(entropy, 0.0), 1.0)


def hot_threshold(counts: Union[np.ndarray, Sequence[int]], P: Number) -> Tuple[int, int]:
    """
    Coverage-based hot threshold

    Sorts counts descending and finds the smallest K* whose top-(K*+1) prefix
    reaches P of the total, compared in exact integer arithmetic.

    Args:
        counts: 512 counters
        P: Coverage ratio in (0, 1]

    Returns:
        (T, K*) with T the count at rank K*

    Raises:
        AllZeroHistogram: every counter is zero
    """
    ordered = sorted(_as_counts(counts).tolist(), reverse=True)
    total = sum(ordered)
    if total == 0:
        raise AllZeroHistogram("hot threshold is undefined for an empty histogram")

    coverage = _exact(P)
    target = coverage.numerator * total
    for kstar, prefix in enumerate(accumulate(ordered)):
        if prefix * coverage.denominator >= target:
            return ordered[kstar], kstar

    # P <= 1 means the full prefix always qualifies
    return ordered[-1], len(ordered) - 1


def classify_hot(counts: Union[np.ndarray, Sequence[int]], T: int, kstar: int = -1) -> HotMap:
    """
    Mark each subpage hot when its count reaches the threshold

    Args:
        counts: 512 counters
        T: Hot threshold (>= 1)
        kstar: Rank the threshold came from, kept for reporting

    Returns:
        HotMap
    """
    if T < 1:
        raise ValueError(f"hot threshold must be at least 1, got {T}")
    values = _as_counts(counts)
    bits = values >= np.uint64(T)
    return HotMap(bits=bits, threshold_used=int(T), kstar=int(kstar))


def heat_density(hot_map: HotMap, offset: int, L: int) -> float:
    """
    Fraction of hot subpages in the aligned window [offset, offset + L)

    Raises:
        MisalignedWindow: offset is not a multiple of L or the window overruns
    """
    if L <= 0 or offset < 0 or offset % L != 0 or offset + L > SUBPAGES_PER_THP:
        raise MisalignedWindow(f"window [{offset}, {offset + L}) is not an aligned subfolio")
    return int(hot_map.bits[offset:offset + L].sum()) / L


def _dense_windows(hot_map: HotMap, order: FolioOrder, tau: Number) -> np.ndarray:
    """Indices of windows at this order whose heat density reaches tau"""
    length = order.frames
    hot = hot_map.window_hot_counts(length)
    threshold = _exact(tau)
    # hot / L >= tau  <=>  hot * den >= num * L
    return np.flatnonzero(hot * threshold.denominator >= threshold.numerator * length)


def pick_split_order(hot_map: HotMap, tau: Number) -> FolioOrder:
    """
    Largest candidate order with at least one aligned window of density >= tau

    Falls back to 64 KB when no candidate qualifies.
    """
    for order in CANDIDATE_SPLIT_ORDERS:
        if _dense_windows(hot_map, order, tau).size > 0:
            return order
    return FolioOrder.SIZE_64K


def select_targets(hot_map: HotMap, order: FolioOrder, fault_subpage: int,
                   tau: Number) -> FrozenSet[int]:
    """
    Subfolio windows to migrate after splitting

    Args:
        hot_map: Hot/cold map of the subpages
        order: Split order (64 KB .. 1 MB, or 4 KB for the base-page baseline)
        fault_subpage: Subpage that took the hint fault
        tau: Heat-density threshold

    Returns:
        Window indices that are tau-dense, plus the window holding the fault
    """
    if not 0 <= fault_subpage < SUBPAGES_PER_THP:
        raise ValueError(f"fault subpage {fault_subpage} outside [0, {SUBPAGES_PER_THP})")
    dense = _dense_windows(hot_map, order, tau)
    targets = set(int(w) for w in dense)
    targets.add(fault_subpage >> order.value)
    return frozenset(targets)


def _flat(entropy: float, threshold=None, kstar=None) -> SplitDecision:
    return SplitDecision(
        order=FolioOrder.SIZE_2M,
        targets=frozenset(),
        entropy=entropy,
        reason=SplitReason.FLAT_DISTRIBUTION,
        threshold=threshold,
        kstar=kstar,
    )


def decide_split(counts: Union[np.ndarray, Sequence[int]], cfg: PolicyConfig,
                 fault_subpage: int) -> SplitDecision:
    """
    Full splitting pipeline for one faulting THP

    Args:
        counts: Histogram snapshot counters
        cfg: Policy configuration (coverage_P, tau_h, entropy_gate)
        fault_subpage: Subpage that took the hint fault

    Returns:
        SplitDecision; order 9 means the THP migrates whole
    """
    values = _as_counts(counts)
    if sum(values.tolist()) == 0:
        return _flat(entropy=1.0)

    entropy = normalized_entropy(values)
    if entropy >= cfg.entropy_gate:
        return _flat(entropy=entropy)

    threshold, kstar = hot_threshold(values, cfg.coverage_P)
    hot_map = classify_hot(values, threshold, kstar)
    order = pick_split_order(hot_map, cfg.tau_h)
    hot_windows = frozenset(int(w) for w in _dense_windows(hot_map, order, cfg.tau_h))

    if order == FolioOrder.SIZE_2M:
        return SplitDecision(
            order=order,
            targets=frozenset(),
            entropy=entropy,
            reason=SplitReason.DENSITY_PICK,
            threshold=threshold,
            kstar=kstar,
            hot_windows=hot_windows,
        )

    if hot_windows:
        reason = SplitReason.DENSITY_PICK
        effective_tau = cfg.tau_h
    else:
        # Nothing reaches tau: migrate the densest 64 KB windows instead
        reason = SplitReason.FALLBACK_SMALLEST
        best = int(hot_map.window_hot_counts(order.frames).max())
        effective_tau = Fraction(max(best, 1), order.frames)
        hot_windows = frozenset(int(w) for w in _dense_windows(hot_map, order, effective_tau))

    targets = select_targets(hot_map, order, fault_subpage, effective_tau)
    return SplitDecision(
        order=order,
        targets=targets,
        entropy=entropy,
        reason=reason,
        threshold=threshold,
        kstar=kstar,
        hot_windows=hot_windows,
    )


def decide_base_page_split(counts: Union[np.ndarray, Sequence[int]], cfg: PolicyConfig,
                           fault_subpage: int) -> SplitDecision:
    """
    Base-page baseline: split to 4 KB and migrate histogram-hot pages plus the fault page

    Args:
        counts: Histogram snapshot counters
        cfg: Policy configuration (coverage_P)
        fault_subpage: Subpage that took the hint fault

    Returns:
        SplitDecision at order 0
    """
    values = _as_counts(counts)
    order = FolioOrder.SIZE_4K
    if sum(values.tolist()) == 0:
        return SplitDecision(
            order=order,
            targets=frozenset({fault_subpage}),
            entropy=1.0,
            reason=SplitReason.FALLBACK_SMALLEST,
        )

    threshold, kstar = hot_threshold(values, cfg.coverage_P)
    hot_map = classify_hot(values, threshold, kstar)
    hot_pages = frozenset(int(i) for i in np.flatnonzero(hot_map.bits))
    return SplitDecision(
        order=order,
        targets=hot_pages | {fault_subpage},
        entropy=normalized_entropy(values),
        reason=SplitReason.DENSITY_PICK,
        threshold=threshold,
        kstar=kstar,
        hot_windows=hot_pages,
    )
