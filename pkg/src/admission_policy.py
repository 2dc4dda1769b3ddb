"""
Admission Policy
Duplex-aware migration admission: classify windowed slow-tier traffic and the
faulting page, then apply the read/write admission matrix
"""

from collections import deque
from typing import Deque, Dict, Tuple

from core_model import AdmissionVerdict, DuplexMode, RwClass, TrafficClass
from rwsketch import DualBcbf


DEFAULT_WINDOW_BUCKETS = 8


class TrafficWindow:
    """Sliding window of per-epoch (read_bytes, write_bytes) buckets"""

    def __init__(self, buckets: int = DEFAULT_WINDOW_BUCKETS):
        if buckets < 1:
            raise ValueError(f"traffic window needs at least one bucket, got {buckets}")
        self.capacity = buckets
        self.history: Deque[Tuple[int, int]] = deque(maxlen=buckets - 1)
        self.current_read = 0
        self.current_write = 0

    def add(self, read_bytes: int = 0, write_bytes: int = 0) -> None:
        """Account traffic to the current bucket"""
        if read_bytes < 0 or write_bytes < 0:
            raise ValueError("traffic byte counts must be non-negative")
        self.current_read += read_bytes
        self.current_write += write_bytes

    def rotate(self) -> None:
        """Close the current bucket; the oldest falls out once the window is full"""
        self.history.append((self.current_read, self.current_write))
        self.current_read = 0
        self.current_write = 0

    def totals(self) -> Tuple[int, int]:
        reads = self.current_read + sum(r for r, _ in self.history)
        writes = self.current_write + sum(w for _, w in self.history)
        return reads, writes

    def __len__(self) -> int:
        return len(self.history) + 1


def classify_traffic(window: TrafficWindow, theta: float) -> TrafficClass:
    """
    Classify windowed slow-tier traffic by read share

    Args:
        window: Sliding traffic window
        theta: Dominance threshold; write dominance is symmetric at 1 - theta

    Returns:
        TrafficClass; an empty window is Balanced
    """
    reads, writes = window.totals()
    if reads + writes == 0:
        return TrafficClass.BALANCED

    read_share = reads / (reads + writes)
    if read_share >= theta:
        return TrafficClass.READ_DOMINANT
    if read_share <= 1.0 - theta:
        return TrafficClass.WRITE_DOMINANT
    return TrafficClass.BALANCED


def classify_page(sketch: DualBcbf, page: int, cut: float = 0.5) -> RwClass:
    """WriteHeavy when the page's write ratio reaches cut, otherwise ReadHeavy"""
    if sketch.write_ratio(page) >= cut:
        return RwClass.WRITE_HEAVY
    return RwClass.READ_HEAVY


# Pages migrate when their type matches the dominant traffic direction
ADMISSION_MATRIX: Dict[Tuple[RwClass, TrafficClass], AdmissionVerdict] = {
    (RwClass.READ_HEAVY, TrafficClass.READ_DOMINANT): AdmissionVerdict.ALLOW,
    (RwClass.READ_HEAVY, TrafficClass.BALANCED): AdmissionVerdict.ALLOW,
    (RwClass.READ_HEAVY, TrafficClass.WRITE_DOMINANT): AdmissionVerdict.PREVENT,
    (RwClass.WRITE_HEAVY, TrafficClass.READ_DOMINANT): AdmissionVerdict.PREVENT,
    (RwClass.WRITE_HEAVY, TrafficClass.BALANCED): AdmissionVerdict.ALLOW,
    (RwClass.WRITE_HEAVY, TrafficClass.WRITE_DOMINANT): AdmissionVerdict.ALLOW,
}


def admit(page_class: RwClass, traffic: TrafficClass, duplex: DuplexMode) -> AdmissionVerdict:
    """
    Admission verdict for one fault

    Half-duplex links gain nothing from rebalancing, so everything is allowed.
    """
    if duplex == DuplexMode.HALF_DUPLEX:
        return AdmissionVerdict.ALLOW
    return ADMISSION_MATRIX[(page_class, traffic)]
