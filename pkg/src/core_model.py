"""
Core Model
Domain vocabulary shared by every module: addresses, folio orders, tiers,
access events and the policy configuration
"""

from dataclasses import dataclass, fields, asdict
from enum import Enum, IntEnum
from typing import Any, Dict, NamedTuple, Tuple

from errors import ConfigError


PAGE_SHIFT = 12
PAGE_SIZE = 1 << PAGE_SHIFT            # 4 KB base page
THP_SHIFT = 21
THP_SIZE = 1 << THP_SHIFT              # 2 MB huge page
SUBPAGES_PER_THP = THP_SIZE // PAGE_SIZE  # 512
MAX_ORDER = 9
ADDRESS_MASK = (1 << 64) - 1


class FolioOrder(IntEnum):
    """Folio order: a folio spans 2^order contiguous 4 KB frames"""
    SIZE_4K = 0
    SIZE_64K = 4
    SIZE_128K = 5
    SIZE_256K = 6
    SIZE_512K = 7
    SIZE_1M = 8
    SIZE_2M = 9

    @property
    def size_bytes(self) -> int:
        return PAGE_SIZE << self.value

    @property
    def frames(self) -> int:
        return 1 << self.value

    @property
    def label(self) -> str:
        size_kb = self.size_bytes // 1024
        return f"{size_kb // 1024}m" if size_kb >= 1024 else f"{size_kb}k"


# Stage-3 candidates, largest first. Order 0 is only reachable by the 4 KB baseline.
CANDIDATE_SPLIT_ORDERS: Tuple[FolioOrder, ...] = (
    FolioOrder.SIZE_2M,
    FolioOrder.SIZE_1M,
    FolioOrder.SIZE_512K,
    FolioOrder.SIZE_256K,
    FolioOrder.SIZE_128K,
    FolioOrder.SIZE_64K,
)

# Orders that count as split results in reports (64 KB .. 1 MB)
REPORTED_SPLIT_ORDERS: Tuple[FolioOrder, ...] = (
    FolioOrder.SIZE_64K,
    FolioOrder.SIZE_128K,
    FolioOrder.SIZE_256K,
    FolioOrder.SIZE_512K,
    FolioOrder.SIZE_1M,
)


class TierId(Enum):
    FAST = "Fast"
    SLOW = "Slow"


class RwClass(Enum):
    READ_HEAVY = "ReadHeavy"
    WRITE_HEAVY = "WriteHeavy"


class TrafficClass(Enum):
    READ_DOMINANT = "ReadDominant"
    BALANCED = "Balanced"
    WRITE_DOMINANT = "WriteDominant"


class DuplexMode(Enum):
    FULL_DUPLEX = "FullDuplex"
    HALF_DUPLEX = "HalfDuplex"


class AdmissionVerdict(Enum):
    ALLOW = "Allow"
    PREVENT = "Prevent"


class SplitReason(Enum):
    FLAT_DISTRIBUTION = "FlatDistribution"
    DENSITY_PICK = "DensityPick"
    FALLBACK_SMALLEST = "FallbackSmallest"


class PolicyKind(Enum):
    NO_SPLIT = "NoSplit"
    FULL_4K_SPLIT = "Full4KSplit"
    TIER_BPF = "TierBpf"
    TIER_BPF_ADMISSION = "TierBpfPlusAdmission"


class BaseSystem(Enum):
    AUTONUMA = "AutoNuma"
    TPP = "Tpp"


class AccessEvent(NamedTuple):
    """One memory access of a trace"""
    tick: int
    vaddr: int
    is_write: bool


@dataclass
class Folio:
    """
    A (m)THP mapped into one tier

    base_frame is aligned to 2^order frames and the folio covers exactly
    2^order frames starting there.
    """
    id: int
    base_frame: int
    order: FolioOrder
    tier: TierId
    owner_vaddr: int
    last_touch: int = 0

    @property
    def size_bytes(self) -> int:
        return self.order.size_bytes

    @property
    def end_vaddr(self) -> int:
        return self.owner_vaddr + self.order.size_bytes


def subpage_index(vaddr: int) -> int:
    """
    Map an address to its 4 KB subpage offset inside the enclosing 2 MB region

    Args:
        vaddr: Byte address

    Returns:
        Slot in [0, 512)
    """
    return (vaddr & (THP_SIZE - 1)) >> PAGE_SHIFT


def page_number(vaddr: int) -> int:
    """4 KB virtual page number of an address"""
    return vaddr >> PAGE_SHIFT


@dataclass(frozen=True)
class PolicyConfig:
    """Tunables for profiling, splitting and admission"""
    coverage_P: float = 0.80
    tau_h: float = 0.75
    entropy_gate: float = 0.95
    sample_prob: float = 0.01
    contention_gate: float = 0.50
    traffic_theta: float = 0.70
    write_heavy_cut: float = 0.5
    duplex_mode: DuplexMode = DuplexMode.FULL_DUPLEX
    tlb_entries: int = 1536
    rng_seed: int = 0

    def __post_init__(self):
        for name in ('coverage_P', 'tau_h', 'entropy_gate', 'sample_prob',
                     'contention_gate', 'traffic_theta', 'write_heavy_cut'):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not 0.0 < value <= 1.0:
                raise ConfigError(f"'{name}' must be a fraction in (0, 1], got {value!r}")
        if not isinstance(self.duplex_mode, DuplexMode):
            raise ConfigError(f"'duplex_mode' must be a DuplexMode, got {self.duplex_mode!r}")
        if not isinstance(self.tlb_entries, int) or self.tlb_entries < 1:
            raise ConfigError(f"'tlb_entries' must be a positive integer, got {self.tlb_entries!r}")
        if not isinstance(self.rng_seed, int) or not 0 <= self.rng_seed <= ADDRESS_MASK:
            raise ConfigError(f"'rng_seed' must be a 64-bit unsigned integer, got {self.rng_seed!r}")

    @classmethod
    def field_names(cls) -> Tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PolicyConfig':
        """
        Build a PolicyConfig from the flat config mapping

        Args:
            data: Mapping that may contain any PolicyConfig key; others are ignored

        Returns:
            PolicyConfig with defaults for missing keys
        """
        values = {name: data[name] for name in cls.field_names() if name in data}
        if 'duplex_mode' in values and not isinstance(values['duplex_mode'], DuplexMode):
            try:
                values['duplex_mode'] = DuplexMode(values['duplex_mode'])
            except ValueError:
                raise ConfigError(
                    f"'duplex_mode' must be one of "
                    f"{[m.value for m in DuplexMode]}, got {values['duplex_mode']!r}"
                )
        return cls(**values)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['duplex_mode'] = self.duplex_mode.value
        return data
