"""
Error Types
Exception hierarchy shared by the simulator, policies and command line
"""


class TierSimError(Exception):
    """Base class for every error raised by the simulator"""


class ConfigError(TierSimError, ValueError):
    """Scenario configuration is missing, malformed or refers to missing files"""


# Split policy

class AllZeroHistogram(TierSimError, ValueError):
    """Histogram has no samples, so no distribution can be derived"""


class MisalignedWindow(TierSimError, ValueError):
    """Subfolio window offset is not a multiple of its length or overruns 512 slots"""


# Frame allocation

class AllocatorError(TierSimError):
    """Buddy allocator failure"""


class NoContiguousBlock(AllocatorError):
    """No free block of the requested order exists in the tier"""

    def __init__(self, tier_name: str, order: int):
        super().__init__(f"{tier_name}: no contiguous free block of order {order}")
        self.tier_name = tier_name
        self.order = order


class DoubleFree(AllocatorError):
    """Block being freed is not currently allocated"""


# Simulation

class SimulationError(TierSimError):
    """Event loop failure"""


class UnmappedAddress(SimulationError):
    """Access to a virtual address outside the mapped workload region"""


class SlowTierFull(SimulationError):
    """Demotion could not find room in the slow tier"""


# Traces

class TraceError(TierSimError):
    """Trace generation or trace file failure"""


class InvalidSpec(TraceError, ValueError):
    """Trace specification fails validation"""


class TruncatedFile(TraceError):
    """Trace file ends in the middle of a record"""


class BadMagic(TraceError):
    """Trace file does not start with the expected magic bytes"""
