"""Shared fixtures; puts src/ and the repository root on sys.path"""

import os
import sys

import numpy as np
import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, os.path.join(ROOT, 'src'))
sys.path.insert(0, ROOT)

from core_model import PolicyConfig, SUBPAGES_PER_THP  # noqa: E402
from memory_simulator import SimConfig  # noqa: E402


def counts_with(hot_slots, value=10):
    counts = np.zeros(SUBPAGES_PER_THP, dtype=np.uint64)
    counts[list(hot_slots)] = value
    return counts


@pytest.fixture
def one_hot_counts():
    return counts_with([0], value=5)


@pytest.fixture
def uniform_counts():
    return np.full(SUBPAGES_PER_THP, 7, dtype=np.uint64)


@pytest.fixture
def hot128_counts():
    """128 slots of 10 at the start of the THP, rest zero"""
    return counts_with(range(128))


@pytest.fixture
def policy_cfg():
    return PolicyConfig()


@pytest.fixture
def small_sim_cfg():
    """8 MB fast tier, 32 MB slow tier, short epochs"""
    return SimConfig(
        fast_frames=2048,
        slow_frames=8192,
        epoch_events=1024,
        scan_interval=256,
        scan_batch=16,
        hot_fault_latency=512,
    )
