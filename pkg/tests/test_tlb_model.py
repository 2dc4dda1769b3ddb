"""Tests for the folio-granular TLB proxy"""

import pytest

from tlb_model import TlbModel


def test_second_touch_hits():
    tlb = TlbModel(1)
    assert tlb.touch(5) is False
    assert tlb.touch(5) is True
    assert (tlb.hits, tlb.misses) == (1, 1)


def test_lru_eviction():
    tlb = TlbModel(2)
    tlb.touch(1)
    tlb.touch(2)
    tlb.touch(1)
    tlb.touch(3)
    assert 1 in tlb
    assert 2 not in tlb
    assert len(tlb) == 2


def test_capacity_bound():
    tlb = TlbModel(16)
    for folio_id in range(1000):
        tlb.touch(folio_id)
        assert len(tlb) <= 16


def test_invalidate():
    tlb = TlbModel(4)
    tlb.touch(9)
    tlb.invalidate(9)
    tlb.invalidate(42)
    assert tlb.touch(9) is False


def test_misses_per_1k():
    tlb = TlbModel(1)
    for folio_id in (1, 2, 1, 2):
        tlb.touch(folio_id)
    assert tlb.misses_per_1k(8) == 500.0
    assert tlb.misses_per_1k(0) == 0.0


def test_rejects_zero_capacity():
    with pytest.raises(ValueError):
        TlbModel(0)
