import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wsnfusion.energy import (
    EnergyBreakdown,
    RadioParams,
    ch_round_energy,
    ch_to_bs_energy,
    cluster_transmission_energy,
    idle_energy,
    member_round_energy,
    mst_edge_tx_energy,
    proc_energy,
    round_energy,
    rx_energy,
    tx_energy,
)
from wsnfusion.errors import ConfigError, DomainError

P = RadioParams()
# d0 pinned beyond 100 m so the 100 m examples stay on the free-space branch
FREE_SPACE = RadioParams(d0=150.0)


def test_default_crossover_distance():
    assert P.d0 == pytest.approx(math.sqrt(10e-12 / 1.3e-15))
    assert P.d0 == pytest.approx(87.7, abs=0.05)
    assert P.crossover_consistent
    assert not FREE_SPACE.crossover_consistent


def test_tx_energy_examples():
    assert tx_energy(1000, 0.0, P) == pytest.approx(5.0e-5, rel=1e-12)
    assert tx_energy(1000, 100.0, FREE_SPACE) == pytest.approx(1.5e-4, rel=1e-12)
    assert tx_energy(0, 123.0, P) == 0.0


def test_tx_energy_multipath_branch():
    # hand evaluation of the d^4 branch at 100 m with default constants
    assert tx_energy(1000, 100.0, P) == pytest.approx(5e-5 + 1000 * 1.3e-15 * 100.0**4, rel=1e-12)


@pytest.mark.parametrize("bits, d", [(-1, 10.0), (10, -0.5), (10, float("nan"))])
def test_tx_energy_domain_errors(bits, d):
    with pytest.raises(DomainError):
        tx_energy(bits, d, P)


def test_rx_energy_examples():
    assert rx_energy(1000, P) == pytest.approx(5.0e-5)
    assert rx_energy(0, P) == 0.0
    assert rx_energy(2000, P) == pytest.approx(1.0e-4)
    with pytest.raises(DomainError):
        rx_energy(-5, P)


def test_proc_energy_examples():
    assert proc_energy(0, P) == 0.0
    assert proc_energy(1000, P) == pytest.approx(5.0e-6)
    assert proc_energy(2000, P) == 2 * proc_energy(1000, P)
    with pytest.raises(DomainError):
        proc_energy(-1, P)


def test_idle_energy_examples():
    assert idle_energy(RadioParams(p_idle=0.0)) == 0.0
    assert idle_energy(RadioParams(p_idle=1e-6, t_idle=1.0)) == pytest.approx(1e-6)
    with pytest.raises(ConfigError):
        RadioParams(t_idle=0.0)


def test_member_round_energy():
    b = member_round_energy(0.0, 0, P)
    assert (b.tx, b.rx) == (pytest.approx(5e-5), 0.0)
    assert member_round_energy(100.0, 0, FREE_SPACE).total == pytest.approx(1.5e-4)
    with_ctrl = member_round_energy(0.0, 100, P)
    assert with_ctrl.rx == pytest.approx(5e-6)


def test_ch_round_energy():
    lone = ch_round_energy(0, 0, 0.0, P)
    assert lone.rx == 0.0 and lone.tx == pytest.approx(5e-5)
    assert ch_round_energy(3, 0, 0.0, P).rx == pytest.approx(1.5e-4)
    one = ch_round_energy(1, 1000, 0.0, P).proc
    assert ch_round_energy(4, 4000, 0.0, P).proc == pytest.approx(4 * one)
    with pytest.raises(DomainError):
        ch_round_energy(-1, 0, 0.0, P)


def test_breakdown_total_is_exact_sum():
    b = EnergyBreakdown(1.1e-5, 2.2e-5, 3.3e-6, 4.4e-7)
    assert b.total == b.tx + b.rx + b.proc + b.idle
    with pytest.raises(DomainError):
        EnergyBreakdown(tx=-1.0)


def test_mst_edge_forms():
    for form in ("eq1", "eq24"):
        assert mst_edge_tx_energy(1000, 0.0, P, form) == pytest.approx(5e-5)
    assert mst_edge_tx_energy(1000, P.d0, P, "eq24") == pytest.approx(5.001e-5, rel=1e-12)
    with pytest.raises(ConfigError):
        mst_edge_tx_energy(1000, 1.0, P, "eq99")


def test_mst_edge_forms_agree_at_d0_only_when_d0_is_one():
    unit = RadioParams(d0=1.0)
    assert mst_edge_tx_energy(1000, 1.0, unit, "eq1") == mst_edge_tx_energy(1000, 1.0, unit, "eq24")
    assert mst_edge_tx_energy(1000, P.d0, P, "eq1") != pytest.approx(
        mst_edge_tx_energy(1000, P.d0, P, "eq24"), rel=1e-6
    )


def test_cluster_transmission_energy():
    assert cluster_transmission_energy([], {}, P) == 0.0
    single = cluster_transmission_energy([(1, 0, 0.0)], {0: 1}, P)
    assert single == pytest.approx(1.0e-4)
    k = 7
    assert cluster_transmission_energy([(1, 0, 0.0)] * k, {0: k}, P) == pytest.approx(k * single)


def test_ch_to_bs_energy():
    assert ch_to_bs_energy((250, 500), (250, 500), P, include_bs_rx=False) == pytest.approx(5e-5)
    expected_tx = 5e-5 + 1000 * 1.3e-15 * 100.0**4
    assert ch_to_bs_energy((250, 400), (250, 500), P, include_bs_rx=False) == pytest.approx(expected_tx)
    assert ch_to_bs_energy((250, 400), (250, 500), P) == pytest.approx(expected_tx + 5e-5)
    shifted = ch_to_bs_energy((250 + 17.5, 400 - 3), (250 + 17.5, 500 - 3), P)
    assert shifted == pytest.approx(ch_to_bs_energy((250, 400), (250, 500), P), rel=1e-12)


def test_round_energy():
    assert round_energy(0.0, 0.0) == 0.0
    assert round_energy(1e-4, 5e-5) == pytest.approx(1.5e-4)
    with pytest.raises(DomainError):
        round_energy(-1.0, 0.0)


def test_branches_meet_at_crossover():
    bits = 1000
    free = bits * P.e_elec + bits * P.e_fs * P.d0**2
    multi = bits * P.e_elec + bits * P.e_mp * P.d0**4
    assert multi == pytest.approx(free, rel=1e-12)


def test_gap_across_crossover_vanishes_linearly():
    # the two-sided gap is first order in eps: (2 + 4) * e_fs * d0 * eps per bit
    for k in (1e-4, 1e-6, 1e-8):
        eps = k * P.d0
        gap = abs(tx_energy(1000, P.d0 + eps, P) - tx_energy(1000, P.d0 - eps, P))
        slope_bound = 6 * 1000 * P.e_fs * P.d0 * eps
        assert gap == pytest.approx(slope_bound, rel=1e-2)


@given(
    bits=st.integers(min_value=1, max_value=10_000),
    d1=st.floats(min_value=0, max_value=1000, allow_nan=False),
    d2=st.floats(min_value=0, max_value=1000, allow_nan=False),
)
def test_tx_energy_monotone_in_distance(bits, d1, d2):
    lo, hi = sorted((d1, d2))
    assert tx_energy(bits, lo, P) <= tx_energy(bits, hi, P)


@given(bits=st.integers(min_value=0, max_value=10_000), d=st.floats(min_value=0, max_value=1000))
def test_tx_energy_strictly_increasing_in_bits(bits, d):
    assert tx_energy(bits + 1, d, P) > tx_energy(bits, d, P)
