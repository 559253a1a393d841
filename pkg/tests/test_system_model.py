import math

import numpy as np
import pytest

from bandgame import (DegenerateGeometryError, Point, channel_gain,
                      distance, efficiency, link_budget, snr_direct,
                      snr_relayed)
from conftest import RELAY_450

# Frozen reference values, computed with 50-digit arithmetic from the exact
# rational gain/SNR chain of the bundled scenario (relay at (450, 450)).
D_S1_D1 = 398.77938763180827
H11_SQ = 3.8356672618953322e-12
H22_SQ = 3.8025495705677748e-12
H1R_SQ = 4.7901234567901235e-11
HR1_SQ = 5.9064385127192033e-11
H2R_SQ = 5.8131144786744310e-11
HR2_SQ = 5.2438836178070548e-11
GAMMA_11 = 3.8356672618953322
GAMMA_22 = 3.8025495705677748
GAMMA_R1 = 23.539688109005976
GAMMA_R2 = 24.125546648451999
F_3835_80 = 2.9990520716926957e-6


def test_distance_trivial():
    assert distance(Point(0, 0), Point(0, 0)) == 0.0
    assert distance(Point(0, 0), Point(3, 4)) == 5.0


def test_distance_paper_nodes(paper):
    assert distance(paper.source_1, paper.dest_1) == pytest.approx(D_S1_D1, rel=1e-14)


def test_channel_gain_unit_distance(paper):
    assert channel_gain(1.0, paper) == pytest.approx(0.097, rel=1e-15)


def test_channel_gain_value(paper):
    assert channel_gain(398.78, paper) == pytest.approx(3.8356437016845402e-12, rel=1e-12)


def test_channel_gain_zero_exponent(paper):
    from dataclasses import replace
    flat = replace(paper, pathloss_exp=0.0)
    for d in (0.5, 1.0, 123.4, 1e6):
        assert channel_gain(d, flat) == 0.097


def test_channel_gain_degenerate(paper):
    with pytest.raises(DegenerateGeometryError):
        channel_gain(0.0, paper)
    with pytest.raises(ValueError):
        channel_gain(-1.0, paper)


def test_snr_direct_trivial():
    assert snr_direct(0.0, 1e-11, 1e-13) == 0.0
    assert snr_direct(0.1, 1e-12, 1e-13) == pytest.approx(1.0, rel=1e-15)


def test_snr_direct_value():
    assert snr_direct(0.1, 3.835e-12, 1e-13) == pytest.approx(3.835, rel=1e-12)


def test_snr_relayed_trivial():
    assert snr_relayed(0.1, 0.0, 1e-11, 1e-11, 1e-13) == 0.0
    # both received powers equal to the noise floor: sigma^4 / (3 sigma^4)
    s2 = 1e-13
    assert snr_relayed(1.0, 1.0, s2, s2, s2) == pytest.approx(1.0 / 3.0, rel=1e-12)


def test_snr_relayed_paper_value(paper):
    got = snr_relayed(paper.p1, paper.p_r, H1R_SQ, HR1_SQ, paper.sigma2)
    assert got == pytest.approx(GAMMA_R1, rel=1e-12)


def test_snr_relayed_symmetry():
    rng = np.random.default_rng(7)
    for _ in range(200):
        p_i, p_r = rng.uniform(0.01, 1.0, 2)
        g_ir, g_ri = 10.0 ** rng.uniform(-13, -9, 2)
        s2 = 10.0 ** rng.uniform(-14, -12)
        a = snr_relayed(p_i, p_r, g_ir, g_ri, s2)
        b = snr_relayed(p_r, p_i, g_ri, g_ir, s2)
        assert a == pytest.approx(b, rel=1e-12)


def test_snr_relayed_bounded_by_hops():
    rng = np.random.default_rng(8)
    for _ in range(200):
        p_i, p_r = rng.uniform(0.0, 1.0, 2)
        g_ir, g_ri = 10.0 ** rng.uniform(-13, -9, 2)
        s2 = 10.0 ** rng.uniform(-14, -12)
        relayed = snr_relayed(p_i, p_r, g_ir, g_ri, s2)
        assert relayed <= min(snr_direct(p_i, g_ir, s2), snr_direct(p_r, g_ri, s2)) + 1e-15


def test_link_budget_paper_values(paper):
    budget = link_budget(paper, RELAY_450)
    u1, u2 = budget.user1, budget.user2
    assert u1.h_ii_sq == pytest.approx(H11_SQ, rel=1e-13)
    assert u1.h_ir_sq == pytest.approx(H1R_SQ, rel=1e-13)
    assert u1.h_ri_sq == pytest.approx(HR1_SQ, rel=1e-13)
    assert u2.h_ii_sq == pytest.approx(H22_SQ, rel=1e-13)
    assert u2.h_ir_sq == pytest.approx(H2R_SQ, rel=1e-13)
    assert u2.h_ri_sq == pytest.approx(HR2_SQ, rel=1e-13)
    assert u1.gamma_direct == pytest.approx(GAMMA_11, rel=1e-13)
    assert u2.gamma_direct == pytest.approx(GAMMA_22, rel=1e-13)
    assert u1.gamma_relayed == pytest.approx(GAMMA_R1, rel=1e-12)
    assert u2.gamma_relayed == pytest.approx(GAMMA_R2, rel=1e-12)


def test_link_budget_af_is_exact_sum(paper):
    rng = np.random.default_rng(9)
    for _ in range(50):
        relay = Point(float(rng.uniform(1, 700)), float(rng.uniform(1, 700)))
        budget = link_budget(paper, relay)
        for user in (budget.user1, budget.user2):
            assert user.gamma_af == user.gamma_direct + user.gamma_relayed


def test_link_budget_colocated_relay(paper):
    with pytest.raises(DegenerateGeometryError):
        link_budget(paper, paper.source_1)


def test_link_budget_far_relay(paper):
    budget = link_budget(paper, Point(1e9, 1e9))
    for user in (budget.user1, budget.user2):
        assert user.gamma_relayed < 1e-12
        assert user.gamma_af == pytest.approx(user.gamma_direct, rel=1e-9)


def test_link_budget_deterministic(paper):
    a = link_budget(paper, RELAY_450)
    b = link_budget(paper, RELAY_450)
    assert a == b


def test_efficiency_trivial():
    assert efficiency(0.0, 1) == 0.0
    assert efficiency(0.0, 80) == 0.0
    assert efficiency(2.0 * math.log(2.0), 1) == pytest.approx(0.5, rel=1e-14)


def test_efficiency_value():
    assert efficiency(3.835, 80) == pytest.approx(F_3835_80, rel=1e-12)


def test_efficiency_limits():
    assert efficiency(1e6, 80) == 1.0
    assert efficiency(1e-300, 80) == 0.0  # underflows cleanly


def test_efficiency_monotone():
    rng = np.random.default_rng(10)
    for _ in range(300):
        x = float(rng.uniform(0.0, 50.0))
        dx = float(rng.uniform(0.0, 10.0))
        m = int(rng.integers(1, 200))
        lo, hi = efficiency(x, m), efficiency(x + dx, m)
        assert 0.0 <= lo <= hi <= 1.0
        if x > 0:
            assert efficiency(x, m + int(rng.integers(1, 50))) <= lo


def test_efficiency_preconditions():
    with pytest.raises(ValueError):
        efficiency(-1.0, 80)
    with pytest.raises(ValueError):
        efficiency(1.0, 0)


def test_scenario_invariants(paper):
    from dataclasses import replace
    for field, bad in [("p1", 0.0), ("p2", -1.0), ("p_r", 0.0),
                       ("sigma2", 0.0), ("omega", 0.0), ("b", -1e-6),
                       ("alpha", 0.0), ("M", 0)]:
        with pytest.raises(ValueError, match=field):
            replace(paper, **{field: bad})


def test_point_finite():
    with pytest.raises(ValueError):
        Point(math.nan, 0.0)
    with pytest.raises(ValueError):
        Point(0.0, math.inf)
