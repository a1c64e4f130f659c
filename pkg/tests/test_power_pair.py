import numpy as np
import pytest

from d2dsim.oracles import pair_grid_search, random_pair_instance
from d2dsim.power import PairLink, pair_power
from d2dsim.seeding import make_rng

N0 = 1e-12
BW = 1.0


def test_decoupled_links_go_to_max():
    # no cross interference at all: both transmitters max out
    link = PairLink(h_cb=1e-6, h_gb=0.0, h_gr=np.array([1e-4]), h_cr=np.array([0.0]))
    res = pair_power(link, gamma_c=2.0, gamma_r=2.0, n0=N0, pc_max=1.0, pg_max=1.0,
                     bandwidth=BW)
    assert res.feasible
    assert res.p_c == pytest.approx(1.0)
    assert res.p_g == pytest.approx(1.0)


def test_blocked_group_link():
    link = PairLink(h_cb=1e-6, h_gb=1e-8, h_gr=np.array([0.0]), h_cr=np.array([1e-8]))
    res = pair_power(link, 2.0, 2.0, N0, 1.0, 1.0, BW)
    assert not res.feasible
    assert (res.p_c, res.p_g) == (1.0, 0.0)


def test_infeasible_region_marker():
    # receiver target impossible even at full group power
    link = PairLink(h_cb=1e-6, h_gb=1e-8, h_gr=np.array([1e-12]), h_cr=np.array([1e-4]))
    res = pair_power(link, 2.0, 1e6, N0, 1.0, 1.0, BW)
    assert not res.feasible
    assert res.p_g == 0.0
    assert res.p_c == pytest.approx(min(2.0 * N0 / 1e-6, 1.0))


def test_grid_oracle_and_one_at_max():
    rng = make_rng(7)
    checked = 0
    while checked < 60:
        link = random_pair_instance(rng)
        gamma_c, gamma_r = rng.uniform(1.0, 4.0, 2)
        best, slack = pair_grid_search(link, gamma_c, gamma_r, N0, 1.0, 1.0, BW,
                                       steps=200)
        if best is None:
            continue
        res = pair_power(link, gamma_c, gamma_r, N0, 1.0, 1.0, BW)
        checked += 1
        assert res.feasible
        assert res.objective >= best - slack - 1e-9
        # one transmitter always ends up at its cap
        assert res.p_c == pytest.approx(1.0) or res.p_g == pytest.approx(1.0)


def test_feasibility_of_returned_point():
    rng = make_rng(21)
    for _ in range(100):
        link = random_pair_instance(rng)
        gamma_c, gamma_r = rng.uniform(1.0, 4.0, 2)
        res = pair_power(link, gamma_c, gamma_r, N0, 1.0, 1.0, BW)
        if not res.feasible:
            continue
        g_c = res.p_c * link.h_cb / (res.p_g * link.h_gb + N0)
        g_g = np.min(res.p_g * link.h_gr / (res.p_c * link.h_cr + N0))
        assert g_c >= gamma_c * (1 - 1e-9)
        assert g_g >= gamma_r * (1 - 1e-9)
        assert -1e-12 <= res.p_c <= 1.0 + 1e-12
        assert -1e-12 <= res.p_g <= 1.0 + 1e-12
