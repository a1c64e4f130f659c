import numpy as np
import pytest

from d2dsim.oracles import corner_grid_search, random_triple_instance
from d2dsim.power import TripleLink, _triple_sinrs, corner_search_gk2
from d2dsim.seeding import make_rng

BW = 1.0


def region_candidates(result, region):
    return [c for c in result.candidates if c.region == region]


def test_region1_linear_system_candidates():
    # gamma=3, CU power pinned at 1 W, noise set to zero; the three SINR
    # boundary planes reduce to a 2x2 system per plane pair
    link = TripleLink(h_cb=5.2e-6, h_g1b=2.8e-7, h_g2b=3.22e-6,
                      h_g1r1=np.array([2.9e-5]), h_g2r1=np.array([3e-7]),
                      h_cr1=np.array([4.5e-6]),
                      h_g2r2=np.array([2.9e-5]), h_g1r2=np.array([3.2e-7]),
                      h_cr2=np.array([5e-6]))
    gamma = 3.0
    res = corner_search_gk2(link, gamma, gamma, gamma, n0=0.0, pc_max=1.0,
                            pg1_max=1.0, pg2_max=1.0, bandwidth=BW)
    # independent route: solve each pair of boundary equations directly
    rows = {
        "g1": (np.array([2.9e-5, -gamma * 3e-7]), gamma * 4.5e-6),
        "g2": (np.array([-gamma * 3.2e-7, 2.9e-5]), gamma * 5e-6),
        "c": (np.array([-gamma * 2.8e-7, -gamma * 3.22e-6]), -5.2e-6),
    }
    expected = []
    for a, b in (("g1", "g2"), ("g1", "c"), ("g2", "c")):
        m = np.vstack([rows[a][0], rows[b][0]])
        v = np.array([rows[a][1], rows[b][1]])
        expected.append(np.linalg.solve(m, v))
    got = [(c.p_g1, c.p_g2) for c in region_candidates(res, 1)]
    assert len(got) == 3
    for sol in expected:
        assert any(abs(p1 - sol[0]) < 1e-9 and abs(p2 - sol[1]) < 1e-9
                   for p1, p2 in got)
    # hand-checked reference solutions for these coefficients
    for ref in ([0.4809, 0.4965], [0.1754, 0.5230], [0.4821, 0.5332]):
        assert any(abs(p1 - ref[0]) < 0.05 and abs(p2 - ref[1]) < 0.05
                   for p1, p2 in got)


def _benign_base():
    # strong own links, weak cross links: every region produces candidates
    return dict(h_cb=3.8e-5, h_g1b=4.7e-7, h_g2b=5.6e-6,
                h_g1r1=np.array([2.5e-5]), h_g2r1=np.array([5.3e-7]),
                h_cr1=np.array([3.5e-7]),
                h_g2r2=np.array([4.2e-5]), h_g1r2=np.array([2.9e-7]),
                h_cr2=np.array([4.2e-6]))


def test_region4_candidate_value():
    # both the CU and group 1 at max power; group 2's own constraint gives
    # p_g2 = 3*(2.9e-7 + 4.2e-6) / 4.2e-5 = 0.320714...
    link = TripleLink(**_benign_base())
    res = corner_search_gk2(link, 3.0, 3.0, 3.0, 0.0, 1.0, 1.0, 1.0, BW)
    expected = 3.0 * (2.9e-7 + 4.2e-6) / 4.2e-5
    assert expected == pytest.approx(0.3207, abs=1e-3)
    assert any(abs(c.p_g2 - expected) < 1e-9 for c in region_candidates(res, 4))


def test_region5_candidate_value():
    # CU and group 2 at max power; group 1's own constraint gives
    # p_g1 = 3*(5.3e-7 + 3.5e-7) / 2.5e-5 = 0.1056
    link = TripleLink(**_benign_base())
    res = corner_search_gk2(link, 3.0, 3.0, 3.0, 0.0, 1.0, 1.0, 1.0, BW)
    expected = 3.0 * (5.3e-7 + 3.5e-7) / 2.5e-5
    assert expected == pytest.approx(0.1056, abs=1e-6)
    assert any(abs(c.p_g1 - expected) < 1e-9 for c in region_candidates(res, 5))


def test_region6_candidate_value():
    # both groups at max power; the CU constraint gives
    # p_c = 3*(4.7e-7 + 5.6e-6) / 3.8e-5 = 0.479210... (hand evaluation)
    link = TripleLink(**_benign_base())
    res = corner_search_gk2(link, 3.0, 3.0, 3.0, 0.0, 1.0, 1.0, 1.0, BW)
    expected = 3.0 * (4.7e-7 + 5.6e-6) / 3.8e-5
    assert expected == pytest.approx(0.479, abs=1e-2)
    assert any(abs(c.p_c - expected) < 1e-9 for c in region_candidates(res, 6))


def test_region7_all_max_candidate():
    link = TripleLink(**_benign_base())
    res = corner_search_gk2(link, 3.0, 3.0, 3.0, 0.0, 1.0, 1.0, 1.0, BW)
    r7 = region_candidates(res, 7)
    assert len(r7) == 1
    assert (r7[0].p_c, r7[0].p_g1, r7[0].p_g2) == (1.0, 1.0, 1.0)


def tight_instance(rng):
    """Random instance whose SINR targets bind (drawn near the feasibility
    limit); with slack targets the sum-rate optimum can sit strictly inside a
    box face where no vertex search can reach it."""
    link = random_triple_instance(rng)
    p_star = 10.0 ** rng.uniform(-1.5, 0.0, 3)
    gc, g1, g2 = _triple_sinrs(link, p_star, 1e-12)
    u = rng.uniform(0.85, 0.99, 3)
    return link, (u[0] * gc, u[1] * g1, u[2] * g2)


def test_grid_oracle_tight_instances():
    rng = make_rng(11)
    checked = 0
    while checked < 40:
        link, (gam_c, gam_1, gam_2) = tight_instance(rng)
        best, slack = corner_grid_search(link, gam_c, gam_1, gam_2, 1e-12,
                                         1.0, 1.0, 1.0, BW, steps=50)
        if best is None:
            continue
        res = corner_search_gk2(link, gam_c, gam_1, gam_2, 1e-12, 1.0, 1.0, 1.0, BW)
        checked += 1
        assert res.feasible
        assert res.objective >= best - slack - 1e-9


def test_returned_point_constraints_and_structure():
    rng = make_rng(29)
    seen_feasible = 0
    for _ in range(200):
        link, (gam_c, gam_1, gam_2) = tight_instance(rng)
        res = corner_search_gk2(link, gam_c, gam_1, gam_2, 1e-12, 1.0, 1.0, 1.0, BW)
        if not res.feasible:
            continue
        seen_feasible += 1
        p = (res.p_c, res.p_g1, res.p_g2)
        gc, g1, g2 = _triple_sinrs(link, p, 1e-12)
        assert gc >= gam_c * (1 - 1e-9)
        assert g1 >= gam_1 * (1 - 1e-9)
        assert g2 >= gam_2 * (1 - 1e-9)
        assert all(-1e-12 <= x <= 1.0 + 1e-12 for x in p)
        # a vertex has a power at a box face or sits on an active SINR plane
        at_face = any(abs(x - 1.0) < 1e-9 or abs(x) < 1e-9 for x in p)
        on_plane = (gc <= gam_c * (1 + 1e-6) or g1 <= gam_1 * (1 + 1e-6)
                    or g2 <= gam_2 * (1 + 1e-6))
        assert at_face or on_plane
    assert seen_feasible >= 100


def test_interior_sample_dominance():
    # vertex optimum dominates 1000 uniform samples from the feasible pocket
    rng = make_rng(31)
    checked = 0
    while checked < 100:
        link, (gam_c, gam_1, gam_2) = tight_instance(rng)
        res = corner_search_gk2(link, gam_c, gam_1, gam_2, 1e-12, 1.0, 1.0, 1.0, BW)
        if not res.feasible:
            continue
        pts = rng.random((1000, 3))
        best_interior = -np.inf
        n_feas = 0
        for p in pts:
            gc, g1, g2 = _triple_sinrs(link, p, 1e-12)
            if gc >= gam_c and g1 >= gam_1 and g2 >= gam_2:
                n_feas += 1
                obj = (np.log2(1 + gc) + np.log2(1 + g1) + np.log2(1 + g2)) * BW
                best_interior = max(best_interior, obj)
        if n_feas < 10:
            continue
        checked += 1
        assert res.objective >= best_interior - 0.05
