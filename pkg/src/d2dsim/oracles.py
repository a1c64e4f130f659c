"""Independent verification oracles.

Slow, simple reference implementations used by the test suite and the
`oracle` CLI verb: permutation brute force for the matcher, dense grid
searches for the corner solvers, a Poisson-field Monte Carlo for the outage
formula, and exhaustive enumeration for small channel-allocation instances.
None of them share code with the solvers they check.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .config import ScenarioConfig
from .gains import GainTable
from .metrics import Assignment
from .power import PairLink, TripleLink
from .seeding import make_rng


def brute_force_matching(weights) -> float:
    """Best total weight over all permutations (square or rectangular)."""
    w = np.asarray(weights, dtype=float)
    rows, cols = w.shape
    best = -math.inf
    if rows <= cols:
        for perm in itertools.permutations(range(cols), rows):
            best = max(best, sum(w[i, perm[i]] for i in range(rows)))
    else:
        for perm in itertools.permutations(range(rows), cols):
            best = max(best, sum(w[perm[j], j] for j in range(cols)))
    return best


def pair_grid_search(link: PairLink, gamma_c, gamma_r, n0, pc_max, pg_max,
                     bandwidth, steps: int = 200):
    """Dense feasible-box scan for the single-group power problem.

    Returns (best objective, one-grid-cell objective slack) or (None, 0) when
    no grid point is feasible. The slack is the largest objective change to an
    axis neighbor of the best cell, the resolution error of the scan.
    """
    pc = np.linspace(0.0, pc_max, steps)
    pg = np.linspace(0.0, pg_max, steps)
    PC, PG = np.meshgrid(pc, pg, indexing="ij")
    g_c = PC * link.h_cb / (PG * link.h_gb + n0)
    g_g = np.full_like(PC, np.inf)
    for hr, hc in zip(link.h_gr, link.h_cr):
        g_g = np.minimum(g_g, PG * hr / (PC * hc + n0))
    feasible = (g_c >= gamma_c) & (g_g >= gamma_r)
    if not feasible.any():
        return None, 0.0
    obj = bandwidth * (np.log2(1.0 + g_c) + np.log2(1.0 + g_g))
    obj_feas = np.where(feasible, obj, -np.inf)
    idx = np.unravel_index(np.argmax(obj_feas), obj.shape)
    best = obj[idx]
    slack = 0.0
    for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        i, j = idx[0] + di, idx[1] + dj
        if 0 <= i < steps and 0 <= j < steps:
            slack = max(slack, abs(best - obj[i, j]))
    return float(best), float(slack)


def corner_grid_search(link: TripleLink, gamma_c, gamma_r1, gamma_r2, n0,
                       pc_max, pg1_max, pg2_max, bandwidth, steps: int = 50):
    """Dense 3-D feasible-box scan for the two-group power problem."""
    pc = np.linspace(0.0, pc_max, steps)
    pg1 = np.linspace(0.0, pg1_max, steps)
    pg2 = np.linspace(0.0, pg2_max, steps)
    PC, P1, P2 = np.meshgrid(pc, pg1, pg2, indexing="ij")
    g1 = np.full_like(PC, np.inf)
    for hown, hcross, hc in zip(link.h_g1r1, link.h_g2r1, link.h_cr1):
        g1 = np.minimum(g1, P1 * hown / (P2 * hcross + PC * hc + n0))
    g2 = np.full_like(PC, np.inf)
    for hown, hcross, hc in zip(link.h_g2r2, link.h_g1r2, link.h_cr2):
        g2 = np.minimum(g2, P2 * hown / (P1 * hcross + PC * hc + n0))
    gc = PC * link.h_cb / (P1 * link.h_g1b + P2 * link.h_g2b + n0)
    feasible = (gc >= gamma_c) & (g1 >= gamma_r1) & (g2 >= gamma_r2)
    if not feasible.any():
        return None, 0.0
    obj = bandwidth * (np.log2(1.0 + gc) + np.log2(1.0 + g1) + np.log2(1.0 + g2))
    obj_feas = np.where(feasible, obj, -np.inf)
    idx = np.unravel_index(np.argmax(obj_feas), obj.shape)
    best = obj[idx]
    slack = 0.0
    for axis in range(3):
        for step in (-1, 1):
            nb = list(idx)
            nb[axis] += step
            if 0 <= nb[axis] < steps:
                slack = max(slack, abs(best - obj[tuple(nb)]))
    return float(best), float(slack)


def ppp_outage_mc(gamma_o: float, alpha: float, d_gr: float, lambda_c: float,
                  lambda_g: float, p_c: float, p_g: float, n_real: int,
                  seed: int, r_max: float = 3000.0, batch: int = 4000) -> float:
    """Monte Carlo outage probability under two Poisson interferer fields.

    Drops cellular and multicast interferers as independent Poisson processes
    in a disc of radius r_max (large enough that the truncated far field is
    negligible for alpha > 2), gives every link an independent unit-mean
    exponential fade, and measures how often the receiver's SIR falls at or
    below gamma_o against the desired link at distance d_gr.
    """
    rng = make_rng(seed)
    outages = 0
    done = 0
    signal_pl = d_gr ** -alpha if d_gr > 0 else math.inf
    while done < n_real:
        n = min(batch, n_real - done)
        interference = np.zeros(n)
        for lam, power in ((lambda_c, p_c), (lambda_g, p_g)):
            counts = rng.poisson(lam * math.pi * r_max ** 2, size=n)
            total = int(counts.sum())
            if total:
                radii = r_max * np.sqrt(rng.random(total))
                fades = rng.exponential(1.0, total)
                contrib = power * fades * radii ** -alpha
                owner = np.repeat(np.arange(n), counts)
                interference += np.bincount(owner, weights=contrib, minlength=n)
            # zero-interferer realizations contribute zero interference
        fade0 = rng.exponential(1.0, n)
        sir = p_g * fade0 * signal_pl / np.maximum(interference, 1e-300)
        outages += int(np.sum(sir <= gamma_o))
        done += n
    return outages / n_real


def exhaustive_allocation(gains: GainTable, config: ScenarioConfig,
                          evaluate) -> tuple[Assignment, float]:
    """Best assignment over every (channel or none) choice per group.

    Exponential in the group count; intended for G <= 6, C <= 3 only.
    `evaluate(assignment) -> float` supplies the figure of merit.
    """
    G, C = gains.num_groups, gains.num_channels
    if G > 6 or C > 3:
        raise ValueError("exhaustive enumeration is limited to G <= 6, C <= 3")
    best_assignment = None
    best_value = -math.inf
    for combo in itertools.product([None] + list(range(C)), repeat=G):
        assignment = Assignment(C, combo)
        value = evaluate(assignment)
        if value > best_value:
            best_value = value
            best_assignment = assignment
    return best_assignment, best_value


def max_power_sum_rate(assignment: Assignment, gains: GainTable,
                       config: ScenarioConfig) -> float:
    """All-transmitters-at-max sum rate (CU rates plus group rates)."""
    from .metrics import max_power_profile, rate_cu, rate_mg
    powers = max_power_profile(assignment, config)
    n0, bw = config.n0_watts, config.bandwidth_per_channel
    total = 0.0
    for k in range(assignment.num_channels):
        total += rate_cu(k, assignment, powers, gains, n0, bw)
        for g in assignment.groups_on(k):
            total += rate_mg(g, k, assignment, powers, gains, n0, bw)
    return total


# ---------------------------------------------------------------------------
# random instance generators shared by tests and the CLI oracle verb
# ---------------------------------------------------------------------------

def _log_uniform(rng, lo, hi, size=None):
    return 10.0 ** rng.uniform(math.log10(lo), math.log10(hi), size)


def random_pair_instance(rng) -> PairLink:
    """One CU + one group with plausible own/cross gain scales."""
    n_rx = int(rng.integers(1, 4))
    return PairLink(
        h_cb=_log_uniform(rng, 1e-8, 1e-5),
        h_gb=_log_uniform(rng, 1e-10, 1e-7),
        h_gr=_log_uniform(rng, 1e-7, 1e-4, n_rx),
        h_cr=_log_uniform(rng, 1e-10, 1e-7, n_rx))


def random_triple_instance(rng, n_rx: int | None = None) -> TripleLink:
    """One CU + two groups; own links strong, cross links weak."""
    if n_rx is None:
        n_rx = int(rng.integers(1, 3))
    return TripleLink(
        h_cb=_log_uniform(rng, 1e-8, 1e-5),
        h_g1b=_log_uniform(rng, 1e-10, 1e-7),
        h_g2b=_log_uniform(rng, 1e-10, 1e-7),
        h_g1r1=_log_uniform(rng, 1e-7, 1e-4, n_rx),
        h_g2r1=_log_uniform(rng, 1e-10, 1e-7, n_rx),
        h_cr1=_log_uniform(rng, 1e-10, 1e-7, n_rx),
        h_g2r2=_log_uniform(rng, 1e-7, 1e-4, n_rx),
        h_g1r2=_log_uniform(rng, 1e-10, 1e-7, n_rx),
        h_cr2=_log_uniform(rng, 1e-10, 1e-7, n_rx))


def stim_two_group_fixed_point(link: TripleLink, gamma: float, p_c: float,
                               n0: float) -> np.ndarray | None:
    """Direct solve of the two-group SINR-target balance with the CU power
    held fixed (single receiver per group). None when no positive solution."""
    if link.h_g1r1.size != 1 or link.h_g2r2.size != 1:
        raise ValueError("direct solve assumes one receiver per group")
    a = np.array([[link.h_g1r1[0], -gamma * link.h_g2r1[0]],
                  [-gamma * link.h_g1r2[0], link.h_g2r2[0]]])
    b = gamma * np.array([p_c * link.h_cr1[0] + n0, p_c * link.h_cr2[0] + n0])
    try:
        sol = np.linalg.solve(a, b)
    except np.linalg.LinAlgError:
        return None
    if np.any(sol <= 0.0):
        return None
    return sol
