"""Transmit power allocation for the groups sharing each CU channel.

Three solvers, picked by how many groups share the channel:

* one group: corner search over the 2-D feasible power region (the sum rate
  grows along rays from the origin, so the optimum sits on a vertex and at
  least one transmitter ends up at maximum power);
* two groups: corner search over the 3-D region bounded by the three SINR
  planes and the power box, enumerating the seven vertex families
  (one power fixed at max + two active planes, two at max + one plane,
  all three at max);
* any number of groups: iterative SINR-target tracking with per-group caps
  that split the CU's tolerable interference budget equally.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ScenarioConfig
from .gains import GainTable
from .metrics import (Assignment, PowerProfile, rate_from_sinr,
                      throughput_gain)

FEAS_RTOL = 1e-9  # relative slack accepted on SINR targets and box bounds


# ---------------------------------------------------------------------------
# single group on a channel
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PairLink:
    """Gains coupling one CU and one multicast group on a channel."""
    h_cb: float        # CU -> BS
    h_gb: float        # MGTX -> BS
    h_gr: np.ndarray   # MGTX -> own receivers
    h_cr: np.ndarray   # CU -> the group's receivers


@dataclass(frozen=True)
class PairResult:
    p_c: float
    p_g: float
    objective: float   # bits/s sum rate at the returned powers
    feasible: bool     # both SINR targets hold at the returned powers


def pair_link_from(gains: GainTable, k: int, g: int) -> PairLink:
    return PairLink(float(gains.cu_bs[k]), float(gains.mg_bs[g, k]),
                    np.asarray(gains.own_gains(g, k), dtype=float),
                    np.asarray(gains.cu_rx[g][k, :], dtype=float))


def _pair_objective(link: PairLink, p_c, p_g, n0, bandwidth):
    g_c = p_c * link.h_cb / (p_g * link.h_gb + n0)
    g_g = np.min(p_g * link.h_gr / (p_c * link.h_cr + n0))
    return rate_from_sinr(g_c, bandwidth) + rate_from_sinr(g_g, bandwidth)


def _pair_feasible(link: PairLink, p_c, p_g, gamma_c, gamma_r, n0):
    g_c = p_c * link.h_cb / (p_g * link.h_gb + n0)
    if g_c < gamma_c * (1.0 - FEAS_RTOL):
        return False
    g_g = np.min(p_g * link.h_gr / (p_c * link.h_cr + n0))
    return g_g >= gamma_r * (1.0 - FEAS_RTOL)


def pair_power(link: PairLink, gamma_c: float, gamma_r: float, n0: float,
               pc_max: float, pg_max: float, bandwidth: float) -> PairResult:
    """Best vertex of the 2-D SINR-constrained power region.

    Vertices are the pairwise intersections of the box edges with the SINR
    boundary lines (CU line plus one line per receiver). A blocked multicast
    link silences the group and hands the channel to the CU at full power; an
    empty feasible region silences the group and leaves the CU at the lowest
    power meeting its own target.
    """
    if link.h_cb <= 0.0:
        return PairResult(pc_max, 0.0, 0.0, False)  # CU uplink blocked
    if np.min(link.h_gr) <= 0.0:
        obj = _pair_objective(link, pc_max, 0.0, n0, bandwidth)
        return PairResult(pc_max, 0.0, obj, False)

    # lines a_c * p_c + a_g * p_g = b
    lines = [(link.h_cb, -gamma_c * link.h_gb, gamma_c * n0)]       # CU target
    for hr, hc in zip(link.h_gr, link.h_cr):
        lines.append((-gamma_r * hc, hr, gamma_r * n0))              # receiver target
    lines.append((1.0, 0.0, 0.0))        # p_c = 0
    lines.append((1.0, 0.0, pc_max))     # p_c = max
    lines.append((0.0, 1.0, 0.0))        # p_g = 0
    lines.append((0.0, 1.0, pg_max))     # p_g = max

    best = None
    for i in range(len(lines)):
        a1, b1, c1 = lines[i]
        for j in range(i + 1, len(lines)):
            a2, b2, c2 = lines[j]
            det = a1 * b2 - a2 * b1
            scale = max(abs(a1 * b2), abs(a2 * b1), 1e-300)
            if abs(det) <= 1e-12 * scale:
                continue
            p_c = (c1 * b2 - c2 * b1) / det
            p_g = (a1 * c2 - a2 * c1) / det
            tol_c = FEAS_RTOL * max(pc_max, 1.0)
            tol_g = FEAS_RTOL * max(pg_max, 1.0)
            if not (-tol_c <= p_c <= pc_max + tol_c and -tol_g <= p_g <= pg_max + tol_g):
                continue
            p_c = min(max(p_c, 0.0), pc_max)
            p_g = min(max(p_g, 0.0), pg_max)
            if not _pair_feasible(link, p_c, p_g, gamma_c, gamma_r, n0):
                continue
            obj = _pair_objective(link, p_c, p_g, n0, bandwidth)
            if best is None or obj > best.objective:
                best = PairResult(p_c, p_g, obj, True)
    if best is not None:
        return best
    p_c = min(gamma_c * n0 / link.h_cb, pc_max)
    return PairResult(p_c, 0.0, _pair_objective(link, p_c, 0.0, n0, bandwidth), False)


# ---------------------------------------------------------------------------
# two groups on a channel
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TripleLink:
    """Gains coupling one CU and two multicast groups on a channel.

    Receiver-indexed arrays follow the victim group: *_r1 arrays run over
    group 1's receivers, *_r2 over group 2's.
    """
    h_cb: float
    h_g1b: float
    h_g2b: float
    h_g1r1: np.ndarray   # group 1 own links
    h_g2r1: np.ndarray   # group 2 into group 1's receivers
    h_cr1: np.ndarray    # CU into group 1's receivers
    h_g2r2: np.ndarray   # group 2 own links
    h_g1r2: np.ndarray   # group 1 into group 2's receivers
    h_cr2: np.ndarray    # CU into group 2's receivers


@dataclass(frozen=True)
class CornerCandidate:
    region: int          # 1..7 vertex family
    p_c: float
    p_g1: float
    p_g2: float
    feasible: bool
    objective: float


@dataclass(frozen=True)
class CornerResult:
    p_c: float
    p_g1: float
    p_g2: float
    objective: float
    feasible: bool
    candidates: tuple[CornerCandidate, ...]


def triple_link_from(gains: GainTable, k: int, g1: int, g2: int) -> TripleLink:
    return TripleLink(
        float(gains.cu_bs[k]), float(gains.mg_bs[g1, k]), float(gains.mg_bs[g2, k]),
        np.asarray(gains.own_gains(g1, k), dtype=float),
        np.asarray(gains.cross_gains(g2, g1, k), dtype=float),
        np.asarray(gains.cu_rx[g1][k, :], dtype=float),
        np.asarray(gains.own_gains(g2, k), dtype=float),
        np.asarray(gains.cross_gains(g1, g2, k), dtype=float),
        np.asarray(gains.cu_rx[g2][k, :], dtype=float))


def _triple_planes(link: TripleLink, gamma_c, gamma_r1, gamma_r2, n0):
    """SINR constraints as rows (a, b) meaning a . (p_c, p_g1, p_g2) >= b."""
    planes = []
    for hown, hcross, hc in zip(link.h_g1r1, link.h_g2r1, link.h_cr1):
        planes.append((np.array([-gamma_r1 * hc, hown, -gamma_r1 * hcross]),
                       gamma_r1 * n0))
    for hown, hcross, hc in zip(link.h_g2r2, link.h_g1r2, link.h_cr2):
        planes.append((np.array([-gamma_r2 * hc, -gamma_r2 * hcross, hown]),
                       gamma_r2 * n0))
    planes.append((np.array([link.h_cb, -gamma_c * link.h_g1b, -gamma_c * link.h_g2b]),
                   gamma_c * n0))
    return planes


def _triple_sinrs(link: TripleLink, p, n0):
    p_c, p_g1, p_g2 = p
    g1 = np.min(p_g1 * link.h_g1r1 / (p_g2 * link.h_g2r1 + p_c * link.h_cr1 + n0))
    g2 = np.min(p_g2 * link.h_g2r2 / (p_g1 * link.h_g1r2 + p_c * link.h_cr2 + n0))
    gc = p_c * link.h_cb / (p_g1 * link.h_g1b + p_g2 * link.h_g2b + n0)
    return gc, g1, g2


def corner_search_gk2(link: TripleLink, gamma_c: float, gamma_r1: float,
                      gamma_r2: float, n0: float, pc_max: float, pg1_max: float,
                      pg2_max: float, bandwidth: float) -> CornerResult:
    """Enumerate the seven vertex families and return the best feasible one.

    Families 1-3 fix one power at its maximum and intersect pairs of SINR
    planes in the remaining two variables; families 4-6 fix two powers at
    their maxima and solve each single plane for the third; family 7 is the
    all-max point. Near-singular intersections are skipped. Ties go to the
    lowest family index.
    """
    planes = _triple_planes(link, gamma_c, gamma_r1, gamma_r2, n0)
    pmax = np.array([pc_max, pg1_max, pg2_max])
    candidates = []

    def add(region, p):
        tol = FEAS_RTOL * np.maximum(pmax, 1.0)
        if np.any(p < -tol) or np.any(p > pmax + tol):
            return
        p = np.clip(p, 0.0, pmax)
        gc, g1, g2 = _triple_sinrs(link, p, n0)
        ok = (gc >= gamma_c * (1.0 - FEAS_RTOL)
              and g1 >= gamma_r1 * (1.0 - FEAS_RTOL)
              and g2 >= gamma_r2 * (1.0 - FEAS_RTOL))
        obj = (rate_from_sinr(gc, bandwidth) + rate_from_sinr(g1, bandwidth)
               + rate_from_sinr(g2, bandwidth))
        candidates.append(CornerCandidate(region, p[0], p[1], p[2], ok, obj))

    # one power at max, two planes active
    for region, fixed in ((1, 0), (2, 1), (3, 2)):
        free = [i for i in range(3) if i != fixed]
        for i in range(len(planes)):
            a1, b1 = planes[i]
            for j in range(i + 1, len(planes)):
                a2, b2 = planes[j]
                m = np.array([[a1[free[0]], a1[free[1]]],
                              [a2[free[0]], a2[free[1]]]])
                rhs = np.array([b1 - a1[fixed] * pmax[fixed],
                                b2 - a2[fixed] * pmax[fixed]])
                det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
                scale = max(abs(m[0, 0] * m[1, 1]), abs(m[0, 1] * m[1, 0]), 1e-300)
                if abs(det) <= 1e-12 * scale:
                    continue
                sol = np.array([(rhs[0] * m[1, 1] - rhs[1] * m[0, 1]) / det,
                                (m[0, 0] * rhs[1] - m[1, 0] * rhs[0]) / det])
                p = np.empty(3)
                p[fixed] = pmax[fixed]
                p[free[0]], p[free[1]] = sol
                add(region, p)

    # two powers at max, one plane active
    for region, fixed_pair, free_i in ((4, (0, 1), 2), (5, (0, 2), 1), (6, (1, 2), 0)):
        for a, b in planes:
            coef = a[free_i]
            if abs(coef) <= 1e-300:
                continue
            rhs = b - sum(a[f] * pmax[f] for f in fixed_pair)
            p = pmax.astype(float).copy()
            p[free_i] = rhs / coef
            add(region, p)

    add(7, pmax.astype(float).copy())

    best = None
    for cand in candidates:
        if not cand.feasible:
            continue
        if best is None or cand.objective > best.objective:
            best = cand
    if best is None:
        return CornerResult(0.0, 0.0, 0.0, 0.0, False, tuple(candidates))
    return CornerResult(best.p_c, best.p_g1, best.p_g2, best.objective, True,
                        tuple(candidates))


# ---------------------------------------------------------------------------
# any number of groups: iterative interference management
# ---------------------------------------------------------------------------

def interference_budget(k: int, gains: GainTable, config: ScenarioConfig) -> float:
    """Total multicast interference the CU on channel k can absorb at the BS
    while still reaching its rate target at maximum power. A configured
    positive interference_cap overrides the derived budget."""
    if config.interference_cap > 0.0:
        return config.interference_cap
    budget = config.p_c_max_watts * gains.cu_bs[k] / config.gamma_cu - config.n0_watts
    return max(budget, 0.0)


@dataclass
class StimChannelInfo:
    channel: int
    iterations: int
    converged: bool
    caps: np.ndarray
    trajectory: list  # power vectors per iteration when recording


def stim_channel(groups: list, k: int, gains: GainTable, config: ScenarioConfig,
                 record: bool = False) -> tuple[np.ndarray, float, StimChannelInfo]:
    """Power control for one channel's group set.

    Each group gets an equal share of the CU interference budget as a hard
    cap. Powers start at the max split equally and follow the multiplicative
    target-tracking update p <- (target / achieved) * p, clamped to the cap.
    The CU is assumed at maximum power while the groups iterate; afterwards it
    drops to the smallest power meeting its own rate target against the final
    interference (clamped to its box).
    """
    m = len(groups)
    n0 = config.n0_watts
    budget = interference_budget(k, gains, config)
    h_gb = np.array([gains.mg_bs[g, k] for g in groups])
    caps = np.minimum(config.p_g_max_watts,
                      np.where(h_gb > 0.0, budget / (np.maximum(h_gb, 1e-300) * m),
                               config.p_g_max_watts))
    caps = np.maximum(caps, 0.0)
    p = np.minimum(np.full(m, config.p_g_max_watts / m), caps)
    p_c_iter = config.p_c_max_watts
    gamma_target = config.gamma_rx

    info = StimChannelInfo(k, 0, False, caps, [p.copy()] if record else [])
    for t in range(1, config.stim_max_iters + 1):
        sinr = np.empty(m)
        for i, g in enumerate(groups):
            own = p[i] * gains.own_gains(g, k)
            interference = p_c_iter * gains.cu_rx[g][k, :] + n0
            for jj, j in enumerate(groups):
                if j != g:
                    interference = interference + p[jj] * gains.cross_gains(j, g, k)
            sinr[i] = np.min(own / interference)
        p_new = np.where(sinr > 0.0, np.minimum(gamma_target / np.maximum(sinr, 1e-300) * p, caps),
                         caps)
        info.iterations = t
        if record:
            info.trajectory.append(p_new.copy())
        rel = np.max(np.abs(p_new - p) / np.maximum(p, 1e-300)) if m else 0.0
        p = p_new
        if rel < config.stim_epsilon:
            info.converged = True
            break

    interference_bs = float(np.sum(p * h_gb))
    gamma_c = config.gamma_cu
    h_cb = gains.cu_bs[k]
    p_c = gamma_c * (n0 + interference_bs) / h_cb if h_cb > 0 else config.p_c_max_watts
    p_c = min(max(p_c, config.cu_power_floor), config.p_c_max_watts)
    return p, p_c, info


# ---------------------------------------------------------------------------
# per-channel dispatch
# ---------------------------------------------------------------------------

def _standalone_gain(g: int, k: int, gains: GainTable, config: ScenarioConfig) -> float:
    """Sharing gain of group g alone on channel k, both transmitters at max."""
    assignment = Assignment(gains.num_channels,
                            tuple(k if gg == g else None for gg in range(gains.num_groups)))
    powers = PowerProfile(np.full(gains.num_channels, config.p_c_max_watts),
                          np.where(np.arange(gains.num_groups) == g,
                                   config.p_g_max_watts, 0.0))
    gain, _ = throughput_gain(k, assignment, powers, gains, config.n0_watts,
                              config.bandwidth_per_channel)
    return gain


def allocate_powers(assignment: Assignment, gains: GainTable,
                    config: ScenarioConfig) -> tuple[PowerProfile, Assignment]:
    """Solve every channel and assemble the full power profile.

    Channels are dispatched on group count: empty channels keep the CU at
    maximum power, single groups use the 2-D corner search, pairs use the 3-D
    corner search, larger sets iterate. When a pair is infeasible the group
    with the smaller standalone sharing gain is silenced and the channel is
    re-solved for the survivor. Groups silenced anywhere are returned as
    unassigned in the (possibly updated) assignment.
    """
    C = assignment.num_channels
    n0 = config.n0_watts
    bw = config.bandwidth_per_channel
    p_c = np.full(C, config.p_c_max_watts)
    p_g = np.zeros(assignment.num_groups)
    converged = [True] * C
    result = assignment

    for k in range(C):
        groups = result.groups_on(k)
        if not groups:
            continue
        if len(groups) == 1:
            g = groups[0]
            res = pair_power(pair_link_from(gains, k, g), config.gamma_cu,
                             config.gamma_rx, n0, config.p_c_max_watts,
                             config.p_g_max_watts, bw)
            p_c[k], p_g[g] = res.p_c, res.p_g
            if not res.feasible or res.p_g == 0.0:
                result = result.drop(g)
                p_g[g] = 0.0
        elif len(groups) == 2:
            g1, g2 = groups
            res = corner_search_gk2(triple_link_from(gains, k, g1, g2),
                                    config.gamma_cu, config.gamma_rx, config.gamma_rx,
                                    n0, config.p_c_max_watts, config.p_g_max_watts,
                                    config.p_g_max_watts, bw)
            if res.feasible:
                p_c[k], p_g[g1], p_g[g2] = res.p_c, res.p_g1, res.p_g2
            else:
                drop = g1 if (_standalone_gain(g1, k, gains, config)
                              <= _standalone_gain(g2, k, gains, config)) else g2
                keep = g2 if drop == g1 else g1
                result = result.drop(drop)
                pres = pair_power(pair_link_from(gains, k, keep), config.gamma_cu,
                                  config.gamma_rx, n0, config.p_c_max_watts,
                                  config.p_g_max_watts, bw)
                p_c[k], p_g[keep] = pres.p_c, pres.p_g
                if not pres.feasible or pres.p_g == 0.0:
                    result = result.drop(keep)
                    p_g[keep] = 0.0
        else:
            powers, pc_k, info = stim_channel(groups, k, gains, config)
            p_c[k] = pc_k
            for i, g in enumerate(groups):
                p_g[g] = powers[i]
            converged[k] = info.converged

    return PowerProfile(p_c, p_g, tuple(converged)), result
