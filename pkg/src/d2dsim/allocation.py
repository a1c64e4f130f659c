"""Channel allocation: which multicast groups share which CU uplink channel.

Two proposed policies (mutual-interference aware, outage aware with three
selection objectives) plus three reference baselines (random, bipartite
matching, greedy lowest-interference pairing). Gains are evaluated with all
transmitters at maximum power; the power allocation stage then adjusts
transmit powers on the chosen channels.
"""

from __future__ import annotations

import numpy as np

from .config import ScenarioConfig
from .gains import GainTable
from .matching import hungarian_match
from .metrics import (Assignment, PowerProfile, outage_probability, rate_cu,
                      rate_mg, throughput_gain)
from .power import interference_budget
from .seeding import make_rng
from .topology import Topology


def _max_power_singleton(g: int, k: int, gains: GainTable,
                         config: ScenarioConfig) -> tuple[Assignment, PowerProfile]:
    assignment = Assignment(gains.num_channels,
                            tuple(k if gg == g else None for gg in range(gains.num_groups)))
    powers = PowerProfile(np.full(gains.num_channels, config.p_c_max_watts),
                          np.where(np.arange(gains.num_groups) == g,
                                   config.p_g_max_watts, 0.0))
    return assignment, powers


def delta_r_matrix(gains: GainTable, config: ScenarioConfig) -> np.ndarray:
    """Sharing gain of each (group, channel) pair in isolation, max powers.

    Entry [g, k] is the group rate plus the CU rate under that single
    interferer minus the CU's interference-free rate.
    """
    G, C = gains.num_groups, gains.num_channels
    out = np.empty((G, C))
    for g in range(G):
        for k in range(C):
            assignment, powers = _max_power_singleton(g, k, gains, config)
            out[g, k], _ = throughput_gain(k, assignment, powers, gains,
                                           config.n0_watts,
                                           config.bandwidth_per_channel)
    return out


def pair_weight_matrix(gains: GainTable, config: ScenarioConfig) -> np.ndarray:
    """Achievable (CU + group) sum rate for every pairing, both at max power."""
    G, C = gains.num_groups, gains.num_channels
    w = np.empty((C, G))
    n0, bw = config.n0_watts, config.bandwidth_per_channel
    for g in range(G):
        for k in range(C):
            assignment, powers = _max_power_singleton(g, k, gains, config)
            w[k, g] = (rate_cu(k, assignment, powers, gains, n0, bw)
                       + rate_mg(g, k, assignment, powers, gains, n0, bw))
    return w


# ---------------------------------------------------------------------------
# interference-aware allocation
# ---------------------------------------------------------------------------

def _mutual_ratios(j: int, jp: int, k: int, gains: GainTable) -> tuple[float, float]:
    """Worst own-link/cross-link gain ratios between two groups on channel k,
    taken over each group's receivers (the victims), both directions."""
    v1 = float(np.min(gains.own_gains(j, k) / np.maximum(gains.cross_gains(jp, j, k), 1e-300)))
    v2 = float(np.min(gains.own_gains(jp, k) / np.maximum(gains.cross_gains(j, jp, k), 1e-300)))
    return v1, v2


def ia_allocate(gains: GainTable, config: ScenarioConfig) -> Assignment:
    """Admit groups channel by channel in decreasing sharing-gain order.

    Only groups whose standalone sharing gain on the channel is positive are
    candidates. A candidate joins the channel only if, against every group
    already admitted there, the own-to-cross gain ratio exceeds the
    configured threshold in both directions (worst receiver on each side).
    Groups that fit nowhere stay unassigned.
    """
    G, C = gains.num_groups, gains.num_channels
    channel_of = [None] * G
    if G == 0:
        return Assignment(C, ())
    gamma_th = config.gain_ratio_threshold
    delta = delta_r_matrix(gains, config)
    for k in range(C):
        order = sorted(range(G), key=lambda g: (-delta[g, k], g))
        admitted = []
        for g in order:
            if delta[g, k] <= 0.0 or channel_of[g] is not None:
                continue
            ok = True
            for jp in admitted:
                v1, v2 = _mutual_ratios(g, jp, k, gains)
                if not (v1 > gamma_th and v2 > gamma_th):
                    ok = False
                    break
            if ok:
                admitted.append(g)
                channel_of[g] = k
    return Assignment(C, tuple(channel_of))


# ---------------------------------------------------------------------------
# outage-aware allocation
# ---------------------------------------------------------------------------

def _responsive_cu_power(k: int, members, gains: GainTable,
                         config: ScenarioConfig) -> float:
    """Smallest CU power meeting the CU's rate target on channel k against
    the max-power interference of the given co-channel groups, capped at the
    CU's limit. This is the power the formula below should see: a loaded
    channel forces its CU to transmit harder."""
    h_cb = gains.cu_bs[k]
    if h_cb <= 0.0:
        return config.p_c_max_watts
    interference = sum(config.p_g_max_watts * gains.mg_bs[m, k] for m in members)
    p = config.gamma_cu * (config.n0_watts + interference) / h_cb
    return min(p, config.p_c_max_watts)


def outage_matrix(topology: Topology, gains: GainTable, config: ScenarioConfig,
                  members_per_channel: dict | None = None) -> np.ndarray:
    """Closed-form outage probability of each group on each channel.

    Group transmitters are taken at maximum power; the co-channel CU at its
    QoS-responsive power against the (optional) per-channel member load.
    """
    G, C = gains.num_groups, gains.num_channels
    p_g = config.p_g_max_watts
    out = np.empty((G, C))
    for k in range(C):
        members = (members_per_channel or {}).get(k, [])
        p_c = _responsive_cu_power(k, members, gains, config)
        for g in range(G):
            out[g, k] = outage_probability(config.gamma_outage,
                                           config.pathloss_exponent,
                                           topology.group_radius(g),
                                           config.density_cu, config.density_mg,
                                           p_c, p_g)
    return out


def oa_allocate(topology: Topology, gains: GainTable, config: ScenarioConfig,
                objective: int, outage: np.ndarray | None = None) -> Assignment:
    """Outage-gated admission with one of three channel-selection objectives.

    Outage probabilities are evaluated at maximum group power against the
    channel's QoS-responsive CU power, so a loaded channel looks worse to
    every joiner. A group may join a channel only while every member's
    post-join outage (its own included) stays below the configured
    threshold, so admission never pushes an earlier member into
    inadmissibility. Groups are placed in
    ascending order of their clean-channel outage; each tries channels ranked
    by the objective (1: outage of the configured priority group; 2: worst
    member outage after joining; 3: smallest increase of the summed outage)
    and lands on the first admissible one whose cumulative interference at
    the BS stays within the CU's budget. The interference sum uses the power
    each member will actually be capped to (the equal budget split, bounded
    by the power limit), matching the power-control stage that enforces the
    budget downstream; a max-power sum would reject nearly every group
    outright whenever the budget is derived from the CU's own rate target.
    Groups that fit nowhere stay unassigned.

    A pre-computed `outage` matrix (groups x channels) bypasses the formula
    and is used as-is, load-independent.
    """
    if objective not in (1, 2, 3):
        raise ValueError(f"unknown outage objective {objective}")
    G, C = gains.num_groups, gains.num_channels
    if G == 0:
        return Assignment(C, ())
    theta = config.outage_prob_threshold
    budgets = [interference_budget(k, gains, config) for k in range(C)]
    p_g = config.p_g_max_watts
    groups_on = {k: [] for k in range(C)}

    if outage is not None:
        static = np.asarray(outage)

        def outage_of(g, k, members):
            return float(static[g, k])
    else:
        radius = [topology.group_radius(g) for g in range(G)]

        def outage_of(g, k, members):
            p_c = _responsive_cu_power(k, members, gains, config)
            return outage_probability(config.gamma_outage, config.pathloss_exponent,
                                      radius[g], config.density_cu,
                                      config.density_mg, p_c, p_g)

    base = np.array([[outage_of(g, k, []) for k in range(C)] for g in range(G)])
    order = sorted(range(G), key=lambda g: (float(np.min(base[g])), g))
    if objective == 1 and config.priority_group in order:
        order.remove(config.priority_group)
        order.insert(0, config.priority_group)

    channel_of = [None] * G
    for g in order:
        def rank(k):
            joined = groups_on[k] + [g]
            own = outage_of(g, k, joined)
            if objective == 1:
                val = outage_of(config.priority_group, k, joined)
            elif objective == 2:
                val = max(outage_of(m, k, joined) for m in joined)
            else:
                # increase of the summed outage if g lands on channel k
                val = (sum(outage_of(m, k, joined) for m in joined)
                       - sum(outage_of(m, k, groups_on[k]) for m in groups_on[k]))
            return (val, own, k)

        for k in sorted(range(C), key=rank):
            joined = groups_on[k] + [g]
            if any(outage_of(m, k, joined) >= theta for m in joined):
                continue
            share = budgets[k] / len(joined)
            load = sum(min(p_g * gains.mg_bs[m, k], share) for m in joined)
            if load <= budgets[k] * (1.0 + 1e-12):
                groups_on[k].append(g)
                channel_of[g] = k
                break
    return Assignment(C, tuple(channel_of))


# ---------------------------------------------------------------------------
# baselines
# ---------------------------------------------------------------------------

def random_allocate(config: ScenarioConfig, seed: int,
                    num_groups: int | None = None) -> Assignment:
    """Uniformly pick min(C, G) groups and give each its own channel."""
    G = config.num_mgs if num_groups is None else num_groups
    C = config.num_cus
    rng = make_rng(seed)
    m = min(C, G)
    groups = rng.permutation(G)[:m]
    channels = rng.permutation(C)[:m]
    channel_of = [None] * G
    for g, k in zip(groups, channels):
        channel_of[g] = int(k)
    return Assignment(C, tuple(channel_of))


def bipartite_allocate(gains: GainTable, config: ScenarioConfig) -> Assignment:
    """Maximum-weight matching of groups to channels on pair sum rates."""
    G, C = gains.num_groups, gains.num_channels
    if G == 0:
        return Assignment(C, ())
    pairs, _ = hungarian_match(pair_weight_matrix(gains, config))
    channel_of = [None] * G
    for k, g in pairs:
        channel_of[g] = k
    return Assignment(C, tuple(channel_of))


def greedy_allocate(gains: GainTable, config: ScenarioConfig) -> Assignment:
    """Repeatedly pair the unmatched channel/group with the least CU-to-victim
    interference (strongest-hit receiver), lowest indices on ties."""
    G, C = gains.num_groups, gains.num_channels
    metric = np.empty((C, G))
    for g in range(G):
        metric[:, g] = np.max(gains.cu_rx[g], axis=1)
    channel_of = [None] * G
    free_k = set(range(C))
    free_g = set(range(G))
    while free_k and free_g:
        best = min(((metric[k, g], k, g) for k in free_k for g in free_g),
                   key=lambda t: (t[0], t[1], t[2]))
        _, k, g = best
        channel_of[g] = k
        free_k.remove(k)
        free_g.remove(g)
    return Assignment(C, tuple(channel_of))


# ---------------------------------------------------------------------------
# policy registry
# ---------------------------------------------------------------------------

def _ia(topology, gains, config, seed):
    return ia_allocate(gains, config)


def _oa(objective):
    def run(topology, gains, config, seed):
        return oa_allocate(topology, gains, config, objective)
    return run


def _random(topology, gains, config, seed):
    return random_allocate(config, seed, gains.num_groups)


def _bipartite(topology, gains, config, seed):
    return bipartite_allocate(gains, config)


def _greedy(topology, gains, config, seed):
    return greedy_allocate(gains, config)


# Baseline policies transmit at maximum power; proposed policies go through
# the power allocation stage.
POLICIES = {
    "interference_aware": (_ia, True),
    "outage_aware_obj1": (_oa(1), True),
    "outage_aware_obj2": (_oa(2), True),
    "outage_aware_obj3": (_oa(3), True),
    "random": (_random, False),
    "bipartite": (_bipartite, False),
    "greedy": (_greedy, False),
}
