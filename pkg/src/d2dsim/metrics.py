"""SINR, rate, throughput-gain, CU power threshold, bounds, and outage formulas.

All functions are pure and take linear-scale inputs (watts, linear gains,
linear SINR targets). Multicast group rate is set by its worst receiver.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .gains import GainTable


@dataclass(frozen=True)
class Assignment:
    """Channel-sharing map: each group uses at most one CU channel."""
    num_channels: int
    mg_channel: tuple  # per group: channel index or None

    @property
    def num_groups(self) -> int:
        return len(self.mg_channel)

    def groups_on(self, k: int) -> list:
        return [g for g, kk in enumerate(self.mg_channel) if kk == k]

    @property
    def unassigned(self) -> list:
        return [g for g, kk in enumerate(self.mg_channel) if kk is None]

    @property
    def assigned(self) -> list:
        return [g for g, kk in enumerate(self.mg_channel) if kk is not None]

    def a(self, g: int, k: int) -> int:
        """Binary sharing indicator."""
        return 1 if self.mg_channel[g] == k else 0

    def drop(self, g: int) -> "Assignment":
        """Copy with group g moved to the unassigned pool."""
        ch = list(self.mg_channel)
        ch[g] = None
        return Assignment(self.num_channels, tuple(ch))

    def to_json(self) -> str:
        """Per-channel sharing map with stable key order."""
        obj = {str(k): {"cu": k, "mgs": self.groups_on(k)}
               for k in range(self.num_channels)}
        obj["unassigned"] = self.unassigned
        return json.dumps(obj, indent=2)

    @staticmethod
    def from_groups(num_channels: int, num_groups: int,
                    groups_per_channel: dict) -> "Assignment":
        ch = [None] * num_groups
        for k, groups in groups_per_channel.items():
            for g in groups:
                if ch[g] is not None:
                    raise ValueError(f"group {g} assigned to two channels")
                ch[g] = k
        return Assignment(num_channels, tuple(ch))


@dataclass(frozen=True)
class PowerProfile:
    """Transmit powers in watts; converged flags are per channel."""
    p_c: np.ndarray
    p_g: np.ndarray
    converged: tuple = ()

    def all_converged(self) -> bool:
        return all(self.converged) if self.converged else True

    def to_json(self) -> str:
        def sig12(x):
            return float(f"{x:.12g}")
        obj = {
            "p_c_watts": [sig12(x) for x in self.p_c],
            "p_g_watts": [sig12(x) for x in self.p_g],
            "converged": [bool(c) for c in self.converged],
        }
        return json.dumps(obj, indent=2)


def max_power_profile(assignment: Assignment, config) -> PowerProfile:
    """Everybody at maximum power; unassigned groups stay silent."""
    p_c = np.full(assignment.num_channels, config.p_c_max_watts)
    p_g = np.where([k is not None for k in assignment.mg_channel],
                   config.p_g_max_watts, 0.0)
    return PowerProfile(p_c, p_g, (True,) * assignment.num_channels)


# -- CU side --------------------------------------------------------------

def sinr_cu(k: int, assignment: Assignment, powers: PowerProfile,
            gains: GainTable, n0: float) -> float:
    """Uplink SINR of CU k under the co-channel multicast interference."""
    interference = sum(powers.p_g[g] * gains.mg_bs[g, k] for g in assignment.groups_on(k))
    return powers.p_c[k] * gains.cu_bs[k] / (interference + n0)


def rate_from_sinr(sinr: float, bandwidth: float) -> float:
    return bandwidth * math.log2(1.0 + sinr)


def rate_cu(k, assignment, powers, gains, n0, bandwidth) -> float:
    return rate_from_sinr(sinr_cu(k, assignment, powers, gains, n0), bandwidth)


def rate_cu_solo(k, powers, gains, n0, bandwidth) -> float:
    """CU rate with no channel sharing at all."""
    return rate_from_sinr(powers.p_c[k] * gains.cu_bs[k] / n0, bandwidth)


# -- multicast side --------------------------------------------------------

def sinr_mg_receivers(g: int, k: int, assignment: Assignment, powers: PowerProfile,
                      gains: GainTable, n0: float) -> np.ndarray:
    """Per-receiver SINRs of group g on channel k."""
    own = powers.p_g[g] * gains.own_gains(g, k)
    interference = powers.p_c[k] * gains.cu_rx[g][k, :] + n0
    for j in assignment.groups_on(k):
        if j != g:
            interference = interference + powers.p_g[j] * gains.cross_gains(j, g, k)
    return own / interference


def sinr_mg_worst(g, k, assignment, powers, gains, n0) -> float:
    """Worst receiver SINR; it sets the group's multicast rate."""
    per_rx = sinr_mg_receivers(g, k, assignment, powers, gains, n0)
    if per_rx.size == 0:
        raise ValueError(f"group {g} has no receivers")
    return float(per_rx.min())


def rate_mg(g, k, assignment, powers, gains, n0, bandwidth) -> float:
    return rate_from_sinr(sinr_mg_worst(g, k, assignment, powers, gains, n0), bandwidth)


# -- sharing gain and CU power threshold ------------------------------------

def throughput_gain(k, assignment, powers, gains, n0, bandwidth):
    """Rate added by the channel's groups minus the CU rate they destroy.

    Returns (gain, cu_rate_loss); gain is sum of group rates minus the loss.
    """
    r_solo = rate_cu_solo(k, powers, gains, n0, bandwidth)
    r_shared = rate_cu(k, assignment, powers, gains, n0, bandwidth)
    loss = r_solo - r_shared
    mg_sum = sum(rate_mg(g, k, assignment, powers, gains, n0, bandwidth)
                 for g in assignment.groups_on(k))
    return mg_sum - loss, loss


def p_c_min(k, assignment, powers, gains, n0, bandwidth, r_min) -> float:
    """Smallest CU power that still reaches r_min against the current groups."""
    h_cb = gains.cu_bs[k]
    if h_cb == 0.0:
        raise ValueError(f"CU {k} uplink is blocked (zero gain)")
    interference = sum(powers.p_g[g] * gains.mg_bs[g, k] for g in assignment.groups_on(k))
    return (2.0 ** (r_min / bandwidth) - 1.0) * (n0 + interference) / h_cb


# -- interference-limited lower bound ---------------------------------------

@dataclass(frozen=True)
class InterferenceLimitedBound:
    """Interference-limited CU rate and its max-interference lower bound.

    Bandwidth is normalized to 1 (bits/s/Hz sums). `bound` replaces every
    group power by its maximum inside the per-channel interference sum and is
    a true lower bound, tight exactly when every sharing group transmits at
    maximum power. `bound_split_terms` additionally splits the log of the
    interference sum into a sum of per-group logs; it coincides with `bound`
    only on channels hosting a single group and is reported for reference.
    """
    il_rate: float
    bound: float
    bound_split_terms: float


def interference_limited_bound(assignment, powers, gains, pg_max) -> InterferenceLimitedBound:
    """Per-channel-sum CU rate ignoring noise, with its lower bound.

    Only channels actually shared by at least one group contribute.
    Raises on zero gains or zero powers (log of zero).
    """
    il = 0.0
    bound = 0.0
    split = 0.0
    for k in range(assignment.num_channels):
        groups = assignment.groups_on(k)
        if not groups:
            continue
        signal = powers.p_c[k] * gains.cu_bs[k]
        interf = sum(powers.p_g[g] * gains.mg_bs[g, k] for g in groups)
        interf_max = sum(pg_max * gains.mg_bs[g, k] for g in groups)
        if signal <= 0.0 or interf <= 0.0:
            raise ValueError("zero gain or power inside a log")
        il += math.log2(signal) - math.log2(interf)
        bound += math.log2(signal) - math.log2(interf_max)
        split += math.log2(signal) - sum(math.log2(pg_max * gains.mg_bs[g, k])
                                         for g in groups)
    return InterferenceLimitedBound(il, bound, split)


# -- outage probability ------------------------------------------------------

def outage_probability(gamma_o: float, alpha: float, d_gr: float,
                       lambda_c: float, lambda_g: float,
                       p_c: float, p_g: float) -> float:
    """Closed-form receiver outage probability under Poisson interferer fields.

    Pr(SIR <= gamma_o) for a receiver at distance d_gr from its transmitter,
    Rayleigh fading on every link, cellular interferers of density lambda_c
    at power p_c and multicast interferers of density lambda_g at power p_g.
    Requires alpha > 2 (the interference functional diverges otherwise).
    """
    if alpha <= 2.0:
        raise ValueError("outage formula requires pathloss exponent > 2")
    if gamma_o < 0 or d_gr < 0:
        raise ValueError("gamma_o and d_gr must be nonnegative")
    if p_g <= 0:
        return 1.0  # silent transmitter is always in outage
    chi = math.pi * math.gamma(1.0 + 2.0 / alpha) * math.gamma(1.0 - 2.0 / alpha)
    exponent = (chi * gamma_o ** (2.0 / alpha) * d_gr ** 2
                * (lambda_c * (p_c / p_g) ** (2.0 / alpha) + lambda_g))
    return 1.0 - math.exp(-exponent)
