"""Radio channel model: log-distance pathloss, log-normal shadowing, Rayleigh fading.

Link gain in dB is  -(kappa + 10*alpha*log10(d)) - xi + 10*log10(F)  with
xi ~ Normal(0, sigma^2) and F ~ Exp(1) (Rayleigh power, unit mean). Shadowing
is drawn once per link per realization; fading is block fading, one draw per
link per channel. The dB value is converted to linear scale exactly once,
here; every consumer works with linear power gains.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ScenarioConfig
from .seeding import make_rng
from .topology import Topology

D_MIN = 1.0  # m; the log-distance model diverges at d -> 0


def pathloss_db(d, kappa: float, alpha: float):
    """Propagation loss in dB at distance d (meters, clamped to D_MIN)."""
    d = np.maximum(np.asarray(d, dtype=float), D_MIN)
    return kappa + 10.0 * alpha * np.log10(d)


@dataclass(frozen=True)
class GainTable:
    """Linear power gains for every link the system model uses.

    cu_bs[k]         gain of CU k to the base station on its own channel k
    mg_bs[g, k]      gain of MGTX g to the base station on channel k
    mg_rx[g][j, r, k] gain of MGTX j to receiver r of group g on channel k
                      (j == g is the group's own multicast link)
    cu_rx[g][k, r]   gain of CU k to receiver r of group g on channel k
    """
    cu_bs: np.ndarray
    mg_bs: np.ndarray
    mg_rx: tuple[np.ndarray, ...]
    cu_rx: tuple[np.ndarray, ...]

    @property
    def num_channels(self) -> int:
        return self.cu_bs.shape[0]

    @property
    def num_groups(self) -> int:
        return self.mg_bs.shape[0]

    @property
    def receiver_counts(self) -> tuple[int, ...]:
        return tuple(a.shape[1] for a in self.cu_rx)

    def own_gains(self, g: int, k: int) -> np.ndarray:
        """Gains from group g's transmitter to its own receivers, channel k."""
        return self.mg_rx[g][g, :, k]

    def cross_gains(self, j: int, g: int, k: int) -> np.ndarray:
        """Gains from MGTX j into group g's receivers, channel k."""
        return self.mg_rx[g][j, :, k]


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def sample_gains(topology: Topology, config: ScenarioConfig, seed: int,
                 with_shadowing: bool = True, with_fading: bool = True) -> GainTable:
    """Draw one channel realization for every link.

    Draw order is fixed (shadowing for all links, then fading per channel) so
    a given (topology, seed) always yields the same table. The with_* switches
    zero out the random terms for calibration and tests.
    """
    rng = make_rng(seed)
    kappa, alpha, sigma = (config.pathloss_constant, config.pathloss_exponent,
                           config.shadowing_std)
    C, G = topology.num_cus, topology.num_mgs
    u_counts = topology.receiver_counts

    d_cu_bs = np.linalg.norm(topology.cu_pos, axis=1)
    d_mg_bs = np.linalg.norm(topology.mgtx_pos, axis=1)
    d_mg_rx = [np.linalg.norm(topology.mgtx_pos[:, None, :] - topology.rx_pos[g][None, :, :],
                              axis=2) for g in range(G)]               # (G, U_g)
    d_cu_rx = [np.linalg.norm(topology.cu_pos[:, None, :] - topology.rx_pos[g][None, :, :],
                              axis=2) for g in range(G)]               # (C, U_g)

    def shadow(shape):
        if not with_shadowing or sigma == 0.0:
            return np.zeros(shape)
        return rng.normal(0.0, sigma, size=shape)

    sh_cu_bs = shadow(C)
    sh_mg_bs = shadow(G)
    sh_mg_rx = [shadow((G, u_counts[g])) for g in range(G)]
    sh_cu_rx = [shadow((C, u_counts[g])) for g in range(G)]

    def fading(shape):
        if not with_fading:
            return np.ones(shape)
        return rng.exponential(1.0, size=shape)

    f_cu_bs = fading(C)                                     # CU k only uses channel k
    f_mg_bs = fading((G, C))
    f_mg_rx = [fading((G, u_counts[g], C)) for g in range(G)]
    f_cu_rx = [fading((C, u_counts[g])) for g in range(G)]

    def linear(d, sh, f):
        gain_db = -pathloss_db(d, kappa, alpha) - sh
        return 10.0 ** (gain_db / 10.0) * f

    cu_bs = linear(d_cu_bs, sh_cu_bs, f_cu_bs)
    mg_bs = linear(d_mg_bs[:, None], sh_mg_bs[:, None], f_mg_bs)
    mg_rx = tuple(_freeze(linear(d_mg_rx[g][:, :, None], sh_mg_rx[g][:, :, None], f_mg_rx[g]))
                  for g in range(G))
    cu_rx = tuple(_freeze(linear(d_cu_rx[g], sh_cu_rx[g], f_cu_rx[g])) for g in range(G))
    return GainTable(_freeze(cu_bs), _freeze(mg_bs), mg_rx, cu_rx)
