"""Node placement inside a circular cell with the base station at the origin."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ScenarioConfig
from .seeding import make_rng


@dataclass(frozen=True)
class Topology:
    cell_radius: float
    cu_pos: np.ndarray                 # (C, 2)
    mgtx_pos: np.ndarray               # (G, 2)
    rx_pos: tuple[np.ndarray, ...]     # per group: (U_g, 2)

    @property
    def num_cus(self) -> int:
        return self.cu_pos.shape[0]

    @property
    def num_mgs(self) -> int:
        return self.mgtx_pos.shape[0]

    @property
    def receiver_counts(self) -> tuple[int, ...]:
        return tuple(r.shape[0] for r in self.rx_pos)

    def group_radius(self, g: int) -> float:
        """Largest MGTX->receiver distance in group g (its geographic extent)."""
        return float(np.max(np.linalg.norm(self.rx_pos[g] - self.mgtx_pos[g], axis=1)))


def _uniform_disc(rng: np.random.Generator, n: int, radius: float,
                  center=(0.0, 0.0)) -> np.ndarray:
    r = radius * np.sqrt(rng.random(n))
    theta = 2.0 * np.pi * rng.random(n)
    return np.column_stack((r * np.cos(theta), r * np.sin(theta))) + np.asarray(center)


def generate_topology(config: ScenarioConfig, seed: int) -> Topology:
    """Drop CUs, MGTXs and their receivers uniformly inside the cell.

    Receivers are uniform in a disc of radius `geographic_spread` around their
    MGTX; draws falling outside the cell are rejected and redrawn so every
    node stays in-cell.
    """
    rng = make_rng(seed)
    radius = config.cell_radius
    cu_pos = _uniform_disc(rng, config.num_cus, radius)
    mgtx_pos = _uniform_disc(rng, config.num_mgs, radius)
    rx_pos = []
    for g, u_g in enumerate(config.receiver_counts()):
        pts = np.empty((u_g, 2))
        for r in range(u_g):
            while True:
                p = _uniform_disc(rng, 1, config.geographic_spread, mgtx_pos[g])[0]
                if p[0] * p[0] + p[1] * p[1] <= radius * radius:
                    pts[r] = p
                    break
        pts.setflags(write=False)
        rx_pos.append(pts)
    cu_pos.setflags(write=False)
    mgtx_pos.setflags(write=False)
    return Topology(radius, cu_pos, mgtx_pos, tuple(rx_pos))
