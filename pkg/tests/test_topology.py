import numpy as np
import pytest

from d2dsim.config import ConfigError, ScenarioConfig
from d2dsim.topology import generate_topology


def test_zero_cus_rejected():
    with pytest.raises(ConfigError):
        ScenarioConfig(num_cus=0)


def test_no_groups_case():
    cfg = ScenarioConfig(cell_radius=500.0, num_cus=4, num_mgs=0)
    topo = generate_topology(cfg, seed=3)
    assert topo.num_mgs == 0
    assert topo.rx_pos == ()
    assert topo.cu_pos.shape == (4, 2)
    assert np.all(np.linalg.norm(topo.cu_pos, axis=1) <= 500.0)


def test_determinism():
    cfg = ScenarioConfig(cell_radius=500.0, num_cus=3, num_mgs=5)
    a = generate_topology(cfg, seed=42)
    b = generate_topology(cfg, seed=42)
    assert np.array_equal(a.cu_pos, b.cu_pos)
    assert np.array_equal(a.mgtx_pos, b.mgtx_pos)
    for ra, rb in zip(a.rx_pos, b.rx_pos):
        assert np.array_equal(ra, rb)
    c = generate_topology(cfg, seed=43)
    assert not np.array_equal(a.cu_pos, c.cu_pos)


def test_everything_in_cell_and_within_spread():
    cfg = ScenarioConfig(cell_radius=200.0, num_cus=6, num_mgs=8,
                         receivers_per_mg=6, geographic_spread=60.0)
    for seed in range(5):
        topo = generate_topology(cfg, seed)
        assert np.all(np.linalg.norm(topo.cu_pos, axis=1) <= 200.0)
        assert np.all(np.linalg.norm(topo.mgtx_pos, axis=1) <= 200.0)
        for g in range(8):
            # receivers stay in-cell even when the spread disc pokes out
            assert np.all(np.linalg.norm(topo.rx_pos[g], axis=1) <= 200.0 + 1e-9)
            d = np.linalg.norm(topo.rx_pos[g] - topo.mgtx_pos[g], axis=1)
            assert np.all(d <= 60.0 + 1e-9)
            assert topo.group_radius(g) == pytest.approx(d.max())


def test_uniformity_of_disc_sampling():
    # radius^2 of uniform-in-disc points is uniform on [0, R^2]
    cfg = ScenarioConfig(cell_radius=100.0, num_cus=4000, num_mgs=0)
    topo = generate_topology(cfg, seed=7)
    r2 = np.sum(topo.cu_pos ** 2, axis=1) / 100.0 ** 2
    hist, _ = np.histogram(r2, bins=10, range=(0, 1))
    assert hist.min() > 300 and hist.max() < 500
