"""Monte Carlo experiment engine: seeded runs, parameter sweeps, CSV output.

A run is a pure function of (config, policy, seed): topology, one channel
realization, channel allocation, power allocation, metrics. Sweeps fan out
over (policy, axis value, run index) with per-run seeds derived by a stable
mix, so aggregates do not depend on execution order or worker count.

Reported throughput counts delivered multicast traffic: a group serving U
receivers at worst-user rate R contributes U * R. CU rates count once.
"""

from __future__ import annotations

import concurrent.futures
import io
import statistics
from dataclasses import dataclass

from .allocation import POLICIES
from .config import ScenarioConfig
from .gains import sample_gains
from .metrics import max_power_profile, rate_cu, rate_mg
from .power import allocate_powers
from .seeding import derive_seed
from .topology import generate_topology

CSV_HEADER = ("policy,axis,axis_value,run_seed,sum_throughput_bps,"
              "cu_throughput_bps,mg_throughput_bps,assigned_mgs,"
              "qos_violations,converged")

SWEEP_AXES = {
    "receivers_per_mg": "receivers_per_mg",
    "num_mgs": "num_mgs",
    "geographic_spread": "geographic_spread",
    "cu_qos_threshold": "sinr_threshold_cu",
    "p_g_max": "p_g_max",
}


@dataclass(frozen=True)
class PointMetrics:
    sum_throughput: float
    cu_throughput: float
    mg_throughput: float
    assigned_mgs: int
    qos_violations: int
    converged: bool

    @property
    def flagged(self) -> bool:
        return (not self.converged) or self.qos_violations > 0


def apply_axis(config: ScenarioConfig, axis: str, value) -> ScenarioConfig:
    if axis not in SWEEP_AXES:
        raise ValueError(f"unknown sweep axis {axis!r} (choose from {sorted(SWEEP_AXES)})")
    field_name = SWEEP_AXES[axis]
    if field_name in ("num_mgs", "receivers_per_mg"):
        value = int(value)
    return config.replace(**{field_name: value})


def run_point(config: ScenarioConfig, policy: str, seed: int) -> PointMetrics:
    """One full pipeline evaluation; deterministic in (config, policy, seed)."""
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r} (choose from {sorted(POLICIES)})")
    allocator, power_controlled = POLICIES[policy]
    topology = generate_topology(config, derive_seed(seed, "topology"))
    gains = sample_gains(topology, config, derive_seed(seed, "gains"))
    assignment = allocator(topology, gains, config, derive_seed(seed, "alloc"))
    if power_controlled:
        powers, assignment = allocate_powers(assignment, gains, config)
    else:
        powers = max_power_profile(assignment, config)

    n0, bw = config.n0_watts, config.bandwidth_per_channel
    r_min = config.r_c_min
    u_counts = gains.receiver_counts
    cu_total = 0.0
    mg_total = 0.0
    violations = 0
    assigned = 0
    for k in range(config.num_cus):
        r_c = rate_cu(k, assignment, powers, gains, n0, bw)
        cu_total += r_c
        if r_c < r_min * (1.0 - 1e-9):
            violations += 1
        for g in assignment.groups_on(k):
            if powers.p_g[g] <= 0.0:
                continue
            assigned += 1
            mg_total += u_counts[g] * rate_mg(g, k, assignment, powers, gains, n0, bw)
    return PointMetrics(cu_total + mg_total, cu_total, mg_total, assigned,
                        violations, powers.all_converged())


@dataclass(frozen=True)
class Sweep:
    axis: str
    values: tuple
    config: ScenarioConfig
    policies: tuple[str, ...]
    runs_per_point: int = 100
    base_seed: int = 1

    def __post_init__(self):
        if not self.values:
            raise ValueError("sweep needs at least one axis value")
        if self.runs_per_point < 1:
            raise ValueError("runs_per_point must be >= 1")
        for p in self.policies:
            if p not in POLICIES:
                raise ValueError(f"unknown policy {p!r}")


@dataclass(frozen=True)
class RunRow:
    policy: str
    axis: str
    axis_value: object
    run_seed: int
    metrics: PointMetrics

    def as_csv(self) -> str:
        m = self.metrics
        return ",".join([
            self.policy, self.axis, repr(self.axis_value), str(self.run_seed),
            repr(m.sum_throughput), repr(m.cu_throughput), repr(m.mg_throughput),
            str(m.assigned_mgs), str(m.qos_violations), str(int(m.converged)),
        ])


@dataclass(frozen=True)
class AggregateRow:
    policy: str
    axis_value: object
    mean_sum: float
    std_sum: float
    mean_cu: float
    mean_mg: float
    mean_assigned: float
    qos_violations: int
    convergence_failures: int


def sweep_seed(base_seed: int, policy: str, axis: str, value, run: int) -> int:
    """Per-run seed: stable mix of the sweep coordinates (see seeding.py)."""
    return derive_seed(base_seed, policy, axis, repr(value), run)


def _run_task(args) -> RunRow:
    config, policy, axis, value, run = args
    seed = sweep_seed(config.rng_seed, policy, axis, value, run)
    point_config = apply_axis(config, axis, value) if axis != "none" else config
    return RunRow(policy, axis, value, seed, run_point(point_config, policy, seed))


def run_sweep(sweep: Sweep, threads: int = 1) -> list[RunRow]:
    """Evaluate the whole (policy x value x run) grid; rows in stable order."""
    tasks = [(sweep.config.replace(rng_seed=sweep.base_seed), policy, sweep.axis,
              value, run)
             for policy in sweep.policies
             for value in sweep.values
             for run in range(sweep.runs_per_point)]
    if threads <= 1:
        return [_run_task(t) for t in tasks]
    with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_run_task, tasks, chunksize=8))


def aggregate(rows: list[RunRow]) -> list[AggregateRow]:
    """Order-independent reduction to per-(policy, value) statistics."""
    buckets: dict = {}
    order = []
    for row in rows:
        key = (row.policy, repr(row.axis_value))
        if key not in buckets:
            buckets[key] = []
            order.append((key, row.axis_value))
        buckets[key].append(row.metrics)
    out = []
    for key, value in order:
        ms = buckets[key]
        sums = [m.sum_throughput for m in ms]
        out.append(AggregateRow(
            policy=key[0], axis_value=value,
            mean_sum=statistics.fmean(sums),
            std_sum=statistics.pstdev(sums) if len(sums) > 1 else 0.0,
            mean_cu=statistics.fmean(m.cu_throughput for m in ms),
            mean_mg=statistics.fmean(m.mg_throughput for m in ms),
            mean_assigned=statistics.fmean(m.assigned_mgs for m in ms),
            qos_violations=sum(m.qos_violations > 0 for m in ms),
            convergence_failures=sum(not m.converged for m in ms)))
    return out


def rows_to_csv(rows: list[RunRow], config: ScenarioConfig) -> str:
    """CSV text with the config digest on a leading comment line."""
    buf = io.StringIO()
    buf.write(f"# config_hash={config.config_hash()}\n")
    buf.write(CSV_HEADER + "\n")
    for row in rows:
        buf.write(row.as_csv() + "\n")
    return buf.getvalue()


def flagged_fraction(rows: list[RunRow]) -> float:
    if not rows:
        return 0.0
    return sum(r.metrics.flagged for r in rows) / len(rows)
