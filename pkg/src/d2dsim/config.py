"""Scenario configuration: parameter record, unit conversions, flat-file I/O.

All user-facing parameters keep the units they are quoted in (dBm, dB, m, Hz).
Conversion to linear scale happens once, through the *_watts / *_linear
accessors; everything downstream works in linear units.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass


def dbm_to_watts(x_dbm: float) -> float:
    return 10.0 ** ((x_dbm - 30.0) / 10.0)


def watts_to_dbm(x_w: float) -> float:
    return 10.0 * math.log10(x_w) + 30.0


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


class ConfigError(ValueError):
    """Raised for unparsable or invalid scenario configuration."""


@dataclass(frozen=True)
class ScenarioConfig:
    cell_radius: float = 500.0          # m
    num_cus: int = 3                    # C; also the number of uplink channels
    num_mgs: int = 3                    # G
    receivers_per_mg: int | tuple[int, ...] = 4
    geographic_spread: float = 50.0     # m, max MGTX->receiver distance
    pathloss_constant: float = 15.3     # dB (kappa)
    pathloss_exponent: float = 3.6      # alpha, valid range [2, 6]
    shadowing_std: float = 8.0          # dB
    noise_power: float = -114.0         # dBm per channel
    bandwidth_per_channel: float = 1e6  # Hz
    p_c_max: float = 30.0               # dBm
    p_g_max: float = 30.0               # dBm
    sinr_threshold_cu: float = 8.0      # dB, CU QoS SINR target
    sinr_threshold_rx: float = 20.0     # dB, multicast receiver SINR target
    outage_target: float = 0.0          # dB, SIR level defining an outage
    outage_prob_threshold: float = 0.1  # admission cap on outage probability
    gain_ratio_threshold: float = 10.0  # linear, mutual-interference gain-ratio gate
    interference_cap: float = 0.0       # W; <= 0 means derive from the CU QoS budget
    priority_group: int = 0             # group protected by the outage objective 1
    density_cu: float = 1e-5            # lambda_c, interferers per m^2
    density_mg: float = 1e-5            # lambda_g, interferers per m^2
    rng_seed: int = 1
    monte_carlo_runs: int = 100
    stim_epsilon: float = 1e-6          # relative power-change stopping tolerance
    stim_max_iters: int = 500
    cu_power_floor: float = 0.2         # W, lower clamp applied to the CU power

    def __post_init__(self):
        if self.cell_radius <= 0:
            raise ConfigError("cell_radius must be positive")
        if self.num_cus < 1:
            raise ConfigError("num_cus must be >= 1")
        if self.num_mgs < 0:
            raise ConfigError("num_mgs must be >= 0")
        if not 2.0 <= self.pathloss_exponent <= 6.0:
            raise ConfigError("pathloss_exponent must lie in [2, 6]")
        if self.geographic_spread >= self.cell_radius:
            raise ConfigError("geographic_spread must be smaller than cell_radius")
        if self.geographic_spread <= 0:
            raise ConfigError("geographic_spread must be positive")
        if not 0.0 < self.outage_prob_threshold < 1.0:
            raise ConfigError("outage_prob_threshold must lie in (0, 1)")
        if self.shadowing_std < 0:
            raise ConfigError("shadowing_std must be >= 0")
        if self.bandwidth_per_channel <= 0:
            raise ConfigError("bandwidth_per_channel must be positive")
        if self.monte_carlo_runs < 1:
            raise ConfigError("monte_carlo_runs must be >= 1")
        for u in self.receiver_counts():
            if u < 1:
                raise ConfigError("every group needs at least one receiver")

    def receiver_counts(self) -> tuple[int, ...]:
        """Receivers per group, expanded to one entry per group."""
        if isinstance(self.receivers_per_mg, int):
            return (self.receivers_per_mg,) * self.num_mgs
        counts = tuple(int(u) for u in self.receivers_per_mg)
        if len(counts) != self.num_mgs:
            raise ConfigError(
                f"receivers_per_mg lists {len(counts)} groups, expected {self.num_mgs}")
        return counts

    # -- linear-scale accessors ------------------------------------------

    @property
    def n0_watts(self) -> float:
        return dbm_to_watts(self.noise_power)

    @property
    def p_c_max_watts(self) -> float:
        return dbm_to_watts(self.p_c_max)

    @property
    def p_g_max_watts(self) -> float:
        return dbm_to_watts(self.p_g_max)

    @property
    def gamma_cu(self) -> float:
        """CU SINR target, linear."""
        return db_to_linear(self.sinr_threshold_cu)

    @property
    def gamma_rx(self) -> float:
        """Multicast receiver SINR target, linear."""
        return db_to_linear(self.sinr_threshold_rx)

    @property
    def gamma_outage(self) -> float:
        """Outage SIR level, linear."""
        return db_to_linear(self.outage_target)

    @property
    def r_c_min(self) -> float:
        """Minimum CU rate implied by the CU SINR target, bits/s."""
        return self.bandwidth_per_channel * math.log2(1.0 + self.gamma_cu)

    # -- serialization ----------------------------------------------------

    def replace(self, **kwargs) -> "ScenarioConfig":
        return dataclasses.replace(self, **kwargs)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        if isinstance(d["receivers_per_mg"], tuple):
            d["receivers_per_mg"] = list(d["receivers_per_mg"])
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def config_hash(self) -> str:
        """Short stable digest of the full parameter set, stamped into outputs."""
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]


_INT_FIELDS = {"num_cus", "num_mgs", "rng_seed", "monte_carlo_runs",
               "stim_max_iters", "priority_group"}
_FIELD_NAMES = {f.name for f in dataclasses.fields(ScenarioConfig)}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key == "receivers_per_mg":
        parts = [p for p in raw.replace(",", " ").split() if p]
        if len(parts) == 1:
            return int(parts[0])
        return tuple(int(p) for p in parts)
    if key in _INT_FIELDS:
        return int(raw)
    return float(raw)


def parse_config(text: str) -> ScenarioConfig:
    """Parse a flat `key = value` config; '#' starts a comment."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _FIELD_NAMES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _parse_value(key, raw)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from exc
    return ScenarioConfig(**values)


def load_config(path: str) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def format_config(config: ScenarioConfig) -> str:
    """Render a config as the flat `key = value` file format."""
    lines = []
    for f in dataclasses.fields(ScenarioConfig):
        v = getattr(config, f.name)
        if isinstance(v, tuple):
            v = ",".join(str(x) for x in v)
        lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"
