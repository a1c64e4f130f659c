"""Command-line front end.

Verbs: validate, run, sweep, oracle, dump-assignment, dump-gains. Flags can
also come from D2DSIM_* environment variables (flag wins). Exit codes:
0 success, 1 usage/config error, 2 infeasibility flood (more than half of
the executed runs flagged unconverged or QoS-violating).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .allocation import POLICIES
from .config import ConfigError, ScenarioConfig, load_config
from .gains import sample_gains
from .harness import (Sweep, aggregate, flagged_fraction, rows_to_csv,
                      run_point, run_sweep)
from .matching import hungarian_match
from .metrics import max_power_profile, outage_probability
from .oracles import (brute_force_matching, corner_grid_search,
                      pair_grid_search, ppp_outage_mc, random_pair_instance,
                      random_triple_instance, stim_two_group_fixed_point)
from .power import allocate_powers, corner_search_gk2, pair_power, stim_channel
from .seeding import derive_seed, make_rng
from .topology import generate_topology


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _env(name: str, default=None):
    return os.environ.get(f"D2DSIM_{name.upper()}", default)


def _build_parser() -> _Parser:
    parser = _Parser(prog="d2dsim",
                     description="D2D multicast underlay spectrum-sharing simulator")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p, needs_config=True):
        p.add_argument("--config", default=_env("config"), required=needs_config
                       and _env("config") is None, help="scenario config file")
        p.add_argument("--out", default=_env("out", "."), help="output directory")
        p.add_argument("--seed", type=int,
                       default=None if _env("seed") is None else int(_env("seed")))
        p.add_argument("--policy", default=_env("policy", "interference_aware"),
                       choices=sorted(POLICIES))
        p.add_argument("--runs", type=int,
                       default=None if _env("runs") is None else int(_env("runs")))
        p.add_argument("--threads", type=int, default=int(_env("threads", "1")))

    common(sub.add_parser("validate", help="check a config file"))
    common(sub.add_parser("run", help="Monte Carlo runs of one scenario"))

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep")
    common(p_sweep)
    p_sweep.add_argument("--axis", required=True,
                         choices=["receivers_per_mg", "num_mgs", "geographic_spread",
                                  "cu_qos_threshold", "p_g_max"])
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated axis values")
    p_sweep.add_argument("--policies", default=None,
                         help="comma-separated policy list (default: --policy)")

    common(sub.add_parser("dump-assignment", help="write one run's sharing map"))
    common(sub.add_parser("dump-gains", help="write one channel realization"))

    p_oracle = sub.add_parser("oracle", help="run independent oracle comparisons")
    p_oracle.add_argument("subject", nargs="?", default="all",
                          choices=["hungarian", "pair", "corner", "outage",
                                   "stim", "all"])
    return parser


def _parse_values(raw: str):
    values = []
    for tok in raw.split(","):
        tok = tok.strip()
        if not tok:
            continue
        f = float(tok)
        values.append(int(f) if f.is_integer() else f)
    return tuple(values)


def _load(args) -> ScenarioConfig:
    config = load_config(args.config)
    if args.seed is not None:
        config = config.replace(rng_seed=args.seed)
    if args.runs is not None:
        config = config.replace(monte_carlo_runs=args.runs)
    return config


def _write(path: str, text: str):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _sig12(x: float) -> float:
    return float(f"{x:.12g}")


def _finish_rows(rows, config, csv_path, sidecar_path) -> int:
    _write(csv_path, rows_to_csv(rows, config))
    _write(sidecar_path, config.to_json() + "\n")
    print(f"wrote {csv_path}")
    for agg in aggregate(rows):
        print(f"  {agg.policy} @ {agg.axis_value}: "
              f"sum={agg.mean_sum:.4g} bps (std {agg.std_sum:.3g}), "
              f"assigned={agg.mean_assigned:.2f}, "
              f"violations={agg.qos_violations}, "
              f"unconverged={agg.convergence_failures}")
    frac = flagged_fraction(rows)
    if frac > 0.5:
        print(f"infeasibility flood: {frac:.0%} of runs flagged", file=sys.stderr)
        return 2
    return 0


def _cmd_validate(args) -> int:
    config = _load(args)
    print(f"config ok: C={config.num_cus} G={config.num_mgs} "
          f"R={config.cell_radius} m, hash={config.config_hash()}")
    return 0


def _cmd_run(args) -> int:
    config = _load(args)
    sweep = Sweep(axis="none", values=(0,), config=config,
                  policies=(args.policy,), runs_per_point=config.monte_carlo_runs,
                  base_seed=config.rng_seed)
    rows = run_sweep(sweep, threads=args.threads)
    base = os.path.join(args.out, f"run_{args.policy}")
    return _finish_rows(rows, config, base + ".csv", base + "_config.json")


def _cmd_sweep(args) -> int:
    config = _load(args)
    policies = tuple((args.policies or args.policy).split(","))
    runs = config.monte_carlo_runs if args.runs is None else args.runs
    sweep = Sweep(axis=args.axis, values=_parse_values(args.values), config=config,
                  policies=policies, runs_per_point=runs, base_seed=config.rng_seed)
    rows = run_sweep(sweep, threads=args.threads)
    base = os.path.join(args.out, f"sweep_{args.axis}")
    return _finish_rows(rows, config, base + ".csv", base + "_config.json")


def _cmd_dump_assignment(args) -> int:
    config = _load(args)
    seed = config.rng_seed
    allocator, power_controlled = POLICIES[args.policy]
    topology = generate_topology(config, derive_seed(seed, "topology"))
    gains = sample_gains(topology, config, derive_seed(seed, "gains"))
    assignment = allocator(topology, gains, config, derive_seed(seed, "alloc"))
    if power_controlled:
        powers, assignment = allocate_powers(assignment, gains, config)
    else:
        powers = max_power_profile(assignment, config)
    obj = {
        "config_hash": config.config_hash(),
        "assignment": json.loads(assignment.to_json()),
        "powers": json.loads(powers.to_json()),
    }
    path = os.path.join(args.out, f"assignment_{args.policy}_{seed}.json")
    _write(path, json.dumps(obj, indent=2) + "\n")
    print(f"wrote {path}")
    return 0


def _cmd_dump_gains(args) -> int:
    config = _load(args)
    seed = config.rng_seed
    topology = generate_topology(config, derive_seed(seed, "topology"))
    gains = sample_gains(topology, config, derive_seed(seed, "gains"))
    obj = {
        "config_hash": config.config_hash(),
        "cu_bs": [_sig12(x) for x in gains.cu_bs],
        "mg_bs": [[_sig12(x) for x in row] for row in gains.mg_bs],
        "mg_rx": [np.vectorize(_sig12)(a).tolist() for a in gains.mg_rx],
        "cu_rx": [np.vectorize(_sig12)(a).tolist() for a in gains.cu_rx],
    }
    path = os.path.join(args.out, f"gains_{seed}.json")
    _write(path, json.dumps(obj, indent=2) + "\n")
    print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------------------
# oracle comparisons (smoke scale; the acceptance suite runs the full sizes)
# ---------------------------------------------------------------------------

REFERENCE_MATCHING = [[1, 2, 3, 4, 5],
                      [6, 7, 8, 7, 2],
                      [1, 3, 4, 4, 5],
                      [3, 6, 2, 8, 7],
                      [4, 1, 3, 5, 4]]
REFERENCE_MATCHING_OPTIMUM = 28.0


def _oracle_hungarian() -> bool:
    _, total = hungarian_match(REFERENCE_MATCHING)
    ok = total == REFERENCE_MATCHING_OPTIMUM
    print(f"hungarian reference 5x5: total={total:g} "
          f"(expected {REFERENCE_MATCHING_OPTIMUM:g}) -> {'pass' if ok else 'FAIL'}")
    rng = make_rng(2024)
    mismatches = 0
    for _ in range(100):
        rows, cols = rng.integers(1, 7, size=2)
        w = rng.integers(0, 10, size=(rows, cols)).astype(float)
        _, total = hungarian_match(w)
        if abs(total - brute_force_matching(w)) > 1e-9:
            mismatches += 1
    print(f"hungarian vs permutation brute force (100 random): "
          f"{mismatches} mismatches -> {'pass' if mismatches == 0 else 'FAIL'}")
    return ok and mismatches == 0


def _oracle_pair() -> bool:
    rng = make_rng(7)
    n0, pmax, bw = 1e-12, 1.0, 1.0
    checked = failures = 0
    while checked < 50:
        link = random_pair_instance(rng)
        gamma_c, gamma_r = rng.uniform(1.0, 4.0, 2)
        best_grid, slack = pair_grid_search(link, gamma_c, gamma_r, n0, pmax,
                                            pmax, bw, steps=100)
        if best_grid is None:
            continue
        res = pair_power(link, gamma_c, gamma_r, n0, pmax, pmax, bw)
        checked += 1
        if not res.feasible or res.objective < best_grid - slack - 1e-9:
            failures += 1
    print(f"pair corner vs 100x100 grid (50 feasible): {failures} failures "
          f"-> {'pass' if failures == 0 else 'FAIL'}")
    return failures == 0


def _oracle_corner() -> bool:
    from .power import _triple_sinrs
    rng = make_rng(11)
    n0, pmax, bw = 1e-12, 1.0, 1.0
    checked = failures = 0
    while checked < 20:
        # targets drawn just under a random feasible point's SINRs: the vertex
        # search is exact only where the QoS constraints actually bind
        link = random_triple_instance(rng)
        p_star = 10.0 ** rng.uniform(-1.5, 0.0, 3)
        sinrs = _triple_sinrs(link, p_star, n0)
        u = rng.uniform(0.85, 0.99, 3)
        gam = tuple(ui * si for ui, si in zip(u, sinrs))
        best_grid, slack = corner_grid_search(link, *gam, n0, pmax, pmax, pmax,
                                              bw, steps=30)
        if best_grid is None:
            continue
        res = corner_search_gk2(link, *gam, n0, pmax, pmax, pmax, bw)
        checked += 1
        if not res.feasible or res.objective < best_grid - slack - 1e-9:
            failures += 1
    print(f"two-group corner vs 30^3 grid (20 binding-target instances): "
          f"{failures} failures -> {'pass' if failures == 0 else 'FAIL'}")
    return failures == 0


def _oracle_outage() -> bool:
    alpha, lam = 4.0, 1e-5
    worst = 0.0
    for d in (20.0, 40.0):
        closed = outage_probability(1.0, alpha, d, lam, lam, 1.0, 1.0)
        mc = ppp_outage_mc(1.0, alpha, d, lam, lam, 1.0, 1.0, 20000, seed=5)
        worst = max(worst, abs(closed - mc))
    ok = worst <= 0.03
    print(f"outage closed form vs Poisson-field MC (2e4 draws): max |diff|="
          f"{worst:.4f} -> {'pass' if ok else 'FAIL'}")
    return ok


def _oracle_stim() -> bool:
    from .config import ScenarioConfig
    from .gains import GainTable
    from .metrics import Assignment
    rng = make_rng(13)
    failures = checked = 0
    while checked < 20:
        link = random_triple_instance(rng, n_rx=1)
        gamma = 2.0
        config = ScenarioConfig(num_cus=1, num_mgs=2, receivers_per_mg=1,
                                sinr_threshold_rx=10.0 * np.log10(gamma),
                                interference_cap=1.0)
        fixed = stim_two_group_fixed_point(link, gamma, config.p_c_max_watts,
                                           config.n0_watts)
        if fixed is None or np.any(fixed > config.p_g_max_watts):
            continue
        gains = GainTable(
            cu_bs=np.array([link.h_cb]),
            mg_bs=np.array([[link.h_g1b], [link.h_g2b]]),
            mg_rx=(np.array([[[link.h_g1r1[0]]], [[link.h_g2r1[0]]]]),
                   np.array([[[link.h_g1r2[0]]], [[link.h_g2r2[0]]]])),
            cu_rx=(np.array([[link.h_cr1[0]]]), np.array([[link.h_cr2[0]]])))
        p, _, info = stim_channel([0, 1], 0, gains, config)
        checked += 1
        if not info.converged or np.max(np.abs(p - fixed) / fixed) > 1e-5:
            failures += 1
    print(f"iterative power control vs direct 2x2 solve (20 instances): "
          f"{failures} failures -> {'pass' if failures == 0 else 'FAIL'}")
    return failures == 0


def _cmd_oracle(args) -> int:
    checks = {
        "hungarian": _oracle_hungarian,
        "pair": _oracle_pair,
        "corner": _oracle_corner,
        "outage": _oracle_outage,
        "stim": _oracle_stim,
    }
    names = list(checks) if args.subject == "all" else [args.subject]
    ok = all(checks[name]() for name in names)
    print("oracle result:", "pass" if ok else "FAIL")
    return 0 if ok else 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.verb == "validate":
            return _cmd_validate(args)
        if args.verb == "run":
            return _cmd_run(args)
        if args.verb == "sweep":
            return _cmd_sweep(args)
        if args.verb == "dump-assignment":
            return _cmd_dump_assignment(args)
        if args.verb == "dump-gains":
            return _cmd_dump_gains(args)
        if args.verb == "oracle":
            return _cmd_oracle(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1
    raise AssertionError("unreachable verb")


if __name__ == "__main__":
    sys.exit(main())
