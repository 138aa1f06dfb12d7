"""Command-line front end: solve, experiment, oracle-compare, selftest."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="secrelay",
        description="Max-min secrecy beamforming for two-way relay networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="optimize one seeded realization")
    solve.add_argument("--seed", type=int, required=True)
    solve.add_argument("--n", type=int, default=4, help="relay antenna count")
    solve.add_argument("--pt-dbw", type=float, default=20.0, help="total power")
    solve.add_argument("--grid", type=int, default=100)
    solve.add_argument(
        "--config", type=str, default=None, help="JSON SystemConfig overrides"
    )
    solve.add_argument("--out", type=str, default=None, help="JSON report path")

    experiment = sub.add_parser("experiment", help="run a figure preset sweep")
    experiment.add_argument(
        "--preset", choices=("fig3", "fig4", "fig5", "fig6"), required=True
    )
    experiment.add_argument("--realizations", type=int, default=50)
    experiment.add_argument("--grid", type=int, default=100)
    experiment.add_argument("--seed", type=int, default=0)
    experiment.add_argument("--out", type=str, default=None, help="CSV path")
    experiment.add_argument("--workers", type=int, default=1)
    experiment.add_argument(
        "--plot", action="store_true", help="also render the preset SVG"
    )

    compare = sub.add_parser(
        "oracle-compare", help="optimizer vs brute-force oracle"
    )
    compare.add_argument("--n", type=int, default=2)
    compare.add_argument("--realizations", type=int, default=20)
    compare.add_argument("--pt-dbw", type=float, default=20.0)
    compare.add_argument("--grid", type=int, default=100)
    compare.add_argument("--budget", type=int, default=60_000)
    compare.add_argument("--restarts", type=int, default=16)
    compare.add_argument("--seed", type=int, default=0)

    sub.add_parser("selftest", help="run the built-in property battery")
    return parser


def _cmd_solve(args) -> int:
    from .channel import (
        SystemConfig,
        config_from_dict,
        config_to_dict,
        power_split_from_total,
    )
    from .experiments import solve_single

    p1, p2, p_relay = power_split_from_total(args.pt_dbw)
    cfg = SystemConfig(n_antennas=args.n, p1=p1, p2=p2, p_relay=p_relay)
    if args.config is not None:
        with open(args.config) as handle:
            overrides = json.load(handle)
        cfg = config_from_dict({**config_to_dict(cfg), **overrides})
    report = solve_single(cfg, args.seed, grid_points=args.grid)
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out is not None:
        with open(args.out, "w") as handle:
            handle.write(text + "\n")
        print(f"wrote {args.out}")
    else:
        print(text)
    return 0


def _cmd_experiment(args) -> int:
    from .experiments import run_experiment, spec_for_preset

    out_csv = args.out if args.out is not None else f"{args.preset}.csv"
    spec = spec_for_preset(
        args.preset,
        realizations=args.realizations,
        grid_points=args.grid,
        master_seed=args.seed,
        out_csv=out_csv,
        workers=args.workers,
    )
    summary = run_experiment(spec)
    for failure in summary.failures:
        print(f"failed realization: {failure}", file=sys.stderr)
    if not summary.rows:
        print("no realizations succeeded", file=sys.stderr)
        return 1
    print(f"wrote {out_csv} ({len(summary.rows)} rows)")
    for (variant, n, sweep), (mean_q, mean_bound) in sorted(summary.means.items()):
        print(
            f"  {variant:>10s} N={n} sweep={sweep:5.1f} dBW  "
            f"mean achieved={mean_q:.4f}  mean bound={mean_bound:.4f}"
        )
    if args.plot:
        from .plotting import emit_plot

        svg = emit_plot(out_csv, args.preset)
        print(f"wrote {svg}")
    return 0


def _cmd_oracle_compare(args) -> int:
    from .experiments import run_oracle_compare

    comparison = run_oracle_compare(
        n=args.n,
        realizations=args.realizations,
        pt_dbw=args.pt_dbw,
        grid_points=args.grid,
        budget=args.budget,
        restarts=args.restarts,
        master_seed=args.seed,
    )
    for row in comparison["rows"]:
        print(
            f"realization {row['realization']:3d}  "
            f"achieved={row['achieved_q']:.6f}  oracle={row['oracle_q']:.6f}  "
            f"ratio={row['ratio']:.4f}"
        )
    print(
        f"worst ratio {comparison['worst_ratio']:.4f}, "
        f"median gap {comparison['median_gap']:.3e}"
    )
    return 0


def _selftest_checks():
    """Reduced-scale battery mirroring the property suite.

    Each check returns silently or raises AssertionError; the full pytest
    suite remains the authoritative gate.
    """
    from .channel import SystemConfig, sample_channel
    from .experiments import run_oracle_compare
    from .nullspace import (
        beamformer_from_coeffs,
        build_constraint_matrix,
        null_basis,
        nulling_residuals,
    )
    from .optimizer import optimize
    from .oracle import brute_force_maxmin
    from .quadforms import build_problem_matrices, kron_identity_check, quad_form
    from .rates import (
        asr_bounds,
        end_to_end_rate_check,
        minimax_value,
        mi_x1_eve_closed,
        mi_x1_eve_det,
        mi_x2_eve_closed,
        mi_x2_eve_det,
    )

    cfg = SystemConfig(n_antennas=3, p1=25.0, p2=25.0, p_relay=50.0)
    ch = sample_channel(cfg, 0)
    basis = null_basis(build_constraint_matrix(ch))
    pm = build_problem_matrices(cfg, ch, basis)
    rng = np.random.default_rng(7)

    def random_c():
        return rng.standard_normal(pm.m) + 1j * rng.standard_normal(pm.m)

    def check_vectorization():
        for _ in range(20):
            residuals = kron_identity_check(ch, basis, random_c())
            assert max(residuals) <= 1e-10, residuals

    def check_rate_identities():
        for _ in range(10):
            residuals = end_to_end_rate_check(random_c(), basis, ch, cfg)
            assert max(residuals) <= 1e-8, residuals

    def check_leakage_oracle():
        w_any = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        d2 = abs(mi_x2_eve_closed(w_any, ch, cfg) - mi_x2_eve_det(w_any, ch, cfg))
        d1 = abs(mi_x1_eve_closed(w_any, ch, cfg) - mi_x1_eve_det(w_any, ch, cfg))
        assert max(d1, d2) <= 1e-8, (d1, d2)

    def check_case_law():
        for _ in range(200):
            c = random_c()
            q, tag = minimax_value(c, pm, cfg)
            bounds = asr_bounds(c, pm, cfg)
            assert abs(q - min(bounds.r1_up, bounds.r2_up, bounds.r3)) <= 1e-12
            assert tag in ("A", "B", "C")

    def check_relay_power_identity():
        n = cfg.n_antennas
        q_r = (
            cfg.p1 * np.outer(ch.f1, ch.f1.conj())
            + cfg.p2 * np.outer(ch.f2, ch.f2.conj())
            + cfg.sigma2_relay * np.eye(n)
        )
        for _ in range(10):
            c = random_c()
            w_mat = beamformer_from_coeffs(basis, c)
            direct = float(np.real(np.trace(w_mat @ q_r @ w_mat.conj().T)))
            assert abs(quad_form(c, pm.omega_r) - direct) <= 1e-10 * max(direct, 1.0)

    def check_counter_law():
        result = optimize(ch, cfg, grid_points=5)
        spec_buckets = (
            result.counters["sdp_solves_sub1"]
            + result.counters["sdp_solves_sub2"]
            + result.counters["sdp_solves_sub3"]
            + result.counters["bound_solves"]
        )
        assert spec_buckets == 3 + 2 * 5 + 5 * 5, result.counters

    def check_dominance_and_feasibility():
        for seed in (0, 1):
            cfg2 = SystemConfig(n_antennas=2, p1=25.0, p2=25.0, p_relay=50.0)
            ch2 = sample_channel(cfg2, seed)
            basis2 = null_basis(build_constraint_matrix(ch2))
            pm2 = build_problem_matrices(cfg2, ch2, basis2)
            result = optimize(ch2, cfg2, grid_points=8)
            for cand in result.all_candidates:
                assert cand.achieved_q <= cand.sdr_bound + 1e-6
                assert quad_form(cand.c, pm2.omega_r) <= cfg2.p_relay * (1 + 1e-9)
                w_mat = beamformer_from_coeffs(basis2, cand.c)
                res1, res2 = nulling_residuals(w_mat, ch2)
                scale = (
                    np.linalg.norm(ch2.fe)
                    * max(np.linalg.norm(ch2.f1), np.linalg.norm(ch2.f2))
                    * max(np.linalg.norm(w_mat), 1e-30)
                )
                assert max(res1, res2) <= 1e-9 * scale

    def check_oracle_agreement():
        comparison = run_oracle_compare(
            n=2, realizations=2, grid_points=40, budget=8_000, restarts=6
        )
        assert comparison["worst_ratio"] >= 0.9, comparison["worst_ratio"]

    return (
        ("vectorization identities", check_vectorization),
        ("rate-bound identities", check_rate_identities),
        ("leakage determinant oracle", check_leakage_oracle),
        ("minimax case law", check_case_law),
        ("relay power identity", check_relay_power_identity),
        ("solver counter law", check_counter_law),
        ("dominance and feasibility", check_dominance_and_feasibility),
        ("oracle agreement", check_oracle_agreement),
    )


def _cmd_selftest(_args) -> int:
    failed = 0
    for name, check in _selftest_checks():
        try:
            check()
        except Exception as exc:
            failed += 1
            print(f"FAIL {name}: {exc!r}")
        else:
            print(f"ok   {name}")
    if failed:
        print(f"{failed} check(s) failed")
        return 1
    print("all checks passed")
    return 0


_COMMANDS = {
    "solve": _cmd_solve,
    "experiment": _cmd_experiment,
    "oracle-compare": _cmd_oracle_compare,
    "selftest": _cmd_selftest,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
