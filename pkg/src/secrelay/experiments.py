"""Monte Carlo experiment presets, CSV emission, and single-shot reports.

Each preset sweeps a power variable over a set of antenna counts or
variance settings, averaging the optimized rate over seeded channel
realizations. Realization seeds derive from (master seed, antenna count,
realization index) and deliberately exclude the sweep value and variance
variant, so every sweep point of a curve sees the same channel draws;
paired sampling removes most of the Monte Carlo noise from the trend
comparisons, and variance variants scale the identical underlying draw.

Rows are emitted in deterministic task order whether the realizations run
serially or across worker processes, so reruns of the same spec produce
identical CSV output except for the wall-time column.
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from .channel import (
    SystemConfig,
    channel_to_dict,
    config_to_dict,
    dbw_to_watts,
    power_split_from_total,
    sample_channel,
    _decode_cvector,
    _encode_cvector,
)
from .nullspace import (
    beamformer_from_coeffs,
    build_constraint_matrix,
    null_basis,
    nulling_residuals,
)
from .optimizer import optimize
from .oracle import brute_force_maxmin
from .quadforms import build_problem_matrices, quad_form
from .rates import asr_bounds

__all__ = [
    "VarianceVariant",
    "BENCHMARK",
    "FIG5_VARIANTS",
    "ExperimentSpec",
    "ExperimentRow",
    "ExperimentSummary",
    "spec_for_preset",
    "run_experiment",
    "solve_single",
    "report_coefficients",
    "run_oracle_compare",
]


@dataclass(frozen=True)
class VarianceVariant:
    """Named set of channel-variance overrides applied on the base config."""

    name: str
    overrides: tuple[tuple[str, float], ...] = ()


BENCHMARK = VarianceVariant("benchmark")

# All-unit benchmark, both-sided raises of the relay-hop and direct-tap
# variances, and one single-sided raise of each family.
FIG5_VARIANTS = (
    BENCHMARK,
    VarianceVariant("f_up", (("var_f1", 4.0), ("var_f2", 4.0))),
    VarianceVariant("g_up", (("var_g1", 4.0), ("var_g2", 4.0))),
    VarianceVariant("f1_up", (("var_f1", 4.0),)),
    VarianceVariant("g1_up", (("var_g1", 4.0),)),
)

_PRESETS = ("fig3", "fig4", "fig5", "fig6", "single", "oracle-compare", "selftest")


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment: preset geometry, sweep, and reproducibility knobs."""

    preset: str
    n_antennas: tuple[int, ...]
    sweep_dbw: tuple[float, ...]
    realizations: int
    grid_points: int = 100
    variants: tuple[VarianceVariant, ...] = (BENCHMARK,)
    master_seed: int = 0
    out_csv: str | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        if self.preset not in _PRESETS:
            raise ValueError(f"unknown preset {self.preset!r}")
        if self.realizations < 1:
            raise ValueError(f"realizations must be >= 1, got {self.realizations}")
        if not self.n_antennas:
            raise ValueError("n_antennas sweep must be non-empty")
        if not self.sweep_dbw:
            raise ValueError("power sweep must be non-empty")
        if not self.variants:
            raise ValueError("variants must be non-empty")
        if self.grid_points < 1:
            raise ValueError(f"grid_points must be >= 1, got {self.grid_points}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")


@dataclass(frozen=True)
class ExperimentRow:
    """One optimized realization; column order is the CSV contract."""

    preset: str
    variant: str
    n_antennas: int
    sweep_dbw: float
    realization: int
    achieved_q: float
    sdr_bound: float
    winner: str
    case_tag: str
    rank_ratio: float
    solves_sub1: int
    solves_sub2: int
    solves_sub3: int
    solves_bounds: int
    refine_solves: int
    wall_time_s: float

    def __post_init__(self) -> None:
        if self.achieved_q > self.sdr_bound + 1e-6:
            raise ValueError(
                f"row violates relaxation dominance: "
                f"{self.achieved_q} > {self.sdr_bound} + 1e-6"
            )


@dataclass(frozen=True)
class ExperimentSummary:
    """Rows plus per-cell means keyed by (variant, n_antennas, sweep_dbw)."""

    spec: ExperimentSpec
    rows: tuple[ExperimentRow, ...]
    means: dict[tuple[str, int, float], tuple[float, float]]
    failures: tuple[str, ...]
    csv_path: str | None


def spec_for_preset(
    preset: str,
    realizations: int = 50,
    grid_points: int = 100,
    master_seed: int = 0,
    out_csv: str | None = None,
    workers: int = 1,
) -> ExperimentSpec:
    """Figure-preset geometry with adjustable scale knobs."""
    common = dict(
        realizations=realizations,
        grid_points=grid_points,
        master_seed=master_seed,
        out_csv=out_csv,
        workers=workers,
    )
    if preset in ("fig3", "fig4"):
        return ExperimentSpec(
            preset=preset,
            n_antennas=(3, 4, 5),
            sweep_dbw=(5.0, 10.0, 15.0, 20.0),
            **common,
        )
    if preset == "fig5":
        return ExperimentSpec(
            preset=preset,
            n_antennas=(3,),
            sweep_dbw=(5.0, 10.0, 15.0, 20.0),
            variants=FIG5_VARIANTS,
            **common,
        )
    if preset == "fig6":
        return ExperimentSpec(
            preset=preset,
            n_antennas=(3,),
            sweep_dbw=(0.0, 5.0, 10.0, 15.0, 20.0),
            **common,
        )
    raise ValueError(f"no figure geometry for preset {preset!r}")


def cell_config(
    preset: str, variant: VarianceVariant, n: int, sweep_dbw: float
) -> SystemConfig:
    """Powers for one sweep point.

    The total-power presets split P_T as P1 = P2 = P_T/4 and P_R = P_T/2;
    the source-power preset sweeps P1 against fixed P_R = 20 dBW and
    P2 = 15 dBW.
    """
    if preset == "fig6":
        p1 = dbw_to_watts(sweep_dbw)
        p2 = dbw_to_watts(15.0)
        p_relay = dbw_to_watts(20.0)
    else:
        p1, p2, p_relay = power_split_from_total(sweep_dbw)
    return SystemConfig(
        n_antennas=n, p1=p1, p2=p2, p_relay=p_relay, **dict(variant.overrides)
    )


def realization_seed(master_seed: int, n: int, realization: int) -> int:
    """Stable per-draw seed; sweep value and variant excluded by design."""
    ss = np.random.SeedSequence([master_seed, n, realization])
    return int(ss.generate_state(1)[0])


def _run_task(task) -> ExperimentRow | str:
    preset, variant_name, overrides, n, sweep_dbw, realization, grid_points, seed = task
    variant = VarianceVariant(variant_name, overrides)
    try:
        cfg = cell_config(preset, variant, n, sweep_dbw)
        ch = sample_channel(cfg, seed)
        started = time.perf_counter()
        result = optimize(ch, cfg, grid_points=grid_points)
        wall = time.perf_counter() - started
        best = result.best
        return ExperimentRow(
            preset=preset,
            variant=variant_name,
            n_antennas=n,
            sweep_dbw=sweep_dbw,
            realization=realization,
            achieved_q=best.achieved_q,
            sdr_bound=best.sdr_bound,
            winner=best.source,
            case_tag=best.exact_case,
            rank_ratio=best.rank_ratio,
            solves_sub1=result.counters["sdp_solves_sub1"],
            solves_sub2=result.counters["sdp_solves_sub2"],
            solves_sub3=result.counters["sdp_solves_sub3"],
            solves_bounds=result.counters["bound_solves"],
            refine_solves=result.counters["refine_solves"],
            wall_time_s=wall,
        )
    except Exception as exc:  # recorded, never fatal to the sweep
        return (
            f"{preset}/{variant_name} N={n} sweep={sweep_dbw} "
            f"realization={realization}: {exc!r}"
        )


def _tasks(spec: ExperimentSpec) -> list[tuple]:
    tasks = []
    for variant in spec.variants:
        for n in spec.n_antennas:
            for sweep_dbw in spec.sweep_dbw:
                for realization in range(spec.realizations):
                    tasks.append(
                        (
                            spec.preset,
                            variant.name,
                            variant.overrides,
                            n,
                            sweep_dbw,
                            realization,
                            spec.grid_points,
                            realization_seed(spec.master_seed, n, realization),
                        )
                    )
    return tasks


def _write_csv(path: str, rows: tuple[ExperimentRow, ...]) -> None:
    names = [f.name for f in fields(ExperimentRow)]
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(names)
        for row in rows:
            writer.writerow([getattr(row, name) for name in names])


def run_experiment(spec: ExperimentSpec) -> ExperimentSummary:
    """Run every (variant, N, sweep, realization) cell and aggregate means.

    Rows keep task order regardless of worker count, so serial and
    parallel runs emit identical CSV apart from wall_time_s.
    """
    tasks = _tasks(spec)
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            outcomes = list(pool.map(_run_task, tasks))
    else:
        outcomes = [_run_task(task) for task in tasks]

    rows = tuple(r for r in outcomes if isinstance(r, ExperimentRow))
    failures = tuple(r for r in outcomes if isinstance(r, str))

    cells: dict[tuple[str, int, float], list[ExperimentRow]] = {}
    for row in rows:
        cells.setdefault((row.variant, row.n_antennas, row.sweep_dbw), []).append(row)
    means = {
        key: (
            float(np.mean([r.achieved_q for r in group])),
            float(np.mean([r.sdr_bound for r in group])),
        )
        for key, group in cells.items()
    }

    if spec.out_csv is not None:
        _write_csv(spec.out_csv, rows)
    return ExperimentSummary(
        spec=spec, rows=rows, means=means, failures=failures, csv_path=spec.out_csv
    )


def solve_single(cfg: SystemConfig, seed: int, grid_points: int = 100) -> dict:
    """One realization end to end, serialized for JSON emission.

    The report carries everything needed to re-verify the solution
    offline: config, channel, coefficient vector, recovered relay weight
    matrix, rate diagnostics, nulling residuals, and solver counters.
    """
    ch = sample_channel(cfg, seed)
    basis = null_basis(build_constraint_matrix(ch))
    pm = build_problem_matrices(cfg, ch, basis)
    result = optimize(ch, cfg, grid_points=grid_points)
    best = result.best
    w_mat = beamformer_from_coeffs(basis, best.c)
    res1, res2 = nulling_residuals(w_mat, ch)
    bounds = asr_bounds(best.c, pm, cfg)
    return {
        "seed": seed,
        "grid_points": grid_points,
        "config": config_to_dict(cfg),
        "channel": channel_to_dict(ch),
        "achieved_q": best.achieved_q,
        "sdr_bound": best.sdr_bound,
        "global_sdr_bound": result.global_sdr_bound,
        "winner": best.source,
        "case_tag": best.exact_case,
        "rank_ratio": best.rank_ratio,
        "fallback_zero": result.fallback_zero,
        "counters": dict(result.counters),
        "coefficients": _encode_cvector(best.c),
        "w_matrix": [_encode_cvector(row) for row in w_mat],
        "rates": {
            "r1_up": bounds.r1_up,
            "r2_up": bounds.r2_up,
            "r_sum_up": bounds.r_sum_up,
            "r1_corner": bounds.r1_corner,
            "r2_corner": bounds.r2_corner,
            "r3": bounds.r3,
        },
        "nulling_residuals": [res1, res2],
        "relay_power": quad_form(best.c, pm.omega_r),
    }


def report_coefficients(report: dict) -> np.ndarray:
    """Decode the coefficient vector out of a solve_single report."""
    return _decode_cvector(report["coefficients"])


def run_oracle_compare(
    n: int = 2,
    realizations: int = 20,
    pt_dbw: float = 20.0,
    grid_points: int = 100,
    budget: int = 60_000,
    restarts: int = 16,
    master_seed: int = 0,
) -> dict:
    """Optimizer vs brute-force oracle on matched seeded realizations.

    Ratios treat a pair of numerically zero rates as exact agreement; the
    relative gap median is taken over realizations with a nonzero oracle
    value.
    """
    p1, p2, p_relay = power_split_from_total(pt_dbw)
    cfg = SystemConfig(n_antennas=n, p1=p1, p2=p2, p_relay=p_relay)
    rows = []
    gaps = []
    for realization in range(realizations):
        seed = realization_seed(master_seed, n, realization)
        ch = sample_channel(cfg, seed)
        result = optimize(ch, cfg, grid_points=grid_points)
        oracle = brute_force_maxmin(
            ch, cfg, budget=budget, restarts=restarts, seed=seed
        )
        achieved = result.best.achieved_q
        if oracle.q_best <= 1e-12:
            ratio = 1.0 if achieved <= 1e-12 else float("inf")
        else:
            ratio = achieved / oracle.q_best
            gaps.append(max(0.0, (oracle.q_best - achieved) / oracle.q_best))
        rows.append(
            {
                "realization": realization,
                "seed": seed,
                "achieved_q": achieved,
                "oracle_q": oracle.q_best,
                "ratio": ratio,
                "sdr_bound": result.best.sdr_bound,
                "oracle_evaluations": oracle.evaluations,
            }
        )
    return {
        "n_antennas": n,
        "pt_dbw": pt_dbw,
        "grid_points": grid_points,
        "rows": rows,
        "worst_ratio": min((r["ratio"] for r in rows), default=1.0),
        "median_gap": float(np.median(gaps)) if gaps else 0.0,
    }
