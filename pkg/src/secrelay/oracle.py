"""Derivative-free search for the max-min secrecy rate.

Validates the convex machinery from the outside: no lifting, no slack
grids, no case analysis. Random starts on and inside the relay power
ellipsoid are polished by a projected coordinate pattern search on the
exact max-min rate. The objective is non-smooth at case boundaries and
at the zero clamps, which is why nothing here asks for a gradient.

The search is deterministic for a fixed (seed, budget, restarts) triple.
Evaluation order never depends on the budget, so raising the budget with
the same seed extends the evaluation stream and can only improve the
returned value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, SystemConfig
from .nullspace import build_constraint_matrix, null_basis
from .quadforms import ProblemMatrices, build_problem_matrices, quad_form
from .rates import minimax_value

__all__ = ["OracleResult", "brute_force_maxmin"]

# Start radii as fractions of the power-ellipsoid boundary. Interior
# points matter because the rate is not monotone in the coefficient norm.
RADIUS_FRACTIONS = tuple(np.linspace(0.1, 1.0, 10))

SHRINK_LEVELS = 40
_SWEEPS_PER_LEVEL = 25
_IMPROVE_EPS = 1e-13


@dataclass(frozen=True)
class OracleResult:
    """Best feasible point found by the brute-force search.

    restarts counts the multistart iterations actually entered, which is
    fewer than requested when the evaluation budget runs out first.
    """

    c_best: np.ndarray
    q_best: float
    evaluations: int
    restarts: int


class _BudgetExhausted(Exception):
    pass


class _Search:
    """Evaluation stream with projection, budget, and best-point tracking."""

    def __init__(self, pm: ProblemMatrices, cfg: SystemConfig, budget: int):
        self.pm = pm
        self.cfg = cfg
        self.budget = budget
        self.evaluations = 0
        self.q_best = -math.inf
        self.c_best = np.zeros(pm.m, dtype=complex)

    def project(self, c: np.ndarray) -> np.ndarray:
        power = quad_form(c, self.pm.omega_r)
        if power > self.cfg.p_relay:
            return c * math.sqrt(self.cfg.p_relay / power)
        return c

    def evaluate(self, c: np.ndarray) -> float:
        if self.evaluations >= self.budget:
            raise _BudgetExhausted
        self.evaluations += 1
        q, _ = minimax_value(c, self.pm, self.cfg)
        if q > self.q_best:
            self.q_best = q
            self.c_best = c
        return q


def _polish(search: _Search, start: np.ndarray) -> None:
    """Pattern search over real and imaginary coordinate steps.

    First-improvement acceptance; a sweep with no accepted move halves
    the step. The sweep cap bounds the crawl a single level can perform
    along the power boundary, where projection keeps generating fresh
    points that improve by slivers.
    """
    m = start.size
    c = search.project(start)
    value = search.evaluate(c)
    step = 0.5 * float(np.linalg.norm(c)) / math.sqrt(m)
    for _ in range(SHRINK_LEVELS):
        for _ in range(_SWEEPS_PER_LEVEL):
            improved = False
            for i in range(m):
                for delta in (step, -step, 1j * step, -1j * step):
                    trial = c.copy()
                    trial[i] += delta
                    trial = search.project(trial)
                    trial_value = search.evaluate(trial)
                    if trial_value > value + _IMPROVE_EPS:
                        c, value, improved = trial, trial_value, True
            if not improved:
                break
        step *= 0.5


def _phase_gauge(c: np.ndarray) -> np.ndarray:
    mags = np.abs(c)
    if not mags.any():
        return c
    lead = np.flatnonzero(mags > 1e-12 * mags.max())[0]
    return c * np.exp(-1j * np.angle(c[lead]))


def brute_force_maxmin(
    ch: ChannelRealization,
    cfg: SystemConfig,
    budget: int = 60_000,
    restarts: int = 16,
    seed=None,
) -> OracleResult:
    """Multistart pattern search for the best nulling-subspace coefficients.

    Every evaluated point is projected onto the relay power constraint
    first, so the returned vector is always feasible. Practical up to
    moderate subspace dimension; the cost scales with the budget rather
    than with any structure the convex path exploits.
    """
    if budget < 1:
        raise ValueError(f"budget must be at least 1, got {budget}")
    if restarts < 0:
        raise ValueError(f"restarts must be nonnegative, got {restarts}")
    basis = null_basis(build_constraint_matrix(ch))
    pm = build_problem_matrices(cfg, ch, basis)
    rng = np.random.default_rng(seed)
    search = _Search(pm, cfg, int(budget))
    restarts_entered = 0
    try:
        # The silent relay anchors the stream; it is always feasible and
        # pins q_best at a real rate even under a budget of one.
        search.evaluate(np.zeros(pm.m, dtype=complex))
        for _ in range(restarts):
            d = rng.standard_normal(pm.m) + 1j * rng.standard_normal(pm.m)
            boundary = d * math.sqrt(cfg.p_relay / quad_form(d, pm.omega_r))
            restarts_entered += 1
            for rho in RADIUS_FRACTIONS:
                _polish(search, rho * boundary)
    except _BudgetExhausted:
        pass
    return OracleResult(
        c_best=_phase_gauge(search.c_best),
        q_best=search.q_best,
        evaluations=search.evaluations,
        restarts=restarts_entered,
    )
