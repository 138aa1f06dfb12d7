"""Quadratic-form matrices and scalar constants of the secrecy-rate bounds.

After null-space reduction every rate quantity is a ratio of Hermitian
quadratic forms in the coefficient vector ``c``. This module assembles those
m-by-m matrices once per realization:

* ``phi1``/``phi2``: numerator forms of the per-source upper bounds, already
  scaled by the leakage factors ``tau1 * p2`` and ``tau2 * p1``,
* ``sigma_1``/``sigma_2``: relay-noise forms in the matching denominators,
* ``phi31``/``phi32``: unscaled variants entering the sum-rate bound,
* ``omega1``/``omega2``: corner-coordinate numerators,
* ``omega_r``: relay transmit-power form (positive definite),
* ``tau1, tau2, tau3, tau4, delta``: leakage constants built from the direct
  source-to-eavesdropper gains.

Kronecker products are materialized densely; N <= 8 keeps them at most
64 x 64, and clarity beats micro-optimization here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .channel import ChannelRealization, SystemConfig
from .nullspace import NullSpaceBasis, beamformer_from_coeffs

__all__ = [
    "ProblemMatrices",
    "KronResiduals",
    "build_problem_matrices",
    "quad_form",
    "relay_power",
    "kron_identity_check",
]

HERMITIAN_TOL = 1e-10


def _hermitize(m: np.ndarray) -> np.ndarray:
    # Kill roundoff asymmetry; the SDP embedding downstream needs exact symmetry.
    return 0.5 * (m + m.conj().T)


@dataclass(frozen=True)
class ProblemMatrices:
    phi1: np.ndarray
    phi2: np.ndarray
    phi31: np.ndarray
    phi32: np.ndarray
    sigma_1: np.ndarray
    sigma_2: np.ndarray
    omega1: np.ndarray
    omega2: np.ndarray
    omega_r: np.ndarray
    tau1: float
    tau2: float
    tau3: float
    tau4: float
    delta: float
    q_r: np.ndarray  # N x N relay input covariance

    @property
    def m(self) -> int:
        return self.phi1.shape[0]


def build_problem_matrices(
    cfg: SystemConfig, ch: ChannelRealization, basis: NullSpaceBasis
) -> ProblemMatrices:
    """Assemble all quadratic-form matrices for one (config, channel, basis)."""
    g = basis.g_matrix
    n = cfg.n_antennas
    eye = np.eye(n)

    a1 = cfg.p1 * abs(ch.g1) ** 2
    a2 = cfg.p2 * abs(ch.g2) ** 2
    se1 = cfg.sigma2_eve1
    tau1 = 1.0 / (1.0 + a2 / (a1 + se1))
    tau2 = 1.0 / (1.0 + a1 / (a2 + se1))
    delta = 1.0 / (1.0 + (a1 + a2) / se1)
    tau3 = delta / tau1
    tau4 = delta / tau2

    f1f1 = np.outer(ch.f1, ch.f1.conj())
    f2f2 = np.outer(ch.f2, ch.f2.conj())

    def reduce(big: np.ndarray) -> np.ndarray:
        return _hermitize(g.conj().T @ big @ g)

    phi31 = reduce(cfg.p2 * np.kron(f1f1, f2f2))
    phi32 = reduce(cfg.p1 * np.kron(f2f2, f1f1))
    phi1 = tau1 * phi31
    phi2 = tau2 * phi32
    omega1 = tau3 * phi32
    omega2 = tau4 * phi31
    sigma_1 = reduce(cfg.sigma2_relay * np.kron(f1f1, eye))
    sigma_2 = reduce(cfg.sigma2_relay * np.kron(f2f2, eye))

    q_r = _hermitize(cfg.p1 * f1f1 + cfg.p2 * f2f2 + cfg.sigma2_relay * eye)
    omega_r = reduce(np.kron(eye, q_r))

    return ProblemMatrices(
        phi1=phi1,
        phi2=phi2,
        phi31=phi31,
        phi32=phi32,
        sigma_1=sigma_1,
        sigma_2=sigma_2,
        omega1=omega1,
        omega2=omega2,
        omega_r=omega_r,
        tau1=tau1,
        tau2=tau2,
        tau3=tau3,
        tau4=tau4,
        delta=delta,
        q_r=q_r,
    )


def quad_form(c: np.ndarray, mat: np.ndarray) -> float:
    """Real value of ``c^H M c`` for Hermitian M.

    Raises on materially non-Hermitian input or a significant imaginary part,
    both of which indicate an assembly fault upstream.
    """
    mat = np.asarray(mat)
    scale = np.max(np.abs(mat)) if mat.size else 0.0
    if scale > 0 and np.max(np.abs(mat - mat.conj().T)) > HERMITIAN_TOL * scale:
        raise ValueError("quad_form requires a Hermitian matrix")
    value = np.vdot(c, mat @ c)
    if abs(value.imag) > 1e-10 * max(1.0, abs(value.real)):
        raise ValueError(f"quadratic form has non-negligible imaginary part {value.imag}")
    return float(value.real)


def relay_power(c: np.ndarray, pm: ProblemMatrices) -> float:
    """Relay transmit power ``c^H omega_r c`` in watts."""
    return quad_form(c, pm.omega_r)


class KronResiduals(NamedTuple):
    """Relative residuals of the four vectorization identities."""

    cross_12: float  # |f1^T W f2|^2 vs quadratic form
    cross_21: float  # |f2^T W f1|^2 vs quadratic form
    row_norm_1: float  # ||f1^T W||^2 vs quadratic form
    row_norm_2: float  # ||f2^T W||^2 vs quadratic form


def kron_identity_check(
    ch: ChannelRealization, basis: NullSpaceBasis, c: np.ndarray
) -> KronResiduals:
    """Check the vectorization identities linking W-space and c-space.

    With ``w = G c`` and ``W`` the matching beamformer, each left-hand side is
    evaluated directly on W and compared with the Kronecker quadratic form in
    ``w``; relative residuals are returned.
    """
    w_vec = basis.g_matrix @ np.asarray(c, dtype=np.complex128)
    w_mat = beamformer_from_coeffs(basis, c)
    n = ch.n_antennas
    eye = np.eye(n)
    f1f1 = np.outer(ch.f1, ch.f1.conj())
    f2f2 = np.outer(ch.f2, ch.f2.conj())

    def form(big: np.ndarray) -> float:
        return float(np.real(np.vdot(w_vec, big @ w_vec)))

    pairs = [
        (abs(ch.f1 @ w_mat @ ch.f2) ** 2, form(np.kron(f1f1, f2f2))),
        (abs(ch.f2 @ w_mat @ ch.f1) ** 2, form(np.kron(f2f2, f1f1))),
        (float(np.linalg.norm(ch.f1 @ w_mat) ** 2), form(np.kron(f1f1, eye))),
        (float(np.linalg.norm(ch.f2 @ w_mat) ** 2), form(np.kron(f2f2, eye))),
    ]
    residuals = [abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs)) for lhs, rhs in pairs]
    return KronResiduals(*residuals)
