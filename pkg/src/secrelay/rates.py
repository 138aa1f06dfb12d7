"""Mutual informations, secrecy-rate bounds, and the max-min value.

Rates are in bits per channel use and carry the one-half factor for the two
hops. The secrecy region for one realization is a triangle cut by three
constraints: per-source upper bounds ``r1_up``/``r2_up`` and a sum bound
``r_sum_up``; the max-min point is either a rectangle corner (cases A and B)
or the midpoint of the sum edge (case C).

Two independent evaluation routes are implemented for every eavesdropper
quantity: a term-by-term closed form and a covariance determinant ratio. They
must agree to high precision; the test suite treats each as the oracle of the
other.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .channel import ChannelRealization, SystemConfig
from .nullspace import NullSpaceBasis, beamformer_from_coeffs
from .quadforms import ProblemMatrices, build_problem_matrices, quad_form

__all__ = [
    "AsrBounds",
    "EveCovariances",
    "mi_x2_y1",
    "mi_x1_y2",
    "eve_covariances",
    "mi_joint_eve",
    "mi_x2_eve_closed",
    "mi_x1_eve_closed",
    "mi_x2_eve_det",
    "mi_x1_eve_det",
    "asr_bounds",
    "minimax_value",
    "end_to_end_rate_check",
]


@dataclass(frozen=True)
class AsrBounds:
    """Secrecy-region boundary quantities for one coefficient vector."""

    r1_up: float  # clamped per-source bound, message toward node 1
    r2_up: float  # clamped per-source bound, message toward node 2
    r_sum_up: float  # clamped sum bound
    r1_corner: float  # R1 at the corner where the R2 bound meets the sum edge (unclamped)
    r2_corner: float  # R2 at the corner where the R1 bound meets the sum edge (unclamped)
    r3: float  # equal-rate point on the sum edge, r_sum_up / 2


@dataclass(frozen=True)
class EveCovariances:
    """Eavesdropper signal covariances over both hops."""

    u_matrix: np.ndarray  # 2x2 stacked eavesdropper channel
    m_diag: np.ndarray  # 2x2 diag of source powers
    l_diag: np.ndarray  # 2x2 diag of effective noise at the eavesdropper
    k_ye: np.ndarray  # received covariance
    k_ye_given_x2: np.ndarray  # covariance with x2 known
    k_ye_given_x1: np.ndarray  # covariance with x1 known


def _leak_terms(
    w_mat: np.ndarray, ch: ChannelRealization
) -> tuple[float, complex, complex]:
    """Second-hop leakage quantities (||fe^T W||^2, fe^T W f1, fe^T W f2)."""
    row = ch.fe @ w_mat
    return float(np.real(np.vdot(row, row))), complex(row @ ch.f1), complex(row @ ch.f2)


def mi_x2_y1(w_mat: np.ndarray, ch: ChannelRealization, cfg: SystemConfig) -> float:
    """Relayed mutual information for the message decoded at node 1."""
    signal = cfg.p2 * abs(ch.f1 @ w_mat @ ch.f2) ** 2
    fwd_noise = cfg.sigma2_relay * float(np.linalg.norm(ch.f1 @ w_mat) ** 2)
    return float(np.log2(1.0 + signal / (fwd_noise + cfg.sigma2_node1)))


def mi_x1_y2(w_mat: np.ndarray, ch: ChannelRealization, cfg: SystemConfig) -> float:
    """Relayed mutual information for the message decoded at node 2."""
    signal = cfg.p1 * abs(ch.f2 @ w_mat @ ch.f1) ** 2
    fwd_noise = cfg.sigma2_relay * float(np.linalg.norm(ch.f2 @ w_mat) ** 2)
    return float(np.log2(1.0 + signal / (fwd_noise + cfg.sigma2_node2)))


def eve_covariances(
    w_mat: np.ndarray, ch: ChannelRealization, cfg: SystemConfig
) -> EveCovariances:
    """Assemble the eavesdropper's two-hop covariance matrices."""
    leak_norm, b1, b2 = _leak_terms(w_mat, ch)
    u = np.array([[ch.g1, ch.g2], [b1, b2]], dtype=np.complex128)
    m_diag = np.diag([cfg.p1, cfg.p2]).astype(np.complex128)
    l_diag = np.diag(
        [cfg.sigma2_eve1, cfg.sigma2_eve2 + cfg.sigma2_relay * leak_norm]
    ).astype(np.complex128)
    k_ye = u @ m_diag @ u.conj().T + l_diag
    u1 = u[:, :1]
    u2 = u[:, 1:]
    k_given_x2 = u1 @ u1.conj().T * cfg.p1 + l_diag
    k_given_x1 = u2 @ u2.conj().T * cfg.p2 + l_diag
    return EveCovariances(
        u_matrix=u,
        m_diag=m_diag,
        l_diag=l_diag,
        k_ye=0.5 * (k_ye + k_ye.conj().T),
        k_ye_given_x2=0.5 * (k_given_x2 + k_given_x2.conj().T),
        k_ye_given_x1=0.5 * (k_given_x1 + k_given_x1.conj().T),
    )


def mi_joint_eve(w_mat: np.ndarray, ch: ChannelRealization, cfg: SystemConfig) -> float:
    """Joint leakage of both messages to the eavesdropper."""
    cov = eve_covariances(w_mat, ch, cfg)
    arg = np.eye(2) + cov.u_matrix @ cov.m_diag @ cov.u_matrix.conj().T @ np.linalg.inv(
        cov.l_diag
    )
    det = np.linalg.det(arg)
    value = float(np.real(det))
    if value <= 0:
        raise ValueError("joint leakage determinant is non-positive; covariance assembly fault")
    return float(np.log2(value))


def _det2(m: np.ndarray) -> float:
    # Explicit 2x2 determinant keeps this path independent of np.linalg.det.
    value = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    return float(np.real(value))


def mi_x2_eve_det(w_mat: np.ndarray, ch: ChannelRealization, cfg: SystemConfig) -> float:
    """Leakage of the node-1-bound message, via covariance determinant ratio."""
    cov = eve_covariances(w_mat, ch, cfg)
    d_full = _det2(cov.k_ye)
    d_cond = _det2(cov.k_ye_given_x2)
    if d_full <= 0 or d_cond <= 0:
        raise ValueError("non-positive covariance determinant; assembly fault")
    return float(np.log2(d_full / d_cond))


def mi_x1_eve_det(w_mat: np.ndarray, ch: ChannelRealization, cfg: SystemConfig) -> float:
    """Leakage of the node-2-bound message, via covariance determinant ratio."""
    cov = eve_covariances(w_mat, ch, cfg)
    d_full = _det2(cov.k_ye)
    d_cond = _det2(cov.k_ye_given_x1)
    if d_full <= 0 or d_cond <= 0:
        raise ValueError("non-positive covariance determinant; assembly fault")
    return float(np.log2(d_full / d_cond))


def mi_x2_eve_closed(w_mat: np.ndarray, ch: ChannelRealization, cfg: SystemConfig) -> float:
    """Leakage of the node-1-bound message, term-by-term closed form."""
    leak_norm, b1, b2 = _leak_terms(w_mat, ch)
    p1, p2 = cfg.p1, cfg.p2
    se1, se2, sr = cfg.sigma2_eve1, cfg.sigma2_eve2, cfg.sigma2_relay
    ag1 = abs(ch.g1) ** 2
    ag2 = abs(ch.g2) ** 2
    ab1 = abs(b1) ** 2
    ab2 = abs(b2) ** 2
    cross = 2.0 * p1 * p2 * float(np.real(ch.g1 * np.conj(ch.g2) * np.conj(b1) * b2))
    num = (
        ag2 * p2 * sr * leak_norm
        + ag2 * p2 * ab1 * p1
        + ag2 * p2 * se2
        + ag1 * p1 * ab2 * p2
        + se1 * ab2 * p2
        - cross
    )
    den = (
        ag1 * p1 * sr * leak_norm
        + ag1 * p1 * se2
        + se1 * ab1 * p1
        + se1 * sr * leak_norm
        + se1 * se2
    )
    arg = 1.0 + num / den
    if arg <= 0:
        raise ValueError("closed-form leakage argument non-positive; implementation fault")
    return float(np.log2(arg))


def mi_x1_eve_closed(w_mat: np.ndarray, ch: ChannelRealization, cfg: SystemConfig) -> float:
    """Leakage of the node-2-bound message, term-by-term closed form."""
    leak_norm, b1, b2 = _leak_terms(w_mat, ch)
    p1, p2 = cfg.p1, cfg.p2
    se1, se2, sr = cfg.sigma2_eve1, cfg.sigma2_eve2, cfg.sigma2_relay
    ag1 = abs(ch.g1) ** 2
    ag2 = abs(ch.g2) ** 2
    ab1 = abs(b1) ** 2
    ab2 = abs(b2) ** 2
    cross = 2.0 * p1 * p2 * float(np.real(ch.g1 * np.conj(ch.g2) * np.conj(b1) * b2))
    num = (
        ag1 * p1 * sr * leak_norm
        + ag1 * p1 * ab2 * p2
        + ag1 * p1 * se2
        + ag2 * p2 * ab1 * p1
        + se1 * ab1 * p1
        - cross
    )
    den = (
        ag2 * p2 * sr * leak_norm
        + ag2 * p2 * se2
        + se1 * ab2 * p2
        + se1 * sr * leak_norm
        + se1 * se2
    )
    arg = 1.0 + num / den
    if arg <= 0:
        raise ValueError("closed-form leakage argument non-positive; implementation fault")
    return float(np.log2(arg))


def asr_bounds(c: np.ndarray, pm: ProblemMatrices, cfg: SystemConfig) -> AsrBounds:
    """Boundary quantities of the secrecy region in coefficient space.

    ``r1_corner``/``r2_corner`` are left unclamped on purpose: for a poor
    coefficient vector the sum edge can cross an axis below zero and the case
    analysis needs the signed values.
    """
    den1 = quad_form(c, pm.sigma_1) + cfg.sigma2_node1
    den2 = quad_form(c, pm.sigma_2) + cfg.sigma2_node2
    q_phi1 = quad_form(c, pm.phi1)
    q_phi2 = quad_form(c, pm.phi2)
    q_phi31 = quad_form(c, pm.phi31)
    q_phi32 = quad_form(c, pm.phi32)
    q_omega1 = quad_form(c, pm.omega1)
    q_omega2 = quad_form(c, pm.omega2)

    r1_up = max(0.0, 0.5 * float(np.log2(pm.tau1 + q_phi1 / den1)))
    r2_up = max(0.0, 0.5 * float(np.log2(pm.tau2 + q_phi2 / den2)))
    sum_arg = pm.delta * (1.0 + q_phi31 / den1) * (1.0 + q_phi32 / den2)
    r_sum_up = max(0.0, 0.5 * float(np.log2(sum_arg)))
    r2_corner = 0.5 * float(np.log2(pm.tau3 + q_omega1 / den2))
    r1_corner = 0.5 * float(np.log2(pm.tau4 + q_omega2 / den1))
    return AsrBounds(
        r1_up=r1_up,
        r2_up=r2_up,
        r_sum_up=r_sum_up,
        r1_corner=r1_corner,
        r2_corner=r2_corner,
        r3=0.5 * r_sum_up,
    )


def minimax_value(
    c: np.ndarray, pm: ProblemMatrices, cfg: SystemConfig
) -> tuple[float, str]:
    """Max-min secrecy rate achieved by ``c`` and the geometric case taken.

    Case A: the R1 bound is the binding rectangle side (tie resolved here).
    Case B: the R2 bound binds. Case C: the sum edge binds and the equal-rate
    point wins.
    """
    bounds = asr_bounds(c, pm, cfg)
    if bounds.r1_up <= bounds.r2_corner:
        return bounds.r1_up, "A"
    if bounds.r2_up <= bounds.r1_corner:
        return bounds.r2_up, "B"
    return bounds.r3, "C"


class RateResiduals(NamedTuple):
    """Absolute disagreements between the two rate-bound evaluation routes."""

    r1_up: float
    r2_up: float
    r_sum_up: float


def end_to_end_rate_check(
    c: np.ndarray,
    basis: NullSpaceBasis,
    ch: ChannelRealization,
    cfg: SystemConfig,
) -> RateResiduals:
    """Compare quadratic-form bounds against mutual-information differences.

    Valid only for nulling beamformers ``w = G c``; a W that leaks to the
    eavesdropper breaks the algebra that eliminated the leakage terms from
    the quadratic forms.
    """
    pm = build_problem_matrices(cfg, ch, basis)
    w_mat = beamformer_from_coeffs(basis, c)
    bounds = asr_bounds(c, pm, cfg)

    hop1 = mi_x2_y1(w_mat, ch, cfg)
    hop2 = mi_x1_y2(w_mat, ch, cfg)
    r1_mi = max(0.0, 0.5 * (hop1 - mi_x2_eve_closed(w_mat, ch, cfg)))
    r2_mi = max(0.0, 0.5 * (hop2 - mi_x1_eve_closed(w_mat, ch, cfg)))
    rsum_mi = max(0.0, 0.5 * (hop1 + hop2 - mi_joint_eve(w_mat, ch, cfg)))
    return RateResiduals(
        r1_up=abs(bounds.r1_up - r1_mi),
        r2_up=abs(bounds.r2_up - r2_mi),
        r_sum_up=abs(bounds.r_sum_up - rsum_mi),
    )
