"""Eavesdropper-nulling subspace construction.

The relay weight matrix ``W`` must make the relayed signal invisible on the
eavesdropper's second-hop antenna: ``fe^T W f1 = fe^T W f2 = 0``. Writing
``w = vec(W^H)`` (column-stacking), both conditions collapse to ``Z^H w = 0``
where the two columns of ``Z`` are ``vec(f1 fe^T)`` and ``vec(f2 fe^T)``.
Every admissible beamformer is then ``w = G c`` for an orthonormal basis ``G``
of the orthogonal complement of ``col(Z)`` and a free coefficient vector
``c`` of length ``m = N^2 - rank(Z)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization

__all__ = [
    "NullSpaceBasis",
    "ZeroConstraintError",
    "build_constraint_matrix",
    "null_basis",
    "beamformer_from_coeffs",
    "nulling_residuals",
]

DEFAULT_SVD_TOL = 1e-10


class ZeroConstraintError(ValueError):
    """The nulling constraint matrix is identically zero (``fe = 0``).

    With no second-hop path to the eavesdropper every W is trivially nulling;
    the dimension bookkeeping ``m = N^2 - rank(Z)`` would silently claim the
    whole space, so the condition is surfaced to the caller instead.
    """


@dataclass(frozen=True)
class NullSpaceBasis:
    """Orthonormal basis of the nulling subspace."""

    g_matrix: np.ndarray  # (N^2, m), orthonormal columns
    m: int  # N^2 - rank(Z), either N^2 - 2 or N^2 - 1
    svd_tolerance: float  # relative singular-value threshold used

    @property
    def n_antennas(self) -> int:
        return int(round(np.sqrt(self.g_matrix.shape[0])))


def _vec(a: np.ndarray) -> np.ndarray:
    # Column-stacking convention; all Kronecker identities downstream rely on it.
    return a.reshape(-1, order="F")


def build_constraint_matrix(ch: ChannelRealization) -> np.ndarray:
    """Stack the two nulling conditions into an N^2-by-2 matrix Z."""
    z1 = _vec(np.outer(ch.f1, ch.fe))
    z2 = _vec(np.outer(ch.f2, ch.fe))
    return np.column_stack([z1, z2])


def null_basis(z: np.ndarray, tol_rel: float = DEFAULT_SVD_TOL) -> NullSpaceBasis:
    """Orthonormal basis of the orthogonal complement of ``col(z)``.

    Singular values below ``tol_rel`` times the largest are treated as zero,
    so a pair of parallel constraint columns yields ``m = N^2 - 1``.
    """
    n_sq = z.shape[0]
    u, s, _ = np.linalg.svd(z, full_matrices=True)
    s_max = s[0] if s.size else 0.0
    if s_max == 0.0:
        raise ZeroConstraintError(
            "constraint matrix is zero (fe = 0); nulling is vacuous"
        )
    rank = int(np.sum(s > tol_rel * s_max))
    g = u[:, rank:]
    return NullSpaceBasis(g_matrix=g, m=n_sq - rank, svd_tolerance=tol_rel)


def beamformer_from_coeffs(basis: NullSpaceBasis, c: np.ndarray) -> np.ndarray:
    """Map a coefficient vector to the relay weight matrix W.

    ``vec(W^H) = G c`` exactly: the combined vector is unstacked column-wise
    into W^H and conjugate-transposed.
    """
    c = np.asarray(c, dtype=np.complex128)
    if c.shape != (basis.m,):
        raise ValueError(f"expected coefficient vector of shape ({basis.m},), got {c.shape}")
    n = basis.n_antennas
    w = basis.g_matrix @ c
    w_herm = w.reshape(n, n, order="F")
    return w_herm.conj().T


def nulling_residuals(
    w_mat: np.ndarray, ch: ChannelRealization
) -> tuple[float, float]:
    """Magnitudes of the two leakage terms ``|fe^T W f1|`` and ``|fe^T W f2|``."""
    lhs = ch.fe @ w_mat
    return float(np.abs(lhs @ ch.f1)), float(np.abs(lhs @ ch.f2))
