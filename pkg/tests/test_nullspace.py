"""Nulling subspace construction and beamformer mapping."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from secrelay.channel import SystemConfig, sample_channel
from secrelay.nullspace import (
    ZeroConstraintError,
    beamformer_from_coeffs,
    build_constraint_matrix,
    null_basis,
    nulling_residuals,
)


def make_channel(n: int, seed: int):
    cfg = SystemConfig(n_antennas=n, p1=1.0, p2=1.0, p_relay=2.0)
    return sample_channel(cfg, seed)


def random_coeffs(rng: np.random.Generator, m: int) -> np.ndarray:
    return rng.standard_normal(m) + 1j * rng.standard_normal(m)


class TestConstraintMatrix:
    def test_unit_vectors_give_unit_column(self):
        ch = make_channel(2, 0)
        ch = type(ch)(
            f1=np.array([1.0 + 0j, 0.0]),
            f2=ch.f2,
            fe=np.array([1.0 + 0j, 0.0]),
            g1=ch.g1,
            g2=ch.g2,
        )
        z = build_constraint_matrix(ch)
        np.testing.assert_array_equal(z[:, 0], np.array([1, 0, 0, 0], dtype=complex))

    def test_parallel_sources_give_parallel_columns(self):
        ch = make_channel(3, 1)
        ch = type(ch)(f1=ch.f1, f2=3.0 * ch.f1, fe=ch.fe, g1=ch.g1, g2=ch.g2)
        z = build_constraint_matrix(ch)
        np.testing.assert_allclose(z[:, 1], 3.0 * z[:, 0], rtol=1e-14)

    def test_zero_fe_gives_zero_matrix(self):
        ch = make_channel(2, 2)
        ch = type(ch)(f1=ch.f1, f2=ch.f2, fe=np.zeros(2, dtype=complex), g1=ch.g1, g2=ch.g2)
        assert not build_constraint_matrix(ch).any()


class TestNullBasis:
    @settings(max_examples=20, deadline=None)
    @given(n=st.integers(min_value=2, max_value=5), seed=st.integers(min_value=0, max_value=999))
    def test_dimension_law_generic(self, n, seed):
        ch = make_channel(n, seed)
        z = build_constraint_matrix(ch)
        basis = null_basis(z)
        rank = int(np.linalg.matrix_rank(z))
        assert basis.m + rank == n * n
        assert basis.m == n * n - 2  # generic draws have independent columns

    def test_parallel_sources_raise_rank(self):
        ch = make_channel(3, 4)
        ch = type(ch)(f1=ch.f1, f2=2.5 * ch.f1, fe=ch.fe, g1=ch.g1, g2=ch.g2)
        basis = null_basis(build_constraint_matrix(ch))
        assert basis.m == 9 - 1

    def test_zero_constraint_is_distinguished(self):
        with pytest.raises(ZeroConstraintError):
            null_basis(np.zeros((4, 2), dtype=complex))

    def test_orthonormal_columns(self):
        for n in (2, 3, 4, 5):
            ch = make_channel(n, 10 + n)
            basis = null_basis(build_constraint_matrix(ch))
            gram = basis.g_matrix.conj().T @ basis.g_matrix
            assert np.max(np.abs(gram - np.eye(basis.m))) <= 1e-12

    def test_annihilates_constraints(self):
        for n in (2, 3, 4):
            ch = make_channel(n, 20 + n)
            z = build_constraint_matrix(ch)
            basis = null_basis(z)
            smax = np.linalg.svd(z, compute_uv=False)[0]
            assert np.max(np.abs(z.conj().T @ basis.g_matrix)) <= 1e-10 * smax


class TestBeamformer:
    def test_zero_coeffs_give_zero_beamformer(self):
        ch = make_channel(3, 30)
        basis = null_basis(build_constraint_matrix(ch))
        w = beamformer_from_coeffs(basis, np.zeros(basis.m, dtype=complex))
        assert not w.any()

    def test_vectorization_roundtrip(self):
        rng = np.random.default_rng(31)
        ch = make_channel(4, 31)
        basis = null_basis(build_constraint_matrix(ch))
        c = random_coeffs(rng, basis.m)
        w = beamformer_from_coeffs(basis, c)
        revec = w.conj().T.reshape(-1, order="F")
        np.testing.assert_allclose(revec, basis.g_matrix @ c, atol=1e-14)

    def test_dimension_mismatch_rejected(self):
        ch = make_channel(2, 32)
        basis = null_basis(build_constraint_matrix(ch))
        with pytest.raises(ValueError):
            beamformer_from_coeffs(basis, np.zeros(basis.m + 1, dtype=complex))

    def test_random_coeffs_null_the_eavesdropper(self):
        rng = np.random.default_rng(33)
        for n in (2, 3, 4, 5):
            ch = make_channel(n, 40 + n)
            basis = null_basis(build_constraint_matrix(ch))
            c = random_coeffs(rng, basis.m)
            w = beamformer_from_coeffs(basis, c)
            scale = (
                np.linalg.norm(ch.fe)
                * max(np.linalg.norm(ch.f1), np.linalg.norm(ch.f2))
                * np.linalg.norm(w)
            )
            res1, res2 = nulling_residuals(w, ch)
            assert res1 <= 1e-9 * scale and res2 <= 1e-9 * scale

    def test_constructed_leaky_beamformer_detected(self):
        ch = make_channel(3, 50)
        w = np.outer(ch.fe.conj(), ch.f1.conj())
        res1, _ = nulling_residuals(w, ch)
        assert res1 > 1e-3  # |fe^T fe*| |f1^H f1| is order-one for unit variances

    def test_basis_choice_does_not_change_beamformers(self):
        # Mixing the basis by a random unitary spans the same subspace; the
        # transformed coefficients must reproduce the identical W.
        rng = np.random.default_rng(51)
        ch = make_channel(3, 51)
        basis = null_basis(build_constraint_matrix(ch))
        m = basis.m
        q, _ = np.linalg.qr(rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)))
        alt = type(basis)(g_matrix=basis.g_matrix @ q, m=m, svd_tolerance=basis.svd_tolerance)
        c = random_coeffs(rng, m)
        c_alt = alt.g_matrix.conj().T @ (basis.g_matrix @ c)
        w = beamformer_from_coeffs(basis, c)
        w_alt = beamformer_from_coeffs(alt, c_alt)
        np.testing.assert_allclose(w_alt, w, atol=1e-12)
