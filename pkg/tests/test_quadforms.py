"""Quadratic-form assembly, leakage constants, and vectorization identities."""

from dataclasses import replace

import numpy as np
import pytest

from secrelay.channel import SystemConfig, sample_channel
from secrelay.nullspace import beamformer_from_coeffs, build_constraint_matrix, null_basis
from secrelay.quadforms import (
    build_problem_matrices,
    kron_identity_check,
    quad_form,
    relay_power,
)


def make_setup(n=3, seed=0, **cfg_overrides):
    params = {"n_antennas": n, "p1": 25.0, "p2": 25.0, "p_relay": 50.0}
    params.update(cfg_overrides)
    cfg = SystemConfig(**params)
    ch = sample_channel(cfg, seed)
    basis = null_basis(build_constraint_matrix(ch))
    return cfg, ch, basis


def random_coeffs(rng, m):
    return rng.standard_normal(m) + 1j * rng.standard_normal(m)


class TestLeakageConstants:
    def test_symmetric_unit_setting(self):
        # P1|g1|^2 = P2|g2|^2 = sigma_eve1^2 = 1 pins every constant.
        cfg, ch, basis = make_setup(p1=1.0, p2=1.0)
        ch = replace(ch, g1=1.0 + 0j, g2=1.0 + 0j)
        pm = build_problem_matrices(cfg, ch, basis)
        assert pm.tau1 == pytest.approx(2.0 / 3.0, abs=1e-15)
        assert pm.tau2 == pytest.approx(2.0 / 3.0, abs=1e-15)
        assert pm.delta == pytest.approx(1.0 / 3.0, abs=1e-15)
        assert pm.tau3 == pytest.approx(0.5, abs=1e-15)
        assert pm.tau4 == pytest.approx(0.5, abs=1e-15)

    def test_zero_eavesdropper_gains(self):
        cfg, ch, basis = make_setup(seed=3)
        ch = replace(ch, g1=0j, g2=0j)
        pm = build_problem_matrices(cfg, ch, basis)
        assert pm.tau1 == pm.tau2 == pm.delta == 1.0
        np.testing.assert_allclose(pm.omega1, pm.phi32, atol=1e-15)
        np.testing.assert_allclose(pm.omega2, pm.phi31, atol=1e-15)

    def test_delta_never_exceeds_tau(self):
        for seed in range(25):
            cfg, ch, basis = make_setup(seed=seed)
            pm = build_problem_matrices(cfg, ch, basis)
            assert 0.0 < pm.delta <= min(pm.tau1, pm.tau2) + 1e-15
            assert 0.0 < pm.tau3 <= 1.0 + 1e-15
            assert 0.0 < pm.tau4 <= 1.0 + 1e-15


class TestMatrixStructure:
    def test_hermitian_and_scaled_relations(self):
        cfg, ch, basis = make_setup(seed=11)
        pm = build_problem_matrices(cfg, ch, basis)
        for mat in (pm.phi1, pm.phi2, pm.phi31, pm.phi32, pm.sigma_1, pm.sigma_2,
                    pm.omega1, pm.omega2, pm.omega_r, pm.q_r):
            scale = np.max(np.abs(mat))
            assert np.max(np.abs(mat - mat.conj().T)) <= 1e-12 * scale
        np.testing.assert_allclose(pm.phi31, pm.phi1 / pm.tau1, atol=1e-12)
        np.testing.assert_allclose(pm.phi32, pm.phi2 / pm.tau2, atol=1e-12)
        np.testing.assert_allclose(pm.omega1, pm.tau3 * pm.phi32, atol=1e-12)
        np.testing.assert_allclose(pm.omega2, pm.tau4 * pm.phi31, atol=1e-12)

    def test_rank_one_numerators(self):
        for seed in (0, 1, 2):
            cfg, ch, basis = make_setup(seed=seed)
            pm = build_problem_matrices(cfg, ch, basis)
            for mat in (pm.phi1, pm.phi2, pm.phi31, pm.phi32, pm.omega1, pm.omega2):
                eig = np.linalg.eigvalsh(mat)
                assert eig[0] >= -1e-10 * max(1.0, eig[-1])
                # everything but the top eigenvalue is numerically zero
                assert np.all(eig[:-1] <= 1e-10 * max(np.trace(mat).real, 1e-30))

    def test_noise_forms_psd_and_power_form_pd(self):
        cfg, ch, basis = make_setup(seed=13)
        pm = build_problem_matrices(cfg, ch, basis)
        assert np.linalg.eigvalsh(pm.sigma_1)[0] >= -1e-12
        assert np.linalg.eigvalsh(pm.sigma_2)[0] >= -1e-12
        # relay noise floor keeps the power form strictly positive definite
        assert np.linalg.eigvalsh(pm.omega_r)[0] >= cfg.sigma2_relay * (1 - 1e-10)


class TestQuadForm:
    def test_identity_unit_vector(self):
        e1 = np.zeros(4, dtype=complex)
        e1[0] = 1.0
        assert quad_form(e1, np.eye(4)) == pytest.approx(1.0)

    def test_homogeneity(self):
        rng = np.random.default_rng(7)
        cfg, ch, basis = make_setup(seed=7)
        pm = build_problem_matrices(cfg, ch, basis)
        c = random_coeffs(rng, basis.m)
        base = quad_form(c, pm.omega_r)
        assert quad_form(2.5j * c, pm.omega_r) == pytest.approx(6.25 * base, rel=1e-12)

    def test_phase_invariance(self):
        rng = np.random.default_rng(8)
        cfg, ch, basis = make_setup(seed=8)
        pm = build_problem_matrices(cfg, ch, basis)
        c = random_coeffs(rng, basis.m)
        rotated = np.exp(1j * 0.7331) * c
        for mat in (pm.phi1, pm.sigma_2, pm.omega_r):
            assert quad_form(rotated, mat) == pytest.approx(quad_form(c, mat), rel=1e-12)

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError):
            quad_form(np.ones(2), np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestRelayPower:
    def test_zero_coeffs(self):
        cfg, ch, basis = make_setup(seed=20)
        pm = build_problem_matrices(cfg, ch, basis)
        assert relay_power(np.zeros(basis.m, dtype=complex), pm) == 0.0

    def test_matches_direct_trace(self):
        rng = np.random.default_rng(21)
        for seed in range(10):
            cfg, ch, basis = make_setup(seed=seed)
            pm = build_problem_matrices(cfg, ch, basis)
            c = random_coeffs(rng, basis.m)
            w = beamformer_from_coeffs(basis, c)
            direct = float(np.real(np.trace(w @ pm.q_r @ w.conj().T)))
            assert relay_power(c, pm) == pytest.approx(direct, rel=1e-10)

    def test_positive_for_nonzero_coeffs(self):
        rng = np.random.default_rng(22)
        cfg, ch, basis = make_setup(seed=22)
        pm = build_problem_matrices(cfg, ch, basis)
        assert relay_power(random_coeffs(rng, basis.m), pm) > 0.0


class TestVectorizationIdentities:
    def test_random_draws_tight(self):
        rng = np.random.default_rng(30)
        for n in (2, 3, 4, 5):
            for trial in range(5):
                cfg = SystemConfig(n_antennas=n, p1=1.0, p2=1.0, p_relay=2.0)
                ch = sample_channel(cfg, 100 * n + trial)
                basis = null_basis(build_constraint_matrix(ch))
                res = kron_identity_check(ch, basis, random_coeffs(rng, basis.m))
                assert max(res) <= 1e-10

    def test_zero_coeffs_are_trivially_tight(self):
        cfg, ch, basis = make_setup(seed=31)
        res = kron_identity_check(ch, basis, np.zeros(basis.m, dtype=complex))
        assert max(res) == 0.0

    def test_identity_beamformer_direct(self):
        # Direct w = vec(I), no basis: both sides reduce to |f1^T f2|^2.
        cfg, ch, basis = make_setup(n=2, seed=32)
        w_vec = np.eye(2, dtype=complex).reshape(-1, order="F")
        f1f1 = np.outer(ch.f1, ch.f1.conj())
        f2f2 = np.outer(ch.f2, ch.f2.conj())
        lhs = abs(ch.f1 @ np.eye(2) @ ch.f2) ** 2
        rhs = float(np.real(np.vdot(w_vec, np.kron(f1f1, f2f2) @ w_vec)))
        assert rhs == pytest.approx(lhs, rel=1e-12)
