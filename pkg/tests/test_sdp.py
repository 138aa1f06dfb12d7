"""Semidefinite solver: embedding identities, certificates, oracle agreement."""

import os
import subprocess
import sys

import numpy as np
import pytest

from secrelay.sdp import (
    DEFAULT_FEAS_TOL,
    DEFAULT_GAP_TOL,
    SdpConstraint,
    SdpProblem,
    complex_embed,
    solve,
    write_sdpa,
)


def lambda_max_problem(c):
    c = np.asarray(c, dtype=complex)
    d = c.shape[0]
    return SdpProblem(
        block_dims=(d,),
        n_scalars=0,
        objective_blocks=(c,),
        objective_scalars=np.zeros(0),
        constraints=(
            SdpConstraint((np.eye(d, dtype=complex),), np.zeros(0), "==", 1.0),
        ),
    )


def random_hermitian(rng, d):
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (a + a.conj().T)


class TestComplexEmbed:
    def test_identity_maps_to_identity(self):
        np.testing.assert_array_equal(
            complex_embed(np.eye(3, dtype=complex)), np.eye(6)
        )

    def test_real_symmetric_duplicates_diagonally(self):
        a = np.array([[2.0, 1.0], [1.0, -3.0]])
        e = complex_embed(a)
        np.testing.assert_array_equal(e[:2, :2], a)
        np.testing.assert_array_equal(e[2:, 2:], a)
        np.testing.assert_array_equal(e[:2, 2:], np.zeros((2, 2)))

    def test_trace_identity_random_psd(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            a = random_hermitian(rng, 5)
            g = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
            x = g @ g.conj().T
            lhs = float(np.trace(a @ x).real)
            rhs = 0.5 * float(np.trace(complex_embed(a) @ complex_embed(x)))
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))

    def test_output_exactly_symmetric(self):
        rng = np.random.default_rng(3)
        e = complex_embed(random_hermitian(rng, 6))
        np.testing.assert_array_equal(e, e.T)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            complex_embed(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_rejects_non_square(self):
        with pytest.raises(ValueError, match="square"):
            complex_embed(np.zeros((2, 3)))


class TestTerminalStatuses:
    def test_lambda_max_diagonal(self):
        sol = solve(lambda_max_problem(np.diag([1.0, 2.0])))
        assert sol.status == "optimal"
        assert sol.objective_value == pytest.approx(2.0, abs=1e-7)
        np.testing.assert_allclose(
            sol.block_values[0], np.diag([0.0, 1.0]), atol=1e-6
        )

    def test_negative_trace_infeasible(self):
        p = SdpProblem(
            (2,),
            0,
            (np.zeros((2, 2)),),
            np.zeros(0),
            (SdpConstraint((np.eye(2),), np.zeros(0), "==", -1.0),),
        )
        assert solve(p).status == "infeasible"

    def test_unconstrained_direction_unbounded(self):
        p = SdpProblem(
            (2,),
            0,
            (np.eye(2),),
            np.zeros(0),
            (SdpConstraint((np.diag([1.0, 0.0]),), np.zeros(0), "<=", 1.0),),
        )
        assert solve(p).status == "unbounded"

    def test_failure_statuses_carry_no_values(self):
        p = SdpProblem(
            (2,),
            0,
            (np.zeros((2, 2)),),
            np.zeros(0),
            (SdpConstraint((np.eye(2),), np.zeros(0), "==", -1.0),),
        )
        sol = solve(p)
        assert sol.block_values is None and sol.scalar_values is None
        assert np.isnan(sol.objective_value)


class TestEigenOracle:
    def test_random_lambda_max_matches_eigh(self):
        rng = np.random.default_rng(29)
        for d in (10, 10, 10, 20):
            c = random_hermitian(rng, d)
            sol = solve(lambda_max_problem(c))
            assert sol.status == "optimal"
            want = float(np.linalg.eigvalsh(c)[-1])
            assert sol.objective_value == pytest.approx(want, abs=1e-7)

    def test_hand_solvable_complex_case(self):
        # [[0, i], [-i, 0]] has eigenvalues +-1; the embedding path must
        # land on +1 exactly like the direct complex eigendecomposition.
        a = np.array([[0.0, 1.0j], [-1.0j, 0.0]])
        sol = solve(lambda_max_problem(a))
        assert sol.status == "optimal"
        assert sol.objective_value == pytest.approx(1.0, abs=1e-7)
        z = sol.block_values[0]
        # optimizer at the top eigenvector v = (1, -i)/sqrt(2)
        v = np.array([1.0, -1.0j]) / np.sqrt(2.0)
        np.testing.assert_allclose(z, np.outer(v, v.conj()), atol=1e-6)


class TestCertification:
    def test_optimal_invariants_hold(self):
        rng = np.random.default_rng(41)
        for trial in range(20):
            d = int(rng.integers(2, 9))
            c = random_hermitian(rng, d)
            rows = [
                SdpConstraint((np.eye(d, dtype=complex),), np.zeros(0), "==", 1.0)
            ]
            for _ in range(int(rng.integers(1, 4))):
                rows.append(
                    SdpConstraint(
                        (random_hermitian(rng, d),),
                        np.zeros(0),
                        "<=",
                        float(rng.random() + 0.5),
                    )
                )
            sol = solve(
                SdpProblem((d,), 0, (c,), np.zeros(0), tuple(rows))
            )
            if sol.status != "optimal":
                continue
            assert sol.max_primal_residual <= DEFAULT_FEAS_TOL
            assert sol.duality_gap <= DEFAULT_GAP_TOL
            for zb in sol.block_values:
                assert np.linalg.eigvalsh(zb)[0] >= -DEFAULT_FEAS_TOL

    def test_weak_duality(self):
        rng = np.random.default_rng(17)
        c = random_hermitian(rng, 6)
        sol = solve(lambda_max_problem(c))
        assert sol.status == "optimal"
        assert sol.objective_value <= sol.dual_objective + DEFAULT_GAP_TOL * max(
            1.0, abs(sol.objective_value)
        )

    def test_resolve_agreement(self):
        rng = np.random.default_rng(53)
        c = random_hermitian(rng, 8)
        p = lambda_max_problem(c)
        a = solve(p)
        b = solve(p)
        assert a.status == b.status == "optimal"
        assert abs(a.objective_value - b.objective_value) <= 1e-9


class TestMixedProblems:
    def test_scalars_and_inequalities(self):
        # max z + Tr(X) with z <= 3 and Tr(X) + z <= 5 gives 5.
        p = SdpProblem(
            (2,),
            1,
            (np.eye(2),),
            np.array([1.0]),
            (
                SdpConstraint((np.zeros((2, 2)),), np.array([1.0]), "<=", 3.0),
                SdpConstraint((np.eye(2),), np.array([1.0]), "<=", 5.0),
            ),
        )
        sol = solve(p)
        assert sol.status == "optimal"
        assert sol.objective_value == pytest.approx(5.0, abs=1e-6)
        assert sol.scalar_values.shape == (1,)
        assert sol.scalar_values[0] >= -DEFAULT_FEAS_TOL

    def test_ge_relation(self):
        p = SdpProblem(
            (2,),
            0,
            (-np.eye(2),),
            np.zeros(0),
            (SdpConstraint((np.eye(2),), np.zeros(0), ">=", 2.0),),
        )
        sol = solve(p)
        assert sol.status == "optimal"
        assert sol.objective_value == pytest.approx(-2.0, abs=1e-7)

    def test_two_blocks(self):
        # max Tr(C1 X1) + Tr(C2 X2) with separate trace budgets splits into
        # two independent lambda-max problems.
        c1 = np.diag([1.0, 4.0])
        c2 = np.diag([2.0, 3.0, 5.0])
        zero12 = np.zeros((2, 2))
        zero3 = np.zeros((3, 3))
        p = SdpProblem(
            (2, 3),
            0,
            (c1, c2),
            np.zeros(0),
            (
                SdpConstraint((np.eye(2), zero3), np.zeros(0), "==", 1.0),
                SdpConstraint((zero12, np.eye(3)), np.zeros(0), "==", 1.0),
            ),
        )
        sol = solve(p)
        assert sol.status == "optimal"
        assert sol.objective_value == pytest.approx(9.0, abs=1e-6)

    def test_strictly_positive_scalar_row(self):
        # zeta >= eps with max -zeta lands on the boundary value.
        eps = 1e-9
        p = SdpProblem(
            (1,),
            1,
            (np.zeros((1, 1)),),
            np.array([-1.0]),
            (
                SdpConstraint((np.zeros((1, 1)),), np.array([1.0]), ">=", eps),
                SdpConstraint((np.eye(1),), np.array([1.0]), "<=", 1.0),
            ),
        )
        sol = solve(p)
        assert sol.status == "optimal"
        assert sol.scalar_values[0] == pytest.approx(eps, abs=1e-8)


class TestValidation:
    def test_rejects_empty_constraints(self):
        with pytest.raises(ValueError, match="no constraints"):
            solve(SdpProblem((2,), 0, (np.eye(2),), np.zeros(0), ()))

    def test_rejects_non_hermitian_row(self):
        bad = np.array([[0.0, 1.0], [0.0, 0.0]])
        p = SdpProblem(
            (2,),
            0,
            (np.eye(2),),
            np.zeros(0),
            (SdpConstraint((bad,), np.zeros(0), "==", 1.0),),
        )
        with pytest.raises(ValueError, match="Hermitian"):
            solve(p)

    def test_rejects_bad_relation(self):
        p = SdpProblem(
            (2,),
            0,
            (np.eye(2),),
            np.zeros(0),
            (SdpConstraint((np.eye(2),), np.zeros(0), "<", 1.0),),
        )
        with pytest.raises(ValueError, match="relation"):
            solve(p)

    def test_rejects_shape_mismatch(self):
        p = SdpProblem(
            (3,),
            0,
            (np.eye(2),),
            np.zeros(0),
            (SdpConstraint((np.eye(3),), np.zeros(0), "==", 1.0),),
        )
        with pytest.raises(ValueError, match="mismatch"):
            solve(p)

    def test_rejects_non_finite_entries(self):
        bad = np.array([[np.nan, 0.0], [0.0, 1.0]])
        p = SdpProblem(
            (2,),
            0,
            (np.eye(2),),
            np.zeros(0),
            (SdpConstraint((bad,), np.zeros(0), "==", 1.0),),
        )
        with pytest.raises(ValueError, match="finite"):
            solve(p)


class TestDump:
    def test_sdpa_dump_roundtrippable_text(self, tmp_path):
        path = tmp_path / "problem.dat-s"
        a = np.array([[0.0, 1.0j], [-1.0j, 0.0]])
        write_sdpa(lambda_max_problem(a), str(path))
        text = path.read_text()
        assert "mDIM" in text and "nBLOCK" in text
        # every data line parses as matno blkno i j value
        data_lines = [
            ln
            for ln in text.splitlines()
            if ln and ln[0].isdigit() and "=" not in ln
        ]
        assert data_lines
        for line in data_lines:
            parts = line.split()
            assert len(parts) == 5
            float(parts[4])


class TestBackendEquivalence:
    def test_numpy_backend_matches(self):
        # Same instance under the pure-numpy fallback; subprocess because
        # the backend flag is read at import time.
        code = (
            "import numpy as np\n"
            "from secrelay.sdp import solve\n"
            "from tests.test_sdp import lambda_max_problem, random_hermitian\n"
            "rng = np.random.default_rng(71)\n"
            "c = random_hermitian(rng, 7)\n"
            "sol = solve(lambda_max_problem(c))\n"
            "print(repr(sol.status), float(sol.objective_value))\n"
        )
        env = dict(os.environ, SECRELAY_BACKEND="numpy")
        out = subprocess.run(
            [sys.executable, "-c", code],
            capture_output=True,
            text=True,
            env=env,
            cwd=os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
            check=True,
        )
        status, value = out.stdout.split()
        assert status == "'optimal'"
        rng = np.random.default_rng(71)
        c = random_hermitian(rng, 7)
        here = solve(lambda_max_problem(c))
        assert here.status == "optimal"
        assert float(value) == pytest.approx(here.objective_value, abs=1e-7)
