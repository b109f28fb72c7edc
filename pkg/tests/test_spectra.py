import numpy as np
import numpy.testing as npt
import pytest

from sandsmooth.basis import AxisSpec, design_matrix, diff_matrix
from sandsmooth.spectra import (
    SingularGram,
    apply_smoother,
    axis_spectrum,
    build_spectrum,
    half_inverse,
    trace_smoother,
)


def dense_smoother(B, D, lam):
    """Direct-solve oracle for S(lam) = B (B'B + lam D'D)^{-1} B'."""
    return B @ np.linalg.solve(B.T @ B + lam * D.T @ D, B.T)


def midpoints(n):
    return (np.arange(n) + 0.5) / n


class TestHalfInverse:
    def test_identity(self):
        npt.assert_allclose(half_inverse(np.eye(4)), np.eye(4))

    def test_diagonal(self):
        npt.assert_allclose(half_inverse(np.diag([4.0, 9.0])), np.diag([0.5, 1 / 3]))

    def test_random_spd_recovers_identity(self):
        rng = np.random.default_rng(42)
        X = rng.normal(size=(10, 10))
        M = X @ X.T + 10 * np.eye(10)
        H = half_inverse(M)
        npt.assert_allclose(H, H.T, atol=1e-12)
        npt.assert_allclose(H @ M @ H, np.eye(10), atol=1e-10)

    def test_singular_rejected(self):
        M = np.diag([1.0, 1.0, 0.0])
        with pytest.raises(SingularGram):
            half_inverse(M)


class TestBuildSpectrum:
    def test_identity_design_projection(self):
        n = 8
        sp = build_spectrum(np.eye(n), diff_matrix(n, 1))
        S0 = sp.A @ sp.A.T
        npt.assert_allclose(S0, np.eye(n), atol=1e-10)

    def test_orthonormal_columns(self):
        spec = AxisSpec(3, 2, 10)
        sp = axis_spectrum(midpoints(20), spec)
        npt.assert_allclose(sp.A.T @ sp.A, np.eye(spec.n_basis), atol=1e-10)

    def test_projection_identity(self):
        spec = AxisSpec(3, 2, 10)
        B = design_matrix(midpoints(20), spec)
        sp = build_spectrum(B, diff_matrix(spec.n_basis, 2), spec)
        proj = B @ np.linalg.solve(B.T @ B, B.T)
        npt.assert_allclose(sp.A @ sp.A.T, proj, atol=1e-10)

    def test_reconstructs_dense_smoother(self):
        spec = AxisSpec(3, 2, 10)
        B = design_matrix(midpoints(20), spec)
        D = diff_matrix(spec.n_basis, 2)
        sp = build_spectrum(B, D, spec)
        for lam in [1.0, 0.01, 37.5, 1e4, 0.0]:
            st = 1.0 / (1.0 + lam * sp.s)
            S = (sp.A * st) @ sp.A.T
            npt.assert_allclose(S, dense_smoother(B, D, lam) if lam > 0 else B @ np.linalg.solve(B.T @ B, B.T), atol=1e-9)

    def test_null_space_dimension(self):
        for spec in [AxisSpec(3, 2, 10), AxisSpec(3, 3, 9), AxisSpec(1, 1, 12)]:
            sp = axis_spectrum(midpoints(30), spec)
            n_zero = int(np.sum(sp.s < 1e-8 * sp.s.max()))
            assert n_zero == spec.penalty_order
            assert np.all(sp.s >= 0)
            assert np.all(np.diff(sp.s) >= 0)

    def test_empty_support_reports_indices(self):
        # all data in the left half: rightmost cubic basis functions unsupported
        spec = AxisSpec(3, 2, 10)
        with pytest.raises(SingularGram, match=r"\d"):
            axis_spectrum(np.linspace(0.0, 0.45, 15), spec)


class TestApplySmoother:
    def test_projection_fixes_range(self):
        spec = AxisSpec(3, 2, 8)
        B = design_matrix(midpoints(16), spec)
        sp = build_spectrum(B, diff_matrix(spec.n_basis, 2), spec)
        V = B @ np.random.default_rng(0).normal(size=(spec.n_basis, 3))
        npt.assert_allclose(apply_smoother(sp, 0.0, V), V, atol=1e-10)

    def test_huge_lambda_is_polynomial_fit(self):
        spec = AxisSpec(3, 2, 10)
        x = midpoints(25)
        sp = axis_spectrum(x, spec)
        rng = np.random.default_rng(5)
        V = rng.normal(size=(25, 2))
        got = apply_smoother(sp, 1e12, V)
        X = np.vstack([np.ones_like(x), x]).T
        expected = X @ np.linalg.lstsq(X, V, rcond=None)[0]
        npt.assert_allclose(got, expected, atol=1e-4)

    def test_matches_dense(self):
        spec = AxisSpec(1, 1, 3)
        B = design_matrix(midpoints(6), spec)
        D = diff_matrix(spec.n_basis, 1)
        sp = build_spectrum(B, D, spec)
        V = np.random.default_rng(9).normal(size=(6, 4))
        npt.assert_allclose(apply_smoother(sp, 0.7, V), dense_smoother(B, D, 0.7) @ V, atol=1e-10)

    def test_linearity(self):
        sp = axis_spectrum(midpoints(12), AxisSpec(3, 2, 5))
        rng = np.random.default_rng(2)
        U, V = rng.normal(size=(2, 12, 3))
        lhs = apply_smoother(sp, 2.5, 1.3 * U - 0.4 * V)
        rhs = 1.3 * apply_smoother(sp, 2.5, U) - 0.4 * apply_smoother(sp, 2.5, V)
        npt.assert_allclose(lhs, rhs, atol=1e-10)

    def test_negative_lambda_rejected(self):
        sp = axis_spectrum(midpoints(10), AxisSpec(3, 2, 4))
        with pytest.raises(ValueError):
            apply_smoother(sp, -1.0, np.zeros(10))


class TestTrace:
    def test_lambda_zero_gives_basis_dimension(self):
        spec = AxisSpec(3, 2, 10)
        sp = axis_spectrum(midpoints(30), spec)
        assert trace_smoother(sp.s, 0.0) == pytest.approx(spec.n_basis)

    def test_lambda_infinite_gives_null_dimension(self):
        sp = axis_spectrum(midpoints(30), AxisSpec(3, 2, 10))
        assert trace_smoother(sp.s, 1e12) == pytest.approx(2.0, abs=1e-6)

    def test_matches_dense_trace(self):
        spec = AxisSpec(3, 2, 6)
        B = design_matrix(midpoints(14), spec)
        D = diff_matrix(spec.n_basis, 2)
        sp = build_spectrum(B, D, spec)
        assert trace_smoother(sp.s, 1.0) == pytest.approx(np.trace(dense_smoother(B, D, 1.0)), abs=1e-9)

    def test_strictly_decreasing(self):
        sp = axis_spectrum(midpoints(20), AxisSpec(3, 2, 8))
        lams = np.logspace(-4, 6, 15)
        traces = [trace_smoother(sp.s, lam) for lam in lams]
        assert all(a > b for a, b in zip(traces, traces[1:]))
        assert all(sp.spec.penalty_order <= t <= sp.spec.n_basis for t in traces)
