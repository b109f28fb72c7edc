"""Finite-difference verification of the frozen fourth-derivative formulas."""

import numpy as np
import numpy.testing as npt

from sandsmooth.surfaces import SURFACES, f1, f2, midpoints, sample_surface

# 7-point central stencil for the fourth derivative, O(h^4) accurate
_STENCIL = np.array([-1.0 / 6.0, 2.0, -13.0 / 2.0, 28.0 / 3.0, -13.0 / 2.0, 2.0, -1.0 / 6.0])
_OFFSETS = np.arange(-3, 4)


def _fd4(f, x, z, axis, h):
    acc = 0.0
    for w, k in zip(_STENCIL, _OFFSETS):
        if axis == 0:
            acc += w * f(x + k * h, z)
        else:
            acc += w * f(x, z + k * h)
    return acc / h**4


class TestFourthPartials:
    # sample points away from symmetry axes so nothing cancels by accident
    POINTS = [(0.12, 0.27), (0.31, 0.62), (0.48, 0.05), (0.66, 0.44), (0.83, 0.91)]

    def test_f1_d4x_matches_finite_difference(self):
        surf = SURFACES["f1"]
        for x, z in self.POINTS:
            fd = _fd4(surf.f, x, z, 0, 2e-3)
            npt.assert_allclose(surf.d4x(x, z), fd, rtol=1e-4, atol=1e-3)

    def test_f1_d4z_matches_finite_difference(self):
        surf = SURFACES["f1"]
        for x, z in self.POINTS:
            fd = _fd4(surf.f, x, z, 1, 2e-3)
            npt.assert_allclose(surf.d4z(x, z), fd, rtol=1e-4, atol=1e-3)

    def test_f1_d4z_closed_form(self):
        # cos(4 pi z) differentiates back to itself: d4z = (4 pi)^4 f1
        x = np.linspace(0.05, 0.95, 7)
        z = np.linspace(0.1, 0.9, 7)
        npt.assert_allclose(
            SURFACES["f1"].d4z(x, z), 256.0 * np.pi**4 * f1(x, z), rtol=1e-13
        )

    def test_f2_d4x_matches_finite_difference(self):
        surf = SURFACES["f2"]
        for x, z in self.POINTS:
            fd = _fd4(surf.f, x, z, 0, 2e-3)
            npt.assert_allclose(surf.d4x(x, z), fd, rtol=1e-4, atol=1e-3)

    def test_f2_d4z_matches_finite_difference(self):
        surf = SURFACES["f2"]
        for x, z in self.POINTS:
            fd = _fd4(surf.f, x, z, 1, 2e-3)
            npt.assert_allclose(surf.d4z(x, z), fd, rtol=1e-4, atol=1e-3)

    def test_vectorized_evaluation(self):
        rng = np.random.default_rng(7)
        x = rng.uniform(size=(4, 5))
        z = rng.uniform(size=(4, 5))
        for surf in SURFACES.values():
            for g in (surf.f, surf.d4x, surf.d4z):
                out = g(x, z)
                assert out.shape == (4, 5)
                scalar = g(float(x[2, 3]), float(z[2, 3]))
                npt.assert_allclose(out[2, 3], scalar, rtol=1e-15)


class TestSampling:
    def test_midpoints(self):
        npt.assert_allclose(midpoints(4), [0.125, 0.375, 0.625, 0.875], rtol=1e-15)
        assert midpoints(1).tolist() == [0.5]

    def test_sample_surface_layout(self):
        x, z, F = sample_surface(f2, 6, 9)
        assert F.shape == (6, 9)
        npt.assert_allclose(x, midpoints(6), rtol=1e-15)
        npt.assert_allclose(z, midpoints(9), rtol=1e-15)
        # F[i, j] = f(x_i, z_j): rows sweep x, columns sweep z
        npt.assert_allclose(F[2, 5], f2(x[2], z[5]), rtol=1e-15)

    def test_bump_peak_locations(self):
        # the dominant bump sits at (.2, .3); grid argmax should land nearby
        x, z, F = sample_surface(f2, 50, 50)
        i, j = np.unravel_index(np.argmax(F), F.shape)
        assert abs(x[i] - 0.2) < 0.05
        assert abs(z[j] - 0.3) < 0.05
