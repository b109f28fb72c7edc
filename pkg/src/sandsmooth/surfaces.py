"""Benchmark surfaces for simulation studies and diagnostics.

Two standard test surfaces on the unit square: a twisted sinusoid whose
curvature varies sharply along x, and a two-bump Gaussian mixture.  Both
carry closed-form fourth partial derivatives, which the asymptotic reports
need (the leading bias of a second-order-penalty fit is driven by the
fourth partials).  The derivative formulas were derived symbolically and
verified against automatic differentiation before being frozen here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["TestSurface", "SURFACES", "f1", "f2", "midpoints", "sample_surface"]

_SX = 0.3
_SZ = 0.4
_W1 = 0.75 / (np.pi * _SX * _SZ)
_W2 = 0.45 / (np.pi * _SX * _SZ)


def f1(x, z):
    """sin(2 pi (x - 1/2)^3) * cos(4 pi z)."""
    u = np.asarray(x) - 0.5
    return np.sin(2.0 * np.pi * u**3) * np.cos(4.0 * np.pi * np.asarray(z))


def _f1_d4x(x, z):
    u = np.asarray(x) - 0.5
    w = 2.0 * np.pi * u**3
    poly_sin = 1296.0 * np.pi**4 * u**8 - 720.0 * np.pi**2 * u**2
    poly_cos = -2592.0 * np.pi**3 * u**5
    return (poly_sin * np.sin(w) + poly_cos * np.cos(w)) * np.cos(
        4.0 * np.pi * np.asarray(z)
    )


def _f1_d4z(x, z):
    return 256.0 * np.pi**4 * f1(x, z)


def _bumps(x, z):
    """The two Gaussian factors of f2, kept separate for derivative reuse."""
    x = np.asarray(x)
    z = np.asarray(z)
    g1 = np.exp(-((x - 0.2) / _SX) ** 2 - ((z - 0.3) / _SZ) ** 2)
    g2 = np.exp(-((x - 0.7) / _SX) ** 2 - ((z - 0.8) / _SZ) ** 2)
    return g1, g2


def f2(x, z):
    """Two-bump Gaussian mixture (bumps at (.2,.3) and (.7,.8))."""
    g1, g2 = _bumps(x, z)
    return _W1 * g1 + _W2 * g2


def _quartic(t, center, scale):
    # d^4/dt^4 exp(-q^2) = (16 q^4 - 48 q^2 + 12) exp(-q^2) / scale^4, q=(t-c)/s
    q = (np.asarray(t) - center) / scale
    return (16.0 * q**4 - 48.0 * q**2 + 12.0) / scale**4


def _f2_d4x(x, z):
    g1, g2 = _bumps(x, z)
    return _W1 * _quartic(x, 0.2, _SX) * g1 + _W2 * _quartic(x, 0.7, _SX) * g2


def _f2_d4z(x, z):
    g1, g2 = _bumps(x, z)
    return _W1 * _quartic(z, 0.3, _SZ) * g1 + _W2 * _quartic(z, 0.8, _SZ) * g2


@dataclass(frozen=True)
class TestSurface:
    """A named surface with its fourth partials in each axis direction."""

    name: str
    f: Callable
    d4x: Callable
    d4z: Callable


SURFACES = {
    "f1": TestSurface("f1", f1, _f1_d4x, _f1_d4z),
    "f2": TestSurface("f2", f2, _f2_d4x, _f2_d4z),
}


def midpoints(n: int) -> np.ndarray:
    """Cell midpoints (i - 1/2)/n, i = 1..n: the default sampling grid."""
    return (np.arange(n) + 0.5) / n


def sample_surface(f: Callable, n1: int, n2: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Evaluate f on the n1 x n2 midpoint grid; returns (x, z, F)."""
    x = midpoints(n1)
    z = midpoints(n2)
    return x, z, f(x[:, None], z[None, :])
