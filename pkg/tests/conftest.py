"""Shared fixtures and independent quadrature oracles."""

import numpy as np
import pytest

from h1flow import Curve

TWO_PI = 2 * np.pi


def random_curve(rng, n_modes=8, decay=1.0, scale=1.0):
    """Random band-limited curve with coefficients damped like ``(1 + k^2)^-decay``."""
    n = n_modes
    k = np.arange(1, n + 1)
    coeffs = np.zeros((2 * n + 1, 2), dtype=complex)
    coeffs[n] = rng.standard_normal(2)
    pos = (rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2))) * ((1 + k**2) ** -decay)[:, None]
    coeffs[n + 1:] = pos
    coeffs[:n] = np.conj(pos[::-1])
    return Curve(scale * coeffs)


def points(c, m):
    """Values and derivatives on the uniform grid by direct summation (no FFT)."""
    u = TWO_PI * np.arange(m) / m
    k = c.wavenumbers
    e = np.exp(1j * np.outer(u, k))
    x = np.real(e @ c.coeffs)
    xu = np.real(e @ (1j * k[:, None] * c.coeffs))
    return u, x, xu


def trapz_periodic(f, m):
    """Trapezoid rule over one period; exact for trigonometric polynomials of degree < m."""
    return TWO_PI * np.mean(f, axis=0)


class Oracle:
    """Pointwise quadrature versions of the functionals."""

    @staticmethod
    def l2(v, w, m=256):
        _, a, _ = points(v, m)
        _, b, _ = points(w, m)
        return trapz_periodic(np.sum(a * b, axis=1), m)

    @staticmethod
    def h1(v, w, m=256):
        _, a, au = points(v, m)
        _, b, bu = points(w, m)
        return trapz_periodic(np.sum(a * b + au * bu, axis=1), m)

    @staticmethod
    def area(c, m=256):
        _, x, xu = points(c, m)
        rxu = np.column_stack([-xu[:, 1], xu[:, 0]])
        return -0.5 * trapz_periodic(np.sum(x * rxu, axis=1), m)

    @staticmethod
    def dirichlet(c, m=256):
        _, _, xu = points(c, m)
        return 0.5 * trapz_periodic(np.sum(xu**2, axis=1), m)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def oracle():
    return Oracle


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for key in sorted(results):
            terminalreporter.write_line(results[key])
