"""Green's function of ``d^2/du^2 - 1`` on the circle and convolution with it.

Convolution ``W * G`` is diagonal in Fourier space with multiplier
``-1/(k^2 + 1)``. The closed-form kernel is kept for a quadrature route that
checks the multiplier independently.
"""

from fractions import Fraction
from functools import lru_cache

import numpy as np

from .curve import TWO_PI, Curve, SampledCurve


def green_eval(u, u_hat):
    """Closed-form kernel ``-cosh(|u - u_hat| - pi) / (2 sinh pi)``.

    The difference is reduced into ``[0, 2 pi)`` before use, which makes the
    kernel symmetric and ``2 pi``-periodic in each argument.
    """
    d = np.mod(np.asarray(u, dtype=float) - np.asarray(u_hat, dtype=float), TWO_PI)
    return -np.cosh(d - np.pi) / (2.0 * np.sinh(np.pi))


@lru_cache(maxsize=None)
def _multipliers(n_modes):
    k = np.arange(-n_modes, n_modes + 1)
    m = -1.0 / (k.astype(float) ** 2 + 1.0)
    m.setflags(write=False)
    return m


class GreenMultiplier:
    """Diagonal symbol ``m_k = -1/(k^2 + 1)`` for ``k = -N..N``."""

    def __init__(self, n_modes: int):
        self.n_modes = int(n_modes)
        self.multipliers = _multipliers(self.n_modes)

    def __call__(self, c: Curve) -> Curve:
        return convolve_green(c)

    def __repr__(self):
        return f"GreenMultiplier(n_modes={self.n_modes})"


def convolve_green(c: Curve) -> Curve:
    """``W * G``; the unique periodic solution ``V`` of ``V'' - V = W``."""
    return Curve(_multipliers(c.n_modes)[:, None] * c.coeffs)


@lru_cache(maxsize=None)
def gregory_corrections(order: int = 12) -> np.ndarray:
    """End weights added to the trapezoidal rule at each end of an interval.

    With unit spacing, adding ``w_i`` at nodes ``i = 0..order-1`` (and mirrored
    at the far end) makes the rule exact for polynomials of degree below
    ``order``. Solved in exact rational arithmetic.
    """
    q = int(order)
    bern = _bernoulli(q + 1)
    rows = [[Fraction(i) ** j if j else Fraction(1) for i in range(q)] for j in range(q)]
    rhs = [bern[j + 1] / (j + 1) if j % 2 == 1 else Fraction(0) for j in range(q)]
    return np.array([float(x) for x in _solve_exact(rows, rhs)])


def _bernoulli(n):
    # B_0..B_n with B_1 = -1/2
    b = [Fraction(0)] * (n + 1)
    for m in range(n + 1):
        a = [Fraction(1, j + 1) for j in range(m + 1)]
        for j in range(m, 0, -1):
            for i in range(j):
                a[i] = (i + 1) * (a[i] - a[i + 1])
        b[m] = a[0]
    if n >= 1:
        b[1] = -b[1]
    return b


def _solve_exact(rows, rhs):
    n = len(rhs)
    aug = [list(r) + [v] for r, v in zip(rows, rhs)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col] / aug[col][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [aug[i][n] / aug[i][i] for i in range(n)]


def convolve_green_quadrature(s: SampledCurve, order: int = 12) -> SampledCurve:
    """``(W * G)(u_i) = int W(u_hat) G(u_i, u_hat) du_hat`` from samples only.

    For each node the integrand is smooth on ``[u_i, u_i + 2 pi]`` with a kink
    of the kernel at both ends, so the trapezoidal rule is corrected with
    Gregory end weights of the given order. ``order=0`` gives the plain
    trapezoidal rule, which is only second-order accurate here.
    """
    w_samples = s.samples
    m = s.grid_size
    h = TWO_PI / m
    weights = np.ones(m + 1)
    weights[0] = weights[-1] = 0.5
    if order:
        q = min(int(order), (m + 1) // 2)
        corr = gregory_corrections(q)
        weights[:q] += corr
        weights[m - q + 1:] += corr[::-1]
    kernel = green_eval(0.0, h * np.arange(m + 1)) * weights * h
    # node i integrates over samples i, i+1, ..., i+m (wrapping); node i+m is node i
    idx = (np.arange(m)[:, None] + np.arange(m + 1)[None, :]) % m
    return SampledCurve(np.einsum("ij,ijc->ic", np.broadcast_to(kernel, idx.shape), w_samples[idx]))
