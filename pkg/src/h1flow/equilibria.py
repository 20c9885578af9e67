"""Stationary curves of the flow: multiply covered circles in a fixed chart.

Members are parametrised by ``(a, b, c, d, ell)`` as

    Y(u) = (a sin(ell u) + b cos(ell u) - b, -a cos(ell u) + b sin(ell u) + a) / ell + (c, d)

so that ``Y(0) = (c, d)`` and ``Y'(0) = (a, b)``. The centroid of ``Y`` is
``(c - b/ell, d + a/ell)``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import curve as cv
from .curve import Curve
from .errors import AmbiguousFrequency, TruncationTooSmall, ZeroArea


@dataclass(frozen=True)
class EquilibriumParams:
    a: float
    b: float
    c: float = 0.0
    d: float = 0.0
    ell: int = 1

    def __post_init__(self):
        if int(self.ell) != self.ell or self.ell < 1:
            raise ValueError(f"ell must be a positive integer, got {self.ell}")
        object.__setattr__(self, "ell", int(self.ell))

    @property
    def degenerate(self) -> bool:
        return self.a == 0.0 and self.b == 0.0

    @property
    def radius(self) -> float:
        return float(np.hypot(self.a, self.b)) / self.ell

    @property
    def center(self) -> np.ndarray:
        return np.array([self.c - self.b / self.ell, self.d + self.a / self.ell])

    def to_dict(self, residual=None):
        d = asdict(self)
        if residual is not None:
            d["residual"] = float(residual)
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(a=float(d["a"]), b=float(d["b"]), c=float(d["c"]), d=float(d["d"]), ell=int(d["ell"]))


def equilibrium_curve(p: EquilibriumParams, n_modes: int | None = None) -> Curve:
    """Exact coefficients of the stationary curve; only wavenumbers ``0, +-ell``."""
    n = p.ell if n_modes is None else int(n_modes)
    if n < p.ell:
        raise TruncationTooSmall(f"order {n} cannot hold an {p.ell}-fold circle")
    coeffs = np.zeros((2 * n + 1, 2), dtype=complex)
    coeffs[n] = p.center
    lead = np.array([p.b - 1j * p.a, -p.a - 1j * p.b]) / (2 * p.ell)
    coeffs[n + p.ell] = lead
    coeffs[n - p.ell] = np.conj(lead)
    return Curve(coeffs)


def equilibrium_area(p: EquilibriumParams) -> float:
    return float(np.pi * (p.a**2 + p.b**2) / p.ell)


def mode_energies(c: Curve) -> np.ndarray:
    """H^1 energy carried by each wavenumber ``k = 1..N`` (both signs, both components)."""
    n = c.n_modes
    k = np.arange(1, n + 1)
    pos = np.sum(np.abs(c.coeffs[n + 1:]) ** 2, axis=1)
    neg = np.sum(np.abs(c.coeffs[:n][::-1]) ** 2, axis=1)
    return 2 * np.pi * (1 + k**2) * (pos + neg)


def fit_equilibrium(c: Curve, gap: float = 0.01):
    """Closest member of the stationary family in the chart above.

    ``ell`` is the wavenumber carrying the most energy, ``(a, b)`` come from
    the counter-clockwise part of the ``+-ell`` coefficients, and ``(c, d)``
    are chosen so that the centroid matches. Returns ``(params, residual)``
    with the residual measured in the H^1 norm.

    Raises :class:`AmbiguousFrequency` when the two strongest wavenumbers are
    within ``gap`` (relative) of each other.
    """
    en = mode_energies(c)
    if en.size == 0 or en.max() == 0.0:
        raise AmbiguousFrequency("curve is constant; no frequency to fit", candidates=())
    order = np.argsort(en)[::-1]
    ell = int(order[0]) + 1
    if en.size > 1 and en[order[1]] > (1.0 - gap) * en[order[0]]:
        raise AmbiguousFrequency(
            f"wavenumbers {ell} and {order[1] + 1} carry energies within {gap:.0%}",
            candidates=(ell, int(order[1]) + 1),
        )
    n = c.n_modes
    x, y = c.coeffs[n + ell]
    z = ell * (x + 1j * y)
    a, b = -z.imag, z.real
    ctr = cv.centroid(c)
    p = EquilibriumParams(a=float(a), b=float(b), c=float(ctr[0] + b / ell), d=float(ctr[1] - a / ell), ell=ell)
    residual = cv.h1_norm(c - equilibrium_curve(p, n))
    return p, residual


def stationarity_residual(c: Curve) -> float:
    """``||X'' - E[X] R X'||_{L^2}``; zero exactly on the stationary family."""
    e = cv.energy(c)
    d1 = cv.derivative(c)
    return cv.l2_norm(cv.derivative(d1) - e * cv.quarter_turn(d1))
