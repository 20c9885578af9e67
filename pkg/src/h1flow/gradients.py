"""H^1(du)-gradients of the Dirichlet energy, the signed area and ``E = Q/A``."""

from dataclasses import dataclass

import numpy as np

from . import curve as cv
from .curve import Curve
from .errors import ZeroArea


def _grad_q_coeffs(coeffs, k):
    k2 = (k.astype(float) ** 2)[:, None]
    return k2 / (k2 + 1.0) * coeffs


def _grad_a_coeffs(coeffs, k):
    k2 = k.astype(float) ** 2
    rot = coeffs @ cv.QUARTER_TURN.T
    return (-1j * k / (k2 + 1.0))[:, None] * rot


def grad_Q(c: Curve) -> Curve:
    """``DQ[X] = X'' * G``, i.e. ``c_k -> k^2 c_k / (k^2 + 1)``."""
    return Curve(_grad_q_coeffs(c.coeffs, c.wavenumbers))


def grad_A(c: Curve) -> Curve:
    """``DA[X] = R X' * G``, i.e. ``c_k -> -ik R c_k / (k^2 + 1)``."""
    return Curve(_grad_a_coeffs(c.coeffs, c.wavenumbers))


def grad_E(c: Curve, eps: float | None = None) -> Curve:
    """``DE[X] = (DQ[X] - E[X] DA[X]) / A[X]``."""
    a = cv.area(c)
    if abs(a) <= (cv.eps_area(c) if eps is None else eps):
        raise ZeroArea(f"signed area {a:.3e} is below the zero-area guard")
    e = cv.dirichlet(c) / a
    k = c.wavenumbers
    return Curve((_grad_q_coeffs(c.coeffs, k) - e * _grad_a_coeffs(c.coeffs, k)) / a)


def dQ(c: Curve, v: Curve) -> float:
    """Directional derivative ``<X_u, V_u>_{L^2}``."""
    return cv.l2_inner(cv.derivative(c), cv.derivative(v))


def dA(c: Curve, v: Curve) -> float:
    """Directional derivative ``-<R X_u, V>_{L^2}``."""
    return -cv.l2_inner(cv.quarter_turn(cv.derivative(c)), v)


@dataclass(frozen=True)
class Diagnostics:
    """Scalar functionals of one curve at flow time ``t``."""

    t: float
    length: float
    area: float
    dirichlet: float
    energy: float
    iso_ratio: float
    h1_norm: float
    centered_h1_norm: float
    centroid: tuple
    grad_norm: float
    step: float = 0.0

    def as_row(self):
        return [self.t, self.length, self.area, self.dirichlet, self.energy, self.iso_ratio,
                self.h1_norm, self.centered_h1_norm, self.centroid[0], self.centroid[1],
                self.grad_norm, self.step]


def diagnostics(c: Curve, t: float = 0.0, step: float = 0.0, grid: int | None = None) -> Diagnostics:
    """Evaluate every scalar functional of ``c``.

    Energy and gradient norm are ``inf`` when the area is below the guard.
    """
    a = cv.area(c)
    q = cv.dirichlet(c)
    zero = abs(a) <= cv.eps_area(c)
    ctr = cv.centroid(c)
    return Diagnostics(
        t=float(t),
        length=cv.length(c, grid),
        area=a,
        dirichlet=q,
        energy=float("inf") if zero else q / a,
        iso_ratio=cv.iso_ratio(c, grid),
        h1_norm=cv.h1_norm(c),
        centered_h1_norm=cv.centered_h1_norm(c),
        centroid=(float(ctr[0]), float(ctr[1])),
        grad_norm=float("inf") if zero else cv.h1_norm(grad_E(c)),
        step=float(step),
    )
