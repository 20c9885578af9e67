"""Initial curves for experiments."""

from __future__ import annotations

import numpy as np

from . import curve as cv
from .curve import TWO_PI, Curve
from .errors import CouldNotGeneratePositiveArea, LeafNotClosedAtOrigin, TruncationTooSmall


def circle(r: float = 1.0, ell: int = 1, center=(0.0, 0.0), n_modes: int | None = None) -> Curve:
    """``r (cos(ell u), sin(ell u)) + center``, an ``ell``-times covered circle."""
    if r <= 0 or ell < 1:
        raise ValueError("need r > 0 and ell >= 1")
    n = ell if n_modes is None else int(n_modes)
    if n < ell:
        raise TruncationTooSmall(f"order {n} cannot hold an {ell}-fold circle")
    coeffs = np.zeros((2 * n + 1, 2), dtype=complex)
    coeffs[n] = center
    coeffs[n + ell] = [0.5 * r, -0.5j * r]
    coeffs[n - ell] = [0.5 * r, 0.5j * r]
    return Curve(coeffs)


def ellipse(a: float = 2.0, b: float = 1.0, n_modes: int = 1) -> Curve:
    """``(a cos u, b sin u)``."""
    if a <= 0 or b <= 0:
        raise ValueError("semi-axes must be positive")
    return Curve.from_real_modes(int(n_modes), x_cos=[a], y_sin=[b])


def perturbed_circle(r: float = 1.0, ell: int = 1, mode: int = 3, amplitude: float = 0.01,
                     n_modes: int | None = None, center=(0.0, 0.0)) -> Curve:
    """Radially perturbed circle ``r (1 + eps cos(mode u)) (cos(ell u), sin(ell u))``.

    The perturbation occupies wavenumbers ``ell +- mode``, and the area is
    ``pi r^2 ell (1 + eps^2 / 2)``.
    """
    n = ell + mode if n_modes is None else int(n_modes)
    if n < ell + mode:
        raise TruncationTooSmall(f"order {n} cannot hold wavenumber {ell + mode}")
    base = circle(r, ell, center, n)
    out = np.array(base.coeffs)
    half = 0.5 * amplitude * r
    for k in (ell + mode, ell - mode):
        # half * (cos(ku), sin(ku)) for either sign of k
        out[n + k] += [0.5 * half, -0.5j * half]
        out[n - k] += [0.5 * half, 0.5j * half]
    c = Curve(out)
    if cv.area(c) <= 0:
        raise ValueError(f"perturbation amplitude {amplitude} destroys positive area")
    return c


def random_positive_area(n_modes: int = 8, norm_bound: float = 1.0, rng_seed=0,
                         max_attempts: int = 100, decay: float = 1.0) -> Curve:
    """Random band-limited curve with ``||X||_{H^1} = norm_bound`` and ``A > 0.1 norm_bound^2``.

    Coefficients are complex Gaussians damped by ``(1 + k^2)^(-decay)``.
    Accepts either an integer seed or a :class:`numpy.random.Generator`.
    """
    rng = np.random.default_rng(rng_seed)
    n = int(n_modes)
    k = np.arange(1, n + 1)
    damp = (1.0 + k**2) ** (-decay)
    for _ in range(max_attempts):
        coeffs = np.zeros((2 * n + 1, 2), dtype=complex)
        coeffs[n] = 0.3 * rng.standard_normal(2)
        pos = (rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2))) * damp[:, None]
        coeffs[n + 1:] = pos
        coeffs[:n] = np.conj(pos[::-1])
        c = Curve(coeffs)
        c = c * (norm_bound / cv.h1_norm(c))
        if cv.area(c) > 0.1 * norm_bound**2:
            return c
    raise CouldNotGeneratePositiveArea(f"no draw reached area {0.1 * norm_bound**2:g} in {max_attempts} attempts")


def petal_leaf(m: int = 4, samples: int = 256) -> np.ndarray:
    """One petal of the rose ``r = sin(m theta / 2)``, ``theta in [0, 2 pi / m]``.

    Returned as ``samples + 1`` points with both endpoints at the origin,
    parametrised by ``u = theta``.
    """
    theta = (TWO_PI / m) * np.arange(samples + 1) / samples
    r = np.sin(0.5 * m * theta)
    pts = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
    pts[0] = pts[-1] = 0.0
    return pts


def symmetric_from_leaf(leaf, n: int, m: int, n_modes: int = 32, eps_join: float = 1e-9) -> Curve:
    """Assemble ``X(u + 2 pi j / m) = Rot(2 pi n j / m) leaf(u)`` and project.

    ``leaf`` holds ``K + 1`` points on the uniform grid of ``[0, 2 pi / m]``,
    endpoints included; both endpoints must sit at the origin. The projection
    preserves the rotational symmetry because the assembled samples are
    symmetric under an index shift; roundoff in the forbidden components is
    then zeroed.
    """
    leaf = np.asarray(leaf, dtype=float)
    if not 1 <= n <= m:
        raise ValueError(f"need 1 <= n <= m, got n={n}, m={m}")
    if np.linalg.norm(leaf[0]) > eps_join or np.linalg.norm(leaf[-1]) > eps_join:
        raise LeafNotClosedAtOrigin("leaf endpoints must both lie at the origin")
    body = leaf[:-1]
    pieces = []
    for j in range(m):
        th = TWO_PI * n * j / m
        rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
        pieces.append(body @ rot.T)
    samples = np.concatenate(pieces)
    if samples.shape[0] < 2 * n_modes + 1:
        raise ValueError("leaf is too coarsely sampled for the requested order")
    return cv.symmetrize(cv.fit_samples(samples, n_modes), n, m)


def quadrifolium(n: int = 3, n_modes: int = 32, samples_per_leaf: int = 256) -> Curve:
    """Four-fold symmetric curve from a petal of the four-leaved rose.

    ``n = 3`` is the classical quadrifolium ``r = sin(2 theta)``; ``n = 2`` is the
    figure-eight shape with two petals each covered twice.
    """
    return symmetric_from_leaf(petal_leaf(4, samples_per_leaf), n, 4, n_modes)
