"""Closed plane curves as truncated Fourier series, and their scalar functionals.

A :class:`Curve` of order ``N`` stores complex coefficients ``c_k`` in ``C^2``
for ``k = -N..N`` so that ``X(u) = sum_k c_k exp(iku)`` componentwise. Row ``i``
of :attr:`Curve.coeffs` holds the coefficient of wavenumber ``k = i - N``.

All quadratic functionals (area, Dirichlet energy, inner products) are
evaluated exactly from the coefficients. Length needs a quadrature grid because
``|X_u|`` is not band-limited.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSpeed, ZeroArea

TWO_PI = 2.0 * np.pi

# rotation through pi/2 counter-clockwise: R(x, y) = (-y, x)
QUARTER_TURN = np.array([[0.0, -1.0], [1.0, 0.0]])


class AliasRisk(UserWarning):
    """Sampled data carries energy above the requested truncation order."""


@dataclass(frozen=True, eq=False)
class Curve:
    """Band-limited map from the circle to the plane.

    Parameters
    ----------
    coeffs : array_like, shape (2N+1, 2)
        Complex Fourier coefficients for ``k = -N..N`` in ascending order.
        Must satisfy ``c_{-k} = conj(c_k)`` up to roundoff; the stored array is
        made exactly conjugate-symmetric.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 2 or c.shape[1] != 2 or c.shape[0] % 2 != 1:
            raise ValueError(f"coeffs must have shape (2N+1, 2), got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("curve coefficients must be finite")
        mirror = np.conj(c[::-1])
        scale = 1.0 + np.max(np.abs(c))
        if np.max(np.abs(c - mirror)) > 1e-10 * scale:
            raise ValueError("coefficients are not conjugate-symmetric; the curve would not be real")
        c = 0.5 * (c + mirror)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def n_modes(self) -> int:
        return (self.coeffs.shape[0] - 1) // 2

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.arange(-self.n_modes, self.n_modes + 1)

    @classmethod
    def zeros(cls, n_modes: int) -> "Curve":
        return cls(np.zeros((2 * n_modes + 1, 2), dtype=complex))

    @classmethod
    def from_real_modes(cls, n_modes, x_cos=None, x_sin=None, y_cos=None, y_sin=None, center=(0.0, 0.0)):
        """Build a curve from real cosine/sine amplitudes.

        ``x_cos[k-1]`` is the amplitude of ``cos(ku)`` in the x component and so
        on; missing arrays are treated as zero.
        """
        c = np.zeros((2 * n_modes + 1, 2), dtype=complex)
        c[n_modes] = center
        for comp, (cos_a, sin_a) in enumerate(((x_cos, x_sin), (y_cos, y_sin))):
            for k in range(1, n_modes + 1):
                a = 0.0 if cos_a is None or k > len(cos_a) else cos_a[k - 1]
                b = 0.0 if sin_a is None or k > len(sin_a) else sin_a[k - 1]
                c[n_modes + k, comp] = 0.5 * (a - 1j * b)
                c[n_modes - k, comp] = 0.5 * (a + 1j * b)
        return cls(c)

    def padded(self, n_modes: int) -> "Curve":
        """Same curve represented with ``n_modes >= self.n_modes``."""
        return Curve(_pad(self.coeffs, n_modes))

    def truncated(self, n_modes: int) -> "Curve":
        """Drop every wavenumber above ``n_modes``."""
        if n_modes >= self.n_modes:
            return self.padded(n_modes)
        lo = self.n_modes - n_modes
        return Curve(self.coeffs[lo:lo + 2 * n_modes + 1])

    def __call__(self, u):
        return evaluate(self, u)

    def _binary(self, other, op):
        n = max(self.n_modes, other.n_modes)
        return Curve(op(_pad(self.coeffs, n), _pad(other.coeffs, n)))

    def __add__(self, other):
        if not isinstance(other, Curve):
            return NotImplemented
        return self._binary(other, np.add)

    def __sub__(self, other):
        if not isinstance(other, Curve):
            return NotImplemented
        return self._binary(other, np.subtract)

    def __neg__(self):
        return Curve(-self.coeffs)

    def __mul__(self, scalar):
        if not np.isscalar(scalar) or np.iscomplexobj(scalar):
            return NotImplemented
        return Curve(float(scalar) * self.coeffs)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    def allclose(self, other: "Curve", atol: float = 1e-12) -> bool:
        n = max(self.n_modes, other.n_modes)
        return bool(np.max(np.abs(_pad(self.coeffs, n) - _pad(other.coeffs, n)), initial=0.0) <= atol)

    def __repr__(self):
        return f"Curve(n_modes={self.n_modes})"


@dataclass(frozen=True, eq=False)
class SampledCurve:
    """Curve values on the uniform grid ``u_j = 2 pi j / M``."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.array(self.samples, dtype=float)
        if s.ndim != 2 or s.shape[1] != 2:
            raise ValueError(f"samples must have shape (M, 2), got {s.shape}")
        if s.shape[0] < 4:
            raise ValueError("a sampled curve needs at least 4 points")
        if not np.all(np.isfinite(s)):
            raise ValueError("samples must be finite")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def grid_size(self) -> int:
        return self.samples.shape[0]

    @property
    def u(self) -> np.ndarray:
        return TWO_PI * np.arange(self.grid_size) / self.grid_size


def _pad(coeffs, n_modes):
    n = (coeffs.shape[0] - 1) // 2
    if n == n_modes:
        return coeffs
    if n_modes < n:
        raise ValueError(f"cannot pad order {n} down to {n_modes}")
    out = np.zeros((2 * n_modes + 1, 2), dtype=complex)
    out[n_modes - n:n_modes + n + 1] = coeffs
    return out


def _k(n_modes):
    return np.arange(-n_modes, n_modes + 1)


def default_grid(c: Curve) -> int:
    """Quadrature grid used for nonlinear integrands such as ``|X_u|``."""
    return 4 * (2 * c.n_modes + 1)


# -- evaluation and linear operations ---------------------------------------------


def evaluate(c: Curve, u):
    """Exact value of the Fourier sum at ``u`` (scalar or array)."""
    u = np.asarray(u, dtype=float)
    phase = np.exp(1j * np.multiply.outer(u, c.wavenumbers))
    return np.real(phase @ c.coeffs)


def derivative(c: Curve, order: int = 1) -> Curve:
    return Curve(((1j * c.wavenumbers) ** order)[:, None] * c.coeffs)


def quarter_turn(c: Curve) -> Curve:
    """Pointwise rotation by pi/2, ``RX``."""
    return Curve(c.coeffs @ QUARTER_TURN.T)


def rotate(c: Curve, theta: float) -> Curve:
    """Pointwise rotation of the image about the origin by ``theta``."""
    rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    return Curve(c.coeffs @ rot.T)


def shift(c: Curve, s: float) -> Curve:
    """The curve ``u -> X(u + s)``."""
    return Curve(np.exp(1j * c.wavenumbers * s)[:, None] * c.coeffs)


def translate(c: Curve, offset) -> Curve:
    out = np.array(c.coeffs)
    out[c.n_modes] += np.asarray(offset, dtype=float)
    return Curve(out)


def reverse_orientation(c: Curve) -> Curve:
    """The curve ``u -> X(2 pi - u)``; flips the sign of the area."""
    return Curve(c.coeffs[::-1])


# -- inner products and functionals --------------------------------------------


def _aligned(v, w):
    n = max(v.n_modes, w.n_modes)
    return _pad(v.coeffs, n), _pad(w.coeffs, n), _k(n)


def l2_inner(v: Curve, w: Curve) -> float:
    a, b, _ = _aligned(v, w)
    return float(TWO_PI * np.sum(np.real(a * np.conj(b))))


def h1_inner(v: Curve, w: Curve) -> float:
    """``int V.W du + int V_u.W_u du`` via Parseval."""
    a, b, k = _aligned(v, w)
    return float(TWO_PI * np.sum((1.0 + k**2)[:, None] * np.real(a * np.conj(b))))


def l2_norm(c: Curve) -> float:
    return float(np.sqrt(l2_inner(c, c)))


def h1_norm(c: Curve) -> float:
    return float(np.sqrt(h1_inner(c, c)))


def centroid(c: Curve) -> np.ndarray:
    return np.real(c.coeffs[c.n_modes]).copy()


def centered(c: Curve) -> Curve:
    out = np.array(c.coeffs)
    out[c.n_modes] = 0.0
    return Curve(out)


def centered_h1_norm(c: Curve) -> float:
    return h1_norm(centered(c))


def dirichlet(c: Curve) -> float:
    """``Q[X] = 1/2 int |X_u|^2 du = pi sum k^2 |c_k|^2``."""
    k = c.wavenumbers
    return float(np.pi * np.sum(k[:, None] ** 2 * np.abs(c.coeffs) ** 2))


def area(c: Curve) -> float:
    """Signed area ``-1/2 int X . R X_u du``; positive for counter-clockwise loops."""
    k = c.wavenumbers
    x, y = c.coeffs[:, 0], c.coeffs[:, 1]
    return float(TWO_PI * np.sum(k * np.imag(x * np.conj(y))))


def eps_area(c: Curve) -> float:
    """Scale-aware threshold below which ``|A|`` counts as zero."""
    return 1e-12 * (1.0 + h1_inner(c, c))


def energy(c: Curve, eps: float | None = None) -> float:
    """Area-normalised Dirichlet energy ``Q/A``."""
    a = area(c)
    if abs(a) <= (eps_area(c) if eps is None else eps):
        raise ZeroArea(f"signed area {a:.3e} is below the zero-area guard")
    return dirichlet(c) / a


def speeds(c: Curve, grid: int | None = None) -> np.ndarray:
    """``|X_u|`` on the uniform grid of size ``grid``."""
    m = default_grid(c) if grid is None else int(grid)
    return np.linalg.norm(sample(derivative(c), m).samples, axis=1)


def length(c: Curve, grid: int | None = None) -> float:
    """Trapezoidal quadrature of ``|X_u|``; spectrally accurate for smooth speeds."""
    m = default_grid(c) if grid is None else int(grid)
    if m < 2 * c.n_modes + 1:
        raise ValueError(f"grid {m} is too coarse for order {c.n_modes}")
    return float(TWO_PI * np.mean(speeds(c, m)))


def iso_ratio(c: Curve, grid: int | None = None, eps: float | None = None) -> float:
    """``L^2 / (4 pi |A|)``, or ``inf`` when the area vanishes."""
    a = area(c)
    if abs(a) <= (eps_area(c) if eps is None else eps):
        return float("inf")
    return length(c, grid) ** 2 / (4.0 * np.pi * abs(a))


# -- sampling -------------------------------------------------------------------


def sample(c: Curve, grid: int) -> SampledCurve:
    """Values on ``u_j = 2 pi j / grid``; exact, via the inverse FFT."""
    m = int(grid)
    n = c.n_modes
    if m < 2 * n + 1:
        # coarse grids alias, but values at the nodes are still exact
        u = TWO_PI * np.arange(m) / m
        return SampledCurve(evaluate(c, u))
    spectrum = np.zeros((m, 2), dtype=complex)
    spectrum[_k(n) % m] = c.coeffs
    return SampledCurve(np.real(np.fft.ifft(spectrum, axis=0)) * m)


def project_to_modes(s: SampledCurve, n_modes: int, alias_tol: float = 1e-10) -> Curve:
    """Discrete Fourier projection of samples onto wavenumbers ``|k| <= n_modes``.

    Issues an :class:`AliasRisk` warning when the discarded part of the
    spectrum exceeds ``alias_tol`` relative to the retained part.
    """
    m = s.grid_size
    if m < 2 * n_modes + 1:
        raise ValueError(f"need at least {2 * n_modes + 1} samples for order {n_modes}, got {m}")
    spectrum = np.fft.fft(s.samples, axis=0) / m
    keep = _k(n_modes) % m
    coeffs = spectrum[keep]
    discarded = np.ones(m, dtype=bool)
    discarded[keep] = False
    tail = np.sqrt(np.sum(np.abs(spectrum[discarded]) ** 2))
    total = np.sqrt(np.sum(np.abs(coeffs) ** 2))
    if tail > alias_tol * max(total, 1e-300):
        warnings.warn(
            f"samples carry relative energy {tail / max(total, 1e-300):.2e} above mode {n_modes}",
            AliasRisk,
            stacklevel=2,
        )
    return Curve(coeffs)


def truncation_error(s: SampledCurve, n_modes: int) -> float:
    """Relative spectral energy of ``s`` above wavenumber ``n_modes``."""
    m = s.grid_size
    spectrum = np.fft.fft(s.samples, axis=0) / m
    kk = np.fft.fftfreq(m, 1.0 / m)
    high = np.abs(kk) > n_modes
    total = np.sqrt(np.sum(np.abs(spectrum) ** 2))
    return float(np.sqrt(np.sum(np.abs(spectrum[high]) ** 2)) / total) if total > 0 else 0.0


def fit_samples(points, n_modes: int) -> Curve:
    """Project raw ``(M, 2)`` samples on the uniform grid without alias warnings."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AliasRisk)
        return project_to_modes(SampledCurve(points), n_modes)


# -- reparametrisation ----------------------------------------------------------


def reparam_constant_speed(c: Curve, grid: int | None = None, n_out: int | None = None,
                           eps_speed: float = 1e-8, newton_steps: int = 4) -> Curve:
    """Reparametrise the image of ``c`` to constant speed ``L / 2 pi``.

    Arclength is tabulated on a dense grid and inverted by monotone linear
    interpolation; the parameter values are then polished with Newton steps
    on a spectral representation of the arclength function. The new curve is
    evaluated exactly at the polished parameters and projected to ``n_out``
    modes.
    """
    n_out = c.n_modes if n_out is None else int(n_out)
    m = max(16 * (2 * max(c.n_modes, n_out) + 1), 0 if grid is None else int(grid))
    spd = speeds(c, m)
    if spd.min() <= eps_speed:
        raise DegenerateSpeed(f"minimum speed {spd.min():.3e} is below {eps_speed:.1e}")

    u = TWO_PI * np.arange(m) / m
    total = TWO_PI * spd.mean()
    # spectral antiderivative of the speed: s(u) = total u / 2pi + periodic part
    sp = np.fft.fft(spd) / m
    kk = np.fft.fftfreq(m, 1.0 / m)
    integ = np.zeros_like(sp)
    nz = kk != 0
    integ[nz] = sp[nz] / (1j * kk[nz])
    if m % 2 == 0:
        integ[m // 2] = 0.0

    def arclength(v):
        ph = np.exp(1j * np.multiply.outer(v, kk))
        return total * v / TWO_PI + np.real(ph @ integ) - np.real(np.sum(integ))

    def speed_at(v):
        return np.linalg.norm(evaluate(derivative(c), v), axis=-1)

    s_grid = np.concatenate([arclength(u), [total]])
    u_grid = np.concatenate([u, [TWO_PI]])
    target = total * np.arange(m) / m
    v = np.interp(target, s_grid, u_grid)
    for _ in range(newton_steps):
        v = v - (arclength(v) - target) / speed_at(v)
    return fit_samples(evaluate(c, v), n_out)


def circular_parts(c: Curve):
    """Split each coefficient into counter-clockwise and clockwise circles.

    Returns ``(p, q)`` with ``c_k = p_k (1, -i) + q_k (1, i)``; ``p_k`` is the
    amplitude of the loop traversed in the direction of ``exp(iku)`` rotating
    counter-clockwise for ``k > 0``.
    """
    x, y = c.coeffs[:, 0], c.coeffs[:, 1]
    return 0.5 * (x + 1j * y), 0.5 * (x - 1j * y)


def symmetrize(c: Curve, n: int, m: int) -> Curve:
    """Drop every circular component that violates ``X(u + 2pi/m) = Rot(2 pi n/m) X(u)``.

    A component ``p_k (1, -i)`` is compatible iff ``k = n (mod m)`` and
    ``q_k (1, i)`` iff ``k = -n (mod m)``. The forbidden parts are set to exact
    zeros, so the result satisfies the symmetry to the last bit where the flow
    can keep it.
    """
    k = c.wavenumbers
    p, q = circular_parts(c)
    p = np.where((k - n) % m == 0, p, 0.0)
    q = np.where((k + n) % m == 0, q, 0.0)
    return Curve(np.column_stack([p + q, -1j * p + 1j * q]))
