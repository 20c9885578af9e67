"""Post-processing of flow runs: rates, the gradient inequality, symmetry, isoperimetry."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import curve as cv
from .curve import TWO_PI, Curve
from .equilibria import EquilibriumParams, equilibrium_curve, fit_equilibrium
from .errors import AreaGuard, InsufficientTail, NotConverged, SymmetryViolated
from .flow import FlowConfig, TimeSeries, flow_run
from .gradients import grad_E


@dataclass(frozen=True)
class RateFit:
    """Least-squares fit ``log ||X(t) - X(T)||_{H^1} ~ log(prefactor) - rate t``."""

    rate: float
    prefactor: float
    r_squared: float
    n_points: int
    t: np.ndarray = field(repr=False)
    distance: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)

    def to_dict(self):
        return {"rate": self.rate, "prefactor": self.prefactor, "r_squared": self.r_squared,
                "n_points": self.n_points}


def estimate_rate(ts: TimeSeries, terminal: Curve | None = None, tail_fraction: float = 0.3,
                  floor: float = 1e-13, floor_factor: float = 1e3, min_points: int = 10) -> RateFit:
    """Exponential convergence rate from the tail of a recorded run.

    The distance to the terminal curve stands in for the distance to the
    limit. It is only faithful while it dominates ``||X(T) - Y||``, which is
    of the order ``||DE[X(T)]|| / rate``, so distances below
    ``max(floor, floor_factor * ||DE[X(T)]||)`` are discarded. The fit uses the
    final ``tail_fraction`` of the remaining time span. ``Phi(t) =
    sqrt(E(t) - E(T))`` is recorded alongside.
    """
    if not ts.curves or len(ts.curves) != len(ts):
        raise ValueError("rate estimation needs the curves recorded along the run")
    terminal = ts.curves[-1] if terminal is None else terminal
    t = ts.t
    dist = np.array([cv.h1_norm(c - terminal) for c in ts.curves])
    e = ts.column("energy")
    phi = np.sqrt(np.clip(e - e[-1], 0.0, None))
    try:
        g_end = cv.h1_norm(grad_E(terminal))
    except ZeroDivisionError:
        g_end = 0.0
    usable = dist > max(floor, floor_factor * g_end)
    if not usable.any():
        raise InsufficientTail("no recorded distance lies above the noise floor")
    t_last = t[usable][-1]
    t0 = t_last - tail_fraction * (t_last - t[0])
    mask = usable & (t >= t0)
    if mask.sum() < min_points:
        raise InsufficientTail(f"only {int(mask.sum())} tail points above the noise floor")
    tt, ld = t[mask], np.log(dist[mask])
    slope, intercept = np.polyfit(tt, ld, 1)
    pred = slope * tt + intercept
    ss_res = float(np.sum((ld - pred) ** 2))
    ss_tot = float(np.sum((ld - ld.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    return RateFit(rate=float(-slope), prefactor=float(math.exp(intercept)), r_squared=r2,
                   n_points=int(mask.sum()), t=tt, distance=dist[mask], phi=phi[mask])


# -- gradient inequality ----------------------------------------------------------


@dataclass(frozen=True)
class ProbeResult:
    min_ratio: float
    ratios: np.ndarray = field(repr=False)
    energy_gaps: np.ndarray = field(repr=False)
    grad_norms: np.ndarray = field(repr=False)
    n_excluded: int = 0

    def to_dict(self):
        return {"min_ratio": self.min_ratio, "n_samples": int(self.ratios.size + self.n_excluded),
                "n_used": int(self.ratios.size), "n_excluded": self.n_excluded,
                "median_ratio": float(np.median(self.ratios)) if self.ratios.size else float("nan")}


def random_h1_direction(n_modes: int, rng) -> Curve:
    """Isotropic Gaussian direction in H^1 coordinates, normalised to unit norm."""
    n = int(n_modes)
    k = np.arange(1, n + 1)
    coeffs = np.zeros((2 * n + 1, 2), dtype=complex)
    coeffs[n] = rng.standard_normal(2) / math.sqrt(TWO_PI)
    scale = 1.0 / np.sqrt(2.0 * TWO_PI * (1.0 + k**2))
    pos = (rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2))) * scale[:, None]
    coeffs[n + 1:] = pos
    coeffs[:n] = np.conj(pos[::-1])
    c = Curve(coeffs)
    return c / cv.h1_norm(c)


def gradient_inequality_probe(p: EquilibriumParams, n_samples: int = 200, ball_radius: float = 0.05,
                              n_modes: int = 16, seed: int = 0, gap_floor: float = 1e-14) -> ProbeResult:
    """Sample ``||DE[Y + W]|| / sqrt(E[Y + W] - ell)`` on the H^1 sphere of radius ``ball_radius``.

    Samples whose energy does not exceed ``ell + gap_floor`` are excluded.
    """
    rng = np.random.default_rng(seed)
    y = equilibrium_curve(p, max(n_modes, p.ell))
    ratios, gaps, grads = [], [], []
    excluded = 0
    for _ in range(int(n_samples)):
        w = random_h1_direction(y.n_modes, rng) * ball_radius
        x = y + w
        a = cv.area(x)
        if a <= cv.eps_area(x):
            raise AreaGuard(f"perturbed area {a:.3e} tripped the guard; reduce ball_radius")
        gap = cv.dirichlet(x) / a - p.ell
        g = cv.h1_norm(grad_E(x))
        if gap <= gap_floor:
            excluded += 1
            continue
        ratios.append(g / math.sqrt(gap))
        gaps.append(gap)
        grads.append(g)
    ratios = np.array(ratios)
    return ProbeResult(min_ratio=float(ratios.min()) if ratios.size else float("nan"), ratios=ratios,
                       energy_gaps=np.array(gaps), grad_norms=np.array(grads), n_excluded=excluded)


# -- symmetry and quantisation ------------------------------------------------------


def reduce_symmetry(n: int, m: int) -> int:
    """Least positive representative of ``n`` modulo ``m`` (``m`` for multiples of ``m``)."""
    r = int(n) % int(m)
    return r if r else int(m)


def symmetry_check(c: Curve, n: int, m: int, grid: int | None = None) -> float:
    """Max over the grid of ``|X(u + 2 pi/m) - Rot(2 pi n/m) X(u)|``."""
    n = reduce_symmetry(n, m)
    diff = cv.shift(c, TWO_PI / m) - cv.rotate(c, TWO_PI * n / m)
    grid = cv.default_grid(c) if grid is None else grid
    return float(np.max(np.linalg.norm(cv.sample(diff, grid).samples, axis=1)))


@dataclass(frozen=True)
class QuantisationResult:
    ell: int
    deviation: float
    ok: bool


def quantisation_check(e_terminal: float, e_initial: float | None = None, tol: float = 1e-6) -> QuantisationResult:
    """Nearest integer to the terminal energy and whether it is an admissible level.

    Admissible means ``1 <= ell <= E_initial + tol``; the distance to ``ell`` is
    returned for the caller to judge.
    """
    ell = int(round(e_terminal))
    dev = abs(e_terminal - ell)
    ok = ell >= 1
    if e_initial is not None:
        ok = ok and ell <= e_initial + tol
    return QuantisationResult(ell=ell, deviation=float(dev), ok=bool(ok))


# -- isoperimetry pipeline ------------------------------------------------------------


@dataclass
class IsoperimetryReport:
    n: int
    m: int
    n_effective: int
    iso_initial: float
    energy_reparam: float
    reparam_gap: float
    energy_terminal: float
    ell: int
    quantisation_deviation: float
    fit_residual: float
    max_symmetry_deviation: float
    symmetry_roundoff: float
    termination: str
    ell_congruent: bool
    ell_at_least_n: bool
    chain_holds: bool
    config_hash: str = ""

    @property
    def certified(self) -> bool:
        return self.ell_congruent and self.ell_at_least_n and self.chain_holds

    def to_dict(self):
        d = asdict(self)
        d["certified"] = self.certified
        return d


def prepare_initial(c0: Curve, n: int = 1, m: int = 1, n_modes: int | None = None):
    """Orient to positive area, reparametrise to constant speed, clean the symmetry.

    Reversing ``u -> -u`` turns ``(n, m)`` symmetry into ``(m - n, m)``
    symmetry. The symmetric subspace is unstable under the flow for ``n > 1``,
    so roundoff left by the reparametrisation in forbidden circular components
    is zeroed; its size is returned.

    Returns ``(prepared, n_effective, roundoff)``.
    """
    reversed_ = cv.area(c0) < 0
    c = cv.reverse_orientation(c0) if reversed_ else c0
    n_eff = reduce_symmetry(m - n if reversed_ else n, m)
    raw = cv.reparam_constant_speed(c, n_out=n_modes or c0.n_modes)
    prepared = cv.symmetrize(raw, n_eff, m)
    return prepared, n_eff, cv.h1_norm(raw - prepared)


def isoperimetry_report(c0: Curve, n: int = 1, m: int = 1, result=None, cfg: FlowConfig | None = None,
                        n_modes: int | None = None, sym_tol: float = 1e-10, tol: float = 1e-6,
                        prepared: Curve | None = None) -> IsoperimetryReport:
    """Certify ``I[c0] >= ell >= n`` by flowing the constant-speed reparametrisation.

    ``result`` may be a ``(series, state)`` pair from an earlier
    :func:`flow_run` of the prepared curve (pass that curve as ``prepared``);
    otherwise the flow is run here with ``cfg``.
    """
    if symmetry_check(c0, n, m) > sym_tol:
        raise SymmetryViolated(f"initial curve is not ({n}, {m})-symmetric to {sym_tol:g}")
    iso0 = cv.iso_ratio(c0, grid=16 * (2 * c0.n_modes + 1))
    if prepared is None:
        prepared, n_eff, roundoff = prepare_initial(c0, n, m, n_modes)
    else:
        n_eff = reduce_symmetry(m - n if cv.area(c0) < 0 else n, m)
        roundoff = 0.0
    e_prep = cv.energy(prepared)
    if result is None:
        result = flow_run(prepared, cfg or FlowConfig(t_max=1e4, grad_stop=1e-8))
    series, state = result
    if series.reason != "grad_stop":
        raise NotConverged(f"flow stopped by {series.reason!r} before the gradient tolerance")
    e_term = cv.energy(state.curve)
    q = quantisation_check(e_term, e_prep, tol)
    _, residual = fit_equilibrium(state.curve)
    curves = series.curves or [state.curve]
    sym = max(symmetry_check(c, n_eff, m) for c in curves)
    return IsoperimetryReport(
        n=int(n), m=int(m), n_effective=n_eff, iso_initial=iso0, energy_reparam=e_prep,
        reparam_gap=abs(e_prep - iso0), energy_terminal=e_term, ell=q.ell,
        quantisation_deviation=q.deviation, fit_residual=residual, max_symmetry_deviation=sym,
        symmetry_roundoff=roundoff,
        termination=series.reason, ell_congruent=(q.ell - n_eff) % m == 0 and q.ok,
        ell_at_least_n=q.ell >= n_eff and q.deviation <= tol,
        chain_holds=bool(iso0 >= q.ell - tol and e_prep >= q.ell - tol),
    )
