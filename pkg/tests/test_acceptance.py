"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The lines are collected and repeated in the pytest terminal summary. Run
``python3 tests/test_acceptance.py`` to print them without pytest.
"""

import time

import numpy as np
from scipy.integrate import quad

from h1flow import curve as cv
from h1flow import seeds
from h1flow.analysis import estimate_rate, gradient_inequality_probe, isoperimetry_report
from h1flow.equilibria import EquilibriumParams, equilibrium_area, equilibrium_curve, fit_equilibrium
from h1flow.flow import FlowConfig, conservation_report, flow_run
from h1flow.gradients import grad_A, grad_E, grad_Q
from h1flow.green import convolve_green, convolve_green_quadrature

from conftest import random_curve

PI = np.pi
RESULTS = {}

# regression pins for the probe minimum (200 samples, radius 0.05, 16 modes, seed 0)
PROBE_PINS = {1: 0.7592198976738394, 2: 1.1274648786327666}


def record(number, title):
    """Decorator recording PASS/FAIL for one criterion and printing the line."""

    def wrap(fn):
        def run(*args, **kwargs):
            detail = ""
            try:
                detail = fn(*args, **kwargs) or ""
            except BaseException as exc:
                RESULTS[number] = f"[FAIL] {number}. {title}: {type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
                print(RESULTS[number])
                raise
            RESULTS[number] = f"[PASS] {number}. {title}{': ' + detail if detail else ''}"
            print(RESULTS[number])

        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run

    return wrap


def gap(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


@record(1, "fundamental identities and Green convolution paths")
def test_fundamental_identities():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(100):
        v, w = random_curve(rng, 16), random_curve(rng, 16)
        one = cv.h1_inner(v, convolve_green(w)) + cv.l2_inner(v, w)
        two = cv.h1_inner(v, convolve_green(cv.derivative(w))) - cv.l2_inner(cv.derivative(v), w)
        worst = max(worst, abs(one), abs(two))
    assert worst < 1e-10
    c = random_curve(rng, 8)
    paths = gap(convolve_green_quadrature(cv.sample(c, 256)).samples, cv.sample(convolve_green(c), 256).samples)
    assert paths < 1e-8
    return f"identity error {worst:.1e}, quadrature vs multiplier {paths:.1e}"


@record(2, "gradients match central differences; DE is (-1)-homogeneous")
def test_gradient_correctness():
    rng = np.random.default_rng(2)
    h = 1e-5
    worst, pairs = 0.0, 0
    # unit-scale pairs: ||X|| = ||V|| = 1 in H^1 and A[X] > 0.1, so the O(h^2)
    # difference error stays far below the tolerance
    for pairs in range(1, 51):
        x = seeds.random_positive_area(8, norm_bound=1.0, rng_seed=rng)
        assert cv.area(x) > 0.1
        v = random_curve(rng, 8)
        v = v / cv.h1_norm(v)
        for f, g in ((cv.dirichlet, grad_Q), (cv.area, grad_A), (cv.energy, grad_E)):
            fd = (f(x + v * h) - f(x - v * h)) / (2 * h)
            worst = max(worst, abs(cv.h1_inner(g(x), v) - fd))
        for a in (0.5, 2.0, 7.0):
            assert cv.h1_norm(grad_E(x * a) - grad_E(x) / a) < 1e-12
    assert worst < 1e-7
    return f"worst directional mismatch {worst:.1e} over {pairs} pairs"


@record(3, "stationary family: residual, quantised energy, area, ratio, fit round trip")
def test_equilibrium_suite():
    rng = np.random.default_rng(3)
    for ell in range(1, 6):
        a, b, c, d = rng.uniform(-2, 2, 4)
        p = EquilibriumParams(a, b, c, d, ell)
        y = equilibrium_curve(p, 12)
        assert cv.h1_norm(grad_E(y)) < 1e-12
        assert abs(cv.energy(y) - ell) < 1e-12
        assert abs(cv.area(y) - PI * (a**2 + b**2) / ell) < 1e-12
        assert abs(equilibrium_area(p) - cv.area(y)) < 1e-12
        assert abs(cv.iso_ratio(y) - ell) < 1e-10
        q, res = fit_equilibrium(y)
        assert q.ell == ell and res < 1e-10
        assert gap([q.a, q.b, q.c, q.d], [a, b, c, d]) < 1e-10
    return "ell = 1..5"


@record(4, "conserved quantities, monotone energy, Q and area bounds, drift vs tolerance")
def test_conservation_suite():
    def run(tol):
        cfg = FlowConfig(rel_tol=tol, abs_tol=tol * 1e-2, t_max=50.0, grad_stop=0.0, record_every=0.5)
        ts, _ = flow_run(seeds.ellipse(2.0, 1.0, 32), cfg)
        return ts, conservation_report(ts)

    ts, coarse = run(1e-10)
    drift = max(coarse.h1_drift, coarse.centroid_drift, coarse.centered_drift)
    assert drift < 1e-7
    assert coarse.energy_increase <= 1e-12
    tol = 1e-12 + coarse.bound_slack
    assert coarse.q_margin >= -tol
    assert coarse.area_margin_low >= -tol and coarse.area_margin_high >= -tol
    assert coarse.passes()
    _, fine = run(1e-12)
    fine_drift = max(fine.h1_drift, fine.centroid_drift, fine.centered_drift)
    assert fine_drift * 10 <= drift
    return f"drift {drift:.1e} -> {fine_drift:.1e} ({drift / fine_drift:.0f}x)"


@record(5, "flows converge to integer energy levels")
def test_convergence_and_quantisation():
    cfg = FlowConfig(t_max=1e4, grad_stop=1e-8, record_every=0.5)
    t0 = time.perf_counter()
    ts, state = flow_run(seeds.ellipse(2.0, 1.0, 32), cfg)
    assert time.perf_counter() - t0 < 60
    assert ts.reason == "grad_stop"
    assert abs(cv.energy(state.curve) - 1.0) < 1e-6
    p, res = fit_equilibrium(state.curve)
    assert p.ell == 1 and res < 1e-6
    levels = []
    for ell in (1, 2):
        t0 = time.perf_counter()
        ts, state = flow_run(seeds.perturbed_circle(1.0, ell, 3, 0.05, n_modes=16), cfg)
        assert time.perf_counter() - t0 < 60
        assert ts.reason == "grad_stop"
        e = cv.energy(state.curve)
        assert abs(e - ell) < 1e-6
        levels.append(e)
    return f"ellipse fit residual {res:.1e}; perturbed circles at E = {levels[0]:.9f}, {levels[1]:.9f}"


@record(6, "exponential convergence rate of the ellipse flow")
def test_exponential_rate():
    ts, _ = flow_run(seeds.ellipse(2.0, 1.0, 32), FlowConfig(t_max=1e4, grad_stop=1e-8, record_every=0.5))
    fit = estimate_rate(ts)
    assert fit.rate > 0 and fit.r_squared > 0.99
    return f"c = {fit.rate:.4f}, r^2 = {fit.r_squared:.6f} on {fit.n_points} points"


@record(7, "gradient inequality probe near simple and double circles")
def test_gradient_inequality_probe():
    found = {}
    for ell, pin in PROBE_PINS.items():
        p = EquilibriumParams(1.0, 0.0, 0.0, 0.0, ell)
        first = gradient_inequality_probe(p, 200, 0.05, 16, seed=0)
        again = gradient_inequality_probe(p, 200, 0.05, 16, seed=0)
        assert first.min_ratio > 0
        assert first.min_ratio == again.min_ratio
        assert abs(first.min_ratio - pin) <= 0.01 * pin
        found[ell] = first.min_ratio
    return ", ".join(f"ell={k}: min ratio {v:.6f}" for k, v in found.items())


@record(8, "symmetry preservation and isoperimetric certificates")
def test_symmetry_and_isoperimetry():
    cfg = FlowConfig(t_max=1e4, grad_stop=1e-8, record_every=0.5)
    quad4 = isoperimetry_report(seeds.quadrifolium(3), 3, 4, cfg=cfg)
    assert quad4.max_symmetry_deviation < 1e-8
    assert quad4.ell >= 3 and (quad4.ell - 3) % 4 == 0
    assert quad4.iso_initial >= 3 and quad4.certified
    eight = isoperimetry_report(seeds.quadrifolium(2), 2, 4, cfg=cfg)
    assert eight.max_symmetry_deviation < 1e-8
    assert eight.certified and eight.iso_initial >= 2 and (eight.ell - 2) % 4 == 0
    c0 = seeds.ellipse(2.0, 1.0, 32)
    ts, state = flow_run(c0, cfg)
    ell = isoperimetry_report(c0, result=(ts, state), prepared=c0)
    assert ell.certified and ell.iso_initial >= 1
    e, i = ts.column("energy"), ts.column("iso_ratio")
    assert np.all(e >= i - 1e-12) and np.all(i >= 1 - 1e-12)
    return (f"quadrifolium I = {quad4.iso_initial:.4f} >= ell = {quad4.ell}; "
            f"figure-eight I = {eight.iso_initial:.4f} >= ell = {eight.ell}; ellipse I = {ell.iso_initial:.5f}")


@record(9, "scalar functional pins")
def test_scalar_pins():
    unit = seeds.circle(n_modes=4)
    got = [cv.length(unit), cv.area(unit), cv.dirichlet(unit), cv.energy(unit), cv.iso_ratio(unit)]
    assert gap(got, [2 * PI, PI, PI, 1.0, 1.0]) < 1e-12
    e = seeds.ellipse(2.0, 1.0, 32)
    assert abs(cv.area(e) - 2 * PI) < 1e-12
    assert abs(cv.dirichlet(e) - 2.5 * PI) < 1e-12
    length = quad(lambda u: np.sqrt(4 * np.sin(u) ** 2 + np.cos(u) ** 2), 0, 2 * PI, epsabs=1e-13, limit=200)[0]
    assert abs(cv.length(e) - length) < 1e-10
    assert abs(cv.length(e) - 9.68845) < 1e-4
    assert abs(cv.iso_ratio(e) - 1.18884) < 1e-3
    r = cv.reparam_constant_speed(e)
    assert abs(cv.dirichlet(r) - cv.length(r) ** 2 / (4 * PI)) < 1e-3
    return f"ellipse L = {cv.length(e):.8f}, I = {cv.iso_ratio(e):.8f}"


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            try:
                fn()
            except Exception:
                pass
