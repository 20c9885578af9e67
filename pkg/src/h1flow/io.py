"""File formats: curve snapshots, sampled curves, equilibrium parameters, reports."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .curve import Curve, SampledCurve
from .equilibria import EquilibriumParams
from .errors import ParseError


def _jsonable(x):
    """Replace non-finite floats by the strings ``"inf"``, ``"-inf"``, ``"nan"``."""
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, float)):
        x = float(x)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def dump_json(obj, path):
    Path(path).write_text(json.dumps(_jsonable(obj), indent=2) + "\n")


def config_hash(config: dict) -> str:
    """SHA-256 of the canonical JSON form of a configuration."""
    text = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


# -- curves ---------------------------------------------------------------------


def curve_to_dict(c: Curve) -> dict:
    rows = [[z[0].real, z[0].imag, z[1].real, z[1].imag] for z in c.coeffs]
    return {"n_modes": c.n_modes, "coeffs": [[float(v) for v in r] for r in rows]}


def curve_from_dict(d: dict, source: str = "<dict>") -> Curve:
    if not isinstance(d, dict):
        raise ParseError(f"{source}: top level must be an object")
    if "n_modes" not in d:
        raise ParseError(f"{source}: missing field 'n_modes'")
    if "coeffs" not in d:
        raise ParseError(f"{source}: missing field 'coeffs'")
    n = d["n_modes"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise ParseError(f"{source}: field 'n_modes' must be a non-negative integer, got {n!r}")
    rows = d["coeffs"]
    if not isinstance(rows, list) or len(rows) != 2 * n + 1:
        got = len(rows) if isinstance(rows, list) else type(rows).__name__
        raise ParseError(f"{source}: field 'coeffs' must hold {2 * n + 1} rows, got {got}")
    arr = np.zeros((2 * n + 1, 2), dtype=complex)
    for i, r in enumerate(rows):
        if not isinstance(r, list) or len(r) != 4:
            raise ParseError(f"{source}: coeffs[{i}] (k={i - n}) must be [re_x, im_x, re_y, im_y]")
        try:
            v = [float(x) for x in r]
        except (TypeError, ValueError):
            raise ParseError(f"{source}: coeffs[{i}] (k={i - n}) has a non-numeric entry") from None
        if not all(math.isfinite(x) for x in v):
            raise ParseError(f"{source}: coeffs[{i}] (k={i - n}) has a non-finite entry")
        arr[i] = [v[0] + 1j * v[1], v[2] + 1j * v[3]]
    try:
        return Curve(arr)
    except ValueError as exc:
        raise ParseError(f"{source}: {exc}") from None


def _load_json(path):
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def save_curve(c: Curve, path):
    dump_json(curve_to_dict(c), path)


def load_curve(path) -> Curve:
    return curve_from_dict(_load_json(path), str(path))


def save_samples(s: SampledCurve, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["u", "x", "y"])
        for u, (x, y) in zip(s.u, s.samples):
            w.writerow([repr(float(u)), repr(float(x)), repr(float(y))])


def load_samples(path) -> SampledCurve:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["u", "x", "y"]:
        raise ParseError(f"{path}: line 1: expected header u,x,y")
    pts = []
    for i, r in enumerate(rows[1:], start=2):
        try:
            pts.append([float(r[1]), float(r[2])])
        except (IndexError, ValueError):
            raise ParseError(f"{path}: line {i}: expected three numbers") from None
    return SampledCurve(np.array(pts))


# -- equilibrium parameters -------------------------------------------------------


def save_params(p: EquilibriumParams, path, residual=None):
    dump_json(p.to_dict(residual), path)


def load_params(path) -> EquilibriumParams:
    d = _load_json(path)
    for key in ("a", "b", "c", "d", "ell"):
        if key not in d:
            raise ParseError(f"{path}: missing field {key!r}")
    try:
        return EquilibriumParams.from_dict(d)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from None


def save_probe_csv(probe, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sample", "energy_gap", "grad_norm", "ratio"])
        for i, (g, n, r) in enumerate(zip(probe.energy_gaps, probe.grad_norms, probe.ratios)):
            w.writerow([i, repr(float(g)), repr(float(n)), repr(float(r))])
