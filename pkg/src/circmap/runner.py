"""Run orchestration: region loading, artifact writing and error sweeps.

A region file is JSON with the layout::

    {
      "bounded": true,
      "alpha": [0.2, 0.2],
      "n": 128,
      "curves": [
        {"type": "ellipse", "params": {"center": [-0.1, 0.5], "a": 0.3, "b": 0.2}},
        {"type": "circle", "params": {"center": [0, 0], "radius": 2}}
      ]
    }

Complex numbers are ``[re, im]`` pairs (a bare real number is accepted).
For a bounded region the last curve is the outer boundary.  Optional keys:
``name`` and ``interior_points`` (one ``[re, im]`` or ``null`` per curve).
Curves are given in their natural counterclockwise form; orientations
are assigned from ``bounded``.  A ``sampled`` curve takes ``positions``
(and optionally ``derivatives``) as lists of pairs plus an
``orientation`` of ``"ccw"`` or ``"cw"``.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import GeometryError, ParamCurve, SampledCurve, spectral_derivative, uniform_nodes
from .koebe import (
    CircularMapSolution,
    RegionSpec,
    SolverConfig,
    check_region,
    circular_map,
    forward_eval,
    inverse_eval,
    winding_numbers,
)
from .library import EXAMPLES, example_region, exact_map

log = logging.getLogger(__name__)

SUMMARY_FILE = "summary.json"
ERRORS_FILE = "errors.json"
FAILURE_FILE = "failure.json"
DIAGNOSTICS_FILE = "diagnostics.json"
LOG_FILE = "run.log"


class RegionFileError(ValueError):
    """The region file is malformed."""


# -- region loading -----------------------------------------------------------

def _complex(value, what: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise RegionFileError(f"{what}: expected a number or an [re, im] pair, got {value!r}")


def curve_from_dict(d: dict) -> ParamCurve:
    try:
        kind, p = d["type"], d.get("params", {})
    except (KeyError, TypeError):
        raise RegionFileError(f"curve entry needs a 'type': {d!r}") from None
    try:
        if kind == "circle":
            return ParamCurve.circle(_complex(p["center"], "center"), float(p["radius"]))
        if kind == "ellipse":
            return ParamCurve.ellipse(
                _complex(p["center"], "center"), float(p["a"]), float(p["b"]),
                float(p.get("rotation", 0.0)),
            )
        if kind == "inverted_ellipse":
            return ParamCurve.inverted_ellipse(float(p["p"]))
        if kind == "sampled":
            pos = [_complex(v, "positions") for v in p["positions"]]
            der = p.get("derivatives")
            if der is not None:
                der = [_complex(v, "derivatives") for v in der]
            return ParamCurve.sampled(pos, der, p.get("orientation", "ccw"))
    except KeyError as exc:
        raise RegionFileError(f"{kind} curve is missing parameter {exc}") from None
    raise RegionFileError(f"unknown curve type {kind!r}")


def region_from_dict(d: dict) -> tuple[RegionSpec, int | None]:
    try:
        bounded = d["bounded"]
        curves = d["curves"]
        alpha = d["alpha"]
    except (KeyError, TypeError):
        raise RegionFileError("region needs 'bounded', 'alpha' and 'curves'") from None
    if not isinstance(bounded, bool):
        raise RegionFileError("'bounded' must be true or false")
    if not isinstance(curves, list) or not curves:
        raise RegionFileError("'curves' must be a non-empty list")
    pts = d.get("interior_points")
    if pts is not None:
        pts = tuple(None if v is None else _complex(v, "interior_points") for v in pts)
    region = RegionSpec(
        bounded,
        tuple(curve_from_dict(c) for c in curves),
        _complex(alpha, "alpha"),
        interior_points=pts,
        name=str(d.get("name", "")),
    )
    n = d.get("n")
    return region, (int(n) if n is not None else None)


def _box(z, pad):
    return z.real.min() - pad, z.real.max() + pad, z.imag.min() - pad, z.imag.max() + pad


def _boxes_meet(a, b, pad) -> bool:
    return not (a[1] + pad < b[0] or b[1] + pad < a[0] or a[3] + pad < b[2] or b[3] + pad < a[2])


def check_overlaps(region: RegionSpec, n: int = 256) -> None:
    """Reject crossing or touching curves and misplaced ``alpha``.

    Every curve is sampled; nesting is tested with discrete winding numbers
    and the pairwise sample distance must stay above a fraction of the
    local node spacing.
    """
    if any(c.kind == "sampled" for c in region.curves):
        n = next(c.params["n"] for c in region.curves if c.kind == "sampled")
    boundary = region.sample(n)
    check_region(region, boundary)
    spacing = [np.abs(np.diff(c.positions, append=c.positions[:1])).max() for c in boundary]
    boxes = [_box(c.positions, 0.0) for c in boundary]
    for i in range(region.m):
        for j in range(i + 1, region.m):
            if not _boxes_meet(boxes[i], boxes[j], spacing[i] + spacing[j]):
                continue
            d = np.abs(boundary[i].positions[:, None] - boundary[j].positions[None, :]).min()
            if d < 0.25 * min(spacing[i], spacing[j]):
                raise GeometryError(f"curves {i + 1} and {j + 1} overlap or touch")


def load_region(source: str | Path, n: int | None = None) -> tuple[RegionSpec, int]:
    """Built-in example id or path to a region file; returns the region and
    the node count to use (argument, then file, then 128)."""
    src = str(source)
    if src in EXAMPLES:
        n = n or 128
        region = example_region(src, n)
        check_overlaps(region, n)
        return region, n
    path = Path(src)
    if not path.exists():
        raise RegionFileError(f"{src!r} is neither a built-in example nor a file")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise RegionFileError(f"{path}: invalid JSON ({exc})") from None
    region, file_n = region_from_dict(data)
    if not region.name:
        region = RegionSpec(region.bounded, region.curves, region.alpha,
                            region.interior_points, path.stem)
    n = n or file_n or 128
    check_overlaps(region)
    return region, n


# -- error report -------------------------------------------------------------

@dataclass(frozen=True)
class ErrorReport:
    n: int
    e_omega: float
    e_z: float
    e_r: float

    def as_dict(self) -> dict:
        return {"n": self.n, "E_omega": self.e_omega, "E_z": self.e_z, "E_r": self.e_r}


def error_report(name: str, solution: CircularMapSolution) -> ErrorReport | None:
    """Max boundary-value, center and radius errors against the closed form
    for ``name``; ``None`` when the example has no exact map."""
    ex = exact_map(name)
    if ex is None:
        return None
    n = solution.n
    ref = ex.boundary_values(n)
    e_w = max(float(np.abs(c.positions - r).max()) for c, r in zip(solution.curves, ref))
    e_z = float(np.abs(solution.centers - ex.centers).max())
    e_r = float(np.abs(solution.radii - ex.radii).max())
    return ErrorReport(n, e_w, e_z, e_r)


def paren_exponent(x: float) -> str:
    """Format ``0.015`` as ``1.5(-02)``."""
    if x == 0 or not math.isfinite(x):
        return f"{x:.1f}"
    mant, exp = f"{x:.1e}".split("e")
    return f"{mant}({int(exp):+03d})".replace("+", "")


def format_table(rows: list[ErrorReport]) -> str:
    lines = [f"{'n':>5}  {'E_omega':>10}  {'E_z':>10}  {'E_r':>10}"]
    for r in rows:
        lines.append(
            f"{r.n:>5}  {paren_exponent(r.e_omega):>10}  {paren_exponent(r.e_z):>10}  "
            f"{paren_exponent(r.e_r):>10}"
        )
    return "\n".join(lines)


def sweep(name: str, ns, cfg: SolverConfig | None = None) -> list[ErrorReport]:
    """Error table for a built-in example with an exact map."""
    if exact_map(name) is None:
        raise ValueError(f"example {name!r} has no exact map to compare with")
    base = cfg or SolverConfig()
    rows = []
    for n in ns:
        region = example_region(name, n)
        sol = circular_map(region, SolverConfig(n, base.eps, base.max_iter, base.linear, base.form))
        rows.append(error_report(name, sol))
        log.info("sweep %s n=%d: %s", name, n, rows[-1])
    return rows


# -- plot grids ---------------------------------------------------------------

def _inside_region(region: RegionSpec, boundary, z, margin: float) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    ok = np.ones(z.shape, dtype=bool)
    for i, c in enumerate(boundary):
        wn = winding_numbers(c, z)
        outer = region.bounded and i == region.m - 1
        ok &= (wn != 0) if outer else (wn == 0)
        ok &= np.abs(z[:, None] - c.positions[None, :]).min(axis=1) > margin
    return ok


def _inside_circles(sol: CircularMapSolution, w, margin: float) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    ok = np.ones(w.shape, dtype=bool)
    for i, (c, r) in enumerate(zip(sol.centers, sol.radii)):
        d = np.abs(w - c)
        if sol.bounded and i == len(sol.radii) - 1:
            ok &= d < r - margin
        else:
            ok &= d > r + margin
    return ok


def _polylines(points: list[np.ndarray], keep) -> list[tuple[int, np.ndarray]]:
    """Split each line at rejected samples; returns (line id, segment)."""
    out = []
    for k, pts in enumerate(points):
        mask = keep(pts)
        start = None
        for i, m in enumerate(np.append(mask, False)):
            if m and start is None:
                start = i
            elif not m and start is not None:
                if i - start >= 2:
                    out.append((k, pts[start:i]))
                start = None
    return out


def _reals(z) -> tuple[str, str]:
    z = complex(z)
    return repr(z.real), repr(z.imag)


def _write_polylines(path: Path, family_segments, mapper) -> None:
    with path.open("w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["family", "line", "x", "y", "u", "v"])
        nan = float("nan")
        for family, segments in family_segments:
            for k, seg in segments:
                img = np.asarray(mapper(seg))
                for p, q in zip(seg, img):
                    wr.writerow([family, k, *_reals(p), *_reals(q)])
                wr.writerow([family, k, nan, nan, nan, nan])


def forward_grid(sol: CircularMapSolution, lines: int, resolution: int, path: Path) -> None:
    """Images of horizontal and vertical lines through the region."""
    pos = np.concatenate([c.positions for c in sol.boundary])
    lo, hi = pos.real.min(), pos.real.max()
    blo, bhi = pos.imag.min(), pos.imag.max()
    if not sol.bounded:
        pad = 0.5 * max(hi - lo, bhi - blo)
        lo, hi, blo, bhi = lo - pad, hi + pad, blo - pad, bhi + pad
    margin = 2.0 * max(np.abs(np.diff(c.positions)).max() for c in sol.boundary)
    s = np.linspace(0.0, 1.0, resolution)
    xs = np.linspace(lo, hi, lines + 2)[1:-1]
    ys = np.linspace(blo, bhi, lines + 2)[1:-1]
    horiz = [lo + (hi - lo) * s + 1j * y for y in ys]
    vert = [x + 1j * (blo + (bhi - blo) * s) for x in xs]

    def keep(pts):
        return _inside_region(sol.region, sol.boundary, pts, margin)

    fams = [("horizontal", _polylines(horiz, keep)), ("vertical", _polylines(vert, keep))]
    _write_polylines(path, fams, lambda z: forward_eval(sol, z))


def inverse_grid(sol: CircularMapSolution, lines: int, resolution: int, path: Path) -> None:
    """Preimages of circles and radial lines of the circular region.

    The polar grid is centred at ``0`` (the image of ``alpha``) for bounded
    regions and at the mean of the image centres otherwise.
    """
    if sol.bounded:
        center, rmax = 0.0, 1.0
    else:
        center = complex(np.mean(sol.centers))
        rmax = 1.5 * float(np.max(np.abs(sol.centers - center) + sol.radii))
    margin = 2.0 * max(np.abs(np.diff(c.positions)).max() for c in sol.curves)
    ang = np.linspace(0.0, 2.0 * np.pi, resolution)
    rad = np.linspace(0.0, rmax, resolution)
    circles = [center + r * np.exp(1j * ang) for r in np.linspace(0, rmax, lines + 2)[1:-1]]
    rays = [center + rad * np.exp(1j * a) for a in np.linspace(0, 2 * np.pi, lines + 1)[:-1]]

    def keep(pts):
        return _inside_circles(sol, pts, margin)

    fams = [("circle", _polylines(circles, keep)), ("radial", _polylines(rays, keep))]
    _write_polylines(path, fams, lambda w: inverse_eval(sol, w))


# -- artifacts ----------------------------------------------------------------

def _pair(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def summary_dict(sol: CircularMapSolution, cfg: SolverConfig) -> dict:
    return {
        "region": sol.region.name,
        "bounded": sol.bounded,
        "m": sol.region.m,
        "n": sol.n,
        "alpha": _pair(sol.alpha),
        "eps": cfg.eps,
        "max_iter": cfg.max_iter,
        "cauchy_form": sol.form,
        "converged": sol.converged,
        "iterations": sol.iterations,
        "successive_errors": list(sol.errors),
        "krylov_per_substep": sol.krylov,
        "centers": [_pair(c) for c in sol.centers],
        "radii": [float(r) for r in sol.radii],
        "circle_fit_residuals": [float(x) for x in sol.circle_fit_residuals()],
        "min_dtheta": sol.min_dtheta,
        "max_h_spread": sol.max_h_spread,
    }


def write_boundary_tables(sol: CircularMapSolution, out: Path) -> list[Path]:
    t = uniform_nodes(sol.n)
    paths = []
    for i, (b, c) in enumerate(zip(sol.boundary, sol.curves), start=1):
        p = out / f"boundary_{i:03d}.csv"
        with p.open("w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["t", "eta_re", "eta_im", "xi_re", "xi_im", "dxi_re", "dxi_im"])
            for tt, e, x, d in zip(t, b.positions, c.positions, c.derivatives):
                wr.writerow([repr(float(tt)), *_reals(e), *_reals(x), *_reals(d)])
        paths.append(p)
    return paths


def diagnostics(sol: CircularMapSolution) -> dict:
    """Consistency indicators that need no exact map."""
    mism = [
        float(np.abs(spectral_derivative(c.positions, 0.0) - c.derivatives).max()
              / np.abs(c.derivatives).max())
        for c in sol.curves
    ]
    out = {
        "derivative_consistency": mism,
        "circle_fit_residuals": [float(x) for x in sol.circle_fit_residuals()],
        "min_dtheta": sol.min_dtheta,
        "max_h_spread": sol.max_h_spread,
    }
    if sol.bounded:
        w0 = complex(forward_eval(sol, sol.alpha))
        out["omega_at_alpha"] = _pair(w0)
    return out


@dataclass(frozen=True)
class RunConfig:
    source: str
    n: int | None = None
    eps: float = 0.5e-13
    max_iter: int = 100
    out: Path = Path("circmap-out")
    grid_lines: int = 10
    grid_resolution: int = 200
    diagnostics: bool = False

    def __post_init__(self):
        if self.n is not None and (self.n < 4 or self.n % 2):
            raise ValueError(f"n must be even and at least 4, got {self.n}")
        if self.grid_lines < 0 or self.grid_resolution < 2:
            raise ValueError("grid_lines must be >= 0 and grid_resolution >= 2")


@dataclass
class RunResult:
    solution: CircularMapSolution | None
    errors: ErrorReport | None
    files: list[Path]
    failure: str | None = None


def _attach_log(out: Path) -> logging.Handler:
    handler = logging.FileHandler(out / LOG_FILE, mode="w")
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("circmap")
    root.addHandler(handler)
    if root.level == logging.NOTSET or root.level > logging.INFO:
        root.setLevel(logging.INFO)
    return handler


def _dump(path: Path, data) -> Path:
    path.write_text(json.dumps(data, indent=2) + "\n")
    return path


def run(config: RunConfig) -> RunResult:
    """Solve one region and write every artifact to ``config.out``.

    Solver failures are recorded in ``failure.json`` (artifacts written so
    far are kept) and re-raised.
    """
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    handler = _attach_log(out)
    files: list[Path] = [out / LOG_FILE]
    try:
        region, n = load_region(config.source, config.n)
        cfg = SolverConfig(n=n, eps=config.eps, max_iter=config.max_iter)
        log.info("region %s: bounded=%s m=%d n=%d", region.name, region.bounded, region.m, n)
        tic = time.perf_counter()
        try:
            sol = circular_map(region, cfg)
        except Exception as exc:
            files.append(_dump(out / FAILURE_FILE, {
                "stage": "solve", "error": type(exc).__name__, "message": str(exc),
            }))
            raise
        log.info("solved in %.3fs (%d iterations, converged=%s)",
                 time.perf_counter() - tic, sol.iterations, sol.converged)
        for k, t in enumerate(sol.times, start=1):
            log.info("iteration %d: %.4fs, successive error %.3e", k, t, sol.errors[k - 1])
        files.append(_dump(out / SUMMARY_FILE, summary_dict(sol, cfg)))
        files += write_boundary_tables(sol, out)
        report = error_report(region.name, sol)
        if report is not None:
            files.append(_dump(out / ERRORS_FILE, report.as_dict()))
            log.info("errors: %s", report)
        if config.grid_lines > 0:
            try:
                p = out / "forward_grid.csv"
                forward_grid(sol, config.grid_lines, config.grid_resolution, p)
                files.append(p)
                p = out / "inverse_grid.csv"
                inverse_grid(sol, config.grid_lines, config.grid_resolution, p)
                files.append(p)
            except Exception as exc:
                files.append(_dump(out / FAILURE_FILE, {
                    "stage": "plot-grid", "error": type(exc).__name__, "message": str(exc),
                }))
                raise
        if config.diagnostics:
            files.append(_dump(out / DIAGNOSTICS_FILE, diagnostics(sol)))
        return RunResult(sol, report, files)
    finally:
        logging.getLogger("circmap").removeHandler(handler)
        handler.close()
