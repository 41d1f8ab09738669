"""Koebe's iteration for bounded and unbounded multiply connected regions.

Each iteration maps one boundary component at a time onto the unit circle
(exterior maps for holes, an interior map for the outer curve of a bounded
region) and carries every other curve, its derivative and the tracked
interior points along through the Cauchy integral formula.  For unbounded
regions each iteration ends with the affine normalization ``(z - c0) / b``
that restores ``omega(z) = z + O(1/z)``.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .cauchy import BoundaryFunction, Form, eval_interior, eval_with_infinity, laurent_b_c0
from .diskmap import (
    DiskMapSolution,
    exterior_value_unbounded,
    interior_value_bounded,
    solve_bounded,
    solve_unbounded,
)
from .geometry import GeometryError, Orientation, ParamCurve, SampledCurve, sample_curve
from .gnk import LinearSolverConfig

log = logging.getLogger(__name__)


class KoebeError(RuntimeError):
    """A sub-step produced an inconsistent configuration."""


def winding_numbers(curve: SampledCurve, points) -> np.ndarray:
    """Discrete winding number of the closed polygon through ``curve``'s
    samples around each point."""
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    eta = curve.positions
    d = eta[None, :] - pts[:, None]
    ang = np.angle(np.roll(d, -1, axis=1) / d).sum(axis=1)
    return np.rint(ang / (2.0 * np.pi)).astype(int)


@dataclass(frozen=True)
class RegionSpec:
    """A multiply connected region with the region-on-left convention.

    For a bounded region the last curve is the outer boundary; it runs
    counterclockwise and the holes clockwise.  For an unbounded region
    every curve runs clockwise.  ``alpha`` is in the region (bounded) or in
    its complement (unbounded).  ``interior_points[i]`` is a point inside
    curve ``i`` used to start the tracked centers; ``None`` entries default
    to the mean of the samples.
    """

    bounded: bool
    curves: tuple[ParamCurve, ...]
    alpha: complex
    interior_points: tuple[complex | None, ...] | None = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "curves", tuple(self.curves))
        object.__setattr__(self, "alpha", complex(self.alpha))
        if not self.curves:
            raise GeometryError("a region needs at least one boundary curve")
        if self.interior_points is not None:
            pts = tuple(None if p is None else complex(p) for p in self.interior_points)
            if len(pts) != len(self.curves):
                raise GeometryError("need one interior point per curve")
            object.__setattr__(self, "interior_points", pts)

    @property
    def m(self) -> int:
        return len(self.curves)

    @property
    def orientations(self) -> tuple[Orientation, ...]:
        if self.bounded:
            return ("cw",) * (self.m - 1) + ("ccw",)
        return ("cw",) * self.m

    def sample(self, n: int) -> tuple[SampledCurve, ...]:
        return tuple(sample_curve(c, n, o) for c, o in zip(self.curves, self.orientations))


def check_region(region: RegionSpec, boundary: Sequence[SampledCurve]) -> None:
    """Validate curve nesting and the placement of ``alpha`` on samples."""
    m = region.m
    holes = range(m - 1) if region.bounded else range(m)
    boxes = [
        (c.positions.real.min(), c.positions.real.max(), c.positions.imag.min(), c.positions.imag.max())
        for c in boundary
    ]
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            outer = region.bounded and j == m - 1
            bi, bj = boxes[i], boxes[j]
            if not outer and (bi[1] < bj[0] or bj[1] < bi[0] or bi[3] < bj[2] or bj[3] < bi[2]):
                continue  # disjoint bounding boxes cannot overlap
            wn = winding_numbers(boundary[j], boundary[i].positions)
            ok = np.all(wn == 1) if outer else np.all(wn == 0)
            if not ok:
                raise GeometryError(f"curves {i + 1} and {j + 1} overlap or are badly nested")
    a = region.alpha
    inside = [winding_numbers(boundary[j], a)[0] != 0 for j in range(m)]
    if region.bounded:
        if not inside[m - 1] or any(inside[j] for j in holes):
            raise GeometryError(f"alpha={a} is not in the bounded region")
    elif not any(inside):
        raise GeometryError(f"alpha={a} must lie inside one of the curves")


@dataclass(frozen=True)
class SolverConfig:
    n: int = 128
    eps: float = 0.5e-13
    max_iter: int = 100
    linear: LinearSolverConfig = field(default_factory=LinearSolverConfig)
    form: Form = "barycentric"

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass(frozen=True)
class SubStepRecord:
    curve: int
    krylov: int
    min_dtheta: float
    h_spread: float


@dataclass(frozen=True)
class KoebeState:
    """Current images of all curves and the tracked interior points."""

    curves: tuple[SampledCurve, ...]
    tracked: np.ndarray
    k: int = 0
    last: SubStepRecord | None = None

    @property
    def m(self) -> int:
        return len(self.curves)

    def positions(self) -> np.ndarray:
        return np.concatenate([c.positions for c in self.curves])


def _record(j: int, sol: DiskMapSolution) -> SubStepRecord:
    return SubStepRecord(j, sol.iterations, float(sol.dtheta.min()), sol.h_spread)


def _transport(state, j, sol, evaluate, inside_ok):
    """Apply the map of curve ``j`` to every other curve and tracked point."""
    others = [i for i in range(state.m) if i != j]
    n = state.curves[j].n
    pts = np.concatenate(
        [state.curves[i].positions for i in others] + [state.tracked[others]]
    )
    w, dw = evaluate(sol, pts)
    if not np.all(inside_ok(w)):
        raise KoebeError(f"sub-step {j + 1}: transported points crossed the image circle")
    new_curves = list(state.curves)
    for k, i in enumerate(others):
        sl = slice(k * n, (k + 1) * n)
        c = state.curves[i]
        new_curves[i] = SampledCurve(w[sl], dw[sl] * c.derivatives, c.orientation)
    new_curves[j] = SampledCurve(sol.values, sol.derivatives * state.curves[j].derivatives,
                                 state.curves[j].orientation)
    tracked = state.tracked.copy()
    tracked[others] = w[len(others) * n:]
    tracked[j] = 0.0
    return replace(state, curves=tuple(new_curves), tracked=tracked, last=_record(j, sol))


def sub_step_exterior(state: KoebeState, j: int, cfg: SolverConfig | None = None) -> KoebeState:
    """Map the exterior of curve ``j`` onto ``|w| > 1`` with ``alpha = z_j``."""
    cfg = cfg or SolverConfig()
    sol = solve_unbounded(state.curves[j], state.tracked[j], cfg.linear)
    return _transport(
        state, j, sol,
        lambda s, z: exterior_value_unbounded(s, z, cfg.form),
        lambda w: np.abs(w) > 1.0,
    )


def sub_step_interior(state: KoebeState, cfg: SolverConfig | None = None) -> KoebeState:
    """Map the interior of the outer curve onto the unit disk, ``z_m -> 0``."""
    cfg = cfg or SolverConfig()
    j = state.m - 1
    sol = solve_bounded(state.curves[j], state.tracked[j], cfg.linear)
    return _transport(
        state, j, sol,
        lambda s, z: interior_value_bounded(s, z, cfg.form),
        lambda w: np.abs(w) < 1.0,
    )


def normalize_unbounded(
    state: KoebeState, boundary: Sequence[SampledCurve], alpha: complex
) -> tuple[KoebeState, complex, complex]:
    """Apply ``psi(z) = (z - c0) / b`` so the composite map is ``z + O(1/z)``.

    ``boundary`` is the original region's boundary, on which the current
    images are the boundary values of the composite map.
    """
    bf = BoundaryFunction(boundary, [c.positions for c in state.curves])
    b, c0 = laurent_b_c0(bf, alpha)
    if abs(b) < 1e-300:
        raise KoebeError("degenerate normalization (b = 0)")
    curves = tuple(
        SampledCurve((c.positions - c0) / b, c.derivatives / b, c.orientation)
        for c in state.curves
    )
    return replace(state, curves=curves, tracked=(state.tracked - c0) / b), b, c0


@dataclass(frozen=True)
class CircularMapSolution:
    """Boundary values of the circular map and the image circles.

    ``curves[i]`` holds ``xi_i(t_j) = omega(eta_i(t_j))`` and
    ``xi_i'(t_j) = omega'(eta_i(t_j)) eta_i'(t_j)``.
    """

    region: RegionSpec
    boundary: tuple[SampledCurve, ...]
    curves: tuple[SampledCurve, ...]
    centers: np.ndarray
    radii: np.ndarray
    iterations: int
    converged: bool
    errors: list[float]
    krylov: list[list[int]]
    times: list[float]
    min_dtheta: float
    max_h_spread: float
    form: Form = "barycentric"

    @property
    def bounded(self) -> bool:
        return self.region.bounded

    @property
    def alpha(self) -> complex:
        return self.region.alpha

    @property
    def n(self) -> int:
        return self.boundary[0].n

    def circle_fit_residuals(self) -> np.ndarray:
        return np.array([
            np.abs(np.abs(c.positions - z) - r).max()
            for c, z, r in zip(self.curves, self.centers, self.radii)
        ])


def _initial_state(region: RegionSpec, boundary) -> KoebeState:
    pts = region.interior_points or (None,) * region.m
    tracked = np.array(
        [c.positions.mean() if p is None else p for c, p in zip(boundary, pts)], dtype=complex
    )
    if region.bounded:
        tracked[-1] = region.alpha
    for i, (c, z) in enumerate(zip(boundary, tracked)):
        if region.bounded and i == region.m - 1:
            continue
        if winding_numbers(c, z)[0] == 0:
            raise GeometryError(
                f"starting point {z} is not inside curve {i + 1}; supply interior_points"
            )
    return KoebeState(curves=tuple(boundary), tracked=tracked)


def _iterate(region: RegionSpec, cfg: SolverConfig, sweep) -> CircularMapSolution:
    boundary = region.sample(cfg.n)
    check_region(region, boundary)
    state = _initial_state(region, boundary)
    prev = state.positions()
    errors, krylov, times = [], [], []
    min_dtheta, max_spread = np.inf, 0.0
    converged = False
    for k in range(1, cfg.max_iter + 1):
        tic = time.perf_counter()
        state, records = sweep(replace(state, k=k))
        times.append(time.perf_counter() - tic)
        krylov.append([r.krylov for r in records])
        min_dtheta = min(min_dtheta, min(r.min_dtheta for r in records))
        max_spread = max(max_spread, max(r.h_spread for r in records))
        cur = state.positions()
        err = float(np.abs(cur - prev).max())
        errors.append(err)
        prev = cur
        log.debug("iteration %d: successive error %.3e (%.3fs)", k, err, times[-1])
        if err < cfg.eps:
            converged = True
            break
    if not converged:
        log.warning("no convergence after %d iterations (last error %.3e)", cfg.max_iter, errors[-1])
    centers = state.tracked.copy()
    radii = np.array([np.abs(c.positions - z).mean() for c, z in zip(state.curves, centers)])
    return CircularMapSolution(
        region=region,
        boundary=tuple(boundary),
        curves=state.curves,
        centers=centers,
        radii=radii,
        iterations=len(errors),
        converged=converged,
        errors=errors,
        krylov=krylov,
        times=times,
        min_dtheta=float(min_dtheta),
        max_h_spread=float(max_spread),
        form=cfg.form,
    )


def map_bounded(region: RegionSpec, cfg: SolverConfig | None = None) -> CircularMapSolution:
    """Circular map of a bounded region with ``omega(alpha) = 0``,
    ``omega'(alpha) > 0`` and the outer circle the unit circle."""
    cfg = cfg or SolverConfig()
    if not region.bounded:
        raise ValueError("map_bounded needs a bounded region")

    def sweep(state):
        records = []
        for j in range(state.m - 1):
            state = sub_step_exterior(state, j, cfg)
            records.append(state.last)
        state = sub_step_interior(state, cfg)
        records.append(state.last)
        return state, records

    return _fix_rotation(_iterate(region, cfg, sweep))


def _fix_rotation(sol: CircularMapSolution) -> CircularMapSolution:
    """Rotate a bounded solution so that ``omega'(alpha) > 0``.

    Every sub-step keeps ``omega(alpha) = 0`` and the outer unit circle, but
    the exterior sub-steps leave an arbitrary rotation about ``0`` behind.
    """
    d = complex(derivative_eval(sol, sol.alpha))
    rot = abs(d) / d
    log.debug("final rotation by %.3e rad", -np.angle(d))
    curves = tuple(
        SampledCurve(c.positions * rot, c.derivatives * rot, c.orientation) for c in sol.curves
    )
    return replace(sol, curves=curves, centers=sol.centers * rot)


def map_unbounded(region: RegionSpec, cfg: SolverConfig | None = None) -> CircularMapSolution:
    """Circular map of an unbounded region with ``omega(z) = z + O(1/z)``."""
    cfg = cfg or SolverConfig()
    if region.bounded:
        raise ValueError("map_unbounded needs an unbounded region")
    boundary = region.sample(cfg.n)

    def sweep(state):
        records = []
        for j in range(state.m):
            state = sub_step_exterior(state, j, cfg)
            records.append(state.last)
        state, _, _ = normalize_unbounded(state, boundary, region.alpha)
        return state, records

    return _iterate(region, cfg, sweep)


def circular_map(region: RegionSpec, cfg: SolverConfig | None = None) -> CircularMapSolution:
    return map_bounded(region, cfg) if region.bounded else map_unbounded(region, cfg)


def forward_eval(solution: CircularMapSolution, z):
    """``omega(z)`` for points of the original region."""
    bnd, xi = solution.boundary, [c.positions for c in solution.curves]
    if solution.bounded:
        return eval_interior(BoundaryFunction(bnd, xi), z, solution.form)
    a = solution.alpha
    g = BoundaryFunction(bnd, [x / (c.positions - a) for x, c in zip(xi, bnd)])
    return (np.asarray(z) - a) * eval_with_infinity(g, 1.0, z, solution.form)


def derivative_eval(solution: CircularMapSolution, z):
    """``omega'(z)`` for points of the original region."""
    bnd = solution.boundary
    vals = [c.derivatives / b.derivatives for c, b in zip(solution.curves, bnd)]
    bf = BoundaryFunction(bnd, vals)
    if solution.bounded:
        return eval_interior(bf, z, solution.form)
    return eval_with_infinity(bf, 1.0, z, solution.form)


def inverse_eval(solution: CircularMapSolution, w):
    """``omega^{-1}(w)`` for points of the circular region."""
    img, eta = solution.curves, [b.positions for b in solution.boundary]
    if solution.bounded:
        return eval_interior(BoundaryFunction(img, eta), w, solution.form)
    ah = solution.centers[0]
    g = BoundaryFunction(img, [e / (c.positions - ah) for e, c in zip(eta, img)])
    return (np.asarray(w) - ah) * eval_with_infinity(g, 1.0, w, solution.form)
