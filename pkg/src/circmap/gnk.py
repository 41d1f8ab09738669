"""Generalized Neumann kernel on a single closed curve.

For a curve ``zeta`` and the auxiliary function ``A`` (``zeta - alpha`` for a
bounded region, ``1`` for an unbounded one) this module builds the Nystrom
discretizations of

    N(s,t) = Im[ A(s)/A(t) * zeta'(t) / (zeta(t) - zeta(s)) ] / pi
    M(s,t) = Re[ A(s)/A(t) * zeta'(t) / (zeta(t) - zeta(s)) ] / pi

solves ``(I - N) phi = -M gamma`` and recovers the real constant ``h``.

The singular operator ``M`` is split as ``cot((t-s)/2) / (2 pi) + M1(s,t)``.
The cotangent part acts exactly on trigonometric polynomials (``cos jt ->
-sin jt``, ``sin jt -> cos jt``) and ``M1`` is smooth, so plain trapezoidal
sums converge spectrally.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from .geometry import GeometryError, SampledCurve, spectral_derivative, unwrap_argument

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    """The linear system for the integral equation could not be solved."""


@dataclass(frozen=True)
class LinearSolverConfig:
    """Restarted GMRES settings; ``direct_fallback_n`` is the largest ``n``
    for which a failed Krylov solve is retried with a dense LU solve."""

    restart: int = 10
    tol: float = 0.5e-14
    maxiter: int = 10
    direct_fallback_n: int = 512


@dataclass(frozen=True)
class DenseOperator:
    """An n x n real matrix with trapezoidal weights folded in.

    ``matvec`` is the only thing the solver relies on, so a hierarchical
    backend can replace this class without touching callers.
    """

    matrix: np.ndarray

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ x


@dataclass(frozen=True)
class GnkProblem:
    """Kernel data for one curve.

    ``alpha`` lies inside the curve in both cases: it is the normalization
    point of the bounded map, and a point of the complement for the
    unbounded one.  The curve must have the region on its left, so the
    winding of ``zeta - alpha`` is +1 (bounded) or -1 (unbounded).
    """

    curve: SampledCurve
    bounded: bool
    alpha: complex

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        diff = self.curve.positions - self.alpha
        if np.any(np.abs(diff) == 0):
            raise GeometryError("alpha lies on the curve")
        try:
            unwrap_argument(diff, 1 if self.bounded else -1)
        except GeometryError as exc:
            raise GeometryError(
                f"alpha={self.alpha} is not enclosed by a "
                f"{'counterclockwise' if self.bounded else 'clockwise'} curve: {exc}"
            ) from None

    @property
    def n(self) -> int:
        return self.curve.n

    @property
    def zeta(self) -> np.ndarray:
        return self.curve.positions

    @property
    def dzeta(self) -> np.ndarray:
        return self.curve.derivatives

    @cached_property
    def d2zeta(self) -> np.ndarray:
        return spectral_derivative(self.curve.derivatives, 0.0)

    @cached_property
    def A(self) -> np.ndarray:
        if self.bounded:
            return self.zeta - self.alpha
        return np.ones(self.n, dtype=complex)

    @cached_property
    def dA_over_A(self) -> np.ndarray:
        if self.bounded:
            return self.dzeta / (self.zeta - self.alpha)
        return np.zeros(self.n, dtype=complex)

    @cached_property
    def _kernel(self) -> np.ndarray:
        # continuous complex kernel pi*(N + iM) with diagonal limits; rows s_i
        zeta, dzeta, A = self.zeta, self.dzeta, self.A
        diff = zeta[None, :] - zeta[:, None]
        off = ~np.eye(self.n, dtype=bool)
        if np.any(np.abs(diff[off]) == 0):
            raise GeometryError("distinct nodes coincide (self-intersecting curve)")
        np.fill_diagonal(diff, 1.0)
        K = (A[:, None] / A[None, :]) * dzeta[None, :] / diff
        np.fill_diagonal(K, self.d2zeta / (2.0 * dzeta) - self.dA_over_A)
        return K

    @cached_property
    def _nystrom(self) -> np.ndarray:
        # Nystrom matrix of N + iM with the cotangent part of M removed
        n = self.n
        t = self.curve.nodes
        d = t[None, :] - t[:, None]
        np.fill_diagonal(d, 1.0)
        cot = 1.0 / np.tan(d / 2.0)
        np.fill_diagonal(cot, 0.0)
        K = self._kernel / np.pi - cot / (2.0 * np.pi)
        return K * (2.0 * np.pi / n)

    @cached_property
    def N(self) -> DenseOperator:
        return DenseOperator(np.ascontiguousarray(self._nystrom.imag))

    @cached_property
    def M1(self) -> DenseOperator:
        return DenseOperator(np.ascontiguousarray(self._nystrom.real))

    def i_minus_n(self, x: np.ndarray) -> np.ndarray:
        return x - self.N.matvec(x)


def kernel_N(problem: GnkProblem, i: int, j: int) -> float:
    """Continuous kernel value ``N(t_i, t_j)`` (diagonal by its limit)."""
    return float(problem._kernel[i, j].imag / np.pi)


def conjugate_pv(gamma: np.ndarray) -> np.ndarray:
    """``(1/2pi) PV int cot((t-s)/2) gamma(t) dt`` on trigonometric data."""
    x = np.asarray(gamma, dtype=float)
    n = x.size
    X = np.fft.rfft(x)
    X[0] = 0.0
    X[-1] = 0.0
    return np.fft.irfft(1j * X, n)


def apply_M(problem: GnkProblem, gamma) -> np.ndarray:
    """Singular operator ``M`` applied to grid values ``gamma``."""
    g = np.asarray(gamma, dtype=float)
    return conjugate_pv(g) + problem.M1.matvec(g)


def solve_ie(
    problem: GnkProblem, gamma, cfg: LinearSolverConfig | None = None
) -> tuple[np.ndarray, int]:
    """Solve ``(I - N) phi = -M gamma``; return ``phi`` and the number of
    inner GMRES iterations."""
    cfg = cfg or LinearSolverConfig()
    n = problem.n
    rhs = -apply_M(problem, gamma)
    if not np.any(rhs):
        return np.zeros(n), 0

    op = LinearOperator((n, n), matvec=problem.i_minus_n, dtype=float)
    count = 0

    def _tick(_):
        nonlocal count
        count += 1

    phi, info = gmres(
        op,
        rhs,
        rtol=cfg.tol,
        atol=0.0,
        restart=cfg.restart,
        maxiter=cfg.maxiter,
        callback=_tick,
        callback_type="pr_norm",
    )
    scale = np.linalg.norm(rhs)
    resid = np.linalg.norm(problem.i_minus_n(phi) - rhs) / scale
    # GMRES rounding can stall slightly above its own target
    if info == 0 and resid <= 100.0 * cfg.tol:
        return phi, count

    if n > cfg.direct_fallback_n:
        raise SolverError(
            f"GMRES did not converge (info={info}, relative residual {resid:.2e})"
        )
    log.warning(
        "GMRES stopped at relative residual %.2e after %d iterations; using dense solve",
        resid,
        count,
    )
    mat = np.eye(n) - problem.N.matrix
    try:
        phi = np.linalg.solve(mat, rhs)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"singular Nystrom system: {exc}") from None
    return phi, count


@dataclass(frozen=True)
class HConstant:
    """Grid samples of ``h`` with their mean and the spread about it."""

    samples: np.ndarray

    @property
    def value(self) -> float:
        return float(self.samples.mean())

    @property
    def spread(self) -> float:
        return float(np.abs(self.samples - self.samples.mean()).max())


def compute_h(problem: GnkProblem, gamma, phi, shift: float = 0.0) -> HConstant:
    """Recover ``h`` from ``gamma`` and the solution ``phi``.

    Uses ``h = [M phi - (I - N) gamma] / 2``; with this sign the unit-circle
    and scaled-circle maps give ``h = -ln c`` (bounded) and ``h = ln c``
    (unbounded).  ``shift`` is a constant already removed from ``gamma``;
    since ``(I - N) 1 = 2`` and ``M 1 = 0`` it enters as ``-shift``.
    """
    g = np.asarray(gamma, dtype=float)
    p = np.asarray(phi, dtype=float)
    return HConstant((apply_M(problem, p) - problem.i_minus_n(g)) / 2.0 - shift)
