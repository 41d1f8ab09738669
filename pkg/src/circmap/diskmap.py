"""Simply connected maps onto the unit disk and its exterior.

``solve_bounded`` maps the interior of a counterclockwise curve onto the unit
disk with ``Phi(alpha) = 0, Phi'(alpha) > 0``.  ``solve_unbounded`` maps the
exterior of a clockwise curve onto ``|w| > 1`` with ``Psi(z) ~ c (z - alpha)``
at infinity, ``c > 0``.  Both reduce to one solve of the generalized Neumann
kernel equation for ``phi = mu + theta``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cauchy import BoundaryFunction, Form, eval_interior_many, eval_with_infinity_many
from .geometry import GeometryError, SampledCurve, spectral_derivative, unwrap_argument
from .gnk import GnkProblem, LinearSolverConfig, compute_h, solve_ie


class DiskMapError(RuntimeError):
    """The computed boundary correspondence is not a valid map."""


@dataclass(frozen=True)
class DiskMapSolution:
    curve: SampledCurve
    alpha: complex
    bounded: bool
    theta: np.ndarray
    dtheta: np.ndarray
    h: float
    h_spread: float
    c: float
    values: np.ndarray
    derivatives: np.ndarray
    iterations: int


def _solve(curve: SampledCurve, alpha: complex, bounded: bool, cfg) -> DiskMapSolution:
    problem = GnkProblem(curve, bounded, alpha)
    diff = curve.positions - problem.alpha
    sign = -1.0 if bounded else 1.0
    gamma = sign * np.log(np.abs(diff))
    mu = sign * unwrap_argument(diff, 1 if bounded else -1)
    # A constant in gamma only shifts h (M 1 = 0, (I - N) 1 = 2).  Taking it
    # out keeps the discrete M 1, which is only zero up to the resolution of
    # the curve data, from feeding log(scale) into theta.
    shift = float(gamma.mean())
    gamma = gamma - shift
    phi, its = solve_ie(problem, gamma, cfg)
    theta = phi - mu
    h = compute_h(problem, gamma, phi, shift)
    dtheta = spectral_derivative(theta, 1.0)
    if not np.all(dtheta > 0):
        raise DiskMapError(
            f"boundary correspondence is not increasing (min theta' = {dtheta.min():.3e}); "
            "increase n or check the curve"
        )
    if bounded:
        values = np.exp(1j * theta)
        derivs = 1j * dtheta * values / curve.derivatives
        c = np.exp(-h.value)
    else:
        values = np.exp(-1j * theta)
        derivs = -1j * dtheta * values / curve.derivatives
        c = np.exp(h.value)
    return DiskMapSolution(
        curve=curve,
        alpha=problem.alpha,
        bounded=bounded,
        theta=theta,
        dtheta=dtheta,
        h=h.value,
        h_spread=h.spread,
        c=float(c),
        values=values,
        derivatives=derivs,
        iterations=its,
    )


def solve_bounded(
    curve: SampledCurve, alpha: complex, cfg: LinearSolverConfig | None = None
) -> DiskMapSolution:
    """Interior of a counterclockwise curve onto the unit disk."""
    return _solve(curve, alpha, True, cfg)


def solve_unbounded(
    curve: SampledCurve, alpha: complex, cfg: LinearSolverConfig | None = None
) -> DiskMapSolution:
    """Exterior of a clockwise curve (``alpha`` inside it) onto ``|w| > 1``."""
    return _solve(curve, alpha, False, cfg)


def interior_value_bounded(solution: DiskMapSolution, z, form: Form = "barycentric"):
    """``(Phi(z), Phi'(z))`` for points strictly inside the curve."""
    if not solution.bounded:
        raise GeometryError("solution is for an unbounded region")
    curve = solution.curve
    return tuple(eval_interior_many(
        [BoundaryFunction(curve, solution.values), BoundaryFunction(curve, solution.derivatives)],
        z, form,
    ))


def exterior_value_unbounded(solution: DiskMapSolution, z, form: Form = "barycentric"):
    """``(Psi(z), Psi'(z))`` for points strictly outside the curve.

    ``Psi(z)/(z - alpha)`` and ``Psi'(z)`` are both analytic outside the
    curve with value ``c`` at infinity.
    """
    if solution.bounded:
        raise GeometryError("solution is for a bounded region")
    curve, alpha = solution.curve, solution.alpha
    z = np.asarray(z, dtype=complex)
    g = BoundaryFunction(curve, solution.values / (curve.positions - alpha))
    dg = BoundaryFunction(curve, solution.derivatives)
    q, dw = eval_with_infinity_many([g, dg], [solution.c, solution.c], z, form)
    w = (z - alpha) * q
    if not np.ndim(w):
        return complex(w), complex(dw)
    return w, dw
