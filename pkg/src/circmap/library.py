"""Built-in regions.

``ex1`` and ``ex2`` have closed-form circular maps and are used for the
error reports; ``ex3``-``ex5`` are fixed ellipse configurations; ``ex6``
(100 boundaries, bounded) and ``ex7`` (103 boundaries, unbounded) are
seeded layouts generated here.  The ``*-canonical`` entries are the image
circular regions of ``ex1``/``ex2`` themselves, which are fixed points of
the iteration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import ParamCurve, uniform_nodes
from .koebe import RegionSpec

SQ105 = np.sqrt(105.0)


@dataclass(frozen=True)
class ExactMap:
    """Closed-form reference: boundary values of ``omega`` on each curve at
    the uniform nodes, the image centers and radii, and optionally
    ``omega``, ``omega'`` and ``omega^{-1}`` as functions."""

    boundary_values: Callable[[int], list[np.ndarray]]
    centers: np.ndarray
    radii: np.ndarray
    forward: Callable | None = None
    derivative: Callable | None = None
    inverse: Callable | None = None


# -- Example 1: concentric annulus onto an eccentric one ---------------------

EX1_A = 16.0 / (19.0 + SQ105)
EX1_R = 8.0 / (13.0 + SQ105)


def ex1_omega(z):
    return (z - EX1_A) / (1.0 - EX1_A * z)


def ex1_domega(z):
    return (1.0 - EX1_A**2) / (1.0 - EX1_A * z) ** 2


def ex1_inverse(w):
    return (w + EX1_A) / (1.0 + EX1_A * w)


def _ex1(n: int) -> RegionSpec:
    curves = (ParamCurve.circle(0.0, EX1_R), ParamCurve.circle(0.0, 1.0))
    return RegionSpec(True, curves, EX1_A, name="ex1")


def _ex1_exact() -> ExactMap:
    def values(n):
        t = uniform_nodes(n)
        return [ex1_omega(EX1_R * np.exp(-1j * t)), ex1_omega(np.exp(1j * t))]

    return ExactMap(values, np.array([-0.5, 0.0]), np.array([0.25, 1.0]),
                    ex1_omega, ex1_domega, ex1_inverse)


# -- Example 2: exterior of two circles, known inverse map ------------------

EX2_A = (7.0 + 2.0 * np.sqrt(6.0)) / 5.0
EX2_BETA = 30.0
_a, _b = EX2_A, EX2_BETA
EX2_C1 = (_a**4 - _b**2) / (_a * (_a**2 - _b**2))
EX2_C2 = -(3 * _a**2 * _b**2 + _a**2 - _b**4 - 3 * _b**2) / (_a**2 * _b**2 + _a**2 - _b**2 - _b**4)
EX2_C3 = (_a**2 + _b**2) / (_a * (_b**2 + 1))
EX2_CENTERS = np.array([0.0, 2.5], dtype=complex)
EX2_RADII = np.array([1.0, 0.5])


def ex2_inverse(w):
    """``f5(f4(f3(f2(f1(w)))))``; ``f5`` has its pole at ``w = C3`` so that
    the composite behaves like ``w`` at infinity."""
    a, b = EX2_A, EX2_BETA
    x = (w - a) / (a * w - 1.0)
    x = b * x
    x = x + 1.0 / x
    x = b / (b**2 + 1.0) * x
    return (EX2_C1 * x + EX2_C2) / (x - EX2_C3)


def ex2_dinverse(w):
    a, b = EX2_A, EX2_BETA
    x1 = (w - a) / (a * w - 1.0)
    d1 = (a**2 - 1.0) / (a * w - 1.0) ** 2
    x2 = b * x1
    x3 = x2 + 1.0 / x2
    d3 = 1.0 - 1.0 / x2**2
    x4 = b / (b**2 + 1.0) * x3
    d5 = (-EX2_C1 * EX2_C3 - EX2_C2) / (x4 - EX2_C3) ** 2
    return d5 * (b / (b**2 + 1.0)) * d3 * b * d1


def _ex2(n: int) -> RegionSpec:
    t = uniform_nodes(n)
    curves = []
    for c, r in zip(EX2_CENTERS, EX2_RADII):
        w = c + r * np.exp(-1j * t)
        dw = -1j * r * np.exp(-1j * t)
        curves.append(ParamCurve.sampled(ex2_inverse(w), ex2_dinverse(w) * dw, "cw"))
    alpha = curves[0].params["positions"].mean()
    return RegionSpec(False, tuple(curves), alpha, name="ex2")


def _ex2_exact() -> ExactMap:
    def values(n):
        t = uniform_nodes(n)
        return [c + r * np.exp(-1j * t) for c, r in zip(EX2_CENTERS, EX2_RADII)]

    return ExactMap(values, EX2_CENTERS.copy(), EX2_RADII.copy(), inverse=ex2_inverse)


# -- canonical (already circular) regions ------------------------------------

def _ex1_canonical(n: int) -> RegionSpec:
    curves = (ParamCurve.circle(-0.5, 0.25), ParamCurve.circle(0.0, 1.0))
    return RegionSpec(True, curves, 0.0, name="ex1-canonical")


def _ex2_canonical(n: int) -> RegionSpec:
    curves = tuple(ParamCurve.circle(c, r) for c, r in zip(EX2_CENTERS, EX2_RADII))
    return RegionSpec(False, curves, 0.0, name="ex2-canonical")


def _identity_exact(centers, radii, bounded):
    def values(n):
        t = uniform_nodes(n)
        out = []
        for i, (c, r) in enumerate(zip(centers, radii)):
            ccw = bounded and i == len(centers) - 1
            out.append(c + r * np.exp((1j if ccw else -1j) * t))
        return out

    ident = lambda z: np.asarray(z)  # noqa: E731
    return ExactMap(values, np.asarray(centers, dtype=complex), np.asarray(radii),
                    ident, lambda z: np.ones_like(np.asarray(z)), ident)


# -- Examples 3-5: ellipse configurations -----------------------------------

def _ex3(n: int) -> RegionSpec:
    curves = (
        ParamCurve.ellipse(-0.1 + 0.5j, 0.3, 0.2),
        ParamCurve.ellipse(0.1 - 0.3j, 0.2, 0.4),
        ParamCurve.inverted_ellipse(0.5),
    )
    return RegionSpec(True, curves, 0.2 + 0.2j, name="ex3")


def _ex4(n: int) -> RegionSpec:
    curves = (
        ParamCurve.ellipse(1.5, 1.0, 0.8),
        ParamCurve.ellipse(1.2j, 0.8, 0.6),
        ParamCurve.ellipse(-1.5, 0.5, 0.8),
        ParamCurve.ellipse(-1.5j, 1.0, 0.8),
    )
    return RegionSpec(False, curves, 1.5, name="ex4")


def _ex5(n: int) -> RegionSpec:
    curves = (
        ParamCurve.ellipse(0.7 - 0.2j, 2.0, 0.5),
        ParamCurve.ellipse(0.55j, 1.35, 0.2),
        ParamCurve.ellipse(-1.5, 0.15, 0.75),
        ParamCurve.ellipse(-0.95j, 2.0, 0.2),
    )
    return RegionSpec(False, curves, 0.7 - 0.2j, name="ex5")


# -- ex6, ex7: seeded high-connectivity layouts generated here ----------------

def _grid_ellipses(nx, ny, count, seed):
    rng = np.random.default_rng(seed)
    xs = np.arange(nx) - (nx - 1) / 2.0
    ys = np.arange(ny) - (ny - 1) / 2.0
    curves = []
    for y in ys:
        for x in xs:
            if len(curves) == count:
                return curves
            c = complex(x, y) + complex(*rng.uniform(-0.08, 0.08, 2))
            a = rng.uniform(0.18, 0.3)
            b = rng.uniform(0.5, 1.0) * a
            curves.append(ParamCurve.ellipse(c, a, b, rng.uniform(0.0, np.pi)))
    return curves


def _ex6(n: int) -> RegionSpec:
    holes = _grid_ellipses(11, 9, 99, seed=6)
    outer = ParamCurve.ellipse(0.0, 10.0, 8.5, 0.0)
    return RegionSpec(True, tuple(holes) + (outer,), 0.5 + 0.5j, name="ex6")


def _ex7(n: int) -> RegionSpec:
    holes = _grid_ellipses(13, 8, 103, seed=7)
    alpha = holes[0].params["center"]
    return RegionSpec(False, tuple(holes), alpha, name="ex7")


EXAMPLES: dict[str, tuple[Callable[[int], RegionSpec], str]] = {
    "ex1": (_ex1, "bounded annulus with an exact Mobius circular map"),
    "ex2": (_ex2, "unbounded doubly connected region with an exact inverse map"),
    "ex3": (_ex3, "bounded, two ellipses inside an inverted ellipse"),
    "ex4": (_ex4, "unbounded, exterior of four ellipses"),
    "ex5": (_ex5, "unbounded, four thin nearly touching ellipses"),
    "ex6": (_ex6, "bounded, 99 ellipses inside an ellipse (seeded layout generated here)"),
    "ex7": (_ex7, "unbounded, 103 ellipses (seeded layout generated here)"),
    "ex1-canonical": (_ex1_canonical, "image circular region of ex1 (fixed point)"),
    "ex2-canonical": (_ex2_canonical, "image circular region of ex2 (fixed point)"),
}


def example_region(name: str, n: int = 128) -> RegionSpec:
    try:
        build = EXAMPLES[name][0]
    except KeyError:
        raise KeyError(f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}") from None
    return build(n)


def exact_map(name: str) -> ExactMap | None:
    if name == "ex1":
        return _ex1_exact()
    if name == "ex2":
        return _ex2_exact()
    if name == "ex1-canonical":
        return _identity_exact([-0.5, 0.0], [0.25, 1.0], True)
    if name == "ex2-canonical":
        return _identity_exact(EX2_CENTERS, EX2_RADII, False)
    return None
