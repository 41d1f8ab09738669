"""Cauchy integral evaluation from boundary samples.

All sums are trapezoidal over curves oriented with the region on the left:

    S1(z) = (1/2 pi i) sum_k int g(eta) eta'(t) / (eta(t) - z) dt
    S0(z) = (1/2 pi i) sum_k int         eta'(t) / (eta(t) - z) dt

For ``z`` in a bounded region, ``g(z) = S1`` and ``S0 = 1``; for ``z`` in an
unbounded region, ``g(z) = g(inf) + S1`` and ``S0 = 0``.  With
``form="barycentric"`` the result is divided by the discrete ``S0`` (resp.
``1 + S0``), which is the same quadrature applied to ``(g(eta) - g(z)) /
(eta - z)``.  That integrand has no singularity, so accuracy holds up close
to the boundary and constants are reproduced exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .geometry import GeometryError, SampledCurve

Form = Literal["plain", "barycentric"]

# Target x source block size for the dense sums.
_BLOCK = 1 << 21


@dataclass(frozen=True)
class BoundaryFunction:
    """Samples of a function at the nodes of one or several curves."""

    curves: tuple[SampledCurve, ...]
    values: tuple[np.ndarray, ...]

    def __init__(self, curves: SampledCurve | Sequence[SampledCurve], values):
        if isinstance(curves, SampledCurve):
            curves, values = (curves,), (values,)
        curves = tuple(curves)
        values = tuple(np.asarray(v, dtype=complex) for v in values)
        if len(curves) != len(values):
            raise GeometryError("need one value array per curve")
        for c, v in zip(curves, values):
            if v.shape != (c.n,):
                raise GeometryError(f"value array of shape {v.shape} for a curve with n={c.n}")
        object.__setattr__(self, "curves", curves)
        object.__setattr__(self, "values", values)

    def _stacked(self):
        eta = np.concatenate([c.positions for c in self.curves])
        w = np.concatenate([c.derivatives / (1j * c.n) for c in self.curves])
        g = np.concatenate(self.values)
        return eta, w, g


def _sums(eta, w, G, z):
    """S1 for each column of ``G`` and S0 at the points ``z`` (any shape).

    Returns ``(S1, S0)`` with ``S1`` of shape ``(k,) + z.shape``.
    """
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    W = np.concatenate([w[:, None] * G, w[:, None]], axis=1)
    out = np.empty((W.shape[1], flat.size), dtype=complex)
    step = max(1, _BLOCK // max(eta.size, 1))
    for lo in range(0, flat.size, step):
        d = eta[None, :] - flat[lo : lo + step, None]
        if not np.all(d):
            raise GeometryError("evaluation point lies on the boundary")
        out[:, lo : lo + step] = (1.0 / d @ W).T
    out = out.reshape((W.shape[1],) + z.shape)
    return out[:-1], out[-1]


def _check_region(s0, expected, what):
    bad = np.abs(s0 - expected) > 0.5
    if np.any(bad):
        raise GeometryError(f"{int(bad.sum())} evaluation point(s) are not in the {what}")


def _scalar(out):
    return out if np.ndim(out) else complex(out)


def _columns(bfs: Sequence[BoundaryFunction]):
    curves = bfs[0].curves
    for bf in bfs[1:]:
        if bf.curves is not curves and bf.curves != curves:
            raise GeometryError("boundary functions must share their curves")
    eta, w, _ = bfs[0]._stacked()
    G = np.stack([np.concatenate(bf.values) for bf in bfs], axis=1)
    return eta, w, G


def eval_interior_many(bfs: Sequence[BoundaryFunction], z, form: Form = "barycentric"):
    """:func:`eval_interior` for several functions on the same curves,
    sharing one pass over the kernel."""
    eta, w, G = _columns(bfs)
    s1, s0 = _sums(eta, w, G, z)
    _check_region(s0, 1.0, "bounded region")
    if form == "barycentric":
        s1 = s1 / s0
    return [_scalar(v) for v in s1]


def eval_with_infinity_many(
    bfs: Sequence[BoundaryFunction], g_inf: Sequence[complex], z, form: Form = "barycentric"
):
    """:func:`eval_with_infinity` for several functions on the same curves."""
    eta, w, G = _columns(bfs)
    s1, s0 = _sums(eta, w, G, z)
    _check_region(s0, 0.0, "unbounded region")
    out = np.asarray(g_inf, dtype=complex).reshape((-1,) + (1,) * s0.ndim) + s1
    if form == "barycentric":
        out = out / (1.0 + s0)
    return [_scalar(v) for v in out]


def eval_interior(bf: BoundaryFunction, z, form: Form = "barycentric"):
    """Value at ``z`` of the function analytic in the bounded region whose
    (region-on-left) boundary carries the samples."""
    return eval_interior_many([bf], z, form)[0]


def eval_with_infinity(bf: BoundaryFunction, g_inf: complex, z, form: Form = "barycentric"):
    """Value at ``z`` of the function analytic in the unbounded region,
    including infinity where it equals ``g_inf``."""
    return eval_with_infinity_many([bf], [g_inf], z, form)[0]


def laurent_b_c0(bf: BoundaryFunction, alpha: complex) -> tuple[complex, complex]:
    """Leading coefficients of ``g(z) = b z + c0 + O(1/z)`` at infinity.

    ``alpha`` must lie outside the (unbounded) region.  With the boundary
    oriented region-on-left,

        b  = -(1/2 pi i) int g(eta) / (eta - alpha)^2 deta
        c0 = -(1/2 pi i) int (g(eta) - b eta) / (eta - alpha) deta
    """
    eta, w, g = bf._stacked()
    d = eta - alpha
    if np.any(d == 0):
        raise GeometryError("alpha lies on the boundary")
    b = -np.sum(w * g / d**2)
    c0 = -np.sum(w * (g - b * eta) / d)
    return complex(b), complex(c0)
