"""Closed boundary curves, equidistant sampling and periodic spectral tools.

Every boundary component is a 2*pi-periodic complex function ``eta(t)``
sampled on the uniform grid ``t_i = (i - 1) * 2*pi / n``.  Orientation is
carried as explicit data: ``"ccw"`` or ``"cw"``.  Callers choose it so that
the region lies on the left of each curve.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

Orientation = Literal["ccw", "cw"]
CurveKind = Literal["circle", "ellipse", "inverted_ellipse", "sampled"]

_ORIENTATIONS = ("ccw", "cw")


class GeometryError(ValueError):
    """Invalid curve data or a degenerate parametrization."""


def _check_n(n: int) -> int:
    if int(n) != n or n < 4 or n % 2:
        raise GeometryError(f"n must be an even integer >= 4, got {n!r}")
    return int(n)


def uniform_nodes(n: int) -> np.ndarray:
    """Return the ``n`` equidistant nodes ``t_i = (i-1) 2 pi / n``."""
    n = _check_n(n)
    return 2.0 * np.pi * np.arange(n) / n


@dataclass(frozen=True)
class ParamCurve:
    """A closed curve given by a formula or by samples on the uniform grid.

    Analytic kinds are stored in their natural counterclockwise direction.
    Use the constructors :meth:`circle`, :meth:`ellipse`,
    :meth:`inverted_ellipse` and :meth:`sampled` rather than the raw
    initializer.
    """

    kind: CurveKind
    params: dict = field(default_factory=dict)

    @classmethod
    def circle(cls, center: complex, radius: float) -> "ParamCurve":
        if not radius > 0:
            raise GeometryError(f"circle radius must be positive, got {radius}")
        return cls("circle", {"center": complex(center), "radius": float(radius)})

    @classmethod
    def ellipse(cls, center: complex, a: float, b: float, rotation: float = 0.0) -> "ParamCurve":
        """Ellipse ``center + exp(i*rotation) * (a cos t + i b sin t)``."""
        if not (a > 0 and b > 0):
            raise GeometryError(f"semi-axes must be positive, got a={a}, b={b}")
        return cls(
            "ellipse",
            {"center": complex(center), "a": float(a), "b": float(b), "rotation": float(rotation)},
        )

    @classmethod
    def inverted_ellipse(cls, p: float) -> "ParamCurve":
        """Curve ``sqrt(1 - (1 - p^2) cos^2 t) exp(i t)`` with ``0 < p <= 1``."""
        if not 0 < p <= 1:
            raise GeometryError(f"inverted ellipse needs 0 < p <= 1, got {p}")
        return cls("inverted_ellipse", {"p": float(p)})

    @classmethod
    def sampled(
        cls,
        positions,
        derivatives=None,
        orientation: Orientation = "ccw",
    ) -> "ParamCurve":
        """Curve known only through samples on the uniform grid.

        ``orientation`` states the direction in which the samples run.  When
        ``derivatives`` is omitted they are obtained by spectral
        differentiation of the positions.
        """
        pos = np.asarray(positions, dtype=complex).copy()
        n = _check_n(pos.size)
        if derivatives is None:
            der = spectral_derivative(pos, 0.0)
        else:
            der = np.asarray(derivatives, dtype=complex).copy()
            if der.shape != pos.shape:
                raise GeometryError("positions and derivatives must have equal length")
            # cheap consistency guard: supplied derivatives must at least
            # point the same way as the differentiated positions
            if np.real(np.vdot(spectral_derivative(pos, 0.0), der)) <= 0:
                raise GeometryError("derivatives are inconsistent with the positions")
        if orientation not in _ORIENTATIONS:
            raise GeometryError(f"unknown orientation {orientation!r}")
        pos.flags.writeable = False
        der.flags.writeable = False
        return cls("sampled", {"positions": pos, "derivatives": der, "n": n, "orientation": orientation})

    def evaluate(self, t) -> tuple[np.ndarray, np.ndarray]:
        """Position and derivative of the counterclockwise formula at ``t``."""
        t = np.asarray(t, dtype=float)
        k, p = self.kind, self.params
        if k == "circle":
            e = np.exp(1j * t)
            return p["center"] + p["radius"] * e, 1j * p["radius"] * e
        if k == "ellipse":
            rot = np.exp(1j * p["rotation"])
            pos = p["center"] + rot * (p["a"] * np.cos(t) + 1j * p["b"] * np.sin(t))
            der = rot * (-p["a"] * np.sin(t) + 1j * p["b"] * np.cos(t))
            return pos, der
        if k == "inverted_ellipse":
            q = 1.0 - p["p"] ** 2
            s = np.sqrt(1.0 - q * np.cos(t) ** 2)
            e = np.exp(1j * t)
            ds = q * np.cos(t) * np.sin(t) / s
            return s * e, (ds + 1j * s) * e
        raise GeometryError("sampled curves can only be evaluated at their own nodes")


@dataclass(frozen=True)
class SampledCurve:
    """Positions and derivatives of one boundary component at uniform nodes."""

    positions: np.ndarray
    derivatives: np.ndarray
    orientation: Orientation

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=complex)
        der = np.asarray(self.derivatives, dtype=complex)
        _check_n(pos.size)
        if pos.shape != der.shape or pos.ndim != 1:
            raise GeometryError("positions and derivatives must be 1-d arrays of equal length")
        if self.orientation not in _ORIENTATIONS:
            raise GeometryError(f"unknown orientation {self.orientation!r}")
        speed = np.abs(der)
        if not np.all(np.isfinite(speed)) or np.any(speed <= 1e-14 * max(speed.max(), 1.0)):
            raise GeometryError("derivative vanishes at a node (degenerate parametrization)")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "derivatives", der)

    @property
    def n(self) -> int:
        return self.positions.size

    @property
    def nodes(self) -> np.ndarray:
        return uniform_nodes(self.n)


def sample_curve(curve: ParamCurve, n: int, orientation: Orientation = "ccw") -> SampledCurve:
    """Sample ``curve`` at ``n`` uniform nodes, running in ``orientation``.

    Analytic kinds are reversed by ``t -> -t``; sampled kinds by reading the
    samples backwards (with negated derivatives).
    """
    n = _check_n(n)
    if orientation not in _ORIENTATIONS:
        raise GeometryError(f"unknown orientation {orientation!r}")
    if curve.kind == "sampled":
        p = curve.params
        if p["n"] != n:
            raise GeometryError(f"sampled curve has n={p['n']}, requested n={n}")
        pos, der = p["positions"], p["derivatives"]
        if p["orientation"] != orientation:
            idx = (-np.arange(n)) % n
            pos, der = pos[idx], -der[idx]
        return SampledCurve(pos.copy(), der.copy(), orientation)
    t = uniform_nodes(n)
    if orientation == "ccw":
        pos, der = curve.evaluate(t)
    else:
        pos, der = curve.evaluate(-t)
        der = -der
    return SampledCurve(pos, der, orientation)


@dataclass(frozen=True)
class FourierCoeffs:
    """Coefficients of the degree n/2 interpolating trigonometric polynomial

    ``a[0] + sum_{j=1}^{n/2} a[j] cos(jt) + sum_{j=1}^{n/2-1} b[j] sin(jt)``.

    ``b`` is stored with the same length as ``a``; ``b[0]`` and ``b[n/2]``
    are always zero.
    """

    a: np.ndarray
    b: np.ndarray

    @property
    def n(self) -> int:
        return 2 * (self.a.size - 1)

    def evaluate(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        j = np.arange(self.a.size)
        jt = np.multiply.outer(t, j)
        return np.cos(jt) @ self.a + np.sin(jt) @ self.b


def trig_coeffs(samples) -> FourierCoeffs:
    """Interpolating trigonometric coefficients of real grid samples (FFT)."""
    x = np.asarray(samples, dtype=float)
    n = _check_n(x.size)
    X = np.fft.rfft(x) / n
    a = 2.0 * X.real
    b = -2.0 * X.imag
    a[0] = X[0].real
    a[-1] = X[-1].real
    b[0] = b[-1] = 0.0
    return FourierCoeffs(a, b)


def spectral_derivative(samples, linear_part: float = 0.0) -> np.ndarray:
    """Derivative at the nodes of ``theta`` where ``theta(t) - linear_part*t``
    is 2*pi-periodic.

    The Nyquist cosine mode contributes nothing to the derivative.  Complex
    input is differentiated part by part.
    """
    x = np.asarray(samples)
    if np.iscomplexobj(x):
        return spectral_derivative(x.real, linear_part) + 1j * spectral_derivative(x.imag, 0.0)
    n = _check_n(x.size)
    periodic = x - linear_part * uniform_nodes(n)
    X = np.fft.rfft(periodic)
    k = np.arange(X.size, dtype=float)
    k[-1] = 0.0
    return linear_part + np.fft.irfft(1j * k * X, n)


def unwrap_argument(values, winding: int) -> np.ndarray:
    """Continuous branch of ``arg(values)`` around a closed grid.

    The first entry is the principal argument.  Raises ``GeometryError``
    when the total increase over one period is not ``2*pi*winding``.
    """
    v = np.asarray(values, dtype=complex)
    if np.any(v == 0):
        raise GeometryError("argument of zero is undefined")
    arg = np.unwrap(np.angle(v))
    closing = np.angle(v[0] / v[-1])
    turns = (arg[-1] + closing - arg[0]) / (2.0 * np.pi)
    if abs(turns - winding) > 1e-6:
        raise GeometryError(f"winding number is {round(turns)}, expected {winding}")
    return arg
