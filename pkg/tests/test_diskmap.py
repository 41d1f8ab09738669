import numpy as np
import pytest

import circmap.diskmap as dm
from circmap.diskmap import (
    DiskMapError,
    exterior_value_unbounded,
    interior_value_bounded,
    solve_bounded,
    solve_unbounded,
)
from circmap.geometry import GeometryError, ParamCurve, SampledCurve, sample_curve, uniform_nodes

from conftest import circle, unit_circle


def test_identity_bounded():
    c = unit_circle(32)
    sol = solve_bounded(c, 0.0)
    t = uniform_nodes(32)
    assert np.abs(sol.theta - t).max() < 1e-13
    assert sol.c == pytest.approx(1.0, abs=1e-14)
    assert np.abs(sol.values - np.exp(1j * t)).max() < 1e-13


def test_mobius_bounded():
    c = unit_circle(128)
    sol = solve_bounded(c, 0.5)
    z = c.positions
    assert np.abs(sol.values - (z - 0.5) / (1 - 0.5 * z)).max() < 1e-12
    w, dw = interior_value_bounded(sol, 0.0)
    assert w == pytest.approx(-0.5, abs=1e-12)
    assert dw == pytest.approx(0.75, abs=1e-12)


def test_affine_bounded():
    c = circle(1 + 1j, 2.0, 64)
    sol = solve_bounded(c, 1 + 1j)
    assert np.abs(sol.values - (c.positions - 1 - 1j) / 2).max() < 1e-13
    assert sol.c == pytest.approx(0.5, abs=1e-13)
    assert sol.h == pytest.approx(np.log(2), abs=1e-13)


def test_identity_unbounded():
    c = unit_circle(32, "cw")
    sol = solve_unbounded(c, 0.0)
    assert np.abs(sol.values - c.positions).max() < 1e-13
    assert sol.c == pytest.approx(1.0, abs=1e-14)
    assert sol.h == pytest.approx(0.0, abs=1e-14)
    w, dw = exterior_value_unbounded(sol, 2.0)
    assert w == pytest.approx(2.0, abs=1e-13)
    assert dw == pytest.approx(1.0, abs=1e-13)


def test_scaling_unbounded():
    c = circle(0, 2.0, 64, "cw")
    sol = solve_unbounded(c, 0.0)
    assert sol.c == pytest.approx(0.5, abs=1e-13)
    assert sol.h == pytest.approx(-np.log(2), abs=1e-13)
    w, dw = exterior_value_unbounded(sol, 3.0)
    assert w == pytest.approx(1.5, abs=1e-13)
    assert dw == pytest.approx(0.5, abs=1e-13)
    z = 1e6 * np.exp(0.3j)
    w, _ = exterior_value_unbounded(sol, z)
    assert abs(w / z - sol.c) < 1e-6


def _ellipse(n, orientation):
    return sample_curve(ParamCurve.ellipse(0.2, 2.0, 1.0, 0.3), n, orientation)


def test_exterior_remap_is_identity():
    c = _ellipse(128, "cw")
    sol = solve_unbounded(c, 0.1)
    image = SampledCurve(sol.values, sol.derivatives * c.derivatives, "cw")
    again = solve_unbounded(image, 0.0)
    assert np.abs(again.values - image.positions).max() < 1e-8
    assert again.c == pytest.approx(1.0, abs=1e-10)


def test_interior_remap_is_identity():
    c = _ellipse(128, "ccw")
    sol = solve_bounded(c, 0.4 + 0.2j)
    image = SampledCurve(sol.values, sol.derivatives * c.derivatives, "ccw")
    again = solve_bounded(image, 0.0)
    assert np.abs(again.theta - sol.theta).max() < 1e-10
    assert again.c == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("bounded", [True, False])
def test_solution_invariants(bounded):
    c = _ellipse(128, "ccw" if bounded else "cw")
    sol = (solve_bounded if bounded else solve_unbounded)(c, 0.3 + 0.1j)
    assert np.abs(np.abs(sol.values) - 1).max() < 1e-13
    assert np.all(sol.dtheta > 0)
    expect = (1j if bounded else -1j) * sol.dtheta * sol.values
    assert np.abs(c.derivatives * sol.derivatives - expect).max() < 1e-13
    # phi = mu + theta is periodic: theta - t has no linear drift
    t = uniform_nodes(c.n)
    per = sol.theta - t
    coeffs = np.fft.rfft(per)
    assert np.abs(coeffs[-4:]).max() / c.n < 1e-10
    assert sol.h_spread < 1e-10


def test_normalization_at_alpha():
    c = _ellipse(128, "ccw")
    a = 0.5 - 0.3j
    sol = solve_bounded(c, a)
    w, dw = interior_value_bounded(sol, a)
    assert abs(w) < 1e-12
    assert abs(dw.imag) < 1e-12 and dw.real > 0
    assert dw.real == pytest.approx(sol.c, rel=1e-10)


def test_interior_values_near_boundary():
    # points 0.1 diameters from a radius-2 circle, Mobius oracle
    center, radius, alpha = 1 + 1j, 2.0, 0.5 + 1.2j
    sol = solve_bounded(circle(center, radius, 128), alpha)
    a = (alpha - center) / radius
    z = center + 1.6 * np.exp(1j * np.linspace(0, 2 * np.pi, 40, endpoint=False))
    u = (z - center) / radius
    exact = (u - a) / (1 - np.conj(a) * u)
    dexact = (1 - abs(a) ** 2) / (1 - np.conj(a) * u) ** 2 / radius
    w, dw = interior_value_bounded(sol, z)
    assert np.abs(w - exact).max() < 1e-8
    assert np.abs(dw - dexact).max() < 1e-8


def test_wrong_side_rejected():
    c = unit_circle(32)
    with pytest.raises(GeometryError):
        solve_bounded(c, 1.5)
    sol = solve_bounded(c, 0.0)
    with pytest.raises(GeometryError):
        interior_value_bounded(sol, 2.0)
    with pytest.raises(GeometryError):
        exterior_value_unbounded(sol, 2.0)
    usol = solve_unbounded(unit_circle(32, "cw"), 0.0)
    with pytest.raises(GeometryError):
        exterior_value_unbounded(usol, 0.2)
    with pytest.raises(GeometryError):
        interior_value_bounded(usol, 0.2)


def test_decreasing_correspondence_is_reported(monkeypatch):
    n = 32
    t = uniform_nodes(n)
    monkeypatch.setattr(dm, "solve_ie", lambda p, g, cfg=None: (3.0 * np.sin(t), 0))
    with pytest.raises(DiskMapError):
        solve_bounded(unit_circle(n), 0.0)
