import numpy as np
import pytest

from circmap.cauchy import BoundaryFunction, laurent_b_c0
from circmap.geometry import GeometryError, ParamCurve, SampledCurve, spectral_derivative
from circmap.koebe import (
    KoebeError,
    KoebeState,
    RegionSpec,
    SolverConfig,
    check_region,
    circular_map,
    derivative_eval,
    forward_eval,
    inverse_eval,
    map_bounded,
    map_unbounded,
    normalize_unbounded,
    sub_step_exterior,
    sub_step_interior,
    winding_numbers,
)
from circmap.library import (
    EX1_A,
    EX1_R,
    EX2_CENTERS,
    EX2_RADII,
    ex1_domega,
    ex1_omega,
    example_region,
)

from conftest import circle, interior_grid, unit_circle

_cache = {}


def solved(name, n):
    """Solutions are shared between tests; each solve is deterministic."""
    key = (name, n)
    if key not in _cache:
        _cache[key] = circular_map(example_region(name, n), SolverConfig(n=n))
    return _cache[key]


# -- sub-steps ------------------------------------------------------------------

def test_exterior_sub_step_affine_oracle():
    n = 64
    state = KoebeState(
        curves=(circle(-0.5, 0.25, n, "cw"), circle(0.0, 0.1, n, "cw")),
        tracked=np.array([-0.5, 0.0], dtype=complex),
    )
    new = sub_step_exterior(state, 0)
    assert np.abs(np.abs(new.curves[0].positions) - 1).max() < 1e-13
    assert new.tracked[0] == 0
    assert new.tracked[1] == pytest.approx(2.0, abs=1e-12)
    img = new.curves[1]
    assert np.abs(np.abs(img.positions - 2.0) - 0.4).max() < 1e-12
    ratio = np.abs(img.derivatives) / np.abs(state.curves[1].derivatives)
    assert np.abs(ratio - 4).max() < 1e-11


def test_exterior_sub_step_identity():
    n = 32
    state = KoebeState(
        curves=(unit_circle(n, "cw"), circle(3.0, 0.5, n, "cw")),
        tracked=np.array([0.0, 3.0], dtype=complex),
    )
    new = sub_step_exterior(state, 0)
    for a, b in zip(state.curves, new.curves):
        assert np.abs(a.positions - b.positions).max() < 1e-12
        assert np.abs(a.derivatives - b.derivatives).max() < 1e-12


def test_interior_sub_step_affine_oracle():
    n = 64
    state = KoebeState(
        curves=(circle(4.0, 1.0, n, "cw"), circle(2.0, 4.0, n, "ccw")),
        tracked=np.array([4.0, 2.0], dtype=complex),
    )
    new = sub_step_interior(state)
    assert new.tracked[1] == 0
    assert new.tracked[0] == pytest.approx(0.5, abs=1e-12)
    assert np.abs(np.abs(new.curves[0].positions - 0.5) - 0.25).max() < 1e-12
    assert np.abs(np.abs(new.curves[1].positions) - 1).max() < 1e-13


def test_interior_sub_step_identity():
    n = 32
    state = KoebeState(
        curves=(circle(-0.5, 0.25, n, "cw"), unit_circle(n)),
        tracked=np.array([-0.5, 0.0], dtype=complex),
    )
    new = sub_step_interior(state)
    for a, b in zip(state.curves, new.curves):
        assert np.abs(a.positions - b.positions).max() < 1e-12


def test_transport_failure_is_reported():
    # the companion curve encloses the mapped curve: its image crosses the circle
    n = 32
    state = KoebeState(
        curves=(circle(0.0, 0.5, n, "cw"), circle(0.0, 0.8, n, "cw")),
        tracked=np.array([0.0, 0.0], dtype=complex),
    )
    with pytest.raises((KoebeError, GeometryError)):
        sub_step_exterior(state, 0)


# -- normalization ----------------------------------------------------------------

def test_normalize_affine():
    n = 64
    bnd = unit_circle(n, "cw")
    img = SampledCurve(2 * bnd.positions + 3, 2 * bnd.derivatives, "cw")
    state = KoebeState(curves=(img,), tracked=np.array([3.0 + 0j]))
    new, b, c0 = normalize_unbounded(state, [bnd], 0.0)
    assert b == pytest.approx(2, abs=1e-13) and c0 == pytest.approx(3, abs=1e-13)
    assert np.abs(new.curves[0].positions - bnd.positions).max() < 1e-13
    assert np.abs(new.curves[0].derivatives - bnd.derivatives).max() < 1e-13
    assert abs(new.tracked[0]) < 1e-13
    again, b2, c2 = normalize_unbounded(new, [bnd], 0.0)
    assert abs(b2 - 1) < 1e-12 and abs(c2) < 1e-12
    assert np.abs(again.curves[0].positions - new.curves[0].positions).max() < 1e-12


# -- drivers ----------------------------------------------------------------------

def test_unit_disk_single_curve():
    region = RegionSpec(True, (ParamCurve.circle(0, 1),), 0.0)
    sol = map_bounded(region, SolverConfig(n=32))
    assert sol.iterations == 1 and sol.converged
    assert abs(sol.centers[0]) < 1e-14 and sol.radii[0] == pytest.approx(1, abs=1e-14)


def test_single_exterior_circle():
    region = RegionSpec(False, (ParamCurve.circle(1.0, 2.0),), 1.0)
    sol = map_unbounded(region, SolverConfig(n=64))
    assert sol.converged
    assert sol.radii[0] == pytest.approx(2, abs=1e-12)
    assert sol.centers[0] == pytest.approx(1, abs=1e-12)
    assert sol.circle_fit_residuals().max() < 1e-12
    b, c0 = laurent_b_c0(BoundaryFunction(sol.boundary, [c.positions for c in sol.curves]), 1.0)
    assert abs(b - 1) < 1e-12 and abs(c0) < 1e-12


def test_example1_boundary_values():
    sol = solved("ex1", 128)
    for b, c in zip(sol.boundary, sol.curves):
        assert np.abs(c.positions - ex1_omega(b.positions)).max() < 1e-12
    assert np.allclose(sol.centers, [-0.5, 0.0], atol=1e-12)
    assert np.allclose(sol.radii, [0.25, 1.0], atol=1e-12)


def test_example1_canonical_fixed_point():
    sol = solved("ex1-canonical", 128)
    assert sol.errors[0] < 1e-12


def test_example2_circles():
    sol = solved("ex2", 64)
    assert np.abs(sol.centers - EX2_CENTERS).max() < 1e-10
    assert np.abs(sol.radii - EX2_RADII).max() < 1e-10


def test_example2_canonical_fixed_point():
    sol = solved("ex2-canonical", 64)
    assert sol.errors[0] < 1e-10


def test_iteration_cap_is_flagged():
    sol = circular_map(example_region("ex3", 64), SolverConfig(n=64, max_iter=2))
    assert not sol.converged and sol.iterations == 2


def test_errors_shrink_to_tolerance():
    for name in ("ex3", "ex4"):
        sol = solved(name, 128)
        assert sol.converged and sol.errors[-1] < 0.5e-13


def test_driver_rejects_wrong_kind():
    with pytest.raises(ValueError):
        map_bounded(example_region("ex4", 32), SolverConfig(n=32))
    with pytest.raises(ValueError):
        map_unbounded(example_region("ex1", 32), SolverConfig(n=32))


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(eps=0.0)
    with pytest.raises(ValueError):
        SolverConfig(max_iter=0)


# -- region validation ------------------------------------------------------------

def _check(region, n=64):
    check_region(region, region.sample(n))


def test_overlapping_holes_rejected():
    region = RegionSpec(False, (ParamCurve.circle(0, 1), ParamCurve.circle(1.5, 1)), 0.0)
    with pytest.raises(GeometryError):
        _check(region)


def test_hole_outside_outer_curve_rejected():
    region = RegionSpec(True, (ParamCurve.circle(3, 0.5), ParamCurve.circle(0, 1)), 0.0)
    with pytest.raises(GeometryError):
        _check(region)


def test_alpha_placement():
    with pytest.raises(GeometryError):
        _check(RegionSpec(True, (ParamCurve.circle(0, 0.3), ParamCurve.circle(0, 1)), 0.0))
    with pytest.raises(GeometryError):
        _check(RegionSpec(False, (ParamCurve.circle(0, 0.3),), 2.0))


def test_bad_starting_point_rejected():
    region = RegionSpec(False, (ParamCurve.circle(0, 1), ParamCurve.circle(3, 1)), 0.0,
                        interior_points=(None, 10.0))
    with pytest.raises(GeometryError):
        circular_map(region, SolverConfig(n=32))


def test_winding_numbers():
    c = unit_circle(32)
    assert list(winding_numbers(c, [0, 2, 0.5j])) == [1, 0, 1]
    assert list(winding_numbers(unit_circle(32, "cw"), [0])) == [-1]


# -- evaluation -------------------------------------------------------------------

def test_forward_and_derivative_example1():
    sol = solved("ex1", 128)
    r = np.linspace(EX1_R + 0.1, 0.9, 8)
    z = (r[:, None] * np.exp(1j * np.linspace(0, 2 * np.pi, 16, endpoint=False))).ravel()
    assert np.abs(forward_eval(sol, z) - ex1_omega(z)).max() < 1e-10
    assert np.abs(derivative_eval(sol, z) - ex1_domega(z)).max() < 1e-8


def test_bounded_normalization_at_alpha():
    for name in ("ex1", "ex3"):
        sol = solved(name, 128)
        assert abs(forward_eval(sol, sol.alpha)) < 1e-10
        d = derivative_eval(sol, sol.alpha)
        assert abs(d.imag) < 1e-10 and d.real > 0


def test_inverse_of_zero_is_alpha():
    sol = solved("ex1", 128)
    assert abs(inverse_eval(sol, 0.0) - EX1_A) < 1e-12


def test_unbounded_far_field():
    sol = solved("ex4", 128)
    z = 1e6 * np.exp(1j * np.array([0.1, 2.0, 4.0]))
    assert np.abs(forward_eval(sol, z) - z).max() <= 1e-4
    z = 1e4 * np.exp(1j * np.array([0.1, 2.0, 4.0]))
    assert np.abs(derivative_eval(sol, z) - 1).max() <= 1e-6


@pytest.mark.parametrize("name", ["ex3", "ex4"])
def test_derivative_matches_finite_differences(name):
    sol = solved(name, 128)
    z = interior_grid(sol, count=8)
    d = 1e-4
    fd = (forward_eval(sol, z + d) - forward_eval(sol, z - d)) / (2 * d)
    assert np.abs(fd - derivative_eval(sol, z)).max() < 1e-6


@pytest.mark.parametrize("name,n", [("ex1", 128), ("ex2", 64), ("ex3", 128), ("ex4", 128),
                                    ("ex5", 512)])
def test_round_trip(name, n):
    sol = solved(name, n)
    z = interior_grid(sol, count=20)
    assert z.size > 20
    assert np.abs(inverse_eval(sol, forward_eval(sol, z)) - z).max() < 1e-8


@pytest.mark.parametrize("name", ["ex3", "ex4"])
def test_derivative_consistency(name):
    sol = solved(name, 128)
    for c in sol.curves:
        mism = np.abs(spectral_derivative(c.positions) - c.derivatives).max()
        assert mism <= 1e-8 * np.abs(c.derivatives).max()


def test_circle_fit_within_tolerance():
    for name in ("ex3", "ex4"):
        assert solved(name, 128).circle_fit_residuals().max() <= 10 * 0.5e-13


def test_conformal_modulus_example1():
    sol = solved("ex1", 128)
    c, r = sol.centers[0].real, sol.radii[0]
    # Mobius map z -> (z - a)/(1 - a z) taking the image annulus to a concentric one
    s = 1 + c * c - r * r
    a = (s - np.sqrt(s * s - 4 * c * c)) / (2 * c)
    rho = abs((c + r - a) / (1 - a * (c + r)))
    assert rho == pytest.approx(EX1_R, abs=1e-10)
