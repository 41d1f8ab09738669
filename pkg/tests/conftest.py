import numpy as np
import pytest

from circmap.geometry import ParamCurve, sample_curve
from circmap.koebe import winding_numbers

# (criterion, passed, detail) rows collected by the acceptance suite
ACCEPTANCE_ROWS: list[tuple[str, bool, str]] = []


@pytest.fixture
def record():
    def _record(criterion: str, passed: bool, detail: str) -> None:
        line = f"{'PASS' if passed else 'FAIL'}  {criterion}: {detail}"
        ACCEPTANCE_ROWS.append((criterion, passed, detail))
        print(line)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_ROWS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in ACCEPTANCE_ROWS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {criterion}: {detail}")


def unit_circle(n=64, orientation="ccw"):
    return sample_curve(ParamCurve.circle(0.0, 1.0), n, orientation)


def circle(center, radius, n=64, orientation="ccw"):
    return sample_curve(ParamCurve.circle(center, radius), n, orientation)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def interior_grid(sol, count=30, spacings=5.0):
    """Points of the original region at least ``spacings`` node spacings
    (arclength) away from every boundary curve."""
    bnd = sol.boundary
    pts = np.concatenate([c.positions for c in bnd])
    lo, hi = pts.real.min(), pts.real.max()
    blo, bhi = pts.imag.min(), pts.imag.max()
    if not sol.bounded:
        pad = 0.5 * max(hi - lo, bhi - blo)
        lo, hi, blo, bhi = lo - pad, hi + pad, blo - pad, bhi + pad
    x, y = np.meshgrid(np.linspace(lo, hi, count), np.linspace(blo, bhi, count))
    z = (x + 1j * y).ravel()
    keep = np.ones(z.shape, dtype=bool)
    for i, c in enumerate(bnd):
        wn = winding_numbers(c, z)
        outer = sol.bounded and i == len(bnd) - 1
        keep &= (wn != 0) if outer else (wn == 0)
        h = np.abs(c.derivatives).max() * 2.0 * np.pi / c.n
        keep &= np.abs(z[:, None] - c.positions[None, :]).min(axis=1) > spacings * h
    return z[keep]
