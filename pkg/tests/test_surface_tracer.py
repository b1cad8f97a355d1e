"""
test_surface_tracer.py – Unit Tests for Solution-Surface Tracing (HoloFlow)
---------------------------------------------------------------------

Tests:
- Sheet 0 passes through z₀ at T = 0 and follows the Newton ODE
- Constant-phase residual on traced and perturbed grids
- Periodic return around a single zero pair
- Root matching, critical points, continuation breaks
- Thread-pool determinism and JSON export
"""

import sys
from pathlib import Path

project_root = Path(__file__).resolve().parents[1]
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

# ───────────────────────────────────────────────────────────────────────────────
# 📦 Imports
# ───────────────────────────────────────────────────────────────────────────────

import numpy as np
import pytest

from src.catalog.holo_function import build_xi_approx
from src.catalog.zero_table import DEFAULT_TABLE_PATH, load_zero_table
from src.errors import ContinuationBreak, DegenerateAnchor
from src.flows.flow_engine import integrate_newton
from src.flows.trajectory import TimeRay
from src.surface.surface_tracer import (
    BRANCH_EVENT_COLUMNS,
    ContinuationOptions,
    SurfaceGrid,
    TimeLattice,
    critical_points,
    match_roots,
    trace_surface,
    verify_constant_phase,
)

Z0 = 2.0 + 5.0j
TAU1 = (-0.5, -0.25, 0.0, 0.25, 0.5)
TAU2 = (0.0, 0.25, 0.5)

# ───────────────────────────────────────────────────────────────────────────────
# 🔧 Fixtures
# ───────────────────────────────────────────────────────────────────────────────


@pytest.fixture(scope="module")
def table():
    return load_zero_table(DEFAULT_TABLE_PATH)


@pytest.fixture(scope="module")
def grid(table):
    """m = 2 surface on a 5×3 lattice around T = 0."""
    return trace_surface(table, 2, Z0, TimeLattice(TAU1, TAU2))


@pytest.fixture
def orbit_grid(table):
    """m = 1 surface along one imaginary period, anchored next to ρ₁."""
    z0 = table.rho(1) + 0.5
    lattice = TimeLattice((0.0,), tuple(np.linspace(0.0, 2 * np.pi, 33)))
    return trace_surface(table, 1, z0, lattice)


# ───────────────────────────────────────────────────────────────────────────────
# 🗺️ Traced surfaces
# ───────────────────────────────────────────────────────────────────────────────


def test_grid_shape_and_anchor(grid):
    """✅ 2m sheets over the lattice; sheet 0 is z₀ at T = 0."""
    assert grid.sheets.shape == (4, 5, 3)
    assert grid.n_sheets == 4
    assert abs(grid.sheet(0)[2, 0] - Z0) < 1e-10
    assert np.all(np.isfinite(grid.sheets))


def test_constant_phase_holds(grid):
    """✅ Every stored root satisfies the phase identity."""
    assert verify_constant_phase(grid) <= 1e-8


def test_sheet_zero_follows_newton_flow(table, grid):
    """✅ Real and imaginary Newton time from z₀ land on sheet 0."""
    h = build_xi_approx(table, 2)
    real = integrate_newton(h, Z0, TimeRay.real(0.5))
    imag = integrate_newton(h, Z0, TimeRay.imaginary(0.5))
    assert abs(grid.sheet(0)[4, 0] - real.final) <= 1e-6
    assert abs(grid.sheet(0)[2, 2] - imag.final) <= 1e-6


def test_single_zero_pair_orbit_returns(orbit_grid):
    """✅ One imaginary period brings sheet 0 back to z₀."""
    sheet = orbit_grid.sheet(0)[0]
    assert abs(sheet[-1] - orbit_grid.z0) < 1e-8
    assert np.max(np.abs(sheet - orbit_grid.z0)) > 0.5


def test_perturbed_grid_fails_phase_check(orbit_grid):
    """❌ Moving one stored root by 1e−3 is detected."""
    orbit_grid.sheets[0, 0, 1] += 1e-3
    assert verify_constant_phase(orbit_grid) > 1e-4


def test_empty_grid_residual_is_zero():
    """✅ Nothing stored, nothing to violate."""
    empty = SurfaceGrid(
        z0=Z0,
        zeros=np.array([], dtype=complex),
        lattice=TimeLattice.single(),
        sheets=np.zeros((0, 1, 1), dtype=complex),
    )
    assert verify_constant_phase(empty) == 0.0


def test_single_node_lattice(table):
    """✅ A one-node lattice at T = 0 holds the roots of P_m(·; 0, z₀)."""
    single = trace_surface(table, 1, Z0, TimeLattice.single())
    assert single.sheets.shape == (2, 1, 1)
    assert abs(single.sheet(0)[0, 0] - Z0) < 1e-10


def test_degenerate_anchor_is_rejected(table):
    with pytest.raises(DegenerateAnchor):
        trace_surface(table, 1, table.rho(1), TimeLattice.single())


# ───────────────────────────────────────────────────────────────────────────────
# 🔗 Matching and continuation
# ───────────────────────────────────────────────────────────────────────────────


def test_match_roots_nearest():
    """✅ Each sheet takes its nearest candidate."""
    matched, jump = match_roots(np.array([0.0, 1.0]), np.array([1.1, 0.1]))
    assert np.allclose(matched, [0.1, 1.1])
    assert jump == pytest.approx(0.1)


def test_match_roots_ties_go_to_smallest_index():
    """✅ Equidistant candidates resolve in favour of sheet 0."""
    matched, jump = match_roots(np.array([0.0, 2.0]), np.array([1.0, 3.0]))
    assert list(matched) == [1.0, 3.0]
    assert jump == 1.0


def test_critical_points_of_product():
    """✅ d/dz (z − 1)(z + 1) vanishes at 0."""
    crit = critical_points(np.array([1.0, -1.0], dtype=complex))
    assert crit.shape == (1,)
    assert abs(crit[0]) < 1e-15


def test_tiny_max_jump_breaks_continuation(table):
    """❌ A jump bound no step can meet raises with the partial grid."""
    opts = ContinuationOptions(max_jump=1e-6)
    with pytest.raises(ContinuationBreak) as info:
        trace_surface(table, 2, Z0, TimeLattice((0.0, 0.25), (0.0,)), opts)
    exc = info.value
    assert exc.node == (1, 0)
    assert exc.partial_grid is not None
    assert abs(exc.partial_grid.sheet(0)[0, 0] - Z0) < 1e-10
    assert not np.isfinite(exc.partial_grid.sheets[0, 1, 0])


def test_options_validation():
    with pytest.raises(ValueError):
        ContinuationOptions(max_jump=0.0)
    with pytest.raises(ValueError):
        ContinuationOptions(workers=0)


def test_thread_pool_matches_serial(table, grid):
    """✅ workers = 2 reproduces the serial sheets exactly."""
    parallel = trace_surface(table, 2, Z0, TimeLattice(TAU1, TAU2), ContinuationOptions(workers=2))
    assert np.array_equal(parallel.sheets, grid.sheets)


# ───────────────────────────────────────────────────────────────────────────────
# 💾 Export
# ───────────────────────────────────────────────────────────────────────────────


def test_json_export_preserves_sheets(tmp_path, grid):
    """✅ Stored JSON reloads to identical sheets and lattice."""
    path = grid.to_json(tmp_path / "surface.json")
    loaded = SurfaceGrid.from_json(path)
    assert np.array_equal(loaded.sheets, grid.sheets)
    assert loaded.lattice == grid.lattice
    assert loaded.m == 2


def test_branch_frame_columns(grid):
    frame = grid.branch_frame()
    assert list(frame.columns) == BRANCH_EVENT_COLUMNS
    assert len(frame) == len(grid.branch_events)
