"""
test_closed_forms.py – Unit Tests for Hamiltonian Closed Forms (HoloFlow)
---------------------------------------------------------------------

Tests:
- Field of H = h(z)·p and conservation of H under the closed forms
- Momentum, sensitivity and Δp closed forms at and away from z₀
- Trace-formula Δp against the direct closed form
- Flow-map matrix: triangular shape, det = 1, agreement with closed forms
- Pole guards and the momentum surface
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

from src.catalog.holo_function import build_xi_approx, cosh_shift, linear
from src.catalog.zero_table import DEFAULT_TABLE_PATH, load_zero_table
from src.errors import AnchorPole, MomentumPole, PoleError
from src.hamiltonian.closed_forms import (
    SensitivityBundle,
    action_along_orbit,
    delta_p_closed_form,
    delta_p_trace_form,
    flow_map_matrix,
    hamiltonian_abs,
    hamiltonian_field,
    hamiltonian_value,
    momentum_closed_form,
    momentum_surface,
    newton_time_from_momentum,
    sensitivity_closed_form,
)

Z0 = 2.0 + 5.0j
Z = 3.0 + 8.0j
P0, DZ0, DP0 = 0.7 - 0.2j, 1.0 + 0.5j, -0.3 + 1.1j

# ───────────────────────────────────────────────────────────────────────────────
# 🔧 Fixtures
# ───────────────────────────────────────────────────────────────────────────────


@pytest.fixture(scope="module")
def table():
    return load_zero_table(DEFAULT_TABLE_PATH)


@pytest.fixture(scope="module")
def xi2(table):
    return build_xi_approx(table, 2)


# ───────────────────────────────────────────────────────────────────────────────
# ⚖️ Field and invariants
# ───────────────────────────────────────────────────────────────────────────────


def test_hamiltonian_field_linear():
    """✅ h = z at (z, p) = (1, 1) gives (ż, ṗ) = (1, −1)."""
    assert hamiltonian_field(linear(), 1.0, 1.0) == (1.0, -1.0)


def test_hamiltonian_conserved_by_closed_form(xi2):
    """✅ h(z)·p(z) = h(z₀)·p₀ for the closed-form momentum."""
    p = momentum_closed_form(xi2, Z, Z0, P0)
    assert hamiltonian_value(xi2, Z, p) == pytest.approx(hamiltonian_value(xi2, Z0, P0), rel=1e-14)
    assert hamiltonian_abs(xi2, Z, p) == pytest.approx(abs(xi2(Z0) * P0) ** 2, rel=1e-13)


def test_closed_forms_reduce_to_initial_values(xi2):
    """✅ At z = z₀ every closed form returns its initial value."""
    assert momentum_closed_form(xi2, Z0, Z0, P0) == pytest.approx(P0)
    assert sensitivity_closed_form(xi2, Z0, Z0, DZ0) == pytest.approx(DZ0)
    assert delta_p_closed_form(xi2, Z0, Z0, P0, DZ0, DP0) == pytest.approx(DP0)


def test_product_p_dz_is_invariant(xi2):
    """✅ p·Δz = p₀·Δz₀ along the closed forms."""
    p = momentum_closed_form(xi2, Z, Z0, P0)
    dz = sensitivity_closed_form(xi2, Z, Z0, DZ0)
    assert p * dz == pytest.approx(P0 * DZ0, rel=1e-13)


def test_bundle_closed_form(xi2):
    """✅ SensitivityBundle.closed_form reproduces the standalone functions."""
    bundle = SensitivityBundle.initial(Z0, P0, DZ0, DP0)
    moved = bundle.with_state([Z, 0, 0, 0]).closed_form(xi2)
    assert moved.p == momentum_closed_form(xi2, Z, Z0, P0)
    assert moved.dz == sensitivity_closed_form(xi2, Z, Z0, DZ0)
    assert moved.dp == delta_p_closed_form(xi2, Z, Z0, P0, DZ0, DP0)
    assert moved.z0 == Z0
    assert bundle.state.shape == (4,)


def test_trace_form_matches_direct_form(table, xi2):
    """✅ Replacing h′/h by Σ 1/(z − ρ) changes nothing."""
    direct = delta_p_closed_form(xi2, Z, Z0, P0, DZ0, DP0)
    trace = delta_p_trace_form(table, 2, Z, Z0, P0, DZ0, DP0)
    assert trace == pytest.approx(direct, rel=1e-10)


# ───────────────────────────────────────────────────────────────────────────────
# 🧮 Flow-map matrix
# ───────────────────────────────────────────────────────────────────────────────


@pytest.mark.parametrize("build", ["xi", "cosh"])
def test_flow_map_matrix_properties(table, xi2, build):
    """✅ Lower triangular, det 1, and M·(Δz₀, Δp₀) equals the closed forms."""
    h = xi2 if build == "xi" else cosh_shift()
    z0, z = (Z0, Z) if build == "xi" else (0.3 + 0.4j, 0.8 + 0.9j)
    M = flow_map_matrix(h, z, z0, P0)
    assert M.m12 == 0
    assert M.det == pytest.approx(1.0, rel=1e-13)
    dz, dp = M.apply(DZ0, DP0)
    assert dz == pytest.approx(sensitivity_closed_form(h, z, z0, DZ0), rel=1e-12)
    assert dp == pytest.approx(delta_p_closed_form(h, z, z0, P0, DZ0, DP0), rel=1e-10)
    assert M.as_array().shape == (2, 2)


def test_flow_map_matrix_is_identity_at_anchor(xi2):
    M = flow_map_matrix(xi2, Z0, Z0, P0)
    assert np.allclose(M.as_array(), np.eye(2), atol=1e-12)
    assert abs(M.k_zp) < 1e-12


def test_flow_map_matrix_from_table(table, xi2):
    """✅ A ZeroTable plus m builds the same matrix as the function."""
    from_table = flow_map_matrix(table, Z, Z0, P0, m=2)
    from_function = flow_map_matrix(xi2, Z, Z0, P0)
    assert np.allclose(from_table.as_array(), from_function.as_array(), rtol=1e-14, atol=0)


def test_flow_map_matrix_guards(table):
    """❌ Tables need m; other objects are rejected."""
    with pytest.raises(ValueError):
        flow_map_matrix(table, Z, Z0, P0)
    with pytest.raises(TypeError):
        flow_map_matrix("cosh", Z, Z0, P0)


# ───────────────────────────────────────────────────────────────────────────────
# 🛑 Poles
# ───────────────────────────────────────────────────────────────────────────────


def test_momentum_pole_at_zero(table, xi2):
    """❌ p is singular where h vanishes."""
    with pytest.raises(MomentumPole):
        momentum_closed_form(xi2, table.rho(1), Z0, P0)
    with pytest.raises(MomentumPole):
        delta_p_closed_form(xi2, table.rho(1), Z0, P0, DZ0, DP0)


def test_anchor_pole(table, xi2):
    """❌ Δz is singular when z₀ is a zero of h."""
    with pytest.raises(AnchorPole):
        sensitivity_closed_form(xi2, Z, table.rho(2), DZ0)
    with pytest.raises(AnchorPole):
        flow_map_matrix(xi2, Z, table.rho(2), P0)


def test_trace_form_pole(table):
    """❌ The zero sum blows up on an included zero."""
    with pytest.raises(PoleError):
        delta_p_trace_form(table, 2, table.rho(-1), Z0, P0, DZ0, DP0)


# ───────────────────────────────────────────────────────────────────────────────
# 🔁 Action, Newton time, surfaces
# ───────────────────────────────────────────────────────────────────────────────


def test_action_and_newton_time():
    """✅ S = H₀·t*, and T inverts p = p₀·e^{T}."""
    assert action_along_orbit(2.0 + 1.0j, 2 * np.pi) == pytest.approx((2.0 + 1.0j) * 2 * np.pi)
    T = 0.3 + 0.2j
    assert newton_time_from_momentum(P0 * np.exp(T), P0) == pytest.approx(T)


def test_momentum_surface_handles_gaps(table, xi2):
    """✅ NaN nodes and zeros of h stay NaN; others carry h(z₀)p₀/h(z)."""
    grid = np.array([[Z0, np.nan], [table.rho(1), Z]], dtype=complex)
    surface = momentum_surface(xi2, grid, Z0, P0)
    assert surface[0, 0] == pytest.approx(P0)
    assert np.isnan(surface[0, 1])
    assert np.isnan(surface[1, 0])
    assert surface[1, 1] == pytest.approx(momentum_closed_form(xi2, Z, Z0, P0))
