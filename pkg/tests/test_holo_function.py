"""
test_holo_function.py – Unit Tests for the HoloFunction Catalog (HoloFlow)
---------------------------------------------------------------------

Tests evaluation of cosh-shift, xi-approx, polynomial and linear kinds:
- Exact values at hand-checked points
- Analytic derivatives against finite differences
- Critical-line and conjugate symmetry of xi-approx
- Logarithmic-derivative sum, pole and overflow guards
- Automatic α normalisation over a window
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

from src.catalog.holo_function import (
    FunctionKind,
    HoloFunction,
    auto_scale,
    build_xi_approx,
    cosh_shift,
    evaluate,
    generic_polynomial,
    linear,
    log_derivative_sum,
)
from src.catalog.zero_table import DEFAULT_TABLE_PATH, load_zero_table
from src.errors import EvaluationOverflow, InsufficientZeros, PoleError

# ───────────────────────────────────────────────────────────────────────────────
# 🔧 Fixtures
# ───────────────────────────────────────────────────────────────────────────────


@pytest.fixture(scope="module")
def table():
    """Bundled table of the first 50 ordinates."""
    return load_zero_table(DEFAULT_TABLE_PATH)


@pytest.fixture(scope="module")
def xi1(table):
    return build_xi_approx(table, 1)


@pytest.fixture(scope="module")
def xi4(table):
    return build_xi_approx(table, 4)


# ───────────────────────────────────────────────────────────────────────────────
# ✅ Hand-checked values
# ───────────────────────────────────────────────────────────────────────────────


def test_cosh_shift_values():
    """✅ cosh(0) = 1, cosh(iπ) = −1, sinh(iπ/2) = i."""
    h = cosh_shift()
    assert evaluate(h, 0.5, 0) == pytest.approx(1.0)
    assert abs(evaluate(h, 0.5 + 1j * np.pi, 0) - (-1.0)) < 1e-15
    assert abs(evaluate(h, 0.5 + 0.5j * np.pi, 1) - 1j) < 1e-15
    assert h.kind is FunctionKind.COSH_SHIFT


def test_xi_approx_vanishes_at_zeros(xi1, xi4):
    """✅ The constructed roots are exact zeros."""
    assert xi1(xi1.zeros[0]) == 0
    for rho in xi4.zeros:
        assert abs(xi4(rho)) < 1e-14


def test_xi_approx_value_at_half(table, xi1):
    """✅ h(1/2) = γ₁²/(1/4 + γ₁²) ≈ 0.99875 for one pair."""
    gamma = table.gammas[0]
    expected = gamma**2 / (0.25 + gamma**2)
    assert xi1(0.5) == pytest.approx(expected, rel=1e-15)
    assert expected == pytest.approx(0.99875, abs=1e-5)


def test_xi_approx_normalised_at_zero_and_one(xi4):
    """✅ Every factor is 1 at z = 0 and z = 1."""
    assert xi4(0.0) == pytest.approx(1.0, rel=1e-14)
    assert xi4(1.0) == pytest.approx(1.0, rel=1e-14)


def test_xi_approx_real_on_critical_line_and_real_axis(xi4):
    """✅ h is real for z = 1/2 + it and for real z."""
    t = np.linspace(-40.0, 40.0, 161)
    on_line = xi4(0.5 + 1j * t)
    assert np.max(np.abs(on_line.imag)) <= 1e-14 * (1.0 + np.max(np.abs(on_line.real)))
    x = np.linspace(-5.0, 6.0, 23)
    assert np.all(xi4(x + 0j).imag == 0)


def test_xi_approx_conjugate_symmetry(xi4):
    """✅ h(z̄) = conj h(z)."""
    z = np.array([2.0 + 5.0j, -1.3 + 17.2j, 3.1 - 8.4j])
    assert np.allclose(xi4(np.conj(z)), np.conj(xi4(z)), rtol=1e-14, atol=0)


def test_generic_polynomial_and_linear():
    """✅ z² − 1 and h(z) = a·z with their derivatives."""
    p = generic_polynomial([1.0, 0.0, -1.0])
    assert p.jet(2.0) == (3.0 + 0j, 4.0 + 0j, 2.0 + 0j)
    constant = generic_polynomial([2.5])
    assert constant.jet(1.0 + 1.0j) == (2.5 + 0j, 0j, 0j)
    lin = linear(2.0)
    assert lin.jet(1.5j) == (3.0j, 2.0 + 0j, 0j)


# ───────────────────────────────────────────────────────────────────────────────
# 🔎 Derivatives
# ───────────────────────────────────────────────────────────────────────────────


@pytest.mark.parametrize("z", [2.0 + 5.0j, -0.7 + 12.3j, 1.1 - 3.2j])
def test_xi_derivatives_match_finite_differences(xi4, z):
    """✅ Analytic h′ and h″ agree with central differences."""
    step = 1e-5
    fd1 = (xi4(z + step) - xi4(z - step)) / (2 * step)
    fd2 = (xi4.derivative(z + step) - xi4.derivative(z - step)) / (2 * step)
    assert abs(xi4.derivative(z) - fd1) <= 1e-6 * (1.0 + abs(fd1))
    assert abs(xi4.second_derivative(z) - fd2) <= 1e-6 * (1.0 + abs(fd2))


def test_cosh_derivatives_are_exact():
    """✅ h′ = sinh and h″ = cosh for the shifted cosh."""
    h = cosh_shift(2.0)
    z = 0.9 + 0.4j
    value, slope, curvature = h.jet(z)
    assert slope == pytest.approx(2.0 * np.sinh(z - 0.5))
    assert curvature == value


def test_scaled_rotates_values():
    """✅ (i·h)(z) = i·h(z) and zero factors are rejected."""
    h = cosh_shift()
    z = 0.3 + 0.8j
    assert h.scaled(1j)(z) == pytest.approx(1j * h(z))
    with pytest.raises(ValueError):
        h.scaled(0)


def test_evaluate_rejects_bad_order():
    """❌ Only orders 0, 1, 2 exist."""
    with pytest.raises(ValueError):
        cosh_shift().evaluate(0.5, 3)


# ───────────────────────────────────────────────────────────────────────────────
# 🧮 Logarithmic derivative
# ───────────────────────────────────────────────────────────────────────────────


def test_log_derivative_sum_examples(table):
    """✅ Midpoint gives 0; 1/2 + 2iγ₁ gives −4i/(3γ₁)."""
    gamma = table.gammas[0]
    assert abs(log_derivative_sum(table, 1, 0.5)) < 1e-18
    value = log_derivative_sum(table, 1, 0.5 + 2j * gamma)
    assert value == pytest.approx(-4j / (3 * gamma), rel=1e-14)


def test_log_derivative_sum_is_h_prime_over_h(table, xi4):
    """✅ Σ 1/(z − ρ) = h′/h for the finite product."""
    z = 2.0 + 5.0j
    assert log_derivative_sum(table, 4, z) == pytest.approx(xi4.derivative(z) / xi4(z), rel=1e-12)


def test_log_derivative_sum_pole_guard(table):
    """❌ Evaluating on an included zero raises PoleError."""
    with pytest.raises(PoleError):
        log_derivative_sum(table, 2, table.rho(2))


# ───────────────────────────────────────────────────────────────────────────────
# 🛡️ Guards
# ───────────────────────────────────────────────────────────────────────────────


def test_cosh_overflow_is_reported():
    """❌ cosh beyond the double range raises EvaluationOverflow."""
    with pytest.raises(EvaluationOverflow):
        cosh_shift()(800.0)


def test_value_is_returned_when_only_derivatives_overflow():
    """✅ h(z) alone is finite even if h′ and h″ are not; those raise for their order."""
    h = generic_polynomial([1.0, 0.0, 0.0], scale=1e308)
    assert h(1.2) == pytest.approx(1.44e308)
    with pytest.raises(EvaluationOverflow) as info:
        h.derivative(1.2)
    assert info.value.order == 1
    with pytest.raises(EvaluationOverflow):
        h.jet(1.2)


def test_build_xi_approx_guards(table):
    """❌ Bad α, bad table type and too large m are rejected."""
    with pytest.raises(ValueError):
        build_xi_approx(table, 2, scale=-1.0)
    with pytest.raises(TypeError):
        build_xi_approx([14.1, 21.0], 2)
    with pytest.raises(InsufficientZeros):
        build_xi_approx(table, 51)


def test_roots_within():
    """✅ Known roots near a point for cosh and polynomial kinds."""
    near = cosh_shift().roots_within(0.5 + 1.5j, 0.2)
    assert near.size == 1
    assert abs(near[0] - (0.5 + 0.5j * np.pi)) < 1e-15
    roots = generic_polynomial([1.0, 0.0, -1.0]).roots_within(0.0, 2.0)
    assert sorted(roots.real) == pytest.approx([-1.0, 1.0])


def test_label_reflects_kind(xi4):
    assert xi4.label.startswith("xi-approx(m=4")
    assert HoloFunction(FunctionKind.LINEAR).label == "linear"


# ───────────────────────────────────────────────────────────────────────────────
# 📏 Auto scale
# ───────────────────────────────────────────────────────────────────────────────


def test_auto_scale_normalises_window(table):
    """✅ After scaling, the lattice maximum of |h| is 1."""
    unit = build_xi_approx(table, 4)
    alpha = auto_scale(unit, (-7.0, 8.0), (-1.0, 30.0), density=32)
    scaled = build_xi_approx(table, 4, alpha)
    re = np.linspace(-7.0, 8.0, 32)
    im = np.linspace(-1.0, 30.0, 32)
    grid = re[None, :] + 1j * im[:, None]
    assert np.max(np.abs(scaled(grid))) == pytest.approx(1.0, rel=1e-12)
