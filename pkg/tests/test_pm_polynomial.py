"""
test_pm_polynomial.py – Unit Tests for P_m and Its Root Solver (HoloFlow)
---------------------------------------------------------------------

Tests:
- P_m vanishes at the anchor for T ∈ 2πiℤ
- Leading coefficient 1/Π₀ and the coefficient expansion
- Direct vs log-space evaluation, including e^{−T} underflow
- Two-variable form p·∏(z − ρ) − p₀·∏(z₀ − ρ)
- Aberth roots: residuals, agreement with companion eigenvalues, guards
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

from src.catalog.zero_table import DEFAULT_TABLE_PATH, load_zero_table
from src.errors import DegenerateAnchor
from src.surface.pm_polynomial import PmPolynomial, eval_Pm, eval_Pm_zp, leading_coefficient
from src.surface.root_solver import roots_of_Pm

Z0 = 2.0 + 5.0j


@pytest.fixture(scope="module")
def table():
    return load_zero_table(DEFAULT_TABLE_PATH)


# ───────────────────────────────────────────────────────────────────────────────
# 🧮 Evaluation
# ───────────────────────────────────────────────────────────────────────────────


def test_anchor_is_a_root_at_zero_time(table):
    """✅ P_m(z₀; 0, z₀) = 0."""
    P = PmPolynomial.build(table, 3, Z0)
    assert eval_Pm(P, Z0) == 0


@pytest.mark.parametrize("k", [-2, 1, 3])
def test_anchor_is_a_root_on_the_period_lattice(table, k):
    """✅ e^{−2πik} = 1 keeps z₀ a root."""
    P = PmPolynomial.build(table, 2, Z0, 2j * np.pi * k)
    assert abs(eval_Pm(P, Z0)) < 1e-12


def test_leading_coefficient(table):
    """✅ Coefficient of z^{2m} is 1/Π₀ and matches the expansion."""
    P = PmPolynomial.build(table, 2, Z0, 0.3 + 0.1j)
    coeffs = P.coefficients()
    assert coeffs.size == 5
    assert coeffs[0] == 1
    assert leading_coefficient(P) == pytest.approx(1.0 / P.pi0, rel=1e-15)


def test_coefficients_evaluate_like_the_product(table):
    """✅ Π₀·P_m from the expansion equals the product form."""
    P = PmPolynomial.build(table, 2, Z0, 0.4 - 0.2j)
    z = 1.0 + 9.0j
    assert np.polyval(P.coefficients(), z) / P.pi0 == pytest.approx(eval_Pm(P, z), rel=1e-9)


@pytest.mark.parametrize("z", [3.0 + 7.0j, -1.5 + 18.0j, 0.5 - 4.0j])
def test_log_and_direct_agree(table, z):
    """✅ Log-space evaluation reproduces direct multiplication."""
    P = PmPolynomial.build(table, 4, Z0, 0.3 + 0.2j)
    direct = eval_Pm(P, z, method="direct")
    via_log = eval_Pm(P, z, method="log")
    assert via_log == pytest.approx(direct, rel=1e-11)


def test_underflowing_target_stays_finite(table):
    """✅ T = 800 makes e^{−T} underflow; auto mode still returns the product."""
    P = PmPolynomial.build(table, 2, Z0, 800.0)
    z = np.array([3.0 + 7.0j, 10.0 + 1.0j])
    values = eval_Pm(P, z)
    assert np.all(np.isfinite(values))
    assert np.allclose(values, P.product_ratio(z), rtol=1e-12, atol=0)


def test_evaluation_guards(table):
    """❌ Unknown methods and non-polynomials are rejected."""
    P = PmPolynomial.build(table, 1, Z0)
    with pytest.raises(ValueError):
        eval_Pm(P, Z0, method="horner")
    with pytest.raises(TypeError):
        eval_Pm(np.poly([1.0, 2.0]), Z0)


def test_degenerate_anchor(table):
    """❌ z₀ on an included zero is rejected."""
    with pytest.raises(DegenerateAnchor):
        PmPolynomial.build(table, 1, table.rho(1))


def test_two_variable_form(table):
    """✅ Vanishes at (z₀, p₀); doubling p gives p₀·Π₀."""
    p0 = 0.7 - 0.2j
    assert eval_Pm_zp(table, 2, Z0, p0, Z0, p0) == 0
    P = PmPolynomial.build(table, 2, Z0)
    value = eval_Pm_zp(table, 2, Z0, 2 * p0, Z0, p0)
    assert value == pytest.approx(p0 * P.pi0, rel=1e-14)


# ───────────────────────────────────────────────────────────────────────────────
# 🎯 Roots
# ───────────────────────────────────────────────────────────────────────────────


def test_roots_at_zero_time_contain_anchor(table):
    """✅ For T = 0 one of the two roots is z₀."""
    roots = roots_of_Pm(PmPolynomial.build(table, 1, Z0))
    assert roots.size == 2
    assert np.min(np.abs(roots - Z0)) < 1e-10


def test_roots_have_small_residuals(table):
    """✅ Every root satisfies |P_m| ≤ 1e−10·(1 + |e^{−T}|)."""
    P = PmPolynomial.build(table, 3, Z0, np.log(2.0))
    roots = roots_of_Pm(P)
    assert roots.size == 6
    assert np.max(np.abs(eval_Pm(P, roots))) <= 1e-10 * (1.0 + abs(P.target))


def test_roots_match_companion_eigenvalues(table):
    """✅ Aberth roots agree with np.roots on the expanded coefficients."""
    P = PmPolynomial.build(table, 3, Z0, 0.5 + 1.0j)
    ours = roots_of_Pm(P)
    reference = np.roots(P.coefficients())
    for r in ours:
        assert np.min(np.abs(reference - r)) <= 1e-6 * (1.0 + abs(r))


def test_roots_are_sorted(table):
    """✅ Output is ordered by real part, then imaginary part."""
    roots = roots_of_Pm(PmPolynomial.build(table, 4, Z0, 0.25))
    keys = list(zip(roots.real, roots.imag))
    assert keys == sorted(keys)


def test_degree_zero_has_no_roots(table):
    """❌ m = 0 leaves a constant polynomial."""
    with pytest.raises(ValueError):
        roots_of_Pm(PmPolynomial.build(table, 0, Z0))
