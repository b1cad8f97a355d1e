"""
test_bundle_integrator.py – Unit Tests for the (z, p, Δz, Δp) Integrator (HoloFlow)
---------------------------------------------------------------------

Numerically integrated bundles must agree with the closed forms, keep
H = h(z)·p and p·Δz constant, and export the documented columns. The
closed-form agreement is also checked over 100 seeded random draws
across cosh and the xi-approx functions with m = 1..4.
"""

import sys
from pathlib import Path

project_root = Path(__file__).resolve().parents[1]
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

import numpy as np
import pandas as pd
import pytest

from src.catalog.holo_function import build_xi_approx, cosh_shift
from src.catalog.zero_table import DEFAULT_TABLE_PATH, load_zero_table
from src.flows.trajectory import TimeRay
from src.hamiltonian.bundle_integrator import BUNDLE_COLUMNS, integrate_hamiltonian, loop_action
from src.hamiltonian.closed_forms import SensitivityBundle

P0, DZ0, DP0 = 0.7 - 0.2j, 1.0 + 0.5j, -0.3 + 1.1j


@pytest.fixture(scope="module")
def xi2():
    return build_xi_approx(load_zero_table(DEFAULT_TABLE_PATH), 2)


# ───────────────────────────────────────────────────────────────────────────────
# ✅ Agreement with the closed forms
# ───────────────────────────────────────────────────────────────────────────────


@pytest.mark.parametrize("which, z0", [("xi", 2.0 + 5.0j), ("cosh", 0.3 + 0.4j)])
def test_bundle_matches_closed_forms(xi2, which, z0):
    """✅ Oblique ray θ = 1: residuals below 1e−7, invariants drift below 1e−8."""
    h = xi2 if which == "xi" else cosh_shift()
    bundle0 = SensitivityBundle.initial(z0, P0, DZ0, DP0)
    traj = integrate_hamiltonian(h, bundle0, TimeRay(1.0, 0.5), samples=16)
    assert len(traj) == 16
    residuals = traj.closed_form_residuals(h)
    assert residuals[["p", "dz", "dp"]].to_numpy().max() < 1e-7
    drift = traj.drift()
    assert drift["H"] < 1e-8
    assert drift["p_dz"] < 1e-8
    assert traj.final.z0 == z0


def test_samples_are_equally_spaced():
    traj = integrate_hamiltonian(
        cosh_shift(), SensitivityBundle.initial(0.3 + 0.4j, 1, 1, 0), TimeRay.real(1.0), samples=5
    )
    assert np.allclose(traj.s, [0.0, 0.25, 0.5, 0.75, 1.0])
    assert traj.z[0] == 0.3 + 0.4j


def test_loop_action_over_one_period():
    """✅ ∮ H dt = H₀·2π on a closed cosh orbit."""
    bundle0 = SensitivityBundle.initial(0.5 + 1.0j, P0, DZ0, DP0)
    h = cosh_shift()
    traj = integrate_hamiltonian(h, bundle0, TimeRay.real(2 * np.pi), samples=257)
    H0 = h(0.5 + 1.0j) * P0
    assert loop_action(traj) == pytest.approx(H0 * 2 * np.pi, rel=1e-8)
    assert abs(traj.z[-1] - traj.z[0]) < 1e-7


# ───────────────────────────────────────────────────────────────────────────────
# 💾 Export and validation
# ───────────────────────────────────────────────────────────────────────────────


def test_bundle_csv_export(tmp_path):
    """✅ CSV carries the documented header and full precision."""
    traj = integrate_hamiltonian(
        cosh_shift(), SensitivityBundle.initial(0.3 + 0.4j, P0, DZ0, DP0), TimeRay.real(0.5), samples=8
    )
    path = traj.to_csv(tmp_path / "bundle.csv")
    stored = pd.read_csv(path)
    assert list(stored.columns) == BUNDLE_COLUMNS
    assert np.array_equal(stored["dp_re"].to_numpy(), traj.dp.real)


def test_bundle_type_is_checked():
    with pytest.raises(TypeError):
        integrate_hamiltonian(cosh_shift(), (0.3, 1, 1, 0), TimeRay.real(1.0))


# ───────────────────────────────────────────────────────────────────────────────
# 🎲 Seeded random draws
# ───────────────────────────────────────────────────────────────────────────────


@pytest.mark.parametrize("which", ["cosh", 1, 2, 3, 4])
def test_closed_forms_over_random_draws(which):
    """✅ 20 seeded draws per function, 100 in all: ODE matches p, Δz and Δp closed forms to 1e−7."""
    if which == "cosh":
        h, im_range = cosh_shift(), (-1.0, 4.0)
    else:
        h, im_range = build_xi_approx(load_zero_table(DEFAULT_TABLE_PATH), which), (0.0, 24.0)
    rng = np.random.default_rng(100 + (0 if which == "cosh" else which))
    drawn = 0
    while drawn < 20:
        z0 = complex(rng.uniform(-1.0, 2.0), rng.uniform(*im_range))
        if h.roots_within(z0, 0.5).size:
            continue
        p0, dz0, dp0 = (complex(*rng.normal(size=2)) for _ in range(3))
        ray = TimeRay(rng.uniform(0.0, 2 * np.pi), rng.uniform(0.1, 0.5))
        traj = integrate_hamiltonian(h, SensitivityBundle.initial(z0, p0, dz0, dp0), ray, samples=8)
        residuals = traj.closed_form_residuals(h)
        assert residuals[["p", "dz", "dp"]].to_numpy().max() <= 1e-7, f"draw at z0={z0}"
        drawn += 1
