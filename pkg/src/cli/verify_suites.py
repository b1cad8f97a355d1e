# src/cli/verify_suites.py

"""
verify_suites.py – Invariant Suites Behind `holoflow verify` (HoloFlow)
----------------------------------------------------------------------
Each suite draws seeded random points from the configured window and
returns rows {suite, point, quantity, value, tolerance, pass}:

  • geometry     Christoffel symbols vs. Koszul differences, geodesic and
                 parallel-field residuals, flatness convergence, time-chart
                 pull-back, metric invariance under h → ih, −h, −ih
  • hamiltonian  joint ODE vs. closed forms, conservation of H and p·Δz,
                 flow-map identity / determinant / reproduction
  • flows        Newton-flow laws, orbit period law, complex-period and
                 surface-vs-ODE checks for xi-approx

Draws that abort numerically are logged and skipped; every suite adds a
`draw_shortfall` row that fails when none of its draws was usable.
Trajectory CSVs of
an earlier run with the same function are re-read and spot-checked.
"""

# ───────────────────────────────────────────────────────────────────────────────
# 📦 Imports
# ───────────────────────────────────────────────────────────────────────────────
import json
import logging
from typing import List

import numpy as np
import pandas as pd

from src.catalog.holo_function import FunctionKind, HoloFunction
from src.errors import EvaluationOverflow, FlowAbort, HoloflowError
from src.flows.flow_engine import (
    DEFAULT_TOL,
    detect_closed_orbit,
    integrate_newton,
    integrate_ray,
    orbit_period_analytic,
)
from src.flows.trajectory import TimeRay
from src.geometry.connection import (
    Direction,
    VectorFieldSpec,
    check_parallel_sensitivity,
    christoffel_koszul_fd,
    covariant_derivative,
    covariant_derivative_along,
)
from src.geometry.curvature import flatness_convergence, geometry_report
from src.geometry.h_manifold import metric_frame, trivialize_in_time_chart
from src.hamiltonian.bundle_integrator import integrate_hamiltonian
from src.hamiltonian.closed_forms import (
    SensitivityBundle,
    delta_p_closed_form,
    flow_map_matrix,
    sensitivity_closed_form,
)
from src.surface.pm_polynomial import PmPolynomial, eval_Pm
from src.surface.surface_tracer import TimeLattice, trace_surface, verify_constant_phase

logger = logging.getLogger("holoflow.cli")

ROOT_CLEARANCE = 0.5
READBACK_COLUMNS = {"z_re", "z_im", "h_re", "h_im"}


# ───────────────────────────────────────────────────────────────────────────────
# 🎲 Sampling
# ───────────────────────────────────────────────────────────────────────────────
def core_box(config):
    """Window clipped to |Re z − 1/2| ≤ 2 where cosh-type growth stays tame."""
    re_lo, re_hi = max(config.re_min, -1.5), min(config.re_max, 2.5)
    if re_lo >= re_hi:
        re_lo, re_hi = config.re_min, config.re_max
    return re_lo, re_hi, config.im_min, config.im_max


def sample_points(h: HoloFunction, config, rng: np.random.Generator, count: int) -> np.ndarray:
    """`count` points of the core box at least ROOT_CLEARANCE away from known roots."""
    re_lo, re_hi, im_lo, im_hi = core_box(config)
    points: List[complex] = []
    attempts = 0
    while len(points) < count and attempts < 50 * count:
        attempts += 1
        z = complex(rng.uniform(re_lo, re_hi), rng.uniform(im_lo, im_hi))
        if h.roots_within(z, ROOT_CLEARANCE).size == 0 and abs(h(z)) > 0:
            points.append(z)
    return np.array(points, dtype=complex)


def _random_complex(rng: np.random.Generator) -> complex:
    return complex(rng.normal(), rng.normal())


def _row(suite, point, quantity, value, tolerance):
    return {"suite": suite, "point": point, "quantity": quantity, "value": value, "tolerance": tolerance}


def draw_shortfall_row(suite: str, used: int, requested: int) -> dict:
    """
    Row recording how many requested draws went unused.

    Passes while at least one draw was usable; a suite with none fails
    instead of reporting its zero maxima as a pass.
    """
    if used < requested:
        logger.warning(f"⚠️ {suite} suite: only {used}/{requested} draws usable")
    return _row(suite, None, "draw_shortfall", requested - used, max(requested - 1, 0))


# ───────────────────────────────────────────────────────────────────────────────
# 📐 geometry
# ───────────────────────────────────────────────────────────────────────────────
def geometry_suite(h: HoloFunction, config, rng) -> List[dict]:
    points = sample_points(h, config, rng, config.draws)
    rows = []
    koszul = geodesic = parallel = expanded = invariance = 0.0
    variants = [h.scaled(1j), h.scaled(-1.0), h.scaled(-1j)]
    for z in points:
        frame = metric_frame(h, z)
        gamma = frame.gamma
        koszul = max(
            koszul,
            float(np.max(np.abs(christoffel_koszul_fd(h, z) - gamma)) / (1.0 + np.max(np.abs(gamma)))),
        )

        scale = 1.0 + abs(h(z)) * abs(h.derivative(z))
        along_h = covariant_derivative(h, VectorFieldSpec.holo_split(h), Direction.ALONG_H, z)
        along_ih = covariant_derivative(
            h, VectorFieldSpec.holo_split(h.scaled(1j)), Direction.ALONG_IH, z
        )
        geodesic = max(geodesic, along_h.norm() / scale, along_ih.norm() / scale)

        c = _random_complex(rng)
        field = VectorFieldSpec.linear_comb(c.real, c.imag)
        for direction in Direction:
            closed = covariant_derivative(h, field, direction, z).as_array()
            direct = covariant_derivative_along(h, field, direction, z).as_array()
            expanded = max(expanded, float(np.max(np.abs(closed - direct))) / ((1.0 + abs(c)) * scale))

        for other in variants:
            twin = metric_frame(other, z)
            invariance = max(
                invariance,
                abs(twin.g11 - frame.g11) / frame.g11,
                float(np.max(np.abs(twin.gamma - gamma)) / (1.0 + np.max(np.abs(gamma)))),
            )

    if points.size:
        z0 = points[0]
        dz0 = _random_complex(rng)
        c = dz0 / h(z0)
        scale = (1.0 + abs(c)) * (1.0 + max(abs(h(z)) * abs(h.derivative(z)) for z in points))
        parallel = check_parallel_sensitivity(h, z0, dz0, points) / scale

        coarse, fine, ratio = flatness_convergence(h, z0)
        rows.append(_row("geometry", z0, "curvature_halving_ratio_deviation",
                         0.0 if coarse == 0.0 else abs(ratio - 4.0), 0.5))

        try:
            traj = integrate_ray(h, z0, TimeRay.real(0.1), config.tolerance)
        except FlowAbort as exc:
            traj = exc.partial
        chart = trivialize_in_time_chart(h, traj)
        chart_err = float(
            np.max(
                np.abs(
                    chart[["g_hh", "g_h_ih", "g_ih_ih"]].to_numpy() - np.array([0.5, 0.0, 0.5])
                )
            )
        )
        rows.append(_row("geometry", z0, "time_chart_pullback", chart_err, 1e-12))

    rows += [
        draw_shortfall_row("geometry", len(points), config.draws),
        _row("geometry", None, "christoffel_vs_koszul_fd", koszul, 1e-6),
        _row("geometry", None, "geodesic_residual", geodesic, 1e-12),
        _row("geometry", None, "parallel_sensitivity_residual", parallel, 1e-12),
        _row("geometry", None, "closed_vs_expanded_covariant_derivative", expanded, 1e-8),
        _row("geometry", None, "metric_invariance_under_rotation", invariance, 1e-12),
    ]
    return rows


# ───────────────────────────────────────────────────────────────────────────────
# ⚖️ hamiltonian
# ───────────────────────────────────────────────────────────────────────────────
def hamiltonian_suite(h: HoloFunction, config, rng) -> List[dict]:
    points = sample_points(h, config, rng, config.draws)
    closed = conservation = identity = det_err = reproduce = 0.0
    used = 0
    for z0 in points:
        p0, dz0, dp0 = (_random_complex(rng) for _ in range(3))
        ray = TimeRay(rng.uniform(0.0, 2 * np.pi), rng.uniform(0.1, 0.5))
        bundle0 = SensitivityBundle.initial(z0, p0, dz0, dp0)
        try:
            traj = integrate_hamiltonian(h, bundle0, ray, DEFAULT_TOL, samples=16)
        except HoloflowError as exc:
            logger.debug(f"hamiltonian draw at {z0} skipped: {exc}")
            continue
        used += 1
        closed = max(closed, float(traj.closed_form_residuals(h)[["p", "dz", "dp"]].to_numpy().max()))
        drift = traj.drift()
        conservation = max(conservation, drift["H"], drift["p_dz"])

        z_end = complex(traj.z[-1])
        at_start = flow_map_matrix(h, z0, z0, p0)
        identity = max(identity, float(np.max(np.abs(at_start.as_array() - np.eye(2)))))
        M = flow_map_matrix(h, z_end, z0, p0)
        det_err = max(det_err, abs(M.det - 1.0))
        dz, dp = M.apply(dz0, dp0)
        dz_cf = sensitivity_closed_form(h, z_end, z0, dz0)
        dp_cf = delta_p_closed_form(h, z_end, z0, p0, dz0, dp0)
        reproduce = max(
            reproduce, abs(dz - dz_cf) / (1 + abs(dz_cf)), abs(dp - dp_cf) / (1 + abs(dp_cf))
        )
    logger.info(f"⚖️ hamiltonian suite: {used}/{len(points)} draws integrated")
    return [
        draw_shortfall_row("hamiltonian", used, config.draws),
        _row("hamiltonian", None, "ode_vs_closed_forms", closed, 1e-7),
        _row("hamiltonian", None, "conservation_drift", conservation, 1e-8),
        _row("hamiltonian", None, "flow_map_identity_at_start", identity, 1e-10),
        _row("hamiltonian", None, "flow_map_determinant", det_err, 1e-10),
        _row("hamiltonian", None, "flow_map_reproduces_closed_forms", reproduce, 1e-10),
    ]


# ───────────────────────────────────────────────────────────────────────────────
# 🌀 flows
# ───────────────────────────────────────────────────────────────────────────────
def _newton_rows(h, config, rng) -> List[dict]:
    phase = modulus = rotation = 0.0
    requested = max(1, min(config.draws, 5))
    used = 0
    for z0 in sample_points(h, config, rng, requested):
        h0 = h(z0)
        try:
            real = integrate_newton(h, z0, TimeRay.real(2.0), config.tolerance)
            imag = integrate_newton(h, z0, TimeRay.imaginary(1.0), config.tolerance)
        except FlowAbort as exc:
            logger.debug(f"Newton draw at {z0} skipped: {exc}")
            continue
        used += 1
        phase = max(phase, float(np.max(np.abs(np.angle(real.hz / h0)))))
        modulus = max(
            modulus, float(np.max(np.abs(np.abs(real.hz) - abs(h0) * np.exp(-real.s)))) / abs(h0)
        )
        rotation = max(rotation, float(np.max(np.abs(np.abs(imag.hz) - abs(h0)))) / abs(h0))
    return [
        draw_shortfall_row("flows", used, requested),
        _row("flows", None, "newton_real_time_phase_drift", phase, 1e-8),
        _row("flows", None, "newton_real_time_modulus_law", modulus, 1e-8),
        _row("flows", None, "newton_imaginary_time_modulus_drift", rotation, 1e-8),
    ]


def _period_rows(h, config) -> List[dict]:
    if h.kind is FunctionKind.COSH_SHIFT:
        rho = complex(0.5, np.pi / 2)
    elif h.kind is FunctionKind.XI_APPROX:
        rho = complex(h.zeros[0])
    else:
        return []
    period = orbit_period_analytic(h, rho)
    rows = [_row("flows", rho, "analytic_period_imag_part", abs(period.imag) / abs(period), 1e-10)]
    if period.real > 0:
        detected = detect_closed_orbit(
            h, rho + 1e-3, horizon=max(config.horizon, 2.0 * abs(period))
        )
        rows.append(
            _row("flows", rho, "detected_vs_analytic_period", abs(detected - period.real) / period.real, 1e-4)
        )
    return rows


def _surface_rows(h, table, config) -> List[dict]:
    if table is None:
        return []
    zeros = table.symmetric_zeros(config.m)
    rows = []
    worst = 0.0
    for k in range(-2, 3):
        P = PmPolynomial(zeros, config.z0, 2j * np.pi * k)
        worst = max(worst, abs(eval_Pm(P, config.z0)))
    rows.append(_row("flows", config.z0, "complex_period_condition", worst, 1e-12))

    lattice = TimeLattice(tuple(np.linspace(0.0, 2.0, 9)), (0.0,))
    try:
        grid = trace_surface(table, config.m, config.z0, lattice)
        newton = []
        for T in lattice.tau1:
            traj = integrate_newton(h, config.z0, TimeRay.real(T), config.tolerance)
            newton.append(traj.final)
    except HoloflowError as exc:
        logger.warning(f"⚠️ surface cross-check skipped: {exc}")
        return rows
    gap = float(np.max(np.abs(grid.sheet(0)[:, 0] - np.array(newton))))
    rows.append(_row("flows", config.z0, "surface_sheet0_vs_newton_ode", gap, 1e-6))
    rows.append(_row("flows", config.z0, "constant_phase_residual", verify_constant_phase(grid), 1e-8))
    return rows


def flows_suite(h: HoloFunction, table, config, rng) -> List[dict]:
    return _newton_rows(h, config, rng) + _period_rows(h, config) + _surface_rows(h, table, config)


# ───────────────────────────────────────────────────────────────────────────────
# 📄 Read-back
# ───────────────────────────────────────────────────────────────────────────────
def readback_rows(h: HoloFunction, config) -> List[dict]:
    """Spot-check stored h columns against a fresh evaluation of h(z)."""
    meta_path = config.out_path / "run_metadata.json"
    if not meta_path.exists():
        return []
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    if meta.get("function", {}).get("label") != h.label or meta.get("command") == "verify":
        logger.info("ℹ️ stored outputs belong to another run; read-back skipped")
        return []
    rows = []
    for path in sorted(config.out_path.rglob("*.csv")):
        frame = pd.read_csv(path)
        if not READBACK_COLUMNS.issubset(frame.columns) or frame.empty:
            continue
        z = frame["z_re"].to_numpy() + 1j * frame["z_im"].to_numpy()
        stored = frame["h_re"].to_numpy() + 1j * frame["h_im"].to_numpy()
        # samples whose h overflowed were written as NaN
        keep = np.isfinite(stored) & np.isfinite(z)
        if not np.any(keep):
            continue
        try:
            fresh = h(z[keep])
        except EvaluationOverflow:
            logger.debug(f"read-back of {path.name} skipped: h overflows on stored samples")
            continue
        err = float(np.max(np.abs(stored[keep] - fresh) / (1.0 + np.abs(fresh))))
        rows.append(_row("readback", str(path.relative_to(config.out_path)), "stored_h_matches_eval", err, 1e-12))
    return rows


# ───────────────────────────────────────────────────────────────────────────────
# 🧭 Entry point
# ───────────────────────────────────────────────────────────────────────────────
def run_verification(config, resolved) -> dict:
    """Run the selected suites; rows come back normalised by geometry_report."""
    h = resolved.h
    rng = np.random.default_rng(config.seed)
    selected = ("geometry", "hamiltonian", "flows") if config.suite == "all" else (config.suite,)

    raw = readback_rows(h, config)
    for suite in selected:
        logger.info(f"🔎 running {suite} suite")
        if suite == "geometry":
            raw += geometry_suite(h, config, rng)
        elif suite == "hamiltonian":
            raw += hamiltonian_suite(h, config, rng)
        else:
            raw += flows_suite(h, resolved.table, config, rng)

    checks = []
    for row, normalised in zip(raw, geometry_report(raw)):
        checks.append({"suite": row["suite"], **normalised})
    return {
        "suites": list(selected),
        "seed": config.seed,
        "checks": checks,
        "passed": all(c["pass"] for c in checks),
    }
