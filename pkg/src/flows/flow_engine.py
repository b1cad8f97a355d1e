# src/flows/flow_engine.py

"""
flow_engine.py – Holomorphic and Newton Flows in Complex Time (HoloFlow)
----------------------------------------------------------------------
Integrates the holomorphic flow ż = h(z) and the Newton flow
z′ = −h(z)/h′(z) along rays t = s·e^{iθ} of the complex time plane.

Core responsibilities:
  • integrate_ray / integrate_newton / integrate_desingularized
  • Complex-time solution lattices z(τ₁ + iτ₂) (real, then imaginary time)
  • Poincaré-section detection of closed orbits and their periods
  • Analytic periods 2πi/h′(ρ) at simple roots
  • Newton-time reparameterization T(t) along holomorphic trajectories

All integrations use `DormandPrince` (adaptive 5(4), PI control).
Aborted runs raise with `exc.partial` set to the Trajectory so far.
"""

# ───────────────────────────────────────────────────────────────────────────────
# 📦 Imports
# ───────────────────────────────────────────────────────────────────────────────
import logging
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from src.catalog.holo_function import HoloFunction
from src.errors import (
    CriticalPointAbort,
    EvaluationOverflow,
    NoReturn,
    NotASimpleRoot,
    StiffnessAbort,
)
from src.flows.integrator import DormandPrince, Event, IntegrationResult, Tolerance
from src.flows.trajectory import FlowStatus, TimeRay, Trajectory

logger = logging.getLogger("holoflow.flows")

DEFAULT_TOL = Tolerance(1e-10, 1e-12)
ORBIT_TOL = Tolerance(1e-12, 1e-14)
DEFAULT_HORIZON = 1e3
NEWTON_GUARD_EPS = 1e-8
ROOT_H_TOL = 1e-8
# first return must land within CLOSURE_TOL·(1+|z0|) of the start
CLOSURE_TOL = 1e-8


class FlowKind(str, Enum):
    HOLOMORPHIC = "holomorphic"
    NEWTON = "newton"
    DESINGULARIZED = "desingularized"


def default_escape_radius(z0: complex) -> float:
    return 1e3 * (1.0 + abs(complex(z0)))


# ───────────────────────────────────────────────────────────────────────────────
# 🔧 Helpers
# ───────────────────────────────────────────────────────────────────────────────
def _h_samples(h: HoloFunction, z: np.ndarray) -> np.ndarray:
    """h at every sample; NaN where evaluation overflows."""
    try:
        return np.asarray(h(z), dtype=complex)
    except EvaluationOverflow:
        out = np.full(z.shape, np.nan + 1j * np.nan)
        for i, zi in enumerate(z):
            try:
                out[i] = h(zi)
            except EvaluationOverflow:
                pass
        return out


def _to_trajectory(
    h: HoloFunction,
    result: IntegrationResult,
    theta: float,
    status: FlowStatus,
    **extra,
) -> Trajectory:
    z = np.asarray(result.y)[:, 0]
    return Trajectory(
        s=np.asarray(result.s, dtype=float),
        z=z,
        hz=_h_samples(h, z),
        theta=theta,
        status=status,
        **extra,
    )


def _escape_event(radius: float) -> Event:
    return Event("escape", lambda s, y: abs(y[0]) - radius, direction=1, terminal=True)


def _run(
    h: HoloFunction,
    rhs,
    z0: complex,
    ray: TimeRay,
    tol: Tolerance,
    escape_radius: Optional[float],
    extra_events: Sequence[Event] = (),
    max_step: float = np.inf,
) -> IntegrationResult:
    radius = default_escape_radius(z0) if escape_radius is None else float(escape_radius)
    if radius <= abs(z0):
        raise ValueError(f"escape_radius {radius} must exceed |z0|={abs(z0):.6g}")
    solver = DormandPrince(rhs, tol=tol, max_step=max_step)
    try:
        return solver.solve([z0], ray.span, events=[_escape_event(radius), *extra_events])
    except StiffnessAbort as exc:
        exc.partial = _to_trajectory(h, exc.partial, ray.theta, FlowStatus.STIFFNESS_ABORT)
        logger.warning(f"⚠️ Stiffness abort from z0={z0} at s={exc.s:.6g}")
        raise


def _finish(h: HoloFunction, result: IntegrationResult, ray: TimeRay) -> Trajectory:
    if result.terminated_by == "escape":
        return _to_trajectory(
            h, result, ray.theta, FlowStatus.ESCAPED, t_escape=float(result.s[-1])
        )
    return _to_trajectory(h, result, ray.theta, FlowStatus.COMPLETED)


# ───────────────────────────────────────────────────────────────────────────────
# 🌀 Flows along a ray
# ───────────────────────────────────────────────────────────────────────────────
def integrate_ray(
    h: HoloFunction,
    z0: complex,
    ray: TimeRay,
    tol: Tolerance = DEFAULT_TOL,
    escape_radius: Optional[float] = None,
    max_step: float = np.inf,
) -> Trajectory:
    """
    Integrate dz/ds = e^{iθ}·h(z) for s ∈ [0, ray.span].

    Returns:
    --------
    Trajectory
        COMPLETED, or ESCAPED with t_escape = s at the |z| = escape_radius crossing.

    Raises:
    -------
    StiffnessAbort
        If the step size underflows before escape.
    """
    if not isinstance(h, HoloFunction):
        raise TypeError(f"h must be a HoloFunction, got {type(h)}")
    z0 = complex(z0)
    direction = ray.direction

    def rhs(s, y):
        return direction * h(y)

    result = _run(h, rhs, z0, ray, tol, escape_radius, max_step=max_step)
    return _finish(h, result, ray)


def integrate_newton(
    h: HoloFunction,
    z0: complex,
    ray: TimeRay,
    tol: Tolerance = DEFAULT_TOL,
    guard_eps: float = NEWTON_GUARD_EPS,
    escape_radius: Optional[float] = None,
    max_step: float = np.inf,
) -> Trajectory:
    """
    Integrate the Newton flow dz/ds = −e^{iθ}·h(z)/h′(z).

    Raises:
    -------
    CriticalPointAbort
        If |h′(z)| < guard_eps at the start or anywhere along the path.
    """
    if not isinstance(h, HoloFunction):
        raise TypeError(f"h must be a HoloFunction, got {type(h)}")
    z0 = complex(z0)
    h0, dh0, _ = h.jet(z0)
    if abs(dh0) <= guard_eps:
        exc = CriticalPointAbort(z0, abs(dh0))
        exc.partial = Trajectory(
            s=np.zeros(1), z=np.array([z0]), hz=np.array([h0]),
            theta=ray.theta, status=FlowStatus.CRITICAL_POINT,
        )
        raise exc

    direction = ray.direction

    def rhs(s, y):
        value, slope, _ = h.jet(y)
        with np.errstate(divide="ignore", invalid="ignore"):
            return -direction * value / slope

    critical = Event(
        "critical",
        lambda s, y: abs(h.derivative(y[0])) - guard_eps,
        direction=-1,
        terminal=True,
    )
    result = _run(h, rhs, z0, ray, tol, escape_radius, [critical], max_step=max_step)
    if result.terminated_by == "critical":
        partial = _to_trajectory(h, result, ray.theta, FlowStatus.CRITICAL_POINT)
        z_last = partial.final
        exc = CriticalPointAbort(z_last, abs(h.derivative(z_last)))
        exc.partial = partial
        logger.warning(f"⚠️ Newton flow from z0={z0} reached a critical point near {z_last}")
        raise exc
    return _finish(h, result, ray)


def desingularized_newton_field(h: HoloFunction, z: complex) -> complex:
    """−h(z)·conj(h′(z)): the Newton field times |h′(z)|², smooth at zeros of h′."""
    value, slope, _ = h.jet(complex(z))
    return complex(-value * np.conj(slope))


def integrate_desingularized(
    h: HoloFunction,
    z0: complex,
    ray: TimeRay,
    tol: Tolerance = DEFAULT_TOL,
    escape_radius: Optional[float] = None,
    max_step: float = np.inf,
) -> Trajectory:
    """Flow lines of the desingularized Newton field along a ray."""
    z0 = complex(z0)
    direction = ray.direction

    def rhs(s, y):
        value, slope, _ = h.jet(y)
        return -direction * value * np.conj(slope)

    result = _run(h, rhs, z0, ray, tol, escape_radius, max_step=max_step)
    return _finish(h, result, ray)


def integrate_flow(
    h: HoloFunction,
    z0: complex,
    ray: TimeRay,
    flow: FlowKind = FlowKind.HOLOMORPHIC,
    tol: Tolerance = DEFAULT_TOL,
    escape_radius: Optional[float] = None,
    max_step: float = np.inf,
) -> Trajectory:
    """Dispatch on the flow family."""
    flow = FlowKind(flow)
    if flow is FlowKind.NEWTON:
        return integrate_newton(h, z0, ray, tol, escape_radius=escape_radius, max_step=max_step)
    if flow is FlowKind.DESINGULARIZED:
        return integrate_desingularized(h, z0, ray, tol, escape_radius, max_step)
    return integrate_ray(h, z0, ray, tol, escape_radius, max_step)


# ───────────────────────────────────────────────────────────────────────────────
# 🗺️ Complex-time lattice
# ───────────────────────────────────────────────────────────────────────────────
def _flow_to_times(
    h: HoloFunction,
    z0: complex,
    times: np.ndarray,
    theta: float,
    tol: Tolerance,
    escape_radius: float,
) -> np.ndarray:
    """z(τ·e^{iθ}) for signed real τ values; NaN where the flow escaped or aborted."""
    out = np.full(len(times), np.nan + 1j * np.nan)
    for sign in (1.0, -1.0):
        idx = np.flatnonzero(times * sign >= 0)
        if idx.size == 0:
            continue
        stops = np.abs(times[idx])
        direction = np.exp(1j * theta) * sign

        def rhs(s, y, direction=direction):
            return direction * h(y)

        solver = DormandPrince(rhs, tol=tol)
        try:
            res = solver.solve(
                [z0], float(stops.max()), events=[_escape_event(escape_radius)],
                checkpoints=stops,
            )
            values = res.checkpoint_values[:, 0]
        except StiffnessAbort as exc:
            values = exc.partial.checkpoint_values[:, 0]
        out[idx] = values
    return out


def integrate_time_grid(
    h: HoloFunction,
    z0: complex,
    tau1: Sequence[float],
    tau2: Sequence[float],
    tol: Tolerance = DEFAULT_TOL,
    escape_radius: Optional[float] = None,
) -> np.ndarray:
    """
    Solution surface z(τ₁ + iτ₂) of ż = h(z) on a rectangular time lattice.

    Each node is reached by real time τ₁ from z0, then imaginary time τ₂
    (the two commuting flows ∂τ₁z = h, ∂τ₂z = i·h). Unreachable nodes are NaN.

    Returns:
    --------
    np.ndarray
        Complex array of shape (len(tau1), len(tau2)).
    """
    z0 = complex(z0)
    tau1 = np.asarray(tau1, dtype=float)
    tau2 = np.asarray(tau2, dtype=float)
    radius = default_escape_radius(z0) if escape_radius is None else float(escape_radius)

    grid = np.full((tau1.size, tau2.size), np.nan + 1j * np.nan)
    real_line = _flow_to_times(h, z0, tau1, 0.0, tol, radius)
    for j, zj in enumerate(real_line):
        if not np.isfinite(zj):
            continue
        grid[j] = _flow_to_times(h, zj, tau2, np.pi / 2, tol, max(radius, 2 * abs(zj)))
    missing = int(np.count_nonzero(~np.isfinite(grid)))
    if missing:
        logger.info(f"ℹ️ {missing} lattice nodes unreachable (escape or abort)")
    return grid


# ───────────────────────────────────────────────────────────────────────────────
# 🔁 Closed orbits and periods
# ───────────────────────────────────────────────────────────────────────────────
def _is_equilibrium(h: HoloFunction, z0: complex) -> bool:
    value, slope, _ = h.jet(z0)
    return abs(value) <= 1e-12 * max(1.0, abs(slope)) * (1.0 + abs(z0))


def trace_closed_orbit(
    h: HoloFunction,
    z0: complex,
    tol: Tolerance = ORBIT_TOL,
    horizon: float = DEFAULT_HORIZON,
    closure_tol: Optional[float] = None,
    escape_radius: Optional[float] = None,
    direction: complex = 1.0,
) -> Trajectory:
    """
    Integrate the real-time flow of direction·h from z0 until its first return.

    The section is the line through z0 orthogonal to h(z0). Only crossings
    in the direction of the initial flow count, and only those landing
    within `closure_tol` (default CLOSURE_TOL·(1+|z0|)) of z0.

    Raises:
    -------
    NoReturn
        If z0 is an equilibrium, the orbit escapes, or no return occurs
        before `horizon`.
    """
    z0 = complex(z0)
    if _is_equilibrium(h, z0):
        raise NoReturn(z0, horizon)
    closure = CLOSURE_TOL * (1.0 + abs(z0)) if closure_tol is None else float(closure_tol)
    field = h.scaled(direction) if direction != 1.0 else h
    normal = np.conj(field(z0)) / abs(field(z0))

    section = Event(
        "section",
        lambda s, y: float(np.real((y[0] - z0) * normal)),
        direction=1,
        terminal=True,
        accept=lambda s, y: abs(y[0] - z0) <= closure,
    )

    def rhs(s, y):
        return field(y)

    result = _run(field, rhs, z0, TimeRay(0.0, horizon), tol, escape_radius, [section])
    if result.terminated_by != "section":
        raise NoReturn(z0, horizon)

    period = float(result.s[-1])
    miss = abs(result.y[-1, 0] - z0)
    logger.debug(f"Orbit from {z0}: period {period:.12g}, closure {miss:.2e}")
    return _to_trajectory(h, result, 0.0, FlowStatus.CLOSED_ORBIT, period=period)


def detect_closed_orbit(
    h: HoloFunction,
    z0: complex,
    tol: Tolerance = ORBIT_TOL,
    horizon: float = DEFAULT_HORIZON,
    closure_tol: Optional[float] = None,
) -> float:
    """First-return time of the real-time flow through z0 (see trace_closed_orbit)."""
    return trace_closed_orbit(h, z0, tol, horizon, closure_tol).period


def orbit_period_analytic(h: HoloFunction, rho: complex) -> complex:
    """
    Period 2πi/h′(ρ) of small orbits around a simple root ρ.

    Raises:
    -------
    NotASimpleRoot
        If |h(ρ)| > 1e−8 or h′(ρ) vanishes.
    """
    rho = complex(rho)
    value, slope, _ = h.jet(rho)
    if abs(value) > ROOT_H_TOL or abs(slope) <= 1e-14 * (1.0 + abs(value)):
        raise NotASimpleRoot(rho, abs(value), abs(slope))
    return complex(2j * np.pi / slope)


# ───────────────────────────────────────────────────────────────────────────────
# ⏱️ Newton time along holomorphic trajectories
# ───────────────────────────────────────────────────────────────────────────────
def newton_time_along_flow(h: HoloFunction, traj: Trajectory) -> np.ndarray:
    """T(t) = −log h(z(t)) + log h(z0), continuous branch of the logarithm."""
    hz = np.asarray(traj.hz, dtype=complex)
    log_mod = np.log(np.abs(hz))
    phase = np.unwrap(np.angle(hz))
    return -((log_mod - log_mod[0]) + 1j * (phase - phase[0]))


def newton_time_quadrature(h: HoloFunction, traj: Trajectory) -> np.ndarray:
    """Cumulative trapezoid of dT = −h′(z(t)) dt along the trajectory."""
    slope = np.asarray(h.derivative(traj.z), dtype=complex)
    dt = np.diff(traj.t)
    increments = -0.5 * (slope[1:] + slope[:-1]) * dt
    return np.concatenate([[0.0 + 0.0j], np.cumsum(increments)])
