# src/flows/separatrix.py

"""
separatrix.py – Separatrix Classification by Finite Escape Time (HoloFlow)
----------------------------------------------------------------------
A trajectory of ż = h(z) is a positive (negative) separatrix when its
forward (backward) interval of existence is finite, i.e. it reaches
infinity in finite time.

Each direction is integrated in the arc-length-like parameter σ with
dz/dσ = ±h/(1+|h|), ds/dσ = 1/(1+|h|), which keeps the speed bounded
near blow-up. Escape times s(R), s(2R), s(4R) at nested radii are
extrapolated: geometric shrinking of the gaps means a finite blow-up
time, constant gaps (exponential growth) mean escape only at s = ∞.

Other terminal outcomes: return to the start (closed orbit), approach to
an equilibrium, or nothing decided before the horizon.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from src.catalog.holo_function import HoloFunction
from src.errors import Inconclusive, StiffnessAbort
from src.flows.flow_engine import DEFAULT_HORIZON, DEFAULT_TOL
from src.flows.integrator import DormandPrince, Event, Tolerance

logger = logging.getLogger("holoflow.flows")

GAP_RATIO_FINITE = 0.9
EQUILIBRIUM_FRACTION = 1e-10
# section return gate for classification; periods come from trace_closed_orbit
CLASSIFY_CLOSURE_TOL = 1e-6


class EscapeOutcome(str, Enum):
    FINITE_ESCAPE = "finite_escape"
    INFINITE_ESCAPE = "infinite_escape"
    CLOSED_ORBIT = "closed_orbit"
    EQUILIBRIUM = "equilibrium"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class DirectionProfile:
    outcome: EscapeOutcome
    crossing_times: Tuple[float, ...] = ()
    t_blowup: Optional[float] = None
    period: Optional[float] = None


@dataclass(frozen=True)
class SeparatrixReport:
    """
    Attributes:
    -----------
    positive, negative : bool
        Finite forward / backward escape.
    t_escape_pos, t_escape_neg : float, optional
        Extrapolated blow-up times.
    forward, backward : DirectionProfile
        Per-direction diagnostics.
    """

    positive: bool
    negative: bool
    t_escape_pos: Optional[float] = None
    t_escape_neg: Optional[float] = None
    forward: DirectionProfile = DirectionProfile(EscapeOutcome.UNDECIDED)
    backward: DirectionProfile = DirectionProfile(EscapeOutcome.UNDECIDED)

    @property
    def is_separatrix(self) -> bool:
        return self.positive or self.negative

    @property
    def closed_orbit(self) -> bool:
        return EscapeOutcome.CLOSED_ORBIT in (self.forward.outcome, self.backward.outcome)

    @property
    def period(self) -> Optional[float]:
        return self.forward.period or self.backward.period


def default_outer_radius(z0: complex) -> float:
    # cosh separatrices are only resolvable in double precision out to |Re z| ≈ 37
    return max(32.0, 4.0 * (1.0 + abs(complex(z0))))


def extrapolate_blowup(times: Tuple[float, float, float]) -> Optional[float]:
    """
    Limit of escape times across radii R, 2R, 4R, or None if the gaps do
    not shrink geometrically.
    """
    t1, t2, t3 = times
    d1, d2 = t2 - t1, t3 - t2
    if d1 <= 1e-12 * (1.0 + abs(t3)):
        return t3
    if d2 > GAP_RATIO_FINITE * d1:
        return None
    ratio = d2 / d1
    return t3 + d2 * ratio / (1.0 - ratio)


def _profile(
    h: HoloFunction,
    z0: complex,
    sign: float,
    outer_radius: float,
    horizon: float,
    tol: Tolerance,
) -> DirectionProfile:
    field_h = h.scaled(sign)
    h0 = field_h(z0)
    eq_level = EQUILIBRIUM_FRACTION * (1.0 + abs(h0))
    if abs(h0) <= eq_level:
        return DirectionProfile(EscapeOutcome.EQUILIBRIUM)

    radii = (outer_radius / 4, outer_radius / 2, outer_radius)
    normal = np.conj(h0) / abs(h0)
    closure = CLASSIFY_CLOSURE_TOL * (1.0 + abs(z0))

    def rhs(sigma, y):
        w = field_h(y[0])
        speed = 1.0 / (1.0 + abs(w))
        return np.array([w * speed, speed])

    events = [
        Event(f"radius{k}", (lambda s, y, r=r: abs(y[0]) - r), 1, terminal=(k == 2))
        for k, r in enumerate(radii)
    ]
    events += [
        Event(
            "section",
            lambda s, y: float(np.real((y[0] - z0) * normal)),
            1,
            terminal=True,
            accept=lambda s, y: abs(y[0] - z0) <= closure,
        ),
        Event("equilibrium", lambda s, y: abs(field_h(y[0])) - eq_level, -1, terminal=True),
        Event("horizon", lambda s, y: y[1].real - horizon, 1, terminal=True),
    ]

    sigma_span = horizon + 64.0 * outer_radius
    solver = DormandPrince(rhs, tol=tol)
    try:
        result = solver.solve([z0, 0.0], sigma_span, events=events)
        last_s = float(result.y[-1, 1].real)
    except StiffnessAbort as exc:
        result = exc.partial
        last_s = float(result.y[-1, 1].real)
        logger.debug(f"σ-flow from {z0} stalled at s={last_s:.6g}")

    crossings = [result.hit(f"radius{k}") for k in range(3)]
    if crossings[0] is not None:
        # Crossings missing after a stall happened no later than the stall
        times = tuple(
            float(c.y[1].real) if c is not None else last_s for c in crossings
        )
        if result.terminated_by in ("radius2", "stiffness", "max_steps") or all(crossings):
            blowup = extrapolate_blowup(times)
            outcome = (
                EscapeOutcome.FINITE_ESCAPE if blowup is not None
                else EscapeOutcome.INFINITE_ESCAPE
            )
            return DirectionProfile(outcome, times, blowup)

    if result.terminated_by == "section":
        return DirectionProfile(EscapeOutcome.CLOSED_ORBIT, period=last_s)
    if result.terminated_by == "equilibrium":
        return DirectionProfile(EscapeOutcome.EQUILIBRIUM)
    return DirectionProfile(EscapeOutcome.UNDECIDED)


def classify_separatrix(
    h: HoloFunction,
    z0: complex,
    escape_radius: Optional[float] = None,
    horizon: float = DEFAULT_HORIZON,
    tol: Tolerance = DEFAULT_TOL,
) -> SeparatrixReport:
    """
    Classify the trajectory through z0 as positive and/or negative separatrix.

    Parameters:
    -----------
    escape_radius : float, optional
        Outermost of the nested radii R, 2R, 4R (default max(32, 4(1+|z0|))).
    horizon : float
        Maximal |s| integrated in each direction.

    Raises:
    -------
    Inconclusive
        If a direction neither escapes, closes, nor settles before the
        horizon; `exc.report` holds the partial report.
    """
    if not isinstance(h, HoloFunction):
        raise TypeError(f"h must be a HoloFunction, got {type(h)}")
    z0 = complex(z0)
    outer = default_outer_radius(z0) if escape_radius is None else float(escape_radius)
    if outer / 4 <= abs(z0):
        raise ValueError(f"escape_radius/4 = {outer / 4} must exceed |z0| = {abs(z0):.6g}")

    forward = _profile(h, z0, 1.0, outer, horizon, tol)
    backward = _profile(h, z0, -1.0, outer, horizon, tol)
    report = SeparatrixReport(
        positive=forward.outcome is EscapeOutcome.FINITE_ESCAPE,
        negative=backward.outcome is EscapeOutcome.FINITE_ESCAPE,
        t_escape_pos=forward.t_blowup,
        t_escape_neg=backward.t_blowup,
        forward=forward,
        backward=backward,
    )
    logger.debug(
        f"Separatrix {z0}: forward={forward.outcome.value}, backward={backward.outcome.value}"
    )
    for name, profile in (("forward", forward), ("backward", backward)):
        if profile.outcome is EscapeOutcome.UNDECIDED:
            exc = Inconclusive(name, horizon)
            exc.report = report
            raise exc
    return report
