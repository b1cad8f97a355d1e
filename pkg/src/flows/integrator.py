# src/flows/integrator.py

"""
integrator.py – Adaptive Dormand–Prince 5(4) Integrator (HoloFlow)
----------------------------------------------------------------------
Embedded explicit Runge–Kutta pair for complex-valued state vectors,
with PI step-size control, exact landing on requested checkpoints and
sign-change events refined by bisection.

Core responsibilities:
  • Advances y′ = f(s, y) over s ∈ [0, span] with local error control
  • Rejects steps whose stages overflow and retries with a smaller step
  • Detects event crossings and refines them to near machine precision
  • Raises StiffnessAbort (carrying the partial solution) when the step
    size falls below 1e−14·span
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from src.errors import EvaluationOverflow, StiffnessAbort

logger = logging.getLogger("holoflow.flows")

# ───────────────────────────────────────────────────────────────────────────────
# 🧮 Dormand–Prince tableau (Hairer, Nørsett & Wanner, p. 178)
# ───────────────────────────────────────────────────────────────────────────────
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B_HAT = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)
_E = _B - _B_HAT

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0
PI_ALPHA = 0.7 / 5
PI_BETA = 0.4 / 5
S_MIN_FRACTION = 1e-14


@dataclass(frozen=True)
class Tolerance:
    """Relative/absolute local error tolerance, both in (0, 1e−2]."""

    rel: float = 1e-10
    abs: float = 1e-12

    def __post_init__(self):
        for name in ("rel", "abs"):
            value = getattr(self, name)
            if not (0.0 < value <= 1e-2):
                raise ValueError(f"tolerance {name}={value} outside (0, 1e-2]")


@dataclass(frozen=True)
class Event:
    """
    Zero-crossing monitor g(s, y).

    direction=+1 fires on g going from negative to ≥ 0, −1 on positive to
    ≤ 0, 0 on either. `accept` may veto a refined crossing (the crossing
    is then ignored and integration continues).
    """

    name: str
    fn: Callable[[float, np.ndarray], float]
    direction: int = 1
    terminal: bool = True
    accept: Optional[Callable[[float, np.ndarray], bool]] = None


@dataclass
class EventHit:
    name: str
    s: float
    y: np.ndarray


@dataclass
class IntegrationResult:
    s: np.ndarray
    y: np.ndarray
    hits: List[EventHit] = field(default_factory=list)
    terminated_by: Optional[str] = None
    checkpoint_values: Optional[np.ndarray] = None

    def hit(self, name: str) -> Optional[EventHit]:
        for event_hit in self.hits:
            if event_hit.name == name:
                return event_hit
        return None


# ───────────────────────────────────────────────────────────────────────────────
# 🧠 Class: DormandPrince
# ───────────────────────────────────────────────────────────────────────────────
class DormandPrince:
    """
    Adaptive DOPRI5 stepper over a real parameter s for complex states.

    Attributes:
    -----------
    rhs : callable
        f(s, y) returning an array shaped like y.
    tol : Tolerance
        Local error tolerance.
    max_step : float
        Upper bound on |Δs|.
    max_steps : int
        Hard cap on attempted steps.
    """

    def __init__(
        self,
        rhs: Callable[[float, np.ndarray], np.ndarray],
        tol: Tolerance = Tolerance(),
        max_step: float = np.inf,
        max_steps: int = 2_000_000,
    ):
        if not callable(rhs):
            raise TypeError("rhs must be callable")
        if not isinstance(tol, Tolerance):
            raise TypeError(f"tol must be a Tolerance, got {type(tol)}")
        if max_step <= 0:
            raise ValueError("max_step must be positive")
        self.rhs = rhs
        self.tol = tol
        self.max_step = float(max_step)
        self.max_steps = int(max_steps)

    # ───────────────────────────────────────────────────────────────────────
    # Single step
    # ───────────────────────────────────────────────────────────────────────
    def _stages(self, s: float, y: np.ndarray, f0: np.ndarray, h: float):
        k = [f0]
        for i in range(1, 7):
            dy = sum(a * kj for a, kj in zip(_A[i], k))
            k.append(np.asarray(self.rhs(s + _C[i] * h, y + h * dy), dtype=complex))
        y_new = y + h * sum(b * kj for b, kj in zip(_B, k))
        err_vec = h * sum(e * kj for e, kj in zip(_E, k))
        return y_new, k[6], err_vec

    def step(self, s: float, y: np.ndarray, h: float) -> np.ndarray:
        """One unchecked 5th-order step of size h from (s, y)."""
        f0 = np.asarray(self.rhs(s, y), dtype=complex)
        return self._stages(s, y, f0, h)[0]

    def _error_norm(self, y: np.ndarray, y_new: np.ndarray, err_vec: np.ndarray) -> float:
        scale = self.tol.abs + self.tol.rel * np.maximum(np.abs(y), np.abs(y_new))
        norm = float(np.max(np.abs(err_vec) / scale))
        return norm if np.isfinite(norm) else np.inf

    def _initial_step(self, y: np.ndarray, f0: np.ndarray, span: float) -> float:
        # Hairer–Wanner starting step: first- and second-derivative estimates
        scale = self.tol.abs + self.tol.rel * np.abs(y)
        d0 = float(np.max(np.abs(y) / scale))
        d1 = float(np.max(np.abs(f0) / scale))
        h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
        h0 = min(h0, span, self.max_step)
        try:
            f1 = np.asarray(self.rhs(h0, y + h0 * f0), dtype=complex)
            d2 = float(np.max(np.abs(f1 - f0) / scale)) / h0
        except (EvaluationOverflow, FloatingPointError):
            return h0 * 1e-3
        if not np.isfinite(d2):
            return h0 * 1e-3
        if max(d1, d2) <= 1e-15:
            h1 = max(1e-6, h0 * 1e-3)
        else:
            h1 = (0.01 / max(d1, d2)) ** 0.2
        return min(100 * h0, h1, span, self.max_step)

    # ───────────────────────────────────────────────────────────────────────
    # Events
    # ───────────────────────────────────────────────────────────────────────
    @staticmethod
    def _crossed(direction: int, g_old: float, g_new: float) -> bool:
        if direction > 0:
            return g_old < 0.0 <= g_new
        if direction < 0:
            return g_old > 0.0 >= g_new
        return (g_old < 0.0 <= g_new) or (g_old > 0.0 >= g_new)

    def _refine(self, event: Event, s: float, y: np.ndarray, h: float):
        """Bisect the step fraction so g changes sign across [lo, hi]·h."""
        g_lo = event.fn(s, y)
        lo, hi = 0.0, 1.0
        y_hi = None
        for _ in range(80):
            if (hi - lo) * h <= 4 * np.finfo(float).eps * max(1.0, abs(s)):
                break
            mid = 0.5 * (lo + hi)
            y_mid = self.step(s, y, mid * h)
            g_mid = event.fn(s + mid * h, y_mid)
            if self._crossed(event.direction, g_lo, g_mid):
                hi, y_hi = mid, y_mid
            else:
                lo, g_lo = mid, g_mid
        if y_hi is None:
            y_hi = self.step(s, y, hi * h)
        return s + hi * h, y_hi

    # ───────────────────────────────────────────────────────────────────────
    # Driver
    # ───────────────────────────────────────────────────────────────────────
    def solve(
        self,
        y0: Sequence[complex],
        span: float,
        events: Sequence[Event] = (),
        checkpoints: Optional[Sequence[float]] = None,
    ) -> IntegrationResult:
        """
        Integrate from s=0 to s=span.

        Parameters:
        -----------
        y0 : array-like
            Initial complex state.
        span : float
            Nonnegative end of the integration interval.
        events : sequence of Event
            Crossing monitors; the first accepted terminal crossing ends the run.
        checkpoints : sequence of float, optional
            Values of s in (0, span] the stepper must land on exactly;
            their states are returned in `checkpoint_values`.

        Raises:
        -------
        StiffnessAbort
            If the step size underflows; `exc.partial` is the IntegrationResult so far.
        """
        if span < 0 or not np.isfinite(span):
            raise ValueError(f"span must be finite and nonnegative, got {span}")

        y = np.array(y0, dtype=complex, ndmin=1)
        s = 0.0
        s_out: List[float] = [0.0]
        y_out: List[np.ndarray] = [y.copy()]
        hits: List[EventHit] = []

        requested = checkpoints if checkpoints is not None else ()
        stops = sorted({float(c) for c in requested if 0.0 < c <= span})
        if not stops or stops[-1] < span:
            stops.append(float(span))
        stop_values = {0.0: y.copy()}

        def _result(terminated_by: Optional[str] = None) -> IntegrationResult:
            cp = None
            if checkpoints is not None:
                cp = np.array(
                    [stop_values.get(float(c), np.full_like(y, np.nan)) for c in checkpoints]
                )
            return IntegrationResult(
                s=np.array(s_out), y=np.array(y_out), hits=hits,
                terminated_by=terminated_by, checkpoint_values=cp,
            )

        if span == 0.0:
            return _result()

        s_min = S_MIN_FRACTION * span
        f = np.asarray(self.rhs(s, y), dtype=complex)
        h = self._initial_step(y, f, span)
        g_prev = [ev.fn(s, y) for ev in events]
        err_prev = 1e-4
        stop_idx = 0
        attempts = 0

        while stop_idx < len(stops):
            attempts += 1
            if attempts > self.max_steps:
                exc = StiffnessAbort(s, h)
                exc.partial = _result("max_steps")
                raise exc

            target = stops[stop_idx]
            h = min(h, self.max_step)
            lands = s + h >= target
            h_try = target - s if lands else h

            try:
                y_new, f_new, err_vec = self._stages(s, y, f, h_try)
                err = self._error_norm(y, y_new, err_vec)
            except (EvaluationOverflow, FloatingPointError):
                err = np.inf

            if err > 1.0:
                factor = MIN_FACTOR if not np.isfinite(err) else max(
                    MIN_FACTOR, SAFETY * err ** (-0.2)
                )
                h = h_try * factor
                if h < s_min:
                    logger.debug(f"step underflow at s={s:.6g} (h={h:.3e})")
                    exc = StiffnessAbort(s, h)
                    exc.partial = _result("stiffness")
                    raise exc
                continue

            s_new = target if lands else s + h_try

            # Events: earliest accepted crossing inside this step
            crossings = []
            g_new = []
            for i, ev in enumerate(events):
                g = ev.fn(s_new, y_new)
                g_new.append(g)
                if self._crossed(ev.direction, g_prev[i], g):
                    s_ev, y_ev = self._refine(ev, s, y, h_try)
                    if ev.accept is None or ev.accept(s_ev, y_ev):
                        crossings.append((s_ev, i, y_ev))
            crossings.sort(key=lambda c: (c[0], c[1]))
            for s_ev, i, y_ev in crossings:
                hits.append(EventHit(events[i].name, s_ev, y_ev))
                if events[i].terminal:
                    s_out.append(s_ev)
                    y_out.append(y_ev)
                    return _result(events[i].name)

            s, y, f = s_new, y_new, f_new
            s_out.append(s)
            y_out.append(y.copy())
            g_prev = g_new
            if lands:
                stop_values[target] = y.copy()
                stop_idx += 1

            # PI controller
            err_c = max(err, 1e-10)
            factor = SAFETY * err_c ** (-PI_ALPHA) * err_prev ** PI_BETA
            factor = min(MAX_FACTOR, max(MIN_FACTOR, factor))
            err_prev = max(err, 1e-4)
            h = max(h_try, h) * factor

        return _result()
