# src/errors.py

"""
errors.py – Shared Exception Hierarchy (HoloFlow)
----------------------------------------------------------------------
One exception class per failure mode named by the library modules.

Validation failures derive from `ValueError`, numerical aborts from
`RuntimeError`, so callers can keep catching the builtin types.
Every class carries its structured payload as attributes.
"""

from typing import Any, Optional


class HoloflowError(Exception):
    """Base class for every error raised by the holoflow package."""


# ───────────────────────────────────────────────────────────────────────────────
# 📥 Zero-table ingestion and function construction
# ───────────────────────────────────────────────────────────────────────────────
class ParseError(HoloflowError, ValueError):
    def __init__(self, line: int, text: str = ""):
        self.line = line
        self.text = text
        super().__init__(f"❌ Cannot parse zero-table line {line}: {text!r}")


class MonotonicityError(HoloflowError, ValueError):
    def __init__(self, line: int, value: float):
        self.line = line
        self.value = value
        super().__init__(
            f"❌ Zero-table line {line} ({value}) breaks strict positive ordering"
        )


class InsufficientZeros(HoloflowError, ValueError):
    def __init__(self, requested: int, available: int):
        self.requested = requested
        self.available = available
        super().__init__(
            f"❌ Requested m={requested} zero pairs, table holds {available}"
        )


class PoleError(HoloflowError, ValueError):
    def __init__(self, z: complex, distance: float):
        self.z = z
        self.distance = distance
        super().__init__(f"❌ z={z} lies {distance:.3e} from an included zero")


class EvaluationOverflow(HoloflowError, OverflowError):
    def __init__(self, z: complex, order: int):
        self.z = z
        self.order = order
        super().__init__(f"⚠️ h^({order}) overflows at z={z}")


# ───────────────────────────────────────────────────────────────────────────────
# 🌀 Flow integration
# ───────────────────────────────────────────────────────────────────────────────
class FlowAbort(HoloflowError, RuntimeError):
    """Integration stopped early; `partial` holds the samples collected so far."""

    partial: Optional[Any] = None


class StiffnessAbort(FlowAbort):
    def __init__(self, s: float, step: float):
        self.s = s
        self.step = step
        super().__init__(f"⚠️ Step size {step:.3e} underflowed at s={s:.6g}")


class CriticalPointAbort(FlowAbort):
    def __init__(self, z: complex, dh_abs: float):
        self.z = z
        self.dh_abs = dh_abs
        super().__init__(f"⚠️ |h'(z)|={dh_abs:.3e} below guard at z={z}")


class Inconclusive(HoloflowError, RuntimeError):
    def __init__(self, direction: str, horizon: float):
        self.direction = direction
        self.horizon = horizon
        super().__init__(
            f"❓ {direction} flow reached horizon {horizon} without escape or closure"
        )


class NoReturn(HoloflowError, RuntimeError):
    def __init__(self, z0: complex, horizon: float):
        self.z0 = z0
        self.horizon = horizon
        super().__init__(f"❓ No Poincaré return to z0={z0} within s={horizon}")


class NotASimpleRoot(HoloflowError, ValueError):
    def __init__(self, rho: complex, h_abs: float, dh_abs: float):
        self.rho = rho
        self.h_abs = h_abs
        self.dh_abs = dh_abs
        super().__init__(
            f"❌ {rho} is not a simple root (|h|={h_abs:.3e}, |h'|={dh_abs:.3e})"
        )


# ───────────────────────────────────────────────────────────────────────────────
# 🧮 Approximating polynomial and surface tracing
# ───────────────────────────────────────────────────────────────────────────────
class DegenerateAnchor(HoloflowError, ValueError):
    def __init__(self, z0: complex):
        self.z0 = z0
        super().__init__(f"❌ Anchor z0={z0} coincides with an included zero")


class NonConvergence(HoloflowError, RuntimeError):
    def __init__(self, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"❌ Root iteration stalled after {iterations} steps (residual {residual:.3e})"
        )


class ContinuationBreak(HoloflowError, RuntimeError):
    partial_grid: Optional[Any] = None

    def __init__(self, node: tuple, jump: float, max_jump: float):
        self.node = node
        self.jump = jump
        self.max_jump = max_jump
        super().__init__(
            f"⚠️ Continuation jump {jump:.3e} > {max_jump:.3e} at lattice node {node}"
        )


# ───────────────────────────────────────────────────────────────────────────────
# ⚖️ Hamiltonian closed forms
# ───────────────────────────────────────────────────────────────────────────────
class MomentumPole(HoloflowError, ValueError):
    def __init__(self, z: complex, h_abs: float):
        self.z = z
        self.h_abs = h_abs
        super().__init__(f"❌ |h(z)|={h_abs:.3e} at z={z}: momentum is singular")


class AnchorPole(HoloflowError, ValueError):
    def __init__(self, z0: complex, h_abs: float):
        self.z0 = z0
        self.h_abs = h_abs
        super().__init__(f"❌ |h(z0)|={h_abs:.3e} at z0={z0}: anchor is a root")


# ───────────────────────────────────────────────────────────────────────────────
# 📐 h-manifold geometry
# ───────────────────────────────────────────────────────────────────────────────
class MetricSingular(HoloflowError, ValueError):
    def __init__(self, z: complex, h_abs: float):
        self.z = z
        self.h_abs = h_abs
        super().__init__(f"❌ Metric singular at z={z} (|h|={h_abs:.3e})")


class NonHolomorphicField(HoloflowError, ValueError):
    def __init__(self, z: complex, violation: float):
        self.z = z
        self.violation = violation
        super().__init__(
            f"❌ Field violates Cauchy–Riemann by {violation:.3e} at z={z}"
        )


# ───────────────────────────────────────────────────────────────────────────────
# ⚙️ Configuration
# ───────────────────────────────────────────────────────────────────────────────
class ConfigError(HoloflowError, ValueError):
    """Invalid run configuration (CLI exit code 2)."""
