# src/hamiltonian/closed_forms.py

"""
closed_forms.py – Hamiltonian H = h(z)·p and Its Closed-Form Solutions (HoloFlow)
----------------------------------------------------------------------
For the one-degree-of-freedom Hamiltonian H(z, p) = h(z)·p:

  ż = h(z),  ṗ = −h′(z)·p
  p   = h(z₀)/h(z)·p₀
  Δz  = h(z)/h(z₀)·Δz₀
  Δp  = p₀Δz₀·(h′(z₀) − h′(z))/h(z) + Δp₀·h(z₀)/h(z)

and, for ξ-approximating polynomials, the trace-formula form of Δp with
h′(z)/h(z) replaced by Σ 1/(z − ρₙ). The flow-map matrix M maps
(Δz₀, Δp₀) to (Δz, Δp); it is lower triangular with det M = 1.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from src.catalog.holo_function import (
    FunctionKind,
    HoloFunction,
    build_xi_approx,
    log_derivative_sum,
    pole_tolerance,
)
from src.catalog.zero_table import ZeroTable
from src.errors import AnchorPole, MomentumPole, PoleError

logger = logging.getLogger("holoflow.hamiltonian")


# ───────────────────────────────────────────────────────────────────────────────
# 🧾 Value types
# ───────────────────────────────────────────────────────────────────────────────
@dataclass(frozen=True)
class SensitivityBundle:
    """Current (z, p, Δz, Δp) with the frozen initial values."""

    z: complex
    p: complex
    dz: complex
    dp: complex
    z0: complex
    p0: complex
    dz0: complex
    dp0: complex

    @classmethod
    def initial(cls, z0: complex, p0: complex, dz0: complex, dp0: complex) -> "SensitivityBundle":
        z0, p0, dz0, dp0 = (complex(v) for v in (z0, p0, dz0, dp0))
        return cls(z0, p0, dz0, dp0, z0, p0, dz0, dp0)

    @property
    def state(self) -> np.ndarray:
        return np.array([self.z, self.p, self.dz, self.dp], dtype=complex)

    def with_state(self, state) -> "SensitivityBundle":
        z, p, dz, dp = (complex(v) for v in state)
        return SensitivityBundle(z, p, dz, dp, self.z0, self.p0, self.dz0, self.dp0)

    def closed_form(self, h: HoloFunction) -> "SensitivityBundle":
        """The bundle the closed forms predict at the current z."""
        return SensitivityBundle(
            self.z,
            momentum_closed_form(h, self.z, self.z0, self.p0),
            sensitivity_closed_form(h, self.z, self.z0, self.dz0),
            delta_p_closed_form(h, self.z, self.z0, self.p0, self.dz0, self.dp0),
            self.z0, self.p0, self.dz0, self.dp0,
        )


@dataclass(frozen=True)
class FlowMapMatrix:
    """M = [[m11, m12], [m21, m22]] with m12 = 0 and m21 = k_zp."""

    m11: complex
    m12: complex
    m21: complex
    m22: complex

    @property
    def k_zp(self) -> complex:
        return self.m21

    @property
    def det(self) -> complex:
        return self.m11 * self.m22 - self.m12 * self.m21

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]], dtype=complex)

    def apply(self, dz0: complex, dp0: complex) -> Tuple[complex, complex]:
        dz, dp = self.as_array() @ np.array([dz0, dp0], dtype=complex)
        return complex(dz), complex(dp)


# ───────────────────────────────────────────────────────────────────────────────
# ⚖️ Field and invariants
# ───────────────────────────────────────────────────────────────────────────────
def hamiltonian_field(h: HoloFunction, z: complex, p: complex) -> Tuple[complex, complex]:
    """(∂H/∂p, −∂H/∂z) = (h(z), −h′(z)·p)."""
    value, slope, _ = h.jet(complex(z))
    return value, -slope * complex(p)


def hamiltonian_value(h: HoloFunction, z, p):
    return h(z) * p


def hamiltonian_abs(h: HoloFunction, z, p):
    """|h(z)·p|², the real conserved quantity."""
    return np.abs(h(z) * p) ** 2


# ───────────────────────────────────────────────────────────────────────────────
# 🧮 Closed forms
# ───────────────────────────────────────────────────────────────────────────────
def _checked_value(h: HoloFunction, z: complex, error) -> complex:
    value = h(z)
    if abs(value) <= pole_tolerance(z):
        raise error(z, abs(value))
    return value


def momentum_closed_form(h: HoloFunction, z: complex, z0: complex, p0: complex) -> complex:
    """p = h(z₀)/h(z)·p₀; MomentumPole when |h(z)| ≤ ε_pole."""
    hz = _checked_value(h, complex(z), MomentumPole)
    return h(complex(z0)) / hz * complex(p0)


def sensitivity_closed_form(h: HoloFunction, z: complex, z0: complex, dz0: complex) -> complex:
    """Δz = h(z)/h(z₀)·Δz₀; AnchorPole when |h(z₀)| ≤ ε_pole."""
    h0 = _checked_value(h, complex(z0), AnchorPole)
    return h(complex(z)) / h0 * complex(dz0)


def delta_p_closed_form(
    h: HoloFunction, z: complex, z0: complex, p0: complex, dz0: complex, dp0: complex
) -> complex:
    """Δp = p₀Δz₀·(h′(z₀) − h′(z))/h(z) + Δp₀·h(z₀)/h(z)."""
    z, z0 = complex(z), complex(z0)
    hz = _checked_value(h, z, MomentumPole)
    h0, dh0, _ = h.jet(z0)
    dhz = h.derivative(z)
    return complex(p0 * dz0 * (dh0 - dhz) / hz + dp0 * h0 / hz)


def delta_p_trace_form(
    zeros: ZeroTable,
    m: int,
    z: complex,
    z0: complex,
    p0: complex,
    dz0: complex,
    dp0: complex,
    scale: float = 1.0,
) -> complex:
    """
    Δp = p₀Δz₀·(h′(z₀)/h(z) − Σₙ 1/(z − ρₙ)) + Δp₀·h(z₀)/h(z) for h = h_{2m}.

    Raises:
    -------
    PoleError
        If z lies within ε_pole of one of the 2m zeros.
    """
    h = build_xi_approx(zeros, m, scale)
    z, z0 = complex(z), complex(z0)
    zero_sum = log_derivative_sum(zeros, m, z)
    hz = h(z)
    h0, dh0, _ = h.jet(z0)
    return complex(p0 * dz0 * (dh0 / hz - zero_sum) + dp0 * h0 / hz)


def flow_map_matrix(
    h_or_zeros: Union[HoloFunction, ZeroTable],
    z: complex,
    z0: complex,
    p0: complex,
    m: Optional[int] = None,
) -> FlowMapMatrix:
    """
    Flow-map matrix M with coupling k_zp.

    For a ZeroTable (requires m) or a xi-approx HoloFunction, k_zp is
    built from the zero sum p₀(h′(z₀)/h(z) − Σ 1/(z − ρₙ)); otherwise
    from p₀(h′(z₀) − h′(z))/h(z).

    Raises:
    -------
    MomentumPole, AnchorPole
    """
    z, z0 = complex(z), complex(z0)
    if isinstance(h_or_zeros, ZeroTable):
        if m is None:
            raise ValueError("m is required when passing a ZeroTable")
        h = build_xi_approx(h_or_zeros, m)
    elif isinstance(h_or_zeros, HoloFunction):
        h = h_or_zeros
    else:
        raise TypeError(f"expected HoloFunction or ZeroTable, got {type(h_or_zeros)}")

    hz = _checked_value(h, z, MomentumPole)
    h0 = _checked_value(h, z0, AnchorPole)
    dh0 = h.derivative(z0)

    if h.kind is FunctionKind.XI_APPROX:
        rho = h.zeros
        distance = float(np.min(np.abs(z - rho)))
        if distance < pole_tolerance(z):
            raise PoleError(z, distance)
        k_zp = p0 * (dh0 / hz - np.sum(1.0 / (z - rho)))
    else:
        k_zp = p0 * (dh0 - h.derivative(z)) / hz

    return FlowMapMatrix(
        m11=complex(hz / h0),
        m12=0j,
        m21=complex(k_zp),
        m22=complex(h0 / hz),
    )


# ───────────────────────────────────────────────────────────────────────────────
# 🔁 Action, Newton time, surfaces
# ───────────────────────────────────────────────────────────────────────────────
def action_along_orbit(H0: complex, period: complex) -> complex:
    """S = H₀·t*."""
    return complex(H0) * complex(period)


def newton_time_from_momentum(p, p0):
    """T with p = p₀·e^{T} (principal logarithm)."""
    return np.log(np.asarray(p, dtype=complex) / complex(p0))


def momentum_surface(h: HoloFunction, z_grid, z0: complex, p0: complex) -> np.ndarray:
    """Closed-form momentum over a solution surface; NaN where z is NaN or a root of h."""
    grid = np.asarray(z_grid, dtype=complex)
    out = np.full(grid.shape, np.nan + 1j * np.nan)
    mask = np.isfinite(grid)
    if np.any(mask):
        hz = h(grid[mask])
        with np.errstate(divide="ignore", invalid="ignore"):
            values = h(complex(z0)) / hz * complex(p0)
        values[np.abs(hz) <= pole_tolerance(grid[mask])] = np.nan
        out[mask] = values
    return out
