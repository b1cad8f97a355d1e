# src/geometry/h_manifold.py

"""
h_manifold.py – Metric, Lagrangian and Christoffel Symbols of the h-Manifold (HoloFlow)
----------------------------------------------------------------------
The plane z = z₁ + i·z₂ minus the zeros of h, with the conformally flat
metric built from h = h₁ + i·h₂:

  g₁₁ = g₂₂ = 1/(h₁² + h₂²),  g₁₂ = g₂₁ = 0
  L(z, v) = (v₁² + v₂²)/(2|h|²)

Core responsibilities:
  • `MetricFrame`: g, g⁻¹ and the closed-form Christoffel symbols at a point
  • Lagrangian, metric inner product and Legendre momentum
  • Pull-back of the metric to the complex-time chart of a trajectory

Partial derivatives of h₁, h₂ come from h′ through the Cauchy–Riemann
relations; finite differences are used only by the oracles in
`connection.py` and `curvature.py`.
"""

# ───────────────────────────────────────────────────────────────────────────────
# 📦 Imports
# ───────────────────────────────────────────────────────────────────────────────
import logging
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np
import pandas as pd

from src.catalog.holo_function import HoloFunction, pole_tolerance
from src.errors import MetricSingular
from src.flows.trajectory import Trajectory

logger = logging.getLogger("holoflow.geometry")

TIME_CHART_COLUMNS = ["s", "z_re", "z_im", "g_hh", "g_h_ih", "g_ih_ih"]


# ───────────────────────────────────────────────────────────────────────────────
# 🧾 Value types
# ───────────────────────────────────────────────────────────────────────────────
@dataclass(frozen=True)
class TangentVector:
    """Components in the coordinate basis ∂₁, ∂₂."""

    v1: float
    v2: float

    def __post_init__(self):
        if not (np.isfinite(self.v1) and np.isfinite(self.v2)):
            raise ValueError(f"tangent vector components must be finite, got ({self.v1}, {self.v2})")

    @classmethod
    def from_complex(cls, w: complex) -> "TangentVector":
        w = complex(w)
        return cls(float(w.real), float(w.imag))

    @classmethod
    def from_array(cls, arr: Sequence[float]) -> "TangentVector":
        return cls(float(arr[0]), float(arr[1]))

    def as_array(self) -> np.ndarray:
        return np.array([self.v1, self.v2], dtype=float)

    def as_complex(self) -> complex:
        return complex(self.v1, self.v2)

    def norm(self) -> float:
        return float(np.hypot(self.v1, self.v2))


VectorLike = Union[TangentVector, Sequence[float], complex]


def _as_components(v: VectorLike) -> np.ndarray:
    if isinstance(v, TangentVector):
        return v.as_array()
    if isinstance(v, (complex, np.complexfloating)):
        return np.array([v.real, v.imag], dtype=float)
    arr = np.asarray(v, dtype=float)
    if arr.shape != (2,):
        raise ValueError(f"expected two components, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class MetricFrame:
    """
    Metric data at one point.

    `gamma1[i, j]` is Γ¹ᵢⱼ and `gamma2[i, j]` is Γ²ᵢⱼ; both symmetric.
    """

    z: complex
    g11: float
    g22: float
    ginv11: float
    ginv22: float
    gamma1: np.ndarray
    gamma2: np.ndarray

    def __post_init__(self):
        for name in ("gamma1", "gamma2"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def metric(self) -> np.ndarray:
        return np.diag([self.g11, self.g22])

    @property
    def inverse(self) -> np.ndarray:
        return np.diag([self.ginv11, self.ginv22])

    @property
    def gamma(self) -> np.ndarray:
        """Γ as a (2, 2, 2) array indexed [k, i, j]."""
        return np.stack([self.gamma1, self.gamma2])


# ───────────────────────────────────────────────────────────────────────────────
# 📐 Metric
# ───────────────────────────────────────────────────────────────────────────────
def checked_jet(h: HoloFunction, z: complex) -> Tuple[complex, complex, float]:
    """(h, h′, |h|²); MetricSingular at or near a zero of h."""
    if not isinstance(h, HoloFunction):
        raise TypeError(f"h must be a HoloFunction, got {type(h)}")
    z = complex(z)
    value, slope, _ = h.jet(z)
    h_sq = value.real * value.real + value.imag * value.imag
    if abs(value) <= pole_tolerance(z) or h_sq == 0.0:
        raise MetricSingular(z, abs(value))
    return value, slope, h_sq


def metric_frame(h: HoloFunction, z: complex) -> MetricFrame:
    """
    Fill g, g⁻¹ and the Christoffel symbols

      Γ¹ = [[−m₁, −m₂], [−m₂, m₁]]/|h|²
      Γ² = [[ m₂, −m₁], [−m₁, −m₂]]/|h|²

    with m_j = h₁·∂ⱼh₁ + h₂·∂ⱼh₂, i.e. m₁ = Re(h̄h′), m₂ = −Im(h̄h′).

    Raises:
    -------
    MetricSingular
        If |h(z)| ≤ ε_pole.
    """
    value, slope, h_sq = checked_jet(h, z)
    h1, h2 = value.real, value.imag
    # ∂h₁/∂z₁ = Re h′, ∂h₁/∂z₂ = −Im h′, ∂h₂/∂z₁ = Im h′, ∂h₂/∂z₂ = Re h′
    m1 = h1 * slope.real + h2 * slope.imag
    m2 = -h1 * slope.imag + h2 * slope.real

    gamma1 = np.array([[-m1, -m2], [-m2, m1]]) / h_sq
    gamma2 = np.array([[m2, -m1], [-m1, -m2]]) / h_sq
    return MetricFrame(
        z=complex(z),
        g11=1.0 / h_sq,
        g22=1.0 / h_sq,
        ginv11=h_sq,
        ginv22=h_sq,
        gamma1=gamma1,
        gamma2=gamma2,
    )


def metric_inner(h: HoloFunction, z: complex, v: VectorLike, w: VectorLike) -> float:
    """⟨v, w⟩/(2|h(z)|²)."""
    _, _, h_sq = checked_jet(h, z)
    return float(np.dot(_as_components(v), _as_components(w)) / (2.0 * h_sq))


def lagrangian(h: HoloFunction, z: complex, v: VectorLike) -> float:
    """
    L(z, v) = (v₁² + v₂²)/(2|h(z)|²).

    Raises:
    -------
    MetricSingular
        At zeros of h.
    """
    return metric_inner(h, z, v, v)


def legendre_momentum(h: HoloFunction, z: complex, v: VectorLike) -> TangentVector:
    """p_k = ∂L/∂v_k = v_k/|h(z)|²."""
    _, _, h_sq = checked_jet(h, z)
    return TangentVector.from_array(_as_components(v) / h_sq)


# ───────────────────────────────────────────────────────────────────────────────
# ⏱️ Time chart
# ───────────────────────────────────────────────────────────────────────────────
def trivialize_in_time_chart(h: HoloFunction, trajectory: Trajectory) -> pd.DataFrame:
    """
    Evaluate g(h, h), g(h, ih) and g(ih, ih) at every sample of a flow
    trajectory. In the (t₁, t₂) chart these are 1/2, 0 and 1/2.

    Raises:
    -------
    MetricSingular
        If any sample sits on a zero of h.
    """
    if not isinstance(trajectory, Trajectory):
        raise TypeError(f"trajectory must be a Trajectory, got {type(trajectory)}")

    rows = []
    for s, z in zip(trajectory.s, trajectory.z):
        value = h(complex(z))
        along = (value.real, value.imag)
        rotated = (-value.imag, value.real)
        rows.append(
            (
                s,
                z.real,
                z.imag,
                metric_inner(h, z, along, along),
                metric_inner(h, z, along, rotated),
                metric_inner(h, z, rotated, rotated),
            )
        )
    logger.debug(f"time-chart pull-back over {len(rows)} samples")
    return pd.DataFrame(rows, columns=TIME_CHART_COLUMNS)
