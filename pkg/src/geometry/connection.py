# src/geometry/connection.py

"""
connection.py – Covariant Derivatives on the h-Manifold (HoloFlow)
----------------------------------------------------------------------
Vector fields are described by a `VectorFieldSpec`:

  • HoloSplit(f)      X = (Re f, Im f) for a holomorphic f
  • LinearComb(a, b)  X = A·h with A = [[a, −b], [b, a]]
  • Raw(fn)           X = fn(z₁, z₂), Jacobian by central differences

Closed form of the Levi-Civita derivative along the flow:

  ∇_h X  = J_X·h − J_h·X
  ∇_ih X = E·(J_X·h − J_h·X),  E = [[0, −1], [1, 0]]

`covariant_derivative_expanded` evaluates Σ Γᵏᵢⱼ Yⁱ Xʲ + J_X·Y directly
and `christoffel_koszul_fd` rebuilds Γ from finite differences of g via
the Koszul formula; both serve as oracles for the closed forms.
"""

# ───────────────────────────────────────────────────────────────────────────────
# 📦 Imports
# ───────────────────────────────────────────────────────────────────────────────
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Optional, Tuple

import numpy as np

from src.catalog.holo_function import HoloFunction, pole_tolerance
from src.errors import AnchorPole, MetricSingular, NonHolomorphicField
from src.geometry.h_manifold import TangentVector, checked_jet, metric_frame

logger = logging.getLogger("holoflow.geometry")

CR_TOLERANCE = 1e-8
ROTATION = np.array([[0.0, -1.0], [1.0, 0.0]])


def default_fd_step(z: complex) -> float:
    return 1e-5 * (1.0 + abs(complex(z)))


def complex_jacobian(f_prime: complex) -> np.ndarray:
    """Real Jacobian of the splitting of a holomorphic function with derivative f′."""
    f_prime = complex(f_prime)
    return np.array([[f_prime.real, -f_prime.imag], [f_prime.imag, f_prime.real]])


def _split(w: complex) -> np.ndarray:
    w = complex(w)
    return np.array([w.real, w.imag])


# ───────────────────────────────────────────────────────────────────────────────
# 🧾 Vector field descriptions
# ───────────────────────────────────────────────────────────────────────────────
class FieldKind(str, Enum):
    HOLO_SPLIT = "holo-split"
    LINEAR_COMB = "linear-comb"
    RAW = "raw"


class Direction(str, Enum):
    ALONG_H = "along-h"
    ALONG_IH = "along-ih"


@dataclass(frozen=True)
class VectorFieldSpec:
    kind: FieldKind
    function: Optional[HoloFunction] = None
    a: float = 0.0
    b: float = 0.0
    components: Optional[Callable[[float, float], Tuple[float, float]]] = None

    @classmethod
    def holo_split(cls, f: HoloFunction) -> "VectorFieldSpec":
        if not isinstance(f, HoloFunction):
            raise TypeError(f"HoloSplit needs a HoloFunction, got {type(f)}")
        return cls(FieldKind.HOLO_SPLIT, function=f)

    @classmethod
    def linear_comb(cls, a: float, b: float) -> "VectorFieldSpec":
        if not (np.isfinite(a) and np.isfinite(b)):
            raise ValueError("a and b must be finite reals")
        return cls(FieldKind.LINEAR_COMB, a=float(a), b=float(b))

    @classmethod
    def raw(cls, components: Callable[[float, float], Tuple[float, float]]) -> "VectorFieldSpec":
        if not callable(components):
            raise TypeError("Raw field needs a callable (z1, z2) -> (X1, X2)")
        return cls(FieldKind.RAW, components=components)

    @property
    def matrix(self) -> np.ndarray:
        """A = [[a, −b], [b, a]] (LinearComb only)."""
        return np.array([[self.a, -self.b], [self.b, self.a]])

    def value(self, h: HoloFunction, z: complex) -> np.ndarray:
        z = complex(z)
        if self.kind is FieldKind.HOLO_SPLIT:
            return _split(self.function(z))
        if self.kind is FieldKind.LINEAR_COMB:
            return self.matrix @ _split(h(z))
        return np.asarray(self.components(z.real, z.imag), dtype=float)

    def jacobian(self, h: HoloFunction, z: complex, step: Optional[float] = None) -> np.ndarray:
        """J_X at z; exact for HoloSplit and LinearComb (J_{A·h} = A·J_h)."""
        z = complex(z)
        if self.kind is FieldKind.HOLO_SPLIT:
            return complex_jacobian(self.function.derivative(z))
        if self.kind is FieldKind.LINEAR_COMB:
            return self.matrix @ complex_jacobian(h.derivative(z))
        step = step or default_fd_step(z)
        columns = []
        for e in (1.0, 1j):
            forward = self.value(h, z + step * e)
            backward = self.value(h, z - step * e)
            columns.append((forward - backward) / (2.0 * step))
        return np.column_stack(columns)


def cauchy_riemann_violation(jac: np.ndarray) -> float:
    """Relative violation of ∂₁X₁ = ∂₂X₂, ∂₂X₁ = −∂₁X₂."""
    violation = abs(jac[0, 0] - jac[1, 1]) + abs(jac[0, 1] + jac[1, 0])
    return float(violation / (1.0 + np.max(np.abs(jac))))


def _direction_field(h: HoloFunction, direction: Direction) -> VectorFieldSpec:
    if direction is Direction.ALONG_H:
        return VectorFieldSpec.holo_split(h)
    return VectorFieldSpec.holo_split(h.scaled(1j))


# ───────────────────────────────────────────────────────────────────────────────
# 🧮 Covariant derivatives
# ───────────────────────────────────────────────────────────────────────────────
def covariant_derivative(
    h: HoloFunction, X: VectorFieldSpec, direction: Direction, z: complex
) -> TangentVector:
    """
    ∇_h X or ∇_ih X in closed form.

    Raises:
    -------
    MetricSingular
        If |h(z)| ≤ ε_pole.
    NonHolomorphicField
        For a Raw field whose Jacobian violates Cauchy–Riemann beyond 1e−8.
    """
    if not isinstance(X, VectorFieldSpec):
        raise TypeError(f"X must be a VectorFieldSpec, got {type(X)}")
    direction = Direction(direction)
    z = complex(z)
    value, slope, _ = checked_jet(h, z)

    jac_x = X.jacobian(h, z)
    if X.kind is FieldKind.RAW:
        violation = cauchy_riemann_violation(jac_x)
        if violation > CR_TOLERANCE:
            raise NonHolomorphicField(z, violation)

    result = jac_x @ _split(value) - complex_jacobian(slope) @ X.value(h, z)
    if direction is Direction.ALONG_IH:
        result = ROTATION @ result
    return TangentVector.from_array(result)


def covariant_derivative_expanded(
    h: HoloFunction, X: VectorFieldSpec, Y: VectorFieldSpec, z: complex
) -> TangentVector:
    """
    ∇_Y X = Σ Γᵏᵢⱼ Yⁱ Xʲ ∂ₖ + J_X·Y, straight from the connection
    coefficients. Works for any field kind.
    """
    frame = metric_frame(h, z)
    x_val = X.value(h, z)
    y_val = Y.value(h, z)
    contraction = np.einsum("kij,i,j->k", frame.gamma, y_val, x_val)
    return TangentVector.from_array(contraction + X.jacobian(h, z) @ y_val)


def covariant_derivative_along(
    h: HoloFunction, X: VectorFieldSpec, direction: Direction, z: complex
) -> TangentVector:
    """Expanded form with Y = h or Y = ih."""
    return covariant_derivative_expanded(h, X, _direction_field(h, Direction(direction)), z)


def check_parallel_sensitivity(
    h: HoloFunction, z0: complex, dz0: complex, sample_points: Iterable[complex]
) -> float:
    """
    Max |∇ X| over the samples and both directions for the splitting
    X = A·h of the sensitivity Δz = (h(z)/h(z₀))·Δz₀.

    Raises:
    -------
    AnchorPole
        If |h(z₀)| ≤ ε_pole.
    """
    z0 = complex(z0)
    h0 = h(z0)
    if abs(h0) <= pole_tolerance(z0):
        raise AnchorPole(z0, abs(h0))
    ratio = complex(dz0) / h0
    field = VectorFieldSpec.linear_comb(ratio.real, ratio.imag)

    residual = 0.0
    count = 0
    for z in sample_points:
        for direction in Direction:
            residual = max(residual, covariant_derivative(h, field, direction, z).norm())
        count += 1
    logger.debug(f"parallel sensitivity: max residual {residual:.3e} over {count} points")
    return residual


# ───────────────────────────────────────────────────────────────────────────────
# 🔎 Finite-difference oracle
# ───────────────────────────────────────────────────────────────────────────────
def christoffel_koszul_fd(h: HoloFunction, z: complex, step: Optional[float] = None) -> np.ndarray:
    """
    Γᵐᵢⱼ = ½ gᵐᵏ (∂ᵢgₖⱼ + ∂ⱼgₖᵢ − ∂ₖgᵢⱼ) with central differences of
    g = δ/|h|². Returns a (2, 2, 2) array indexed [m, i, j].
    """
    z = complex(z)
    step = step or default_fd_step(z)

    def metric(w: complex) -> np.ndarray:
        value = h(w)
        h_sq = value.real * value.real + value.imag * value.imag
        if abs(value) <= pole_tolerance(w) or h_sq == 0.0:
            raise MetricSingular(w, abs(value))
        return np.eye(2) / h_sq

    # dg[k, i, j] = ∂ₖ gᵢⱼ
    dg = np.stack(
        [(metric(z + step * e) - metric(z - step * e)) / (2.0 * step) for e in (1.0, 1j)]
    )
    inv_g = np.linalg.inv(metric(z))
    koszul = np.einsum("ikj->kij", dg) + np.einsum("jki->kij", dg) - dg
    return 0.5 * np.einsum("mk,kij->mij", inv_g, koszul)
