# src/catalog/holo_function.py

"""
holo_function.py – Holomorphic Function Catalog (HoloFlow)
----------------------------------------------------------------------
Provides `HoloFunction`, an immutable evaluator of h, h′ and h″ for the
entire functions the flows are built from:

  • cosh-shift          h(z) = cosh(z − 1/2)
  • xi-approx           h(z) = α·∏ₙ ((z−1/2)² + γₙ²)/(1/4 + γₙ²)
  • generic-polynomial  h(z) = Σ cₖ z^(d−k) (coefficients highest first)
  • linear              h(z) = a·z

Every kind carries an overall complex multiplier `scale` (α for
xi-approx). Derivatives are exact: the xi-approx product is evaluated
as a second-order jet, one real quadratic factor per conjugate pair,
so h is real on the critical line and on the real axis.
"""

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import List, Tuple, Union

import numpy as np

from src.catalog.zero_table import ZeroTable
from src.errors import EvaluationOverflow, PoleError

logger = logging.getLogger("holoflow.catalog")

ComplexLike = Union[complex, float, np.ndarray]


def pole_tolerance(z: ComplexLike) -> float:
    """ε_pole = 1e−12·(1+|z|), shared by every pole guard."""
    return 1e-12 * (1.0 + float(np.max(np.abs(z))))


class FunctionKind(str, Enum):
    COSH_SHIFT = "cosh-shift"
    XI_APPROX = "xi-approx"
    GENERIC_POLY = "generic-polynomial"
    LINEAR = "linear"


# ───────────────────────────────────────────────────────────────────────────────
# 🧠 Class: HoloFunction
# ───────────────────────────────────────────────────────────────────────────────
@dataclass(frozen=True)
class HoloFunction:
    """
    Immutable holomorphic function with analytic first and second derivatives.

    Attributes:
    -----------
    kind : FunctionKind
        Which family the function belongs to.
    scale : complex
        Overall multiplier (α for xi-approx).
    gammas : tuple
        Zero ordinates γ₁..γₘ (xi-approx only).
    coeffs : tuple
        Polynomial coefficients, highest degree first (generic-polynomial only).
    slope : complex
        The constant a of h(z) = a·z (linear only).
    """

    kind: FunctionKind
    scale: complex = 1.0
    gammas: Tuple[float, ...] = ()
    coeffs: Tuple[complex, ...] = ()
    slope: complex = 1.0

    # ───────────────────────────────────────────────────────────────────────
    # Metadata
    # ───────────────────────────────────────────────────────────────────────
    @property
    def m(self) -> int:
        return len(self.gammas)

    @property
    def zeros(self) -> np.ndarray:
        """The 2m symmetric zeros of a xi-approx function (empty otherwise)."""
        upper = 0.5 + 1j * np.asarray(self.gammas, dtype=float)
        return np.concatenate([upper, np.conj(upper)])

    @property
    def alpha(self) -> float:
        return float(np.real(self.scale))

    @property
    def label(self) -> str:
        if self.kind is FunctionKind.XI_APPROX:
            return f"xi-approx(m={self.m}, alpha={self.alpha:.6g})"
        return self.kind.value

    def scaled(self, factor: complex) -> "HoloFunction":
        """Return factor·h (complex factors allowed, e.g. i·h)."""
        if factor == 0:
            raise ValueError("scale factor must be nonzero")
        return replace(self, scale=complex(self.scale) * complex(factor))

    # ───────────────────────────────────────────────────────────────────────
    # Evaluation
    # ───────────────────────────────────────────────────────────────────────
    def jet(self, z: ComplexLike) -> Tuple[ComplexLike, ComplexLike, ComplexLike]:
        """
        Evaluate (h(z), h′(z), h″(z)) in one pass.

        Raises:
        -------
        EvaluationOverflow
            If any component is not finite (e.g. cosh at large |Re z|).
        """
        return tuple(self._checked_jet(z, 2))

    def _checked_jet(self, z: ComplexLike, order: int) -> List[ComplexLike]:
        """Derivatives 0..order, each checked for overflow."""
        zz = np.asarray(z, dtype=complex)
        with np.errstate(over="ignore", invalid="ignore"):
            values = [self.scale * f for f in self._raw_jet(zz, order)]
        for k, value in enumerate(values):
            if not np.all(np.isfinite(value)):
                raise EvaluationOverflow(complex(zz.flat[0]) if zz.size else 0j, k)
        if zz.ndim == 0:
            return [complex(v) for v in values]
        return values

    def _raw_jet(self, zz: np.ndarray, order: int = 2) -> list:
        if self.kind is FunctionKind.COSH_SHIFT:
            w = zz - 0.5
            c = np.cosh(w)
            if order == 0:
                return [c]
            return [c, np.sinh(w), c][: order + 1]

        if self.kind is FunctionKind.LINEAR:
            a = complex(self.slope)
            return [a * zz, np.full_like(zz, a), np.zeros_like(zz)][: order + 1]

        if self.kind is FunctionKind.GENERIC_POLY:
            p = np.asarray(self.coeffs, dtype=complex)
            polys = [p]
            for _ in range(order):
                last = polys[-1]
                polys.append(np.polyder(last) if last.size > 1 else np.zeros(1, dtype=complex))
            return [np.polyval(q, zz) for q in polys]

        # xi-approx: product of real quadratics, propagated as a jet up to `order`
        w = zz - 0.5
        f0 = np.ones_like(zz)
        f1 = np.zeros_like(zz)
        f2 = np.zeros_like(zz)
        for gamma in self.gammas:
            c = 0.25 + gamma * gamma
            q0 = (w * w + gamma * gamma) / c
            q1 = 2.0 * w / c
            q2 = 2.0 / c
            f0, f1, f2 = (
                f0 * q0,
                f1 * q0 + f0 * q1 if order >= 1 else f1,
                f2 * q0 + 2.0 * f1 * q1 + f0 * q2 if order >= 2 else f2,
            )
        return [f0, f1, f2][: order + 1]

    def evaluate(self, z: ComplexLike, order: int = 0) -> ComplexLike:
        """h(z), h′(z) or h″(z) for order 0, 1, 2; higher orders are not computed."""
        if order not in (0, 1, 2):
            raise ValueError(f"order must be 0, 1 or 2, got {order}")
        return self._checked_jet(z, order)[order]

    def __call__(self, z: ComplexLike) -> ComplexLike:
        return self.evaluate(z, 0)

    def derivative(self, z: ComplexLike) -> ComplexLike:
        return self.evaluate(z, 1)

    def second_derivative(self, z: ComplexLike) -> ComplexLike:
        return self.evaluate(z, 2)

    # ───────────────────────────────────────────────────────────────────────
    # Roots
    # ───────────────────────────────────────────────────────────────────────
    def roots_within(self, z: complex, radius: float) -> np.ndarray:
        """Known roots of h within `radius` of z."""
        z = complex(z)
        if self.kind is FunctionKind.COSH_SHIFT:
            # cosh(w) = 0 ⇔ w = i(k + 1/2)π
            k_lo = int(np.floor((z.imag - radius) / np.pi - 0.5))
            k_hi = int(np.ceil((z.imag + radius) / np.pi - 0.5))
            roots = np.array(
                [0.5 + 1j * (k + 0.5) * np.pi for k in range(k_lo, k_hi + 1)]
            )
        elif self.kind is FunctionKind.XI_APPROX:
            roots = self.zeros
        elif self.kind is FunctionKind.LINEAR:
            roots = np.array([0j]) if self.slope != 0 else np.array([], dtype=complex)
        else:
            p = np.trim_zeros(np.asarray(self.coeffs, dtype=complex), "f")
            roots = np.roots(p) if p.size > 1 else np.array([], dtype=complex)
        roots = np.asarray(roots, dtype=complex)
        return roots[np.abs(roots - z) <= radius]


# ───────────────────────────────────────────────────────────────────────────────
# 🏗️ Builders
# ───────────────────────────────────────────────────────────────────────────────
def cosh_shift(scale: complex = 1.0) -> HoloFunction:
    """h(z) = scale·cosh(z − 1/2)."""
    return HoloFunction(FunctionKind.COSH_SHIFT, scale=complex(scale))


def linear(a: complex = 1.0) -> HoloFunction:
    """h(z) = a·z."""
    return HoloFunction(FunctionKind.LINEAR, slope=complex(a))


def generic_polynomial(coeffs, scale: complex = 1.0) -> HoloFunction:
    """Polynomial with coefficients highest degree first; degree 0 is a constant."""
    coeffs = tuple(complex(c) for c in np.atleast_1d(coeffs))
    if not coeffs:
        raise ValueError("polynomial needs at least one coefficient")
    return HoloFunction(FunctionKind.GENERIC_POLY, scale=complex(scale), coeffs=coeffs)


def build_xi_approx(zeros: ZeroTable, m: int, scale: float = 1.0) -> HoloFunction:
    """
    Degree-2m approximant α·∏ₙ (z−ρₙ)(z−ρ̄ₙ)/(ρₙρ̄ₙ) over the first m zero pairs.

    Raises:
    -------
    InsufficientZeros
        If the table holds fewer than m ordinates.
    """
    if not isinstance(zeros, ZeroTable):
        raise TypeError(f"zeros must be a ZeroTable, got {type(zeros)}")
    if not np.isreal(scale) or float(np.real(scale)) <= 0:
        raise ValueError(f"scale α must be a positive real, got {scale}")
    zeros.symmetric_zeros(m)  # validates m against the table
    return HoloFunction(
        FunctionKind.XI_APPROX,
        scale=complex(float(np.real(scale))),
        gammas=tuple(float(g) for g in zeros.gammas[:m]),
    )


def evaluate(h: HoloFunction, z: ComplexLike, order: int = 0) -> ComplexLike:
    """Uniform evaluator: h(z), h′(z) or h″(z)."""
    return h.evaluate(z, order)


def log_derivative_sum(zeros: ZeroTable, m: int, z: complex) -> complex:
    """
    Σ 1/(z − ρₙ) over the 2m symmetric zeros (logarithmic derivative of h).

    Raises:
    -------
    PoleError
        If z lies within ε_pole of an included zero.
    """
    rho = zeros.symmetric_zeros(m)
    z = complex(z)
    distance = float(np.min(np.abs(z - rho)))
    if distance < pole_tolerance(z):
        raise PoleError(z, distance)
    return complex(np.sum(1.0 / (z - rho)))


def auto_scale(
    h_unit: HoloFunction,
    re_range: Tuple[float, float],
    im_range: Tuple[float, float],
    density: int = 64,
) -> float:
    """α = 1/max|h_unit| over a density×density lattice of the window."""
    re = np.linspace(re_range[0], re_range[1], density)
    im = np.linspace(im_range[0], im_range[1], density)
    grid = re[None, :] + 1j * im[:, None]
    peak = float(np.max(np.abs(h_unit(grid))))
    if not np.isfinite(peak) or peak <= 0:
        raise ValueError(f"cannot normalise h over window (max |h| = {peak})")
    alpha = 1.0 / peak
    logger.debug(f"auto α = {alpha:.6e} over {re_range}×{im_range}")
    return alpha
