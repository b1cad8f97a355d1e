# src/surface/pm_polynomial.py

"""
pm_polynomial.py – Approximating Polynomial P_m(z; T, z₀) (HoloFlow)
----------------------------------------------------------------------
The constant-phase identity of the Newton flow, h(z(T)) = h(z₀)·e^{−T},
restricted to the 2m-zero product turns into the polynomial equation

    P_m(z; T, z₀) = ∏ₙ (z − ρₙ)/(z₀ − ρₙ) − e^{−T} = 0

whose roots are the complex-time Newton-flow images of z₀.

Also provides the un-normalised two-variable form
P_m(z, p, z₀, p₀) = p·∏(z − ρₙ) − p₀·∏(z₀ − ρₙ) of the Hamiltonian
solution surface.
"""

import logging
from dataclasses import dataclass, replace

import numpy as np

from src.catalog.holo_function import pole_tolerance
from src.catalog.zero_table import ZeroTable
from src.errors import DegenerateAnchor

logger = logging.getLogger("holoflow.surface")

# Direct products outside this magnitude window switch to log space
_DIRECT_RANGE = (1e-280, 1e280)


@dataclass(frozen=True)
class PmPolynomial:
    """
    Attributes:
    -----------
    zeros : np.ndarray
        The 2m symmetric zeros ρ₁..ρₘ, ρ̄₁..ρ̄ₘ.
    z0 : complex
        Anchor (initial value); must not coincide with a zero.
    T : complex
        Complex Newton time.
    """

    zeros: np.ndarray
    z0: complex
    T: complex = 0j

    def __post_init__(self):
        zeros = np.asarray(self.zeros, dtype=complex).copy()
        zeros.setflags(write=False)
        object.__setattr__(self, "zeros", zeros)
        object.__setattr__(self, "z0", complex(self.z0))
        object.__setattr__(self, "T", complex(self.T))
        if zeros.size and np.min(np.abs(self.z0 - zeros)) <= pole_tolerance(self.z0):
            raise DegenerateAnchor(self.z0)

    @classmethod
    def build(cls, table: ZeroTable, m: int, z0: complex, T: complex = 0j) -> "PmPolynomial":
        zeros = table.symmetric_zeros(m) if m > 0 else np.array([], dtype=complex)
        return cls(zeros, z0, T)

    @property
    def m(self) -> int:
        return self.zeros.size // 2

    @property
    def degree(self) -> int:
        return self.zeros.size

    @property
    def pi0(self) -> complex:
        """Π₀ = ∏(z₀ − ρₙ)."""
        return complex(np.prod(self.z0 - self.zeros))

    @property
    def target(self) -> complex:
        """e^{−T}."""
        return complex(np.exp(-self.T))

    def with_T(self, T: complex) -> "PmPolynomial":
        return replace(self, T=complex(T))

    def coefficients(self) -> np.ndarray:
        """Coefficients (highest degree first) of Π₀·P_m, i.e. ∏(z−ρₙ) − e^{−T}Π₀."""
        coeffs = np.poly(self.zeros).astype(complex)
        coeffs[-1] -= self.target * self.pi0
        return coeffs

    def log_ratio(self, z) -> np.ndarray:
        """Σ log((z − ρₙ)/(z₀ − ρₙ)), principal branch per factor."""
        zz = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.log((zz[..., None] - self.zeros) / (self.z0 - self.zeros))
        return terms.sum(axis=-1)

    def product_ratio(self, z) -> np.ndarray:
        """∏ (z − ρₙ)/(z₀ − ρₙ) by direct multiplication."""
        zz = np.asarray(z, dtype=complex)
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            return np.prod((zz[..., None] - self.zeros) / (self.z0 - self.zeros), axis=-1)

    def derivative(self, z) -> np.ndarray:
        """P′_m(z) = ∏ratio · Σ 1/(z − ρₙ)."""
        zz = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return self.product_ratio(zz) * np.sum(1.0 / (zz[..., None] - self.zeros), axis=-1)


# ───────────────────────────────────────────────────────────────────────────────
# 🧮 Evaluation
# ───────────────────────────────────────────────────────────────────────────────
def _eval_log(P: PmPolynomial, z: np.ndarray) -> np.ndarray:
    # e^{L} − e^{−T}, factoring out whichever exponential is larger
    L = P.log_ratio(z)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        small_target = np.real(L) >= -P.T.real
        by_product = -np.exp(L) * np.expm1(-P.T - L)
        by_target = np.exp(-P.T) * np.expm1(L + P.T)
        return np.where(small_target, by_product, by_target)


def eval_Pm(P: PmPolynomial, z, method: str = "auto"):
    """
    P_m(z; T, z₀) = ∏(z − ρₙ)/(z₀ − ρₙ) − e^{−T}.

    Parameters:
    -----------
    method : {"auto", "direct", "log"}
        "auto" multiplies directly and falls back to the log-space form
        when the product or e^{−T} leaves the representable range.
    """
    if not isinstance(P, PmPolynomial):
        raise TypeError(f"P must be a PmPolynomial, got {type(P)}")
    if method not in ("auto", "direct", "log"):
        raise ValueError(f"unknown method {method!r}")
    zz = np.asarray(z, dtype=complex)

    if method == "log":
        out = _eval_log(P, zz)
    else:
        prod = P.product_ratio(zz)
        with np.errstate(over="ignore", under="ignore"):
            target = np.exp(-P.T)
        out = prod - target
        if method == "auto":
            mag = np.abs(prod)
            lo, hi = _DIRECT_RANGE
            bad = ~np.isfinite(out) | ((mag != 0) & ((mag < lo) | (mag > hi)))
            bad |= not (lo < abs(target) < hi)
            if np.any(bad):
                out = np.where(bad, _eval_log(P, zz), out)
    return complex(out) if zz.ndim == 0 else out


def leading_coefficient(P: PmPolynomial) -> complex:
    """Coefficient of z^{2m} in P_m, equal to 1/Π₀."""
    return 1.0 / P.pi0


def eval_Pm_zp(
    zeros: ZeroTable, m: int, z: complex, p: complex, z0: complex, p0: complex
) -> complex:
    """p·∏(z − ρₙ) − p₀·∏(z₀ − ρₙ) over the 2m symmetric zeros."""
    rho = zeros.symmetric_zeros(m)
    return complex(p * np.prod(complex(z) - rho) - p0 * np.prod(complex(z0) - rho))
