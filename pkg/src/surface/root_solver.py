# src/surface/root_solver.py

"""
root_solver.py – Simultaneous Root Finder for P_m (HoloFlow)
----------------------------------------------------------------------
Aberth–Ehrlich iteration on the monic form ∏(z − ρₙ) − e^{−T}Π₀, using
the product representation for the value and Σ 1/(z − ρₙ) for the
logarithmic derivative (no coefficient expansion on the main path).

Falls back to companion-matrix eigenvalues (np.roots) when the iteration
cap is reached, then polishes every root with Newton steps.
"""

import logging
from typing import Tuple

import numpy as np

from src.errors import NonConvergence
from src.surface.pm_polynomial import PmPolynomial, eval_Pm

logger = logging.getLogger("holoflow.surface")

MAX_ITER = 500
POLISH_STEPS = 8
RESIDUAL_FACTOR = 1e-12
ACCEPT_FACTOR = 1e-8
STEP_TOL = 1e-13


def _newton_ratio(zeros: np.ndarray, shift: complex, x: np.ndarray) -> np.ndarray:
    """Q(x)/Q′(x) for Q(z) = ∏(z − ρ) − shift."""
    diff = x[:, None] - zeros[None, :]
    prod = np.prod(diff, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        logder = np.sum(1.0 / diff, axis=1)
        ratio = (prod - shift) / (prod * logder)
    # Exactly on a zero ρ: Q′ = ∏_{j≠k}(x − ρ_j)
    hit = ~np.isfinite(ratio)
    for i in np.flatnonzero(hit):
        others = diff[i][diff[i] != 0]
        slope = np.prod(others) if others.size == diff.shape[1] - 1 else 0.0
        ratio[i] = (prod[i] - shift) / slope if slope != 0 else 0.0
    return ratio


def _initial_guesses(zeros: np.ndarray, shift: complex) -> np.ndarray:
    n = zeros.size
    spread = float(np.max(np.abs(zeros - 0.5))) if n else 0.0
    radius = 1.1 * max(spread, abs(shift) ** (1.0 / n), 1e-3)
    angles = 2 * np.pi * np.arange(n) / n + 0.4
    return 0.5 + radius * np.exp(1j * angles)


def _aberth(zeros: np.ndarray, shift: complex, max_iter: int) -> Tuple[np.ndarray, bool, int]:
    x = _initial_guesses(zeros, shift)
    n = x.size
    eye = np.eye(n, dtype=bool)
    for it in range(1, max_iter + 1):
        ratio = _newton_ratio(zeros, shift, x)
        pair = x[:, None] - x[None, :]
        pair[eye] = 1.0
        with np.errstate(divide="ignore", invalid="ignore"):
            repulsion = np.sum(np.where(eye, 0.0, 1.0 / pair), axis=1)
            step = ratio / (1.0 - ratio * repulsion)
        step[~np.isfinite(step)] = 0.0
        x = x - step
        if np.all(np.abs(step) <= STEP_TOL * (1.0 + np.abs(x))):
            return x, True, it
    return x, False, max_iter


def _polish(zeros: np.ndarray, shift: complex, x: np.ndarray) -> np.ndarray:
    for _ in range(POLISH_STEPS):
        step = _newton_ratio(zeros, shift, x)
        step[~np.isfinite(step)] = 0.0
        x = x - step
        if np.all(np.abs(step) <= STEP_TOL * (1.0 + np.abs(x))):
            break
    return x


def roots_of_Pm(P: PmPolynomial, max_iter: int = MAX_ITER) -> np.ndarray:
    """
    All 2m roots of P_m(·; T, z₀), sorted by (re, im).

    Raises:
    -------
    ValueError
        For a degree-0 polynomial (m = 0).
    NonConvergence
        If neither Aberth nor the companion fallback reaches residual
        1e−8·(1 + |e^{−T}|).
    """
    if not isinstance(P, PmPolynomial):
        raise TypeError(f"P must be a PmPolynomial, got {type(P)}")
    if P.degree < 1:
        raise ValueError("P_m has degree 0 (m = 0): no roots to find")

    shift = P.target * P.pi0
    scale = 1.0 + abs(P.target)
    x, converged, iterations = _aberth(P.zeros, shift, max_iter)
    if not converged:
        logger.debug(f"Aberth hit {max_iter} iterations; companion-matrix fallback")
        x = np.roots(P.coefficients()).astype(complex)
    x = _polish(P.zeros, shift, x)

    residual = float(np.max(np.abs(eval_Pm(P, x))))
    if not np.isfinite(residual) or residual > ACCEPT_FACTOR * scale:
        raise NonConvergence(iterations, residual)
    if residual > RESIDUAL_FACTOR * scale:
        logger.debug(f"P_m residual {residual:.2e} above polish target at T={P.T}")

    order = np.lexsort((x.imag, x.real))
    return x[order]
