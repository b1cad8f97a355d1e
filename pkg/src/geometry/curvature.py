# src/geometry/curvature.py

"""
curvature.py – Finite-Difference Flatness Check and Geometry Reports (HoloFlow)
----------------------------------------------------------------------
Assembles the Riemann tensor

  Rˡᵢⱼₖ = ∂ᵢΓˡⱼₖ − ∂ⱼΓˡᵢₖ + Σₘ (ΓˡᵢₘΓᵐⱼₖ − ΓˡⱼₘΓᵐᵢₖ)

from central differences of the closed-form Christoffel symbols. The
h-manifold is flat, so the result measures the stencil error alone and
shrinks by ≈ 4 when the step is halved.
"""

import logging
from typing import Iterable, List, Mapping, Optional, Tuple, Union

import numpy as np

from src.catalog.holo_function import HoloFunction
from src.errors import MetricSingular
from src.geometry.h_manifold import metric_frame

logger = logging.getLogger("holoflow.geometry")

STENCIL_GUARD = 10.0


def default_curvature_step(z: complex) -> float:
    return 1e-5 * (1.0 + abs(complex(z)))


def riemann_tensor_fd(h: HoloFunction, z: complex, fd_step: Optional[float] = None) -> np.ndarray:
    """
    Rˡᵢⱼₖ as a (2, 2, 2, 2) array indexed [l, i, j, k].

    Raises:
    -------
    MetricSingular
        If a zero of h lies within 10·fd_step of z, or any stencil point
        is singular.
    """
    z = complex(z)
    step = fd_step or default_curvature_step(z)
    if step <= 0:
        raise ValueError(f"fd_step must be positive, got {step}")
    nearby = h.roots_within(z, STENCIL_GUARD * step)
    if nearby.size:
        raise MetricSingular(z, float(np.min(np.abs(nearby - z))))

    gamma = metric_frame(h, z).gamma
    # d_gamma[i, l, j, k] = ∂ᵢΓˡⱼₖ
    d_gamma = np.stack(
        [
            (metric_frame(h, z + step * e).gamma - metric_frame(h, z - step * e).gamma) / (2.0 * step)
            for e in (1.0, 1j)
        ]
    )
    return (
        np.einsum("iljk->lijk", d_gamma)
        - np.einsum("jlik->lijk", d_gamma)
        + np.einsum("lim,mjk->lijk", gamma, gamma)
        - np.einsum("ljm,mik->lijk", gamma, gamma)
    )


def curvature_flatness_check(h: HoloFunction, z: complex, fd_step: Optional[float] = None) -> float:
    """Max |Rˡᵢⱼₖ| at z."""
    return float(np.max(np.abs(riemann_tensor_fd(h, z, fd_step))))


def flatness_convergence(
    h: HoloFunction, z: complex, coarse_step: float = 1e-2
) -> Tuple[float, float, float]:
    """
    Curvature residuals at `coarse_step` and half of it, with their ratio.

    A ratio near 4 confirms second-order decay of a zero tensor.
    """
    coarse = curvature_flatness_check(h, z, coarse_step)
    fine = curvature_flatness_check(h, z, coarse_step / 2.0)
    ratio = coarse / fine if fine > 0 else np.inf
    logger.debug(f"flatness at {z}: {coarse:.3e} → {fine:.3e} (ratio {ratio:.3f})")
    return coarse, fine, float(ratio)


# ───────────────────────────────────────────────────────────────────────────────
# 📝 Reports
# ───────────────────────────────────────────────────────────────────────────────
CheckLike = Union[Mapping, Tuple[complex, str, float, float]]


def _point_label(point) -> Union[List[float], str, None]:
    if point is None:
        return None
    if isinstance(point, str):
        return point
    point = complex(point)
    return [point.real, point.imag]


def geometry_report(checks: Iterable[CheckLike]) -> List[dict]:
    """
    Normalise checks into {point, quantity, value, tolerance, pass} rows.

    Accepts mappings with those keys or (point, quantity, value, tolerance)
    tuples. A check passes when value ≤ tolerance and value is finite.
    """
    rows = []
    for check in checks:
        if isinstance(check, Mapping):
            point, quantity = check.get("point"), check["quantity"]
            value, tolerance = check["value"], check["tolerance"]
        else:
            point, quantity, value, tolerance = check
        value, tolerance = float(value), float(tolerance)
        rows.append(
            {
                "point": _point_label(point),
                "quantity": str(quantity),
                "value": value,
                "tolerance": tolerance,
                "pass": bool(np.isfinite(value) and value <= tolerance),
            }
        )
    failed = sum(not row["pass"] for row in rows)
    if failed:
        logger.warning(f"⚠️ {failed}/{len(rows)} geometry checks failed")
    return rows
