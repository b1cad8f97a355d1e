# src/hamiltonian/bundle_integrator.py

"""
bundle_integrator.py – Joint Integration of (z, p, Δz, Δp) (HoloFlow)
----------------------------------------------------------------------
Integrates the Hamiltonian system together with its variational
equations along a complex-time ray:

  ż = h(z)
  ṗ = −h′(z)·p
  Δż = h′(z)·Δz
  Δṗ = −h″(z)·Δz₀p₀ − h′(z)·Δp

h″ comes from the analytic jet of the function. The resulting
`BundleTrajectory` compares itself against the closed forms and exports
the columns "s,z_re,z_im,p_re,p_im,dz_re,dz_im,dp_re,dp_im,H_re,H_im".
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from src.catalog.holo_function import HoloFunction
from src.errors import StiffnessAbort
from src.flows.flow_engine import DEFAULT_TOL
from src.flows.integrator import DormandPrince, Tolerance
from src.flows.trajectory import FlowStatus, TimeRay
from src.hamiltonian.closed_forms import (
    SensitivityBundle,
    delta_p_closed_form,
    momentum_closed_form,
    sensitivity_closed_form,
)

logger = logging.getLogger("holoflow.hamiltonian")

BUNDLE_COLUMNS = [
    "s", "z_re", "z_im", "p_re", "p_im", "dz_re", "dz_im", "dp_re", "dp_im", "H_re", "H_im",
]


@dataclass(frozen=True)
class BundleTrajectory:
    """Samples of the joint state along a ray."""

    s: np.ndarray
    states: np.ndarray  # shape (n, 4): z, p, Δz, Δp
    hz: np.ndarray
    bundle0: SensitivityBundle
    theta: float = 0.0
    status: FlowStatus = FlowStatus.COMPLETED

    def __len__(self) -> int:
        return len(self.s)

    @property
    def z(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def p(self) -> np.ndarray:
        return self.states[:, 1]

    @property
    def dz(self) -> np.ndarray:
        return self.states[:, 2]

    @property
    def dp(self) -> np.ndarray:
        return self.states[:, 3]

    @property
    def t(self) -> np.ndarray:
        return self.s * np.exp(1j * self.theta)

    @property
    def H(self) -> np.ndarray:
        return self.hz * self.p

    @property
    def final(self) -> SensitivityBundle:
        return self.bundle0.with_state(self.states[-1])

    def closed_form_residuals(self, h: HoloFunction) -> pd.DataFrame:
        """|numeric − closed form| / (1 + |closed form|) for p, Δz and Δp at every sample."""
        b = self.bundle0
        rows = []
        for z, p, dz, dp in self.states:
            p_cf = momentum_closed_form(h, z, b.z0, b.p0)
            dz_cf = sensitivity_closed_form(h, z, b.z0, b.dz0)
            dp_cf = delta_p_closed_form(h, z, b.z0, b.p0, b.dz0, b.dp0)
            rows.append(
                (
                    abs(p - p_cf) / (1 + abs(p_cf)),
                    abs(dz - dz_cf) / (1 + abs(dz_cf)),
                    abs(dp - dp_cf) / (1 + abs(dp_cf)),
                )
            )
        return pd.DataFrame(rows, columns=["p", "dz", "dp"]).assign(s=self.s)

    def drift(self) -> dict:
        """Max relative drift of H = h(z)p and of p·Δz from their initial values."""
        H = self.H
        pdz = self.p * self.dz
        return {
            "H": float(np.max(np.abs(H - H[0])) / max(abs(H[0]), 1e-300)),
            "p_dz": float(np.max(np.abs(pdz - pdz[0])) / max(abs(pdz[0]), 1e-300)),
        }

    def to_frame(self) -> pd.DataFrame:
        H = self.H
        return pd.DataFrame(
            {
                "s": self.s,
                "z_re": self.z.real, "z_im": self.z.imag,
                "p_re": self.p.real, "p_im": self.p.imag,
                "dz_re": self.dz.real, "dz_im": self.dz.imag,
                "dp_re": self.dp.real, "dp_im": self.dp.imag,
                "H_re": H.real, "H_im": H.imag,
            },
            columns=BUNDLE_COLUMNS,
        )

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False, float_format="%.17g")
        return path


def integrate_hamiltonian(
    h: HoloFunction,
    bundle0: SensitivityBundle,
    ray: TimeRay,
    tol: Tolerance = DEFAULT_TOL,
    samples: Optional[int] = None,
    max_step: float = np.inf,
) -> BundleTrajectory:
    """
    Jointly integrate (z, p, Δz, Δp) along the ray t = s·e^{iθ}.

    Parameters:
    -----------
    samples : int, optional
        If given, return exactly this many equally spaced samples in s
        (the stepper lands on each); otherwise every accepted step.

    Raises:
    -------
    StiffnessAbort
        With `exc.partial` set to the BundleTrajectory so far.
    """
    if not isinstance(bundle0, SensitivityBundle):
        raise TypeError(f"bundle0 must be a SensitivityBundle, got {type(bundle0)}")
    direction = ray.direction
    coupling = bundle0.dz0 * bundle0.p0

    def rhs(s, y):
        z, p, dz, dp = y
        value, slope, curvature = h.jet(z)
        return direction * np.array(
            [value, -slope * p, slope * dz, -curvature * coupling - slope * dp]
        )

    checkpoints = np.linspace(0.0, ray.span, samples) if samples else None
    solver = DormandPrince(rhs, tol=tol, max_step=max_step)

    def _wrap(result, status):
        if checkpoints is not None:
            s = checkpoints
            states = np.asarray(result.checkpoint_values)
            keep = np.all(np.isfinite(states), axis=1)
            s, states = s[keep], states[keep]
        else:
            s, states = np.asarray(result.s), np.asarray(result.y)
        return BundleTrajectory(
            s=np.asarray(s, dtype=float),
            states=states,
            hz=np.asarray(h(states[:, 0]), dtype=complex),
            bundle0=bundle0,
            theta=ray.theta,
            status=status,
        )

    try:
        result = solver.solve(bundle0.state, ray.span, checkpoints=checkpoints)
    except StiffnessAbort as exc:
        exc.partial = _wrap(exc.partial, FlowStatus.STIFFNESS_ABORT)
        logger.warning(f"⚠️ Bundle integration from z0={bundle0.z0} aborted at s={exc.s:.6g}")
        raise
    return _wrap(result, FlowStatus.COMPLETED)


def loop_action(traj: BundleTrajectory) -> complex:
    """Trapezoidal ∮ p·h(z) dt over the sampled path."""
    integrand = traj.H
    dt = np.diff(traj.t)
    return complex(np.sum(0.5 * (integrand[1:] + integrand[:-1]) * dt))
