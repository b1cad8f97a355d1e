# src/hamiltonian/orbit_twist.py

"""
orbit_twist.py – Direction Twist of Sensitivities Along Closed Orbits (HoloFlow)
----------------------------------------------------------------------
Propagates several initial choices of Δz₀, p₀ and Δp₀ over one period
of a closed real-time orbit and summarises how their directions turn.

Core responsibilities:
  • Detects the orbit period through z₀
  • Integrates (z, p, Δz, Δp) on a common grid of sample times
  • Unwrapped phase series of Δz, p and Δp per initial-value choice
  • Winding of Δz and p, constancy of angle gaps, counter-rotation of
    Δz against p, variation of the Δp angle gap
  • Tangent / normal invariance flags of Δz relative to the flow
"""

# ───────────────────────────────────────────────────────────────────────────────
# 📦 Imports
# ───────────────────────────────────────────────────────────────────────────────
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.catalog.holo_function import HoloFunction
from src.flows.flow_engine import DEFAULT_HORIZON, ORBIT_TOL, detect_closed_orbit
from src.flows.integrator import Tolerance
from src.flows.trajectory import TimeRay
from src.hamiltonian.bundle_integrator import BundleTrajectory, integrate_hamiltonian
from src.hamiltonian.closed_forms import SensitivityBundle

logger = logging.getLogger("holoflow.hamiltonian")

FLAG_TOL = 1e-6


def unwrapped_phase(values: np.ndarray) -> np.ndarray:
    return np.unwrap(np.angle(np.asarray(values, dtype=complex)))


def _variation(series: np.ndarray) -> float:
    return float(np.max(series) - np.min(series)) if len(series) else 0.0


@dataclass
class TwistSummary:
    period: float
    dz_winding: List[float] = field(default_factory=list)
    p_winding: List[float] = field(default_factory=list)
    dz_gap_variation: float = 0.0
    p_gap_variation: float = 0.0
    counter_rotation_variation: float = 0.0
    dp_gap_variation: float = 0.0
    tangential: List[bool] = field(default_factory=list)
    normal: List[bool] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


# ───────────────────────────────────────────────────────────────────────────────
# 🧠 Class: OrbitTwistStudy
# ───────────────────────────────────────────────────────────────────────────────
class OrbitTwistStudy:
    """
    Runs the three families of initial-value choices over one orbit.

    Attributes:
    -----------
    h : HoloFunction
        The flow generator.
    z0 : complex
        Point on a closed orbit.
    p0_values, dz0_values, dp0_values : sequences of complex
        Each family varies one initial value; the others take the first
        entry of their own list.
    samples : int
        Number of common sample times over the period.
    """

    def __init__(
        self,
        h: HoloFunction,
        z0: complex,
        p0_values: Sequence[complex] = (1.0,),
        dz0_values: Optional[Sequence[complex]] = None,
        dp0_values: Sequence[complex] = (1.0,),
        samples: int = 512,
        tol: Tolerance = ORBIT_TOL,
        period: Optional[float] = None,
        horizon: float = DEFAULT_HORIZON,
    ):
        if not isinstance(h, HoloFunction):
            raise TypeError(f"h must be a HoloFunction, got {type(h)}")
        if samples < 8:
            raise ValueError("samples must be at least 8")
        self.h = h
        self.z0 = complex(z0)
        h0 = h(self.z0)
        self.p0_values = [complex(v) for v in p0_values]
        # Default pair: tangential and normal to the orbit
        self.dz0_values = (
            [complex(v) for v in dz0_values] if dz0_values else [h0, 1j * h0]
        )
        self.dp0_values = [complex(v) for v in dp0_values]
        if not (self.p0_values and self.dp0_values):
            raise ValueError("p0_values and dp0_values must be nonempty")
        self.samples = samples
        self.tol = tol
        self.period = period
        self.horizon = horizon
        self.runs: Dict[Tuple[str, int], BundleTrajectory] = {}

    def _integrate(self, p0: complex, dz0: complex, dp0: complex) -> BundleTrajectory:
        bundle0 = SensitivityBundle.initial(self.z0, p0, dz0, dp0)
        return integrate_hamiltonian(
            self.h, bundle0, TimeRay(0.0, self.period), self.tol, samples=self.samples
        )

    def run(self) -> TwistSummary:
        """
        Integrate every choice over one period and summarise.

        Raises:
        -------
        NoReturn
            If z₀ does not lie on a closed orbit.
        """
        if self.period is None:
            self.period = detect_closed_orbit(self.h, self.z0, self.tol, self.horizon)
        logger.info(f"🔁 Orbit through {self.z0}: period {self.period:.12g}")

        p0, dz0, dp0 = self.p0_values[0], self.dz0_values[0], self.dp0_values[0]
        for i, v in enumerate(self.dz0_values):
            self.runs[("dz0", i)] = self._integrate(p0, v, dp0)
        for i, v in enumerate(self.p0_values):
            self.runs[("p0", i)] = self._integrate(v, dz0, dp0)
        for i, v in enumerate(self.dp0_values):
            self.runs[("dp0", i)] = self._integrate(p0, dz0, v)
        return self.summarise()

    def summarise(self) -> TwistSummary:
        summary = TwistSummary(period=float(self.period))
        dz_runs = [self.runs[("dz0", i)] for i in range(len(self.dz0_values))]
        p_runs = [self.runs[("p0", i)] for i in range(len(self.p0_values))]
        dp_runs = [self.runs[("dp0", i)] for i in range(len(self.dp0_values))]

        for run in dz_runs:
            arg_dz = unwrapped_phase(run.dz)
            summary.dz_winding.append(float(arg_dz[-1] - arg_dz[0]))
            relative = np.angle(run.dz / run.hz)
            summary.tangential.append(bool(np.max(np.abs(relative)) <= FLAG_TOL))
            summary.normal.append(bool(np.max(np.abs(np.abs(relative) - np.pi / 2)) <= FLAG_TOL))
        for run in p_runs:
            arg_p = unwrapped_phase(run.p)
            summary.p_winding.append(float(arg_p[-1] - arg_p[0]))

        if len(dz_runs) > 1:
            gap = unwrapped_phase(dz_runs[1].dz) - unwrapped_phase(dz_runs[0].dz)
            summary.dz_gap_variation = _variation(gap)
        if len(p_runs) > 1:
            gap = unwrapped_phase(p_runs[1].p) - unwrapped_phase(p_runs[0].p)
            summary.p_gap_variation = _variation(gap)
        if len(dp_runs) > 1:
            gap = unwrapped_phase(dp_runs[1].dp) - unwrapped_phase(dp_runs[0].dp)
            summary.dp_gap_variation = _variation(gap)

        base = dz_runs[0]
        summary.counter_rotation_variation = _variation(
            unwrapped_phase(base.dz) + unwrapped_phase(base.p)
        )
        return summary

    def direction_frames(self) -> Dict[str, pd.DataFrame]:
        """Normalised Δz, p, Δp directions and unwrapped phases per run."""
        frames = {}
        for (family, index), run in self.runs.items():
            def unit(v):
                mag = np.abs(v)
                return np.where(mag > 0, v / np.where(mag > 0, mag, 1.0), 0.0)

            dz_u, p_u, dp_u = unit(run.dz), unit(run.p), unit(run.dp)
            frames[f"{family}_{index}"] = pd.DataFrame(
                {
                    "s": run.s,
                    "z_re": run.z.real, "z_im": run.z.imag,
                    "dz_dir_re": dz_u.real, "dz_dir_im": dz_u.imag,
                    "p_dir_re": p_u.real, "p_dir_im": p_u.imag,
                    "dp_dir_re": dp_u.real, "dp_dir_im": dp_u.imag,
                    "arg_dz": unwrapped_phase(run.dz),
                    "arg_p": unwrapped_phase(run.p),
                    "arg_dp": unwrapped_phase(run.dp),
                }
            )
        return frames
