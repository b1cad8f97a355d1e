# src/flows/trajectory.py

"""
trajectory.py – Complex-Time Rays and Sampled Trajectories (HoloFlow)
----------------------------------------------------------------------
Value types shared by the flow integrators:

  • TimeRay     direction θ and arc length of a path in the complex t-plane
  • FlowStatus  how an integration ended
  • Trajectory  immutable samples (s, t, z, h(z)) plus termination status

Trajectories convert to pandas DataFrames with the export header
"s,t_re,t_im,z_re,z_im,h_re,h_im,status".
"""

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

TRAJECTORY_COLUMNS = ["s", "t_re", "t_im", "z_re", "z_im", "h_re", "h_im", "status"]


@dataclass(frozen=True)
class TimeRay:
    """t = s·e^{iθ}, s ∈ [0, span]. θ=0 is real time, θ=π/2 imaginary time."""

    theta: float = 0.0
    span: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.theta):
            raise ValueError(f"theta must be finite, got {self.theta}")
        if not np.isfinite(self.span) or self.span < 0:
            raise ValueError(f"span must be finite and nonnegative, got {self.span}")

    @property
    def direction(self) -> complex:
        return complex(np.exp(1j * self.theta))

    @classmethod
    def real(cls, span: float) -> "TimeRay":
        return cls(0.0, span)

    @classmethod
    def imaginary(cls, span: float) -> "TimeRay":
        return cls(np.pi / 2, span)


class FlowStatus(str, Enum):
    COMPLETED = "completed"
    ESCAPED = "escaped"
    STIFFNESS_ABORT = "stiffness_abort"
    CRITICAL_POINT = "critical_point"
    CLOSED_ORBIT = "closed_orbit"


@dataclass(frozen=True)
class Trajectory:
    """
    Sampled path of a flow along one ray.

    Attributes:
    -----------
    s : np.ndarray
        Arc-length parameter of every accepted step (s₀ = 0).
    z : np.ndarray
        Complex positions.
    hz : np.ndarray
        h(z) at every sample.
    theta : float
        Ray direction; t = s·e^{iθ}.
    status : FlowStatus
        Termination status.
    t_escape : float, optional
        s at the escape-radius crossing (status ESCAPED).
    period : float, optional
        First-return time (status CLOSED_ORBIT).
    """

    s: np.ndarray
    z: np.ndarray
    hz: np.ndarray
    theta: float = 0.0
    status: FlowStatus = FlowStatus.COMPLETED
    t_escape: Optional[float] = None
    period: Optional[float] = None

    def __post_init__(self):
        for name in ("s", "z", "hz"):
            arr = np.asarray(getattr(self, name)).copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (len(self.s) == len(self.z) == len(self.hz)):
            raise ValueError("s, z and hz must have equal length")

    def __len__(self) -> int:
        return len(self.s)

    @property
    def t(self) -> np.ndarray:
        return self.s * np.exp(1j * self.theta)

    @property
    def final(self) -> complex:
        return complex(self.z[-1])

    @property
    def samples(self):
        """List of (t, z, h(z)) triples."""
        return list(zip(self.t, self.z, self.hz))

    def to_frame(self) -> pd.DataFrame:
        t = self.t
        return pd.DataFrame(
            {
                "s": self.s,
                "t_re": t.real,
                "t_im": t.imag,
                "z_re": self.z.real,
                "z_im": self.z.imag,
                "h_re": self.hz.real,
                "h_im": self.hz.imag,
                "status": self.status.value,
            },
            columns=TRAJECTORY_COLUMNS,
        )

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False, float_format="%.17g")
        return path


def trajectory_to_frame(traj: Trajectory) -> pd.DataFrame:
    return traj.to_frame()
