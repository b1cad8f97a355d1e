# src/surface/surface_tracer.py

"""
surface_tracer.py – Riemann Solution Surface Tracer (HoloFlow)
----------------------------------------------------------------------
Solves P_m(z; T, z₀) = 0 at every node T = τ₁ + iτ₂ of a rectangular
complex-time lattice and links the 2m roots into sheets by continuation.

Core responsibilities:
  • Root solving per node (optionally in a thread pool)
  • Greedy nearest-root matching along lattice edges (ties → smallest index)
  • One bisection of an edge whose jump exceeds max_jump, then ContinuationBreak
  • Branch events where a matched step passes near a critical point of P_m
  • SurfaceGrid JSON export / import and the branch-event table
  • Constant-phase residual check over a traced grid

Traversal: from the node with the smallest |T| along its τ₁ row, then
along every τ₂ column. Sheet 0 is the sheet through z₀ at T = 0.
"""

# ───────────────────────────────────────────────────────────────────────────────
# 📦 Imports
# ───────────────────────────────────────────────────────────────────────────────
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from src.catalog.zero_table import ZeroTable
from src.errors import ContinuationBreak
from src.surface.pm_polynomial import PmPolynomial
from src.surface.root_solver import roots_of_Pm

logger = logging.getLogger("holoflow.surface")

BRANCH_EVENT_COLUMNS = ["T_re", "T_im", "z_re", "z_im", "dP_abs", "sheet"]


# ───────────────────────────────────────────────────────────────────────────────
# 🧾 Value types
# ───────────────────────────────────────────────────────────────────────────────
@dataclass(frozen=True)
class TimeLattice:
    """Nodes T[j, k] = tau1[j] + i·tau2[k]."""

    tau1: Tuple[float, ...]
    tau2: Tuple[float, ...]

    def __post_init__(self):
        tau1 = tuple(float(v) for v in np.atleast_1d(self.tau1))
        tau2 = tuple(float(v) for v in np.atleast_1d(self.tau2))
        if not tau1 or not tau2:
            raise ValueError("lattice needs at least one τ₁ and one τ₂ value")
        object.__setattr__(self, "tau1", tau1)
        object.__setattr__(self, "tau2", tau2)

    @classmethod
    def single(cls, T: complex = 0j) -> "TimeLattice":
        return cls((complex(T).real,), (complex(T).imag,))

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.tau1), len(self.tau2)

    @property
    def nodes(self) -> np.ndarray:
        return np.asarray(self.tau1)[:, None] + 1j * np.asarray(self.tau2)[None, :]


@dataclass(frozen=True)
class ContinuationOptions:
    max_jump: float = 5.0
    branch_eps_factor: float = 1e-4
    refine: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.max_jump <= 0:
            raise ValueError("max_jump must be positive")
        if self.workers < 1:
            raise ValueError("workers must be ≥ 1")


@dataclass(frozen=True)
class BranchEvent:
    T: complex
    z: complex
    dP_abs: float
    sheet: int


@dataclass
class SurfaceGrid:
    """
    Traced solution surface.

    Attributes:
    -----------
    z0 : complex
    zeros : np.ndarray
        The 2m symmetric zeros the polynomial was built from.
    lattice : TimeLattice
    sheets : np.ndarray
        Complex array (2m, n₁, n₂); NaN at nodes never reached.
    branch_events : list of BranchEvent
    """

    z0: complex
    zeros: np.ndarray
    lattice: TimeLattice
    sheets: np.ndarray
    branch_events: List[BranchEvent] = field(default_factory=list)

    @property
    def m(self) -> int:
        return len(self.zeros) // 2

    @property
    def n_sheets(self) -> int:
        return self.sheets.shape[0]

    def sheet(self, index: int = 0) -> np.ndarray:
        return self.sheets[index]

    # ───────────────────────────────────────────────────────────────────────
    # Export
    # ───────────────────────────────────────────────────────────────────────
    @staticmethod
    def _pair(value: complex):
        value = complex(value)
        if not np.isfinite(value):
            return None
        return [value.real, value.imag]

    def to_dict(self) -> dict:
        return {
            "z0": self._pair(self.z0),
            "m": self.m,
            "zeros": [self._pair(r) for r in self.zeros],
            "lattice": {"tau1": list(self.lattice.tau1), "tau2": list(self.lattice.tau2)},
            "sheets": [
                [[self._pair(v) for v in row] for row in sheet] for sheet in self.sheets
            ],
            "branch_events": [
                {
                    "T": self._pair(ev.T),
                    "z": self._pair(ev.z),
                    "dP_abs": ev.dP_abs,
                    "sheet": ev.sheet,
                }
                for ev in self.branch_events
            ],
        }

    def to_json(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        # repr-exact floats keep full double precision
        path.write_text(json.dumps(self.to_dict(), indent=1), encoding="utf-8")
        return path

    @classmethod
    def from_dict(cls, data: dict) -> "SurfaceGrid":
        def unpair(v):
            return complex(v[0], v[1]) if v is not None else complex(np.nan, np.nan)

        sheets = np.array(
            [[[unpair(v) for v in row] for row in sheet] for sheet in data["sheets"]],
            dtype=complex,
        )
        lattice = TimeLattice(tuple(data["lattice"]["tau1"]), tuple(data["lattice"]["tau2"]))
        if sheets.size == 0:
            sheets = np.zeros((0,) + lattice.shape, dtype=complex)
        return cls(
            z0=unpair(data["z0"]),
            zeros=np.array([unpair(v) for v in data.get("zeros", [])], dtype=complex),
            lattice=lattice,
            sheets=sheets,
            branch_events=[
                BranchEvent(unpair(e["T"]), unpair(e["z"]), float(e["dP_abs"]), int(e["sheet"]))
                for e in data.get("branch_events", [])
            ],
        )

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "SurfaceGrid":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def branch_frame(self) -> pd.DataFrame:
        rows = [
            (ev.T.real, ev.T.imag, ev.z.real, ev.z.imag, ev.dP_abs, ev.sheet)
            for ev in self.branch_events
        ]
        return pd.DataFrame(rows, columns=BRANCH_EVENT_COLUMNS)


# ───────────────────────────────────────────────────────────────────────────────
# 🔗 Matching and branch detection
# ───────────────────────────────────────────────────────────────────────────────
def match_roots(previous: np.ndarray, candidates: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    Assign each previous sheet value to a distinct candidate root.

    Pairs are taken globally in order of increasing distance; equal
    distances go to the smaller sheet index, then the smaller root index.

    Returns:
    --------
    (matched, max_jump)
    """
    n = previous.size
    dist = np.abs(previous[:, None] - candidates[None, :])
    order = sorted(
        ((dist[i, j], i, j) for i in range(n) for j in range(n)),
        key=lambda item: (item[0], item[1], item[2]),
    )
    matched = np.empty(n, dtype=complex)
    used_sheet = np.zeros(n, dtype=bool)
    used_root = np.zeros(n, dtype=bool)
    jump = 0.0
    assigned = 0
    for d, i, j in order:
        if used_sheet[i] or used_root[j]:
            continue
        matched[i] = candidates[j]
        used_sheet[i] = used_root[j] = True
        jump = max(jump, float(d))
        assigned += 1
        if assigned == n:
            break
    return matched, jump


def critical_points(zeros: np.ndarray) -> np.ndarray:
    """Zeros of d/dz ∏(z − ρₙ); they do not depend on T or z₀."""
    if zeros.size < 2:
        return np.array([], dtype=complex)
    return np.roots(np.polyder(np.poly(zeros))).astype(complex)


def _segment_distance(a: complex, b: complex, c: complex) -> Tuple[float, complex]:
    ab = b - a
    denom = abs(ab) ** 2
    u = 0.0 if denom == 0 else min(1.0, max(0.0, ((c - a) * np.conj(ab)).real / denom))
    closest = a + u * ab
    return abs(c - closest), closest


class _Tracer:
    """Per-call continuation state (roots cache, branch events)."""

    def __init__(self, zeros: np.ndarray, z0: complex, opts: ContinuationOptions):
        self.base = PmPolynomial(zeros, z0)
        self.opts = opts
        self.cache: Dict[complex, np.ndarray] = {}
        self.events: List[BranchEvent] = []
        crit = critical_points(self.base.zeros)
        self.crit = crit
        self.crit_eps = np.array(
            [opts.branch_eps_factor * float(np.min(np.abs(c - self.base.zeros))) for c in crit]
        )

    def roots(self, T: complex) -> np.ndarray:
        T = complex(T)
        if T not in self.cache:
            self.cache[T] = roots_of_Pm(self.base.with_T(T))
        return self.cache[T]

    def prefetch(self, nodes: Sequence[complex]) -> None:
        todo = [complex(T) for T in nodes if complex(T) not in self.cache]
        if self.opts.workers > 1 and len(todo) > 1:
            with ThreadPoolExecutor(max_workers=self.opts.workers) as pool:
                for T, r in zip(todo, pool.map(lambda t: roots_of_Pm(self.base.with_T(t)), todo)):
                    self.cache[T] = r
        else:
            for T in todo:
                self.roots(T)

    def _record_branches(self, T: complex, before: np.ndarray, after: np.ndarray) -> None:
        for sheet, (a, b) in enumerate(zip(before, after)):
            for c, eps in zip(self.crit, self.crit_eps):
                dist, closest = _segment_distance(a, b, c)
                if dist <= eps:
                    dP = float(abs(self.base.with_T(T).derivative(closest)))
                    self.events.append(BranchEvent(complex(T), complex(c), dP, sheet))
                    logger.debug(f"Branch event near z={c} at T={T} (sheet {sheet})")

    def advance(self, before: np.ndarray, T_from: complex, T_to: complex, node, depth=0):
        matched, jump = match_roots(before, self.roots(T_to))
        if jump > self.opts.max_jump:
            if self.opts.refine and depth == 0:
                T_mid = 0.5 * (T_from + T_to)
                middle = self.advance(before, T_from, T_mid, node, depth=1)
                return self.advance(middle, T_mid, T_to, node, depth=1)
            raise ContinuationBreak(node, jump, self.opts.max_jump)
        self._record_branches(T_to, before, matched)
        return matched


def _walk_to(tracer: _Tracer, start: np.ndarray, T_target: complex) -> np.ndarray:
    """Continue the T = 0 sheets along a straight segment to T_target."""
    if T_target == 0:
        return start
    pieces = max(1, int(np.ceil(abs(T_target) / 0.25)))
    current, T_prev = start, 0j
    for step in range(1, pieces + 1):
        T_next = T_target * step / pieces
        current = tracer.advance(current, T_prev, T_next, ("approach", step))
        T_prev = T_next
    return current


# ───────────────────────────────────────────────────────────────────────────────
# 🧭 Public operations
# ───────────────────────────────────────────────────────────────────────────────
def trace_surface(
    zeros: ZeroTable,
    m: int,
    z0: complex,
    lattice: TimeLattice,
    opts: Optional[ContinuationOptions] = None,
) -> SurfaceGrid:
    """
    Solve P_m(z; T, z₀) = 0 over the lattice and link roots into sheets.

    Raises:
    -------
    DegenerateAnchor
        If z₀ coincides with one of the zeros.
    ContinuationBreak
        If a jump exceeds max_jump after one edge bisection;
        `exc.partial_grid` holds the nodes traced so far.
    """
    if not isinstance(zeros, ZeroTable):
        raise TypeError(f"zeros must be a ZeroTable, got {type(zeros)}")
    if not isinstance(lattice, TimeLattice):
        raise TypeError(f"lattice must be a TimeLattice, got {type(lattice)}")
    opts = opts or ContinuationOptions()
    rho = zeros.symmetric_zeros(m)
    z0 = complex(z0)
    tracer = _Tracer(rho, z0, opts)

    n1, n2 = lattice.shape
    nodes = lattice.nodes
    sheets = np.full((rho.size, n1, n2), np.nan + 1j * np.nan)
    grid = SurfaceGrid(z0, rho, lattice, sheets, tracer.events)

    # Sheets at T = 0: the anchor first, the rest in sorted order
    at_zero = tracer.roots(0j)
    anchor = int(np.argmin(np.abs(at_zero - z0)))
    initial = np.concatenate([[at_zero[anchor]], np.delete(at_zero, anchor)])

    j0, k0 = np.unravel_index(int(np.argmin(np.abs(nodes))), nodes.shape)
    tracer.prefetch(nodes.ravel())

    try:
        start = _walk_to(tracer, initial, nodes[j0, k0])
        sheets[:, j0, k0] = start
        # τ₁ row through the start node
        for span in (range(j0 + 1, n1), range(j0 - 1, -1, -1)):
            current, j_prev = start, j0
            for j in span:
                current = tracer.advance(current, nodes[j_prev, k0], nodes[j, k0], (j, k0))
                sheets[:, j, k0] = current
                j_prev = j
        # τ₂ columns from the row
        for j in range(n1):
            for span in (range(k0 + 1, n2), range(k0 - 1, -1, -1)):
                current, k_prev = sheets[:, j, k0], k0
                for k in span:
                    current = tracer.advance(current, nodes[j, k_prev], nodes[j, k], (j, k))
                    sheets[:, j, k] = current
                    k_prev = k
    except ContinuationBreak as exc:
        exc.partial_grid = grid
        logger.warning(f"⚠️ Continuation break at node {exc.node}: jump {exc.jump:.3e}")
        raise

    logger.debug(
        f"Traced {rho.size} sheets over {n1}×{n2} lattice, "
        f"{len(tracer.events)} branch events"
    )
    return grid


def verify_constant_phase(grid: SurfaceGrid) -> float:
    """
    max over stored (T, z) of |∏((z−ρₙ)/(z₀−ρₙ)) − e^{−T}| / |e^{−T}|.

    Evaluated as |expm1(L + T)| with L the log-product, which is the same
    ratio without forming e^{−T}. Empty grids give 0.
    """
    if grid.sheets.size == 0 or grid.zeros.size == 0:
        return 0.0
    base = PmPolynomial(grid.zeros, grid.z0)
    T = np.broadcast_to(grid.lattice.nodes, grid.sheets.shape)
    mask = np.isfinite(grid.sheets)
    if not np.any(mask):
        return 0.0
    L = base.log_ratio(grid.sheets[mask])
    with np.errstate(over="ignore", invalid="ignore"):
        rel = np.abs(np.expm1(L + T[mask]))
    return float(np.max(rel))
