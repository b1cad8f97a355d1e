# src/cli/commands.py

"""
commands.py – holoflow Subcommands (HoloFlow)
----------------------------------------------------------------------
Each command takes a validated `RunConfig` plus the resolved function,
writes its artifacts below `config.output_dir`, and returns an exit code:

  0  success
  1  verification failure (verify only)
  3  numerical abort; partial outputs are kept on disk

Configuration errors (exit 2) are raised before a command starts.
Work over seeds runs on a thread pool capped by `config.workers`; files
are written afterwards by the calling thread in seed order.
"""

# ───────────────────────────────────────────────────────────────────────────────
# 📦 Imports
# ───────────────────────────────────────────────────────────────────────────────
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from src.cli.config import ResolvedFunction, RunConfig
from src.cli.exporters import render_polylines_svg, write_frame, write_json, write_metadata
from src.cli.verify_suites import run_verification
from src.errors import (
    ConfigError,
    ContinuationBreak,
    FlowAbort,
    HoloflowError,
    Inconclusive,
    NoReturn,
)
from src.flows.flow_engine import ORBIT_TOL, FlowKind, integrate_flow
from src.flows.separatrix import SeparatrixReport, classify_separatrix
from src.flows.trajectory import TimeRay, Trajectory
from src.hamiltonian.orbit_twist import OrbitTwistStudy
from src.surface.surface_tracer import (
    ContinuationOptions,
    TimeLattice,
    trace_surface,
    verify_constant_phase,
)

logger = logging.getLogger("holoflow.cli")

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_ABORT = 3

SEPARATRIX_COLUMNS = [
    "seed", "z_re", "z_im", "positive", "negative", "t_escape_pos", "t_escape_neg",
    "closed_orbit", "period", "forward", "backward",
]
SEED_COLUMNS = ["seed", "z_re", "z_im", "file", "forward_status", "backward_status", "aborted"]


# ───────────────────────────────────────────────────────────────────────────────
# 🌀 portrait
# ───────────────────────────────────────────────────────────────────────────────
@dataclass
class SeedResult:
    index: int
    z0: complex
    forward: Trajectory
    backward: Trajectory
    aborted: bool
    separatrix: Optional[SeparatrixReport] = None
    separatrix_note: str = ""

    def frame(self) -> pd.DataFrame:
        back = self.backward.to_frame().iloc[::-1].iloc[:-1].copy()
        back["s"] = -back["s"]
        return pd.concat([back, self.forward.to_frame()], ignore_index=True)

    def polyline(self) -> np.ndarray:
        return np.concatenate([self.backward.z[::-1], self.forward.z[1:]])


def seed_points(config: RunConfig) -> np.ndarray:
    """Explicit seeds, or a density × density lattice over the window."""
    if config.seeds:
        return np.array([complex(re, im) for re, im in config.seeds])
    re = np.linspace(config.re_min, config.re_max, config.density)
    im = np.linspace(config.im_min, config.im_max, config.density)
    return (re[None, :] + 1j * im[:, None]).ravel()


def portrait_escape_radius(config: RunConfig, z0: complex) -> float:
    if config.escape_radius is not None:
        return max(float(config.escape_radius), 2.0 * (1.0 + abs(z0)))
    corners = [complex(r, i) for r in config.re_range for i in config.im_range]
    return max(4.0 * (1.0 + max(abs(c) for c in corners)), 2.0 * (1.0 + abs(z0)))


def _half_trajectory(h, z0, ray, config) -> Tuple[Trajectory, bool]:
    try:
        traj = integrate_flow(
            h, z0, ray, FlowKind(config.flow), config.tolerance,
            escape_radius=portrait_escape_radius(config, z0),
        )
        return traj, False
    except FlowAbort as exc:
        return exc.partial, True


def _portrait_seed(h, index: int, z0: complex, config: RunConfig) -> SeedResult:
    forward, f_abort = _half_trajectory(h, z0, TimeRay(config.theta, config.span), config)
    backward, b_abort = _half_trajectory(h, z0, TimeRay(config.theta + np.pi, config.span), config)
    result = SeedResult(index, z0, forward, backward, f_abort or b_abort)

    if config.separatrix and FlowKind(config.flow) is FlowKind.HOLOMORPHIC:
        try:
            result.separatrix = classify_separatrix(
                h, z0, horizon=config.horizon, tol=config.tolerance
            )
        except Inconclusive as exc:
            result.separatrix = exc.report
            result.separatrix_note = f"inconclusive ({exc.direction})"
        except HoloflowError as exc:
            result.separatrix_note = f"error: {exc}"
    return result


def _separatrix_row(result: SeedResult) -> tuple:
    rep = result.separatrix
    z = result.z0
    if rep is None:
        return (result.index, z.real, z.imag, False, False, np.nan, np.nan, False, np.nan,
                result.separatrix_note or "n/a", result.separatrix_note or "n/a")
    return (
        result.index, z.real, z.imag, rep.positive, rep.negative,
        rep.t_escape_pos if rep.t_escape_pos is not None else np.nan,
        rep.t_escape_neg if rep.t_escape_neg is not None else np.nan,
        rep.closed_orbit,
        rep.period if rep.period is not None else np.nan,
        rep.forward.outcome.value, rep.backward.outcome.value,
    )


def cmd_portrait(config: RunConfig, resolved: ResolvedFunction) -> int:
    """Per-seed trajectory CSVs, separatrix overlay CSV and an SVG quick-look."""
    h = resolved.h
    out = config.out_path / "portrait"
    seeds = seed_points(config)
    logger.info(f"🌀 portrait: {len(seeds)} seeds, {config.flow} flow of {h.label}")

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        results: List[SeedResult] = list(
            pool.map(lambda item: _portrait_seed(h, item[0], item[1], config), enumerate(seeds))
        )

    index_rows = []
    for res in results:
        name = f"trajectories/seed_{res.index:04d}.csv"
        write_frame(res.frame(), out / name)
        index_rows.append(
            (res.index, res.z0.real, res.z0.imag, name,
             res.forward.status.value, res.backward.status.value, res.aborted)
        )
    write_frame(pd.DataFrame(index_rows, columns=SEED_COLUMNS), out / "seeds.csv")

    separatrix_seeds = []
    if config.separatrix and FlowKind(config.flow) is FlowKind.HOLOMORPHIC:
        overlay = pd.DataFrame([_separatrix_row(r) for r in results], columns=SEPARATRIX_COLUMNS)
        write_frame(overlay, out / "separatrix_overlay.csv")
        flagged = overlay["positive"] | overlay["negative"]
        separatrix_seeds = (overlay.loc[flagged, "z_re"] + 1j * overlay.loc[flagged, "z_im"]).to_numpy()

    render_polylines_svg(
        [r.polyline() for r in results],
        out / "portrait.svg",
        title=f"{config.flow} flow, {h.label}",
        window=(config.re_min, config.re_max, config.im_min, config.im_max),
        markers=separatrix_seeds,
    )
    write_metadata(config.out_path, "portrait", config.to_dict(), resolved.metadata())

    aborted = sum(r.aborted for r in results)
    if aborted:
        logger.warning(f"⚠️ {aborted}/{len(results)} seeds aborted; partial trajectories kept")
        return EXIT_ABORT
    logger.info(f"✅ portrait complete → {out}")
    return EXIT_OK


# ───────────────────────────────────────────────────────────────────────────────
# 🗺️ surface
# ───────────────────────────────────────────────────────────────────────────────
def cmd_surface(config: RunConfig, resolved: ResolvedFunction) -> int:
    """SurfaceGrid JSON, branch-event CSV and constant-phase summary."""
    if resolved.table is None:
        raise ConfigError("❌ surface needs kind xi-approx (P_m is built from the zero table)")
    out = config.out_path / "surface"
    tau1, tau2 = config.lattice_axes()
    lattice = TimeLattice(tuple(tau1), tuple(tau2))
    opts = ContinuationOptions(max_jump=config.max_jump, workers=config.workers)
    logger.info(f"🗺️ surface: m={config.m}, z0={config.z0}, lattice {lattice.shape}")

    status, code = "complete", EXIT_OK
    try:
        grid = trace_surface(resolved.table, config.m, config.z0, lattice, opts)
    except ContinuationBreak as exc:
        grid = exc.partial_grid
        status, code = f"continuation break at node {exc.node}", EXIT_ABORT

    grid.to_json(out / "surface_grid.json")
    write_frame(grid.branch_frame(), out / "branch_events.csv")
    write_json(
        {
            "status": status,
            "n_sheets": grid.n_sheets,
            "lattice_shape": list(lattice.shape),
            "missing_nodes": int(np.count_nonzero(~np.isfinite(grid.sheets))),
            "branch_events": len(grid.branch_events),
            "constant_phase_residual": verify_constant_phase(grid),
        },
        out / "surface_summary.json",
    )
    write_metadata(config.out_path, "surface", config.to_dict(), resolved.metadata())
    if code == EXIT_ABORT:
        logger.warning(f"⚠️ surface {status}; partial grid kept")
    return code


# ───────────────────────────────────────────────────────────────────────────────
# 🔁 orbit-study
# ───────────────────────────────────────────────────────────────────────────────
def cmd_orbit_study(config: RunConfig, resolved: ResolvedFunction) -> int:
    """Direction fields, phase series and twist summary over one closed orbit."""
    out = config.out_path / "orbit_study"
    study = OrbitTwistStudy(
        resolved.h,
        config.z0,
        p0_values=config.p0,
        dz0_values=config.dz0 or None,
        dp0_values=config.dp0,
        samples=config.samples,
        tol=ORBIT_TOL,
        horizon=config.horizon,
    )
    write_metadata(config.out_path, "orbit-study", config.to_dict(), resolved.metadata())
    try:
        summary = study.run()
    except (NoReturn, FlowAbort) as exc:
        logger.warning(f"⚠️ orbit study aborted: {exc}")
        return EXIT_ABORT

    for name, frame in study.direction_frames().items():
        write_frame(frame, out / f"directions_{name}.csv")
    for (family, index), run in study.runs.items():
        run.to_csv(out / f"bundle_{family}_{index}.csv")
    write_json(summary.to_dict(), out / "twist_summary.json")
    logger.info(f"✅ orbit study: period {summary.period:.10g} → {out}")
    return EXIT_OK


# ───────────────────────────────────────────────────────────────────────────────
# ✅ verify
# ───────────────────────────────────────────────────────────────────────────────
def cmd_verify(config: RunConfig, resolved: ResolvedFunction) -> int:
    """Run invariant suites, write verify_report.json, exit 0 iff all pass."""
    report = run_verification(config, resolved)
    write_json(report, config.out_path / "verify_report.json")
    write_metadata(config.out_path, "verify", config.to_dict(), resolved.metadata())
    failed = [c for c in report["checks"] if not c["pass"]]
    for check in failed:
        logger.warning(f"❌ {check['suite']}/{check['quantity']}: {check['value']:.3e} > {check['tolerance']:.3e}")
    if failed:
        return EXIT_VERIFY_FAILED
    logger.info(f"✅ verify: {len(report['checks'])} checks passed")
    return EXIT_OK


COMMANDS = {
    "portrait": cmd_portrait,
    "surface": cmd_surface,
    "orbit-study": cmd_orbit_study,
    "verify": cmd_verify,
}
