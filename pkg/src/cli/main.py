# src/cli/main.py

"""
main.py – holoflow Command-Line Entry Point (HoloFlow)
----------------------------------------------------------------------
  holoflow <portrait|surface|orbit-study|verify> [--config FILE] [flags]

Exit codes: 0 success, 1 failed invariant (verify), 2 configuration or
input error, 3 numerical abort with partial outputs retained.
"""

# ───────────────────────────────────────────────────────────────────────────────
# 📦 Imports
# ───────────────────────────────────────────────────────────────────────────────
import argparse
import logging
import os
import sys
from typing import Optional, Sequence

from dotenv import load_dotenv

from src.catalog.zero_table import PROJECT_ROOT
from src.cli.commands import COMMANDS, EXIT_ABORT, EXIT_CONFIG
from src.cli.config import SUITES, build_config, load_config_file, resolve_function
from src.errors import FlowAbort, HoloflowError

logger = logging.getLogger("holoflow.cli")

# argparse destinations that are not RunConfig keys
_NON_CONFIG = {"command", "config", "verbose", "window"}


def configure_logging(verbose: bool = False) -> None:
    load_dotenv(PROJECT_ROOT / ".env", override=False)
    level_name = "DEBUG" if verbose else os.getenv("HOLOFLOW_LOG_LEVEL", "INFO").upper()
    level = getattr(logging, level_name, logging.INFO)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(message)s")
    logging.getLogger("holoflow").setLevel(level)


# ───────────────────────────────────────────────────────────────────────────────
# 🧰 Parser
# ───────────────────────────────────────────────────────────────────────────────
def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    parser.add_argument("--kind", help="cosh | xi-approx | linear | polynomial")
    parser.add_argument("--m", type=int, help="Number of conjugate zero pairs (xi-approx)")
    parser.add_argument("--alpha", type=float, help="Positive scale α (default: auto)")
    parser.add_argument("--zero-table", dest="zero_table", help="Zero table file")
    parser.add_argument("--coeffs", type=float, nargs="+", help="Polynomial coefficients, highest first")
    parser.add_argument("--slope", type=float, help="a for h(z) = a·z")
    parser.add_argument(
        "--window", type=float, nargs=4, metavar=("RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"),
        help="Region of the z-plane",
    )
    parser.add_argument("--density", type=int, help="Seed lattice points per axis")
    parser.add_argument("--rtol", type=float, help="Relative tolerance")
    parser.add_argument("--atol", type=float, help="Absolute tolerance")
    parser.add_argument("--horizon", type=float, help="Maximal integration time for orbit searches")
    parser.add_argument("--output-dir", dest="output_dir", help="Output directory")
    parser.add_argument("--seed", type=int, help="Random seed")
    parser.add_argument("--workers", type=int, help="Worker threads (default HOLOFLOW_THREADS)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="holoflow",
        description="Complex-time holomorphic and Newton flows, ξ-approximating polynomials, "
        "Hamiltonian sensitivities and h-manifold geometry.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    portrait = sub.add_parser("portrait", help="Trajectory CSVs, separatrix overlay and SVG")
    _common(portrait)
    portrait.add_argument("--flow", choices=["holomorphic", "newton", "desingularized"])
    portrait.add_argument("--theta", type=float, help="Time-ray direction θ")
    portrait.add_argument("--span", type=float, help="Integration length per direction")
    portrait.add_argument("--escape-radius", dest="escape_radius", type=float)
    portrait.add_argument("--no-separatrix", dest="separatrix", action="store_false", default=None)

    surface = sub.add_parser("surface", help="Trace the P_m solution surface")
    _common(surface)
    surface.add_argument("--z0", type=complex, help="Anchor, e.g. 2+5j")
    surface.add_argument("--tau1", type=float, nargs=3, metavar=("MIN", "MAX", "N"))
    surface.add_argument("--tau2", type=float, nargs=3, metavar=("MIN", "MAX", "N"))
    surface.add_argument("--max-jump", dest="max_jump", type=float)

    orbit = sub.add_parser("orbit-study", help="Direction twist over one closed orbit")
    _common(orbit)
    orbit.add_argument("--z0", type=complex, help="Point on a closed orbit")
    orbit.add_argument("--p0", type=complex, nargs="+")
    orbit.add_argument("--dz0", type=complex, nargs="+")
    orbit.add_argument("--dp0", type=complex, nargs="+")
    orbit.add_argument("--samples", type=int, help="Samples per orbit")

    verify = sub.add_parser("verify", help="Run invariant suites and write a JSON report")
    _common(verify)
    verify.add_argument("--suite", choices=list(SUITES))
    verify.add_argument("--draws", type=int, help="Random draws per suite")
    verify.add_argument("--z0", type=complex, help="Anchor for the surface cross-check")
    return parser


def flag_values(args: argparse.Namespace) -> dict:
    values = {k: v for k, v in vars(args).items() if k not in _NON_CONFIG and v is not None}
    if args.window is not None:
        values.update(dict(zip(("re_min", "re_max", "im_min", "im_max"), args.window)))
    return values


# ───────────────────────────────────────────────────────────────────────────────
# 🚀 main
# ───────────────────────────────────────────────────────────────────────────────
def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)

    try:
        file_values = load_config_file(args.config) if args.config else {}
        config = build_config(file_values, flag_values(args))
        resolved = resolve_function(config)
    except (HoloflowError, ValueError, FileNotFoundError) as exc:
        logger.error(f"❌ {exc}")
        return EXIT_CONFIG

    logger.info(f"🚀 holoflow {args.command}: {resolved.h.label} → {config.output_dir}")
    try:
        return COMMANDS[args.command](config, resolved)
    except (FlowAbort, RuntimeError, ArithmeticError) as exc:
        logger.error(f"❌ numerical abort: {exc}")
        return EXIT_ABORT
    except (HoloflowError, ValueError) as exc:
        logger.error(f"❌ {exc}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
