# src/cli/exporters.py

"""
exporters.py – File Writers for holoflow Runs (HoloFlow)
----------------------------------------------------------------------
All numeric output goes through pandas with 17 significant digits, and
JSON is written with sorted keys, so identical runs produce identical
CSV/JSON bytes. The SVG quick-look is a convenience rendering of the
emitted polylines only.
"""

# ───────────────────────────────────────────────────────────────────────────────
# 📦 Imports
# ───────────────────────────────────────────────────────────────────────────────
import json
import logging
from pathlib import Path
from typing import Iterable, Optional, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

logger = logging.getLogger("holoflow.cli")

FLOAT_FORMAT = "%.17g"
METADATA_FILE = "run_metadata.json"


def _json_default(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"cannot serialise {type(value)}")


def write_json(payload, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n",
        encoding="utf-8",
    )
    logger.info(f"💾 Wrote {path}")
    return path


def write_frame(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.debug(f"💾 Wrote {path} ({len(frame)} rows)")
    return path


def write_metadata(out_dir: Union[str, Path], command: str, config: dict, function: dict) -> Path:
    """run_metadata.json: config echo, resolved function, library versions."""
    payload = {
        "command": command,
        "config": config,
        "function": function,
        "versions": {"numpy": np.__version__, "pandas": pd.__version__},
    }
    return write_json(payload, Path(out_dir) / METADATA_FILE)


def render_polylines_svg(
    polylines: Iterable[np.ndarray],
    path: Union[str, Path],
    title: str = "",
    window: Optional[tuple] = None,
    markers: Optional[np.ndarray] = None,
) -> Path:
    """
    Quick-look SVG of complex polylines.

    Parameters:
    -----------
    polylines : iterable of complex arrays
        One curve per entry; NaN entries break the line.
    window : (re_min, re_max, im_min, im_max), optional
        Axis limits.
    markers : complex array, optional
        Points drawn on top (e.g. separatrix seeds).
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 8))
    for line in polylines:
        line = np.asarray(line, dtype=complex)
        ax.plot(line.real, line.imag, linewidth=0.6, color="tab:blue")
    if markers is not None and len(markers):
        markers = np.asarray(markers, dtype=complex)
        ax.plot(markers.real, markers.imag, "o", markersize=2.5, color="tab:red")
    if window is not None:
        ax.set_xlim(window[0], window[1])
        ax.set_ylim(window[2], window[3])
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    ax.set_title(title)
    ax.grid(True, linestyle="--", alpha=0.5)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info(f"🖼️ Wrote {path}")
    return path
