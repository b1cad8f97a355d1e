# src/catalog/zero_table.py

"""
zero_table.py – Critical-Line Zero Table Loader (HoloFlow)
----------------------------------------------------------------------
Reads plain-text tables of zero ordinates γ₁ < γ₂ < … (one decimal per
line, '#' comments allowed) into an immutable `ZeroTable`.

Core responsibilities:
  • Validates file existence and UTF-8 text structure
  • Parses fixed or scientific decimal notation line by line
  • Rejects non-positive or non-increasing entries with the offending line
  • Reconstructs the symmetric zero set ρₙ = 1/2 + iγₙ and its conjugates

Environment:
  HOLOFLOW_ZERO_TABLE overrides the bundled default table.
"""

# ───────────────────────────────────────────────────────────────────────────────
# 📦 Standard Library Imports
# ───────────────────────────────────────────────────────────────────────────────
import os  # environment lookup
import logging  # module logger
import re  # decimal token pattern
from dataclasses import dataclass  # immutable record
from pathlib import Path  # filesystem paths
from typing import Optional, Union

# ───────────────────────────────────────────────────────────────────────────────
# 📦 Third-Party Imports
# ───────────────────────────────────────────────────────────────────────────────
import numpy as np  # ordinate storage
from dotenv import load_dotenv  # .env support for the default table path

# ───────────────────────────────────────────────────────────────────────────────
# 📦 Local Imports
# ───────────────────────────────────────────────────────────────────────────────
from src.errors import InsufficientZeros, MonotonicityError, ParseError

logger = logging.getLogger("holoflow.catalog")

PROJECT_ROOT = Path(__file__).resolve().parents[2]
DEFAULT_TABLE_PATH = PROJECT_ROOT / "data" / "zeros" / "zeta_zeros_first50.txt"

# Plain or scientific decimal; rejects "1_4.13", "nan", "inf", hex floats
DECIMAL_PATTERN = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")


# ───────────────────────────────────────────────────────────────────────────────
# 🧾 ZeroTable – ordered ordinates of critical-line zeros
# ───────────────────────────────────────────────────────────────────────────────
@dataclass(frozen=True)
class ZeroTable:
    """
    Ordered positive ordinates of critical-line zeros.

    Attributes:
    -----------
    gammas : np.ndarray
        Strictly increasing positive reals (read-only array).
    source : str
        Provenance string (file path or description).
    """

    gammas: np.ndarray
    source: str = "<memory>"

    def __post_init__(self):
        gammas = np.asarray(self.gammas, dtype=float).copy()
        if gammas.ndim != 1:
            raise ValueError("gammas must be one-dimensional")
        if gammas.size and (gammas[0] <= 0 or np.any(np.diff(gammas) <= 0)):
            raise ValueError("gammas must be positive and strictly increasing")
        gammas.setflags(write=False)
        object.__setattr__(self, "gammas", gammas)

    def __len__(self) -> int:
        return int(self.gammas.size)

    def rho(self, n: int) -> complex:
        """ρₙ for n = ±1, ±2, …; negative n gives the conjugate zero."""
        if n == 0 or abs(n) > len(self):
            raise IndexError(f"zero index {n} outside ±1..±{len(self)}")
        gamma = self.gammas[abs(n) - 1]
        return complex(0.5, gamma if n > 0 else -gamma)

    def symmetric_zeros(self, m: int) -> np.ndarray:
        """
        The 2m zeros {ρ₁..ρₘ, ρ̄₁..ρ̄ₘ} as a complex array.

        Raises:
        -------
        InsufficientZeros
            If the table holds fewer than m ordinates.
        """
        if m < 1:
            raise ValueError(f"m must be a positive integer, got {m}")
        if m > len(self):
            raise InsufficientZeros(m, len(self))
        upper = 0.5 + 1j * self.gammas[:m]
        return np.concatenate([upper, np.conj(upper)])


# ───────────────────────────────────────────────────────────────────────────────
# 📥 ZeroTableLoader – validated file ingestion
# ───────────────────────────────────────────────────────────────────────────────
class ZeroTableLoader:
    """
    Loader for one-decimal-per-line zero tables with line-numbered diagnostics.

    Attributes:
    -----------
    path : Path
        File to read.
    verbose : bool
        If True, logs a short summary after loading.
    """

    def __init__(self, path: Union[str, Path], verbose: bool = False):
        # str or Path only
        if not isinstance(path, (str, Path)):
            raise TypeError(f"path must be str or Path, got {type(path)}")
        self.path = Path(path)
        self.verbose = verbose

    def load(self) -> ZeroTable:
        """
        Parse the table.

        Returns:
        --------
        ZeroTable
            Strictly increasing ordinates with the file path as provenance.

        Raises:
        -------
        FileNotFoundError
            If the file does not exist.
        ParseError
            If a non-comment line is not a decimal number.
        MonotonicityError
            If an entry is non-positive or not larger than its predecessor.
        """
        if not self.path.is_file():
            raise FileNotFoundError(f"❌ Zero table not found: {self.path}")

        text = self.path.read_text(encoding="utf-8")
        gammas = []
        for line_no, raw in enumerate(text.split("\n"), start=1):
            line = raw.strip()
            # Blank and comment lines carry no data
            if not line or line.startswith("#"):
                continue
            if not DECIMAL_PATTERN.fullmatch(line):
                raise ParseError(line_no, line)
            value = float(line)
            if not np.isfinite(value):
                raise ParseError(line_no, line)
            if value <= 0 or (gammas and value <= gammas[-1]):
                raise MonotonicityError(line_no, value)
            gammas.append(value)

        table = ZeroTable(np.array(gammas, dtype=float), source=str(self.path))
        if self.verbose:
            logger.info(f"📄 Loaded {len(table)} zero ordinates from {self.path}")
        return table


def load_zero_table(path: Union[str, Path]) -> ZeroTable:
    """Read a zero table file; see `ZeroTableLoader.load`."""
    return ZeroTableLoader(path).load()


def default_zero_table(env_file: Optional[Path] = None) -> ZeroTable:
    """
    Bundled table of the first 50 ordinates, or HOLOFLOW_ZERO_TABLE when set.
    """
    load_dotenv(env_file or (PROJECT_ROOT / ".env"), override=False)
    override = os.getenv("HOLOFLOW_ZERO_TABLE")
    path = Path(override) if override else DEFAULT_TABLE_PATH
    logger.debug(f"Default zero table → {path}")
    return load_zero_table(path)
