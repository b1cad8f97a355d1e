"""
test_zero_table.py – Unit Tests for ZeroTable Loading (HoloFlow)
------------------------------------------------------------

Tests the zero-table ingestion path, including:
- Fixture presence and the bundled default table
- Parsing, comment handling and symmetric zero reconstruction
- Ordering, parse and size violations with line-numbered errors
- HOLOFLOW_ZERO_TABLE override
"""

import sys  # Needed to modify the Python path
from pathlib import Path  # Safer file path resolution

# Get the absolute path to the root of the project (one level up from /tests)
project_root = Path(__file__).resolve().parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))  # Prepend root to import src modules

# ───────────────────────────────────────────────────────────────────────────────
# 📦 Imports – Standard, Third-Party, and Local
# ───────────────────────────────────────────────────────────────────────────────

import numpy as np  # ✅ Array checks
import pytest  # ✅ Pytest test framework

from src.catalog.zero_table import (  # 🔍 Module under test
    DEFAULT_TABLE_PATH,
    ZeroTable,
    ZeroTableLoader,
    default_zero_table,
    load_zero_table,
)
from src.errors import InsufficientZeros, MonotonicityError, ParseError

FIXTURES = Path(__file__).parent / "fixtures"

# ───────────────────────────────────────────────────────────────────────────────
# 🧪 Test 1 – Ensure All Fixture Files Exist
# ───────────────────────────────────────────────────────────────────────────────


@pytest.mark.parametrize(
    "filename",
    [
        "zeros_valid.txt",
        "zeros_non_monotone.txt",
        "zeros_empty.txt",
        "zeros_malformed.txt",
        "zeros_negative.txt",
    ],
)
def test_fixture_exists(filename):
    """✅ Ensure all required test fixture files are present in /fixtures/."""
    assert (FIXTURES / filename).exists(), f"❌ Missing fixture: {filename}"


# ───────────────────────────────────────────────────────────────────────────────
# 🧪 Test 2 – Valid Tables
# ───────────────────────────────────────────────────────────────────────────────


def test_valid_table_loads_with_comments_and_blanks():
    """✅ Comment and blank lines are skipped; values keep full precision."""
    table = load_zero_table(FIXTURES / "zeros_valid.txt")
    assert len(table) == 3
    assert table.gammas[0] == pytest.approx(14.134725141734695, abs=0)
    assert table.gammas[1] == pytest.approx(21.022039638771555, abs=0)
    assert table.source.endswith("zeros_valid.txt")


def test_bundled_default_table():
    """✅ The bundled table holds 50 increasing ordinates starting at γ₁."""
    table = load_zero_table(DEFAULT_TABLE_PATH)
    assert len(table) == 50
    assert table.gammas[0] == pytest.approx(14.134725141734693, rel=1e-15)
    assert np.all(np.diff(table.gammas) > 0)


def test_empty_table_is_valid_but_unusable():
    """✅ Empty file gives an empty table; asking for a pair fails."""
    table = load_zero_table(FIXTURES / "zeros_empty.txt")
    assert len(table) == 0
    with pytest.raises(InsufficientZeros) as info:
        table.symmetric_zeros(1)
    assert info.value.requested == 1
    assert info.value.available == 0


def test_symmetric_zeros_and_rho():
    """✅ ρₙ = 1/2 + iγₙ, conjugates follow the upper zeros."""
    table = load_zero_table(FIXTURES / "zeros_valid.txt")
    zeros = table.symmetric_zeros(2)
    assert zeros.shape == (4,)
    assert zeros[0] == complex(0.5, table.gammas[0])
    assert zeros[2] == np.conj(zeros[0])
    assert table.rho(-2) == complex(0.5, -table.gammas[1])
    with pytest.raises(IndexError):
        table.rho(0)


def test_table_is_read_only():
    """✅ ZeroTable storage cannot be mutated in place."""
    table = ZeroTable(np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        table.gammas[0] = 5.0


# ───────────────────────────────────────────────────────────────────────────────
# 🧪 Test 3 – Defensive Behavior on Invalid Input
# ───────────────────────────────────────────────────────────────────────────────


def test_non_monotone_table_reports_line():
    """❌ "21.0\\n14.1" fails on line 2."""
    with pytest.raises(MonotonicityError) as info:
        load_zero_table(FIXTURES / "zeros_non_monotone.txt")
    assert info.value.line == 2
    assert info.value.value == pytest.approx(14.1)


def test_negative_entry_is_an_ordering_error():
    """❌ Non-positive ordinates are rejected."""
    with pytest.raises(MonotonicityError) as info:
        load_zero_table(FIXTURES / "zeros_negative.txt")
    assert info.value.line == 2


def test_malformed_line_raises_parse_error():
    """❌ Non-numeric lines raise ParseError with the line number."""
    with pytest.raises(ParseError) as info:
        load_zero_table(FIXTURES / "zeros_malformed.txt")
    assert info.value.line == 2
    assert isinstance(info.value, ValueError)


@pytest.mark.parametrize("token", ["1_4.13", "nan", "inf", "-inf", "0x1p4", "1e400", "14.1.3", "1 4"])
def test_non_decimal_tokens_are_rejected(tmp_path, token):
    """❌ Only plain or scientific decimals count as ordinates."""
    path = tmp_path / "zeros.txt"
    path.write_text(f"14.134725141734695\n{token}\n", encoding="utf-8")
    with pytest.raises(ParseError) as info:
        load_zero_table(path)
    assert info.value.line == 2


@pytest.mark.parametrize("token", ["21.022", "2.1022e1", "+21", "21."])
def test_decimal_forms_are_accepted(tmp_path, token):
    path = tmp_path / "zeros.txt"
    path.write_text(f"14.134725141734695\n{token}\n", encoding="utf-8")
    table = load_zero_table(path)
    assert len(table) == 2


def test_missing_file_raises():
    """❌ Missing tables raise FileNotFoundError."""
    with pytest.raises(FileNotFoundError):
        load_zero_table(FIXTURES / "does_not_exist.txt")


def test_loader_rejects_non_path():
    """❌ The loader accepts only str or Path."""
    with pytest.raises(TypeError):
        ZeroTableLoader(42)


# ───────────────────────────────────────────────────────────────────────────────
# 🧪 Test 4 – Environment Override
# ───────────────────────────────────────────────────────────────────────────────


def test_env_override_selects_table(monkeypatch):
    """✅ HOLOFLOW_ZERO_TABLE replaces the bundled default."""
    monkeypatch.setenv("HOLOFLOW_ZERO_TABLE", str(FIXTURES / "zeros_valid.txt"))
    table = default_zero_table()
    assert len(table) == 3


def test_default_without_override(monkeypatch):
    """✅ Without the variable the bundled table is used."""
    monkeypatch.delenv("HOLOFLOW_ZERO_TABLE", raising=False)
    assert len(default_zero_table()) == 50
