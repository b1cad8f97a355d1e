"""
holoflow.py – Runner Script for the holoflow CLI (HoloFlow)
----------------------------------------------------------------------
Normalises the working directory and sys.path so `src` imports resolve,
then hands the arguments to `src.cli.main`.

  python scripts/holoflow.py portrait --kind cosh --flow holomorphic
"""

# ------------------------------------------------------------------------------
# 🛠 Ensure Script Runs from Project Root (for src/ imports to work)
# ------------------------------------------------------------------------------

import os  # OS utilities for path management
import sys  # Path injection for src imports

# Auto-detect if launched from /scripts and normalize to project root
if os.path.basename(os.getcwd()) == "scripts":
    os.chdir("..")

project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

# ------------------------------------------------------------------------------
# 🚀 Dispatch
# ------------------------------------------------------------------------------

from src.cli.main import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
