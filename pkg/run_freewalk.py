#!/usr/bin/env python3
"""
FreeWalk launcher - runs the experiment CLI from the repository root

Example:
    python run_freewalk.py verify-all --quick
"""

import sys
from pathlib import Path

# Add project path
sys.path.insert(0, str(Path(__file__).parent))

from freewalk.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
