#!/usr/bin/env python3
"""
Entry point for the THz indoor coverage lab.
This script can be run directly without import issues.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from src.main import main


if __name__ == "__main__":
    sys.exit(main())
