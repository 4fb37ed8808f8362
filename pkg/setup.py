#!/usr/bin/env python3
"""
Bootstrap a working copy of the coverage lab: dependencies, the output and
log directories named in config.yaml, and a one-point analytic smoke run.
"""

import subprocess
import sys
from pathlib import Path

MIN_PYTHON = (3, 9)


def check_python_version() -> bool:
    if sys.version_info < MIN_PYTHON:
        print(f"❌ Python {MIN_PYTHON[0]}.{MIN_PYTHON[1]} or higher is required")
        return False
    print(f"✅ Python {sys.version_info.major}.{sys.version_info.minor} detected")
    return True


def install_dependencies() -> bool:
    print("📦 Installing numerics and tooling from requirements.txt...")
    try:
        subprocess.check_call([sys.executable, "-m", "pip", "install", "-r", "requirements.txt"])
    except subprocess.CalledProcessError as e:
        print(f"❌ pip failed: {e}")
        return False
    return True


def prepare_directories() -> bool:
    from src.utils.config import get_config

    config = get_config()
    for directory in (Path(config.get_output_dir()), Path(config.get_log_file()).parent):
        directory.mkdir(parents=True, exist_ok=True)
        print(f"  📁 {directory}/")
    return True


def smoke_run() -> bool:
    """Fading series plus a single low-resolution analytic threshold."""
    print("🧪 Smoke run (reference scenario, gamma = 10 dB)...")
    try:
        from src.analytic.coverage import AnalyticEngine
        from src.analytic.quadrature import QuadratureSpec
        from src.core.params import Scenario

        engine = AnalyticEngine(
            Scenario(),
            spec=QuadratureSpec(d0_nodes=6, hpe_nodes=4, panel_nodes=8),
            show_progress=False,
        )
        print(f"  ✅ Fading series: {engine.model.weights.size} terms")
        value = float(engine.evaluate([10.0]).values[0])
        print(f"  ✅ Coverage at 10 dB: {value:.4f}")
        return True
    except Exception as e:
        print(f"  ❌ Smoke run failed: {e}")
        return False


def main() -> bool:
    print("🚀 THz Indoor Coverage Lab - Setup")
    print("=" * 50)

    if not check_python_version() or not install_dependencies():
        return False
    prepare_directories()
    if not smoke_run():
        print("⚠️ Smoke run failed; check config.yaml before running the engines")

    print("\n🎉 Setup completed! See README.md for the run_coverage.py commands.")
    return True


if __name__ == "__main__":
    sys.exit(0 if main() else 1)
