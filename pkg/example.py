#!/usr/bin/env python3
"""
Example usage of the THz indoor coverage lab.

Computes the reference coverage curve with both engines and prints them
side by side.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from src.analytic import AnalyticEngine
from src.core.curves import compare_curves, parse_gamma_grid
from src.core.params import Scenario, derive_constants
from src.geometry.blockage import mean_nearest_los_distance
from src.simulate import MonteCarloEngine


def main(n_trials: int = 20_000, sigma_theta_deg: float = 0.0):
    """Run both engines on a coarse threshold grid."""
    print("🚀 THz Indoor Coverage Lab - Example")
    print("=" * 50)

    try:
        scenario = Scenario(sigma_theta_deg=sigma_theta_deg)
        c = derive_constants(scenario)
        print("📋 Scenario:")
        print(f"  Blockage rates: alpha={c.alpha:.4f}/m, eta={c.eta:.4f}/m")
        print(f"  Mean nearest LoS AP distance: {mean_nearest_los_distance(c, scenario):.2f} m")

        grid = parse_gamma_grid("-10:40:10")

        print("\n📐 Analytic engine...")
        analytic = AnalyticEngine(scenario, show_progress=False).evaluate(grid)

        print(f"🎲 Monte Carlo engine ({n_trials} trials)...")
        simulated = MonteCarloEngine(scenario, show_progress=False).evaluate(
            grid, n_trials, seed=2024
        )

        report = compare_curves(analytic, simulated, tol=0.03)
        print("\n📊 Coverage probability:")
        print(f"  {'gamma dB':>9} {'analytic':>9} {'simulated':>10} {'+/-':>7}")
        for point in report["points"]:
            print(
                f"  {point['gamma_db']:>9.1f} {point['analytic']:>9.4f} "
                f"{point['simulated']:>10.4f} {point['ci_halfwidth']:>7.4f}"
            )
        icon = "✅" if report["passed"] else "⚠️"
        print(f"\n{icon} Max |difference|: {report['max_abs_diff']:.4f}")

    except KeyboardInterrupt:
        print("\n⚠️ Interrupted by user")
        return False
    except Exception as e:
        print(f"\n❌ Unexpected error: {e}")
        import traceback

        traceback.print_exc()
        return False

    return True


if __name__ == "__main__":
    import argparse

    parser = argparse.ArgumentParser(description="THz Indoor Coverage Lab Example")
    parser.add_argument("--trials", type=int, default=20_000, help="Monte Carlo trials")
    parser.add_argument("--sigma", type=float, default=0.0, help="Pointing error, degrees")

    args = parser.parse_args()
    sys.exit(0 if main(args.trials, args.sigma) else 1)
