import argparse
import shlex
import sys
import traceback
from dataclasses import asdict
from pathlib import Path
from typing import List, Optional, Sequence

from .analytic.coverage import AnalyticEngine
from .core.curves import compare_curves, parse_gamma_grid
from .core.params import Scenario, apply_overrides, derive_constants, load_scenario_file
from .geometry.scene import sample_ap_field, sample_blockage_field, scene_to_dict, wall_margin
from .report_generators.dataset_writer import OUTPUT_FORMATS, DatasetWriter, RunManifest, Stopwatch
from .report_generators.figures import FIGURE_IDS, FigureBuilder, FigureOptions
from .simulate.engine import MonteCarloEngine, trial_table_for_export
from .simulate.rng import stream_rng
from .utils.config import VALID_BLOCKAGE_MODES, VALID_POINTING_MODES, get_config, reload_config
from .utils.logger import ROOT_LOGGER_NAME, setup_logger
from .validation import PropertySuite

DEFAULT_GAMMA_GRID = "-10:40:2"
DEFAULT_COMPARE_TOL = 0.03


class CoverageLab:
    """Command-line application: loads scenarios, runs engines, writes datasets."""

    def __init__(self, debug_mode: bool = False, quiet: bool = False, command: str = ""):
        self.config = get_config()
        self.debug_mode = debug_mode or self.config.is_debug_mode()
        self.command = command

        if self.debug_mode:
            log_level = "DEBUG"
        elif quiet:
            log_level = "WARNING"
        else:
            log_level = self.config.logging.level
        self.logger = setup_logger(
            name=ROOT_LOGGER_NAME,
            level=log_level,
            log_file=self.config.get_log_file(),
            max_file_size=self.config.logging.max_file_size,
            backup_count=self.config.logging.backup_count,
            console_output=True,
            file_format=self.config.logging.format,
        )
        self.show_progress = (
            self.config.development.show_progress and not quiet and sys.stderr.isatty()
        )
        self.writer = DatasetWriter()

    def load_scenario(self, path: Optional[str], overrides: Sequence[str]) -> Scenario:
        scenario = load_scenario_file(path) if path else Scenario()
        if overrides:
            scenario = apply_overrides(scenario, overrides)
        self.logger.info(
            f"Scenario: N_A={scenario.N_A}, N_U={scenario.N_U}, "
            f"sigma_theta={scenario.sigma_theta_deg} deg, lambda_A={scenario.lambda_A}"
        )
        return scenario

    def output_path(self, out: Optional[str], stem: str, fmt: str) -> Path:
        if out:
            return Path(out)
        return Path(self.config.get_output_dir()) / f"{stem}.{fmt}"

    def _manifest(self, scenario, engines, axis, values, seed, clock, **tolerances) -> RunManifest:
        return RunManifest.for_run(
            scenario,
            engines,
            axis,
            values,
            seed=seed,
            tolerances=tolerances,
            wall_clock_s=clock.elapsed,
            command=self.command,
        )

    def _analytic_engine(self, scenario: Scenario, workers: Optional[int]) -> AnalyticEngine:
        return AnalyticEngine(scenario, workers=workers, show_progress=self.show_progress)

    def _mc_engine(self, scenario: Scenario, args: argparse.Namespace) -> MonteCarloEngine:
        return MonteCarloEngine(
            scenario,
            blockage_mode=args.blockage,
            pointing_mode=args.pointing,
            workers=args.workers,
            show_progress=self.show_progress,
        )

    def run_analytic(self, args: argparse.Namespace) -> Path:
        clock = Stopwatch()
        scenario = self.load_scenario(args.scenario, args.set)
        grid = parse_gamma_grid(args.gamma_grid)
        engine = self._analytic_engine(scenario, args.workers)
        curve = engine.evaluate(grid)

        manifest = self._manifest(
            scenario, ["analytic"], "gamma_db", grid, None, clock, **asdict(engine.spec)
        )
        manifest.extra = curve.metadata
        path = self.output_path(args.out, "analytic", args.format)
        return self.writer.write_frame(curve.to_frame(), path, manifest, args.format)

    def run_simulate(self, args: argparse.Namespace) -> Path:
        clock = Stopwatch()
        scenario = self.load_scenario(args.scenario, args.set)
        grid = parse_gamma_grid(args.gamma_grid)
        n_trials = args.trials or scenario.n_trials
        engine = self._mc_engine(scenario, args)
        curve = engine.evaluate(grid, n_trials, args.seed)

        manifest = self._manifest(
            scenario,
            ["monte-carlo"],
            "gamma_db",
            grid,
            args.seed,
            clock,
            confidence_level=self.config.simulation.confidence_level,
        )
        manifest.extra = curve.metadata
        path = self.output_path(args.out, "simulate", args.format)
        written = self.writer.write_frame(curve.to_frame(), path, manifest, args.format)

        if args.dump_trials and engine.last_trials is not None:
            self.writer.write_frame(
                trial_table_for_export(engine.last_trials),
                Path(args.dump_trials),
                manifest,
                "csv",
            )
        return written

    def run_compare(self, args: argparse.Namespace) -> bool:
        clock = Stopwatch()
        scenario = self.load_scenario(args.scenario, args.set)
        grid = parse_gamma_grid(args.gamma_grid)
        n_trials = args.trials or scenario.n_trials

        try:
            analytic_engine = self._analytic_engine(scenario, args.workers)
            analytic = analytic_engine.evaluate(grid)
        except Exception as e:
            raise RuntimeError(f"analytic engine failed: {e}") from e
        try:
            simulated = self._mc_engine(scenario, args).evaluate(grid, n_trials, args.seed)
        except Exception as e:
            raise RuntimeError(f"Monte Carlo engine failed: {e}") from e

        report = compare_curves(analytic, simulated, args.tol)
        failed = [p["gamma_db"] for p in report["points"] if not p["passed"]]
        if failed:
            self.logger.warning(
                f"Compare failed at {len(failed)} threshold(s): {failed} "
                f"(max |diff| {report['max_abs_diff']:.4f} > {args.tol})"
            )
        else:
            self.logger.info(f"Compare passed (max |diff| {report['max_abs_diff']:.4f})")

        manifest = self._manifest(
            scenario,
            ["analytic", "monte-carlo"],
            "gamma_db",
            grid,
            args.seed,
            clock,
            compare_tol=args.tol,
            **asdict(analytic_engine.spec),
        )
        manifest.extra = {"analytic": analytic.metadata, "monte_carlo": simulated.metadata}
        document = {"manifest": manifest.to_dict(), **report}
        self.writer.write_json(document, self.output_path(args.out, "compare", "json"))
        return bool(report["passed"])

    def run_figure(self, args: argparse.Namespace) -> Path:
        clock = Stopwatch()
        scenario = self.load_scenario(args.scenario, args.set)
        options = FigureOptions(
            n_trials=args.trials or scenario.n_trials,
            seed=args.seed,
            workers=args.workers,
            blockage_mode=args.blockage,
            pointing_mode=args.pointing,
            gamma_grid_db=parse_gamma_grid(args.gamma_grid) if args.gamma_grid else None,
            n_draws=args.draws,
            show_progress=self.show_progress,
        )
        frame, axis, values = FigureBuilder(scenario, options).build(args.figure_id)

        engines = ["analytic", "monte-carlo"] if args.figure_id != "hpe-pdf" else ["analytic", "sampler"]
        manifest = self._manifest(scenario, engines, axis, values, args.seed, clock)
        manifest.extra = {"figure": args.figure_id, "n_trials": options.n_trials}
        path = self.output_path(args.out, args.figure_id, args.format)
        return self.writer.write_frame(frame, path, manifest, args.format)

    def run_validate(self, args: argparse.Namespace) -> bool:
        clock = Stopwatch()
        scenario = self.load_scenario(args.scenario, args.set)
        report = PropertySuite(scenario, seed=args.seed, scale=args.scale).run(args.check)
        manifest = self._manifest(scenario, ["validate"], "check", [], args.seed, clock)
        self.writer.write_json(
            {"manifest": manifest.to_dict(), **report},
            self.output_path(args.out, "validate", "json"),
        )
        return bool(report["passed"])

    def dump_scene(self, args: argparse.Namespace) -> Path:
        clock = Stopwatch()
        scenario = self.load_scenario(args.scenario, args.set)
        c = derive_constants(scenario)
        rng = stream_rng(args.seed, 0)
        aps = sample_ap_field(scenario, rng, c.sim_radius)
        blockage = sample_blockage_field(
            scenario, rng, radius=c.sim_radius, margin=wall_margin(scenario) + scenario.R_B
        )
        manifest = self._manifest(scenario, ["scene"], "none", [], args.seed, clock)
        path = self.output_path(args.out, "scene", "json")
        self.writer.write_json(
            {"manifest": manifest.to_dict(), "scene": scene_to_dict(aps, blockage)}, path
        )
        self.logger.info(
            f"Scene: {len(aps)} APs, {blockage.human_centers.shape[0]} humans, "
            f"{blockage.wall_centers.shape[0]} walls"
        )
        return path


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", type=str, help="Scenario YAML file or run manifest")
    common.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE",
        help="Override a scenario field (repeatable; mftr.K=3 for fading)",
    )
    common.add_argument("--config", type=str, help="Path to configuration file")
    common.add_argument("--out", type=str, help="Output file path")
    common.add_argument("--workers", type=int, help="Worker processes (results do not depend on it)")
    common.add_argument("--debug", action="store_true", help="Enable debug mode")
    common.add_argument("--quiet", action="store_true", help="Warnings only, no progress bars")
    return common


def _add_engine_flags(parser: argparse.ArgumentParser, seed_required: bool) -> None:
    parser.add_argument("--gamma-grid", type=str, default=DEFAULT_GAMMA_GRID,
                        help="SINR thresholds in dB, a:b:step or a comma list")
    parser.add_argument("--trials", type=int, help="Monte Carlo trials (default: scenario n_trials)")
    parser.add_argument("--seed", type=int, required=seed_required, help="Monte Carlo seed")
    parser.add_argument("--blockage", choices=VALID_BLOCKAGE_MODES, help="Blockage mode")
    parser.add_argument("--pointing", choices=VALID_POINTING_MODES, help="Pointing-error mode")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coverage-lab", description="THz indoor downlink coverage lab"
    )
    common = _common_parser()
    sub = parser.add_subparsers(dest="command", required=True)

    analytic = sub.add_parser("analytic", parents=[common], help="Analytic coverage curve")
    analytic.add_argument("--gamma-grid", type=str, default=DEFAULT_GAMMA_GRID)
    analytic.add_argument("--format", choices=OUTPUT_FORMATS, default="csv")

    simulate = sub.add_parser("simulate", parents=[common], help="Monte Carlo coverage curve")
    _add_engine_flags(simulate, seed_required=True)
    simulate.add_argument("--format", choices=OUTPUT_FORMATS, default="csv")
    simulate.add_argument("--dump-trials", type=str, metavar="PATH",
                          help="Also write the per-trial table as CSV")

    compare = sub.add_parser("compare", parents=[common], help="Analytic vs Monte Carlo report")
    _add_engine_flags(compare, seed_required=True)
    compare.add_argument("--tol", type=float, default=DEFAULT_COMPARE_TOL,
                         help="Absolute tolerance per threshold")

    figure = sub.add_parser("figure", parents=[common], help="Figure datasets")
    figure.add_argument("figure_id", choices=FIGURE_IDS)
    _add_engine_flags(figure, seed_required=True)
    figure.set_defaults(gamma_grid=None)
    figure.add_argument("--draws", type=int, default=1_000_000,
                        help="Pointing-loss draws per array size (hpe-pdf)")
    figure.add_argument("--format", choices=OUTPUT_FORMATS, default="csv")

    validate = sub.add_parser("validate", parents=[common], help="Quick property checks")
    validate.add_argument("--seed", type=int, default=0)
    validate.add_argument("--scale", type=float, default=1.0, help="Multiplier on sample sizes")
    validate.add_argument("--check", action="append", help="Run only the named check(s)")

    scene = sub.add_parser("dump-scene", parents=[common], help="One geometric realization as JSON")
    scene.add_argument("--seed", type=int, default=0)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)

    try:
        if args.config:
            reload_config(args.config)

        lab = CoverageLab(
            debug_mode=args.debug, quiet=args.quiet, command=shlex.join(["coverage-lab", *argv])
        )

        if args.command == "analytic":
            print(f"📊 Analytic curve written: {lab.run_analytic(args)}")
        elif args.command == "simulate":
            print(f"🎲 Monte Carlo curve written: {lab.run_simulate(args)}")
        elif args.command == "compare":
            if not lab.run_compare(args):
                print("❌ Analytic and Monte Carlo curves disagree beyond tolerance")
                return 1
            print("✅ Analytic and Monte Carlo curves agree")
        elif args.command == "figure":
            print(f"📈 Figure dataset written: {lab.run_figure(args)}")
        elif args.command == "validate":
            if not lab.run_validate(args):
                print("❌ Some property checks failed")
                return 1
            print("✅ All property checks passed")
        elif args.command == "dump-scene":
            print(f"🏠 Scene written: {lab.dump_scene(args)}")
        return 0

    except KeyboardInterrupt:
        print("\n⚠️ Interrupted by user", file=sys.stderr)
        return 1
    except Exception as e:
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        if args.debug:
            traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
