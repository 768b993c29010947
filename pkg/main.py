import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent / "src"))

import argparse
import logging

from pydantic import ValidationError

from jobs.replicaJob import ReplicaJobRunner
from jumps.jumpLaw import normalizationConstant
from lattice.exactGenerator import StationarySolveError
from lattice.kmcSimulator import HAVE_NUMBA
from pipeline.fickScalingPipeline import FickScalingPipeline
from pipeline.hydrostaticsPipeline import HydrostaticsPipeline
from pipeline.tablesPipeline import TablesPipeline
from pipeline.validationPipeline import ValidationPipeline
from utils.configLoader import EXPERIMENT_KINDS, loadExperimentConfig
from utils.manifest import RunManifest
from utils.visualizer import Visualizer, loadResults

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


def buildParser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Boundary-driven exclusion process with long jumps: simulation and continuum numerics"
    )
    parser.add_argument("command", choices=EXPERIMENT_KINDS, help="Experiment to run")
    parser.add_argument("--config", type=str, default="config/config.yaml", help="Path to configuration file")
    parser.add_argument("--seed", type=int, default=None, help="Master seed (overrides LONGJUMP_SEED)")
    parser.add_argument("--out", type=str, default=None, help="Output directory")
    parser.add_argument("--replicas", type=int, default=None, help="Independent KMC replicas per N")
    parser.add_argument("--threads", type=int, default=None, help="Worker processes for replicas")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    parser.add_argument("--no-plots", action="store_true", help="Skip SVG plots")
    return parser


def runCommand(command: str, config, manifest: RunManifest) -> int:
    runner = ReplicaJobRunner(config.threads)
    if command == "validate":
        results = ValidationPipeline(config, manifest=manifest, runner=runner).run()
        return EXIT_OK if all(result.passed for result in results) else EXIT_CHECK_FAILED
    if command == "hydrostatics":
        HydrostaticsPipeline(config, manifest=manifest, runner=runner).run()
        return EXIT_OK
    if command == "fick-scaling":
        summary = FickScalingPipeline(config, manifest=manifest, runner=runner).run()
        seam = summary.get("seam")
        return EXIT_CHECK_FAILED if seam is not None and not seam["passed"] else EXIT_OK

    tables = TablesPipeline(config)
    if command == "operator-convergence":
        report = tables.operatorConvergence()
        return EXIT_OK if (report["bound_ratio"] <= 1.0).all() else EXIT_CHECK_FAILED
    if command == "profile-table":
        tables.profileTable()
        return EXIT_OK
    if command == "fick-constant":
        tables.fickConstant()
        return EXIT_OK
    raise ValueError(f"unknown command {command!r}")


def main(argv=None) -> int:
    args = buildParser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )

    try:
        configPath = args.config if Path(args.config).exists() else None
        if configPath is None:
            logger.warning(f"Config file {args.config} not found, using defaults")
        config = loadExperimentConfig(
            configPath,
            overrides={
                "kind": args.command,
                "seed": args.seed,
                "outDir": args.out,
                "replicas": args.replicas,
                "threads": args.threads,
            },
        )
    except (ValueError, ValidationError) as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_USAGE

    manifest = RunManifest(
        command=args.command,
        config=config,
        cGamma=normalizationConstant(config.gamma),
        numbaAvailable=HAVE_NUMBA,
        tolerances={
            "epsSplit": config.epsSplit,
            "hFloor": config.hFloor,
            "epsAbs": config.epsAbs,
            "chebyshevNodes": config.chebyshevNodes,
            "mcWalkers": config.mcWalkers,
        },
    )

    try:
        exitCode = runCommand(args.command, config, manifest)
    except ValueError as e:
        logger.error(f"{args.command} rejected its input: {e}")
        exitCode = EXIT_USAGE
    except StationarySolveError as e:
        logger.error(f"{args.command} failed: {e}")
        exitCode = EXIT_CHECK_FAILED

    if exitCode != EXIT_USAGE and config.plots and not args.no_plots:
        Visualizer().emitPlots(loadResults(config.outDir), config.outDir)

    manifest.finish(exitCode)
    path = manifest.save(config.outDir)
    print(f"Manifest written to {path}; exit code {exitCode}")
    return exitCode


if __name__ == "__main__":
    sys.exit(main())
