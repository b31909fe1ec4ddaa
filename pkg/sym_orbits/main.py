"""Main application entry point"""
import argparse
import glob
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from sym_orbits.catalog.graph import export_graphml
from sym_orbits.catalog.store import dumps, load_orbits, load_records, orbit_from_record
from sym_orbits.catalog.tables import PLANAR_COLUMNS, SPATIAL_COLUMNS, available_columns, table_frame
from sym_orbits.catalog.writer import CatalogWriter, write_metrics, write_provenance
from sym_orbits.config.models import OUTPUT_ENV_VAR, ModelConfig, RunConfig
from sym_orbits.continuation.deform import MassDeformation
from sym_orbits.continuation.detectors import FOLD
from sym_orbits.continuation.pool import BranchPool, BranchTask
from sym_orbits.core.errors import NoConvergence, SymOrbitsError
from sym_orbits.diagram.broucke import stability_frame
from sym_orbits.dynamics.factory import create_model
from sym_orbits.dynamics.symmetry import COORDINATES
from sym_orbits.fixtures import fixture_names, load_fixture
from sym_orbits.floer.census import OrbitCensus, check_invariance
from sym_orbits.index.conley_zehnder import IndexRecord
from sym_orbits.metrics.collector import MetricsCollector
from sym_orbits.reproduce import Experiment, fixture_anchor, fixture_orbit, reproduce_table
from sym_orbits.shooting.constraints import FixedGamma
from sym_orbits.shooting.corrector import Corrector
from sym_orbits.shooting.orbit import PeriodicOrbit

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NO_CONVERGENCE = 2
EXIT_TERMINATED = 3
EXIT_INVARIANCE = 4


def setup_logging(level: str = "INFO"):
    """Setup logging configuration"""
    logging.basicConfig(
        level=getattr(logging, level.upper()),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.StreamHandler(sys.stdout)
        ]
    )


def load_config(args) -> RunConfig:
    """YAML config (or defaults) with command-line overrides"""
    if args.config:
        logger.info(f"Loading configuration from {args.config}")
        config = RunConfig.from_yaml(args.config)
    else:
        config = RunConfig()
    if args.output:
        config.output_dir = args.output
    if args.workers:
        config.workers.max_workers = args.workers
    return config


def read_json_argument(value: str) -> Any:
    """Inline JSON or the path of a JSON file"""
    if os.path.isfile(value):
        with open(value, 'r') as f:
            return json.load(f)
    return json.loads(value)


def parse_model(value: Optional[str], default: ModelConfig) -> ModelConfig:
    """Preset name, inline JSON or JSON file; None keeps the configured model"""
    if not value:
        return default
    if os.path.isfile(value) or value.lstrip().startswith("{"):
        return ModelConfig.from_dict(read_json_argument(value))
    return ModelConfig.preset(value)


def seed_state(seed: Dict[str, Any]) -> np.ndarray:
    """state0 list, or coordinates named x0, y0, z0, vx0, vy0, vz0"""
    if "state0" in seed:
        state = np.asarray(seed["state0"], dtype=float)
        if state.shape != (6,):
            raise ValueError("state0 must hold 6 numbers")
        return state
    state = np.zeros(6)
    found = False
    for i, name in enumerate(COORDINATES):
        key = f"{name}0"
        if key in seed:
            state[i] = float(seed[key])
            found = True
    if not found:
        raise ValueError("seed needs state0 or named initial coordinates (x0, vy0, ...)")
    return state


def seed_half_period(seed: Dict[str, Any]) -> Optional[float]:
    if "period" in seed:
        return 0.5 * float(seed["period"]) / int(seed.get("cover", 1))
    if "T" in seed:
        return 0.5 * float(seed["T"])
    return None


def print_json(data: Any) -> None:
    print(dumps(data))


def cmd_orbit_correct(args, config: RunConfig, metrics: MetricsCollector, writer: CatalogWriter) -> int:
    """Correct one seed and print the orbit record"""
    config.model = parse_model(args.model, config.model)
    seed = read_json_argument(args.seed_json)
    model = create_model(config.model)
    chart = args.chart or seed.get("chart", "planar")
    corrector = Corrector(model, config.tolerances, metrics, "orbit-correct")
    constraint = FixedGamma(seed["gamma"]) if seed.get("gamma") is not None else None
    try:
        orbit = corrector.correct(
            chart, seed_state(seed), seed_half_period(seed), constraint, seed.get("symmetries")
        )
    except NoConvergence as e:
        logger.error(f"Correction failed: {e}")
        print_json(e.to_dict())
        return EXIT_NO_CONVERGENCE
    record = orbit.to_record()
    record["residual"] = float(orbit.residual)
    record["newton_iterations"] = orbit.metadata.get("newton_iterations")
    print_json(record)
    writer.submit("orbits", "orbit", [orbit])
    return EXIT_OK


def load_start(source: str, config: RunConfig, corrector_key: str, metrics) -> Tuple[PeriodicOrbit, Optional[IndexRecord]]:
    """Start orbit from ``fixture:row`` (1-based row) or a stored record file"""
    name, sep, row = source.partition(":")
    if sep and not os.path.exists(source) and name.replace("-", "_").lower() in fixture_names():
        fixture = load_fixture(name)
        fixture_row = fixture.rows[int(row) - 1]
        corrector = Corrector(create_model(fixture.model), config.tolerances, metrics, corrector_key)
        return fixture_orbit(fixture, fixture_row, corrector), fixture_anchor(fixture_row)
    if source.endswith(".jsonl"):
        orbits = load_orbits(source)
        if not orbits:
            raise ValueError(f"{source} holds no orbit records")
        return orbits[0], None
    record = read_json_argument(source)
    index = record.get("index")
    anchor = IndexRecord(index["total"], index.get("planar"), index.get("spatial")) if index else None
    return orbit_from_record(record), anchor


def cmd_family_continue(args, config: RunConfig, metrics: MetricsCollector, writer: CatalogWriter) -> int:
    """Continue a family in Gamma, or deform a Hill orbit to a mass ratio"""
    start, anchor = load_start(args.start, config, "family-continue", metrics)
    name = args.name or start.metadata.get("family") or "branch"
    if args.max_points:
        config.continuation.max_points = args.max_points

    if args.to_mu is not None:
        deformation = MassDeformation(config.tolerances, config.continuation, metrics)
        orbit = deformation.deform(start, args.to_mu)
        writer.submit("orbits", f"{name}.mu-path", [o for _, o in deformation.path])
        writer.submit("orbits", f"{name}.deformed", [orbit])
        print_json(orbit.to_record())
        return EXIT_OK

    pool = BranchPool(config.workers, config.tolerances, config.continuation, metrics, writer)
    result = pool.run_task(BranchTask(
        name=name, start=start, direction=args.direction, target_gamma=args.to_gamma,
        anchor=anchor, detect=args.detect,
    ))
    branch = result.branch
    if branch is not None:
        records = branch.to_records()
        spatial = not branch.planar
        columns = available_columns(records, SPATIAL_COLUMNS if spatial else PLANAR_COLUMNS)
        folds = [e.parameter for e in result.events if e.kind == FOLD]
        writer.submit("table", f"{name}.table", table_frame(records, columns, folds, spatial))
        writer.submit("table", f"{name}.stability", stability_frame(branch.stability_path()))
        end = branch.points[-1].orbit
        writer.submit("table", f"{name}.trajectory", pool.engine_for(result.task).propagator.sample(
            end.state0, end.period
        ).to_frame())
        print_json({
            "branch": name,
            "points": len(branch),
            "termination": branch.termination,
            "gamma_range": [min(branch.gammas), max(branch.gammas)],
            "events": [{"kind": e.kind, "gamma_star": e.parameter, "detector": e.detector} for e in result.events],
        })
    if result.error is not None:
        print_json(result.error)
        return EXIT_TERMINATED if result.error.get("error") == "BranchTerminated" else EXIT_ERROR
    return EXIT_OK


def event_files(directory: str) -> List[str]:
    """JSON-lines files in a directory whose header marks them as event files"""
    files = []
    for path in sorted(glob.glob(os.path.join(directory, "*.jsonl"))):
        try:
            header, _ = load_records(path)
        except SymOrbitsError as e:
            logger.warning(f"Skipping {path}: {e}")
            continue
        if header.get("kind") == "events":
            files.append(path)
    return files


def check_events(directory: str) -> Tuple[List[Dict[str, Any]], int]:
    """Recount every stored census; returns per-event results and the failure count"""
    results = []
    failures = 0
    for path in event_files(directory):
        _, records = load_records(path)
        for record in records:
            report = record.get("report") or {}
            censuses = report.get("censuses")
            if not censuses:
                logger.warning(f"{path}: event at Gamma*={record['gamma_star']} carries no censuses, skipped")
                continue
            before = OrbitCensus.from_dict(censuses["before"])
            after = OrbitCensus.from_dict(censuses["after"])
            try:
                checked = check_invariance(record["gamma_star"], before, after).to_dict()
            except SymOrbitsError as e:
                checked = {"gamma_star": record["gamma_star"], "pass": False, **e.to_dict()}
            checked.update({"file": os.path.basename(path), "branch": record.get("branch"), "kind": record.get("kind")})
            checked.pop("censuses", None)
            if not checked["pass"]:
                failures += 1
            results.append(checked)
    return results, failures


def cmd_floer_check(args, config: RunConfig, metrics: MetricsCollector, writer: CatalogWriter) -> int:
    """Recount the Floer number on both sides of every stored event"""
    directory = args.events_dir or config.output_dir
    results, failures = check_events(directory)
    if not results:
        logger.warning(f"No checkable events in {directory}; nothing to verify")
    writer.submit("json", "floer_report", {"events": results, "failures": failures})
    print_json({"checked": len(results), "failures": failures, "events": results})
    if failures:
        logger.error(f"Floer number changed at {failures} event(s)")
        return EXIT_INVARIANCE
    return EXIT_OK


def cmd_reproduce_table(args, config: RunConfig, metrics: MetricsCollector, writer: CatalogWriter) -> int:
    """Appendix table regression"""
    names = fixture_names() if args.name == "all" else [args.name]
    passed = True
    for name in names:
        reproduction = reproduce_table(name, config, metrics)
        label = f"table{reproduction.fixture.table}_{reproduction.fixture.name}"
        writer.submit("table", label, reproduction.frame())
        writer.submit("json", f"{label}.summary", reproduction.summary())
        print_json(reproduction.summary())
        passed = passed and reproduction.passed
    return EXIT_OK if passed else EXIT_ERROR


def cmd_reproduce_graph(args, config: RunConfig, metrics: MetricsCollector, writer: CatalogWriter) -> int:
    """Continue, switch, verify and assemble one bifurcation graph"""
    experiment = Experiment(config, metrics, writer).run(args.name, args.desk_scale)
    summary = experiment.summary()
    print_json(summary)
    writer.close()
    export_graphml(experiment.graph, os.path.join(config.output_dir, f"{experiment.name}.graphml"))
    if not experiment.verified:
        logger.error(f"{experiment.name}: Floer check failed at some events")
        return EXIT_INVARIANCE
    return EXIT_OK


COMMANDS = {
    'orbit-correct': cmd_orbit_correct,
    'family-continue': cmd_family_continue,
    'floer-check': cmd_floer_check,
    'reproduce-table': cmd_reproduce_table,
    'reproduce-graph': cmd_reproduce_graph,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        '-c', '--config',
        help='Path to configuration file (YAML)'
    )
    common.add_argument(
        '-l', '--log-level',
        default='INFO',
        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'],
        help='Logging level'
    )
    common.add_argument(
        '-o', '--output',
        help=f'Output directory (default: ${OUTPUT_ENV_VAR} or ./output)'
    )
    common.add_argument(
        '--workers',
        type=int,
        help='Parallel branch continuations'
    )

    parser = argparse.ArgumentParser(
        description='Sym-Orbits: symmetric periodic orbits, stability data and bifurcations'
    )
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('orbit-correct', parents=[common], help='Correct a seed onto a symmetric periodic orbit')
    p.add_argument('--model', help='Preset name (jupiter_europa, hill) or model JSON')
    p.add_argument('--chart', help='Shooting chart (planar, L, L_tilde, kappa_planar, kappa, kappa_tilde)')
    p.add_argument('--seed-json', required=True, help='Seed record, inline JSON or file')

    p = sub.add_parser('family-continue', parents=[common], help='Continue a family from a converged orbit')
    p.add_argument('--from', dest='start', required=True, help='Record file or fixture:row (e.g. dpo:7)')
    target = p.add_mutually_exclusive_group()
    target.add_argument('--to-gamma', type=float, help='Stop at this Jacobi constant')
    target.add_argument('--to-mu', type=float, help='Deform a Hill orbit to this mass ratio')
    p.add_argument('--direction', type=int, choices=[-1, 1], default=1, help='Gamma direction without a target')
    p.add_argument('--detect', action='store_true', help='Locate bifurcations along the branch')
    p.add_argument('--name', help='Branch name (default: family of the start orbit)')
    p.add_argument('--max-points', type=int, help='Cap on branch points')

    p = sub.add_parser('floer-check', parents=[common], help='Recheck Floer invariance of stored events')
    p.add_argument('--events-dir', help='Directory holding event files (default: output directory)')

    p = sub.add_parser('reproduce-table', parents=[common], help='Regress an appendix table')
    p.add_argument('name', help=f"Fixture name or table number, or 'all' ({', '.join(fixture_names())})")

    p = sub.add_parser('reproduce-graph', parents=[common], help='Rebuild a bifurcation graph')
    p.add_argument('name', choices=['result1', 'result2', 'result3'])
    p.add_argument('--desk-scale', action='store_true', help='Short side branches, bridge only')
    return parser


def input_paths(args) -> List[str]:
    paths = [args.config] if args.config else []
    for attr in ('seed_json', 'start', 'events_dir'):
        value = getattr(args, attr, None)
        if value and os.path.exists(value):
            paths.append(value)
    return paths


def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point"""
    args = build_parser().parse_args(argv)

    # Setup logging
    setup_logging(args.log_level)

    try:
        config = load_config(args)
    except (OSError, ValueError) as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_ERROR

    metrics = MetricsCollector()
    writer = CatalogWriter(config.output_dir, config.workers.queue_size, metrics).start()
    logger.info(f"Running {args.command}, output in {config.output_dir}")
    try:
        code = COMMANDS[args.command](args, config, metrics, writer)
    except SymOrbitsError as e:
        logger.error(f"{args.command} failed: {e}", exc_info=True)
        print_json(e.to_dict())
        code = EXIT_ERROR
    except Exception as e:
        logger.error(f"Error running {args.command}: {e}", exc_info=True)
        code = EXIT_ERROR
    finally:
        writer.close()

    # Print final metrics
    write_provenance(config.output_dir, config, input_paths(args), [sys.argv[0], *(argv or sys.argv[1:])])
    write_metrics(config.output_dir, metrics)
    final = metrics.get_metrics()
    logger.info("Final metrics:")
    logger.info(f"  Uptime: {final['uptime_seconds']:.2f}s")
    logger.info(f"  Work: {final['work']}")
    if writer.failed:
        logger.error(f"{len(writer.failed)} output file(s) could not be written")
    return code


if __name__ == '__main__':
    sys.exit(main())
