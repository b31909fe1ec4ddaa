"""Appendix table regressions and the bifurcation-graph experiments"""
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import pandas as pd

from sym_orbits.catalog.graph import BifurcationGraph, build_graph, to_dot
from sym_orbits.catalog.tables import PLANAR_COLUMNS, SPATIAL_COLUMNS, available_columns, table_frame
from sym_orbits.config.models import RunConfig
from sym_orbits.continuation.bifurcation import BifurcationEvent, outward_direction, switch_branch, verify_event
from sym_orbits.continuation.deform import MassDeformation
from sym_orbits.continuation.detectors import eigen_one_detector, fold_detector, kfold_detector
from sym_orbits.continuation.family import FamilyBranch, FamilyContinuation, cover_branch, mirror_branch
from sym_orbits.continuation.pool import BranchPool, BranchResult, BranchTask
from sym_orbits.core.errors import SymOrbitsError
from sym_orbits.dynamics.crtbp import CRTBPModel
from sym_orbits.dynamics.factory import create_model
from sym_orbits.fixtures import FixtureRow, TableFixture, compare_row, load_fixture, load_seed
from sym_orbits.index.conley_zehnder import IndexRecord
from sym_orbits.index.rotation import index_from_rotation
from sym_orbits.shooting.charts import get_chart
from sym_orbits.shooting.constraints import FixedGamma
from sym_orbits.shooting.corrector import Corrector
from sym_orbits.shooting.orbit import PeriodicOrbit, symmetric_points

logger = logging.getLogger(__name__)

# branch name suffix of a family switched onto from a planar parent
SEED_SUFFIX = {
    "L": "x",
    "L_tilde": "xz",
    "kappa": "y",
    "kappa_tilde": "yz",
    "planar": "p",
    "kappa_planar": "p",
}
DESK_POINTS = 60


def fixture_orbit(fixture: TableFixture, row: FixtureRow, corrector: Corrector) -> PeriodicOrbit:
    """Correct a tabulated seed at its tabulated Gamma"""
    orbit = corrector.correct(
        fixture.chart, fixture.state(row), fixture.half_period(row), FixedGamma(row.gamma)
    )
    orbit.metadata.update({"family": fixture.family, "fixture_row": row.position + 1})
    return orbit


def fixture_anchor(row: FixtureRow) -> Optional[IndexRecord]:
    """Index record of a tabulated row: [planar, spatial, total] or a bare total"""
    cz = row.data.get("cz")
    if cz is None:
        return None
    if isinstance(cz, list):
        return IndexRecord.split(cz[0], cz[1])
    return IndexRecord(total=int(cz))


@dataclass
class TableReproduction:
    """Corrected rows of one appendix table and where they disagree with it"""
    fixture: TableFixture
    records: List[Dict[str, Any]] = field(default_factory=list)
    mismatches: Dict[int, List[str]] = field(default_factory=dict)
    failures: Dict[int, Dict[str, Any]] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.mismatches and not self.failures

    def frame(self) -> pd.DataFrame:
        columns = available_columns(self.records, SPATIAL_COLUMNS if self.fixture.spatial else PLANAR_COLUMNS)
        return table_frame(self.records, columns, folds=self.fixture.folds(), spatial=self.fixture.spatial)

    def summary(self) -> Dict[str, Any]:
        return {
            "table": self.fixture.table,
            "family": self.fixture.family,
            "rows": len(self.records),
            "pass": self.passed,
            "mismatches": {str(k + 1): v for k, v in self.mismatches.items()},
            "failures": {str(k + 1): v for k, v in self.failures.items()},
        }


def reproduce_table(name: str, config: Optional[RunConfig] = None, metrics=None) -> TableReproduction:
    """Seed every tabulated orbit, correct it and compare Gamma, T, spectra and indices"""
    fixture = load_fixture(name)
    config = config or RunConfig()
    key = f"table{fixture.table}"
    engine = FamilyContinuation(create_model(fixture.model), config.tolerances, config.continuation, metrics, key)
    chart = get_chart(fixture.chart)
    result = TableReproduction(fixture)
    logger.info(f"Reproducing table {fixture.table} ({fixture.family}, {len(fixture.orbit_rows)} rows)")

    for row in fixture.orbit_rows:
        try:
            orbit = fixture_orbit(fixture, row, engine.corrector)
            point = engine.annotate(orbit, chart)
            if orbit.planar and not point.config.degenerate:
                point.index = index_from_rotation(orbit, point.config, engine.propagator)
        except (SymOrbitsError, ValueError) as e:
            logger.error(f"Table {fixture.table} row {row.position + 1}: {e}", exc_info=True)
            result.failures[row.position] = e.to_dict() if isinstance(e, SymOrbitsError) else {"error": str(e)}
            if metrics is not None:
                metrics.record_failure(key)
            continue
        record = point.to_record()
        result.records.append(record)
        problems = compare_row(fixture, row, record)
        if problems:
            result.mismatches[row.position] = problems
            logger.warning(f"Table {fixture.table} row {row.position + 1}: {'; '.join(problems)}")

    logger.info(
        f"Table {fixture.table}: {len(result.records) - len(result.mismatches)}/{len(fixture.orbit_rows)} rows match"
    )
    return result


@dataclass
class GraphExperiment:
    """Branches, located events and the graph assembled from them"""
    name: str
    branches: List[FamilyBranch] = field(default_factory=list)
    events: List[BifurcationEvent] = field(default_factory=list)
    results: List[BranchResult] = field(default_factory=list)
    graph: Optional[BifurcationGraph] = None

    @property
    def verified(self) -> bool:
        return all(e.verified for e in self.events)

    def branch(self, name: str) -> Optional[FamilyBranch]:
        return next((b for b in self.branches if b.name == name), None)

    def summary(self) -> Dict[str, Any]:
        return {
            "experiment": self.name,
            "branches": {b.name: {"points": len(b), "termination": b.termination} for b in self.branches},
            "events": [
                {"kind": e.kind, "branch": e.branch, "gamma_star": e.parameter, "verified": e.verified}
                for e in self.events
            ],
            "edges": [{"branch": b, "cz": cz} for b, cz in self.graph.edge_labels()] if self.graph else [],
            "dangling": self.graph.dangling if self.graph else [],
            "verified": self.verified,
        }


class Experiment:
    """Recipes that continue families from tabulated orbits, switch at their
    degeneracies and check every located event against the Floer count."""

    def __init__(self, config: Optional[RunConfig] = None, metrics=None, writer=None):
        self.config = config or RunConfig()
        self.metrics = metrics
        self.writer = writer
        self.model = create_model(self.config.model)
        self.pool = BranchPool(
            self.config.workers, self.config.tolerances, self.config.continuation, metrics, writer
        )
        self.engine = FamilyContinuation(
            self.model, self.config.tolerances, self.config.continuation, metrics, "experiment"
        )
        self.recipes: Dict[str, Callable[[bool], GraphExperiment]] = {
            "result1": self.result1,
            "result2": self.result2,
            "result3": self.result3,
        }

    def run(self, name: str, desk_scale: bool = False) -> GraphExperiment:
        recipe = self.recipes.get(name)
        if not recipe:
            raise ValueError(f"Unknown experiment: {name} (known: {', '.join(self.recipes)})")
        logger.info(f"Running experiment {name}{' (desk scale)' if desk_scale else ''}")
        return recipe(desk_scale)

    def start(self, fixture_name: str, position: int) -> Tuple[PeriodicOrbit, Optional[IndexRecord]]:
        """Corrected orbit and index anchor of a tabulated row"""
        fixture = load_fixture(fixture_name)
        row = fixture.rows[position]
        return fixture_orbit(fixture, row, self.engine.corrector), fixture_anchor(row)

    def deformed_start(self, seed_name: str) -> Tuple[PeriodicOrbit, Optional[IndexRecord]]:
        """Hill seed deformed to the model's mass ratio at the Gamma of the row it lands on"""
        if not isinstance(self.model, CRTBPModel):
            raise ValueError(f"deformed starts need a CRTBP model, not {self.model!r}")
        seed = load_seed(seed_name)
        landing = seed.metadata["lands_on"]
        fixture = load_fixture(landing["fixture"])
        row = fixture.rows[landing["row"] - 1]
        deformation = MassDeformation(self.config.tolerances, self.config.continuation, self.metrics)
        deformed = deformation.from_seed(
            seed.state, seed.half_period, seed.chart, seed.symmetries, row.gamma, self.model.mu,
            collision_radius=self.config.model.collision_radius,
        )
        # re-correct on the experiment's model
        orbit = self.engine.corrector.correct(
            deformed.chart, deformed.state0, deformed.half_period, FixedGamma(row.gamma), deformed.symmetries
        )
        orbit.metadata.update({"family": fixture.family, "seed": seed.name, "mu_steps": deformed.metadata["mu_steps"]})
        return orbit, fixture_anchor(row)

    def continue_all(self, experiment: GraphExperiment, tasks: Sequence[BranchTask]) -> List[BranchResult]:
        results = self.pool.run(tasks)
        for result in results:
            experiment.results.append(result)
            if result.branch is not None:
                experiment.branches.append(result.branch)
            experiment.events.extend(result.events)
        return results

    def read_covers(self, experiment: GraphExperiment, events: Sequence[BifurcationEvent]) -> None:
        """k-fold events move onto the k-fold cover of their branch"""
        for event in events:
            if event.k <= 1:
                continue
            simple = experiment.branch(event.branch)
            if simple is None:
                continue
            covered = cover_branch(simple, event.k)
            if experiment.branch(covered.name) is None:
                experiment.branches.append(covered)
            event.branch = covered.name

    def record_symmetric_points(self, events: Sequence[BifurcationEvent]) -> None:
        for event in events:
            if event.orbit is None or "symmetric_states" in event.orbit.metadata:
                continue
            try:
                event.orbit.metadata["symmetric_states"] = symmetric_points(
                    event.orbit, propagator=self.engine.propagator
                )[1:]
            except SymOrbitsError as e:
                logger.warning(f"No second symmetric point for the orbit at Gamma*={event.parameter:.10f}: {e}")

    def follow(
        self,
        experiment: GraphExperiment,
        event: BifurcationEvent,
        max_points: Optional[int] = None,
        targets: Optional[Dict[str, float]] = None,
    ) -> List[BranchResult]:
        """Switch at an event and continue every seed away from it.

        Each new family inherits its index from the parent across the event
        and spatial families get their mirror. ``targets`` maps a seed chart
        to the Gamma its branch should end at.
        """
        targets = targets or {}
        try:
            seeds = switch_branch(event, self.engine)
        except SymOrbitsError as e:
            logger.error(f"Branch switching at Gamma*={event.parameter:.10f} failed: {e}", exc_info=True)
            if self.metrics is not None:
                self.metrics.record_failure(event.branch)
            return []

        parent = experiment.branch(event.branch)
        tasks = []
        taken = {b.name for b in experiment.branches}
        for seed in seeds:
            if "mirror_of" in seed.metadata:
                continue
            name = f"{event.branch}-{SEED_SUFFIX.get(seed.chart, seed.chart)}"
            while name in taken:
                name += "'"
            taken.add(name)
            target = targets.get(seed.chart)
            tasks.append(BranchTask(
                name=name, start=seed, direction=outward_direction(event, seed, self.engine), target_gamma=target,
                max_points=None if target is not None else max_points, event=event, parent=parent,
            ))
        results = self.continue_all(experiment, tasks)
        for result in results:
            if result.branch is not None and not result.branch.planar:
                experiment.branches.append(mirror_branch(result.branch))
        return results

    def finish(self, experiment: GraphExperiment, planar_problem: Optional[bool] = None) -> GraphExperiment:
        """Floer check at every event, then the graph"""
        self.record_symmetric_points(experiment.events)
        for event in experiment.events:
            verify_event(event, experiment.branches, self.engine, experiment.events, planar_problem)
        experiment.graph = build_graph(
            experiment.branches, experiment.events, label="planar" if planar_problem else "total"
        )
        unverified = [e for e in experiment.events if not e.verified]
        if unverified:
            logger.warning(f"{experiment.name}: {len(unverified)} of {len(experiment.events)} event(s) unverified")
        if self.writer is not None:
            self.writer.submit("events", f"{experiment.name}.events", experiment.events)
            self.writer.submit("text", f"{experiment.name}.dot", to_dot(experiment.graph, experiment.name))
            self.writer.submit("json", f"{experiment.name}.summary", experiment.summary())
        return experiment

    def result1(self, desk_scale: bool = False) -> GraphExperiment:
        """Hill's g-orbit deformed onto g-LPO1, next to the DPO/LPO2 birth-death point (planar count)"""
        experiment = GraphExperiment("result1")
        g_lpo1, g_anchor = self.deformed_start("hill_g")
        dpo, dpo_anchor = self.start("dpo", 1)
        self.continue_all(experiment, [
            BranchTask("g-LPO1", g_lpo1, direction=-1, target_gamma=3.0036, anchor=g_anchor),
            BranchTask("DPO-LPO2", dpo, direction=1, anchor=dpo_anchor, bounds=(3.00355, 3.0039),
                       detect=True, detectors=[fold_detector()]),
        ])
        return self.finish(experiment, planar_problem=True)

    def result2(self, desk_scale: bool = False) -> GraphExperiment:
        """Spatial eigenvalue-1 crossing on DPO and the mirror pair it spawns"""
        experiment = GraphExperiment("result2")
        dpo, anchor = self.start("dpo", 6)
        self.continue_all(experiment, [
            BranchTask("DPO", dpo, direction=-1, target_gamma=3.00105, anchor=anchor,
                       detect=True, detectors=[eigen_one_detector("spatial", True)]),
        ])
        points = DESK_POINTS if desk_scale else self.config.continuation.max_points
        for event in list(experiment.events):
            self.follow(experiment, event, max_points=points)
        return self.finish(experiment)

    def result3(self, desk_scale: bool = False) -> GraphExperiment:
        """Spatial bridge from the third cover of LPO2 to the fifth cover of DRO"""
        experiment = GraphExperiment("result3")
        lpo2, lpo2_anchor = self.start("lpo2", 2)
        dro, dro_anchor = self.start("dro", 3)
        self.continue_all(experiment, [
            BranchTask("LPO2", lpo2, direction=-1, target_gamma=3.0036, anchor=lpo2_anchor,
                       detect=True, detectors=[kfold_detector(1, 3, "spatial")]),
            BranchTask("DRO", dro, direction=-1, target_gamma=3.0005, anchor=dro_anchor,
                       detect=True, detectors=[kfold_detector(4, 5, "spatial")]),
        ])
        located = list(experiment.events)
        self.read_covers(experiment, located)

        bridge = load_fixture("lpo2_cover3_x")
        dro5 = next((e for e in located if e.branch == "DRO^5"), None)
        end = dro5.parameter if dro5 is not None else bridge.metadata["ends_at"]["gamma"]
        targets = {bridge.chart: end}
        points = DESK_POINTS if desk_scale else self.config.continuation.max_points
        for event in located:
            if event.branch == "LPO2^3":
                self.follow(experiment, event, max_points=points, targets=targets)
            elif not desk_scale:
                self.follow(experiment, event, max_points=points)

        # simple branches are represented by their covers
        covered = {e.branch.split("^")[0] for e in located if e.k > 1}
        experiment.branches = [b for b in experiment.branches if b.cover > 1 or b.name not in covered]
        return self.finish(experiment)
