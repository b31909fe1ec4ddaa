"""Parallel continuation of independent branches"""
import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

from sym_orbits.config.models import ContinuationConfig, ToleranceConfig, WorkerPoolConfig
from sym_orbits.continuation.bifurcation import BifurcationEvent, detect_fold, inherit_index, locate_degeneracy
from sym_orbits.continuation.detectors import FOLD, Detector, default_detectors, scan
from sym_orbits.continuation.family import FamilyBranch, FamilyContinuation
from sym_orbits.core.errors import BisectionStalled, BranchTerminated, SymOrbitsError
from sym_orbits.index.conley_zehnder import IndexRecord
from sym_orbits.shooting.orbit import PeriodicOrbit, cover

logger = logging.getLogger(__name__)


@dataclass
class BranchTask:
    """One family to continue from a converged orbit"""
    name: str
    start: PeriodicOrbit
    direction: int = 1
    target_gamma: Optional[float] = None
    anchor: Optional[IndexRecord] = None
    bounds: Optional[Tuple[float, float]] = None
    detect: bool = False
    detectors: Optional[List[Detector]] = None  # defaults to the full set for the branch
    max_points: Optional[int] = None
    # switched branches: the event they leave and the branch it sits on
    event: Optional[BifurcationEvent] = None
    parent: Optional[FamilyBranch] = None


@dataclass
class BranchResult:
    task: BranchTask
    branch: Optional[FamilyBranch] = None
    events: List[BifurcationEvent] = field(default_factory=list)
    error: Optional[Dict[str, Any]] = None

    @property
    def ok(self) -> bool:
        return self.error is None


class BranchPool:
    """Bounded worker pool running branch continuations side by side.

    Every task gets its own continuation engine; results go through the
    catalog writer when one is given, so files are written by a single thread.
    """

    def __init__(
        self,
        workers: Optional[WorkerPoolConfig] = None,
        tolerances: Optional[ToleranceConfig] = None,
        options: Optional[ContinuationConfig] = None,
        metrics=None,
        writer=None,
    ):
        self.workers = workers or WorkerPoolConfig()
        self.tolerances = tolerances
        self.options = options or ContinuationConfig()
        self.metrics = metrics
        self.writer = writer

    def engine_for(self, task: BranchTask) -> FamilyContinuation:
        options = self.options if task.max_points is None else replace(self.options, max_points=task.max_points)
        return FamilyContinuation(task.start.model, self.tolerances, options, self.metrics, metrics_key=task.name)

    def _detect(self, task: BranchTask, branch: FamilyBranch, engine: FamilyContinuation) -> List[BifurcationEvent]:
        detectors = task.detectors if task.detectors is not None else default_detectors(branch, self.options.k_max)
        events = detect_fold(branch, engine) if any(d.kind == FOLD for d in detectors) else []
        detectors = [d for d in detectors if d.kind != FOLD]
        for detector, bracket in scan(branch, detectors):
            try:
                events.append(locate_degeneracy(branch, detector, engine, bracket))
            except BisectionStalled as e:
                logger.warning(f"{branch.name}: {detector.name} bracket {bracket} not refined ({e})")
        events.sort(key=lambda e: e.parameter)
        return events

    @staticmethod
    def _link(task: BranchTask, branch: FamilyBranch, engine: FamilyContinuation) -> None:
        """Tie a switched branch to the event it leaves and give it an index"""
        event = task.event
        if event.orbit is not None:
            branch.origin = cover(event.orbit, event.k) if event.k > 1 else event.orbit
        if task.parent is None or any(p.index is not None for p in branch.points):
            return
        try:
            inherit_index(event, task.parent, branch, engine)
        except Exception as e:
            logger.error(f"Error inheriting the index of {task.name}: {e}", exc_info=True)

    def run_task(self, task: BranchTask) -> BranchResult:
        """Continue one branch; failures are logged and returned, never raised"""
        result = BranchResult(task)
        engine = self.engine_for(task)
        try:
            result.branch = engine.continue_family(
                task.start, task.direction, task.target_gamma,
                name=task.name, anchor=task.anchor, bounds=task.bounds, strict=True,
            )
        except BranchTerminated as e:
            logger.warning(f"Branch {task.name} terminated: {e}")
            result.branch = getattr(e, "branch", None)
            result.error = e.to_dict()
        except Exception as e:
            logger.error(f"Error continuing branch {task.name}: {e}", exc_info=True)
            result.error = e.to_dict() if isinstance(e, SymOrbitsError) else {"error": type(e).__name__, "message": str(e)}
            if self.metrics is not None:
                self.metrics.record_failure(task.name)
            return result

        if task.event is not None and result.branch is not None:
            self._link(task, result.branch, engine)

        if task.detect and result.branch is not None:
            try:
                result.events = self._detect(task, result.branch, engine)
            except Exception as e:
                logger.error(f"Error detecting events on {task.name}: {e}", exc_info=True)
                if self.metrics is not None:
                    self.metrics.record_failure(task.name)

        if self.writer is not None and result.branch is not None:
            self.writer.submit("branch", task.name, result.branch)
            if task.detect:
                self.writer.submit("events", f"{task.name}.events", result.events)
        return result

    def run(self, tasks: Sequence[BranchTask]) -> List[BranchResult]:
        """Results in task order"""
        if not tasks:
            return []
        logger.info(f"Continuing {len(tasks)} branch(es) on {self.workers.max_workers} worker(s)")
        results: Dict[int, BranchResult] = {}
        with ThreadPoolExecutor(max_workers=self.workers.max_workers, thread_name_prefix="branch-") as executor:
            futures = {executor.submit(self.run_task, task): i for i, task in enumerate(tasks)}
            for future in as_completed(futures):
                results[futures[future]] = future.result()
        failed = sum(1 for r in results.values() if not r.ok)
        logger.info(f"Branch pool finished: {len(tasks) - failed} complete, {failed} stopped early")
        return [results[i] for i in range(len(tasks))]
