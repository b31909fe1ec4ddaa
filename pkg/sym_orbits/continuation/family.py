"""Family continuation in the Jacobi constant"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from sym_orbits.config.models import ContinuationConfig, ToleranceConfig
from sym_orbits.core.errors import (
    AmbiguousJump,
    BranchTerminated,
    CollisionDuringFlow,
    CollisionProximity,
    EventNotFound,
    NoConvergence,
    SingularJacobian,
    StateJump,
    StepSizeUnderflow,
    SymOrbitsError,
)
from sym_orbits.core.interfaces import DynamicalModel
from sym_orbits.diagram.broucke import StabilityPoint, stability_point
from sym_orbits.index.conley_zehnder import IndexRecord
from sym_orbits.index.propagation import propagate_index
from sym_orbits.index.rotation import index_from_rotation
from sym_orbits.shooting.charts import ShootingChart, get_chart
from sym_orbits.shooting.constraints import FixedGamma, PseudoArclength
from sym_orbits.shooting.corrector import Corrector, ShootingProblem
from sym_orbits.shooting.orbit import PeriodicOrbit, mirror
from sym_orbits.spectral.classify import DEGENERATE, EigenConfig
from sym_orbits.spectral.record import SpectralRecord, analyze

logger = logging.getLogger(__name__)

# failures that shrink the step instead of ending the branch
STEP_FAILURES = (
    NoConvergence,
    SingularJacobian,
    CollisionDuringFlow,
    CollisionProximity,
    StepSizeUnderflow,
    EventNotFound,
)
TARGET_TOL = 1e-14


@dataclass
class BranchPoint:
    """Accepted continuation point with everything computed about it"""
    orbit: PeriodicOrbit
    spectral: Optional[SpectralRecord] = None
    index: Optional[IndexRecord] = None
    stability: Optional[StabilityPoint] = None
    tangent: Optional[NDArray] = None
    dgamma_ds: Optional[float] = None
    arclength: float = 0.0

    @property
    def gamma(self) -> float:
        return self.orbit.gamma

    @property
    def config(self) -> EigenConfig:
        if self.spectral is None:
            return EigenConfig(config=DEGENERATE)
        return self.spectral.config

    def to_record(self) -> Dict[str, Any]:
        record = self.orbit.to_record()
        record["residual"] = float(self.orbit.residual)
        record["arclength"] = float(self.arclength)
        if self.dgamma_ds is not None:
            record["dgamma_ds"] = float(self.dgamma_ds)
        if self.spectral is not None:
            record["spectral"] = self.spectral.to_dict()
        if self.index is not None:
            record["index"] = self.index.to_dict()
        if self.stability is not None:
            record["stability"] = {
                "planar": self.stability.planar,
                "spatial": list(self.stability.spatial) if self.stability.spatial is not None else None,
            }
        return record


@dataclass
class FamilyBranch:
    """Ordered continuation path of one family"""
    name: str
    chart: str
    points: List[BranchPoint] = field(default_factory=list)
    parameter: str = "gamma"
    cover: int = 1
    mirrored: bool = False
    steps: List[float] = field(default_factory=list)
    termination: Optional[str] = None
    metadata: Dict[str, Any] = field(default_factory=dict)
    # orbit (or k-fold cover) a switched branch bifurcated from
    origin: Optional[PeriodicOrbit] = None

    def __len__(self) -> int:
        return len(self.points)

    def append(self, point: BranchPoint) -> None:
        self.points.append(point)

    @property
    def orbits(self) -> List[PeriodicOrbit]:
        return [p.orbit for p in self.points]

    @property
    def gammas(self) -> List[float]:
        return [p.gamma for p in self.points]

    @property
    def planar(self) -> bool:
        return all(p.orbit.planar for p in self.points)

    def configs(self) -> List[EigenConfig]:
        """Configurations in branch order; points without spectra count as degenerate"""
        return [p.config for p in self.points]

    def stability_path(self) -> List[Tuple[float, StabilityPoint]]:
        return [(p.gamma, p.stability) for p in self.points if p.stability is not None]

    def attach_indices(self, anchor: IndexRecord, position: int = 0) -> None:
        """Carry an anchored index record along the branch"""
        for point, record in zip(self.points, propagate_index(self, anchor, position)):
            point.index = record

    def index_at(self, position: int) -> Optional[IndexRecord]:
        """Index of the point or of the nearest non-degenerate neighbour"""
        for offset in range(len(self.points)):
            for i in (position - offset, position + offset):
                if 0 <= i < len(self.points) and self.points[i].index is not None:
                    return self.points[i].index
        return None

    def to_records(self) -> List[Dict[str, Any]]:
        records = []
        for point in self.points:
            record = point.to_record()
            record["branch"] = self.name
            records.append(record)
        return records


def shooting_vector(orbit: PeriodicOrbit, chart: ShootingChart) -> NDArray:
    """(chart unknowns, tau) of an orbit"""
    return np.append(orbit.state0[list(chart.unknowns)], 0.5 * orbit.period)


def state_from_vector(base: NDArray, chart: ShootingChart, x: NDArray) -> Tuple[NDArray, float]:
    state = np.array(base, dtype=float)
    state[list(chart.unknowns)] = x[:-1]
    return state, float(x[-1])


class FamilyContinuation:
    """Adaptive continuation of one family with fold handling"""

    def __init__(
        self,
        model: DynamicalModel,
        tolerances: Optional[ToleranceConfig] = None,
        options: Optional[ContinuationConfig] = None,
        metrics=None,
        metrics_key: str = "continuation",
    ):
        self.model = model
        self.options = options or ContinuationConfig()
        self.metrics = metrics
        self.metrics_key = metrics_key
        self.corrector = Corrector(model, tolerances, metrics, metrics_key)
        self.propagator = self.corrector.propagator

    def tangent(self, chart: ShootingChart, orbit: PeriodicOrbit) -> NDArray:
        """Unit tangent of the family in (unknowns, tau)"""
        problem = ShootingProblem(chart, FixedGamma(orbit.gamma), orbit.state0, self.propagator)
        return problem.tangent(shooting_vector(orbit, chart))

    def dgamma_ds(self, chart: ShootingChart, orbit: PeriodicOrbit, tangent: NDArray) -> float:
        grad = self.model.gamma_gradient(orbit.state0)
        return float(grad[list(chart.unknowns)] @ tangent[:-1])

    def annotate(
        self,
        orbit: PeriodicOrbit,
        chart: ShootingChart,
        previous: Optional[NDArray] = None,
        direction: int = 1,
    ) -> BranchPoint:
        """Spectral data, stability point and oriented tangent of a corrected orbit"""
        point = BranchPoint(orbit=orbit)
        try:
            point.spectral = analyze(orbit, self.propagator)
            source = point.spectral.blocks0 or point.spectral.reduced
            point.stability = stability_point(source)
        except SymOrbitsError as e:
            logger.warning(f"No spectral data at Gamma={orbit.gamma:.8f}: {e}")
        try:
            tangent = self.tangent(chart, orbit)
        except SymOrbitsError as e:
            logger.warning(f"No family tangent at Gamma={orbit.gamma:.8f}: {e}")
            return point
        slope = self.dgamma_ds(chart, orbit, tangent)
        if previous is not None:
            if tangent @ previous < 0:
                tangent, slope = -tangent, -slope
        elif slope * direction < 0:
            tangent, slope = -tangent, -slope
        point.tangent = tangent
        point.dgamma_ds = slope
        return point

    def correct_at_gamma(
        self,
        chart: ShootingChart,
        state: NDArray,
        tau: float,
        gamma: float,
        symmetries=None,
    ) -> PeriodicOrbit:
        return self.corrector.correct(chart, state, tau, FixedGamma(gamma), symmetries)

    def predict(self, branch: FamilyBranch, chart: ShootingChart, gamma: float) -> Tuple[NDArray, float]:
        """Secant predictor in Gamma, tangent predictor for the first step"""
        last = branch.points[-1]
        x_last = shooting_vector(last.orbit, chart)
        if len(branch) >= 2:
            prev = branch.points[-2]
            dg = last.gamma - prev.gamma
            if abs(dg) > TARGET_TOL:
                x_prev = shooting_vector(prev.orbit, chart)
                return state_from_vector(last.orbit.state0, chart, x_last + (gamma - last.gamma) / dg * (x_last - x_prev))
        if last.tangent is not None and last.dgamma_ds and abs(last.dgamma_ds) > 1e-12:
            return state_from_vector(last.orbit.state0, chart, x_last + (gamma - last.gamma) / last.dgamma_ds * last.tangent)
        return last.orbit.state0.copy(), 0.5 * last.orbit.period

    def _check_jump(self, orbit: PeriodicOrbit, previous: PeriodicOrbit) -> None:
        jump = orbit.distance(previous)
        if jump > self.options.max_state_jump:
            raise StateJump(f"state jump {jump:.3e} above {self.options.max_state_jump}", jump=jump)

    def continue_family(
        self,
        start: PeriodicOrbit,
        direction: int = 1,
        target_gamma: Optional[float] = None,
        name: Optional[str] = None,
        anchor: Optional[IndexRecord] = None,
        bounds: Optional[Tuple[float, float]] = None,
        strict: bool = True,
    ) -> FamilyBranch:
        """Continue a converged orbit in Gamma.

        Natural steps in Gamma switch to pseudo-arclength when the family
        turns (|dGamma/ds| drops below the trigger fraction of its starting
        value) and back once it has turned. With ``strict`` an early stop
        raises BranchTerminated carrying the partial branch as ``branch``.
        """
        opts = self.options
        chart = get_chart(start.chart)
        if target_gamma is not None:
            direction = 1 if target_gamma >= start.gamma else -1
        branch = FamilyBranch(name=name or start.metadata.get("family", chart.name), chart=chart.name)
        branch.append(self.annotate(start, chart, direction=direction))
        logger.info(f"Continuing {branch.name} from Gamma={start.gamma:.8f} (direction {direction:+d})")

        reference = abs(branch.points[0].dgamma_ds or 0.0)
        step = opts.initial_step
        mode = "natural"
        easy = 0
        symmetries = start.symmetries

        while len(branch) < opts.max_points:
            current = branch.points[-1]
            if target_gamma is not None and mode == "natural" and abs(target_gamma - current.gamma) <= TARGET_TOL:
                branch.termination = "target"
                break
            h = step
            try:
                if mode == "natural":
                    if target_gamma is not None:
                        h = min(step, abs(target_gamma - current.gamma))
                    gamma = current.gamma + direction * h
                    if bounds is not None and not bounds[0] <= gamma <= bounds[1]:
                        branch.termination = "left domain"
                        break
                    state, tau = self.predict(branch, chart, gamma)
                    orbit = self.correct_at_gamma(chart, state, tau, gamma, symmetries)
                else:
                    x0 = shooting_vector(current.orbit, chart)
                    state, tau = state_from_vector(current.orbit.state0, chart, x0 + step * current.tangent)
                    orbit = self.corrector.correct(
                        chart, state, tau, PseudoArclength(chart, x0, current.tangent, step), symmetries
                    )
                self._check_jump(orbit, current.orbit)
            except STEP_FAILURES + (StateJump,) as e:
                step *= 0.5
                easy = 0
                logger.debug(f"Step rejected at Gamma={current.gamma:.10f} ({e}); step now {step:.3e}")
                if step < opts.min_step:
                    collided = isinstance(e, (CollisionDuringFlow, CollisionProximity))
                    branch.termination = "collision" if collided else "step underflow"
                    break
                continue

            point = self.annotate(orbit, chart, current.tangent, direction)
            point.arclength = current.arclength + float(np.linalg.norm(
                shooting_vector(orbit, chart) - shooting_vector(current.orbit, chart)
            ))
            branch.append(point)
            branch.steps.append(h)

            if orbit.metadata.get("newton_iterations", 0) < opts.easy_iterations:
                easy += 1
                if easy >= opts.easy_streak:
                    step = min(2.0 * step, opts.max_step)
                    easy = 0
            else:
                easy = 0

            slope = point.dgamma_ds
            if slope is None:
                continue
            if mode == "natural" and reference and abs(slope) < opts.arclength_trigger * reference:
                mode = "arclength"
                logger.info(f"{branch.name}: switching to pseudo-arclength at Gamma={point.gamma:.8f}")
            elif mode == "arclength" and abs(slope) >= opts.arclength_trigger * reference:
                mode = "natural"
                direction = 1 if slope > 0 else -1
                logger.info(f"{branch.name}: back to natural steps at Gamma={point.gamma:.8f}, direction {direction:+d}")

            if mode == "arclength" and target_gamma is not None and \
                    (point.gamma - target_gamma) * (current.gamma - target_gamma) < 0:
                self._land_on_target(branch, chart, target_gamma, symmetries)
                branch.termination = "target"
                break
        else:
            branch.termination = "max points"

        if anchor is not None:
            try:
                branch.attach_indices(anchor)
            except AmbiguousJump as e:
                logger.warning(f"{branch.name}: anchor not attached ({e})")
        elif branch.planar and not branch.points[0].config.degenerate:
            try:
                branch.attach_indices(index_from_rotation(start, branch.points[0].config, self.propagator))
            except (SymOrbitsError, ValueError) as e:
                logger.warning(f"{branch.name}: no index anchor ({e})")

        logger.info(
            f"Branch {branch.name} finished with {len(branch)} point(s) at Gamma={branch.points[-1].gamma:.8f} "
            f"({branch.termination})"
        )
        if strict and branch.termination in ("collision", "step underflow", "left domain"):
            error = BranchTerminated(branch.termination, branch.points[-1].gamma)
            error.branch = branch
            raise error
        return branch

    def _land_on_target(self, branch: FamilyBranch, chart: ShootingChart, target: float, symmetries) -> None:
        last, prev = branch.points[-1], branch.points[-2]
        w = (target - prev.gamma) / (last.gamma - prev.gamma)
        x = (1 - w) * shooting_vector(prev.orbit, chart) + w * shooting_vector(last.orbit, chart)
        state, tau = state_from_vector(last.orbit.state0, chart, x)
        orbit = self.correct_at_gamma(chart, state, tau, target, symmetries)
        branch.points[-1] = self.annotate(orbit, chart, prev.tangent)
        branch.points[-1].arclength = last.arclength


def continue_family(
    start: PeriodicOrbit,
    direction: int = 1,
    target_gamma: Optional[float] = None,
    tolerances: Optional[ToleranceConfig] = None,
    options: Optional[ContinuationConfig] = None,
    metrics=None,
    **kwargs,
) -> FamilyBranch:
    """Continue ``start`` with a fresh continuation engine on its own model"""
    engine = FamilyContinuation(start.model, tolerances, options, metrics)
    return engine.continue_family(start, direction, target_gamma, **kwargs)


def mirror_branch(branch: FamilyBranch) -> FamilyBranch:
    """Image of a branch under the reflection through the xy-plane"""
    points = [
        BranchPoint(
            orbit=mirror(p.orbit),
            spectral=p.spectral,
            index=p.index,
            stability=p.stability,
            dgamma_ds=p.dgamma_ds,
            arclength=p.arclength,
        )
        for p in branch.points
    ]
    return FamilyBranch(
        name=f"sigma({branch.name})",
        chart=branch.chart,
        points=points,
        parameter=branch.parameter,
        cover=branch.cover,
        mirrored=not branch.mirrored,
        steps=list(branch.steps),
        termination=branch.termination,
        metadata=dict(branch.metadata),
        origin=branch.origin,
    )


def cover_branch(branch: FamilyBranch, k: int) -> FamilyBranch:
    """Same orbits read as k-fold covers"""
    if k < 1:
        raise ValueError(f"cover multiplicity must be >= 1, got {k}")
    return FamilyBranch(
        name=branch.name if k == 1 else f"{branch.name}^{k}",
        chart=branch.chart,
        points=list(branch.points),
        parameter=branch.parameter,
        cover=branch.cover * k,
        mirrored=branch.mirrored,
        steps=list(branch.steps),
        termination=branch.termination,
        metadata=dict(branch.metadata),
    )
