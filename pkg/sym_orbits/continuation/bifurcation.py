"""Locating degenerate orbits and switching onto the families they spawn"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from sym_orbits.continuation.detectors import FOLD, Detector, fold_detector
from sym_orbits.continuation.family import (
    STEP_FAILURES,
    BranchPoint,
    FamilyBranch,
    FamilyContinuation,
    shooting_vector,
    state_from_vector,
)
from sym_orbits.core.errors import (
    AmbiguousJump,
    BisectionStalled,
    NoKernelDirection,
    SeedsFailedToConverge,
    SingularJacobian,
    StateJump,
    SymOrbitsError,
)
from sym_orbits.core.symplectic import TO_VELOCITY
from sym_orbits.floer.census import CensusEntry, InvarianceReport, OrbitCensus, check_invariance
from sym_orbits.index.conley_zehnder import IndexRecord
from sym_orbits.index.propagation import first_regular, step
from sym_orbits.shooting.charts import ShootingChart, get_chart
from sym_orbits.shooting.constraints import PseudoArclength
from sym_orbits.shooting.orbit import PeriodicOrbit, cover, is_planar_state, mirror
from sym_orbits.spectral.monodromy import monodromy
from sym_orbits.spectral.record import analyze
from sym_orbits.spectral.reduction import ReducedMonodromy, reduce
from sym_orbits.spectral.wonenburger import DEGENERATE_BAND

logger = logging.getLogger(__name__)

MAX_BISECTIONS = 80
FOLD_TOL = 1e-8

# planar chart -> (chart perturbed in z, chart perturbed in vz)
SPATIAL_CHARTS = {
    "planar": ("L_tilde", "L"),
    "kappa_planar": ("kappa_tilde", "kappa"),
}
_BLOCK_COORDINATES = {"planar": [0, 2], "spatial": [1, 3]}


@dataclass
class BifurcationEvent:
    """Degenerate orbit located on a branch, with any seeds switched from it"""
    kind: str
    parameter: float
    branch: str
    detector: str
    point: Optional[BranchPoint] = None
    k: int = 1
    l: int = 0
    block: Optional[str] = None
    bracket: Tuple[float, float] = (float("nan"), float("nan"))
    parameter_name: str = "gamma"
    seeds: List[PeriodicOrbit] = field(default_factory=list)
    amplitude: Optional[float] = None
    report: Optional[Dict[str, Any]] = None
    # bracketing sample positions on the parent branch
    positions: Optional[Tuple[int, int]] = None

    @property
    def orbit(self) -> Optional[PeriodicOrbit]:
        return self.point.orbit if self.point is not None else None

    @property
    def verified(self) -> bool:
        return bool(self.report and self.report.get("pass"))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "gamma_star": self.parameter,
            "parameter": self.parameter_name,
            "branch": self.branch,
            "detector": self.detector,
            "k": self.k,
            "l": self.l,
            "block": self.block,
            "bracket": list(self.bracket),
            "orbit": self.point.to_record() if self.point is not None else None,
            "seeds": [s.to_record() for s in self.seeds],
            "amplitude": self.amplitude,
            "verified": self.verified,
            "report": self.report,
        }


def _sign(value: float) -> bool:
    return value > 0


def locate_degeneracy(
    branch: FamilyBranch,
    detector: Detector,
    engine: FamilyContinuation,
    bracket: Optional[Tuple[int, int]] = None,
) -> BifurcationEvent:
    """Bisect a bracketed sign change, re-correcting the orbit at every midpoint"""
    if bracket is None:
        brackets = detector.brackets(branch)
        if not brackets:
            raise BisectionStalled(f"{detector.name} does not change sign along {branch.name}")
        bracket = brackets[0]
    i, j = bracket
    lo, hi = branch.points[i], branch.points[j]
    f_lo, f_hi = detector(lo), detector(hi)
    if f_lo is None or f_hi is None or _sign(f_lo) == _sign(f_hi):
        raise BisectionStalled(f"{detector.name} has no sign change between points {i} and {j}", bracket=[i, j])

    chart = get_chart(branch.chart)
    if detector.kind == FOLD:
        lo, hi = _bisect_arclength(chart, lo, hi, engine)
        f_lo, f_hi = lo.dgamma_ds, hi.dgamma_ds
    else:
        lo, f_lo, hi, f_hi = _bisect_gamma(chart, detector, lo, f_lo, hi, f_hi, engine)

    best = lo if abs(f_lo) <= abs(f_hi) else hi
    event = BifurcationEvent(
        kind=detector.kind,
        parameter=best.gamma,
        branch=branch.name,
        detector=detector.name,
        point=best,
        k=detector.k,
        l=detector.l,
        block=detector.block,
        bracket=(min(lo.gamma, hi.gamma), max(lo.gamma, hi.gamma)),
        positions=(i, j),
    )
    if engine.metrics is not None:
        engine.metrics.record_event(engine.metrics_key)
    logger.info(f"Located {event.kind} ({detector.name}) on {branch.name} at Gamma*={event.parameter:.10f}")
    return event


def _bisect_gamma(chart, detector, lo, f_lo, hi, f_hi, engine):
    tol = engine.options.bisection_tol
    for _ in range(MAX_BISECTIONS):
        if abs(hi.gamma - lo.gamma) < tol or min(abs(f_lo), abs(f_hi)) < DEGENERATE_BAND:
            return lo, f_lo, hi, f_hi
        gamma = 0.5 * (lo.gamma + hi.gamma)
        x = 0.5 * (shooting_vector(lo.orbit, chart) + shooting_vector(hi.orbit, chart))
        state, tau = state_from_vector(lo.orbit.state0, chart, x)
        try:
            orbit = engine.correct_at_gamma(chart, state, tau, gamma, lo.orbit.symmetries)
        except SymOrbitsError as e:
            raise BisectionStalled(f"correction failed at Gamma={gamma:.12f}: {e}", gamma=gamma) from e
        mid = engine.annotate(orbit, chart, lo.tangent)
        f_mid = detector(mid)
        if f_mid is None:
            raise BisectionStalled(f"{detector.name} undefined at Gamma={gamma:.12f}", gamma=gamma)
        if _sign(f_mid) == _sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    raise BisectionStalled(f"{detector.name} bracket did not shrink below {tol}", width=abs(hi.gamma - lo.gamma))


def _bisect_arclength(chart, lo: BranchPoint, hi: BranchPoint, engine):
    """Bisection in arclength along the tangent at ``lo``; Gamma is not monotone near a fold"""
    if lo.tangent is None:
        raise BisectionStalled("fold bracket has no tangent")
    x0, t0 = shooting_vector(lo.orbit, chart), lo.tangent
    s_lo, s_hi = 0.0, float(t0 @ (shooting_vector(hi.orbit, chart) - x0))
    for _ in range(MAX_BISECTIONS):
        if abs(hi.gamma - lo.gamma) < FOLD_TOL or abs(s_hi - s_lo) < engine.options.bisection_tol:
            return lo, hi
        s = 0.5 * (s_lo + s_hi)
        state, tau = state_from_vector(lo.orbit.state0, chart, x0 + s * t0)
        try:
            orbit = engine.corrector.correct(chart, state, tau, PseudoArclength(chart, x0, t0, s), lo.orbit.symmetries)
        except SymOrbitsError as e:
            raise BisectionStalled(f"correction failed at arclength {s:.3e}: {e}") from e
        mid = engine.annotate(orbit, chart, t0)
        if mid.dgamma_ds is None:
            raise BisectionStalled("no tangent inside the fold bracket")
        if _sign(mid.dgamma_ds) == _sign(lo.dgamma_ds):
            lo, s_lo = mid, s
        else:
            hi, s_hi = mid, s
    raise BisectionStalled("fold bracket did not shrink")


def detect_fold(branch: FamilyBranch, engine: FamilyContinuation) -> List[BifurcationEvent]:
    """Birth-death points: local extrema of Gamma along the branch"""
    detector = fold_detector()
    events = []
    for bracket in detector.brackets(branch):
        try:
            events.append(locate_degeneracy(branch, detector, engine, bracket))
        except BisectionStalled as e:
            i, j = bracket
            point = min((branch.points[i], branch.points[j]), key=lambda p: abs(p.dgamma_ds))
            logger.warning(f"Fold on {branch.name} not refined ({e}); using sample at Gamma={point.gamma:.8f}")
            events.append(BifurcationEvent(
                kind=FOLD, parameter=point.gamma, branch=branch.name, detector=detector.name, point=point,
                bracket=(min(branch.points[i].gamma, branch.points[j].gamma),
                         max(branch.points[i].gamma, branch.points[j].gamma)),
                positions=(i, j),
            ))
    return events


def kernel_directions(red: ReducedMonodromy, block: Optional[str], tol: float) -> List[NDArray]:
    """Phase-space (position-velocity) directions spanning ker(M_red - id) in a block"""
    n = red.dimension // 2
    if block in _BLOCK_COORDINATES and red.split:
        idx = _BLOCK_COORDINATES[block]
    else:
        idx = list(range(red.dimension))
    sub = red.matrix[np.ix_(idx, idx)] - np.eye(len(idx))
    _, s, vt = np.linalg.svd(sub)
    cut = tol * max(1.0, float(s[0]))
    kernel = [vt[i] for i in range(len(s)) if s[i] <= cut]
    if len(kernel) == len(idx) == 2:
        # whole block degenerate: use the block's own basis vectors
        kernel = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    logger.debug(f"Kernel of M_red - id: singular values {s}, {len(kernel)} direction(s) below {cut:.2e}")

    directions = []
    for v in kernel:
        r = np.zeros(red.dimension)
        r[idx] = v
        canonical = red.basis[:, :n] @ r[:n] + red.basis[:, n:] @ r[n:]
        delta = TO_VELOCITY @ canonical
        directions.append(delta / np.max(np.abs(delta)))
    return directions


def seed_chart(chart: ShootingChart, delta: NDArray) -> ShootingChart:
    """Chart on which a perturbation of a planar orbit lives"""
    spatial = max(abs(delta[2]), abs(delta[5]))
    if chart.name in SPATIAL_CHARTS and spatial > 1e-8:
        z_chart, vz_chart = SPATIAL_CHARTS[chart.name]
        return get_chart(z_chart if abs(delta[2]) >= abs(delta[5]) else vz_chart)
    return chart


def _converge_seed(
    engine: FamilyContinuation,
    base: PeriodicOrbit,
    chart: ShootingChart,
    delta: NDArray,
    amplitude: float,
) -> PeriodicOrbit:
    """Correct base + amplitude * delta, with the displacement along delta held fixed"""
    anchor = shooting_vector(base, chart)
    direction = np.append(delta[list(chart.unknowns)], 0.0)
    norm = float(np.linalg.norm(direction))
    if norm < 1e-8:
        raise NoKernelDirection(f"kernel direction vanishes on chart {chart.name}", chart=chart.name)
    direction /= norm
    in_plane = chart.planar

    for attempt in range(engine.options.switch_attempts):
        state, tau = state_from_vector(base.state0, chart, anchor + amplitude * direction)
        try:
            orbit = engine.corrector.correct(
                chart, state, tau, PseudoArclength(chart, anchor, direction, amplitude), (chart.symmetry,)
            )
        except SingularJacobian:
            amplitude *= 4.0
            logger.debug(f"Seed on {chart.name}: singular Jacobian, amplitude grown to {amplitude:.2e}")
            continue
        except STEP_FAILURES as e:
            amplitude *= 0.5
            logger.debug(f"Seed on {chart.name}: {e}; amplitude shrunk to {amplitude:.2e}")
            continue
        if in_plane and orbit.distance(base) < 0.1 * amplitude:
            amplitude *= 4.0
            continue
        orbit.metadata["switch_amplitude"] = amplitude
        orbit.metadata["switch_attempt"] = attempt
        return orbit
    raise SeedsFailedToConverge(f"no seed on {chart.name} converged", chart=chart.name, amplitude=amplitude)


def switch_branch(
    event: BifurcationEvent,
    engine: FamilyContinuation,
    amplitude: Optional[float] = None,
) -> List[PeriodicOrbit]:
    """Seeds of the families bifurcating at an event, each with its mirror image when spatial"""
    if event.orbit is None:
        raise NoKernelDirection("event carries no degenerate orbit")
    amplitude = amplitude or engine.options.switch_amplitude
    base = cover(event.orbit, event.k) if event.k > 1 else event.orbit
    red = reduce(monodromy(base, engine.propagator), base)
    directions = kernel_directions(red, event.block, engine.options.kernel_tol)
    if not directions:
        raise NoKernelDirection(f"M_red - id has no kernel at Gamma={event.parameter:.10f}", gamma=event.parameter)

    base = PeriodicOrbit(
        model=base.model, state0=base.state0, period=base.period, gamma=base.gamma,
        symmetries=base.symmetries, planar=base.planar, chart=base.chart,
    )
    seeds: List[PeriodicOrbit] = []
    failures = []
    parent_chart = get_chart(event.orbit.chart)
    for delta in directions:
        chart = seed_chart(parent_chart, delta)
        try:
            orbit = _converge_seed(engine, base, chart, delta, amplitude)
        except (NoKernelDirection, SeedsFailedToConverge) as e:
            failures.append(str(e))
            logger.warning(f"Branch switch at Gamma*={event.parameter:.10f}: {e}")
            continue
        orbit.metadata.update({"parent": event.branch, "parent_cover": event.k, "gamma_star": event.parameter})
        seeds.append(orbit)
        event.amplitude = orbit.metadata["switch_amplitude"]
        if not is_planar_state(orbit.state0):
            twin = mirror(orbit)
            twin.metadata["mirror_of"] = orbit.chart
            seeds.append(twin)
    if not seeds:
        raise SeedsFailedToConverge("; ".join(failures) or "no seed converged", gamma=event.parameter)
    event.seeds = seeds
    logger.info(f"Switched onto {len(seeds)} seed(s) at Gamma*={event.parameter:.10f} ({event.kind}, k={event.k})")
    return seeds


def outward_direction(event: BifurcationEvent, seed: PeriodicOrbit, engine: FamilyContinuation) -> int:
    """Gamma direction carrying a seed away from the orbit it bifurcated from"""
    fallback = 1 if seed.gamma >= event.parameter else -1
    if event.orbit is None:
        return fallback
    chart = get_chart(seed.chart)
    base = cover(event.orbit, event.k) if event.k > 1 else event.orbit
    try:
        tangent = engine.tangent(chart, seed)
    except SymOrbitsError as e:
        logger.debug(f"No tangent at the {seed.chart} seed ({e}); leaving Gamma*={event.parameter:.10f} by Gamma")
        return fallback
    if tangent @ (shooting_vector(seed, chart) - shooting_vector(base, chart)) < 0:
        tangent = -tangent
    slope = engine.dgamma_ds(chart, seed, tangent)
    if abs(slope) < FOLD_TOL:
        return fallback
    return 1 if slope > 0 else -1


def inherit_index(
    event: BifurcationEvent,
    parent: FamilyBranch,
    child: FamilyBranch,
    engine: FamilyContinuation,
) -> Optional[IndexRecord]:
    """Index of a switched branch carried over from its parent across the event.

    Next to the event the child's monodromy differs from that of the parent's
    k-fold cover only in the block that degenerated, so the jump rule applied
    between the parent on either side and the child's first non-degenerate
    orbit gives the child's index. The record is attached to the child.
    """
    try:
        position = first_regular(child.configs())
    except AmbiguousJump as e:
        logger.warning(f"{child.name}: no index inherited ({e})")
        return None
    target = child.points[position].config

    for side in event.positions or ():
        point = parent.points[side]
        record = parent.index_at(side)
        if record is None or point.config.degenerate:
            continue
        try:
            config = point.config
            if event.k > 1:
                record = record.for_cover(event.k, config)
                config = analyze(cover(point.orbit, event.k), engine.propagator).config
            if config.degenerate:
                continue
            if record.planar is not None and target.planar is not None:
                start = IndexRecord.split(record.planar, record.spatial)
            else:
                start = IndexRecord(total=record.total)
            inherited = step(start, config, target)
        except (SymOrbitsError, ValueError) as e:
            logger.debug(f"{child.name}: parent side {side} gives no index ({e})")
            continue
        child.attach_indices(inherited, position)
        logger.info(
            f"{child.name}: index {inherited.total} inherited from {parent.name} "
            f"(cover {event.k}, index {record.total}) across Gamma*={event.parameter:.10f}"
        )
        return inherited
    logger.warning(f"{child.name}: no index inherited from {parent.name}")
    return None


def _on_chord(x: NDArray, xa: NDArray, xb: NDArray) -> bool:
    chord = xb - xa
    length2 = float(chord @ chord)
    if length2 == 0.0:
        return True
    s = float((x - xa) @ chord) / length2
    off = float(np.linalg.norm(x - xa - s * chord))
    return -0.5 <= s <= 1.5 and off <= np.sqrt(length2)


def _census_orbit(engine, chart, branch: FamilyBranch, a: PeriodicOrbit, b: PeriodicOrbit, gamma: float, w: float):
    """Branch orbit between samples a and b at the given Gamma.

    Near a fold or a pitchfork the fixed-Gamma correction can land on the
    other leg or on the parent; the chord coordinate is then held instead.
    """
    xa, xb = shooting_vector(a, chart), shooting_vector(b, chart)
    state, tau = state_from_vector(b.state0, chart, (1 - w) * xa + w * xb)
    symmetries = branch.points[0].orbit.symmetries
    orbit = engine.correct_at_gamma(chart, state, tau, gamma, symmetries)
    collapsed = not branch.planar and is_planar_state(orbit.state0)
    if _on_chord(shooting_vector(orbit, chart), xa, xb) and not collapsed:
        return orbit
    length = float(np.linalg.norm(xb - xa))
    logger.debug(f"{branch.name}: fixed-Gamma census orbit left its segment; holding the chord coordinate")
    orbit = engine.corrector.correct(
        chart, state, tau, PseudoArclength(chart, xa, (xb - xa) / length, w * length), symmetries
    )
    if not branch.planar and is_planar_state(orbit.state0):
        raise StateJump(f"{branch.name} collapsed onto its parent at Gamma={gamma:.10f}")
    return orbit


def census_at(
    branches: Sequence[FamilyBranch],
    gamma: float,
    side: str,
    engine: FamilyContinuation,
    planar_problem: bool = False,
) -> OrbitCensus:
    """Every branch orbit at the given Gamma, corrected there and classified.

    A switched branch also covers the stretch between the orbit it
    bifurcated from and its first point.
    """
    census = OrbitCensus(side=side)
    for branch in branches:
        chart = get_chart(branch.chart)
        orbits = [p.orbit for p in branch.points]
        shift = 0
        if branch.origin is not None and orbits:
            orbits.insert(0, branch.origin)
            shift = 1
        for i in range(len(orbits) - 1):
            a, b = orbits[i], orbits[i + 1]
            if (a.gamma - gamma) * (b.gamma - gamma) > 0 or a.gamma == b.gamma:
                continue
            w = (gamma - a.gamma) / (b.gamma - a.gamma)
            try:
                orbit = _census_orbit(engine, chart, branch, a, b, gamma, w)
                simple = analyze(orbit, engine.propagator).config
                config = simple if branch.cover == 1 else analyze(cover(orbit, branch.cover), engine.propagator).config
            except SymOrbitsError as e:
                logger.warning(f"{branch.name}: no census orbit at Gamma={gamma:.10f} ({e})")
                continue
            if config.degenerate:
                logger.warning(f"{branch.name}: census orbit at Gamma={gamma:.10f} is degenerate; shrink the window")
                continue
            position = max(0, (i if w < 0.5 else i + 1) - shift)
            census.add(CensusEntry.from_config(
                config,
                cover=branch.cover,
                underlying=simple,
                cz=_census_index(branch, position, simple, planar_problem),
                planar_problem=planar_problem,
                label=f"{branch.name}#{position}",
            ))
    return census


def _census_index(branch: FamilyBranch, position: int, simple, planar_problem: bool) -> Optional[int]:
    record = branch.index_at(position)
    if record is None:
        return None
    if branch.cover > 1:
        try:
            record = record.for_cover(branch.cover, simple)
        except (SymOrbitsError, ValueError):
            return None
    return record.planar if planar_problem else record.total


def verify_event(
    event: BifurcationEvent,
    branches: Sequence[FamilyBranch],
    engine: FamilyContinuation,
    events: Sequence[BifurcationEvent] = (),
    planar_problem: Optional[bool] = None,
) -> Optional[InvarianceReport]:
    """Floer-number check on censuses at Gamma* -+ delta; the window halves around neighbouring events"""
    delta = engine.options.delta_window
    others = [e.parameter for e in events if e is not event]
    while any(abs(p - event.parameter) <= delta for p in others) and delta > engine.options.bisection_tol:
        delta *= 0.5
    if planar_problem is None:
        planar_problem = all(b.planar for b in branches) and event.block == "planar"
    before = census_at(branches, event.parameter - delta, "before", engine, planar_problem)
    after = census_at(branches, event.parameter + delta, "after", engine, planar_problem)
    try:
        report = check_invariance(event, before, after)
    except SymOrbitsError as e:
        logger.error(f"Floer check at Gamma*={event.parameter:.10f} failed: {e}", exc_info=True)
        event.report = {"gamma_star": event.parameter, "pass": False, "delta": delta, "error": e.to_dict(),
                        "censuses": {"before": before.to_dict(), "after": after.to_dict()}}
        return None
    event.report = report.to_dict()
    event.report["delta"] = delta
    if not report.passed:
        logger.warning(f"Event at Gamma*={event.parameter:.10f} on {event.branch} left unverified")
    return report
