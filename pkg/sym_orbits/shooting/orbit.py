"""Periodic orbit records and the operations that act on them directly"""
import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from sym_orbits.core.errors import EventNotFound, NotSymmetric
from sym_orbits.core.interfaces import DynamicalModel
from sym_orbits.dynamics.symmetry import SYMMETRIES, get_symmetry
from sym_orbits.flows.events import EventSpec
from sym_orbits.flows.propagator import Propagator

logger = logging.getLogger(__name__)

PLANAR_TOL = 1e-13


@dataclass
class PeriodicOrbit:
    """Converged periodic orbit.

    ``period`` is the period of this (possibly multiply covered) orbit, so
    the underlying simple orbit has period ``period / cover``.
    """
    model: DynamicalModel
    state0: NDArray
    period: float
    gamma: float
    symmetries: Tuple[str, ...] = ("rho",)
    cover: int = 1
    planar: bool = True
    chart: str = "planar"
    residual: float = 0.0
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.state0 = np.asarray(self.state0, dtype=float)
        if self.cover < 1:
            raise ValueError(f"cover must be a positive integer, got {self.cover}")

    @property
    def simple_period(self) -> float:
        return self.period / self.cover

    @property
    def half_period(self) -> float:
        """Time from the first symmetric point to the second on the simple orbit"""
        return 0.5 * self.simple_period

    def to_record(self) -> Dict[str, Any]:
        """Orbit record as stored one per line"""
        record = {
            "model": self.model.to_dict(),
            "gamma": float(self.gamma),
            "state0": [float(v) for v in self.state0],
            "period": float(self.period),
            "symmetries": list(self.symmetries),
            "cover": int(self.cover),
            "planar": bool(self.planar),
            "chart": self.chart,
        }
        if "symmetric_states" in self.metadata:
            record["symmetric_states"] = [[float(v) for v in s] for s in self.metadata["symmetric_states"]]
        return record

    def distance(self, other: 'PeriodicOrbit') -> float:
        """Max-norm distance between initial states"""
        return float(np.max(np.abs(self.state0 - other.state0)))


def is_planar_state(state: NDArray, tol: float = PLANAR_TOL) -> bool:
    """z = vz = 0"""
    return abs(state[2]) <= tol and abs(state[5]) <= tol


def cover(orbit: PeriodicOrbit, k: int) -> PeriodicOrbit:
    """k-fold cover: same initial state, k times the period"""
    if k < 1:
        raise ValueError(f"cover multiplicity must be >= 1, got {k}")
    if k == 1:
        return orbit
    return replace(orbit, period=orbit.period * k, cover=orbit.cover * k, metadata=dict(orbit.metadata))


def mirror(orbit: PeriodicOrbit) -> PeriodicOrbit:
    """Image under the reflection sigma through the xy-plane"""
    sigma = SYMMETRIES["sigma"]
    return replace(orbit, state0=sigma.apply(orbit.state0), metadata=dict(orbit.metadata))


def symmetric_points(
    orbit: PeriodicOrbit,
    symmetry: Optional[str] = None,
    propagator: Optional[Propagator] = None,
    tol: float = 1e-10,
) -> List[NDArray]:
    """Intersections of the orbit with the fixed locus of an involution.

    For the orbit's own symmetry (the first declared one) these are the
    initial state and the state half a simple period later. Any other
    declared involution is searched for along one simple period.
    """
    propagator = propagator or Propagator(orbit.model)
    own = orbit.symmetries[0]
    symmetry = symmetry or own
    sym = get_symmetry(symmetry)
    if symmetry not in orbit.symmetries:
        raise NotSymmetric(f"orbit does not declare symmetry {symmetry}", symmetry=symmetry)

    if symmetry == own:
        first = orbit.state0
        second = propagator.flow(first, orbit.half_period).final_state
        for index, point in enumerate((first, second)):
            distance = sym.locus_distance(point)
            if distance > tol:
                raise NotSymmetric(
                    f"point {index} is {distance:.3e} from Fix({symmetry})",
                    point=index, distance=distance
                )
        return [first, second]

    return _search_locus(orbit, sym, propagator, tol)


def _search_locus(orbit: PeriodicOrbit, sym, propagator: Propagator, tol: float) -> List[NDArray]:
    """Crossings of the leading locus coordinate that lie on the whole locus"""
    lead = sym.fixed_locus[0]
    points = []
    count = 1
    while True:
        try:
            _, result = propagator.flow_to_event(
                orbit.state0, EventSpec.coordinate(lead, count=count), orbit.simple_period * (1 + 1e-9)
            )
        except EventNotFound as e:
            if count == 1:
                raise NotSymmetric(f"no crossing of Fix({sym.name}) found: {e}") from e
            break
        if sym.locus_distance(result.final_state) <= max(tol, 1e-8):
            points.append(result.final_state)
        count += 1
    if len(points) < 2:
        raise NotSymmetric(f"orbit meets Fix({sym.name}) {len(points)} time(s), expected 2", found=len(points))
    logger.debug(f"Found {len(points)} points on Fix({sym.name})")
    return points[:2]
