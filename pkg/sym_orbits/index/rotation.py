"""Rotation of the reduced linearized flow along an orbit"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from sym_orbits.core.symplectic import J4, stm_to_canonical
from sym_orbits.flows.propagator import Propagator
from sym_orbits.shooting.orbit import PeriodicOrbit
from sym_orbits.spectral.classify import EigenConfig
from sym_orbits.spectral.monodromy import PLANAR_INDICES, SPATIAL_INDICES
from sym_orbits.index.conley_zehnder import IndexRecord, block_index, is_good

logger = logging.getLogger(__name__)

# rotates (q1, q2) by +90 degrees and (p1, p2) by -90 degrees; anticommutes with J
_K = np.array([
    [0.0, -1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0, 0.0],
])


@dataclass
class RotationRecord:
    """Unwrapped polar rotation of a 2x2 symplectic path"""
    angle: float
    samples: int
    max_increment: float

    @property
    def winding(self) -> int:
        """m in 2 pi m <= angle < 2 pi (m + 1)"""
        return math.floor(self.angle / (2.0 * math.pi))

    @property
    def half_turns(self) -> int:
        """Nearest multiple of pi, the winding of a hyperbolic endpoint"""
        return int(round(self.angle / math.pi))


def polar_angle(matrix: NDArray) -> float:
    """Angle of the unitary factor of a 2x2 symplectic matrix, positive for the flow of q' = p, p' = -q"""
    return math.atan2(matrix[0, 1] - matrix[1, 0], matrix[0, 0] + matrix[1, 1])


def planar_frame(gradient: NDArray):
    """Symplectic frame (e, f) of the planar reduced space, omega(e, f) = 1"""
    norm = np.linalg.norm(gradient)
    e = _K @ gradient / norm
    f = -J4 @ _K @ gradient / norm
    return e, f


def _reduced_planar_path(orbit: PeriodicOrbit, states: NDArray, stms: NDArray):
    model = orbit.model
    g0 = model.canonical_gradient(states[0])[PLANAR_INDICES]
    e0, f0 = planar_frame(g0)
    for state, stm in zip(states, stms):
        phi = stm_to_canonical(stm)[np.ix_(PLANAR_INDICES, PLANAR_INDICES)]
        e, f = planar_frame(model.canonical_gradient(state)[PLANAR_INDICES])
        columns = phi @ np.column_stack((e0, f0))
        # alpha = omega(w, f), beta = -omega(w, e)
        alpha = columns.T @ J4 @ f
        beta = -(columns.T @ J4 @ e)
        yield np.array([alpha, beta])


def _spatial_path(stms: NDArray):
    for stm in stms:
        yield stm_to_canonical(stm)[np.ix_(SPATIAL_INDICES, SPATIAL_INDICES)]


def track_rotation(
    orbit: PeriodicOrbit,
    block: str = "planar",
    propagator: Optional[Propagator] = None,
) -> RotationRecord:
    """Unwrapped rotation of the reduced planar or spatial block over the orbit's period"""
    if not orbit.planar:
        raise ValueError("rotation tracking needs a planar orbit")
    propagator = propagator or Propagator(orbit.model)
    _, states, stms = propagator.trajectory_with_stm(orbit.state0, orbit.period)
    if block == "planar":
        path = _reduced_planar_path(orbit, states, stms)
    elif block == "spatial":
        path = _spatial_path(stms)
    else:
        raise ValueError(f"Unknown block: {block}")

    angles = np.unwrap([polar_angle(m) for m in path])
    increments = np.abs(np.diff(angles)) if len(angles) > 1 else np.zeros(1)
    record = RotationRecord(angle=float(angles[-1] - angles[0]), samples=len(angles),
                            max_increment=float(increments.max()))
    if record.max_increment > 0.5 * math.pi:
        logger.warning(f"Rotation tracking of {block} block under-resolved (step {record.max_increment:.2f} rad)")
    logger.debug(f"{block} rotation {record.angle:.6f} rad over {record.samples} samples")
    return record


def index_from_rotation(
    orbit: PeriodicOrbit,
    config: EigenConfig,
    propagator: Optional[Propagator] = None,
    underlying: Optional[EigenConfig] = None,
) -> IndexRecord:
    """Planar/spatial indices of a planar orbit from tracked rotations (no anchor)"""
    indices = {}
    for block in ("planar", "spatial"):
        tag = getattr(config, block)
        rotation = track_rotation(orbit, block, propagator)
        winding = rotation.winding if tag == "E" else rotation.half_turns
        indices[block] = block_index(tag, config.angles.get(block), winding)
    return IndexRecord.split(indices["planar"], indices["spatial"], good=is_good(config, orbit.cover, underlying), cover=orbit.cover)
