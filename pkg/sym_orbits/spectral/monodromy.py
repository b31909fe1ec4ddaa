"""Monodromy matrices of periodic orbits"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from sym_orbits.core.errors import NotSymmetric, StructureViolation
from sym_orbits.core.symplectic import scaled_symplectic_error, symplectic_inverse
from sym_orbits.dynamics.symmetry import get_symmetry
from sym_orbits.flows.propagator import Propagator
from sym_orbits.shooting.orbit import PeriodicOrbit

logger = logging.getLogger(__name__)

# (q1, q2, p1, p2) rows/columns of the canonical 6x6 matrix
PLANAR_INDICES = [0, 1, 3, 4]
SPATIAL_INDICES = [2, 5]

STRUCTURE_TOL = 1e-8
LOCUS_TOL = 1e-8


@dataclass
class SymmetricMonodromy:
    """Monodromies at both symmetric points from one half-period integration.

    With R the involution and Phi the canonical STM from the first symmetric
    point to the second, M0 = R Phi^-1 R Phi and M1 = Phi M0 Phi^-1.
    """
    at_start: NDArray
    at_half: NDArray
    half_state: NDArray
    half_stm: NDArray
    symmetry: str

    def at(self, point_index: int) -> NDArray:
        return self.at_start if point_index == 0 else self.at_half


def check_symplectic(matrix: NDArray, what: str = "monodromy", tol: float = STRUCTURE_TOL) -> float:
    """Scaled symplectic error, raising StructureViolation above tol"""
    error = scaled_symplectic_error(matrix)
    if error > tol:
        raise StructureViolation(f"{what} symplecticity", error, tol)
    return error


def symmetric_monodromy(
    orbit: PeriodicOrbit,
    propagator: Optional[Propagator] = None,
    symmetry: Optional[str] = None,
) -> SymmetricMonodromy:
    """Monodromies of a symmetric orbit (and its cover) at both symmetric points"""
    propagator = propagator or Propagator(orbit.model)
    symmetry = symmetry or orbit.symmetries[0]
    sym = get_symmetry(symmetry)
    if not sym.antisymplectic:
        raise NotSymmetric(f"{symmetry} is not an anti-symplectic involution", symmetry=symmetry)
    distance = sym.locus_distance(orbit.state0)
    if distance > LOCUS_TOL:
        raise NotSymmetric(f"point 0 lies {distance:.3e} from Fix({symmetry})", point=0, distance=distance)

    result = propagator.flow_with_stm(orbit.state0, orbit.half_period)
    distance = sym.locus_distance(result.final_state)
    if distance > LOCUS_TOL:
        raise NotSymmetric(f"point 1 lies {distance:.3e} from Fix({symmetry})", point=1, distance=distance)
    phi = result.stm
    check_symplectic(phi, "half-period STM")

    r = sym.matrix
    phi_inv = symplectic_inverse(phi)
    m0 = r @ phi_inv @ r @ phi
    m1 = phi @ r @ phi_inv @ r
    if orbit.cover > 1:
        m0 = np.linalg.matrix_power(m0, orbit.cover)
        m1 = np.linalg.matrix_power(m1, orbit.cover)
    logger.debug(
        f"Symmetric monodromy at Gamma={orbit.gamma:.8f}: |Phi(tau)| {np.max(np.abs(phi)):.3e}, "
        f"|M| {np.max(np.abs(m0)):.3e}"
    )
    return SymmetricMonodromy(m0, m1, result.final_state, phi, symmetry)


def _has_symmetric_start(orbit: PeriodicOrbit) -> bool:
    if not orbit.symmetries:
        return False
    sym = get_symmetry(orbit.symmetries[0])
    return sym.antisymplectic and sym.locus_distance(orbit.state0) <= LOCUS_TOL


def monodromy(
    orbit: PeriodicOrbit,
    propagator: Optional[Propagator] = None,
    start: Optional[NDArray] = None,
) -> NDArray:
    """Canonical state-transition matrix over the full period of the orbit.

    Orbits starting on the fixed locus of their involution get the monodromy
    from the half-period STM; ``start`` forces a full-period integration from
    another state.
    """
    propagator = propagator or Propagator(orbit.model)
    if start is None and _has_symmetric_start(orbit):
        return symmetric_monodromy(orbit, propagator).at_start
    state = orbit.state0 if start is None else np.asarray(start, dtype=float)
    matrix = propagator.flow_with_stm(state, orbit.period).stm
    check_symplectic(matrix)
    return matrix


def planar_part(matrix: NDArray) -> NDArray:
    """4x4 (q1, q2, p1, p2) block of a 6x6 canonical matrix"""
    return matrix[np.ix_(PLANAR_INDICES, PLANAR_INDICES)]


def spatial_part(matrix: NDArray) -> NDArray:
    """2x2 (q3, p3) block of a 6x6 canonical matrix"""
    return matrix[np.ix_(SPATIAL_INDICES, SPATIAL_INDICES)]


def trivial_eigenvalue_count(matrix: NDArray, tol: float = 1e-5) -> int:
    """Number of eigenvalues within tol of 1"""
    return int(np.sum(np.abs(np.linalg.eigvals(matrix) - 1.0) < tol))
