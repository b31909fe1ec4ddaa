"""Reduction of the monodromy to the energy level modulo the flow direction"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from sym_orbits.core.errors import DegenerateBasis
from sym_orbits.core.interfaces import DynamicalModel
from sym_orbits.core.symplectic import J6, scaled_symplectic_error, symplectic_error, symplectic_gram_schmidt
from sym_orbits.shooting.orbit import PeriodicOrbit, is_planar_state

logger = logging.getLogger(__name__)

MIN_FIELD_NORM = 1e-10


@dataclass
class ReducedMonodromy:
    """Monodromy on ker dH / span X_H in a symplectic basis.

    ``basis`` holds the 6-vectors (e_1..e_n, f_1..f_n) as columns. For planar
    orbits the ordering is (e_p, e_s, f_p, f_s) and the planar and spatial
    2x2 blocks are split out.
    """
    matrix: NDArray
    basis: NDArray
    planar_block: Optional[NDArray] = None
    spatial_block: Optional[NDArray] = None

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def split(self) -> bool:
        return self.planar_block is not None

    @property
    def coupling(self) -> float:
        """Max-norm of the planar/spatial coupling entries"""
        if not self.split:
            return 0.0
        m = self.matrix
        return float(max(np.max(np.abs(m[np.ix_([0, 2], [1, 3])])), np.max(np.abs(m[np.ix_([1, 3], [0, 2])]))))

    def symplectic_error(self) -> float:
        return symplectic_error(self.matrix)


def flow_frame(model: DynamicalModel, state: NDArray):
    """Flow direction X = J grad H and transversal Y = grad H / |grad H|^2, omega(X, Y) = 1"""
    grad = model.canonical_gradient(state)
    norm2 = float(grad @ grad)
    if norm2 < MIN_FIELD_NORM ** 2:
        raise DegenerateBasis(f"|grad H| = {np.sqrt(norm2):.3e} too small for reduction", norm=np.sqrt(norm2))
    return J6 @ grad, grad / norm2


def projector(x_field: NDArray, y_dir: NDArray) -> NDArray:
    """Matrix of w -> w - omega(w, Y) X + omega(w, X) Y"""
    # omega(w, v) = w^T J v, so omega(w, Y) = (J Y) . w
    return np.eye(6) - np.outer(x_field, J6 @ y_dir) + np.outer(y_dir, J6 @ x_field)


def coordinates(vectors: NDArray, basis: NDArray) -> NDArray:
    """Coordinates of columns in the symplectic basis (e, f): alpha = omega(w, f), beta = -omega(w, e)"""
    n = basis.shape[1] // 2
    e, f = basis[:, :n], basis[:, n:]
    alpha = -(f.T @ J6 @ vectors)
    beta = e.T @ J6 @ vectors
    return np.vstack((alpha, beta))


def reduce(matrix: NDArray, orbit: PeriodicOrbit, state: Optional[NDArray] = None) -> ReducedMonodromy:
    """Reduced monodromy at the orbit's initial state (or another point on it)"""
    state = orbit.state0 if state is None else np.asarray(state, dtype=float)
    x_field, y_dir = flow_frame(orbit.model, state)
    proj = projector(x_field, y_dir)

    split = orbit.planar and is_planar_state(state, 1e-12)
    if split:
        planar_candidates = proj[:, [0, 1, 3, 4]]
        pair = _symplectic_basis(planar_candidates, 2)
        e_s = np.zeros(6)
        e_s[2] = 1.0
        f_s = np.zeros(6)
        f_s[5] = 1.0
        basis = np.column_stack((pair[:, 0], e_s, pair[:, 1], f_s))
    else:
        basis = _symplectic_basis(proj, 4)

    reduced = coordinates(matrix @ basis, basis)
    result = ReducedMonodromy(matrix=reduced, basis=basis)
    if split:
        result.planar_block = reduced[np.ix_([0, 2], [0, 2])]
        result.spatial_block = reduced[np.ix_([1, 3], [1, 3])]
        logger.debug(f"Planar/spatial coupling {result.coupling:.2e}")
    error = scaled_symplectic_error(reduced)
    if error > 1e-8:
        logger.warning(f"Reduced monodromy symplecticity error {error:.2e}")
    return result



def _symplectic_basis(candidates: NDArray, rank: int) -> NDArray:
    try:
        return symplectic_gram_schmidt(candidates, J6, rank)
    except ValueError as e:
        raise DegenerateBasis(str(e)) from e
