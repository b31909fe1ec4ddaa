"""Abstract base class for Hamiltonian models in the rotating frame"""
from abc import ABC, abstractmethod
from typing import Dict, List, Tuple

import numpy as np
from numpy.typing import NDArray

from sym_orbits.core.errors import CollisionProximity
from sym_orbits.core.symplectic import stm_to_canonical, TO_CANONICAL

# Coriolis block of the rotating frame: (2 vy, -2 vx, 0)
CORIOLIS = np.array([[0.0, 2.0, 0.0], [-2.0, 0.0, 0.0], [0.0, 0.0, 0.0]])


class DynamicalModel(ABC):
    """Rotating-frame model with Hamiltonian H = |v|^2 / 2 - Omega(q).

    Subclasses supply the effective potential ``Omega`` and its first two
    derivatives plus the attracting centers used for collision checks. States
    are position-velocity vectors ``[x, y, z, vx, vy, vz]``.
    """

    kind: str = ""

    def __init__(self, collision_radius: float = 1e-6):
        if collision_radius <= 0:
            raise ValueError("collision_radius must be positive")
        self.collision_radius = collision_radius

    @abstractmethod
    def centers(self) -> List[NDArray]:
        """Positions of attracting singularities checked for collision"""
        pass

    @abstractmethod
    def potential(self, q: NDArray) -> float:
        """Effective potential Omega(q)"""
        pass

    @abstractmethod
    def potential_gradient(self, q: NDArray) -> NDArray:
        """Gradient of Omega"""
        pass

    @abstractmethod
    def potential_hessian(self, q: NDArray) -> NDArray:
        """Hessian of Omega"""
        pass

    @abstractmethod
    def symmetry_names(self) -> Tuple[str, ...]:
        """Names of the discrete symmetries of this model"""
        pass

    @abstractmethod
    def to_dict(self) -> Dict:
        """Preset dictionary, e.g. {"kind": "crtbp", "mu": ...}"""
        pass

    def distances(self, state: NDArray) -> NDArray:
        """Distances from the position to every center"""
        q = np.asarray(state[:3])
        return np.array([np.linalg.norm(q - c) for c in self.centers()])

    def check_collision(self, state: NDArray) -> None:
        """Raise CollisionProximity when inside the collision radius"""
        d = self.distances(state)
        if d.size and d.min() < self.collision_radius:
            raise CollisionProximity(float(d.min()), self.collision_radius)

    def rhs(self, t: float, y: NDArray) -> NDArray:
        """Unchecked vector field, solve_ivp signature"""
        v = y[3:6]
        acc = CORIOLIS @ v + self.potential_gradient(y[:3])
        return np.concatenate((v, acc))

    def rhs_with_stm(self, t: float, y: NDArray) -> NDArray:
        """State plus flattened 6x6 variational system (position-velocity frame)"""
        v = y[3:6]
        phi = y[6:].reshape(6, 6)
        acc = CORIOLIS @ v + self.potential_gradient(y[:3])
        hess = self.potential_hessian(y[:3])
        dphi = np.empty((6, 6))
        dphi[:3] = phi[3:]
        dphi[3:] = hess @ phi[:3] + CORIOLIS @ phi[3:]
        return np.concatenate((v, acc, dphi.ravel()))

    def vector_field(self, state: NDArray) -> NDArray:
        """(x', y', z', x'', y'', z'') at a state outside the collision radius"""
        state = np.asarray(state, dtype=float)
        self.check_collision(state)
        return self.rhs(0.0, state)

    def hamiltonian(self, state: NDArray) -> float:
        """H = |v|^2 / 2 - Omega(q)"""
        state = np.asarray(state, dtype=float)
        self.check_collision(state)
        return 0.5 * float(state[3:] @ state[3:]) - self.potential(state[:3])

    def jacobi_gamma(self, state: NDArray) -> float:
        """Reported energy convention Gamma = -2H"""
        return -2.0 * self.hamiltonian(state)

    def gamma_gradient(self, state: NDArray) -> NDArray:
        """Gradient of Gamma with respect to the position-velocity state"""
        state = np.asarray(state, dtype=float)
        return np.concatenate((2.0 * self.potential_gradient(state[:3]), -2.0 * state[3:]))

    def variational_matrix(self, state: NDArray, canonical: bool = False) -> NDArray:
        """Jacobian of the vector field.

        In position-velocity coordinates by default; ``canonical=True`` returns
        the Hamiltonian matrix J * Hess(H) obtained by conjugation.
        """
        state = np.asarray(state, dtype=float)
        self.check_collision(state)
        a = np.zeros((6, 6))
        a[:3, 3:] = np.eye(3)
        a[3:, :3] = self.potential_hessian(state[:3])
        a[3:, 3:] = CORIOLIS
        if canonical:
            return stm_to_canonical(a)
        return a

    def canonical_gradient(self, state: NDArray) -> NDArray:
        """Gradient of H in canonical coordinates at a position-velocity state"""
        state = np.asarray(state, dtype=float)
        q, v = state[:3], state[3:]
        grad_q = np.array([-v[1], v[0], 0.0]) - self.potential_gradient(q)
        return np.concatenate((grad_q, v))

    def canonical_field(self, state: NDArray) -> NDArray:
        """Hamiltonian vector field X_H in canonical coordinates"""
        return TO_CANONICAL @ self.rhs(0.0, np.asarray(state, dtype=float))


__all__ = ["DynamicalModel", "CORIOLIS"]
