"""Circular restricted three-body problem in the rotating frame"""
import logging
from typing import Dict, List, Tuple

import numpy as np
from numpy.typing import NDArray

from sym_orbits.core.interfaces import DynamicalModel

logger = logging.getLogger(__name__)


class CRTBPModel(DynamicalModel):
    """Massless body attracted by primaries P=(-mu,0,0) and M=(1-mu,0,0).

    Effective potential Omega = (x^2 + y^2)/2 + (1-mu)/r1 + mu/r2, so that
    Gamma = 2 Omega - |v|^2 is the classical Jacobi constant.
    """

    kind = "crtbp"

    def __init__(self, mu: float, collision_radius: float = 1e-6, validate: bool = True):
        super().__init__(collision_radius)
        if validate and not 0.0 < mu < 0.5:
            raise ValueError(f"CRTBP mass ratio must lie in (0, 1/2), got {mu}")
        self.mu = float(mu)
        self.primary = np.array([-self.mu, 0.0, 0.0])
        self.secondary = np.array([1.0 - self.mu, 0.0, 0.0])

    @classmethod
    def rotating_kepler(cls, collision_radius: float = 1e-6) -> 'CRTBPModel':
        """mu = 0 limit: Kepler problem seen from the rotating frame"""
        return cls(0.0, collision_radius=collision_radius, validate=False)

    def centers(self) -> List[NDArray]:
        if self.mu == 0.0:
            return [self.primary]
        return [self.primary, self.secondary]

    def potential(self, q: NDArray) -> float:
        r1 = np.linalg.norm(q - self.primary)
        value = 0.5 * (q[0] ** 2 + q[1] ** 2) + (1.0 - self.mu) / r1
        if self.mu:
            value += self.mu / np.linalg.norm(q - self.secondary)
        return float(value)

    def potential_gradient(self, q: NDArray) -> NDArray:
        d1 = q - self.primary
        r1 = np.sqrt(d1 @ d1)
        grad = np.array([q[0], q[1], 0.0]) - (1.0 - self.mu) * d1 / r1 ** 3
        if self.mu:
            d2 = q - self.secondary
            r2 = np.sqrt(d2 @ d2)
            grad -= self.mu * d2 / r2 ** 3
        return grad

    def potential_hessian(self, q: NDArray) -> NDArray:
        hess = np.diag([1.0, 1.0, 0.0])
        for mass, center in ((1.0 - self.mu, self.primary), (self.mu, self.secondary)):
            if mass == 0.0:
                continue
            d = q - center
            r = np.sqrt(d @ d)
            hess += mass * (3.0 * np.outer(d, d) / r ** 5 - np.eye(3) / r ** 3)
        return hess

    def symmetry_names(self) -> Tuple[str, ...]:
        return ("rho", "rho_tilde", "sigma")

    def to_dict(self) -> Dict:
        return {"kind": self.kind, "mu": self.mu}

    def __repr__(self) -> str:
        return f"CRTBPModel(mu={self.mu!r})"
