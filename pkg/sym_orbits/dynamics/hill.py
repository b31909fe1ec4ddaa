"""Hill's lunar problem"""
from typing import Dict, List, Tuple

import numpy as np
from numpy.typing import NDArray

from sym_orbits.core.interfaces import DynamicalModel


class HillModel(DynamicalModel):
    """Limit of the CRTBP near the small primary, which sits at the origin.

    Effective potential Omega = 3x^2/2 - z^2/2 + 1/r. No mass parameter.
    """

    kind = "hill"

    def centers(self) -> List[NDArray]:
        return [np.zeros(3)]

    def potential(self, q: NDArray) -> float:
        r = np.linalg.norm(q)
        return float(1.5 * q[0] ** 2 - 0.5 * q[2] ** 2 + 1.0 / r)

    def potential_gradient(self, q: NDArray) -> NDArray:
        r = np.sqrt(q @ q)
        return np.array([3.0 * q[0], 0.0, -q[2]]) - q / r ** 3

    def potential_hessian(self, q: NDArray) -> NDArray:
        r = np.sqrt(q @ q)
        return np.diag([3.0, 0.0, -1.0]) + 3.0 * np.outer(q, q) / r ** 5 - np.eye(3) / r ** 3

    def symmetry_names(self) -> Tuple[str, ...]:
        return ("rho", "rho_tilde", "kappa", "kappa_tilde", "sigma")

    def to_dict(self) -> Dict:
        return {"kind": self.kind}

    def __repr__(self) -> str:
        return "HillModel()"
