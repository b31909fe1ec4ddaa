"""Discrete symmetries acting by signed coordinate changes.

The sign patterns below are the same in canonical ``(q, p)`` and in
position-velocity coordinates, so they act directly on stored states.
"""
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from sym_orbits.core.errors import SymmetryNotApplicable
from sym_orbits.core.interfaces import DynamicalModel

COORDINATES = ("x", "y", "z", "vx", "vy", "vz")


@dataclass(frozen=True)
class Symmetry:
    """Linear involution diag(signs) on phase space"""
    name: str
    signs: Tuple[int, ...]
    antisymplectic: bool

    @property
    def matrix(self) -> NDArray:
        return np.diag(np.array(self.signs, dtype=float))

    @property
    def fixed_locus(self) -> Tuple[int, ...]:
        """Indices of coordinates that vanish on Fix(symmetry)"""
        return tuple(i for i, s in enumerate(self.signs) if s < 0)

    @property
    def free_coordinates(self) -> Tuple[int, ...]:
        """Indices of coordinates left free on Fix(symmetry)"""
        return tuple(i for i, s in enumerate(self.signs) if s > 0)

    def apply(self, state: NDArray) -> NDArray:
        return np.asarray(state, dtype=float) * np.array(self.signs, dtype=float)

    def locus_distance(self, state: NDArray) -> float:
        """Max-norm distance of a state from the fixed locus"""
        state = np.asarray(state, dtype=float)
        return float(np.max(np.abs(state[list(self.fixed_locus)])))

    def describe_locus(self) -> str:
        return "{" + ", ".join(f"{COORDINATES[i]}=0" for i in self.fixed_locus) + "}"


SYMMETRIES: Dict[str, Symmetry] = {
    "rho": Symmetry("rho", (1, -1, -1, -1, 1, 1), True),
    "rho_tilde": Symmetry("rho_tilde", (1, -1, 1, -1, 1, -1), True),
    "kappa": Symmetry("kappa", (-1, 1, -1, 1, -1, 1), True),
    "kappa_tilde": Symmetry("kappa_tilde", (-1, 1, 1, 1, -1, -1), True),
    "sigma": Symmetry("sigma", (1, 1, -1, 1, 1, -1), False),
}


def get_symmetry(name: str) -> Symmetry:
    """Look up a symmetry by name"""
    try:
        return SYMMETRIES[name]
    except KeyError:
        raise ValueError(f"Unknown symmetry: {name}") from None


def apply_symmetry(sym, state: NDArray, model: Optional[DynamicalModel] = None) -> NDArray:
    """Transform a state; with a model, reject symmetries the model lacks"""
    if isinstance(sym, str):
        sym = get_symmetry(sym)
    if model is not None and sym.name not in model.symmetry_names():
        raise SymmetryNotApplicable(
            f"{sym.name} is not a symmetry of the {model.kind} model",
            symmetry=sym.name, model=model.kind
        )
    return sym.apply(state)
