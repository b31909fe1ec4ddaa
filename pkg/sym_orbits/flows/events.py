"""Section crossings detected during propagation"""
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numpy.typing import NDArray

from sym_orbits.dynamics.symmetry import COORDINATES


@dataclass
class EventSpec:
    """Scalar function of the state whose zeros are sought.

    ``direction`` is +1 for increasing crossings, -1 for decreasing, 0 for
    any; ``count`` selects which qualifying crossing stops the search.
    """
    function: Callable[[NDArray], float]
    direction: int = 0
    count: int = 1
    name: str = "event"
    gradient: Optional[Callable[[NDArray], NDArray]] = None

    def __post_init__(self):
        if self.direction not in (-1, 0, 1):
            raise ValueError(f"direction must be -1, 0 or 1, got {self.direction}")
        if self.count < 1:
            raise ValueError(f"count must be positive, got {self.count}")

    @classmethod
    def coordinate(cls, index: int, direction: int = 0, count: int = 1) -> 'EventSpec':
        """Zero of a single coordinate, e.g. index 1 for the y = 0 section"""
        unit = np.zeros(6)
        unit[index] = 1.0
        return cls(
            function=lambda s: float(s[index]),
            direction=direction,
            count=count,
            name=f"{COORDINATES[index]}=0",
            gradient=lambda s: unit,
        )

    def __call__(self, t: float, y: NDArray) -> float:
        return self.function(y[:6])

    def slope(self, state: NDArray, field: NDArray) -> float:
        """Time derivative of the event function along the vector field"""
        if self.gradient is not None:
            return float(self.gradient(state) @ field)
        h = 1e-7
        return (self.function(state + h * field) - self.function(state - h * field)) / (2 * h)
