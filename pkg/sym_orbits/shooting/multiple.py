"""Multiple shooting over the half period for long orbits"""
import logging
from typing import Tuple

import numpy as np
from numpy.typing import NDArray

from sym_orbits.dynamics.symmetry import get_symmetry
from sym_orbits.flows.propagator import Propagator
from sym_orbits.shooting.charts import ShootingChart
from sym_orbits.shooting.constraints import Constraint

logger = logging.getLogger(__name__)


class MultipleShootingProblem:
    """Half period split into equal segments joined by continuity equations.

    Unknown vector: chart unknowns of the initial state, the 6 coordinates of
    each interior node, then the half period tau. Each segment lasts tau/m.
    """

    def __init__(
        self,
        chart: ShootingChart,
        constraint: Constraint,
        base_state: NDArray,
        propagator: Propagator,
        segments: int = 4,
    ):
        if segments < 2:
            raise ValueError(f"multiple shooting needs at least 2 segments, got {segments}")
        self.chart = chart
        self.constraint = constraint
        self.model = propagator.model
        self.propagator = propagator
        self.segments = segments
        self.base_state = np.array(base_state, dtype=float)
        self.base_state[list(get_symmetry(chart.symmetry).fixed_locus)] = 0.0
        self._n = len(chart.unknowns)

    @property
    def size(self) -> int:
        return self._n + 6 * (self.segments - 1) + 1

    def initial_vector(self, tau: float) -> NDArray:
        """Interior nodes seeded by propagating the base state"""
        state = self.base_state
        nodes = []
        for _ in range(self.segments - 1):
            state = self.propagator.flow(state, tau / self.segments).final_state
            nodes.append(state)
        return np.concatenate((self.base_state[list(self.chart.unknowns)], *nodes, [tau]))

    def state_tau(self, x: NDArray) -> Tuple[NDArray, float]:
        state0 = self.base_state.copy()
        state0[list(self.chart.unknowns)] = x[:self._n]
        return state0, float(x[-1])

    def design_vector(self, x: NDArray) -> NDArray:
        """Single-shooting coordinates (chart unknowns, tau)"""
        return np.append(x[:self._n], x[-1])

    def _nodes(self, x: NDArray):
        state0, tau = self.state_tau(x)
        interior = x[self._n:-1].reshape(self.segments - 1, 6)
        return [state0, *interior], tau

    def residual(self, x: NDArray) -> NDArray:
        nodes, tau = self._nodes(x)
        h = tau / self.segments
        parts = []
        for i, node in enumerate(nodes):
            end = self.propagator.flow(node, h).final_state
            if i < len(nodes) - 1:
                parts.append(end - nodes[i + 1])
            else:
                parts.append(end[list(self.chart.residuals)])
        state0, _ = self.state_tau(x)
        parts.append([self.constraint.residual(self.model, state0, tau)])
        return np.concatenate(parts)

    def evaluate(self, x: NDArray) -> Tuple[NDArray, NDArray]:
        nodes, tau = self._nodes(x)
        h = tau / self.segments
        n, m = self._n, self.segments
        unknowns = list(self.chart.unknowns)
        residuals = list(self.chart.residuals)
        size = self.size
        F = np.zeros(size)
        J = np.zeros((size, size))
        row = 0
        for i, node in enumerate(nodes):
            result = self.propagator.flow_with_stm(node, h)
            end = result.final_state
            phi = result.stm_velocity
            field = self.model.rhs(0.0, end) / m
            last = i == m - 1
            rows = residuals if last else list(range(6))
            width = len(rows)
            F[row:row + width] = end[rows] - (0.0 if last else nodes[i + 1])
            if i == 0:
                J[row:row + width, :n] = phi[np.ix_(rows, unknowns)]
            else:
                col = n + 6 * (i - 1)
                J[row:row + width, col:col + 6] = phi[rows]
            if not last:
                col = n + 6 * i
                J[row:row + width, col:col + 6] = -np.eye(6)
            J[row:row + width, -1] = field[rows]
            row += width
        state0, _ = self.state_tau(x)
        F[-1] = self.constraint.residual(self.model, state0, tau)
        grad_state, grad_tau = self.constraint.gradient(self.model, state0, tau)
        J[-1, :n] = grad_state[unknowns]
        J[-1, -1] = grad_tau
        return F, J
