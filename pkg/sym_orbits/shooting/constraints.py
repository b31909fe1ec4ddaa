"""Scalar constraints closing the half-period shooting system"""
from abc import ABC, abstractmethod
from typing import Tuple

import numpy as np
from numpy.typing import NDArray

from sym_orbits.core.interfaces import DynamicalModel
from sym_orbits.dynamics.symmetry import COORDINATES
from sym_orbits.shooting.charts import ShootingChart


class Constraint(ABC):
    """One extra equation c(state0, tau) = 0"""

    @abstractmethod
    def residual(self, model: DynamicalModel, state0: NDArray, tau: float) -> float:
        """Value of the constraint"""
        pass

    @abstractmethod
    def gradient(self, model: DynamicalModel, state0: NDArray, tau: float) -> Tuple[NDArray, float]:
        """Derivatives with respect to the initial state and the half period"""
        pass


class FixedGamma(Constraint):
    """Gamma(state0) = gamma"""

    def __init__(self, gamma: float):
        self.gamma = float(gamma)

    def residual(self, model, state0, tau):
        return model.jacobi_gamma(state0) - self.gamma

    def gradient(self, model, state0, tau):
        return model.gamma_gradient(state0), 0.0

    def __repr__(self) -> str:
        return f"FixedGamma({self.gamma!r})"


class FixedCoordinate(Constraint):
    """state0[index] = value"""

    def __init__(self, index: int, value: float):
        self.index = index
        self.value = float(value)

    def residual(self, model, state0, tau):
        return float(state0[self.index]) - self.value

    def gradient(self, model, state0, tau):
        grad = np.zeros(6)
        grad[self.index] = 1.0
        return grad, 0.0

    def __repr__(self) -> str:
        return f"FixedCoordinate({COORDINATES[self.index]}={self.value!r})"


class FixedHalfPeriod(Constraint):
    """tau = value"""

    def __init__(self, tau: float):
        self.tau = float(tau)

    def residual(self, model, state0, tau):
        return tau - self.tau

    def gradient(self, model, state0, tau):
        return np.zeros(6), 1.0


class PseudoArclength(Constraint):
    """tangent . (X - anchor) = ds, with X = (state0[unknowns], tau)"""

    def __init__(self, chart: ShootingChart, anchor: NDArray, tangent: NDArray, ds: float):
        self.chart = chart
        self.anchor = np.asarray(anchor, dtype=float)
        self.tangent = np.asarray(tangent, dtype=float)
        self.ds = float(ds)
        if self.anchor.shape != (chart.size,) or self.tangent.shape != (chart.size,):
            raise ValueError(f"anchor and tangent must have length {chart.size}")

    def residual(self, model, state0, tau):
        x = np.append(np.asarray(state0)[list(self.chart.unknowns)], tau)
        return float(self.tangent @ (x - self.anchor)) - self.ds

    def gradient(self, model, state0, tau):
        grad = np.zeros(6)
        grad[list(self.chart.unknowns)] = self.tangent[:-1]
        return grad, float(self.tangent[-1])
