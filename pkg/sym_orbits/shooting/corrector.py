"""Newton correction of half-period boundary-value problems"""
import logging
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import NDArray

from sym_orbits.config.models import ToleranceConfig
from sym_orbits.core.errors import (
    CollisionDuringFlow,
    NoConvergence,
    SingularJacobian,
    StepSizeUnderflow,
)
from sym_orbits.core.interfaces import DynamicalModel
from sym_orbits.dynamics.symmetry import get_symmetry
from sym_orbits.flows.events import EventSpec
from sym_orbits.flows.propagator import Propagator
from sym_orbits.shooting.charts import ShootingChart, get_chart
from sym_orbits.shooting.constraints import Constraint, FixedCoordinate
from sym_orbits.shooting.multiple import MultipleShootingProblem
from sym_orbits.shooting.orbit import PeriodicOrbit

logger = logging.getLogger(__name__)

MAX_CONDITION = 1e13
LINE_SEARCH_STEPS = 8


def periodicity_residual(
    orbit: PeriodicOrbit,
    propagator: Optional[Propagator] = None,
    symmetry: Optional[str] = None,
) -> float:
    """Closure of a symmetric orbit over its two half-period legs.

    The first leg must end on the fixed locus; the second leg, started from
    that endpoint projected onto the locus, must return to the initial state.
    """
    propagator = propagator or Propagator(orbit.model)
    sym = get_symmetry(symmetry or orbit.symmetries[0])
    end = propagator.flow(orbit.state0, orbit.half_period).final_state
    on_locus = end.copy()
    on_locus[list(sym.fixed_locus)] = 0.0
    back = propagator.flow(on_locus, orbit.half_period).final_state
    return max(sym.locus_distance(end), float(np.max(np.abs(back - orbit.state0))))


class ShootingProblem:
    """Single shooting: unknowns (chart unknowns, tau), residuals at tau plus one constraint"""

    def __init__(
        self,
        chart: ShootingChart,
        constraint: Constraint,
        base_state: NDArray,
        propagator: Propagator,
    ):
        self.chart = chart
        self.constraint = constraint
        self.model = propagator.model
        self.propagator = propagator
        self.base_state = np.array(base_state, dtype=float)
        self.base_state[list(get_symmetry(chart.symmetry).fixed_locus)] = 0.0

    @property
    def size(self) -> int:
        return self.chart.size

    def initial_vector(self, tau: float) -> NDArray:
        return np.append(self.base_state[list(self.chart.unknowns)], tau)

    def state_tau(self, x: NDArray) -> Tuple[NDArray, float]:
        state0 = self.base_state.copy()
        state0[list(self.chart.unknowns)] = x[:-1]
        return state0, float(x[-1])

    def design_vector(self, x: NDArray) -> NDArray:
        return np.asarray(x, dtype=float)

    def residual(self, x: NDArray) -> NDArray:
        state0, tau = self.state_tau(x)
        end = self.propagator.flow(state0, tau).final_state
        return np.append(end[list(self.chart.residuals)], self.constraint.residual(self.model, state0, tau))

    def evaluate(self, x: NDArray) -> Tuple[NDArray, NDArray]:
        """Residual vector and Jacobian [Phi(tau)[res, unk] | f(tau)[res]; constraint row]"""
        state0, tau = self.state_tau(x)
        result = self.propagator.flow_with_stm(state0, tau)
        end = result.final_state
        residuals = list(self.chart.residuals)
        field = self.model.rhs(0.0, end)

        F = np.append(end[residuals], self.constraint.residual(self.model, state0, tau))
        J = np.zeros((self.size, self.size))
        J[:-1, :-1] = result.stm_velocity[np.ix_(residuals, list(self.chart.unknowns))]
        J[:-1, -1] = field[residuals]
        grad_state, grad_tau = self.constraint.gradient(self.model, state0, tau)
        J[-1, :-1] = grad_state[list(self.chart.unknowns)]
        J[-1, -1] = grad_tau
        return F, J

    def tangent(self, x: NDArray) -> NDArray:
        """Unit null vector of the residual Jacobian without the constraint row"""
        _, J = self.evaluate(x)
        _, _, vt = np.linalg.svd(J[:-1])
        return vt[-1]


class Corrector:
    """Damped Newton solver for symmetric periodic orbits"""

    def __init__(
        self,
        model: DynamicalModel,
        tolerances: Optional[ToleranceConfig] = None,
        metrics=None,
        metrics_key: str = "corrector",
    ):
        self.model = model
        self.tolerances = tolerances or ToleranceConfig()
        self.metrics = metrics
        self.metrics_key = metrics_key
        self.propagator = Propagator(model, self.tolerances, metrics, metrics_key)

    def find_half_period(self, chart: ShootingChart, state0: NDArray, t_max: float = 20.0, count: int = 1) -> float:
        """First return to the chart's leading residual section"""
        event = EventSpec.coordinate(chart.lead_residual, count=count)
        t_star, _ = self.propagator.flow_to_event(state0, event, t_max)
        return t_star

    def problem(self, chart: ShootingChart, constraint: Constraint, state0: NDArray, tau: float):
        """Single or multiple shooting depending on the period"""
        if 2.0 * tau > self.tolerances.multiple_shooting_period:
            logger.debug(f"Using {self.tolerances.segments}-segment multiple shooting for T={2 * tau:.5f}")
            return MultipleShootingProblem(chart, constraint, state0, self.propagator, self.tolerances.segments)
        return ShootingProblem(chart, constraint, state0, self.propagator)

    def correct(
        self,
        chart: Union[ShootingChart, str],
        state0: NDArray,
        half_period: Optional[float] = None,
        constraint: Optional[Constraint] = None,
        symmetries: Optional[Sequence[str]] = None,
        check_periodicity: bool = True,
    ) -> PeriodicOrbit:
        """Converge a seed onto a symmetric periodic orbit.

        Without an explicit constraint the first chart unknown (usually x) is
        held at its seed value.
        """
        if isinstance(chart, str):
            chart = get_chart(chart)
        state0 = np.asarray(state0, dtype=float)
        if constraint is None:
            lead = chart.unknowns[0]
            constraint = FixedCoordinate(lead, state0[lead])
        tau = half_period if half_period is not None else self.find_half_period(chart, state0)

        problem = self.problem(chart, constraint, state0, tau)
        x, iterations = self.solve(problem, problem.initial_vector(tau))
        s0, tau = problem.state_tau(x)

        declared = list(symmetries) if symmetries else [chart.symmetry]
        if chart.planar and chart.symmetry == "rho" and "rho_tilde" not in declared:
            declared.append("rho_tilde")
        orbit = PeriodicOrbit(
            model=self.model,
            state0=s0,
            period=2.0 * tau,
            gamma=self.model.jacobi_gamma(s0),
            symmetries=tuple(declared),
            planar=chart.planar or (abs(s0[2]) < 1e-13 and abs(s0[5]) < 1e-13),
            chart=chart.name,
            metadata={"newton_iterations": iterations, "constraint": repr(constraint)},
        )
        if check_periodicity:
            orbit.residual = periodicity_residual(orbit, self.propagator, chart.symmetry)
            if orbit.residual > self.tolerances.residual_tol:
                if self.metrics is not None:
                    self.metrics.record_failure(self.metrics_key)
                logger.debug(
                    f"Rejecting {chart.name} orbit at Gamma={orbit.gamma:.8f}: "
                    f"periodicity residual {orbit.residual:.2e} above {self.tolerances.residual_tol:.0e}"
                )
                raise NoConvergence(iterations, orbit.residual)
        if self.metrics is not None:
            self.metrics.record_correction(self.metrics_key, iterations)
        logger.info(
            f"Corrected {chart.name} orbit in {iterations} iteration(s): "
            f"Gamma={orbit.gamma:.8f}, T={orbit.period:.5f}"
        )
        return orbit

    def solve(self, problem, x: NDArray) -> Tuple[NDArray, int]:
        """Newton iterations with trust-region capping and backtracking"""
        tol = self.tolerances
        norm = np.inf
        for iteration in range(tol.max_newton + 1):
            F, J = problem.evaluate(x)
            norm = float(np.max(np.abs(F)))
            logger.debug(f"Newton iteration {iteration}: residual {norm:.3e}")
            if norm <= 0.01 * tol.residual_tol:
                return x, iteration
            if iteration == tol.max_newton:
                break

            condition = float(np.linalg.cond(J))
            if not np.isfinite(condition) or condition > MAX_CONDITION:
                raise SingularJacobian(condition)
            dx = np.linalg.solve(J, -F)
            largest = float(np.max(np.abs(dx)))
            if largest > tol.max_step:
                dx *= tol.max_step / largest

            accepted = self._line_search(problem, x, dx, norm)
            if accepted is None:
                if norm <= tol.residual_tol:
                    return x, iteration
                if self.metrics is not None:
                    self.metrics.record_failure(self.metrics_key)
                raise NoConvergence(iteration + 1, norm)
            x_new, norm_new, step = accepted
            x = x_new
            if step < tol.newton_tol and norm_new <= tol.residual_tol:
                return x, iteration + 1

        if self.metrics is not None:
            self.metrics.record_failure(self.metrics_key)
        raise NoConvergence(tol.max_newton, norm)

    @staticmethod
    def _line_search(problem, x: NDArray, dx: NDArray, norm: float):
        alpha = 1.0
        for _ in range(LINE_SEARCH_STEPS):
            trial = x + alpha * dx
            try:
                norm_trial = float(np.max(np.abs(problem.residual(trial))))
            except (CollisionDuringFlow, StepSizeUnderflow):
                alpha *= 0.5
                continue
            if norm_trial < (1.0 - 1e-4 * alpha) * norm or norm_trial <= 1e-14:
                return trial, norm_trial, float(np.max(np.abs(alpha * dx)))
            alpha *= 0.5
        return None


def correct(
    model: DynamicalModel,
    chart: Union[ShootingChart, str],
    seed: Union[PeriodicOrbit, NDArray],
    tolerances: Optional[ToleranceConfig] = None,
    constraint: Optional[Constraint] = None,
    metrics=None,
) -> PeriodicOrbit:
    """Correct a seed orbit or seed state on the given chart"""
    corrector = Corrector(model, tolerances, metrics)
    if isinstance(seed, PeriodicOrbit):
        return corrector.correct(chart, seed.state0, seed.half_period, constraint, seed.symmetries)
    return corrector.correct(chart, seed, constraint=constraint)
