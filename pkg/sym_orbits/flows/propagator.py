"""Adaptive high-order propagation with scipy's DOP853"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import pandas as pd
from numpy.typing import NDArray
from scipy.integrate import solve_ivp

from sym_orbits.config.models import ToleranceConfig
from sym_orbits.core.errors import CollisionDuringFlow, EventNotFound, StepSizeUnderflow
from sym_orbits.core.interfaces import DynamicalModel
from sym_orbits.core.symplectic import stm_to_canonical
from sym_orbits.flows.events import EventSpec

logger = logging.getLogger(__name__)

STATE_COLUMNS = ["x", "y", "z", "vx", "vy", "vz"]


@dataclass
class FlowResult:
    """Outcome of one propagation.

    ``stm`` is in canonical coordinates, ``stm_velocity`` in
    position-velocity coordinates; both are None for plain flows.
    """
    final_state: NDArray
    time: float
    stm: Optional[NDArray] = None
    stm_velocity: Optional[NDArray] = None
    dense_times: Optional[NDArray] = None
    dense_states: Optional[NDArray] = None

    def to_frame(self) -> pd.DataFrame:
        """Dense samples as a t,x,y,z,vx,vy,vz table"""
        if self.dense_times is None:
            raise ValueError("propagation was run without dense samples")
        frame = pd.DataFrame(self.dense_states, columns=STATE_COLUMNS)
        frame.insert(0, "t", self.dense_times)
        return frame


class Propagator:
    """Integrates a model's flow and variational system"""

    def __init__(
        self,
        model: DynamicalModel,
        tolerances: Optional[ToleranceConfig] = None,
        metrics=None,
        metrics_key: str = "propagator",
    ):
        self.model = model
        self.tolerances = tolerances or ToleranceConfig()
        self.metrics = metrics
        self.metrics_key = metrics_key

    def _collision_event(self):
        model = self.model

        def collision(t, y):
            return float(np.min(model.distances(y[:6]))) - model.collision_radius

        collision.terminal = True
        collision.direction = -1
        return collision

    def _integrate(self, y0: NDArray, t: float, with_stm: bool, events=(), dense: bool = False):
        rhs = self.model.rhs_with_stm if with_stm else self.model.rhs
        if self.metrics is not None:
            self.metrics.record_propagation(self.metrics_key)
        sol = solve_ivp(
            rhs,
            (0.0, t),
            y0,
            method="DOP853",
            rtol=self.tolerances.rtol,
            atol=self.tolerances.atol,
            dense_output=dense,
            events=[self._collision_event(), *events],
        )
        if sol.status == -1:
            if self.metrics is not None:
                self.metrics.record_failure(self.metrics_key)
            raise StepSizeUnderflow(f"integration failed at t={sol.t[-1]}: {sol.message}", time=float(sol.t[-1]))
        if sol.t_events[0].size:
            t_hit = float(sol.t_events[0][0])
            distance = float(np.min(self.model.distances(sol.y_events[0][0][:6])))
            logger.debug(f"Collision at t={t_hit}, distance {distance}")
            if self.metrics is not None:
                self.metrics.record_failure(self.metrics_key)
            raise CollisionDuringFlow(t_hit, distance)
        return sol

    @staticmethod
    def _result(y: NDArray, t: float, with_stm: bool) -> FlowResult:
        state = np.array(y[:6])
        if not with_stm:
            return FlowResult(final_state=state, time=t)
        stm_v = np.array(y[6:]).reshape(6, 6)
        return FlowResult(final_state=state, time=t, stm=stm_to_canonical(stm_v), stm_velocity=stm_v)

    def flow(self, s0: NDArray, t: float) -> FlowResult:
        """phi_t(s0)"""
        s0 = np.asarray(s0, dtype=float)
        if not np.isfinite(t):
            raise ValueError(f"propagation time must be finite, got {t}")
        self.model.check_collision(s0)
        if t == 0.0:
            return FlowResult(final_state=s0.copy(), time=0.0)
        sol = self._integrate(s0, t, with_stm=False)
        return self._result(sol.y[:, -1], t, with_stm=False)

    def flow_with_stm(self, s0: NDArray, t: float) -> FlowResult:
        """phi_t(s0) together with its derivative"""
        s0 = np.asarray(s0, dtype=float)
        if not np.isfinite(t):
            raise ValueError(f"propagation time must be finite, got {t}")
        self.model.check_collision(s0)
        y0 = np.concatenate((s0, np.eye(6).ravel()))
        if t == 0.0:
            return self._result(y0, 0.0, with_stm=True)
        sol = self._integrate(y0, t, with_stm=True)
        return self._result(sol.y[:, -1], t, with_stm=True)

    def sample(self, s0: NDArray, t: float, n: int = 200) -> FlowResult:
        """Propagate and keep ``n`` evenly spaced dense samples"""
        s0 = np.asarray(s0, dtype=float)
        self.model.check_collision(s0)
        sol = self._integrate(s0, t, with_stm=False, dense=True)
        times = np.linspace(0.0, t, n)
        states = sol.sol(times).T
        return FlowResult(
            final_state=np.array(sol.y[:6, -1]),
            time=t,
            dense_times=times,
            dense_states=states,
        )

    def trajectory_with_stm(self, s0: NDArray, t: float) -> Tuple[NDArray, NDArray, NDArray]:
        """States and position-velocity STMs at every integrator step"""
        s0 = np.asarray(s0, dtype=float)
        self.model.check_collision(s0)
        y0 = np.concatenate((s0, np.eye(6).ravel()))
        sol = self._integrate(y0, t, with_stm=True)
        states = sol.y[:6].T
        stms = sol.y[6:].T.reshape(-1, 6, 6)
        return sol.t, states, stms

    def flow_to_event(
        self,
        s0: NDArray,
        event: EventSpec,
        t_max: float,
        with_stm: bool = False,
    ) -> Tuple[float, FlowResult]:
        """Time of the ``event.count``-th qualifying crossing and the flow there.

        A crossing at the initial instant is not counted. The located time is
        polished by Newton iterations on freshly integrated states until the
        event function is below the event tolerance.
        """
        if t_max <= 0:
            raise ValueError(f"t_max must be positive, got {t_max}")
        s0 = np.asarray(s0, dtype=float)
        self.model.check_collision(s0)

        def wrapped(t, y):
            return event(t, y)

        wrapped.terminal = False
        wrapped.direction = event.direction

        sol = self._integrate(s0, t_max, with_stm=False, events=[wrapped])
        floor = 1e-9 * max(1.0, t_max)
        times = [float(t) for t in sol.t_events[1] if t > floor]
        if len(times) < event.count:
            raise EventNotFound(
                f"{event.name} crossing #{event.count} not found within t={t_max} ({len(times)} found)",
                found=len(times), t_max=t_max
            )
        t_star = times[event.count - 1]
        return self._polish(s0, event, t_star, with_stm)

    def _polish(self, s0: NDArray, event: EventSpec, t_star: float, with_stm: bool) -> Tuple[float, FlowResult]:
        result = self.flow_with_stm(s0, t_star) if with_stm else self.flow(s0, t_star)
        for _ in range(8):
            g = event.function(result.final_state)
            if abs(g) < self.tolerances.event_tol:
                break
            slope = event.slope(result.final_state, self.model.rhs(0.0, result.final_state))
            if slope == 0.0:
                break
            t_star -= g / slope
            result = self.flow_with_stm(s0, t_star) if with_stm else self.flow(s0, t_star)
        logger.debug(f"{event.name} at t={t_star:.12f}, residual {event.function(result.final_state):.2e}")
        return t_star, result


def flow(model: DynamicalModel, s0: NDArray, t: float, tol: Optional[ToleranceConfig] = None) -> FlowResult:
    """Final state of the flow from s0 after time t"""
    return Propagator(model, tol).flow(s0, t)


def flow_with_stm(model: DynamicalModel, s0: NDArray, t: float, tol: Optional[ToleranceConfig] = None) -> FlowResult:
    """Final state and canonical state-transition matrix"""
    return Propagator(model, tol).flow_with_stm(s0, t)


def flow_to_event(
    model: DynamicalModel,
    s0: NDArray,
    event: EventSpec,
    t_max: float,
    tol: Optional[ToleranceConfig] = None,
) -> Tuple[float, FlowResult]:
    """First qualifying crossing of ``event`` after t=0"""
    return Propagator(model, tol).flow_to_event(s0, event, t_max)
