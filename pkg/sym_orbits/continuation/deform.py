"""Deformation of Hill orbits into the restricted three-body problem"""
import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from sym_orbits.config.models import ContinuationConfig, ToleranceConfig
from sym_orbits.continuation.family import STEP_FAILURES
from sym_orbits.core.errors import ContinuationLostConnection, StateJump, SymmetryNotApplicable
from sym_orbits.dynamics.crtbp import CRTBPModel
from sym_orbits.dynamics.hill import HillModel
from sym_orbits.shooting.constraints import FixedGamma
from sym_orbits.shooting.corrector import Corrector
from sym_orbits.shooting.orbit import PeriodicOrbit, symmetric_points

logger = logging.getLogger(__name__)

# Hill chart -> CRTBP chart on the rho-type locus
CRTBP_CHARTS = {
    "planar": "planar",
    "kappa_planar": "planar",
    "L": "L",
    "L_tilde": "L_tilde",
}
MIN_LOG_STEP = 1e-6


def hill_to_crtbp(state: NDArray, mu: float) -> NDArray:
    """q = (1 - mu) e1 + mu^(1/3) q_H, v = mu^(1/3) v_H"""
    scale = mu ** (1.0 / 3.0)
    out = scale * np.asarray(state, dtype=float)
    out[0] += 1.0 - mu
    return out


def crtbp_to_hill(state: NDArray, mu: float) -> NDArray:
    out = np.array(state, dtype=float)
    out[0] -= 1.0 - mu
    return out / mu ** (1.0 / 3.0)


def scaled_gamma(gamma_hill: float, mu: float) -> float:
    """Jacobi constant of the CRTBP orbit matching a Hill energy: 3 - 4 mu + mu^2 + mu^(2/3) Gamma_H"""
    return 3.0 - 4.0 * mu + mu * mu + mu ** (2.0 / 3.0) * gamma_hill


def hill_gamma(gamma: float, mu: float) -> float:
    """Hill energy whose scaled Jacobi constant is gamma"""
    return (gamma - 3.0 + 4.0 * mu - mu * mu) / mu ** (2.0 / 3.0)


def _rho_point(orbit: PeriodicOrbit) -> Tuple[NDArray, str]:
    chart = CRTBP_CHARTS.get(orbit.chart)
    if chart is not None and orbit.symmetries[0] in ("rho", "rho_tilde"):
        return orbit.state0, chart
    if chart is not None and "rho" in orbit.symmetries:
        return symmetric_points(orbit, "rho")[0], chart
    raise SymmetryNotApplicable(f"{orbit.chart} orbit has no locus shared with the CRTBP", chart=orbit.chart)


class MassDeformation:
    """Continuation in mu at fixed scaled Hill energy"""

    def __init__(
        self,
        tolerances: Optional[ToleranceConfig] = None,
        options: Optional[ContinuationConfig] = None,
        metrics=None,
        metrics_key: str = "deformation",
    ):
        self.tolerances = tolerances or ToleranceConfig()
        self.options = options or ContinuationConfig()
        self.metrics = metrics
        self.metrics_key = metrics_key
        self.path: List[Tuple[float, PeriodicOrbit]] = []

    def _correct(self, hill_state: NDArray, tau: float, mu: float, gamma_hill: float,
                 chart: str, symmetries, collision_radius: float) -> PeriodicOrbit:
        model = CRTBPModel(mu, collision_radius=collision_radius * mu ** (1.0 / 3.0))
        corrector = Corrector(model, self.tolerances, self.metrics, self.metrics_key)
        return corrector.correct(
            chart, hill_to_crtbp(hill_state, mu), tau, FixedGamma(scaled_gamma(gamma_hill, mu)), symmetries
        )

    def deform(self, hill_orbit: PeriodicOrbit, mu_target: float) -> PeriodicOrbit:
        """Seed at mu_start via the Hill scaling, then step log(mu) to the target"""
        if not isinstance(hill_orbit.model, HillModel):
            raise ValueError("deformation starts from a Hill orbit")
        if not 0.0 < mu_target < 0.5:
            raise ValueError(f"target mass ratio must lie in (0, 1/2), got {mu_target}")

        state, chart = _rho_point(hill_orbit)
        gamma_hill = hill_orbit.model.jacobi_gamma(state)
        tau = hill_orbit.half_period
        symmetries = tuple(s for s in hill_orbit.symmetries if s in ("rho", "rho_tilde", "sigma")) or ("rho",)
        radius = hill_orbit.model.collision_radius
        opts = self.options

        mu = opts.mu_start
        try:
            orbit = self._correct(state, tau, mu, gamma_hill, chart, symmetries, radius)
        except STEP_FAILURES as e:
            raise ContinuationLostConnection(mu, f"({e})") from e
        self.path = [(mu, orbit)]
        logger.info(f"Deforming Hill orbit Gamma_H={gamma_hill:.8f} from mu={mu:.3e} to {mu_target:.6e}")

        log_mu, log_target = math.log(mu), math.log(mu_target)
        direction = 1.0 if log_target >= log_mu else -1.0
        h = math.log(2.0)
        easy = 0
        while abs(log_target - log_mu) > 1e-15:
            next_log = log_mu + direction * min(h, abs(log_target - log_mu))
            next_mu = mu_target if abs(next_log - log_target) < 1e-15 else math.exp(next_log)
            hill_state = crtbp_to_hill(orbit.state0, mu)
            try:
                candidate = self._correct(hill_state, 0.5 * orbit.period, next_mu, gamma_hill, chart, symmetries, radius)
                jump = float(np.max(np.abs(crtbp_to_hill(candidate.state0, next_mu) - hill_state)))
                if jump > opts.max_state_jump:
                    raise StateJump(f"Hill-scaled state jump {jump:.3e}", jump=jump)
            except STEP_FAILURES + (StateJump,) as e:
                h *= 0.5
                easy = 0
                logger.debug(f"Deformation step to mu={next_mu:.6e} rejected ({e}); log-step {h:.2e}")
                if h < MIN_LOG_STEP:
                    raise ContinuationLostConnection(mu, f"({e})") from e
                continue
            log_mu = log_target if next_mu == mu_target else next_log
            mu, orbit = next_mu, candidate
            self.path.append((mu, orbit))
            if orbit.metadata.get("newton_iterations", 0) < opts.easy_iterations:
                easy += 1
                if easy >= opts.easy_streak:
                    h *= 2.0
                    easy = 0

        orbit.metadata.update({"deformed_from": "hill", "gamma_hill": gamma_hill, "mu_steps": len(self.path)})
        logger.info(f"Deformed orbit at mu={mu:.6e}: Gamma={orbit.gamma:.8f}, x(0)={orbit.state0[0]:.8f}")
        return orbit

    def from_seed(
        self,
        state: NDArray,
        half_period: float,
        chart: str,
        symmetries: Tuple[str, ...],
        gamma: float,
        mu_target: float,
        collision_radius: float = 1e-6,
    ) -> PeriodicOrbit:
        """Correct a Hill seed at the energy that scales to gamma at mu_target, then deform it"""
        corrector = Corrector(HillModel(collision_radius), self.tolerances, self.metrics, self.metrics_key)
        hill_orbit = corrector.correct(
            chart, state, half_period, FixedGamma(hill_gamma(gamma, mu_target)), symmetries
        )
        return self.deform(hill_orbit, mu_target)


def deform_mass(
    hill_orbit: PeriodicOrbit,
    mu_target: float,
    tolerances: Optional[ToleranceConfig] = None,
    options: Optional[ContinuationConfig] = None,
    metrics=None,
) -> PeriodicOrbit:
    """CRTBP orbit continued from a Hill orbit to the target mass ratio"""
    return MassDeformation(tolerances, options, metrics).deform(hill_orbit, mu_target)
