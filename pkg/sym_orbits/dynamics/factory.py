"""Factory for creating dynamical models"""
import logging
from typing import Any, Dict, List, Union

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import brentq

from sym_orbits.config.models import ModelConfig
from sym_orbits.core.interfaces import DynamicalModel
from sym_orbits.dynamics.crtbp import CRTBPModel
from sym_orbits.dynamics.hill import HillModel

logger = logging.getLogger(__name__)


def _create_crtbp(config: ModelConfig) -> DynamicalModel:
    if config.mu == 0.0:
        return CRTBPModel.rotating_kepler(collision_radius=config.collision_radius)
    return CRTBPModel(config.mu, collision_radius=config.collision_radius)


def _create_hill(config: ModelConfig) -> DynamicalModel:
    return HillModel(collision_radius=config.collision_radius)


MODEL_FACTORIES = {
    'crtbp': _create_crtbp,
    'hill': _create_hill,
}


def create_model(config: Union[ModelConfig, Dict[str, Any], str]) -> DynamicalModel:
    """Create a model from a config section, a preset dict or a preset name"""
    if isinstance(config, str):
        config = ModelConfig.preset(config)
    elif isinstance(config, dict):
        config = ModelConfig.from_dict(config)

    factory = MODEL_FACTORIES.get(config.kind)
    if not factory:
        raise ValueError(f"Unknown model type: {config.kind}")
    model = factory(config)
    logger.debug(f"Created model {model!r}")
    return model


def libration_points(model: DynamicalModel) -> List[NDArray]:
    """Collinear equilibria: L1, L2, L3 for the CRTBP, (+-3^{-1/3}, 0, 0) for Hill"""
    if isinstance(model, HillModel):
        x = 3.0 ** (-1.0 / 3.0)
        return [np.array([-x, 0.0, 0.0, 0.0, 0.0, 0.0]), np.array([x, 0.0, 0.0, 0.0, 0.0, 0.0])]
    if not isinstance(model, CRTBPModel) or model.mu == 0.0:
        raise ValueError(f"No collinear libration points for {model!r}")

    mu = model.mu

    def gx(x: float) -> float:
        return float(model.potential_gradient(np.array([x, 0.0, 0.0]))[0])

    eps = 1e-12
    l1 = brentq(gx, -mu + eps, 1.0 - mu - eps, xtol=1e-15, maxiter=200)
    l2 = brentq(gx, 1.0 - mu + eps, 2.0, xtol=1e-15, maxiter=200)
    l3 = brentq(gx, -2.0, -mu - eps, xtol=1e-15, maxiter=200)
    return [np.array([x, 0.0, 0.0, 0.0, 0.0, 0.0]) for x in (l1, l2, l3)]
