"""Symmetric periodic orbits by half-period shooting"""
from sym_orbits.shooting.charts import CHARTS, ShootingChart, get_chart
from sym_orbits.shooting.constraints import (
    Constraint,
    FixedCoordinate,
    FixedGamma,
    FixedHalfPeriod,
    PseudoArclength,
)
from sym_orbits.shooting.corrector import Corrector, ShootingProblem, correct, periodicity_residual
from sym_orbits.shooting.multiple import MultipleShootingProblem
from sym_orbits.shooting.orbit import PeriodicOrbit, cover, mirror, symmetric_points

__all__ = [
    "CHARTS",
    "ShootingChart",
    "get_chart",
    "Constraint",
    "FixedCoordinate",
    "FixedGamma",
    "FixedHalfPeriod",
    "PseudoArclength",
    "Corrector",
    "ShootingProblem",
    "MultipleShootingProblem",
    "correct",
    "periodicity_residual",
    "PeriodicOrbit",
    "cover",
    "mirror",
    "symmetric_points",
]
