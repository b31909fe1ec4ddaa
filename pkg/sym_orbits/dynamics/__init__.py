"""Rotating-frame models, their symmetries and equilibria"""
from sym_orbits.dynamics.crtbp import CRTBPModel
from sym_orbits.dynamics.hill import HillModel
from sym_orbits.dynamics.symmetry import Symmetry, SYMMETRIES, apply_symmetry
from sym_orbits.dynamics.factory import create_model, libration_points

__all__ = [
    "CRTBPModel",
    "HillModel",
    "Symmetry",
    "SYMMETRIES",
    "apply_symmetry",
    "create_model",
    "libration_points",
]
