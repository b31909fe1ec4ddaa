"""
Sym-Orbits: symmetric periodic orbits, their stability data and bifurcations
in the restricted three-body problem and Hill's lunar problem
"""

__version__ = "0.1.0"
