"""Floer-number bookkeeping across bifurcations"""
from sym_orbits.floer.census import (
    CensusEntry,
    InvarianceReport,
    OrbitCensus,
    check_invariance,
    chi_planar,
    chi_spatial,
)

__all__ = [
    "CensusEntry",
    "InvarianceReport",
    "OrbitCensus",
    "check_invariance",
    "chi_planar",
    "chi_spatial",
]
