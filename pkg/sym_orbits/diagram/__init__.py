"""Broucke diagram, Gamma-line crossings and layered labels"""
from sym_orbits.diagram.broucke import (
    Crossing,
    GammaLine,
    StabilityPoint,
    crossings,
    kfold_candidates,
    region,
    stability_point,
)
from sym_orbits.diagram.git import GitLabel, collapse, expect_bifurcation, git_label

__all__ = [
    "Crossing",
    "GammaLine",
    "StabilityPoint",
    "crossings",
    "kfold_candidates",
    "region",
    "stability_point",
    "GitLabel",
    "collapse",
    "expect_bifurcation",
    "git_label",
]
