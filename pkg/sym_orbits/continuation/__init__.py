"""Family continuation, bifurcation location and branch switching"""
from sym_orbits.continuation.bifurcation import (
    BifurcationEvent,
    census_at,
    detect_fold,
    kernel_directions,
    locate_degeneracy,
    switch_branch,
    verify_event,
)
from sym_orbits.continuation.deform import MassDeformation, deform_mass, hill_gamma, hill_to_crtbp, scaled_gamma
from sym_orbits.continuation.detectors import (
    EVENT_KINDS,
    Detector,
    default_detectors,
    eigen_minus_one_detector,
    eigen_one_detector,
    fold_detector,
    kfold_detector,
    scan,
)
from sym_orbits.continuation.family import (
    BranchPoint,
    FamilyBranch,
    FamilyContinuation,
    continue_family,
    cover_branch,
    mirror_branch,
)
from sym_orbits.continuation.pool import BranchPool, BranchResult, BranchTask

__all__ = [
    "BifurcationEvent",
    "census_at",
    "detect_fold",
    "kernel_directions",
    "locate_degeneracy",
    "switch_branch",
    "verify_event",
    "MassDeformation",
    "deform_mass",
    "hill_gamma",
    "hill_to_crtbp",
    "scaled_gamma",
    "EVENT_KINDS",
    "Detector",
    "default_detectors",
    "eigen_minus_one_detector",
    "eigen_one_detector",
    "fold_detector",
    "kfold_detector",
    "scan",
    "BranchPoint",
    "FamilyBranch",
    "FamilyContinuation",
    "continue_family",
    "cover_branch",
    "mirror_branch",
    "BranchPool",
    "BranchResult",
    "BranchTask",
]
