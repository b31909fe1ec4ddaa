"""Scalar test functions whose sign changes mark bifurcations along a branch"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from sym_orbits.continuation.family import BranchPoint, FamilyBranch
from sym_orbits.diagram.broucke import GammaLine, kfold_lines

logger = logging.getLogger(__name__)

EIGEN_ONE = "eigenvalue-1"
KFOLD = "k-fold"
FOLD = "fold"
PLANAR_TO_SPATIAL = "planar-to-spatial"
PERIOD_DOUBLING = "period-doubling"
PITCHFORK = "deformed-pitchfork"

EVENT_KINDS = (EIGEN_ONE, KFOLD, FOLD, PLANAR_TO_SPATIAL, PERIOD_DOUBLING, PITCHFORK)


@dataclass
class Detector:
    """Named test function; None where it is undefined (complex indices, missing spectra)"""
    name: str
    kind: str
    function: Callable[[BranchPoint], Optional[float]]
    block: Optional[str] = None
    k: int = 1
    l: int = 0

    def __call__(self, point: BranchPoint) -> Optional[float]:
        return self.function(point)

    def values(self, branch: FamilyBranch) -> List[Optional[float]]:
        return [self(p) for p in branch.points]

    def brackets(self, branch: FamilyBranch) -> List[Tuple[int, int]]:
        """Consecutive defined samples with opposite signs"""
        found = []
        last_i, last_v = None, None
        for i, value in enumerate(self.values(branch)):
            if value is None:
                continue
            if last_v is not None and (last_v > 0) != (value > 0) and value != 0.0:
                found.append((last_i, i))
            last_i, last_v = i, value
        return found


def _block_index(point: BranchPoint, block: str) -> Optional[float]:
    if point.spectral is None:
        return None
    a = point.spectral.config.indices.get(block)
    if a is None or (isinstance(a, complex) and abs(a.imag) > 0):
        return None
    return float(np.real(a))


def _line_value(point: BranchPoint, line: GammaLine, block: Optional[str]) -> Optional[float]:
    if block is not None:
        a = _block_index(point, block)
        return None if a is None else a - line.a
    if point.stability is None or point.stability.spatial is None:
        return None
    return line.value(point.stability)


def eigen_one_detector(block: Optional[str] = "planar", planar_orbit: bool = True) -> Detector:
    """a - 1 for a block, or the Gamma_1 line for unsplit spatial orbits"""
    kind = PLANAR_TO_SPATIAL if block == "spatial" and planar_orbit else EIGEN_ONE
    line = GammaLine.eigen_one()
    return Detector(f"eigen-1[{block or 'full'}]", kind, lambda p: _line_value(p, line, block), block)


def eigen_minus_one_detector(block: Optional[str] = "planar") -> Detector:
    """a + 1; crossings double the period"""
    line = GammaLine.eigen_minus_one()
    return Detector(f"eigen--1[{block or 'full'}]", PERIOD_DOUBLING, lambda p: _line_value(p, line, block), block, k=2, l=1)


def kfold_detector(l: int, k: int, block: Optional[str] = "planar") -> Detector:
    """a - cos(2 pi l / k); crossings bifurcate the k-fold cover"""
    if not 0 < l < k or math.gcd(l, k) != 1:
        raise ValueError(f"k-fold line needs 0 < l < k coprime, got l={l}, k={k}")
    line = GammaLine.kfold(l, k)
    return Detector(f"{l}/{k}-fold[{block or 'full'}]", KFOLD, lambda p: _line_value(p, line, block), block, k=k, l=l)


def fold_detector() -> Detector:
    """dGamma/ds along the oriented family tangent"""
    return Detector("fold", FOLD, lambda p: p.dgamma_ds)


def default_detectors(branch: FamilyBranch, k_max: int = 5) -> List[Detector]:
    """Eigenvalue +-1, k-fold and fold detectors suited to the branch's orbits"""
    blocks = ["planar", "spatial"] if branch.planar else [None]
    detectors = [fold_detector()]
    for block in blocks:
        detectors.append(eigen_one_detector(block, branch.planar))
        detectors.append(eigen_minus_one_detector(block))
        for k, l, _ in kfold_lines(k_max):
            if k > 2:
                detectors.append(kfold_detector(l, k, block))
    return detectors


def scan(branch: FamilyBranch, detectors: List[Detector]) -> List[Tuple[Detector, Tuple[int, int]]]:
    """Every bracketed sign change, in branch order"""
    found = []
    for detector in detectors:
        for bracket in detector.brackets(branch):
            found.append((detector, bracket))
    found.sort(key=lambda item: item[1][0])
    logger.debug(f"{branch.name}: {len(found)} bracketed sign change(s)")
    return found
