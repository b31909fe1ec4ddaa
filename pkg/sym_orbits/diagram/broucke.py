"""Broucke stability diagram and crossings of its Gamma-lines"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from sym_orbits.core.errors import TangentialCrossing
from sym_orbits.spectral.classify import combine_tags, index_tag, indices_from_invariants
from sym_orbits.spectral.reduction import ReducedMonodromy
from sym_orbits.spectral.wonenburger import WonenburgerBlocks

logger = logging.getLogger(__name__)

BOUNDARY_TOL = 1e-8


@dataclass(frozen=True)
class StabilityPoint:
    """Planar index a and/or spatial point (tr A, det A)"""
    planar: Optional[float] = None
    spatial: Optional[Tuple[float, float]] = None

    @property
    def discriminant(self) -> float:
        """(tr A)^2 / 4 - det A; non-negative iff the A-eigenvalues are real"""
        x, y = self.spatial
        return 0.25 * x * x - y

    def roots(self) -> Tuple[complex, complex]:
        x, _ = self.spatial
        root = np.emath.sqrt(self.discriminant)
        return complex(0.5 * x + root), complex(0.5 * x - root)


def stability_point(source: Union[WonenburgerBlocks, ReducedMonodromy, NDArray]) -> StabilityPoint:
    """Base-layer point of Wonenburger blocks, a reduced monodromy or a bare matrix"""
    if isinstance(source, WonenburgerBlocks):
        if source.n == 1:
            return StabilityPoint(planar=float(source.A[0, 0]))
        planar = float(source.A[0, 0]) if source.split else None
        return StabilityPoint(planar=planar, spatial=(float(np.trace(source.A)), float(np.linalg.det(source.A))))
    if isinstance(source, ReducedMonodromy):
        if source.split:
            a_p = 0.5 * float(np.trace(source.planar_block))
            a_s = 0.5 * float(np.trace(source.spatial_block))
            return StabilityPoint(planar=a_p, spatial=(a_p + a_s, a_p * a_s))
        source = source.matrix
    matrix = np.asarray(source, dtype=float)
    if matrix.shape == (2, 2):
        return StabilityPoint(planar=0.5 * float(np.trace(matrix)))
    if matrix.shape == (4, 4):
        a1, a2 = indices_from_invariants(matrix)
        return StabilityPoint(spatial=(float(np.real(a1 + a2)), float(np.real(a1 * a2))))
    raise ValueError(f"cannot place a {matrix.shape} matrix in the stability diagram")


@dataclass(frozen=True)
class GammaLine:
    """Line y = a x - a^2 tangent to the discriminant parabola y = x^2 / 4"""
    kind: str
    a: float

    @classmethod
    def eigen_one(cls) -> 'GammaLine':
        return cls("eigen-1", 1.0)

    @classmethod
    def eigen_minus_one(cls) -> 'GammaLine':
        return cls("eigen--1", -1.0)

    @classmethod
    def elliptic(cls, phi: float) -> 'GammaLine':
        return cls("elliptic", math.cos(phi))

    @classmethod
    def hyperbolic(cls, lam: float) -> 'GammaLine':
        return cls("hyperbolic", 0.5 * (lam + 1.0 / lam))

    @classmethod
    def kfold(cls, l: int, k: int) -> 'GammaLine':
        return cls("elliptic", math.cos(2.0 * math.pi * l / k))

    @property
    def tangency(self) -> Tuple[float, float]:
        return 2.0 * self.a, self.a * self.a

    def value(self, point: StabilityPoint) -> float:
        """f = y - a x + a^2 for spatial points, a_p - a for planar ones"""
        if point.spatial is not None:
            x, y = point.spatial
            return y - self.a * x + self.a * self.a
        return point.planar - self.a


def region(point: StabilityPoint, tol: float = BOUNDARY_TOL) -> str:
    """Stability region, or a boundary tag within tol of Gamma_1, Gamma_-1 or Gamma_d"""
    if point.spatial is None:
        a = point.planar
        if abs(a - 1.0) < tol:
            return "Gamma_1"
        if abs(a + 1.0) < tol:
            return "Gamma_-1"
        return index_tag(a)
    if abs(GammaLine.eigen_one().value(point)) < tol:
        return "Gamma_1"
    if abs(GammaLine.eigen_minus_one().value(point)) < tol:
        return "Gamma_-1"
    disc = point.discriminant
    if abs(disc) < tol:
        return "Gamma_d"
    if disc < 0:
        return "N"
    a1, a2 = (r.real for r in point.roots())
    return combine_tags(index_tag(a1), index_tag(a2))


@dataclass
class Crossing:
    """Side change of a stability path across one Gamma-line"""
    parameter: float
    a: float
    side_change: int
    k: Optional[int] = None
    l: Optional[int] = None
    tangential: bool = False

    def to_dict(self) -> dict:
        return {"parameter": self.parameter, "a": self.a, "side_change": self.side_change,
                "k": self.k, "l": self.l, "tangential": self.tangential}


Path = Sequence[Tuple[float, StabilityPoint]]
Resolver = Callable[[float], StabilityPoint]


def _bisect(line: GammaLine, lo: float, f_lo: float, hi: float, f_hi: float,
            resolver: Optional[Resolver], tol: float) -> float:
    if resolver is None:
        # secant estimate between samples
        return lo + (hi - lo) * f_lo / (f_lo - f_hi)
    while abs(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        f_mid = line.value(resolver(mid))
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    return 0.5 * (lo + hi)


def crossings(
    path: Path,
    a: Union[float, GammaLine],
    resolver: Optional[Resolver] = None,
    tol: float = 1e-10,
    strict: bool = True,
) -> List[Crossing]:
    """Parameters where the path changes sides of the line with slope a.

    A value within the boundary tolerance at a sample is attributed to the
    segment starting there. Touching without a side change raises
    TangentialCrossing, or is reported flagged when ``strict`` is False.
    """
    line = a if isinstance(a, GammaLine) else GammaLine("elliptic", float(a))
    values = [line.value(point) for _, point in path]
    params = [p for p, _ in path]
    found: List[Crossing] = []
    i = 0
    while i < len(values) - 1:
        f0, f1 = values[i], values[i + 1]
        if abs(f0) < BOUNDARY_TOL:
            before = values[i - 1] if i > 0 else None
            after = f1
            if before is not None and abs(after) >= BOUNDARY_TOL and (before > 0) != (after > 0):
                found.append(Crossing(params[i], line.a, 1 if after > 0 else -1))
            elif before is not None:
                found.append(_tangential(params[i], line, strict))
            i += 1
            continue
        if abs(f1) >= BOUNDARY_TOL and (f0 > 0) != (f1 > 0):
            parameter = _bisect(line, params[i], f0, params[i + 1], f1, resolver, tol)
            found.append(Crossing(parameter, line.a, 1 if f1 > 0 else -1))
        i += 1
    return found


def _tangential(parameter: float, line: GammaLine, strict: bool) -> Crossing:
    if strict:
        raise TangentialCrossing(parameter, line.a)
    logger.warning(f"Tangential contact with line a={line.a:.6f} at parameter {parameter:.10f}")
    return Crossing(parameter, line.a, 0, tangential=True)


def kfold_lines(k_max: int) -> List[Tuple[int, int, GammaLine]]:
    """(k, l, line) for 1 <= l < k <= k_max, gcd(l, k) = 1, one line per slope"""
    if k_max < 2:
        raise ValueError(f"k_max must be >= 2, got {k_max}")
    lines = []
    seen = set()
    for k in range(2, k_max + 1):
        for l in range(1, k):
            if math.gcd(l, k) != 1:
                continue
            line = GammaLine.kfold(l, k)
            key = round(line.a, 12)
            if key in seen:
                continue
            seen.add(key)
            lines.append((k, l, line))
    return lines


def kfold_candidates(path: Path, k_max: int, resolver: Optional[Resolver] = None, tol: float = 1e-10) -> List[Crossing]:
    """All crossings of k-fold elliptic lines, sorted by parameter"""
    found = []
    for k, l, line in kfold_lines(k_max):
        for crossing in crossings(path, line, resolver, tol, strict=False):
            crossing.k, crossing.l = k, l
            found.append(crossing)
    found.sort(key=lambda c: c.parameter)
    return found


def stability_frame(path: Path) -> pd.DataFrame:
    """gamma, trA, detA, region per path sample"""
    rows = []
    for parameter, point in path:
        x, y = point.spatial if point.spatial is not None else (2.0 * point.planar, float("nan"))
        rows.append({"gamma": parameter, "trA": x, "detA": y, "region": region(point)})
    return pd.DataFrame(rows, columns=["gamma", "trA", "detA", "region"])
