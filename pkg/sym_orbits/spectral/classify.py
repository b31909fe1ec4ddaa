"""Floquet multipliers and eigenvalue configurations"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from sym_orbits.core.errors import DegenerateWithinTolerance
from sym_orbits.core.symplectic import standard_j
from sym_orbits.spectral.reduction import ReducedMonodromy
from sym_orbits.spectral.wonenburger import DEGENERATE_BAND, WonenburgerBlocks

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi

_COMBINED = {
    frozenset(["E"]): "E2",
    frozenset(["E", "H+"]): "EH+",
    frozenset(["E", "H-"]): "EH-",
    frozenset(["H+"]): "H++",
    frozenset(["H-"]): "H--",
    frozenset(["H+", "H-"]): "H+-",
}

PLANAR_TAGS = ("E", "H+", "H-")
SPATIAL_TAGS = ("E2", "EH+", "EH-", "H++", "H--", "H+-", "N")
DEGENERATE = "degenerate"


def stability_index(lam: complex):
    """a(lambda) = (lambda + 1/lambda) / 2"""
    if lam == 0:
        raise ValueError("multiplier must be nonzero")
    a = 0.5 * (lam + 1.0 / lam)
    if np.iscomplexobj(a) or isinstance(a, complex):
        if abs(np.imag(a)) <= 1e-15 * max(1.0, abs(a)):
            return float(np.real(a))
        return complex(a)
    return float(a)


def multiplier_from_index(a) -> complex:
    """lambda(a) = a + sqrt(a^2 - 1); real for |a| >= 1, on the unit circle for |a| < 1"""
    lam = a + np.emath.sqrt(a * a - 1.0)
    if np.iscomplexobj(lam) and abs(np.imag(lam)) > 0:
        return complex(lam)
    return float(np.real(lam))


def hyperbolic_multiplier(a: float) -> float:
    """Multiplier of modulus > 1 for a real index with |a| > 1"""
    return a + np.sign(a) * np.sqrt(a * a - 1.0)


def index_tag(a, band: float = DEGENERATE_BAND) -> str:
    """E, H+, H-, N (complex) or degenerate for one stability index"""
    if isinstance(a, complex) and abs(a.imag) > band:
        return "N"
    a = float(np.real(a))
    if abs(a - 1.0) < band or abs(a + 1.0) < band:
        return DEGENERATE
    if a > 1.0:
        return "H+"
    if a < -1.0:
        return "H-"
    return "E"


def combine_tags(first: str, second: str) -> str:
    """Configuration of the spatial problem from two block tags"""
    if DEGENERATE in (first, second):
        return DEGENERATE
    if "N" in (first, second):
        return "N"
    return _COMBINED[frozenset([first, second])]


def krein_angle(matrix: NDArray, a: float) -> float:
    """Rotation angle in [0, 2pi) of the elliptic pair with index a, oriented by its Krein sign.

    The linearized flow of a positive-definite quadratic Hamiltonian turns
    forward, so q' = p, p' = -q over time t has angle t mod 2pi.
    """
    n = matrix.shape[0] // 2
    j = standard_j(n)
    theta = float(np.arccos(np.clip(a, -1.0, 1.0)))
    target = np.exp(1j * theta)
    values, vectors = np.linalg.eig(matrix)
    i = int(np.argmin(np.abs(values - target)))
    w = vectors[:, i]
    krein = float(np.imag(np.conj(w) @ j @ w))
    return theta if krein > 0 else TWO_PI - theta


def wonenburger_angle(a: float, b: float) -> float:
    """b < 0: arccos(a); b > 0: 2pi - arccos(a)"""
    theta = float(np.arccos(np.clip(a, -1.0, 1.0)))
    return theta if b < 0 else TWO_PI - theta


def indices_from_invariants(matrix: NDArray) -> Tuple[complex, complex]:
    """Both stability indices of a 4x4 symplectic matrix from tr M and tr M^2"""
    s1 = float(np.trace(matrix))
    s2 = 0.5 * (s1 * s1 - float(np.trace(matrix @ matrix)))
    # a^2 - (s1/2) a + (s2 - 2)/4 = 0
    half_sum = 0.25 * s1
    disc = half_sum * half_sum - 0.25 * (s2 - 2.0)
    root = np.emath.sqrt(disc)
    return _as_index(half_sum + root), _as_index(half_sum - root)


def _as_index(value) -> complex:
    if abs(np.imag(value)) < 1e-14:
        return float(np.real(value))
    return complex(value)


@dataclass
class EigenConfig:
    """Eigenvalue configuration of a reduced monodromy.

    ``planar`` and ``spatial`` are block tags for planar orbits of the
    spatial problem; ``config`` is the tag of the spatial problem as a whole.
    """
    config: str
    planar: Optional[str] = None
    spatial: Optional[str] = None
    indices: Dict[str, complex] = field(default_factory=dict)
    angles: Dict[str, float] = field(default_factory=dict)
    hyperbolic: Dict[str, float] = field(default_factory=dict)
    multipliers: List[complex] = field(default_factory=list)

    @property
    def degenerate(self) -> bool:
        return self.config == DEGENERATE

    def to_dict(self) -> dict:
        return {
            "multipliers": [[float(np.real(m)), float(np.imag(m))] for m in self.multipliers],
            "config": self.config,
            "planar": self.planar,
            "spatial": self.spatial,
            "angles": dict(self.angles),
            "hyperbolic": dict(self.hyperbolic),
            "indices": {k: _encode(v) for k, v in self.indices.items()},
        }


def _encode(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    return float(value)


def _pair_multipliers(a, angle: Optional[float]) -> List[complex]:
    if isinstance(a, complex):
        lam = complex(a + np.emath.sqrt(a * a - 1.0))
        return [lam, 1.0 / lam]
    if angle is not None:
        return [complex(np.exp(1j * angle)), complex(np.exp(-1j * angle))]
    lam = hyperbolic_multiplier(a) if abs(a) > 1 else 1.0
    return [complex(lam), complex(1.0 / lam)]


def _describe(name: str, a, angle_matrix: Optional[NDArray], b_entry: Optional[float], config: EigenConfig, band: float) -> str:
    tag = index_tag(a, band)
    config.indices[name] = a
    angle = None
    if tag == "E":
        if b_entry is not None:
            angle = wonenburger_angle(float(a), b_entry)
        else:
            angle = krein_angle(angle_matrix, float(a))
        config.angles[name] = angle
    elif tag in ("H+", "H-"):
        config.hyperbolic[name] = float(hyperbolic_multiplier(float(a)))
    config.multipliers.extend(_pair_multipliers(a, angle))
    return tag


def classify(
    red: ReducedMonodromy,
    blocks: Optional[WonenburgerBlocks] = None,
    band: float = DEGENERATE_BAND,
    strict: bool = False,
) -> EigenConfig:
    """Tag the eigenvalue configuration.

    Stability indices come from the Wonenburger A-block when available and
    from matrix invariants otherwise.
    """
    config = EigenConfig(config=DEGENERATE)
    if red.split:
        use_blocks = blocks is not None and blocks.split
        a_p = float(blocks.A[0, 0]) if use_blocks else 0.5 * float(np.trace(red.planar_block))
        a_s = float(blocks.A[1, 1]) if use_blocks else 0.5 * float(np.trace(red.spatial_block))
        config.planar = _describe("planar", a_p, red.planar_block, blocks.B[0, 0] if use_blocks else None, config, band)
        config.spatial = _describe("spatial", a_s, red.spatial_block, blocks.B[1, 1] if use_blocks else None, config, band)
        config.config = combine_tags(config.planar, config.spatial)
    elif red.dimension == 2:
        a = 0.5 * float(np.trace(red.matrix))
        config.planar = _describe("planar", a, red.matrix, None, config, band)
        config.config = config.planar
    else:
        if blocks is not None:
            values = np.linalg.eigvals(blocks.A)
            pair = tuple(_as_index(v) for v in values)
        else:
            pair = indices_from_invariants(red.matrix)
        if any(isinstance(a, complex) and abs(a.imag) > band for a in pair):
            config.config = "N"
            config.indices = {"a1": pair[0], "a2": pair[1]}
            config.multipliers = _pair_multipliers(complex(pair[0]), None)
            config.multipliers += [m.conjugate() for m in config.multipliers]
        else:
            a1, a2 = sorted(float(np.real(a)) for a in pair)
            t1 = _describe("a1", a1, red.matrix, None, config, band)
            t2 = _describe("a2", a2, red.matrix, None, config, band)
            config.config = combine_tags(t1, t2)

    if config.degenerate:
        logger.debug(f"Degenerate configuration, indices {config.indices}")
        if strict:
            raise DegenerateWithinTolerance(f"stability index within {band} of +-1", indices=str(config.indices))
    return config
