"""Closed-form Conley-Zehnder indices and the good/bad rule"""
import logging
import math
from dataclasses import dataclass, replace
from typing import Optional

from sym_orbits.core.errors import DegenerateCover, ParityMismatch
from sym_orbits.spectral.classify import EigenConfig

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
COVER_TOL = 1e-9

# configurations whose even covers are bad
BAD_PLANAR = {"H-"}
BAD_SPATIAL = {"EH-", "H+-"}


def cz_elliptic(phi_total: float, k: int = 1) -> int:
    """1 + 2 floor(k phi / 2pi) for a total rotation phi"""
    if k < 1:
        raise ValueError(f"cover multiplicity must be >= 1, got {k}")
    if phi_total < 0:
        raise ValueError(f"total rotation must be non-negative, got {phi_total}")
    turns = k * phi_total / TWO_PI
    if abs(turns - round(turns)) < COVER_TOL:
        raise DegenerateCover(f"{k} * phi / 2pi = {turns:.12f} is an integer", k=k, phi=phi_total)
    return 1 + 2 * math.floor(turns)


def cz_hyperbolic(n: int, k: int = 1, tag: Optional[str] = None) -> int:
    """k * n for a hyperbolic block whose eigenspaces turn by n half-turns"""
    if n < 0:
        raise ValueError(f"hyperbolic winding must be non-negative, got {n}")
    if tag == "H+" and n % 2:
        raise ParityMismatch(f"positive hyperbolic block needs even n, got {n}", n=n, tag=tag)
    if tag == "H-" and not n % 2:
        raise ParityMismatch(f"negative hyperbolic block needs odd n, got {n}", n=n, tag=tag)
    return k * n


def is_good(config: EigenConfig, k: int, underlying: Optional[EigenConfig] = None, planar_problem: bool = False) -> bool:
    """Even covers of H- (planar problem) or of EH-/H+- (spatial problem) are bad"""
    if k % 2:
        return True
    base = underlying or config
    if planar_problem:
        return base.planar not in BAD_PLANAR
    return base.config not in BAD_SPATIAL


def block_index(tag: str, angle: Optional[float], winding: int, k: int = 1) -> int:
    """Index of one block from its tag, reported angle and winding.

    ``winding`` is m for elliptic blocks (total rotation 2 pi m + angle) and
    the half-turn count n for hyperbolic ones.
    """
    if tag == "E":
        return cz_elliptic(TWO_PI * winding + angle, k)
    if tag in ("H+", "H-"):
        return cz_hyperbolic(winding, k, tag)
    raise ValueError(f"no closed-form index for configuration {tag}")


def winding_of(tag: str, index: int) -> int:
    """Inverse of block_index at k = 1"""
    if tag == "E":
        if index % 2 == 0:
            raise ParityMismatch(f"elliptic block needs an odd index, got {index}", index=index)
        return (index - 1) // 2
    if tag in ("H+", "H-"):
        cz_hyperbolic(index, 1, tag)
        return index
    raise ValueError(f"no winding for configuration {tag}")


@dataclass
class IndexRecord:
    """Conley-Zehnder indices of one orbit.

    ``planar``/``spatial`` are block indices for planar orbits; spatial
    (non-planar) orbits carry only ``total``.
    """
    total: int
    planar: Optional[int] = None
    spatial: Optional[int] = None
    good: bool = True
    cover: int = 1

    def __post_init__(self):
        if self.planar is not None and self.spatial is not None and self.total != self.planar + self.spatial:
            raise ValueError(f"total {self.total} != {self.planar} + {self.spatial}")

    @classmethod
    def split(cls, planar: int, spatial: int, good: bool = True, cover: int = 1) -> 'IndexRecord':
        return cls(total=planar + spatial, planar=planar, spatial=spatial, good=good, cover=cover)

    @property
    def parity(self) -> int:
        """(-1)^total"""
        return -1 if self.total % 2 else 1

    def shifted(self, planar: int = 0, spatial: int = 0, total: Optional[int] = None) -> 'IndexRecord':
        """Record after index jumps"""
        if self.planar is not None:
            return replace(self, planar=self.planar + planar, spatial=self.spatial + spatial,
                           total=self.total + planar + spatial)
        return replace(self, total=self.total + (total if total is not None else planar + spatial))

    def for_cover(self, k: int, config: EigenConfig) -> 'IndexRecord':
        """Indices of the k-fold cover from this simple orbit's indices and angles"""
        if self.planar is None:
            raise ValueError("cover indices need the planar/spatial split")
        planar = block_index(config.planar, config.angles.get("planar"), winding_of(config.planar, self.planar), k)
        spatial = block_index(config.spatial, config.angles.get("spatial"), winding_of(config.spatial, self.spatial), k)
        return IndexRecord.split(
            planar, spatial, good=is_good(config, k * self.cover), cover=self.cover * k
        )

    def check_parity(self, config: EigenConfig) -> None:
        """Block parities must match their tags"""
        for tag, index in ((config.planar, self.planar), (config.spatial, self.spatial)):
            if index is None or tag is None:
                continue
            if tag in ("E", "H-") and index % 2 == 0:
                raise ParityMismatch(f"{tag} block with even index {index}", tag=tag, index=index)
            if tag == "H+" and index % 2:
                raise ParityMismatch(f"H+ block with odd index {index}", tag=tag, index=index)

    def to_dict(self) -> dict:
        return {"planar": self.planar, "spatial": self.spatial, "total": self.total, "good": self.good}
