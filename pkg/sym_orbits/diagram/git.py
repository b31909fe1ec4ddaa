"""Layered labels refining the stability point with Krein and B-sign data"""
import logging
from dataclasses import dataclass, replace
from typing import Optional, Tuple

from sym_orbits.diagram.broucke import StabilityPoint, region
from sym_orbits.spectral.classify import EigenConfig
from sym_orbits.spectral.wonenburger import SignRecord, sign_symbol

logger = logging.getLogger(__name__)

LAYERS = ("base", "middle", "top")

# (tag, sign) per real-eigenvalue branch; sign None when undefined or dropped
Branch = Tuple[str, Optional[int]]


@dataclass(frozen=True)
class GitLabel:
    """Label of one orbit on a layer"""
    layer: str
    point: StabilityPoint
    branches: Tuple[Branch, ...] = ()

    def __post_init__(self):
        if self.layer not in LAYERS:
            raise ValueError(f"Unknown layer: {self.layer}")

    @property
    def region(self) -> str:
        return region(self.point)

    def describe(self) -> str:
        inner = ", ".join(f"({tag},{sign_symbol(sign)})" for tag, sign in self.branches)
        return f"{self.layer}:{self.region}{{{inner}}}"


def collapse(label: GitLabel) -> GitLabel:
    """top -> middle drops hyperbolic signs; middle -> base drops the rest"""
    if label.layer == "top":
        branches = tuple((tag, sign if tag == "E" else None) for tag, sign in label.branches)
        return replace(label, layer="middle", branches=branches)
    if label.layer == "middle":
        return GitLabel("base", label.point)
    raise ValueError("base layer does not collapse further")


def _sign_for(signs: SignRecord, point: int, block: Optional[str], a: float) -> Optional[int]:
    entries = signs.at(point, block)
    if not entries:
        return None
    closest = min(entries, key=lambda e: abs(e.a - a))
    if abs(closest.a - a) > 1e-6 * max(1.0, abs(a)):
        return None
    return closest.b_sign


def git_label(config: EigenConfig, signs: SignRecord, point: StabilityPoint, at: int = 0) -> GitLabel:
    """Top-layer label from the configuration and the B-signs at symmetric point ``at``"""
    branches = []
    if config.planar is not None and config.spatial is not None:
        for block in ("planar", "spatial"):
            tag = getattr(config, block)
            a = config.indices.get(block)
            sign = _sign_for(signs, at, block, float(a)) if a is not None and tag != "degenerate" else None
            branches.append((tag, sign))
    elif config.config != "N":
        for name in ("a1", "a2", "planar"):
            a = config.indices.get(name)
            if a is None:
                continue
            a = float(a.real) if isinstance(a, complex) else float(a)
            tag = "E" if abs(a) < 1 else ("H+" if a > 0 else "H-")
            branches.append((tag, _sign_for(signs, at, None, a)))
    unlabeled = [tag for tag, sign in branches if sign is None]
    if unlabeled:
        logger.debug(f"Unlabeled branches {unlabeled} in {config.config}")
    return GitLabel("top", point, tuple(branches))


def expect_bifurcation(first: GitLabel, second: GitLabel) -> bool:
    """True when any path joining the two orbits must pass a bifurcation.

    Different Broucke regions force one; so do equal regions whose labels
    carry opposite signs on a branch of the same type (Krein signs on the
    middle layer, B-signs on the top layer).
    """
    if first.region != second.region:
        return True
    left = sorted(first.branches, key=str)
    right = sorted(second.branches, key=str)
    if [t for t, _ in left] != [t for t, _ in right]:
        return True
    return any(s1 is not None and s2 is not None and s1 != s2 for (_, s1), (_, s2) in zip(left, right))
