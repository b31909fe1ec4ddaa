"""Index bookkeeping along a family from an anchored orbit"""
import itertools
import logging
import math
from typing import List, Optional, Sequence, Tuple

from sym_orbits.core.errors import AmbiguousJump
from sym_orbits.index.conley_zehnder import IndexRecord
from sym_orbits.spectral.classify import DEGENERATE, EigenConfig

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
NEAR = 0.5 * math.pi

# a component is (tag, angle) with angle None unless the tag is E
Component = Tuple[str, Optional[float]]


def _circular(a: float, b: float) -> float:
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


def _cost(before: Component, after: Component) -> float:
    (t0, a0), (t1, a1) = before, after
    if t0 == "E" and t1 == "E":
        return _circular(a0, a1)
    if t0 == "E" and t1 == "H+":
        return min(a0, TWO_PI - a0)
    if t0 == "H+" and t1 == "E":
        return min(a1, TWO_PI - a1)
    if {t0, t1} == {"E", "H-"}:
        angle = a0 if t0 == "E" else a1
        return abs(angle - math.pi)
    if t0 == t1:
        return 0.0
    return math.inf


def component_jump(before: Component, after: Component) -> int:
    """Index change of one block between two non-degenerate neighbours.

    Entering H+ near angle 0 lowers the index by one and near 2 pi raises
    it; leaving H+ does the reverse. An elliptic angle passing 2 pi upwards
    adds two. Passing -1 changes nothing.
    """
    (t0, a0), (t1, a1) = before, after
    if t0 == "E" and t1 == "E":
        if a0 > TWO_PI - NEAR and a1 < NEAR:
            return 2
        if a0 < NEAR and a1 > TWO_PI - NEAR:
            return -2
        return 0
    if t0 == "E" and t1 == "H+":
        return 1 if a0 > math.pi else -1
    if t0 == "H+" and t1 == "E":
        return -1 if a1 > math.pi else 1
    if {t0, t1} == {"E", "H-"} or t0 == t1:
        return 0
    raise AmbiguousJump(f"no jump rule for {t0} -> {t1}", before=t0, after=t1)


def components(config: EigenConfig) -> List[Component]:
    """Per-block components; planar orbits keep the (planar, spatial) order"""
    if config.planar is not None and config.spatial is not None:
        return [(config.planar, config.angles.get("planar")), (config.spatial, config.angles.get("spatial"))]
    if config.config == "N":
        return [("N", None)]
    result = []
    for name in ("a1", "a2"):
        if name in config.indices:
            a = float(config.indices[name].real)
            tag = "E" if abs(a) < 1 else ("H+" if a > 0 else "H-")
            result.append((tag, config.angles.get(name)))
    return result


def total_jump(before: EigenConfig, after: EigenConfig) -> int:
    """Index change of a spatial (unsplit) configuration"""
    c0, c1 = components(before), components(after)
    if c0 == [("N", None)] or c1 == [("N", None)]:
        other = c1 if c0 == [("N", None)] else c0
        tags = sorted(t for t, _ in other)
        if other == [("N", None)] or tags in (["E", "E"], ["H+", "H+"], ["H-", "H-"]):
            return 0
        raise AmbiguousJump(f"no jump rule for {before.config} -> {after.config}",
                            before=before.config, after=after.config)
    best = None
    for perm in itertools.permutations(c1):
        cost = sum(_cost(a, b) for a, b in zip(c0, perm))
        if best is None or cost < best[0]:
            best = (cost, perm)
    if best is None or math.isinf(best[0]):
        raise AmbiguousJump(f"no jump rule for {before.config} -> {after.config}",
                            before=before.config, after=after.config)
    return sum(component_jump(a, b) for a, b in zip(c0, best[1]))


def step(record: IndexRecord, before: EigenConfig, after: EigenConfig) -> IndexRecord:
    """Carry a record from one configuration to the next"""
    if record.planar is not None and before.planar is not None and after.planar is not None:
        dp = component_jump((before.planar, before.angles.get("planar")), (after.planar, after.angles.get("planar")))
        ds = component_jump((before.spatial, before.angles.get("spatial")), (after.spatial, after.angles.get("spatial")))
        if dp or ds:
            logger.info(f"Index jump planar {dp:+d}, spatial {ds:+d} ({before.config} -> {after.config})")
        return record.shifted(planar=dp, spatial=ds)
    dt = total_jump(before, after)
    if dt:
        logger.info(f"Index jump {dt:+d} ({before.config} -> {after.config})")
    return record.shifted(total=dt)


def first_regular(configs: Sequence[EigenConfig], position: int = 0) -> int:
    """Position of the first non-degenerate configuration at or after ``position``, else before it"""
    for i in itertools.chain(range(position, len(configs)), range(position - 1, -1, -1)):
        if not configs[i].degenerate:
            return i
    raise AmbiguousJump("every orbit on the branch is degenerate", position=position)


def propagate_index(branch, anchor: IndexRecord, anchor_position: int = 0) -> List[Optional[IndexRecord]]:
    """Indices for every point of a branch; degenerate points get None.

    ``branch`` is a FamilyBranch or a sequence of EigenConfig. The anchor
    belongs to the first non-degenerate point at or after ``anchor_position``;
    a branch seeded at a bifurcation usually starts inside the degenerate band.
    """
    configs: Sequence[EigenConfig] = branch.configs() if hasattr(branch, "configs") else list(branch)
    records: List[Optional[IndexRecord]] = [None] * len(configs)
    if not configs:
        return records
    regular = first_regular(configs, anchor_position)
    if regular != anchor_position:
        logger.info(f"Anchor point {anchor_position} is degenerate; anchoring at point {regular}")
        anchor_position = regular
    records[anchor_position] = anchor

    for direction in (1, -1):
        current, last = anchor, configs[anchor_position]
        i = anchor_position + direction
        while 0 <= i < len(configs):
            config = configs[i]
            if config.config != DEGENERATE:
                current = step(current, last, config)
                last = config
                records[i] = current
            i += direction
    return records
