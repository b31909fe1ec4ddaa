"""Full spectral analysis of one orbit"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional

from sym_orbits.core.errors import BasisConstructionFailed, NotSymmetric
from sym_orbits.dynamics.symmetry import get_symmetry
from sym_orbits.flows.propagator import Propagator
from sym_orbits.shooting.orbit import PeriodicOrbit
from sym_orbits.spectral.classify import EigenConfig, classify
from sym_orbits.spectral.monodromy import check_symplectic, monodromy, symmetric_monodromy
from sym_orbits.spectral.reduction import ReducedMonodromy, reduce
from sym_orbits.spectral.wonenburger import SignRecord, WonenburgerBlocks, sign_record, wonenburger_at

logger = logging.getLogger(__name__)


@dataclass
class SpectralRecord:
    """Configuration, signs and quality figures of one orbit"""
    config: EigenConfig
    signs: SignRecord
    reduced: ReducedMonodromy
    blocks: List[WonenburgerBlocks] = field(default_factory=list)
    symplectic_error: float = 0.0
    wonenburger_error: float = 0.0

    @property
    def blocks0(self) -> Optional[WonenburgerBlocks]:
        return self.blocks[0] if self.blocks else None

    def to_dict(self) -> dict:
        data = self.config.to_dict()
        data["signs"] = self.signs.to_list()
        data["symplectic_error"] = self.symplectic_error
        data["wonenburger_error"] = self.wonenburger_error
        return data


def analyze(orbit: PeriodicOrbit, propagator: Optional[Propagator] = None) -> SpectralRecord:
    """Monodromy, reduction, Wonenburger blocks at both symmetric points, configuration and signs.

    Raises StructureViolation when a monodromy or its reduction is not
    symplectic, or the blocks break the Wonenburger relations.
    """
    propagator = propagator or Propagator(orbit.model)
    symmetry = orbit.symmetries[0] if orbit.symmetries else None
    monodromies = None
    if symmetry and get_symmetry(symmetry).antisymplectic:
        try:
            monodromies = symmetric_monodromy(orbit, propagator, symmetry)
        except NotSymmetric as e:
            logger.warning(f"Orbit at Gamma={orbit.gamma:.8f} is not {symmetry}-symmetric: {e}")
    matrix = monodromies.at_start if monodromies is not None else monodromy(orbit, propagator)
    error = check_symplectic(matrix)
    reduced = reduce(matrix, orbit)
    check_symplectic(reduced.matrix, "reduced monodromy")

    blocks: List[WonenburgerBlocks] = []
    if monodromies is not None:
        try:
            blocks = [wonenburger_at(orbit, i, propagator, symmetry, monodromies) for i in (0, 1)]
        except BasisConstructionFailed as e:
            logger.warning(f"No Wonenburger form for orbit at Gamma={orbit.gamma:.8f}: {e}")

    config = classify(reduced, blocks[0] if blocks else None)
    record = SpectralRecord(
        config=config,
        signs=sign_record(blocks),
        reduced=reduced,
        blocks=blocks,
        symplectic_error=error,
        wonenburger_error=max((b.scaled_relation_error() for b in blocks), default=0.0),
    )
    logger.debug(f"Orbit Gamma={orbit.gamma:.8f}: {config.config} angles={config.angles}")
    return record
