"""Signed orbit counts that must agree on both sides of a bifurcation"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from sym_orbits.core.errors import MixedDimension, ParityMismatch
from sym_orbits.index.conley_zehnder import is_good
from sym_orbits.spectral.classify import PLANAR_TAGS, SPATIAL_TAGS, EigenConfig

logger = logging.getLogger(__name__)

PLANAR_SIGNS = {"H+": 1, "E": -1, "H-": -1}
SPATIAL_SIGNS = {"H--": 1, "EH-": 1, "E2": 1, "H++": 1, "N": 1, "H+-": -1, "EH+": -1}


@dataclass
class CensusEntry:
    """One orbit near the bifurcation"""
    tag: str
    cover: int = 1
    good: bool = True
    cz: Optional[int] = None
    label: str = ""

    @classmethod
    def from_config(
        cls,
        config: EigenConfig,
        cover: int = 1,
        underlying: Optional[EigenConfig] = None,
        cz: Optional[int] = None,
        planar_problem: bool = False,
        label: str = "",
    ) -> 'CensusEntry':
        tag = config.planar if planar_problem else config.config
        good = is_good(config, cover, underlying, planar_problem)
        return cls(tag=tag, cover=cover, good=good, cz=cz, label=label)

    def to_dict(self) -> Dict[str, Any]:
        return {"tag": self.tag, "cover": self.cover, "good": self.good, "cz": self.cz, "label": self.label}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'CensusEntry':
        return cls(data["tag"], data.get("cover", 1), data.get("good", True), data.get("cz"), data.get("label", ""))


@dataclass
class OrbitCensus:
    """Orbits found on one side of a bifurcation"""
    side: str
    entries: List[CensusEntry] = field(default_factory=list)

    def add(self, entry: CensusEntry) -> None:
        self.entries.append(entry)

    def to_dict(self) -> Dict[str, Any]:
        return {"side": self.side, "entries": [e.to_dict() for e in self.entries]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'OrbitCensus':
        return cls(data["side"], [CensusEntry.from_dict(e) for e in data.get("entries", [])])


def _chi(census: OrbitCensus, signs: Dict[str, int], allowed, dimension: str) -> int:
    total = 0
    for entry in census.entries:
        if entry.tag not in allowed:
            raise MixedDimension(f"{entry.tag} entry in a {dimension} census", tag=entry.tag)
        if not entry.good:
            continue
        sign = signs[entry.tag]
        if entry.cz is not None and sign != (-1) ** entry.cz:
            raise ParityMismatch(
                f"{entry.label or entry.tag} counts {sign:+d} but has index {entry.cz}",
                tag=entry.tag, cz=entry.cz
            )
        total += sign
    return total


def chi_planar(census: OrbitCensus) -> int:
    """#{good H+} - #{E, H-}"""
    return _chi(census, PLANAR_SIGNS, PLANAR_TAGS, "planar")


def chi_spatial(census: OrbitCensus) -> int:
    """#{H--, EH-, E2, good H++, N} - #{H+-, good EH+}"""
    return _chi(census, SPATIAL_SIGNS, SPATIAL_TAGS, "spatial")


def is_planar_census(*censuses: OrbitCensus) -> bool:
    """True when every entry carries a planar tag (and there is at least one)"""
    entries = [e for census in censuses for e in census.entries]
    return bool(entries) and all(e.tag in PLANAR_TAGS for e in entries)


@dataclass
class InvarianceReport:
    """Outcome of comparing the counts on both sides"""
    gamma_star: Optional[float]
    chi_before: int
    chi_after: int
    before: OrbitCensus
    after: OrbitCensus

    @property
    def passed(self) -> bool:
        return self.chi_before == self.chi_after

    @property
    def suspect_side(self) -> Optional[str]:
        """Side with fewer orbits on a failed check, where a missed orbit is most likely"""
        if self.passed:
            return None
        n_before, n_after = len(self.before.entries), len(self.after.entries)
        if n_before == n_after:
            return None
        return "before" if n_before < n_after else "after"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "gamma_star": self.gamma_star,
            "chi_before": self.chi_before,
            "chi_after": self.chi_after,
            "pass": self.passed,
            "suspect_side": self.suspect_side,
            "censuses": {"before": self.before.to_dict(), "after": self.after.to_dict()},
        }


def check_invariance(event, before: OrbitCensus, after: OrbitCensus) -> InvarianceReport:
    """Compare counts before and after; a mismatch means an orbit was missed"""
    gamma_star = getattr(event, "parameter", event if isinstance(event, (int, float)) else None)
    count = chi_planar if is_planar_census(before, after) else chi_spatial
    report = InvarianceReport(gamma_star, count(before), count(after), before, after)
    if report.passed:
        logger.info(f"Floer number {report.chi_before} preserved at {gamma_star}")
    else:
        logger.warning(
            f"Floer number changed at {gamma_star}: {report.chi_before} -> {report.chi_after}; "
            f"before={[e.tag for e in before.entries]} after={[e.tag for e in after.entries]}"
        )
    return report
