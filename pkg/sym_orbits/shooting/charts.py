"""Half-period shooting charts on fixed loci of the involutions"""
from dataclasses import dataclass
from typing import Dict, Tuple

from sym_orbits.dynamics.symmetry import COORDINATES, get_symmetry


@dataclass(frozen=True)
class ShootingChart:
    """Which initial coordinates are solved for and which vanish at the half period"""
    name: str
    symmetry: str
    unknowns: Tuple[int, ...]
    residuals: Tuple[int, ...]
    planar: bool = False

    def __post_init__(self):
        locus = get_symmetry(self.symmetry).fixed_locus
        if not set(self.residuals) <= set(locus):
            raise ValueError(f"chart {self.name}: residuals must vanish on Fix({self.symmetry})")
        if set(self.unknowns) & set(locus):
            raise ValueError(f"chart {self.name}: unknowns must be free on Fix({self.symmetry})")
        if len(self.unknowns) != len(self.residuals):
            raise ValueError(f"chart {self.name}: unknown and residual counts differ")

    @property
    def size(self) -> int:
        """Number of unknowns including the half period"""
        return len(self.unknowns) + 1

    @property
    def lead_residual(self) -> int:
        """Coordinate whose zero marks the half-period return"""
        return self.residuals[0]

    def describe(self) -> str:
        unknowns = ", ".join(COORDINATES[i] for i in self.unknowns)
        residuals = ", ".join(COORDINATES[i] for i in self.residuals)
        return f"{self.name}: unknowns ({unknowns}, tau), residuals ({residuals})"


CHARTS: Dict[str, ShootingChart] = {
    "planar": ShootingChart("planar", "rho", unknowns=(0, 4), residuals=(1, 3), planar=True),
    "L": ShootingChart("L", "rho", unknowns=(0, 4, 5), residuals=(1, 2, 3)),
    "L_tilde": ShootingChart("L_tilde", "rho_tilde", unknowns=(0, 2, 4), residuals=(1, 3, 5)),
    "kappa_planar": ShootingChart("kappa_planar", "kappa", unknowns=(1, 3), residuals=(0, 4), planar=True),
    "kappa": ShootingChart("kappa", "kappa", unknowns=(1, 3, 5), residuals=(0, 2, 4)),
    "kappa_tilde": ShootingChart("kappa_tilde", "kappa_tilde", unknowns=(1, 2, 3), residuals=(0, 4, 5)),
}


def get_chart(name: str) -> ShootingChart:
    """Look up a chart by name"""
    try:
        return CHARTS[name]
    except KeyError:
        raise ValueError(f"Unknown shooting chart: {name}") from None
