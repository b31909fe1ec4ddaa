"""Appendix tables shipped as regression fixtures"""
import json
import logging
import math
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray

logger = logging.getLogger(__name__)

FIXTURE_DIR = os.path.dirname(os.path.abspath(__file__))
SEED_DIR = os.path.join(FIXTURE_DIR, "seeds")
TWO_PI = 2.0 * math.pi

GAMMA_TOL = 1e-6
PERIOD_TOL = 1e-3
STATE_TOL = 1e-4
ANGLE_TOL = 0.02
MULTIPLIER_RTOL = 0.02


@dataclass
class FixtureRow:
    """One tabulated orbit; fields listed in ``unverified`` are not compared.

    Block entries are named ``<block>.<key>``, e.g. ``planar.lambda``.
    """
    data: Dict[str, Any]
    position: int

    @property
    def gamma(self) -> Optional[float]:
        return self.data.get("gamma")

    @property
    def period(self) -> Optional[float]:
        return self.data.get("T")

    @property
    def note(self) -> str:
        return self.data.get("note", "")

    @property
    def unverified(self) -> List[str]:
        return list(self.data.get("unverified", []))

    @property
    def is_marker(self) -> bool:
        """b-d rows without an orbit"""
        return self.gamma is None

    def verified(self, name: str) -> bool:
        return name not in self.unverified


@dataclass
class TableFixture:
    name: str
    table: int
    family: str
    chart: str
    spatial: bool
    model: str = "jupiter_europa"
    rows: List[FixtureRow] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TableFixture':
        known = {"name", "table", "family", "chart", "spatial", "model", "rows"}
        fixture = cls(
            name=data["name"],
            table=int(data["table"]),
            family=data.get("family", data["name"]),
            chart=data.get("chart", "planar"),
            spatial=bool(data.get("spatial", False)),
            model=data.get("model", "jupiter_europa"),
            rows=[FixtureRow(row, i) for i, row in enumerate(data.get("rows", []))],
            metadata={k: v for k, v in data.items() if k not in known},
        )
        for row in fixture.rows:
            if row.unverified:
                logger.warning(
                    f"Table {fixture.table} ({fixture.family}) row {row.position + 1}: "
                    f"{', '.join(row.unverified)} unverified"
                )
        return fixture

    @property
    def orbit_rows(self) -> List[FixtureRow]:
        return [r for r in self.rows if not r.is_marker and r.verified("x0")]

    @property
    def cover(self) -> int:
        return int(self.metadata.get("cover", 1))

    def state(self, row: FixtureRow) -> NDArray:
        """Initial state on the table's locus"""
        d = row.data
        state = np.zeros(6)
        state[0] = d["x0"]
        state[4] = d["vy0"]
        if self.chart == "L_tilde":
            state[2] = d.get("z0", 0.0)
        elif self.chart == "L":
            state[5] = d.get("vz0", 0.0)
        return state

    def half_period(self, row: FixtureRow) -> Optional[float]:
        """Seed half period, None where the tabulated period is unverified"""
        if row.period is None or not row.verified("T"):
            return None
        return 0.5 * float(row.period)

    def folds(self) -> List[float]:
        """Gamma of tabulated b-d rows that carry an orbit"""
        return [r.gamma for r in self.rows if r.note == "b-d" and r.gamma is not None]


def fixture_names() -> List[str]:
    return sorted(f[:-5] for f in os.listdir(FIXTURE_DIR) if f.endswith(".json"))


def load_fixture(name: str) -> TableFixture:
    """Fixture by name (``dpo``) or table number (``2``, ``table2``)"""
    key = str(name).lower().replace("-", "_")
    if key.startswith("table"):
        key = key[len("table"):]
    if key.isdigit():
        for candidate in fixture_names():
            fixture = _read(candidate)
            if fixture.table == int(key):
                return fixture
        raise ValueError(f"No fixture for table {key}")
    if key not in fixture_names():
        raise ValueError(f"Unknown fixture: {name} (known: {', '.join(fixture_names())})")
    return _read(key)


def _read(name: str) -> TableFixture:
    with open(os.path.join(FIXTURE_DIR, f"{name}.json"), 'r') as f:
        return TableFixture.from_dict(json.load(f))


@dataclass
class OrbitSeed:
    """Unconverged start of a family outside the tabulated model"""
    name: str
    model: str
    chart: str
    state: NDArray
    period: float
    symmetries: Tuple[str, ...] = ("rho",)
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def half_period(self) -> float:
        return 0.5 * self.period

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'OrbitSeed':
        known = {"name", "model", "chart", "x0", "vy0", "z0", "vz0", "T", "symmetries"}
        state = np.zeros(6)
        state[0] = data["x0"]
        state[2] = data.get("z0", 0.0)
        state[4] = data["vy0"]
        state[5] = data.get("vz0", 0.0)
        return cls(
            name=data["name"],
            model=data["model"],
            chart=data.get("chart", "planar"),
            state=state,
            period=float(data["T"]),
            symmetries=tuple(data.get("symmetries", ("rho",))),
            metadata={k: v for k, v in data.items() if k not in known},
        )


def seed_names() -> List[str]:
    return sorted(f[:-5] for f in os.listdir(SEED_DIR) if f.endswith(".json"))


def load_seed(name: str) -> OrbitSeed:
    key = str(name).lower().replace("-", "_")
    if key not in seed_names():
        raise ValueError(f"Unknown seed: {name} (known: {', '.join(seed_names())})")
    with open(os.path.join(SEED_DIR, f"{key}.json"), 'r') as f:
        return OrbitSeed.from_dict(json.load(f))


def _angle_gap(a: float, b: float) -> float:
    gap = abs((a - b) % TWO_PI)
    return min(gap, TWO_PI - gap)


def _sign_pair(signs: List[Dict[str, Any]], block: Optional[str], a: Optional[float]) -> Optional[str]:
    candidates = [s for s in signs if s.get("point") == 0 and s.get("block") == block]
    if a is not None:
        candidates.sort(key=lambda s: abs(s["a"] - a))
    if not candidates:
        return None
    return f"{candidates[0]['c_sign']}/{candidates[0]['b_sign']}"


def _compare_block(
    row: FixtureRow, expected: Dict[str, Any], spectral: Dict[str, Any], name: str, block: Optional[str]
) -> List[str]:
    problems = []
    expected = {k: v for k, v in expected.items() if row.verified(f"{name}.{k}")}
    a = spectral.get("indices", {}).get(name)
    a = a if not isinstance(a, list) else None
    if "phi" in expected:
        phi = spectral.get("angles", {}).get(name)
        if phi is None:
            problems.append(f"{name}: expected elliptic phi={expected['phi']}, found {spectral.get(name) or 'no angle'}")
        elif _angle_gap(phi, expected["phi"]) > ANGLE_TOL:
            problems.append(f"{name}: phi {phi:.3f} != {expected['phi']}")
    elif "lambda" in expected:
        lam = spectral.get("hyperbolic", {}).get(name)
        if lam is None:
            problems.append(f"{name}: expected lambda={expected['lambda']}, found no hyperbolic multiplier")
        elif abs(lam - expected["lambda"]) > MULTIPLIER_RTOL * abs(expected["lambda"]):
            problems.append(f"{name}: lambda {lam:.4g} != {expected['lambda']}")
    if "cb" in expected:
        found = _sign_pair(spectral.get("signs", []), block, a)
        if found != expected["cb"]:
            problems.append(f"{name}: (C/B) ({found}) != ({expected['cb']})")
    return problems


def compare_row(fixture: TableFixture, row: FixtureRow, record: Dict[str, Any]) -> List[str]:
    """Mismatches between a corrected orbit record and a table row"""
    problems = []
    if abs(record["gamma"] - row.gamma) > GAMMA_TOL:
        problems.append(f"Gamma {record['gamma']:.8f} != {row.gamma}")
    if row.period is not None and row.verified("T") and abs(record["period"] - row.period) > PERIOD_TOL:
        problems.append(f"T {record['period']:.5f} != {row.period}")
    if fixture.spatial and row.verified("x0") and abs(record["state0"][0] - row.data["x0"]) > STATE_TOL:
        problems.append(f"x(0) {record['state0'][0]:.8f} != {row.data['x0']}")
    spectral = record.get("spectral")
    if spectral is not None and not fixture.spatial:
        for block in ("planar", "spatial"):
            if block in row.data:
                problems.extend(_compare_block(row, row.data[block], spectral, block, block))
    index = record.get("index")
    expected_cz = row.data.get("cz")
    if index is not None and expected_cz is not None and row.verified("cz"):
        found = [index.get("planar"), index.get("spatial"), index.get("total")] \
            if isinstance(expected_cz, list) else index.get("total")
        if found != expected_cz:
            problems.append(f"CZ {found} != {expected_cz}")
    return problems


__all__ = [
    "FixtureRow",
    "TableFixture",
    "compare_row",
    "fixture_names",
    "load_fixture",
]
