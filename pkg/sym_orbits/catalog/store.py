"""JSON-lines persistence of orbits, branches and events"""
import json
import logging
import os
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np

from sym_orbits.continuation.family import BranchPoint, FamilyBranch
from sym_orbits.core.errors import ParseError, SchemaVersionMismatch
from sym_orbits.diagram.broucke import StabilityPoint
from sym_orbits.dynamics.factory import create_model
from sym_orbits.index.conley_zehnder import IndexRecord
from sym_orbits.shooting.orbit import PeriodicOrbit

logger = logging.getLogger(__name__)

SCHEMA = "sym-orbits"
SCHEMA_VERSION = 1
ORBIT_FIELDS = ("model", "gamma", "state0", "period")


def _header(kind: str, **extra: Any) -> Dict[str, Any]:
    return {"schema": SCHEMA, "version": SCHEMA_VERSION, "kind": kind, **extra}


def _encode(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


def dumps(record: Dict[str, Any]) -> str:
    """One record as a JSON line; floats keep their shortest round-trip repr"""
    return json.dumps(record, default=_encode, allow_nan=True)


def save_records(path: str, records: Iterable[Dict[str, Any]], kind: str = "orbit", **header: Any) -> int:
    """Write a header line and one record per line; returns the record count"""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    count = 0
    with open(path, 'w') as f:
        f.write(dumps(_header(kind, **header)) + "\n")
        for record in records:
            f.write(dumps(record) + "\n")
            count += 1
    logger.debug(f"Wrote {count} {kind} record(s) to {path}")
    return count


def load_records(path: str) -> Tuple[Dict[str, Any], List[Dict[str, Any]]]:
    """Header and records of a JSON-lines file"""
    header: Optional[Dict[str, Any]] = None
    records = []
    with open(path, 'r') as f:
        for number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(number, "json", f"line {number}: {e.msg}") from e
            if header is None:
                header = _check_header(data, number)
                continue
            records.append(data)
    if header is None:
        raise ParseError(1, "schema", "empty file")
    return header, records


def _check_header(data: Dict[str, Any], line: int) -> Dict[str, Any]:
    if not isinstance(data, dict) or data.get("schema") != SCHEMA:
        raise ParseError(line, "schema", "missing sym-orbits header")
    if data.get("version") != SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"file schema version {data.get('version')} != {SCHEMA_VERSION}",
            found=data.get("version"), expected=SCHEMA_VERSION,
        )
    return data


def orbit_from_record(record: Dict[str, Any], line: int = 0) -> PeriodicOrbit:
    """PeriodicOrbit from a stored record; ParseError names the first bad field"""
    for name in ORBIT_FIELDS:
        if name not in record:
            raise ParseError(line, name)
    try:
        model = create_model(record["model"])
    except (ValueError, TypeError) as e:
        raise ParseError(line, "model", str(e)) from e
    state0 = record["state0"]
    if not isinstance(state0, list) or len(state0) != 6:
        raise ParseError(line, "state0", "state0 must hold 6 numbers")
    return PeriodicOrbit(
        model=model,
        state0=np.array(state0, dtype=float),
        period=float(record["period"]),
        gamma=float(record["gamma"]),
        symmetries=tuple(record.get("symmetries", ("rho",))),
        cover=int(record.get("cover", 1)),
        planar=bool(record.get("planar", True)),
        chart=record.get("chart", "planar"),
        residual=float(record.get("residual", 0.0)),
    )


def save_orbits(path: str, orbits: Iterable[PeriodicOrbit]) -> int:
    return save_records(path, (o.to_record() for o in orbits), kind="orbit")


def load_orbits(path: str) -> List[PeriodicOrbit]:
    _, records = load_records(path)
    return [orbit_from_record(r, line=i + 2) for i, r in enumerate(records)]


def save_branch(path: str, branch: FamilyBranch) -> int:
    """Branch points in continuation order, branch metadata in the header"""
    return save_records(
        path,
        branch.to_records(),
        kind="branch",
        name=branch.name,
        chart=branch.chart,
        parameter=branch.parameter,
        cover=branch.cover,
        mirrored=branch.mirrored,
        termination=branch.termination,
        steps=branch.steps,
        metadata=branch.metadata,
    )


def _index_from(data: Optional[Dict[str, Any]]) -> Optional[IndexRecord]:
    if not data:
        return None
    return IndexRecord(
        total=data["total"], planar=data.get("planar"), spatial=data.get("spatial"), good=data.get("good", True)
    )


def _stability_from(data: Optional[Dict[str, Any]]) -> Optional[StabilityPoint]:
    if not data:
        return None
    spatial = data.get("spatial")
    return StabilityPoint(planar=data.get("planar"), spatial=tuple(spatial) if spatial is not None else None)


def load_branch(path: str) -> Tuple[FamilyBranch, List[Dict[str, Any]]]:
    """Branch (orbits, indices, stability points) plus the raw records for table export"""
    header, records = load_records(path)
    if header.get("kind") != "branch":
        raise ParseError(1, "kind", f"expected a branch file, found {header.get('kind')!r}")
    branch = FamilyBranch(
        name=header.get("name", os.path.basename(path)),
        chart=header.get("chart", "planar"),
        parameter=header.get("parameter", "gamma"),
        cover=int(header.get("cover", 1)),
        mirrored=bool(header.get("mirrored", False)),
        steps=list(header.get("steps", [])),
        termination=header.get("termination"),
        metadata=dict(header.get("metadata") or {}),
    )
    for i, record in enumerate(records):
        line = i + 2
        try:
            point = BranchPoint(
                orbit=orbit_from_record(record, line),
                index=_index_from(record.get("index")),
                stability=_stability_from(record.get("stability")),
                dgamma_ds=record.get("dgamma_ds"),
                arclength=float(record.get("arclength", 0.0)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(line, str(e).strip("'"), f"invalid branch record: {e}") from e
        branch.append(point)
    logger.info(f"Loaded branch {branch.name} with {len(branch)} point(s) from {path}")
    return branch, records


def save_events(path: str, events: Iterable[Any], **header: Any) -> int:
    """Events as JSON lines; accepts BifurcationEvent objects or plain dicts"""
    return save_records(path, (e if isinstance(e, dict) else e.to_dict() for e in events), kind="events", **header)


def load_events(path: str) -> List[Dict[str, Any]]:
    header, records = load_records(path)
    if header.get("kind") != "events":
        raise ParseError(1, "kind", f"expected an events file, found {header.get('kind')!r}")
    for i, record in enumerate(records):
        if "gamma_star" not in record:
            raise ParseError(i + 2, "gamma_star")
    return records
