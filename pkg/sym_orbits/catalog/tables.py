"""Appendix-style table exports of branch data"""
import logging
import math
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import pandas as pd

from sym_orbits.continuation.family import FamilyBranch
from sym_orbits.core.errors import MissingData

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
FOLD_MARKER = "b-d"

PLANAR_COLUMNS = ["gamma", "x0", "vy0", "T", "planar", "spatial", "cz_p", "cz_s", "cz", "note"]
SPATIAL_COLUMNS = ["gamma", "x0", "z0", "vy0", "vz0", "T", "multipliers", "cz", "note"]

# columns and the record fields they need
_REQUIRES = {
    "planar": "spectral",
    "spatial": "spectral",
    "multipliers": "spectral",
    "cz_p": "index",
    "cz_s": "index",
    "cz": "index",
}


def _fixed(value: Optional[float], digits: int) -> str:
    return "" if value is None else f"{value:.{digits}f}"


def _pair(signs: List[Dict[str, Any]], block: Optional[str], a: Optional[float] = None) -> str:
    """(C/B) at the first symmetric point"""
    candidates = [s for s in signs if s.get("point") == 0 and s.get("block") == block]
    if a is not None and candidates:
        candidates.sort(key=lambda s: abs(s["a"] - a))
    if not candidates:
        return ""
    return f"({candidates[0]['c_sign']}/{candidates[0]['b_sign']}) "


def _summary(spectral: Dict[str, Any], name: str, block: Optional[str]) -> str:
    """Sign pair plus the Floquet angle or hyperbolic multiplier of one block"""
    a = spectral.get("indices", {}).get(name)
    if isinstance(a, list):
        return "N"
    pair = _pair(spectral.get("signs", []), block, a)
    if name in spectral.get("angles", {}):
        return f"{pair}phi={spectral['angles'][name] % TWO_PI:.3f}"
    if name in spectral.get("hyperbolic", {}):
        return f"{pair}lambda={spectral['hyperbolic'][name]:.3g}"
    return f"{pair}degenerate"


def format_record(record: Dict[str, Any], spatial: bool) -> Dict[str, str]:
    """One table row, appendix formatting"""
    state = record["state0"]
    row = {
        "gamma": _fixed(record["gamma"], 8),
        "x0": _fixed(state[0], 8),
        "vy0": _fixed(state[4], 8),
        "T": _fixed(record["period"], 5),
        "note": "",
    }
    if spatial:
        row["z0"] = _fixed(state[2], 8)
        row["vz0"] = _fixed(state[5], 8)
    spectral = record.get("spectral")
    if spectral is not None:
        if spatial:
            parts = [_summary(spectral, name, None) for name in ("a1", "a2") if name in spectral.get("indices", {})]
            row["multipliers"] = "N" if spectral.get("config") == "N" else "; ".join(parts)
        else:
            row["planar"] = _summary(spectral, "planar", "planar")
            row["spatial"] = _summary(spectral, "spatial", "spatial")
    index = record.get("index")
    if index is not None:
        row["cz_p"] = "" if index.get("planar") is None else str(index["planar"])
        row["cz_s"] = "" if index.get("spatial") is None else str(index["spatial"])
        row["cz"] = str(index["total"])
    return row


def _check(records: Sequence[Dict[str, Any]], columns: Sequence[str]) -> None:
    for column in columns:
        needed = _REQUIRES.get(column)
        if needed is None:
            continue
        for i, record in enumerate(records):
            if record.get(needed) is None:
                raise MissingData(
                    f"column {column} needs {needed} data, missing at point {i} (Gamma={record.get('gamma')})",
                    column=column, point=i,
                )


def available_columns(records: Sequence[Dict[str, Any]], columns: Sequence[str]) -> List[str]:
    """Columns whose spectral or index data is present in every record"""
    keep = []
    for column in columns:
        needed = _REQUIRES.get(column)
        if needed is None or all(r.get(needed) is not None for r in records):
            keep.append(column)
        else:
            logger.warning(f"Dropping column {column}: {needed} data missing")
    return keep


def table_frame(
    source: Union[FamilyBranch, Sequence[Dict[str, Any]]],
    columns: Optional[Sequence[str]] = None,
    folds: Iterable[float] = (),
    spatial: Optional[bool] = None,
) -> pd.DataFrame:
    """Rows for a branch or its stored records; folds become b-d marker rows"""
    records = source.to_records() if isinstance(source, FamilyBranch) else list(source)
    if spatial is None:
        spatial = any(not r.get("planar", True) for r in records)
    columns = list(columns or (SPATIAL_COLUMNS if spatial else PLANAR_COLUMNS))
    _check(records, columns)

    rows = [format_record(r, spatial) for r in records]
    keys = [float(r["gamma"]) for r in records]
    for gamma in folds:
        # marker row placed after the nearest tabulated orbit
        position = min(range(len(keys)), key=lambda i: abs(keys[i] - gamma)) + 1 if keys else 0
        rows.insert(position, {"gamma": _fixed(gamma, 8), "note": FOLD_MARKER})
        keys.insert(position, gamma)
    frame = pd.DataFrame(rows, columns=columns).fillna("")
    return frame


def export_table(
    source: Union[FamilyBranch, Sequence[Dict[str, Any]]],
    path: Optional[str] = None,
    columns: Optional[Sequence[str]] = None,
    folds: Iterable[float] = (),
    spatial: Optional[bool] = None,
) -> pd.DataFrame:
    """Write the table as CSV (when a path is given) and return it"""
    frame = table_frame(source, columns, folds, spatial)
    if path is not None:
        frame.to_csv(path, index=False)
        logger.info(f"Wrote {len(frame)} table row(s) to {path}")
    return frame

