"""Unit tests for the JSON-lines catalog, table exports and bifurcation graphs"""
import json

import pandas as pd
import pytest

from sym_orbits.catalog.graph import build_graph, export_graphml, to_dot
from sym_orbits.catalog.store import (
    load_branch,
    load_events,
    load_orbits,
    load_records,
    save_branch,
    save_events,
    save_orbits,
    save_records,
)
from sym_orbits.catalog.tables import (
    FOLD_MARKER,
    PLANAR_COLUMNS,
    available_columns,
    export_table,
    format_record,
    table_frame,
)
from sym_orbits.continuation.family import BranchPoint, FamilyBranch
from sym_orbits.core.errors import DanglingEdge, MissingData, ParseError, SchemaVersionMismatch
from sym_orbits.diagram.broucke import StabilityPoint
from sym_orbits.dynamics.crtbp import CRTBPModel
from sym_orbits.index.conley_zehnder import IndexRecord
from sym_orbits.shooting.orbit import PeriodicOrbit

MU = 2.528e-5


def _make_orbit(gamma: float, x0: float = 0.98) -> PeriodicOrbit:
    return PeriodicOrbit(
        model=CRTBPModel(MU),
        state0=[x0, 0.0, 0.0, 0.0, 0.0512345678901, 0.0],
        period=3.14159265358979,
        gamma=gamma,
        symmetries=("rho", "sigma"),
    )


def _make_branch(n: int = 5, name: str = "dro", index: bool = True, termination=None) -> FamilyBranch:
    branch = FamilyBranch(name=name, chart="planar", termination=termination)
    for i in range(n):
        point = BranchPoint(
            orbit=_make_orbit(3.0 + 0.001 * i, 0.98 - 0.001 * i),
            index=IndexRecord.split(3, 1) if index else None,
            stability=StabilityPoint(planar=0.5 + 0.01 * i),
            dgamma_ds=0.01,
            arclength=0.001 * i,
        )
        branch.append(point)
    return branch


def _spectral_record() -> dict:
    return {
        "config": "E2",
        "planar": "E",
        "spatial": "E",
        "angles": {"planar": 1.5, "spatial": 5.894},
        "hyperbolic": {},
        "indices": {"planar": 0.0707, "spatial": 0.9227},
        "signs": [
            {"point": 0, "block": "planar", "a": 0.0707, "b_sign": "+", "c_sign": "-"},
            {"point": 0, "block": "spatial", "a": 0.9227, "b_sign": "+", "c_sign": "-"},
        ],
    }


class TestStore:
    def test_orbits_round_trip(self, tmp_path):
        path = str(tmp_path / "orbits.jsonl")
        orbits = [_make_orbit(3.0), _make_orbit(3.001, 0.97)]
        assert save_orbits(path, orbits) == 2
        loaded = load_orbits(path)
        assert [o.gamma for o in loaded] == [3.0, 3.001]
        assert list(loaded[1].state0) == list(orbits[1].state0)
        assert loaded[0].period == orbits[0].period
        assert loaded[0].symmetries == ("rho", "sigma")
        assert loaded[0].model.mu == MU

    def test_branch_round_trip(self, tmp_path):
        path = str(tmp_path / "dro.jsonl")
        branch = _make_branch(termination="collision")
        branch.steps = [1e-4, 2e-4]
        save_branch(path, branch)
        loaded, records = load_branch(path)
        assert loaded.name == "dro"
        assert loaded.termination == "collision"
        assert loaded.steps == [1e-4, 2e-4]
        assert len(loaded) == 5
        assert loaded.points[2].index.total == 4
        assert loaded.points[2].stability.planar == pytest.approx(0.52)
        assert records[4]["branch"] == "dro"

    def test_header_line(self, tmp_path):
        path = str(tmp_path / "records.jsonl")
        save_records(path, [{"gamma": 3.0}], kind="orbit")
        with open(path) as f:
            header = json.loads(f.readline())
        assert header == {"schema": "sym-orbits", "version": 1, "kind": "orbit"}

    def test_missing_period(self, tmp_path):
        path = str(tmp_path / "bad.jsonl")
        record = _make_orbit(3.0).to_record()
        del record["period"]
        save_records(path, [record])
        with pytest.raises(ParseError) as info:
            load_orbits(path)
        assert info.value.field == "period"
        assert info.value.line == 2

    def test_short_state(self, tmp_path):
        path = str(tmp_path / "bad.jsonl")
        record = _make_orbit(3.0).to_record()
        record["state0"] = [0.98, 0.0]
        save_records(path, [record])
        with pytest.raises(ParseError, match="state0"):
            load_orbits(path)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"schema": "sym-orbits", "version": 1, "kind": "orbit"}\n{not json\n')
        with pytest.raises(ParseError) as info:
            load_records(str(path))
        assert info.value.line == 2

    def test_missing_header(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"gamma": 3.0}\n')
        with pytest.raises(ParseError, match="header"):
            load_records(str(path))

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        with pytest.raises(ParseError):
            load_records(str(path))

    def test_schema_version(self, tmp_path):
        path = tmp_path / "old.jsonl"
        path.write_text('{"schema": "sym-orbits", "version": 0, "kind": "orbit"}\n')
        with pytest.raises(SchemaVersionMismatch):
            load_records(str(path))

    def test_branch_loader_rejects_events(self, tmp_path):
        path = str(tmp_path / "events.jsonl")
        save_events(path, [{"gamma_star": 3.0, "kind": "fold", "branch": "dro"}])
        with pytest.raises(ParseError, match="branch"):
            load_branch(path)
        assert load_events(path)[0]["kind"] == "fold"

    def test_event_without_gamma(self, tmp_path):
        path = str(tmp_path / "events.jsonl")
        save_events(path, [{"kind": "fold"}])
        with pytest.raises(ParseError) as info:
            load_events(path)
        assert info.value.field == "gamma_star"


class TestTables:
    def test_format_record(self):
        record = _make_orbit(3.0).to_record()
        record["spectral"] = _spectral_record()
        record["index"] = {"total": 4, "planar": 3, "spatial": 1}
        row = format_record(record, spatial=False)
        assert row["gamma"] == "3.00000000"
        assert row["vy0"] == "0.05123457"
        assert row["T"] == "3.14159"
        assert row["planar"] == "(-/+) phi=1.500"
        assert row["spatial"] == "(-/+) phi=5.894"
        assert (row["cz_p"], row["cz_s"], row["cz"]) == ("3", "1", "4")

    def test_hyperbolic_and_complex_blocks(self):
        record = _make_orbit(3.0).to_record()
        spectral = _spectral_record()
        spectral["angles"] = {"spatial": 5.894}
        spectral["hyperbolic"] = {"planar": 12.5}
        spectral["indices"]["planar"] = 6.29
        record["spectral"] = spectral
        assert format_record(record, spatial=False)["planar"] == "(-/+) lambda=12.5"
        spectral["indices"]["planar"] = [0.3, 0.2]
        assert format_record(record, spatial=False)["planar"] == "N"

    def test_branch_table_with_fold(self, tmp_path):
        path = str(tmp_path / "dro.csv")
        frame = export_table(_make_branch(3), path, columns=["gamma", "x0", "T", "cz", "note"], folds=[3.0011])
        assert list(frame["note"]) == ["", "", FOLD_MARKER, ""]
        assert frame["gamma"][2] == "3.00110000"
        assert frame["x0"][2] == ""
        assert list(pd.read_csv(path).columns) == ["gamma", "x0", "T", "cz", "note"]

    def test_missing_spectral_data(self):
        with pytest.raises(MissingData) as info:
            table_frame(_make_branch(2), columns=PLANAR_COLUMNS)
        assert info.value.details["column"] == "planar"

    def test_available_columns(self):
        records = _make_branch(2).to_records()
        assert available_columns(records, PLANAR_COLUMNS) == ["gamma", "x0", "vy0", "T", "cz_p", "cz_s", "cz", "note"]
        bare = _make_branch(2, index=False).to_records()
        assert available_columns(bare, ["gamma", "cz"]) == ["gamma"]

    def test_header_only_table(self, tmp_path):
        path = str(tmp_path / "empty.csv")
        frame = export_table([], path, columns=["gamma", "T"], spatial=False)
        assert frame.empty
        with open(path) as f:
            assert f.read().strip() == "gamma,T"


class TestGraph:
    def test_single_branch(self):
        result = build_graph([_make_branch(termination="collision")], [])
        assert len(result.edges()) == 1
        assert sorted(result.vertices) == ["dro:end", "dro:start"]
        assert result.edge_labels() == [("dro", 4)]
        assert [d["end"] for d in result.dangling] == ["start"]

    def test_strict_dangling(self):
        with pytest.raises(DanglingEdge):
            build_graph([_make_branch()], [], strict=True)

    def test_event_splits_branch(self):
        event = {"kind": "eigenvalue-1", "gamma_star": 3.002, "branch": "dro", "verified": True}
        result = build_graph([_make_branch(termination="left domain")], [event])
        assert len(result.edges()) == 2
        assert result.graph.degree("v0") == 2
        assert result.unverified() == []

    def test_branch_switched_from_event(self):
        event = {"kind": "eigenvalue-1", "gamma_star": 3.002, "branch": "dro", "verified": False}
        child = _make_branch(3, name="child", termination="collision")
        child.points[0].orbit.metadata.update({"parent": "dro", "gamma_star": 3.002})
        result = build_graph([_make_branch(termination="collision"), child], [event])
        assert result.graph.degree("v0") == 3
        assert result.unverified() == ["v0"]

    def test_planar_label(self):
        result = build_graph([_make_branch(termination="collision")], [], label="planar")
        assert result.edge_labels() == [("dro", 3)]

    def test_exports(self, tmp_path):
        result = build_graph([_make_branch(termination="collision")], [])
        dot = to_dot(result)
        assert dot.startswith("graph bifurcations {")
        assert 'label="4"' in dot
        path = str(tmp_path / "graph.graphml")
        export_graphml(result, path)
        with open(path) as f:
            assert "gamma_min" in f.read()
