"""Unit tests for the catalog writer and run provenance"""
import json
import os
from concurrent.futures import ThreadPoolExecutor

import pytest
import yaml

from sym_orbits.catalog.store import load_branch, load_events
from sym_orbits.catalog.writer import CatalogWriter, file_digest, package_versions, write_metrics, write_provenance
from sym_orbits.config.models import RunConfig
from sym_orbits.continuation.family import BranchPoint, FamilyBranch
from sym_orbits.dynamics.crtbp import CRTBPModel
from sym_orbits.metrics.collector import MetricsCollector
from sym_orbits.shooting.orbit import PeriodicOrbit


def _make_branch(name: str) -> FamilyBranch:
    orbit = PeriodicOrbit(model=CRTBPModel(2.528e-5), state0=[0.98, 0, 0, 0, 0.05, 0], period=3.0, gamma=3.0)
    return FamilyBranch(name=name, chart="planar", points=[BranchPoint(orbit=orbit)])


class TestCatalogWriter:
    def test_path_for(self, tmp_path):
        writer = CatalogWriter(str(tmp_path))
        assert writer.path_for("branch", "dro") == os.path.join(str(tmp_path), "dro.jsonl")
        assert writer.path_for("branch", "dro.jsonl") == os.path.join(str(tmp_path), "dro.jsonl")
        assert writer.path_for("table", "dro") == os.path.join(str(tmp_path), "dro.csv")
        assert writer.path_for("text", "graph.dot") == os.path.join(str(tmp_path), "graph.dot")
        with pytest.raises(ValueError):
            writer.path_for("parquet", "dro")

    def test_submit_requires_start(self, tmp_path):
        with pytest.raises(RuntimeError):
            CatalogWriter(str(tmp_path)).submit("text", "a.txt", "x")

    def test_writes_every_kind(self, tmp_path):
        with CatalogWriter(str(tmp_path / "out")) as writer:
            writer.submit("branch", "dro", _make_branch("dro"))
            writer.submit("events", "dro.events", [{"gamma_star": 3.0, "kind": "fold", "branch": "dro"}])
            writer.submit("table", "dro", [{"gamma": "3.00000000", "T": "3.00000"}])
            writer.submit("json", "summary", {"passed": True})
            writer.submit("text", "graph.dot", "graph g {}\n")
        out = tmp_path / "out"
        assert len(writer.written) == 5
        assert writer.failed == []
        assert load_branch(str(out / "dro.jsonl"))[0].name == "dro"
        assert load_events(str(out / "dro.events.jsonl"))[0]["kind"] == "fold"
        assert (out / "dro.csv").read_text().splitlines()[0] == "gamma,T"
        assert json.loads((out / "summary.json").read_text()) == {"passed": True}
        assert (out / "graph.dot").read_text() == "graph g {}\n"

    def test_parallel_submitters(self, tmp_path):
        with CatalogWriter(str(tmp_path)) as writer:
            with ThreadPoolExecutor(max_workers=4) as pool:
                list(pool.map(lambda i: writer.submit("branch", f"b{i}", _make_branch(f"b{i}")), range(20)))
        assert sorted(os.listdir(tmp_path)) == sorted(f"b{i}.jsonl" for i in range(20))

    def test_write_failure_is_recorded(self, tmp_path):
        metrics = MetricsCollector()
        with CatalogWriter(str(tmp_path), metrics=metrics) as writer:
            writer.submit("branch", "broken", object())
            writer.submit("text", "ok.txt", "fine")
        assert [f["path"] for f in writer.failed] == [os.path.join(str(tmp_path), "broken.jsonl")]
        assert writer.written == [os.path.join(str(tmp_path), "ok.txt")]
        assert metrics.get_metrics()["work"]["catalog"]["failure_count"] == 1

    def test_close_without_start(self, tmp_path):
        CatalogWriter(str(tmp_path)).close()


class TestProvenance:
    def test_write_provenance(self, tmp_path):
        inputs = tmp_path / "inputs"
        inputs.mkdir()
        (inputs / "seed.jsonl").write_text("seed\n")
        out = str(tmp_path / "out")
        config = RunConfig(output_dir=out)
        provenance = write_provenance(out, config, [str(inputs), str(tmp_path / "missing")], ["sym-orbits", "table", "2"])
        assert provenance["command"] == ["sym-orbits", "table", "2"]
        assert list(provenance["inputs"]) == [str(inputs / "seed.jsonl")]
        assert provenance["inputs"][str(inputs / "seed.jsonl")] == file_digest(str(inputs / "seed.jsonl"))
        with open(os.path.join(out, "config.yaml")) as f:
            assert yaml.safe_load(f)["model"]["kind"] == "crtbp"
        with open(os.path.join(out, "provenance.json")) as f:
            assert json.load(f)["versions"]["sym-orbits"] == "0.1.0"

    def test_package_versions(self):
        versions = package_versions()
        assert {"sym-orbits", "python", "numpy", "scipy", "pandas", "networkx", "PyYAML"} <= set(versions)

    def test_file_digest(self, tmp_path):
        path = tmp_path / "empty"
        path.write_bytes(b"")
        assert file_digest(str(path)) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"

    def test_write_metrics(self, tmp_path):
        metrics = MetricsCollector()
        metrics.record_correction("dro", 4)
        path = write_metrics(str(tmp_path), metrics)
        with open(path) as f:
            assert json.load(f)["work"]["dro"]["newton_iterations"] == 4
