"""Tests for table regressions and experiment recipes"""
from unittest.mock import MagicMock, patch

import numpy as np
import pytest

from sym_orbits.config.models import JUPITER_EUROPA_MU, ModelConfig, RunConfig
from sym_orbits.continuation.detectors import FOLD, PLANAR_TO_SPATIAL
from sym_orbits.dynamics.crtbp import CRTBPModel
from sym_orbits.fixtures import load_fixture
from sym_orbits.reproduce import Experiment, GraphExperiment, TableReproduction, reproduce_table
from sym_orbits.shooting.orbit import PeriodicOrbit


def _record(gamma: float) -> dict:
    return {
        "gamma": gamma,
        "period": 3.0,
        "state0": [1.009, 0.0, 0.0, 0.0, 0.0446, 0.0],
        "planar": True,
        "index": {"planar": 2, "spatial": 3, "total": 5},
    }


class TestTableReproduction:
    def test_summary(self):
        reproduction = TableReproduction(load_fixture("dpo"), records=[_record(3.0037), _record(3.0035)])
        assert reproduction.passed
        summary = reproduction.summary()
        assert summary == {
            "table": 2, "family": "DPO", "rows": 2, "pass": True, "mismatches": {}, "failures": {},
        }

    def test_failures_are_one_based(self):
        reproduction = TableReproduction(load_fixture("dpo"))
        reproduction.mismatches[0] = ["T 1.2 != 1.25362"]
        reproduction.failures[3] = {"error": "NoConvergence"}
        summary = reproduction.summary()
        assert not reproduction.passed
        assert summary["mismatches"] == {"1": ["T 1.2 != 1.25362"]}
        assert summary["failures"] == {"4": {"error": "NoConvergence"}}

    def test_frame_drops_missing_spectra(self):
        reproduction = TableReproduction(load_fixture("dpo"), records=[_record(3.0037)])
        frame = reproduction.frame()
        assert list(frame.columns) == ["gamma", "x0", "vy0", "T", "cz_p", "cz_s", "cz", "note"]
        assert frame["cz"][0] == "5"


class TestExperiment:
    def test_unknown_recipe(self):
        with pytest.raises(ValueError, match="Unknown experiment"):
            Experiment(RunConfig()).run("result4")

    def test_empty_summary(self):
        experiment = GraphExperiment("result1")
        assert experiment.verified
        assert experiment.branch("DPO") is None
        assert experiment.summary() == {
            "experiment": "result1", "branches": {}, "events": [], "edges": [], "dangling": [], "verified": True,
        }

    def test_deformed_start_needs_crtbp(self):
        with pytest.raises(ValueError, match="CRTBP"):
            Experiment(RunConfig(model=ModelConfig(kind="hill"))).deformed_start("hill_g")

    def test_deformed_start_is_recorrected_at_its_row(self):
        experiment = Experiment(RunConfig())
        model = CRTBPModel(JUPITER_EUROPA_MU)
        state = [1.0079727, 0.0, 0.0, 0.0, 0.05073828, 0.0]
        deformed = PeriodicOrbit(model=model, state0=np.array(state), period=1.174, gamma=3.00383366,
                                 metadata={"mu_steps": 9})
        corrected = PeriodicOrbit(model=model, state0=np.array(state), period=1.17402, gamma=3.00383366)
        experiment.engine.corrector = MagicMock()
        experiment.engine.corrector.correct.return_value = corrected
        with patch("sym_orbits.reproduce.MassDeformation") as deformation:
            deformation.return_value.from_seed.return_value = deformed
            orbit, anchor = experiment.deformed_start("hill_g")
        assert orbit is corrected
        seed_args = deformation.return_value.from_seed.call_args[0]
        assert seed_args[4] == 3.00383366
        assert seed_args[5] == JUPITER_EUROPA_MU
        assert experiment.engine.corrector.correct.call_args[0][3].gamma == 3.00383366
        assert orbit.metadata == {"family": "g-LPO1", "seed": "hill_g", "mu_steps": 9}
        assert anchor.total == 6


@pytest.mark.slow
class TestTables:
    @pytest.mark.parametrize("name", ["g_lpo1", "dpo", "lpo2", "dro"])
    def test_planar_table(self, name):
        reproduction = reproduce_table(name)
        assert reproduction.failures == {}
        assert reproduction.mismatches == {}
        assert len(reproduction.records) == len(reproduction.fixture.orbit_rows)

    def test_dpo_past_the_crossing(self):
        reproduction = reproduce_table("dpo")
        index = reproduction.records[8]["index"]
        assert (index["planar"], index["spatial"], index["total"]) == (2, 4, 6)


def _x0_at(branch, gamma: float) -> list:
    """x(0) interpolated on every branch segment whose Gamma range holds gamma"""
    values = []
    for a, b in zip(branch.points, branch.points[1:]):
        if min(a.gamma, b.gamma) <= gamma <= max(a.gamma, b.gamma) and a.gamma != b.gamma:
            w = (gamma - a.gamma) / (b.gamma - a.gamma)
            values.append((1.0 - w) * a.orbit.state0[0] + w * b.orbit.state0[0])
    return values


@pytest.mark.slow
class TestExperiments:
    def test_result1_edge_plus_fold(self):
        experiment = Experiment(RunConfig()).run("result1")
        graph = experiment.graph.graph
        g_edges = [(u, v) for u, v, d in graph.edges(data=True) if d["branch"] == "g-LPO1"]
        assert len(g_edges) == 1
        assert all(graph.nodes[n]["kind"] == "leaf" for n in g_edges[0])
        folds = [n for n, d in graph.nodes(data=True) if d.get("event") and d["kind"] == FOLD]
        assert len(folds) == 1
        fold = graph.nodes[folds[0]]
        assert fold["branch"] == "DPO-LPO2"
        assert fold["gamma"] == pytest.approx(3.0037553, abs=1e-6)
        assert graph.degree(folds[0]) == 2
        report = experiment.events[0].report
        assert (report["chi_before"], report["chi_after"]) == (-1, -1)
        assert experiment.verified

    def test_result2_crossing_is_verified(self):
        experiment = Experiment(RunConfig()).run("result2", desk_scale=True)
        crossings = [e for e in experiment.events if e.kind == PLANAR_TO_SPATIAL]
        assert len(crossings) == 1
        assert crossings[0].parameter == pytest.approx(3.00109, abs=1e-4)
        assert crossings[0].verified
        switched = [b for b in experiment.branches if b.name.startswith("DPO-")]
        assert switched
        for branch in switched:
            assert any(p.index is not None for p in branch.points)

    def test_result3_bridge(self):
        experiment = Experiment(RunConfig()).run("result3")
        bridge = experiment.branch("LPO2^3-x")
        assert bridge is not None
        assert bridge.points[-1].gamma == pytest.approx(3.00054882, abs=1e-4)
        assert {p.index.total for p in bridge.points[1:-1] if p.index is not None} == {15}
        fixture = load_fixture("lpo2_cover3_x")
        matched = 0
        for row in fixture.orbit_rows:
            if any(abs(x - row.data["x0"]) < 5e-4 for x in _x0_at(bridge, row.gamma)):
                matched += 1
        assert matched >= 10
