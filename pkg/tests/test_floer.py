"""Unit tests for the signed orbit counts"""
import pytest

from sym_orbits.core.errors import MixedDimension, ParityMismatch
from sym_orbits.floer import CensusEntry, OrbitCensus, check_invariance, chi_planar, chi_spatial
from sym_orbits.floer.census import InvarianceReport
from sym_orbits.spectral.classify import EigenConfig


def _census(side: str, *tags, **kwargs) -> OrbitCensus:
    return OrbitCensus(side, [CensusEntry(tag, **kwargs) for tag in tags])


class TestPlanarCount:
    def test_period_doubling_of_lyapunov_family(self):
        # one elliptic orbit before, an H+ orbit and two elliptic orbits after
        before = OrbitCensus("before", [CensusEntry("E", cz=3, label="g-LPO1")])
        after = OrbitCensus("after", [
            CensusEntry("H+", cz=2, label="DPO"),
            CensusEntry("E", cz=3, label="LPO2"),
            CensusEntry("E", cz=1, label="g-LPO1"),
        ])
        assert chi_planar(before) == -1
        assert chi_planar(after) == -1
        assert check_invariance(3.0039, before, after).passed

    def test_bad_orbits_skipped(self):
        census = OrbitCensus("after", [CensusEntry("H-", cover=2, good=False), CensusEntry("H+")])
        assert chi_planar(census) == 1

    def test_parity_mismatch(self):
        with pytest.raises(ParityMismatch):
            chi_planar(OrbitCensus("before", [CensusEntry("E", cz=2)]))

    def test_spatial_tag_rejected(self):
        with pytest.raises(MixedDimension):
            chi_planar(_census("before", "E", "E2"))


class TestSpatialCount:
    @pytest.mark.parametrize("tags,chi", [
        (("E2",), 1),
        (("EH+", "H+-"), -2),
        ((), 0),
        (("H--", "EH-", "N", "H++"), 4),
    ])
    def test_counts(self, tags, chi):
        assert chi_spatial(_census("before", *tags)) == chi

    def test_planar_tag_rejected(self):
        with pytest.raises(MixedDimension):
            chi_spatial(_census("before", "H+"))


class TestInvariance:
    def test_pitchfork_in_spatial_problem(self):
        report = check_invariance(3.00105, _census("before", "E2"), _census("after", "EH+", "E2", "E2"))
        assert report.passed
        assert report.chi_before == report.chi_after == 1
        assert report.suspect_side is None

    def test_missed_orbit(self):
        report = check_invariance(3.00105, _census("before", "E2", "E2", "EH+"), _census("after", "EH+"))
        assert not report.passed
        assert report.suspect_side == "after"
        data = report.to_dict()
        assert data["pass"] is False
        assert data["chi_before"] == 1 and data["chi_after"] == -1

    def test_event_parameter(self):
        class Event:
            parameter = 3.0036

        report = check_invariance(Event(), _census("before"), _census("after"))
        assert report.gamma_star == 3.0036
        assert report.passed

    def test_round_trip(self):
        before = OrbitCensus("before", [CensusEntry("E2", cover=3, cz=4, label="LPO2^3")])
        restored = OrbitCensus.from_dict(before.to_dict())
        assert restored == before
        assert isinstance(check_invariance(None, restored, restored), InvarianceReport)


class TestCensusEntry:
    def test_even_cover_of_negative_hyperbolic(self):
        config = EigenConfig(config="EH-", planar="H-", spatial="E")
        planar = CensusEntry.from_config(config, cover=2, planar_problem=True)
        assert (planar.tag, planar.good) == ("H-", False)
        spatial = CensusEntry.from_config(config, cover=2)
        assert (spatial.tag, spatial.good) == ("EH-", False)
        assert CensusEntry.from_config(config, cover=3).good
