"""Unit tests for Conley-Zehnder indices, covers and index propagation"""
import math

import numpy as np
import pytest

from sym_orbits.core.errors import AmbiguousJump, DegenerateCover, ParityMismatch
from sym_orbits.index.conley_zehnder import (
    IndexRecord,
    block_index,
    cz_elliptic,
    cz_hyperbolic,
    is_good,
    winding_of,
)
from sym_orbits.index.propagation import component_jump, first_regular, propagate_index, step, total_jump
from sym_orbits.index.rotation import polar_angle, track_rotation
from sym_orbits.spectral.classify import DEGENERATE, EigenConfig

TWO_PI = 2.0 * math.pi


def _planar(planar: str, planar_angle=None, spatial: str = "E", spatial_angle=1.0) -> EigenConfig:
    angles = {}
    if planar_angle is not None:
        angles["planar"] = planar_angle
    if spatial_angle is not None and spatial == "E":
        angles["spatial"] = spatial_angle
    tags = {"E": "E", "H+": "H+", "H-": "H-"}
    combined = {("E", "E"): "E2", ("H+", "E"): "EH+", ("H-", "E"): "EH-"}.get((tags[planar], spatial), "H++")
    return EigenConfig(config=combined, planar=planar, spatial=spatial, angles=angles)


def _spatial(a1: float, a2: float, angles: dict, config: str) -> EigenConfig:
    return EigenConfig(config=config, indices={"a1": a1, "a2": a2}, angles=angles)


class TestClosedForms:
    def test_elliptic(self):
        assert cz_elliptic(0.5) == 1
        assert cz_elliptic(TWO_PI + 1.101) == 3
        assert cz_elliptic(TWO_PI + 1.101, 3) == 7

    def test_elliptic_degenerate_cover(self):
        with pytest.raises(DegenerateCover):
            cz_elliptic(math.pi, 2)

    @pytest.mark.parametrize("args", [(-0.1, 1), (0.5, 0)])
    def test_elliptic_arguments(self, args):
        with pytest.raises(ValueError):
            cz_elliptic(*args)

    def test_hyperbolic(self):
        assert cz_hyperbolic(2, 3, "H+") == 6
        assert cz_hyperbolic(1, 2, "H-") == 2
        with pytest.raises(ParityMismatch):
            cz_hyperbolic(1, 1, "H+")
        with pytest.raises(ParityMismatch):
            cz_hyperbolic(2, 1, "H-")
        with pytest.raises(ValueError):
            cz_hyperbolic(-1)

    def test_winding_round_trip(self):
        assert winding_of("E", 3) == 1
        assert block_index("E", 1.101, winding_of("E", 3)) == 3
        assert winding_of("H-", 3) == 3
        with pytest.raises(ParityMismatch):
            winding_of("E", 2)
        with pytest.raises(ValueError):
            block_index("N", None, 0)


class TestGoodBad:
    def test_planar_problem(self):
        negative = _planar("H-")
        assert not is_good(negative, 2, planar_problem=True)
        assert is_good(negative, 3, planar_problem=True)
        assert is_good(_planar("H+"), 2, planar_problem=True)

    @pytest.mark.parametrize("config,good", [
        ("EH-", False), ("H+-", False), ("E2", True), ("H--", True), ("H++", True), ("EH+", True),
    ])
    def test_spatial_problem(self, config, good):
        assert is_good(EigenConfig(config=config), 4) is good
        assert is_good(EigenConfig(config=config), 1)

    def test_underlying_orbit_decides(self):
        cover = EigenConfig(config="H++")
        assert not is_good(cover, 2, underlying=EigenConfig(config="H+-"))


class TestIndexRecord:
    def test_split(self):
        record = IndexRecord.split(2, 3)
        assert record.total == 5
        assert record.parity == -1
        with pytest.raises(ValueError):
            IndexRecord(total=4, planar=2, spatial=3)

    def test_shifted(self):
        assert IndexRecord.split(3, 1).shifted(planar=-1).to_dict() == {"planar": 2, "spatial": 1, "total": 3, "good": True}
        assert IndexRecord(total=5).shifted(total=2).total == 7

    def test_cover_of_lyapunov_orbit(self):
        config = EigenConfig(config="E2", planar="E", spatial="E", angles={"planar": 1.101, "spatial": 0.3})
        tripled = IndexRecord.split(3, 1).for_cover(3, config)
        assert tripled.planar == 7
        assert tripled.spatial == 1
        assert tripled.cover == 3
        assert tripled.good

    def test_even_cover_of_negative_hyperbolic(self):
        config = EigenConfig(config="EH-", planar="H-", spatial="E", angles={"spatial": 0.3})
        doubled = IndexRecord.split(1, 1).for_cover(2, config)
        assert doubled.planar == 2
        assert not doubled.good

    def test_cover_needs_split(self):
        with pytest.raises(ValueError):
            IndexRecord(total=3).for_cover(2, EigenConfig(config="E2"))

    def test_check_parity(self):
        config = EigenConfig(config="EH+", planar="H+", spatial="E")
        IndexRecord.split(2, 3).check_parity(config)
        with pytest.raises(ParityMismatch):
            IndexRecord.split(3, 3).check_parity(config)


class TestJumps:
    @pytest.mark.parametrize("before,after,jump", [
        (("E", 6.1), ("E", 0.2), 2),
        (("E", 0.2), ("E", 6.1), -2),
        (("E", 1.0), ("E", 1.2), 0),
        (("E", 0.1), ("H+", None), -1),
        (("E", 6.2), ("H+", None), 1),
        (("H+", None), ("E", 0.1), 1),
        (("H+", None), ("E", 6.2), -1),
        (("E", 3.1), ("H-", None), 0),
        (("H-", None), ("H-", None), 0),
    ])
    def test_component_jump(self, before, after, jump):
        assert component_jump(before, after) == jump

    def test_no_rule(self):
        with pytest.raises(AmbiguousJump):
            component_jump(("H+", None), ("H-", None))

    def test_step_planar(self):
        record = step(IndexRecord.split(3, 1), _planar("E", 6.2), _planar("E", 0.1))
        assert (record.planar, record.spatial, record.total) == (5, 1, 6)

    def test_total_jump_matches_closest_pair(self):
        before = _spatial(-0.8, 0.99, {"a1": 2.5, "a2": 6.2}, "E2")
        after = _spatial(-0.8, 1.01, {"a1": 2.5}, "EH+")
        assert total_jump(before, after) == 1

    def test_complex_quartet(self):
        quartet = EigenConfig(config="N", indices={"a1": complex(0.5, 0.1), "a2": complex(0.5, -0.1)})
        assert total_jump(_spatial(0.4, 0.6, {"a1": 1.2, "a2": 0.9}, "E2"), quartet) == 0
        with pytest.raises(AmbiguousJump):
            total_jump(quartet, _spatial(0.4, 1.6, {"a1": 1.2}, "EH+"))


class TestPropagation:
    def test_degenerate_points_skipped(self):
        configs = [
            _planar("E", 6.0),
            _planar("E", 6.2),
            EigenConfig(config=DEGENERATE),
            _planar("E", 0.1),
            _planar("H+"),
        ]
        records = propagate_index(configs, IndexRecord.split(3, 1))
        assert [r.planar if r else None for r in records] == [3, 3, None, 5, 4]

    def test_anchor_in_the_middle(self):
        configs = [_planar("E", 0.1), _planar("E", 6.2), _planar("E", 6.1)]
        records = propagate_index(configs, IndexRecord.split(3, 1), anchor_position=1)
        assert [r.planar for r in records] == [5, 3, 3]

    def test_degenerate_anchor(self):
        with pytest.raises(AmbiguousJump):
            propagate_index([EigenConfig(config=DEGENERATE)], IndexRecord(total=1))

    def test_anchor_slides_past_degenerate_seed(self):
        configs = [
            EigenConfig(config=DEGENERATE),
            EigenConfig(config=DEGENERATE),
            _spatial(0.3, 1.2, {"a1": 5.9}, "EH+"),
            _spatial(0.5, 1.4, {"a1": 5.7}, "EH+"),
        ]
        records = propagate_index(configs, IndexRecord(total=15))
        assert records[:2] == [None, None]
        assert [r.total for r in records[2:]] == [15, 15]
        assert first_regular(configs) == 2

    def test_first_regular_looks_back_last(self):
        configs = [_planar("E", 1.0), EigenConfig(config=DEGENERATE)]
        assert first_regular(configs, 1) == 0

    def test_empty(self):
        assert propagate_index([], IndexRecord(total=1)) == []


class TestRotation:
    def test_polar_angle_of_forward_flow(self):
        c, s = math.cos(0.3), math.sin(0.3)
        assert polar_angle(np.array([[c, s], [-s, c]])) == pytest.approx(0.3)

    def test_vertical_rotation_of_kepler_circle(self, kepler):
        from sym_orbits.shooting import Corrector
        r = 0.5
        period = TWO_PI / (r ** -1.5 - 1.0)
        orbit = Corrector(kepler).correct("planar", np.array([r, 0.0, 0.0, 0.0, r ** -0.5 - r, 0.0]), 0.5 * period)
        rotation = track_rotation(orbit, "spatial")
        # vertical frequency n turns n T = 2 pi + T
        assert rotation.winding == 1
        assert rotation.max_increment < 0.5 * math.pi
        assert block_index("E", period, rotation.winding) == 3

    def test_rotation_needs_planar_orbit(self, kepler):
        from sym_orbits.shooting.orbit import PeriodicOrbit
        orbit = PeriodicOrbit(kepler, np.array([0.5, 0, 0.01, 0, 0.9, 0]), 3.0, 3.4, planar=False)
        with pytest.raises(ValueError):
            track_rotation(orbit)
