"""Unit tests for monodromy reduction, configurations and B-/C-signs"""
import math
from dataclasses import replace
from unittest.mock import patch

import numpy as np
import pytest

from sym_orbits.core.errors import DegenerateWithinTolerance, NotSymmetric, SignUndefined, StructureViolation
from sym_orbits.core.symplectic import scaled_symplectic_error, symplectic_error
from sym_orbits.diagram.broucke import GammaLine, region, stability_point
from sym_orbits.flows.propagator import Propagator
from sym_orbits.shooting import Corrector, cover
from sym_orbits.spectral import (
    SignEntry,
    SignRecord,
    WonenburgerBlocks,
    analyze,
    b_sign,
    c_sign,
    classify,
    monodromy,
    multiplier_from_index,
    period_doubling_site,
    stability_index,
    wonenburger_at,
)
from sym_orbits.spectral.classify import (
    combine_tags,
    index_tag,
    indices_from_invariants,
    krein_angle,
    wonenburger_angle,
)
from sym_orbits.spectral.monodromy import check_symplectic, symmetric_monodromy
from sym_orbits.spectral.reduction import ReducedMonodromy
from sym_orbits.spectral.wonenburger import signs_of

R = 0.5
N = R ** -1.5
PERIOD = 2.0 * np.pi / (N - 1.0)


def _oscillator(t: float, omega: float = 1.0) -> np.ndarray:
    """Flow of q' = p, p' = -omega^2 q at time t"""
    c, s = math.cos(omega * t), math.sin(omega * t)
    return np.array([[c, s / omega], [-omega * s, c]])


def _hyperbolic(lam: float) -> np.ndarray:
    return np.diag([lam, 1.0 / lam])


def _direct_sum(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """4x4 matrix in (q1, q2, p1, p2) order from two 2x2 blocks"""
    m = np.zeros((4, 4))
    m[np.ix_([0, 2], [0, 2])] = first
    m[np.ix_([1, 3], [1, 3])] = second
    return m


def _reduced(matrix: np.ndarray) -> ReducedMonodromy:
    return ReducedMonodromy(matrix=matrix, basis=np.eye(6)[:, :matrix.shape[0]])


class TestStabilityIndex:
    def test_real_multiplier(self):
        assert stability_index(2.0) == pytest.approx(1.25)
        assert stability_index(-0.5) == pytest.approx(-1.25)

    def test_unit_circle(self):
        assert stability_index(np.exp(0.7j)) == pytest.approx(math.cos(0.7))
        assert isinstance(stability_index(np.exp(0.7j)), float)

    def test_zero(self):
        with pytest.raises(ValueError):
            stability_index(0)

    def test_inverse(self):
        assert multiplier_from_index(1.25) == pytest.approx(2.0)
        lam = multiplier_from_index(0.5)
        assert abs(lam) == pytest.approx(1.0)
        assert stability_index(lam) == pytest.approx(0.5)

    @pytest.mark.parametrize("a,tag", [
        (1.5, "H+"), (-1.5, "H-"), (0.3, "E"), (1.0 + 1e-10, "degenerate"),
        (-1.0 - 1e-10, "degenerate"), (complex(0.5, 0.2), "N"),
    ])
    def test_index_tag(self, a, tag):
        assert index_tag(a) == tag

    def test_combine_tags(self):
        assert combine_tags("E", "E") == "E2"
        assert combine_tags("H+", "E") == "EH+"
        assert combine_tags("H-", "H+") == "H+-"
        assert combine_tags("H-", "H-") == "H--"
        assert combine_tags("E", "degenerate") == "degenerate"


class TestAngles:
    def test_wonenburger_angle(self):
        assert wonenburger_angle(0.5, -1.0) == pytest.approx(math.pi / 3)
        assert wonenburger_angle(0.5, 1.0) == pytest.approx(2 * math.pi - math.pi / 3)

    @pytest.mark.parametrize("t", [0.4, 2.0, 3.5, 5.9])
    def test_forward_oscillator_angle(self, t):
        matrix = _oscillator(t, omega=1.3)
        assert krein_angle(matrix, 0.5 * np.trace(matrix)) == pytest.approx((1.3 * t) % (2 * math.pi))

    def test_backward_oscillator_angle(self):
        matrix = _oscillator(-0.4)
        assert krein_angle(matrix, 0.5 * np.trace(matrix)) == pytest.approx(2 * math.pi - 0.4)


class TestClassify:
    def test_planar_problem(self):
        config = classify(_reduced(_oscillator(1.1)))
        assert config.config == "E"
        assert config.angles["planar"] == pytest.approx(1.1)
        assert len(config.multipliers) == 2

    def test_planar_hyperbolic(self):
        config = classify(_reduced(_hyperbolic(-3.0)))
        assert config.config == "H-"
        assert config.hyperbolic["planar"] == pytest.approx(-3.0)

    def test_two_elliptic_blocks(self):
        config = classify(_reduced(_direct_sum(_oscillator(0.8), _oscillator(2.5))))
        assert config.config == "E2"
        assert sorted(config.angles.values()) == pytest.approx([0.8, 2.5])

    def test_mixed_blocks(self):
        config = classify(_reduced(_direct_sum(_hyperbolic(2.0), _oscillator(1.0))))
        assert config.config == "EH+"
        assert config.hyperbolic["a2"] == pytest.approx(2.0)

    def test_two_hyperbolic_blocks(self):
        config = classify(_reduced(_direct_sum(_hyperbolic(2.0), _hyperbolic(-4.0))))
        assert config.config == "H+-"

    def test_complex_quartet(self):
        a = 1.2 * np.array([[math.cos(0.7), -math.sin(0.7)], [math.sin(0.7), math.cos(0.7)]])
        matrix = np.block([[a, np.zeros((2, 2))], [np.zeros((2, 2)), np.linalg.inv(a).T]])
        assert symplectic_error(matrix) < 1e-12
        config = classify(_reduced(matrix))
        assert config.config == "N"
        moduli = sorted(abs(m) for m in config.multipliers)
        assert moduli == pytest.approx([1 / 1.2, 1 / 1.2, 1.2, 1.2])

    def test_invariants(self):
        a1, a2 = indices_from_invariants(_direct_sum(_oscillator(0.8), _hyperbolic(3.0)))
        assert sorted([a1, a2]) == pytest.approx([math.cos(0.8), (3.0 + 1 / 3.0) / 2])

    def test_degenerate(self):
        reduced = _reduced(_oscillator(1e-5))
        assert classify(reduced).degenerate
        with pytest.raises(DegenerateWithinTolerance):
            classify(reduced, strict=True)

    def test_to_dict(self):
        data = classify(_reduced(_oscillator(1.1))).to_dict()
        assert data["config"] == "E"
        assert data["indices"]["planar"] == pytest.approx(math.cos(1.1))
        assert len(data["multipliers"]) == 2


class TestWonenburgerBlocks:
    def test_synthesized_relations(self):
        blocks = WonenburgerBlocks.synthesize(np.array([[2.0, 0.3], [0.3, 1.0]]), np.array([[0.4, 0.1], [0.1, -0.2]]))
        assert blocks.max_relation_error() < 1e-12
        assert symplectic_error(blocks.matrix) < 1e-12

    def test_hyperbolic_signs_agree(self):
        # B C = A^2 - 1 > 0
        blocks = WonenburgerBlocks.synthesize(np.array([[-1.0]]), np.array([[-1.5]]))
        assert blocks.A[0, 0] == pytest.approx(1.5)
        assert b_sign(blocks, 1.5) == -1
        assert c_sign(blocks, 1.5) == -1

    def test_elliptic_signs_differ(self):
        blocks = WonenburgerBlocks.synthesize(np.array([[1.0]]), np.array([[0.5]]))
        assert b_sign(blocks, 0.5) == 1
        assert c_sign(blocks, 0.5) == -1

    def test_undefined_signs(self):
        blocks = WonenburgerBlocks.synthesize(np.array([[1.0]]), np.array([[0.5]]))
        with pytest.raises(SignUndefined):
            b_sign(blocks, 1.0)
        with pytest.raises(SignUndefined):
            b_sign(blocks, complex(0.5, 0.3))
        with pytest.raises(SignUndefined):
            c_sign(blocks, 0.7)

    def test_signs_of_each_eigenvalue(self):
        blocks = WonenburgerBlocks.synthesize(np.diag([1.0, -2.0]), np.diag([1.5, 0.25]))
        entries = signs_of(blocks)
        assert sorted(e.a for e in entries) == pytest.approx([-0.5, 1.5])
        by_a = {round(e.a, 6): e for e in entries}
        assert by_a[1.5].pair == "(+/+)"
        assert by_a[-0.5].pair == "(+/-)"

    def test_split_block(self):
        blocks = WonenburgerBlocks.synthesize(np.diag([1.0, -2.0]), np.diag([1.5, 0.25]))
        with pytest.raises(ValueError):
            blocks.block("planar")
        blocks.split = True
        assert blocks.block("spatial").A[0, 0] == pytest.approx(-0.5)


class TestPeriodDoubling:
    def test_site_keeps_b_sign(self):
        before = SignRecord([SignEntry(0, -0.9, 1, -1, "planar"), SignEntry(1, -0.9, -1, 1, "planar")])
        after = SignRecord([SignEntry(0, -1.1, -1, -1, "planar"), SignEntry(1, -1.1, -1, -1, "planar")])
        assert period_doubling_site(before, after) == 1

    def test_no_site(self):
        before = SignRecord([SignEntry(0, -0.9, 1, -1, "planar")])
        after = SignRecord([SignEntry(0, -1.1, -1, -1, "planar")])
        with pytest.raises(SignUndefined):
            period_doubling_site(before, after)


class TestAnalyzeKeplerCircle:
    @pytest.fixture(scope="class")
    def record(self):
        from sym_orbits.dynamics import CRTBPModel
        model = CRTBPModel.rotating_kepler()
        state = np.array([R, 0.0, 0.0, 0.0, R ** -0.5 - R, 0.0])
        orbit = Corrector(model).correct("planar", state, 0.5 * PERIOD)
        return analyze(orbit)

    def test_configuration(self, record):
        # radial and vertical oscillations both have frequency n
        assert record.config.config == "E2"
        assert record.config.indices["planar"] == pytest.approx(math.cos(N * PERIOD), abs=1e-7)
        assert record.config.indices["spatial"] == pytest.approx(math.cos(N * PERIOD), abs=1e-7)

    def test_vertical_angle(self, record):
        # n T = 2 pi + T
        assert record.config.angles["spatial"] == pytest.approx(PERIOD, abs=1e-6)

    def test_quality(self, record):
        assert record.symplectic_error < 1e-8
        assert record.wonenburger_error < 1e-8
        assert len(record.blocks) == 2
        assert record.reduced.coupling < 1e-8

    def test_elliptic_signs(self, record):
        for entry in record.signs.entries:
            assert entry.b_sign == -entry.c_sign
        spatial = record.signs.at(0, "spatial")
        assert spatial and spatial[0].b_sign == 1

    def test_serialized(self, record):
        data = record.to_dict()
        assert data["config"] == "E2"
        assert {s["point"] for s in data["signs"]} == {0, 1}


def _kepler_circle():
    from sym_orbits.dynamics import CRTBPModel
    model = CRTBPModel.rotating_kepler()
    state = np.array([R, 0.0, 0.0, 0.0, R ** -0.5 - R, 0.0])
    return Corrector(model).correct("planar", state, 0.5 * PERIOD)


class TestSymmetricMonodromy:
    @pytest.fixture(scope="class")
    def circle(self):
        return _kepler_circle()

    def test_matches_full_period_flow(self, circle):
        flows = symmetric_monodromy(circle)
        full = Propagator(circle.model).flow_with_stm(circle.state0, circle.period).stm
        np.testing.assert_allclose(flows.at_start, full, atol=1e-8)
        assert flows.symmetry == "rho"

    def test_second_point_is_conjugate(self, circle):
        flows = symmetric_monodromy(circle)
        full = Propagator(circle.model).flow_with_stm(flows.half_state, circle.period).stm
        np.testing.assert_allclose(flows.at(1), full, atol=1e-8)
        assert flows.half_state[0] == pytest.approx(-R, abs=1e-9)

    def test_monodromy_uses_half_period(self, circle):
        propagator = Propagator(circle.model)
        with patch.object(propagator, "flow_with_stm", wraps=propagator.flow_with_stm) as flow:
            monodromy(circle, propagator)
        assert flow.call_args.args[1] == pytest.approx(circle.half_period)

    def test_cover_is_power(self, circle):
        single = symmetric_monodromy(circle)
        tripled = symmetric_monodromy(cover(circle, 3))
        np.testing.assert_allclose(tripled.at_start, np.linalg.matrix_power(single.at_start, 3), atol=1e-10)

    def test_cover_spectrum(self, circle):
        # stability index of the k-th cover is cos(k * arccos(a))
        record = analyze(cover(circle, 3))
        assert record.config.indices["planar"] == pytest.approx(math.cos(3 * N * PERIOD), abs=1e-6)
        assert record.config.indices["spatial"] == pytest.approx(math.cos(3 * N * PERIOD), abs=1e-6)

    def test_start_off_the_locus(self, circle):
        with pytest.raises(NotSymmetric):
            symmetric_monodromy(replace(circle, state0=circle.state0 + np.array([0, 1e-4, 0, 0, 0, 0])))

    def test_check_symplectic(self):
        stretched = np.diag([1e4, 2.0, 1.0, 1e-4, 0.5, 1.0])
        assert check_symplectic(stretched) < 1e-12
        with pytest.raises(StructureViolation) as info:
            check_symplectic(np.diag([2.0, 1.0, 1.0, 1.0, 1.0, 1.0]), "half-period STM")
        assert info.value.to_dict()["what"] == "half-period STM symplecticity"


class TestWonenburgerRelations:
    @pytest.fixture(scope="class")
    def circle(self):
        return _kepler_circle()

    @pytest.mark.parametrize("point", [0, 1])
    def test_relations_at_both_points(self, circle, point):
        blocks = wonenburger_at(circle, point)
        assert blocks.point_index == point
        assert blocks.split
        assert blocks.scaled_relation_error() < 1e-9
        assert symplectic_error(blocks.matrix) < 1e-8

    def test_shared_monodromies(self, circle):
        flows = symmetric_monodromy(circle)
        np.testing.assert_allclose(wonenburger_at(circle, 1, monodromies=flows).A, wonenburger_at(circle, 1).A)

    def test_invalid_point(self, circle):
        with pytest.raises(ValueError):
            wonenburger_at(circle, 2)

    def test_broken_relations_raise(self, circle):
        with patch("sym_orbits.spectral.wonenburger.coordinates", return_value=np.arange(16.0).reshape(4, 4)):
            with pytest.raises(StructureViolation) as info:
                wonenburger_at(circle, 0)
        assert info.value.details["point"] == 0

    def test_elliptic_b_signs_agree_across_points(self, circle):
        record = analyze(circle)
        first, second = record.signs.at(0, "planar"), record.signs.at(1, "planar")
        assert first and second
        assert first[0].b_sign == second[0].b_sign

    @pytest.mark.parametrize("scale", [(2.0, 0.3), (0.05, 7.0)])
    def test_signs_survive_rescaled_basis(self, circle, scale):
        blocks = wonenburger_at(circle, 0)
        # e_i -> c_i e_i, f_i -> f_i / c_i keeps the basis symplectic and adapted
        d = np.diag([scale[0], scale[1], 1.0 / scale[0], 1.0 / scale[1]])
        rescaled = WonenburgerBlocks.from_matrix(np.linalg.inv(d) @ blocks.matrix @ d)
        rescaled.split = True
        before = {(e.block, round(e.a, 8)): (e.b_sign, e.c_sign) for e in signs_of(blocks)}
        after = {(e.block, round(e.a, 8)): (e.b_sign, e.c_sign) for e in signs_of(rescaled)}
        assert before and before == after

    def test_signs_survive_congruence(self):
        rng = np.random.default_rng(7)
        blocks = WonenburgerBlocks.synthesize(np.array([[2.0, 0.3], [0.3, -1.0]]), np.array([[0.9, 0.2], [0.2, 0.4]]))
        for _ in range(20):
            p = np.diag(rng.uniform(0.1, 10.0, 2))
            p_inv = np.linalg.inv(p)
            moved = WonenburgerBlocks(A=p_inv @ blocks.A @ p, B=p_inv @ blocks.B @ p_inv.T, C=p.T @ blocks.C @ p)
            for a in np.linalg.eigvals(blocks.A):
                assert b_sign(moved, a) == b_sign(blocks, a)
                assert c_sign(moved, a) == c_sign(blocks, a)


class TestRegionOracle:
    def test_region_agrees_with_classify(self):
        rng = np.random.default_rng(2024)
        seen = set()
        checked = 0
        for _ in range(1000):
            q, _ = np.linalg.qr(rng.normal(size=(2, 2)))
            b = q @ np.diag(rng.choice([-1.0, 1.0], 2) * rng.uniform(0.5, 2.0, 2)) @ q.T
            s = rng.normal(scale=1.5, size=(2, 2))
            blocks = WonenburgerBlocks.synthesize(b, 0.5 * (s + s.T))
            assert scaled_symplectic_error(blocks.matrix) < 1e-10
            point = stability_point(blocks)
            lines = (GammaLine.eigen_one(), GammaLine.eigen_minus_one())
            if min(abs(line.value(point)) for line in lines) < 1e-3 or abs(point.discriminant) < 1e-3:
                continue
            expected = classify(_reduced(blocks.matrix), blocks).config
            assert region(point) == expected
            seen.add(expected)
            checked += 1
        assert checked > 900
        assert {"E2", "EH+", "EH-", "H++", "H+-", "N"} <= seen


@pytest.mark.slow
class TestSignsOnTabulatedOrbits:
    @pytest.mark.parametrize("name,position,negative", [("g_lpo1", 16, True), ("dpo", 0, False)])
    def test_negative_hyperbolic_iff_b_signs_differ(self, name, position, negative):
        from sym_orbits.dynamics.factory import create_model
        from sym_orbits.fixtures import load_fixture
        from sym_orbits.reproduce import fixture_orbit

        fixture = load_fixture(name)
        orbit = fixture_orbit(fixture, fixture.orbit_rows[position], Corrector(create_model(fixture.model)))
        record = analyze(orbit)
        assert (record.config.planar == "H-") == negative
        first, second = record.signs.at(0, "planar"), record.signs.at(1, "planar")
        assert (first[0].b_sign != second[0].b_sign) == negative
