"""Unit tests for the rotating-frame models"""
import numpy as np
import pytest

from sym_orbits.config.models import JUPITER_EUROPA_MU, ModelConfig
from sym_orbits.core.errors import CollisionProximity, SymmetryNotApplicable
from sym_orbits.dynamics import (
    CRTBPModel,
    HillModel,
    SYMMETRIES,
    apply_symmetry,
    create_model,
    libration_points,
)
from sym_orbits.dynamics.symmetry import get_symmetry


def _circle(r: float) -> np.ndarray:
    """Prograde Kepler circle of radius r seen from the rotating frame"""
    return np.array([r, 0.0, 0.0, 0.0, r ** -0.5 - r, 0.0])


class TestFactory:
    def test_preset_names(self):
        model = create_model("jupiter_europa")
        assert isinstance(model, CRTBPModel)
        assert model.mu == JUPITER_EUROPA_MU
        assert isinstance(create_model("hill"), HillModel)

    def test_dict_and_config(self):
        assert create_model({"kind": "crtbp", "mu": 0.01}).mu == 0.01
        assert create_model(ModelConfig(kind="hill")).to_dict() == {"kind": "hill"}

    def test_zero_mass_ratio_is_rotating_kepler(self):
        model = create_model({"kind": "crtbp", "mu": 0.0})
        assert model.mu == 0.0
        assert len(model.centers()) == 1

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="Unknown model type"):
            create_model(ModelConfig(kind="bicircular"))

    @pytest.mark.parametrize("mu", [-0.1, 0.5, 0.7])
    def test_mass_ratio_range(self, mu):
        with pytest.raises(ValueError):
            CRTBPModel(mu)


class TestCRTBPModel:
    def test_kepler_circle_energy(self, kepler):
        # Gamma = 1/r + 2 sqrt(r)
        for r in (0.5, 0.8, 1.4):
            assert kepler.jacobi_gamma(_circle(r)) == pytest.approx(1.0 / r + 2.0 * np.sqrt(r), rel=1e-12)
        assert kepler.jacobi_gamma(_circle(0.5)) == pytest.approx(2.0 + np.sqrt(2.0), rel=1e-12)

    def test_gamma_is_minus_twice_hamiltonian(self):
        model = CRTBPModel(JUPITER_EUROPA_MU)
        state = np.array([0.97, 0.01, 0.002, 0.003, 0.04, -0.001])
        assert model.jacobi_gamma(state) == pytest.approx(-2.0 * model.hamiltonian(state))

    def test_gamma_gradient_matches_finite_differences(self):
        model = CRTBPModel(0.0121505856)
        state = np.array([0.8, 0.1, 0.05, 0.02, 0.3, -0.04])
        h = 1e-6
        numeric = np.array([
            (model.jacobi_gamma(state + h * e) - model.jacobi_gamma(state - h * e)) / (2 * h)
            for e in np.eye(6)
        ])
        np.testing.assert_allclose(model.gamma_gradient(state), numeric, rtol=1e-6, atol=1e-8)

    def test_variational_matrix_matches_finite_differences(self):
        model = CRTBPModel(0.0121505856)
        state = np.array([0.8, 0.1, 0.05, 0.02, 0.3, -0.04])
        h = 1e-6
        numeric = np.column_stack([
            (model.rhs(0.0, state + h * e) - model.rhs(0.0, state - h * e)) / (2 * h)
            for e in np.eye(6)
        ])
        np.testing.assert_allclose(model.variational_matrix(state), numeric, rtol=1e-6, atol=1e-7)

    def test_circle_centripetal_acceleration(self, kepler):
        # uniform rotation at rate n - 1 in the rotating frame
        rate = 0.5 ** -1.5 - 1.0
        field = kepler.vector_field(_circle(0.5))
        assert field[3] == pytest.approx(-0.5 * rate ** 2, rel=1e-10)
        assert field[4] == pytest.approx(0.0, abs=1e-12)

    def test_collision(self):
        model = CRTBPModel(JUPITER_EUROPA_MU, collision_radius=1e-4)
        state = np.zeros(6)
        state[0] = 1.0 - JUPITER_EUROPA_MU + 5e-5
        with pytest.raises(CollisionProximity) as info:
            model.hamiltonian(state)
        assert info.value.distance < 1e-4
        assert info.value.to_dict()["error"] == "CollisionProximity"

    def test_invalid_collision_radius(self):
        with pytest.raises(ValueError):
            HillModel(collision_radius=0.0)


class TestLibrationPoints:
    def test_crtbp_points_are_equilibria(self):
        model = CRTBPModel(JUPITER_EUROPA_MU)
        l1, l2, l3 = libration_points(model)
        assert -JUPITER_EUROPA_MU < l1[0] < 1.0 - JUPITER_EUROPA_MU < l2[0]
        assert l3[0] < 0
        for point in (l1, l2, l3):
            np.testing.assert_allclose(model.potential_gradient(point[:3]), 0.0, atol=1e-10)

    def test_hill_points(self):
        points = libration_points(HillModel())
        x = 3.0 ** (-1.0 / 3.0)
        assert [p[0] for p in points] == pytest.approx([-x, x])
        for point in points:
            np.testing.assert_allclose(HillModel().potential_gradient(point[:3]), 0.0, atol=1e-12)

    def test_kepler_has_none(self, kepler):
        with pytest.raises(ValueError):
            libration_points(kepler)


class TestSymmetries:
    def test_sign_patterns(self):
        assert SYMMETRIES["rho"].signs == (1, -1, -1, -1, 1, 1)
        assert SYMMETRIES["rho_tilde"].signs == (1, -1, 1, -1, 1, -1)
        assert SYMMETRIES["kappa"].signs == (-1, 1, -1, 1, -1, 1)
        assert SYMMETRIES["kappa_tilde"].signs == (-1, 1, 1, 1, -1, -1)
        assert not SYMMETRIES["sigma"].antisymplectic

    def test_fixed_loci(self):
        assert get_symmetry("rho").describe_locus() == "{y=0, z=0, vx=0}"
        assert get_symmetry("rho_tilde").describe_locus() == "{y=0, vx=0, vz=0}"
        assert get_symmetry("kappa").fixed_locus == (0, 2, 4)

    @pytest.mark.parametrize("name", ["rho", "rho_tilde", "kappa", "kappa_tilde", "sigma"])
    def test_involution(self, name):
        state = np.array([0.3, -0.2, 0.1, 0.05, 0.4, -0.6])
        sym = get_symmetry(name)
        np.testing.assert_array_equal(sym.apply(sym.apply(state)), state)

    @pytest.mark.parametrize("name", ["rho", "rho_tilde", "kappa", "kappa_tilde", "sigma"])
    def test_hill_symmetries_preserve_energy(self, name):
        model = HillModel()
        state = np.array([0.3, -0.2, 0.1, 0.05, 0.4, -0.6])
        assert model.jacobi_gamma(apply_symmetry(name, state, model)) == pytest.approx(model.jacobi_gamma(state))

    @pytest.mark.parametrize("preset,names", [
        ("jupiter_europa", ["rho", "rho_tilde"]),
        ("hill", ["rho", "rho_tilde", "kappa", "kappa_tilde"]),
    ])
    def test_vector_field_is_reversed(self, preset, names):
        model = create_model(preset)
        rng = np.random.default_rng(31)
        for _ in range(20):
            state = rng.uniform(-1.0, 1.0, 6)
            state[:3] += model.centers()[-1] + 0.1
            field = model.rhs(0.0, state)
            for name in names:
                sym = get_symmetry(name)
                np.testing.assert_allclose(model.rhs(0.0, sym.apply(state)), -sym.apply(field), rtol=1e-12, atol=1e-12)
            sigma = get_symmetry("sigma")
            np.testing.assert_allclose(model.rhs(0.0, sigma.apply(state)), sigma.apply(field), rtol=1e-12, atol=1e-12)

    def test_kappa_not_a_crtbp_symmetry(self):
        with pytest.raises(SymmetryNotApplicable):
            apply_symmetry("kappa", np.ones(6), CRTBPModel(JUPITER_EUROPA_MU))

    def test_unknown_symmetry(self):
        with pytest.raises(ValueError, match="Unknown symmetry"):
            get_symmetry("tau")
