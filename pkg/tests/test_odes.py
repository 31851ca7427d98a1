import numpy as np
import pytest

from aderdec.odes import (
    fd_jacobian,
    make_biomass,
    make_lotka_volterra,
    make_problem,
    make_robertson,
    make_scalar_linear,
    make_scalar_nonlinear,
)


class TestScalarLinear:
    def test_initial_value_and_analytic(self):
        sys = make_scalar_linear(10.0)
        assert sys.analytic(0.0) == pytest.approx([1.0])
        assert sys.analytic(0.1) == pytest.approx([np.e], rel=1e-12)

    def test_zero_lambda_is_constant(self):
        sys = make_scalar_linear(0.0)
        assert sys.rhs(0.0, np.array([3.0])) == pytest.approx([0.0])
        assert sys.analytic(5.0) == pytest.approx([1.0])


class TestScalarNonlinear:
    def test_analytic_value(self):
        sys = make_scalar_nonlinear(10.0)
        assert sys.analytic(0.1) == pytest.approx([0.5], rel=1e-14)

    def test_equilibrium_and_direct_substitution(self):
        sys = make_scalar_nonlinear(10.0)
        assert sys.rhs(0.0, np.array([0.0])) == pytest.approx([0.0])
        assert sys.rhs(0.0, np.array([1.0])) == pytest.approx([-10.0])


class TestBiomass:
    def test_initial_state(self):
        sys = make_biomass()
        assert sys.analytic(0.0) == pytest.approx([0.0, 0.0, 10.0], abs=1e-12)
        assert sys.y0 == pytest.approx([0.0, 0.0, 10.0])

    def test_third_component_decay(self):
        sys = make_biomass()
        assert sys.analytic(1.0)[2] == pytest.approx(10 * np.exp(-5.0), rel=1e-13)

    def test_total_biomass_decays_through_first_component(self):
        sys = make_biomass()
        rng = np.random.default_rng(5)
        for _ in range(10):
            y = rng.uniform(0, 10, size=3)
            assert np.sum(sys.rhs(0.0, y)) == pytest.approx(-y[0], rel=1e-12)


class TestLotkaVolterra:
    def test_equilibrium(self):
        sys = make_lotka_volterra(1.0, 0.2, 0.5, 0.2)
        eq = np.array([0.2 / 0.5, 1.0 / 0.2])
        assert sys.rhs(0.0, eq) == pytest.approx([0.0, 0.0], abs=1e-14)

    def test_rhs_at_paper_start(self):
        sys = make_lotka_volterra(1.0, 0.2, 0.5, 0.2)
        assert sys.rhs(0.0, np.array([1.0, 2.0])) == pytest.approx([0.6, 0.6])

    def test_prey_decoupled_without_predators(self):
        sys = make_lotka_volterra(1.0, 0.2, 0.5, 0.2)
        out = sys.rhs(0.0, np.array([3.0, 0.0]))
        assert out == pytest.approx([3.0, 0.0])

    def test_invariant_constant_along_rhs_direction(self):
        # dV/dt = grad V . rhs = 0 everywhere
        sys = make_lotka_volterra(1.0, 0.2, 0.5, 0.2)
        rng = np.random.default_rng(2)
        for _ in range(10):
            y = rng.uniform(0.2, 5.0, size=2)
            h = 1e-7
            d = sys.rhs(0.0, y)
            dv = (sys.invariant(y + h * d) - sys.invariant(y - h * d)) / (2 * h)
            assert abs(dv) < 1e-7


class TestRobertson:
    def test_rhs_at_start(self):
        sys = make_robertson()
        assert sys.rhs(0.0, np.array([1.0, 0.0, 0.0])) == pytest.approx([-0.04, 0.04, 0.0])

    def test_mass_conservation_identity(self):
        sys = make_robertson()
        rng = np.random.default_rng(8)
        for _ in range(10):
            y = rng.uniform(0, 1, size=3)
            assert np.sum(sys.rhs(0.0, y)) == pytest.approx(0.0, abs=1e-12)

    def test_jacobian_first_row_at_start(self):
        sys = make_robertson()
        J = sys.jac(0.0, np.array([1.0, 0.0, 0.0]))
        assert J[0] == pytest.approx([-0.04, 0.0, 0.0])


class TestFdJacobian:
    def test_scalar_linear(self):
        sys = make_scalar_linear(10.0)
        J = fd_jacobian(sys, 0.0, np.array([1.0]))
        assert np.allclose(J, [[10.0]], atol=1e-6)

    def test_biomass_constant_matrix(self):
        sys = make_biomass()
        expect = np.array([[-1.0, 3.0, 0.0], [0.0, -3.0, 5.0], [0.0, 0.0, -5.0]])
        J = fd_jacobian(sys, 0.0, np.array([1.0, 2.0, 3.0]))
        assert np.allclose(J, expect, atol=1e-6)

    def test_lotka_volterra_at_paper_start(self):
        sys = make_lotka_volterra(1.0, 0.2, 0.5, 0.2)
        J = fd_jacobian(sys, 0.0, np.array([1.0, 2.0]))
        assert np.allclose(J, [[0.6, -0.2], [1.0, 0.3]], atol=1e-5)


@pytest.mark.parametrize("name", ["linear", "nonlinear", "biomass"])
def test_analytic_satisfies_ode(name):
    sys = make_problem(name)
    h = 1e-6
    for t in np.linspace(0.01, 0.99, 20):
        dydt = (np.asarray(sys.analytic(t + h)) - np.asarray(sys.analytic(t - h))) / (2 * h)
        assert np.max(np.abs(dydt - sys.rhs(t, np.asarray(sys.analytic(t))))) < 1e-6


@pytest.mark.parametrize("name", ["linear", "biomass", "robertson"])
def test_stiff_split_sums_to_rhs(name):
    sys = make_problem(name)
    rng = np.random.default_rng(17)
    for _ in range(10):
        y = rng.uniform(0.1, 2.0, size=sys.dim)
        total = sys.stiff_split.explicit_part(0.0, y) + sys.stiff_split.stiff_part(0.0, y)
        assert np.allclose(total, sys.rhs(0.0, y), atol=1e-12)


@pytest.mark.parametrize("name", ["linear", "nonlinear", "biomass", "lotka-volterra", "robertson"])
def test_analytic_jacobian_matches_finite_differences(name):
    sys = make_problem(name)
    rng = np.random.default_rng(23)
    for _ in range(5):
        y = rng.uniform(0.3, 2.0, size=sys.dim)
        J = np.asarray(sys.jac(0.0, y))
        Jfd = fd_jacobian(sys, 0.0, y)
        scale = max(1.0, np.max(np.abs(J)))
        assert np.max(np.abs(J - Jfd)) / scale < 1e-5


def test_make_problem_rejects_unknown_name():
    with pytest.raises(ValueError):
        make_problem("van-der-pol")
