import math

import numpy as np
import pytest

from aderdec.nodes import (
    FAMILIES,
    MAX_NODES,
    lagrange_deriv,
    lagrange_eval,
    make_node_set,
    normalize_family,
    theta_table,
)

SQRT3 = math.sqrt(3.0)


class TestMakeNodeSet:
    def test_gauss_legendre_two_nodes(self):
        ns = make_node_set("gauss_legendre", 2)
        assert ns.nodes == pytest.approx(
            [(SQRT3 - 1) / (2 * SQRT3), (SQRT3 + 1) / (2 * SQRT3)], abs=1e-15
        )
        assert ns.weights == pytest.approx([0.5, 0.5], abs=1e-15)

    def test_lobatto_two_nodes_is_trapezoid(self):
        ns = make_node_set("lobatto", 2)
        assert ns.nodes == pytest.approx([0.0, 1.0], abs=0)
        assert ns.weights == pytest.approx([0.5, 0.5], abs=1e-15)

    def test_lobatto_three_nodes(self):
        # moment equations int x^k = sum w t^k for k=0..2 give Simpson
        ns = make_node_set("lobatto", 3)
        assert ns.nodes == pytest.approx([0.0, 0.5, 1.0], abs=1e-15)
        assert ns.weights == pytest.approx([1 / 6, 2 / 3, 1 / 6], abs=1e-14)

    def test_lobatto_rejects_single_node(self):
        with pytest.raises(ValueError):
            make_node_set("lobatto", 1)

    def test_rejects_zero_nodes_and_too_many(self):
        with pytest.raises(ValueError):
            make_node_set("equispaced", 0)
        with pytest.raises(ValueError):
            make_node_set("equispaced", MAX_NODES + 1)

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            normalize_family("chebyshev")

    @pytest.mark.parametrize("family", FAMILIES)
    @pytest.mark.parametrize("count", range(1, 11))
    def test_basic_invariants(self, family, count):
        if family == "gauss_lobatto" and count < 2:
            pytest.skip("needs two nodes")
        ns = make_node_set(family, count)
        assert np.all(np.diff(ns.nodes) > 0) or count == 1
        assert np.all(ns.nodes >= -1e-15) and np.all(ns.nodes <= 1 + 1e-15)
        assert ns.weights.sum() == pytest.approx(1.0, abs=1e-13)
        if family in ("equispaced", "gauss_lobatto") and count >= 2:
            assert ns.endpoint_included
        if family == "gauss_legendre":
            assert not ns.endpoint_included

    def test_negative_weights_flagged_for_large_equispaced(self):
        # Newton-Cotes weights turn negative from nine points on
        assert make_node_set("equispaced", 9).negative_weights
        assert not make_node_set("equispaced", 8).negative_weights
        assert not make_node_set("gauss_lobatto", 10).negative_weights
        assert not make_node_set("gauss_legendre", 10).negative_weights


def quad_exact_degree(family, count):
    if family == "gauss_legendre":
        return 2 * count - 1
    if family == "gauss_lobatto":
        return 2 * count - 3
    return count - 1  # interpolatory exactness; parity can add one more


class TestQuadratureExactness:
    @pytest.mark.parametrize("family", FAMILIES)
    @pytest.mark.parametrize("count", range(2, 11))
    def test_monomial_moments(self, family, count):
        ns = make_node_set(family, count)
        for k in range(quad_exact_degree(family, count) + 1):
            assert np.dot(ns.weights, ns.nodes**k) == pytest.approx(
                1.0 / (k + 1), abs=1e-12
            )


class TestLagrangeBasis:
    def test_kronecker_at_own_and_other_node(self):
        ns = make_node_set("lobatto", 2)
        assert lagrange_eval(ns, 0, 0.0) == pytest.approx(1.0, abs=1e-15)
        assert lagrange_eval(ns, 0, 1.0) == pytest.approx(0.0, abs=1e-15)

    def test_gauss_legendre_extrapolation_to_one(self):
        ns = make_node_set("gauss_legendre", 2)
        assert lagrange_eval(ns, 1, 1.0) == pytest.approx((1 + SQRT3) / 2, abs=1e-14)

    def test_linear_basis_derivatives(self):
        ns = make_node_set("lobatto", 2)
        for t in (0.0, 0.3, 1.0):
            assert lagrange_deriv(ns, 0, t) == pytest.approx(-1.0, abs=1e-14)
            assert lagrange_deriv(ns, 1, t) == pytest.approx(1.0, abs=1e-14)

    def test_quadratic_bump_extremum_at_node(self):
        ns = make_node_set("lobatto", 3)
        assert lagrange_deriv(ns, 1, 0.5) == pytest.approx(0.0, abs=1e-14)

    @pytest.mark.parametrize("family", FAMILIES)
    @pytest.mark.parametrize("count", range(1, 11))
    def test_partition_of_unity(self, family, count):
        if family == "gauss_lobatto" and count < 2:
            pytest.skip("needs two nodes")
        ns = make_node_set(family, count)
        rng = np.random.default_rng(42)
        ts = rng.uniform(0.0, 1.0, size=100)
        totals = ns.basis_values(ts).sum(axis=0)
        assert np.allclose(totals, 1.0, atol=1e-12)

    @pytest.mark.parametrize("family", FAMILIES)
    @pytest.mark.parametrize("count", range(2, 11))
    def test_kronecker_property_at_nodes(self, family, count):
        ns = make_node_set(family, count)
        vals = ns.basis_values(ns.nodes)
        assert np.allclose(vals, np.eye(count), atol=1e-13)

    def test_basis_index_out_of_range(self):
        ns = make_node_set("lobatto", 2)
        with pytest.raises(IndexError):
            lagrange_eval(ns, 2, 0.5)


class TestThetaTable:
    def test_lobatto2_full_slab_row(self):
        tt = theta_table(make_node_set("lobatto", 2))
        assert tt.theta[1] == pytest.approx([0.5, 0.5], abs=1e-15)

    def test_lobatto3_rows(self):
        tt = theta_table(make_node_set("lobatto", 3))
        assert tt.theta[1] == pytest.approx([5 / 24, 1 / 3, -1 / 24], abs=1e-14)
        assert tt.theta[2] == pytest.approx([1 / 6, 2 / 3, 1 / 6], abs=1e-14)

    @pytest.mark.parametrize("family", ("equispaced", "gauss_lobatto"))
    def test_first_row_zero_for_anchored_families(self, family):
        tt = theta_table(make_node_set(family, 4))
        assert np.allclose(tt.theta[0], 0.0, atol=1e-15)

    @pytest.mark.parametrize("family", FAMILIES)
    @pytest.mark.parametrize("count", range(2, 11))
    def test_row_sums_and_end_row(self, family, count):
        ns = make_node_set(family, count)
        tt = theta_table(ns)
        assert np.allclose(tt.theta.sum(axis=1), ns.nodes, atol=1e-13)
        assert tt.theta_end.sum() == pytest.approx(1.0, abs=1e-13)
        # quadrature points coincide with the basis points, so the full-slab
        # integrals are the quadrature weights
        assert np.allclose(tt.theta_end, ns.weights, atol=1e-13)
        assert np.all(np.diff(tt.beta) > 0)
        if ns.endpoint_included:
            assert tt.beta[-1] == pytest.approx(1.0, abs=0)
