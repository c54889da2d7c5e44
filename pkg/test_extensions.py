#!/usr/bin/env python3
"""
Test Radau and Lobatto rules and barycentric interpolation at quadrature nodes
"""

import logging
import math

import numpy as np
import pytest

from services.quadrature.core import (
    ComputeOptions,
    Family,
    FamilySpec,
    Normalization,
    exact_moments,
    quadrature,
)
from services.quadrature.errors import InvalidParameter, NegativeWeight
from services.quadrature.extensions import (
    Variant,
    barycentric_interpolate,
    barycentric_weights,
    lobatto_jacobi,
    radau_jacobi,
    radau_laguerre,
)

# Configure logging
logging.basicConfig(level=logging.INFO)


def _worst_moment_error(rule) -> float:
    exact = exact_moments(rule.spec, rule.exactness_degree)
    worst = 0.0
    for k, value in enumerate(exact):
        approx = float(np.sum(rule.weights * rule.nodes ** k))
        scale = max(abs(value), float(np.sum(rule.weights * np.abs(rule.nodes) ** k)))
        worst = max(worst, abs(approx - value) / scale)
    return worst


def test_radau_laguerre_one_interior_node():
    rule = radau_laguerre(1, 0.0)
    assert rule.variant is Variant.RADAU_LEFT
    assert np.allclose(rule.nodes, [0.0, 2.0], rtol=1e-15)
    assert np.allclose(rule.weights, [0.5, 0.5], rtol=1e-14)
    assert rule.exactness_degree == 2


def test_radau_legendre_one_interior_node():
    rule = radau_jacobi(1, 0.0, 0.0, endpoint=-1)
    assert np.allclose(rule.nodes, [-1.0, 1.0 / 3.0], rtol=1e-15)
    assert np.allclose(rule.weights, [0.5, 1.5], rtol=1e-14)
    assert list(rule.boundary_weights) == [rule.weights[0]]


def test_right_radau_mirrors_left():
    left = radau_jacobi(6, 0.4, -0.3, endpoint=-1)
    right = radau_jacobi(6, -0.3, 0.4, endpoint=1)
    assert right.variant is Variant.RADAU_RIGHT
    assert np.allclose(right.nodes, -left.nodes[::-1], rtol=0, atol=2e-15)
    assert np.allclose(right.weights, left.weights[::-1], rtol=1e-13)


def test_radau_endpoint_must_be_one_or_minus_one():
    with pytest.raises(InvalidParameter):
        radau_jacobi(4, 0.0, 0.0, endpoint=0)


def test_lobatto_legendre_one_interior_node():
    rule = lobatto_jacobi(1, 0.0, 0.0)
    assert np.allclose(rule.nodes, [-1.0, 0.0, 1.0], rtol=0, atol=1e-15)
    assert np.allclose(rule.weights, [1 / 3, 4 / 3, 1 / 3], rtol=1e-14)
    assert rule.exactness_degree == 3
    assert len(rule.boundary_weights) == 2


def test_boundary_rules_are_exact():
    """Radau integrates to degree 2n, Lobatto to 2n+1"""
    rules = [
        radau_laguerre(5, 0.5),
        radau_laguerre(8, -0.4),
        radau_jacobi(4, 0.3, -0.2, endpoint=-1),
        radau_jacobi(7, 1.2, 0.0, endpoint=1),
        lobatto_jacobi(5, 0.0, 0.0),
        lobatto_jacobi(6, -0.5, 0.7),
    ]
    for rule in rules:
        error = _worst_moment_error(rule)
        print(f"{rule.variant.value} {rule.spec.family.value} n={rule.spec.n}: {error:.2e}")
        assert error < 1e-12


def test_boundary_rule_unit_normalization():
    rule = lobatto_jacobi(10, 0.2, 0.6, ComputeOptions(normalization=Normalization.UNIT))
    assert rule.weights.sum() == pytest.approx(1.0, abs=1e-14)


def test_barycentric_hermite_three_nodes():
    """u is proportional to ±√w for Hermite"""
    rule = quadrature(FamilySpec(Family.HERMITE, 3))
    u = barycentric_weights(rule)
    assert np.allclose(u, [0.5, -1.0, 0.5], rtol=1e-14)


def test_barycentric_interpolation_is_exact_for_polynomials():
    rule = quadrature(FamilySpec(Family.JACOBI, 6, 0.0, 0.0))
    u = barycentric_weights(rule)
    assert np.max(np.abs(u)) == 1.0
    x = np.random.default_rng(7).uniform(-1.0, 1.0, 50)
    values = barycentric_interpolate(rule.nodes, u, rule.nodes ** 3, x)
    assert np.allclose(values, x ** 3, rtol=0, atol=1e-13)


def test_barycentric_lobatto_interpolation():
    rule = lobatto_jacobi(6, 0.0, 0.0)
    u = barycentric_weights(rule)
    x = np.linspace(-0.99, 0.99, 37)
    values = barycentric_interpolate(rule.nodes, u, rule.nodes ** 7 - rule.nodes, x)
    assert np.allclose(values, x ** 7 - x, rtol=0, atol=1e-13)
    # at a node the value is returned as given
    assert barycentric_interpolate(rule.nodes, u, rule.nodes ** 2, rule.nodes[2])[0] == rule.nodes[2] ** 2


def test_barycentric_rejects_bad_input():
    rule = quadrature(FamilySpec(Family.JACOBI, 4, 0.0, 0.0))
    rule.weights[1] = -rule.weights[1]
    with pytest.raises(NegativeWeight):
        barycentric_weights(rule)

    hermite = quadrature(FamilySpec(Family.HERMITE, 4))
    with pytest.raises(InvalidParameter):
        barycentric_weights(hermite, Variant.LOBATTO)

    subsample = quadrature(FamilySpec(Family.HERMITE, 1000),
                           ComputeOptions(subsample_log_threshold=-300.0 * math.log(10.0)))
    with pytest.raises(InvalidParameter):
        barycentric_weights(subsample)


def main():
    """Run all boundary rule tests"""
    print("🧪 Testing Radau, Lobatto and Barycentric Weights")
    print("=" * 50)
    tests = [
        test_radau_laguerre_one_interior_node,
        test_radau_legendre_one_interior_node,
        test_right_radau_mirrors_left,
        test_radau_endpoint_must_be_one_or_minus_one,
        test_lobatto_legendre_one_interior_node,
        test_boundary_rules_are_exact,
        test_boundary_rule_unit_normalization,
        test_barycentric_hermite_three_nodes,
        test_barycentric_interpolation_is_exact_for_polynomials,
        test_barycentric_lobatto_interpolation,
        test_barycentric_rejects_bad_input,
    ]
    for test in tests:
        test()
        print(f"✅ {test.__name__}")


if __name__ == "__main__":
    main()
