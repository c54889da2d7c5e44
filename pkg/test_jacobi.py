#!/usr/bin/env python3
"""
Test Gauss-Jacobi rules: closed forms, Legendre, backend selection and agreement between backends
"""

import logging
import math

import numpy as np
import pytest
from scipy import special

from services.quadrature.config import get_settings
from services.quadrature.core import Backend, ComputeOptions, Family, FamilySpec, Method, Normalization
from services.quadrature.errors import InvalidParameter, NotComputable
from services.quadrature.jacobi import (
    chebyshev_rule,
    decide_jacobi,
    gauss_jacobi,
    jacobi_asymptotic_rule,
    select_jacobi_method,
)
from services.quadrature.legendre import TABLE_MAX_N, format_table, generate_table, legendre_rule, load_table, parse_table

# Configure logging
logging.basicConfig(level=logging.INFO)


def jacobi(n, alpha, beta):
    return FamilySpec(Family.JACOBI, n, alpha, beta)


def test_chebyshev_first_kind():
    rule = chebyshev_rule(1, -0.5, -0.5)
    assert list(rule.nodes) == [0.0]
    assert rule.weights[0] == pytest.approx(math.pi, rel=1e-15)

    rule = chebyshev_rule(3, -0.5, -0.5)
    assert np.allclose(rule.nodes, [-math.sqrt(3) / 2, 0.0, math.sqrt(3) / 2], rtol=0, atol=4e-16)
    assert np.allclose(rule.weights, math.pi / 3, rtol=1e-15)
    assert rule.backend is Backend.CLOSED_FORM


def test_chebyshev_second_kind():
    rule = chebyshev_rule(2, 0.5, 0.5)
    assert np.allclose(rule.nodes, [-0.5, 0.5], rtol=0, atol=4e-16)
    assert np.allclose(rule.weights, math.pi / 4, rtol=1e-15)


def test_chebyshev_mixed_kind_matches_scipy():
    x, w = special.roots_jacobi(9, 0.5, -0.5)
    rule = chebyshev_rule(9, 0.5, -0.5)
    assert np.allclose(rule.nodes, x, rtol=0, atol=1e-15)
    assert np.allclose(rule.weights, w, rtol=1e-14)


def test_chebyshev_rejects_other_parameters():
    with pytest.raises(InvalidParameter):
        chebyshev_rule(4, 0.0, 0.5)


def test_legendre_small():
    rule = legendre_rule(3)
    assert np.allclose(rule.nodes, [-math.sqrt(0.6), 0.0, math.sqrt(0.6)], rtol=0, atol=4e-16)
    assert np.allclose(rule.weights, [5 / 9, 8 / 9, 5 / 9], rtol=1e-15)
    assert rule.backend is Backend.LOOKUP

    rule = legendre_rule(2, Normalization.UNIT)
    assert np.allclose(rule.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], rtol=1e-15)
    assert np.allclose(rule.weights, [0.5, 0.5], rtol=1e-15)


def test_lookup_table_matches_generator():
    """The stored table is exactly what gentable writes, and survives a parse"""
    text = format_table(generate_table(TABLE_MAX_N))
    path = get_settings().table_path
    if path.exists():
        assert path.read_text() == text
    assert format_table(parse_table(text)) == text
    loaded = load_table()
    assert sorted(loaded) == list(range(1, TABLE_MAX_N + 1))
    assert format_table(loaded) == text


def test_legendre_expansion_matches_scipy():
    """n above the table uses the expansions"""
    x, w = special.roots_legendre(120)
    rule = legendre_rule(120)
    assert rule.backend is Backend.ASYMPTOTIC
    assert np.allclose(rule.nodes, x, rtol=0, atol=2e-15)
    assert np.allclose(rule.weights, w, rtol=1e-13)
    # exactly symmetric
    assert np.array_equal(rule.nodes, -rule.nodes[::-1])


def test_selector_regions():
    assert select_jacobi_method(jacobi(300, 0.9, 0.9)).backend is Backend.ASYMPTOTIC
    assert select_jacobi_method(jacobi(250, 0.9, 0.9)).backend is Backend.ITERATIVE
    assert select_jacobi_method(jacobi(10 ** 6, 40.0, 40.0)).backend is Backend.ITERATIVE
    assert select_jacobi_method(jacobi(10, -0.5, 0.5)).backend is Backend.CLOSED_FORM
    assert select_jacobi_method(jacobi(10, 0.0, 0.0)).backend is Backend.LOOKUP


def test_override_is_obeyed():
    spec = jacobi(300, 0.9, 0.9)
    for method, backend in [(Method.ITERATIVE, Backend.ITERATIVE),
                            (Method.ASYMPTOTIC, Backend.ASYMPTOTIC),
                            (Method.GOLUB_WELSCH, Backend.GOLUB_WELSCH)]:
        decision = decide_jacobi(spec, ComputeOptions(method_override=method))
        assert decision.backend is backend
        assert decision.reason == "method override"


def test_iterative_matches_scipy():
    for n, alpha, beta in [(12, 0.3, -0.2), (25, 2.5, 1.0), (40, -0.7, 0.4), (17, 1.5, 1.5)]:
        x, w = special.roots_jacobi(n, alpha, beta)
        rule = gauss_jacobi(jacobi(n, alpha, beta), ComputeOptions(method_override=Method.ITERATIVE))
        print(f"n={n} alpha={alpha} beta={beta}: max node error {np.max(np.abs(rule.nodes - x)):.2e}")
        assert np.allclose(rule.nodes, x, rtol=0, atol=1e-14)
        assert np.allclose(rule.weights, w, rtol=1e-12)


def test_iterative_two_node_legendre():
    rule = gauss_jacobi(jacobi(2, 0.0, 0.0), ComputeOptions(method_override=Method.ITERATIVE))
    assert rule.backend is Backend.ITERATIVE
    root = 1.0 / math.sqrt(3.0)
    assert np.allclose(rule.nodes, [-root, root], rtol=0, atol=2e-16)
    assert np.allclose(rule.weights, [1.0, 1.0], rtol=1e-14)


def test_iterative_small_rules_with_half_integer_alpha():
    """α = -1/2 drops the endpoint term of the normal form at x = 1"""
    for n in (2, 3, 6):
        x, w = special.roots_jacobi(n, -0.5, 0.0)
        rule = gauss_jacobi(jacobi(n, -0.5, 0.0), ComputeOptions(method_override=Method.ITERATIVE))
        assert np.allclose(rule.nodes, x, rtol=0, atol=1e-14), f"n={n}"
        assert np.allclose(rule.weights, w, rtol=1e-12), f"n={n}"


def test_asymptotic_matches_iterative():
    spec = jacobi(400, 0.9, 0.9)
    asymptotic = gauss_jacobi(spec, ComputeOptions(method_override=Method.ASYMPTOTIC))
    iterative = gauss_jacobi(spec, ComputeOptions(method_override=Method.ITERATIVE))
    assert asymptotic.backend is Backend.ASYMPTOTIC
    assert np.allclose(asymptotic.nodes, iterative.nodes, rtol=0, atol=1e-14)
    assert np.allclose(asymptotic.weights, iterative.weights, rtol=1e-12)


def test_asymptotic_refuses_small_degree():
    with pytest.raises(NotComputable):
        jacobi_asymptotic_rule(jacobi(10, 0.3, 0.3))


def test_nodes_ascending_and_weights_positive():
    rule = gauss_jacobi(jacobi(300, 0.4, -0.3))
    assert np.all(np.diff(rule.nodes) > 0)
    assert np.all(rule.weights > 0)
    assert rule.weights.sum() == pytest.approx(2.0 ** 1.1 * float(special.beta(1.4, 0.7)), rel=1e-13)


def main():
    """Run all Jacobi tests"""
    print("🧪 Testing Gauss-Jacobi Rules")
    print("=" * 50)
    tests = [
        test_chebyshev_first_kind,
        test_chebyshev_second_kind,
        test_chebyshev_mixed_kind_matches_scipy,
        test_chebyshev_rejects_other_parameters,
        test_legendre_small,
        test_lookup_table_matches_generator,
        test_legendre_expansion_matches_scipy,
        test_selector_regions,
        test_override_is_obeyed,
        test_iterative_matches_scipy,
        test_iterative_two_node_legendre,
        test_iterative_small_rules_with_half_integer_alpha,
        test_asymptotic_matches_iterative,
        test_asymptotic_refuses_small_degree,
        test_nodes_ascending_and_weights_positive,
    ]
    for test in tests:
        test()
        print(f"✅ {test.__name__}")


if __name__ == "__main__":
    main()
