#!/usr/bin/env python3
"""
Test Gauss-Laguerre rules: small cases, region selection, scaled weights and subsampling
"""

import logging
import math

import numpy as np
import pytest
from scipy import special

from services.quadrature.core import Backend, ComputeOptions, Family, FamilySpec, Method, Normalization
from services.quadrature.errors import NotComputable
from services.quadrature.laguerre import (
    gauss_laguerre,
    laguerre_asymptotic_rule,
    log_ratio,
    select_laguerre_method,
)

# Configure logging
logging.basicConfig(level=logging.INFO)


def laguerre(n, alpha=0.0):
    return FamilySpec(Family.LAGUERRE, n, alpha)


def test_one_node():
    rule = gauss_laguerre(laguerre(1))
    assert rule.nodes[0] == pytest.approx(1.0, rel=1e-15)
    assert rule.weights[0] == pytest.approx(1.0, rel=1e-15)


def test_two_nodes():
    rule = gauss_laguerre(laguerre(2))
    root = math.sqrt(2.0)
    assert np.allclose(rule.nodes, [2 - root, 2 + root], rtol=1e-15)
    assert np.allclose(rule.weights, [(2 + root) / 4, (2 - root) / 4], rtol=1e-14)


def test_iterative_two_nodes():
    rule = gauss_laguerre(laguerre(2), ComputeOptions(method_override=Method.ITERATIVE))
    assert rule.backend is Backend.ITERATIVE
    root = math.sqrt(2.0)
    assert np.allclose(rule.nodes, [2 - root, 2 + root], rtol=1e-14)
    assert np.allclose(rule.weights, [(2 + root) / 4, (2 - root) / 4], rtol=1e-13)


def test_selector_regions():
    assert select_laguerre_method(laguerre(100, -0.99)).backend is Backend.ASYMPTOTIC
    assert select_laguerre_method(laguerre(100, 0.0)).backend is Backend.ITERATIVE
    assert select_laguerre_method(laguerre(300, 1.5)).backend is Backend.ASYMPTOTIC
    assert select_laguerre_method(laguerre(500, 7.0)).backend is Backend.ITERATIVE
    assert select_laguerre_method(laguerre(3, 2.0)).backend is Backend.GOLUB_WELSCH


def test_iterative_matches_scipy():
    for n, alpha in [(10, 0.0), (30, 0.3), (25, 2.5), (40, -0.8)]:
        x, w = special.roots_genlaguerre(n, alpha)
        rule = gauss_laguerre(laguerre(n, alpha), ComputeOptions(method_override=Method.ITERATIVE))
        print(f"n={n} alpha={alpha}: max relative node error {np.max(np.abs(rule.nodes / x - 1)):.2e}")
        assert np.allclose(rule.nodes, x, rtol=1e-13, atol=0)
        # only the leading weights of the eigenvalue reference carry full relative accuracy
        assert np.allclose(rule.weights[:10], w[:10], rtol=1e-11)


def test_unit_normalization():
    rule = gauss_laguerre(laguerre(60, 1.3), ComputeOptions(normalization=Normalization.UNIT))
    assert rule.weights.sum() == pytest.approx(1.0, abs=1e-14)
    natural = gauss_laguerre(laguerre(60, 1.3))
    assert natural.weights.sum() == pytest.approx(float(special.gamma(2.3)), rel=1e-14)


def test_scaled_weights_are_consistent():
    """w_i = exp(log_ratio(x_i)) times the scaled weight"""
    alpha = 0.3
    rule = gauss_laguerre(laguerre(50, alpha), ComputeOptions(method_override=Method.ITERATIVE, want_scaled=True))
    assert rule.scaled_weights is not None
    rebuilt = rule.scaled_weights * np.exp(log_ratio(rule.nodes, rule.anchor_node, alpha))
    assert np.allclose(rebuilt, rule.weights, rtol=1e-12, atol=0)


def test_asymptotic_matches_iterative():
    spec = laguerre(300, 0.5)
    opts_a = ComputeOptions(method_override=Method.ASYMPTOTIC)
    opts_i = ComputeOptions(method_override=Method.ITERATIVE)
    asymptotic = gauss_laguerre(spec, opts_a)
    iterative = gauss_laguerre(spec, opts_i)
    assert np.allclose(asymptotic.nodes, iterative.nodes, rtol=1e-13, atol=0)
    assert np.allclose(asymptotic.weights[:100], iterative.weights[:100], rtol=1e-11)


def test_asymptotic_for_non_positive_alpha():
    """Large n with α = 0 and α close to -1, where the smallest zeros crowd the origin"""
    for n, alpha in [(500, 0.0), (100, -0.99)]:
        spec = laguerre(n, alpha)
        asymptotic = gauss_laguerre(spec, ComputeOptions(method_override=Method.ASYMPTOTIC))
        iterative = gauss_laguerre(spec, ComputeOptions(method_override=Method.ITERATIVE))
        assert np.all(np.isfinite(asymptotic.nodes)) and np.all(np.isfinite(asymptotic.weights))
        error = np.max(np.abs(asymptotic.nodes / iterative.nodes - 1))
        print(f"n={n} alpha={alpha}: max relative node difference {error:.2e}")
        assert error < 2e-13
        assert np.allclose(asymptotic.weights[:40], iterative.weights[:40], rtol=1e-11)


def test_asymptotic_limits():
    with pytest.raises(NotComputable):
        laguerre_asymptotic_rule(laguerre(50, 0.0))
    with pytest.raises(NotComputable):
        laguerre_asymptotic_rule(laguerre(500, 6.0))


def test_subsampling_keeps_leading_nodes():
    spec = laguerre(400, 0.0)
    threshold = -300.0 * math.log(10.0)
    rule = gauss_laguerre(spec, ComputeOptions(subsample_log_threshold=threshold))
    print(f"Kept {rule.computed_count}/{spec.n} nodes")
    assert 0 < rule.computed_count < spec.n
    assert not rule.is_complete
    assert list(rule.indices) == list(range(1, rule.computed_count + 1))
    assert math.log(rule.weights.min() / rule.weights.max()) >= threshold
    assert np.all(np.diff(rule.nodes) > 0)


def main():
    """Run all Laguerre tests"""
    print("🧪 Testing Gauss-Laguerre Rules")
    print("=" * 50)
    tests = [
        test_one_node,
        test_two_nodes,
        test_iterative_two_nodes,
        test_selector_regions,
        test_iterative_matches_scipy,
        test_unit_normalization,
        test_scaled_weights_are_consistent,
        test_asymptotic_matches_iterative,
        test_asymptotic_for_non_positive_alpha,
        test_asymptotic_limits,
        test_subsampling_keeps_leading_nodes,
    ]
    for test in tests:
        test()
        print(f"✅ {test.__name__}")


if __name__ == "__main__":
    main()
