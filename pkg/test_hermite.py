#!/usr/bin/env python3
"""
Test Gauss-Hermite rules and their subsampling
"""

import logging
import math

import numpy as np
import pytest

from services.quadrature.core import Backend, ComputeOptions, Family, FamilySpec, Method, Normalization
from services.quadrature.errors import NotComputable
from services.quadrature.hermite import (
    gauss_hermite,
    hermite_asymptotic_rule,
    select_hermite_method,
)
from services.quadrature.recurrence import check_consecutive_zeros

# Configure logging
logging.basicConfig(level=logging.INFO)

SUBSAMPLE = ComputeOptions(normalization=Normalization.UNIT, subsample_log_threshold=-300.0 * math.log(10.0))


def hermite(n):
    return FamilySpec(Family.HERMITE, n)


def test_one_node():
    rule = gauss_hermite(hermite(1))
    assert list(rule.nodes) == [0.0]
    assert rule.weights[0] == pytest.approx(math.sqrt(math.pi), rel=1e-15)


def test_two_nodes():
    rule = gauss_hermite(hermite(2))
    assert np.allclose(rule.nodes, [-1 / math.sqrt(2), 1 / math.sqrt(2)], rtol=1e-15)
    assert np.allclose(rule.weights, math.sqrt(math.pi) / 2, rtol=1e-15)


def test_matches_numpy():
    for n in (7, 20, 64):
        x, w = np.polynomial.hermite.hermgauss(n)
        rule = gauss_hermite(hermite(n))
        assert np.allclose(rule.nodes, x, rtol=0, atol=1e-13)
        assert np.allclose(rule.weights, w, rtol=1e-12)


def test_symmetry():
    rule = gauss_hermite(hermite(101))
    assert np.array_equal(rule.nodes, -rule.nodes[::-1])
    assert np.array_equal(rule.weights, rule.weights[::-1])
    assert rule.nodes[50] == 0.0


def test_selector_prefers_iterative():
    for n in (10, 1000, 10 ** 5):
        assert select_hermite_method(hermite(n)).backend is Backend.ITERATIVE


def test_asymptotic_matches_iterative():
    spec = hermite(200)
    asymptotic = gauss_hermite(spec, ComputeOptions(method_override=Method.ASYMPTOTIC))
    iterative = gauss_hermite(spec, ComputeOptions(method_override=Method.ITERATIVE))
    assert np.allclose(asymptotic.nodes, iterative.nodes, rtol=0, atol=1e-13)
    central = slice(50, 150)
    assert np.allclose(asymptotic.weights[central], iterative.weights[central], rtol=1e-11)


def test_asymptotic_refuses_small_degree():
    with pytest.raises(NotComputable):
        hermite_asymptotic_rule(hermite(100))


def test_scaled_weights():
    """Scaled weights are e^(x²) w"""
    rule = gauss_hermite(hermite(40), ComputeOptions(want_scaled=True))
    assert np.allclose(rule.scaled_weights, np.exp(rule.nodes ** 2) * rule.weights, rtol=1e-12)


def test_subsample_fraction_thousand():
    rule = gauss_hermite(hermite(1000), SUBSAMPLE)
    percent = 100.0 * rule.computed_count / 1000
    print(f"n=1000 kept {percent:.2f}%")
    assert percent == pytest.approx(70.2, abs=0.2)
    assert np.all(np.diff(rule.nodes) > 0)
    # the kept nodes are the central ones
    assert rule.indices[0] + rule.indices[-1] == 1001
    reference, _ = np.polynomial.hermite.hermgauss(1000)
    assert np.allclose(rule.nodes, reference[rule.indices - 1], rtol=1e-12, atol=0)


def test_skipped_zero_is_detected():
    """A gap in the positive zeros shows up in the Sturm counts"""
    spec = hermite(12)
    reference, _ = np.polynomial.hermite.hermgauss(12)
    positive = reference[6:]
    check_consecutive_zeros(spec, positive, 0.5 * positive[0], 6)
    with pytest.raises(NotComputable):
        check_consecutive_zeros(spec, np.delete(positive, 2), 0.5 * positive[0], 6)
    with pytest.raises(NotComputable):
        check_consecutive_zeros(spec, positive[1:], 0.5 * positive[0], 6)


def test_subsample_fraction_ten_thousand():
    rule = gauss_hermite(hermite(10000), SUBSAMPLE)
    percent = 100.0 * rule.computed_count / 10000
    print(f"n=10000 kept {percent:.2f}%")
    assert percent == pytest.approx(23.52, abs=0.1)


def main():
    """Run all Hermite tests"""
    print("🧪 Testing Gauss-Hermite Rules")
    print("=" * 50)
    tests = [
        test_one_node,
        test_two_nodes,
        test_matches_numpy,
        test_symmetry,
        test_selector_prefers_iterative,
        test_asymptotic_matches_iterative,
        test_asymptotic_refuses_small_degree,
        test_scaled_weights,
        test_subsample_fraction_thousand,
        test_skipped_zero_is_detected,
        test_subsample_fraction_ten_thousand,
    ]
    for test in tests:
        test()
        print(f"✅ {test.__name__}")


if __name__ == "__main__":
    main()
