#!/usr/bin/env python3
"""
Test the double-double arithmetic, the extended-precision references and the error measures
"""

import logging
import math

import numpy as np
import pytest

from services.quadrature.core import (
    ComputeOptions,
    Family,
    FamilySpec,
    Method,
    QuadratureRule,
    quadrature,
)
from services.quadrature.ddouble import DoubleDouble, self_test, two_prod, two_sum
from services.quadrature.errors import LengthMismatch, NotComputable
from services.quadrature.laguerre import log_ratio
from services.quadrature.oracle import (
    error_metrics,
    golub_welsch,
    mu0_extended,
    recurrence_coefficients,
    reference_rule_highprec,
)

# Configure logging
logging.basicConfig(level=logging.INFO)


def test_error_free_transforms():
    s, err = two_sum(1.0, 2.0 ** -80)
    assert (s, err) == (1.0, 2.0 ** -80)
    a = 1.0 + 2.0 ** -30
    p, err = two_prod(a, a)
    assert p == 1.0 + 2.0 ** -29
    assert err == 2.0 ** -60
    self_test()


def test_double_double_arithmetic():
    root = DoubleDouble(2.0).sqrt()
    assert abs((root * root - 2.0).to_float()) < 1e-30
    third = DoubleDouble(1.0) / 3.0
    assert abs((third * 3.0 - 1.0).to_float()) < 1e-31


def test_mu0_extended():
    value = mu0_extended(FamilySpec(Family.HERMITE, 1))
    assert value.hi == pytest.approx(math.sqrt(math.pi), rel=3e-16)
    assert abs(value.lo) < 1e-16


def test_recurrence_coefficients():
    a, b = recurrence_coefficients(FamilySpec(Family.JACOBI, 4, 0.0, 0.0))
    assert np.all(a.hi == 0.0)
    assert b.hi[0] == 0.0
    assert b.hi[1] == pytest.approx(1 / 3, rel=1e-16)
    assert b.hi[2] == pytest.approx(4 / 15, rel=1e-16)

    a, b = recurrence_coefficients(FamilySpec(Family.HERMITE, 5))
    assert list(b.hi) == [0.0, 0.5, 1.0, 1.5, 2.0]

    a, b = recurrence_coefficients(FamilySpec(Family.LAGUERRE, 4, 0.5))
    assert list(a.hi) == [1.5, 3.5, 5.5, 7.5]
    assert list(b.hi) == [0.0, 1.5, 5.0, 10.5]


def test_golub_welsch_small_rules():
    rule = golub_welsch(FamilySpec(Family.JACOBI, 3, 0.0, 0.0))
    assert np.allclose(rule.nodes, [-math.sqrt(0.6), 0.0, math.sqrt(0.6)], rtol=0, atol=4e-16)
    assert np.allclose(rule.weights, [5 / 9, 8 / 9, 5 / 9], rtol=1e-15)

    rule = golub_welsch(FamilySpec(Family.HERMITE, 2))
    assert np.allclose(rule.nodes, [-1 / math.sqrt(2), 1 / math.sqrt(2)], rtol=1e-15)
    assert np.allclose(rule.weights, math.sqrt(math.pi) / 2, rtol=1e-15)


def test_newton_reference_matches_numpy():
    x, w = np.polynomial.hermite.hermgauss(6)
    rule = reference_rule_highprec(FamilySpec(Family.HERMITE, 6)).rounded()
    assert np.allclose(rule.nodes, x, rtol=1e-14)
    assert np.allclose(rule.weights, w, rtol=1e-14)


def test_reference_small_rules():
    """Degrees 1 to 5, where the recurrence has one or two steps only"""
    one = {
        Family.JACOBI: (0.0, 2.0),
        Family.HERMITE: (0.0, math.sqrt(math.pi)),
        Family.LAGUERRE: (1.0, 1.0),
    }
    for family, (node, weight) in one.items():
        rule = reference_rule_highprec(FamilySpec(family, 1)).rounded()
        assert rule.nodes[0] == pytest.approx(node, abs=1e-16)
        assert rule.weights[0] == pytest.approx(weight, rel=1e-15)

    rule = reference_rule_highprec(FamilySpec(Family.JACOBI, 2, 0.0, 0.0)).rounded()
    assert np.allclose(rule.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], rtol=1e-16)
    assert np.allclose(rule.weights, [1.0, 1.0], rtol=1e-16)

    numpy_rules = {
        Family.JACOBI: np.polynomial.legendre.leggauss,
        Family.HERMITE: np.polynomial.hermite.hermgauss,
        Family.LAGUERRE: np.polynomial.laguerre.laggauss,
    }
    for family, reference in numpy_rules.items():
        for n in (2, 3, 5):
            x, w = reference(n)
            rule = reference_rule_highprec(FamilySpec(family, n)).rounded()
            assert np.allclose(rule.nodes, x, rtol=1e-14, atol=1e-16), f"{family.value} n={n}"
            assert np.allclose(rule.weights, w, rtol=1e-14), f"{family.value} n={n}"


def test_references_agree():
    spec = FamilySpec(Family.JACOBI, 20, 0.3, 0.3)
    newton = reference_rule_highprec(spec).rounded()
    gw = golub_welsch(spec)
    assert error_metrics(newton, gw, "nodes").eps_mr < 1e-15
    assert error_metrics(newton, gw, "weights").eps_mr < 1e-15


def test_iterative_laguerre_against_reference():
    """All Laguerre weights keep their relative accuracy, the tiny ones included"""
    spec = FamilySpec(Family.LAGUERRE, 50, 0.0)
    reference = reference_rule_highprec(spec).rounded()
    rule = quadrature(spec, ComputeOptions(method_override=Method.ITERATIVE))
    metrics = error_metrics(rule, reference, "weights")
    print(f"Laguerre n=50 weights: {metrics.to_dict()}")
    assert metrics.compared == 50
    assert metrics.eps_mr < 1e-11


def test_reference_scaled_weights():
    spec = FamilySpec(Family.HERMITE, 10)
    rule = reference_rule_highprec(spec, ComputeOptions(want_scaled=True)).rounded()
    assert rule.anchor_node == 0.0
    assert np.allclose(rule.scaled_weights, np.exp(rule.nodes ** 2) * rule.weights, rtol=1e-14)


def test_reference_scaled_weights_past_underflow():
    """Outer Hermite weights at n = 1000 underflow while their scaled values stay representable"""
    rule = reference_rule_highprec(FamilySpec(Family.HERMITE, 1000), ComputeOptions(want_scaled=True)).rounded()
    assert rule.weights[0] == 0.0
    assert np.all(np.isfinite(rule.scaled_weights)) and np.all(rule.scaled_weights > 0)
    assert rule.scaled_weights[0] == pytest.approx(rule.scaled_weights[-1], rel=1e-15)
    middle = slice(300, 700)
    assert np.allclose(rule.scaled_weights[middle], np.exp(rule.nodes[middle] ** 2) * rule.weights[middle], rtol=1e-13)


def test_reference_scaled_laguerre():
    alpha = 0.5
    rule = reference_rule_highprec(FamilySpec(Family.LAGUERRE, 40, alpha), ComputeOptions(want_scaled=True)).rounded()
    assert rule.anchor_node == rule.nodes[int(np.argmax(rule.weights))]
    rebuilt = rule.scaled_weights * np.exp(log_ratio(rule.nodes, rule.anchor_node, alpha))
    assert np.allclose(rebuilt, rule.weights, rtol=1e-13, atol=0)


def test_reference_cost_guard():
    with pytest.raises(NotComputable):
        reference_rule_highprec(FamilySpec(Family.HERMITE, 20001))


def test_error_metrics_identities():
    spec = FamilySpec(Family.HERMITE, 100)
    weights = np.linspace(1.0, 2.0, 100)
    reference = QuadratureRule(spec=spec, nodes=np.arange(100.0), weights=weights)

    same = error_metrics(reference, reference)
    assert (same.eps_mr, same.eps_ar, same.eps_rt, same.second_max_rel) == (0.0, 0.0, 0.0, 0.0)

    perturbed = weights.copy()
    perturbed[40] *= 1.0 + 1e-10
    one_off = error_metrics(QuadratureRule(spec=spec, nodes=np.arange(100.0), weights=perturbed), reference)
    assert one_off.eps_mr == pytest.approx(1e-10, rel=1e-4)
    assert one_off.eps_ar == pytest.approx(1e-12, rel=1e-4)
    assert one_off.second_max_rel == 0.0

    uniform = error_metrics(QuadratureRule(spec=spec, nodes=np.arange(100.0), weights=weights * (1 + 1e-9)),
                            reference)
    assert uniform.eps_rt == pytest.approx(1e-9, rel=1e-4)


def test_error_metrics_on_a_subsample():
    spec = FamilySpec(Family.HERMITE, 10)
    full = QuadratureRule(spec=spec, nodes=np.arange(10.0), weights=np.ones(10))
    part = QuadratureRule(spec=spec, nodes=np.arange(3.0, 6.0), weights=np.ones(3), indices=np.array([4, 5, 6]))
    assert error_metrics(part, full).compared == 3


def test_error_metrics_rejects_bad_input():
    a = QuadratureRule(spec=FamilySpec(Family.HERMITE, 3), nodes=np.zeros(3), weights=np.ones(3))
    b = QuadratureRule(spec=FamilySpec(Family.HERMITE, 4), nodes=np.zeros(4), weights=np.ones(4))
    with pytest.raises(LengthMismatch):
        error_metrics(a, b)
    with pytest.raises(ValueError):
        error_metrics(a, a, "moments")


def main():
    """Run all oracle tests"""
    print("🧪 Testing Extended-Precision References")
    print("=" * 50)
    tests = [
        test_error_free_transforms,
        test_double_double_arithmetic,
        test_mu0_extended,
        test_recurrence_coefficients,
        test_golub_welsch_small_rules,
        test_newton_reference_matches_numpy,
        test_reference_small_rules,
        test_references_agree,
        test_iterative_laguerre_against_reference,
        test_reference_scaled_weights,
        test_reference_scaled_weights_past_underflow,
        test_reference_scaled_laguerre,
        test_reference_cost_guard,
        test_error_metrics_identities,
        test_error_metrics_on_a_subsample,
        test_error_metrics_rejects_bad_input,
    ]
    for test in tests:
        test()
        print(f"✅ {test.__name__}")


if __name__ == "__main__":
    main()
