#!/usr/bin/env python3
"""
Test the fixed-point sweep and the Taylor continuation on problems with known zeros
"""

import logging
import math

import numpy as np
import pytest
from scipy import special

from services.quadrature.errors import NaNInput, NonOscillatory, StalledIteration
from services.quadrature.fpsolver import (
    OscillatorProblem,
    TaylorOde,
    arctan_branch,
    fixed_point_step,
    run_sweeps,
    sweep_zeros,
    taylor_advance,
)
from services.quadrature.hermite import HermiteProblem

# Configure logging
logging.basicConfig(level=logging.INFO)


class ConstantProblem(OscillatorProblem):
    """Y'' + k² Y = 0 carried exactly by rotation of (Y, Y'/k)"""

    def __init__(self, k: float, start: float, state, direction: int = 1):
        self.k = k
        self.sweep_start = start
        self.sweep_direction = direction
        self.start_state = state

    def omega(self, z):
        return self.k * self.k

    def evaluate(self, z_from, state, z_to):
        y, dy = state
        h = self.k * (z_to - z_from)
        return (y * math.cos(h) + dy / self.k * math.sin(h),
                dy * math.cos(h) - self.k * y * math.sin(h))

    def normal_form(self, z, state):
        return state


class AiryProblem(OscillatorProblem):
    """Y = Ai(-z), which solves Y'' + z Y = 0; the state is evaluated afresh at every point"""

    turning_points = (0.0, math.inf)

    def __init__(self, start: float, direction: int = -1):
        self.sweep_start = start
        self.sweep_direction = direction
        self.start_state = self.evaluate(start, None, start)

    def omega(self, z):
        return z

    def evaluate(self, z_from, state, z_to):
        ai, aip, _, _ = special.airy(-z_to)
        return float(ai), -float(aip)

    def normal_form(self, z, state):
        return state


class MisreportedProblem(ConstantProblem):
    """sin carried exactly while Ω claims a much slower oscillation"""

    def omega(self, z):
        return 0.16


class HarmonicOde(TaylorOde):
    """y'' + y = 0"""

    def coefficients(self, point, value, derivative, degree):
        c = np.zeros(degree + 1)
        c[0], c[1] = value, derivative
        for k in range(degree - 1):
            c[k + 2] = -c[k] / ((k + 2) * (k + 1))
        return c


class HermiteFourOde(TaylorOde):
    """y'' + (9 - x²) y = 0, the normal form for n = 4"""

    def coefficients(self, point, value, derivative, degree):
        # expand (9 - (p + t)²) = (9 - p²) - 2p t - t²
        q = [9.0 - point * point, -2.0 * point, -1.0]
        c = np.zeros(degree + 1)
        c[0], c[1] = value, derivative
        for k in range(degree - 1):
            acc = 0.0
            for i, qi in enumerate(q):
                if k - i >= 0:
                    acc += qi * c[k - i]
            c[k + 2] = -acc / ((k + 2) * (k + 1))
        return c


def test_arctan_branch():
    """Branch values at the edges of each range"""
    assert arctan_branch(math.inf, 1) == pytest.approx(math.pi / 2)
    assert arctan_branch(1.0, 1) == pytest.approx(math.pi / 4)
    assert arctan_branch(1.0, -1) == pytest.approx(math.pi / 4 - math.pi)
    assert arctan_branch(0.0, 1) == pytest.approx(math.pi)
    assert arctan_branch(-1.0, 1) == pytest.approx(3 * math.pi / 4)
    with pytest.raises(NaNInput):
        arctan_branch(math.nan, 1)


def test_fixed_point_step_is_exact_for_constant_omega():
    """One step lands on the zero when Ω does not vary"""
    unit = ConstantProblem(1.0, 0.0, None)
    z = 2.5
    assert fixed_point_step(unit, z, 1, math.sin(z), math.cos(z)) == pytest.approx(math.pi, abs=1e-15)

    fast = ConstantProblem(2.0, 0.0, None)
    z = 1.2
    assert fixed_point_step(fast, z, 1, math.sin(2 * z), 2 * math.cos(2 * z)) == pytest.approx(math.pi / 2, abs=1e-15)


def test_fixed_point_step_rejects_non_oscillatory_region():
    class Turning(ConstantProblem):
        def omega(self, z):
            return 1.0 - z

    with pytest.raises(NonOscillatory):
        fixed_point_step(Turning(1.0, 0.0, None), 2.0, 1, 0.5, 1.0)


def test_sweep_constant_coefficient():
    """Consecutive zeros of sin from z = 0.1"""
    problem = ConstantProblem(1.0, 0.1, (math.sin(0.1), math.cos(0.1)))
    result = sweep_zeros(problem, 3)
    print(f"Zeros: {result.zeros}")

    assert len(result) == 3
    assert np.allclose(result.zeros, [math.pi, 2 * math.pi, 3 * math.pi], rtol=0, atol=1e-14)
    # derivative alternates sign from one zero to the next
    signs = np.sign(result.derivatives)
    assert np.all(signs[1:] == -signs[:-1])


def test_sweep_downwards():
    problem = ConstantProblem(1.0, 3.0, (math.sin(3.0), math.cos(3.0)), direction=-1)
    result = sweep_zeros(problem, 2)
    assert np.allclose(result.zeros, [0.0, -math.pi], rtol=0, atol=1e-14)


def test_stop_predicate_keeps_the_zero_that_fires():
    problem = ConstantProblem(1.0, 0.1, (math.sin(0.1), math.cos(0.1)))
    result = sweep_zeros(problem, 10, lambda index, zero, state: True)
    assert len(result) == 1
    assert result.zeros[0] == pytest.approx(math.pi, abs=1e-14)


def test_hermite_sweep_matches_numpy():
    """Positive zeros of H_6 from the parity data at 0"""
    result = sweep_zeros(HermiteProblem(6, (1.0, 0.0, 0.0)), 3)
    reference, _ = np.polynomial.hermite.hermgauss(6)
    assert np.allclose(result.zeros, reference[3:], rtol=1e-14, atol=0)
    assert max(result.iterations_per_zero) <= 8


def test_airy_fixed_point_iteration():
    """T_j from z = 2.6 toward smaller z settles on the first Airy zero in four steps"""
    problem = AiryProblem(2.6)
    z = 2.6
    for _ in range(4):
        y, dy = problem.evaluate(z, None, z)
        z = fixed_point_step(problem, z, -1, y, dy)
    assert z == pytest.approx(2.338107410459767, rel=1e-15)


def test_airy_sweep_finds_the_first_zero():
    result = sweep_zeros(AiryProblem(2.6), 1)
    assert len(result) == 1
    assert result.zeros[0] == pytest.approx(2.338107410459767, rel=1e-15)
    assert result.iterations_per_zero[0] <= 5


def test_hermite_sweep_finds_every_positive_zero():
    """Parity start at 0 for even and odd n"""
    for n in range(2, 41):
        state = (0.0, 1.0, 0.0) if n % 2 else (1.0, 0.0, 0.0)
        result = sweep_zeros(HermiteProblem(n, state), n // 2)
        reference, _ = np.polynomial.hermite.hermgauss(n)
        positive = reference[reference > 1e-12]
        assert len(result) == n // 2, f"n={n}"
        assert np.allclose(result.zeros, positive, rtol=1e-13, atol=0), f"n={n}"


def test_sweep_rejects_a_stepped_over_zero():
    """With Ω too small the first step jumps two zeros ahead"""
    problem = MisreportedProblem(1.0, 0.1, (math.sin(0.1), math.cos(0.1)))
    with pytest.raises(StalledIteration):
        sweep_zeros(problem, 3)


def test_run_sweeps_in_parallel_matches_sequential():
    jobs = [
        (ConstantProblem(1.0, 0.1, (math.sin(0.1), math.cos(0.1))), 4, None),
        (ConstantProblem(2.0, 0.1, (math.sin(0.2), 2 * math.cos(0.2))), 4, None),
    ]
    sequential = run_sweeps(jobs, workers=1)
    parallel = run_sweeps(jobs, workers=2)
    for a, b in zip(sequential, parallel):
        assert a.zeros == b.zeros


def test_taylor_advance_harmonic():
    value, derivative = taylor_advance(HarmonicOde(), 0.0, 0.0, 1.0, 1.0)
    assert value == pytest.approx(math.sin(1.0), abs=1e-15)
    assert derivative == pytest.approx(math.cos(1.0), abs=1e-15)


def test_taylor_advance_zero_step():
    assert taylor_advance(HarmonicOde(), 0.3, 0.7, -0.2, 0.3) == (0.7, -0.2)


def test_taylor_advance_hermite_four():
    """e^(-x²/2) H_4(x) from its parity data at 0"""
    h4 = lambda x: 16 * x ** 4 - 48 * x ** 2 + 12
    value, _ = taylor_advance(HermiteFourOde(), 0.0, h4(0.0), 0.0, 0.5)
    expected = math.exp(-0.125) * h4(0.5)
    assert value == pytest.approx(expected, rel=1e-14)


def main():
    """Run all fixed-point solver tests"""
    print("🧪 Testing Fixed-Point Sweep")
    print("=" * 50)
    tests = [
        test_arctan_branch,
        test_fixed_point_step_is_exact_for_constant_omega,
        test_fixed_point_step_rejects_non_oscillatory_region,
        test_sweep_constant_coefficient,
        test_sweep_downwards,
        test_stop_predicate_keeps_the_zero_that_fires,
        test_hermite_sweep_matches_numpy,
        test_airy_fixed_point_iteration,
        test_airy_sweep_finds_the_first_zero,
        test_hermite_sweep_finds_every_positive_zero,
        test_sweep_rejects_a_stepped_over_zero,
        test_run_sweeps_in_parallel_matches_sequential,
        test_taylor_advance_harmonic,
        test_taylor_advance_zero_step,
        test_taylor_advance_hermite_four,
    ]
    for test in tests:
        test()
        print(f"✅ {test.__name__}")


if __name__ == "__main__":
    main()
