"""
Gauss-Laguerre rules

The iterative backend sweeps the zeros of the normal form in z = √x with
scaled weights and optional subsampling; the asymptotic backend uses a
Bessel-type expansion for the lower 80% of the nodes and an Airy-type one for
the rest. n <= 5 goes to Golub-Welsch.
"""
from typing import Optional, Tuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from functools import lru_cache
import math
import logging

import numpy as np
from scipy.optimize import brentq

from . import series, specfun
from .config import get_settings
from .core import (
    Backend,
    ComputeOptions,
    FamilySpec,
    Method,
    Normalization,
    QuadratureRule,
    RegionDecision,
    WeightRatioStop,
    assemble_rule,
    log_gamma_ratio,
    log_mu0,
)
from .errors import NotComputable
from .fpsolver import TaylorOde, TaylorProblem, run_sweeps
from .recurrence import check_consecutive_zeros, golub_welsch_rule, laguerre_value, monic_coefficients, sturm_count

logger = logging.getLogger(__name__)

EPS = np.finfo(float).eps
GOLUB_WELSCH_MAX_N = 5
ASYMPTOTIC_MIN_N = 80
ASYMPTOTIC_MAX_ALPHA = 5.0
BESSEL_FRACTION = 0.8
BESSEL_TERMS = 4
BESSEL_DEGREE = 200
AIRY_TERMS = 4
AIRY_DEGREE = 80
PHASE_PER_STEP = 2.5


def log_ratio(x: np.ndarray, anchor: float, alpha: float) -> np.ndarray:
    """log of x^(α+1/2) e^(-x) relative to its value at the anchor node"""
    x = np.asarray(x, dtype=float)
    return anchor - x + (alpha + 0.5) * np.log(x / anchor)


def _ratio(alpha: float):
    return lambda x, anchor: log_ratio(x, anchor, alpha)


class LaguerreOde(TaylorOde):
    """z² ÿ + (ν z² - z⁴ + c) y = 0, the normal form multiplied by z²"""

    def __init__(self, nu: float, c: float):
        self.nu = nu
        self.c = c

    def coefficients(self, point: float, value: float, derivative: float, degree: int) -> np.ndarray:
        z0, nu = point, self.nu
        z2 = z0 * z0
        e = (nu * z2 - z2 * z2 + self.c, 2.0 * nu * z0 - 4.0 * z2 * z0, nu - 6.0 * z2, -4.0 * z0, -1.0)
        y = np.zeros(degree + 1)
        y[0], y[1] = value, derivative
        for k in range(degree - 1):
            acc = 2.0 * z0 * (k + 1.0) * k * y[k + 1] + (k * (k - 1.0) + e[0]) * y[k]
            for j in range(1, min(k, 4) + 1):
                acc += e[j] * y[k - j]
            y[k + 2] = -acc / (z2 * (k + 2.0) * (k + 1.0))
        return y

    def max_step(self, point: float) -> float:
        natural = 0.5 * point
        omega = self.nu - point * point + self.c / (point * point)
        if omega > 0:
            return min(natural, PHASE_PER_STEP / math.sqrt(omega))
        return natural


class LaguerreProblem(TaylorProblem):
    """Normal form of y(z) = z^(α+1/2) e^(-z²/2) L_n^(α)(z²): ÿ + (ν - z² + (1/4-α²)/z²) y = 0"""

    def __init__(self, n: int, alpha: float, start: float, direction: int, state):
        self.n, self.alpha = n, alpha
        self.nu = 4.0 * n + 2.0 * alpha + 2.0
        self.c = 0.25 - alpha * alpha
        self.sweep_start = start
        self.sweep_direction = direction
        self.start_state = state
        self.turning_points = self._turning_points()
        self.ode = LaguerreOde(self.nu, self.c)

    def omega(self, z: float) -> float:
        return self.nu - z * z + self.c / (z * z)

    def _turning_points(self) -> Tuple[float, float]:
        root = math.sqrt(self.nu * self.nu + 4.0 * self.c)
        upper = math.sqrt(0.5 * (self.nu + root))
        lower_sq = -2.0 * self.c / (self.nu + root)
        return (math.sqrt(lower_sq) if lower_sq > 0 else 0.0), upper

    def normal_form(self, z: float, state) -> Tuple[float, float]:
        return state[0], state[1]


def _start_state(n: int, alpha: float, z: float) -> Tuple[float, Tuple[float, float, float]]:
    """Normal-form state at z from the recurrence, moved off an exact zero of L_n"""
    x = z * z
    value, slope, log_scale = laguerre_value(n, alpha, x)
    if value == 0.0:
        x = math.nextafter(x, math.inf)
        z = math.sqrt(x)
        value, slope, log_scale = laguerre_value(n, alpha, x)
    ydot = ((alpha + 0.5) / z - z) * value + 2.0 * z * slope
    return z, (value, ydot, log_scale + (alpha + 0.5) * math.log(z) - 0.5 * x)


def _smallest_zero(n: int, alpha: float, upper: float, constant: float) -> Tuple[float, float]:
    """
    The zero of L_n below the lower turning point, by bracketing on (0, upper)

    Returns:
        (node, absolute log weight)
    """
    x = brentq(lambda t: laguerre_value(n, alpha, t)[0], 0.0, upper, xtol=1e-300, rtol=4.0 * EPS)
    value, slope, log_scale = laguerre_value(n, alpha, x)
    if slope != 0.0:
        x = x - value / slope
        value, slope, log_scale = laguerre_value(n, alpha, x)
    return x, constant - math.log(4.0) - math.log(x) - 2.0 * (math.log(abs(slope)) + log_scale)


def laguerre_iterative_rule(spec: FamilySpec, opts: Optional[ComputeOptions] = None) -> QuadratureRule:
    """
    Zeros of L_n^(α) from fixed-point sweeps in z = √x

    For |α| > 1/2 the sweeps start at x_e = √(α²-1/4), the maximum of the
    normal-form coefficient, and run in both directions; otherwise a single
    ascending sweep starts below the smallest zero. Either way nodes come out
    in order of decreasing weight, so subsampling ends a sweep early.
    """
    opts = opts or ComputeOptions()
    spec.validate()
    n, alpha = spec.n, spec.alpha
    if n == 1:
        return assemble_rule(spec, opts, np.array([alpha + 1.0]), np.array([log_mu0(spec)]),
                             Backend.ITERATIVE, log_ratio=_ratio(alpha))

    nu = 4.0 * n + 2.0 * alpha + 2.0
    constant = math.log(4.0) + log_gamma_ratio(n, alpha + 1.0, 1.0)
    threshold = opts.subsample_log_threshold

    def log_weight(z: float, state) -> float:
        x = z * z
        return constant + (alpha + 0.5) * math.log(x) - x - 2.0 * (math.log(abs(state[1])) + state[2])

    def stop() -> Optional[WeightRatioStop]:
        return WeightRatioStop(threshold, log_weight) if threshold is not None else None

    extra_nodes, extra_w, extra_idx = [], [], []
    if abs(alpha) <= 0.5:
        z0, state = _start_state(n, alpha, 1.0 / math.sqrt(nu))
        predicate = stop()
        (sweep,) = run_sweeps([(LaguerreProblem(n, alpha, z0, 1, state), n, predicate)])
        if len(sweep) != n and not (predicate and predicate.triggered):
            raise NotComputable(f"ascending sweep found {len(sweep)} zeros, expected {n}")
        z = np.array(sweep.zeros)
        states = sweep.states
        indices = np.arange(1, len(z) + 1)
    else:
        x_e = math.sqrt(alpha * alpha - 0.25)
        z_e, state = _start_state(n, alpha, math.sqrt(x_e))
        a, b = monic_coefficients(spec, n)
        left = sturm_count(a, b, z_e * z_e)
        right = n - left
        right_stop, left_stop = stop(), stop()

        # Step 1: both directional sweeps from the maximum of A(z)
        right_sweep, left_sweep = run_sweeps([
            (LaguerreProblem(n, alpha, z_e, 1, state), right, right_stop),
            (LaguerreProblem(n, alpha, z_e, -1, state), left, left_stop),
        ], get_settings().threads)
        if len(right_sweep) != right and not (right_stop and right_stop.triggered):
            raise NotComputable(f"right sweep found {len(right_sweep)} zeros, expected {right}")

        # Step 2: for α < -1/2 the smallest zero may sit below the lower turning point
        missing = left - len(left_sweep)
        if missing and not (left_stop and left_stop.triggered):
            if missing > 1 or alpha >= -0.5:
                raise NotComputable(f"left sweep found {len(left_sweep)} zeros, expected {left}")
            # below half the next zero there is no other zero of L_n
            upper = 0.5 * left_sweep.zeros[-1] ** 2 if len(left_sweep) else z_e * z_e
            x_min, w_min = _smallest_zero(n, alpha, upper, constant)
            logger.debug(f"Smallest Laguerre zero {x_min} recovered by bracketing")
            extra_nodes, extra_w, extra_idx = [x_min], [w_min], [1]

        z = np.array(left_sweep.zeros[::-1] + right_sweep.zeros)
        states = left_sweep.states[::-1] + right_sweep.states
        first = left - len(left_sweep) + 1
        indices = np.arange(first, first + len(z))

    nodes = z * z
    log_w = np.array([log_weight(zi, si) for zi, si in zip(z, states)])
    nodes = np.concatenate([extra_nodes, nodes])
    log_w = np.concatenate([extra_w, log_w])
    indices = np.concatenate([np.array(extra_idx, dtype=int), indices])
    first = int(indices.min()) if len(indices) else 1
    check_consecutive_zeros(spec, np.sort(nodes), 0.0 if first == 1 else None, first - 1)
    return assemble_rule(spec, opts, nodes, log_w, Backend.ITERATIVE,
                         indices=indices, log_ratio=_ratio(alpha))


# ---------------------------------------------------------------------------
# Asymptotic backend
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1)
def _bessel_map() -> np.ndarray:
    return series.bessel_map(BESSEL_DEGREE)


@lru_cache(maxsize=32)
def _bessel_expansion(alpha: float) -> series.UniformCoefficients:
    c = 0.25 - alpha * alpha
    psi = series.origin_potential(c, BESSEL_DEGREE)
    return series.bessel_type_coefficients(psi, c, BESSEL_TERMS, BESSEL_DEGREE)


@lru_cache(maxsize=32)
def _airy_expansion(alpha: float) -> series.UniformCoefficients:
    phi = series.turning_point_potential(0.25 - alpha * alpha, AIRY_DEGREE)
    return series.airy_type_coefficients(phi, AIRY_TERMS, AIRY_DEGREE)


def _bessel_part(n: int, alpha: float, count: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    The count smallest zeros in s = z/√ν with log |dy/ds| there

    W(ζ) = T'^(-1/2) y is matched to y near z = 0 through the behaviour of
    √ζ J_α(νζ), which fixes the constant K_B absolutely.
    """
    nu = 4.0 * n + 2.0 * alpha + 2.0
    coeffs = _bessel_expansion(alpha)
    zeta, wp = specfun.bessel_expansion_zeros(coeffs, alpha, nu, count)
    s, tprime = series.bessel_abscissa(zeta, _bessel_map())

    a0, b1 = coeffs.at_origin(nu)
    log_k = (alpha * math.log(2.0) + (0.25 - 0.5 * alpha) * math.log(nu)
             + log_gamma_ratio(n, alpha + 1.0, 1.0) - math.log(abs(a0 + (alpha + 0.5) * b1)))
    return s, log_k - 0.5 * np.log(tprime) + np.log(np.abs(wp))


def laguerre_asymptotic_rule(spec: FamilySpec, opts: Optional[ComputeOptions] = None) -> QuadratureRule:
    """
    Nodes and weights from asymptotic expansions

    The lower 80% of the nodes come from the Bessel-type expansion, the top
    20% from the Airy-type one, whose constant is matched to the Bessel-type
    derivative at the boundary node.
    """
    opts = opts or ComputeOptions()
    spec.validate()
    n, alpha = spec.n, spec.alpha
    if n <= ASYMPTOTIC_MIN_N:
        raise NotComputable(f"asymptotic Laguerre needs n > {ASYMPTOTIC_MIN_N}, got {n}")
    if alpha > ASYMPTOTIC_MAX_ALPHA:
        raise NotComputable(f"asymptotic Laguerre needs alpha <= {ASYMPTOTIC_MAX_ALPHA}, got {alpha}")

    nu = 4.0 * n + 2.0 * alpha + 2.0
    bessel_count = int(BESSEL_FRACTION * n)
    airy_count = n - bessel_count
    airy_coeffs = _airy_expansion(alpha)

    workers = max(1, min(2, get_settings().threads))
    with ThreadPoolExecutor(max_workers=workers) as executor:
        lower = executor.submit(_bessel_part, n, alpha, bessel_count)
        upper = executor.submit(specfun.airy_expansion_zeros, airy_coeffs, nu, np.arange(1, airy_count + 1))
        s_b, slope_b = lower.result()
        zeta_a, wp_a = upper.result()

    s_a, tprime_a = series.airy_abscissa(zeta_a)
    log_k = specfun.airy_expansion_scale(airy_coeffs, nu, airy_count + 1, float(s_b[-1]), float(slope_b[-1]))
    slope_a = log_k - 0.5 * np.log(tprime_a) + np.log(np.abs(wp_a))

    s = np.concatenate([s_b, s_a])
    # dy/dz = (dy/ds)/√ν
    log_dy = np.concatenate([slope_b, slope_a]) - 0.5 * math.log(nu)
    nodes = nu * s * s
    log_w = (math.log(4.0) + log_gamma_ratio(n, alpha + 1.0, 1.0) + (alpha + 0.5) * np.log(nodes)
             - nodes - 2.0 * log_dy)
    return assemble_rule(spec, opts, nodes, log_w, Backend.ASYMPTOTIC, log_ratio=_ratio(alpha))


# ---------------------------------------------------------------------------
# Selection and dispatch
# ---------------------------------------------------------------------------

def select_laguerre_method(spec: FamilySpec) -> RegionDecision:
    """Backend for a Laguerre spec under the automatic method"""
    n, alpha = spec.n, spec.alpha
    if n <= GOLUB_WELSCH_MAX_N:
        return RegionDecision(Backend.GOLUB_WELSCH, f"n = {n} <= {GOLUB_WELSCH_MAX_N}")
    if 80 < n <= 275 and alpha <= (n - 1380) / 1300.0:
        return RegionDecision(Backend.ASYMPTOTIC, f"80 < n <= 275 and alpha <= (n-1380)/1300 = {(n - 1380) / 1300.0:g}")
    if 275 < n <= 400 and alpha <= 1.5:
        return RegionDecision(Backend.ASYMPTOTIC, "275 < n <= 400 and alpha <= 1.5")
    if n > 400 and alpha <= ASYMPTOTIC_MAX_ALPHA:
        return RegionDecision(Backend.ASYMPTOTIC, f"n > 400 and alpha <= {ASYMPTOTIC_MAX_ALPHA:g}")
    return RegionDecision(Backend.ITERATIVE, f"(n, alpha) = ({n}, {alpha:g}) outside the asymptotic region")


def decide_laguerre(spec: FamilySpec, opts: ComputeOptions) -> RegionDecision:
    """Selector result with the method override applied"""
    override = opts.method_override
    if override is Method.ITERATIVE:
        return RegionDecision(Backend.ITERATIVE, "method override")
    if override is Method.ASYMPTOTIC:
        return RegionDecision(Backend.ASYMPTOTIC, "method override")
    if override is Method.GOLUB_WELSCH:
        return RegionDecision(Backend.GOLUB_WELSCH, "method override")
    return select_laguerre_method(spec)


def gauss_laguerre(spec: FamilySpec, opts: Optional[ComputeOptions] = None) -> QuadratureRule:
    """Gauss-Laguerre rule through the selected (or overridden) backend"""
    opts = opts or ComputeOptions()
    spec.validate()
    decision = decide_laguerre(spec, opts)
    logger.debug(f"Laguerre n={spec.n} alpha={spec.alpha}: {decision.backend.value} ({decision.reason})")

    if decision.backend is Backend.ASYMPTOTIC:
        return laguerre_asymptotic_rule(spec, opts)
    if decision.backend is Backend.ITERATIVE:
        return laguerre_iterative_rule(spec, opts)

    # Golub-Welsch weights carry no scaled form of their own
    unit = golub_welsch_rule(spec, replace(opts, normalization=Normalization.UNIT))
    with np.errstate(divide="ignore"):
        log_w = np.log(unit.weights)
    return assemble_rule(spec, opts, unit.nodes, log_w, Backend.GOLUB_WELSCH, log_ratio=_ratio(spec.alpha))
