"""
Gauss-Jacobi rules

Backends: Chebyshev closed forms, the Legendre hybrid (see legendre), the
iterative sweep over the normal form in z = atanh x with angular refinement
of extreme nodes, and the asymptotic backend (elementary expansion in the
bulk, Bessel-type expansions towards both endpoints).
"""
from typing import Callable, List, Optional, Tuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
import math
import logging

import numpy as np
from scipy import special

from . import series, specfun
from .config import get_settings
from .core import (
    Backend,
    ComputeOptions,
    Family,
    FamilySpec,
    Method,
    Normalization,
    QuadratureRule,
    RegionDecision,
    assemble_rule,
    log_gamma_ratio,
    mu0,
    subsample_rule,
)
from .errors import InvalidParameter, NotComputable, QuadratureError
from .fpsolver import TaylorOde, TaylorProblem, run_sweeps, sweep_zeros
from .legendre import legendre_rule
from .recurrence import check_consecutive_zeros, golub_welsch_rule, jacobi_value, monic_coefficients, sturm_count

logger = logging.getLogger(__name__)

EPS = np.finfo(float).eps
ITERATIVE_MAX_PARAMETER = 1000.0
ASYMPTOTIC_MIN_N = 20
ASYMPTOTIC_PARAMETER_LIMIT = 2400.0
ASYMPTOTIC_SWITCH_N = 250
ELEMENTARY_FRACTION = 0.1
BESSEL_TERMS = 5
BESSEL_DEGREE = 120
HAHN_MAX_TERMS = 20
NEWTON_STEPS = 10
PHASE_PER_STEP = 2.5


@dataclass
class ThetaRepresentation:
    """Nodes as angles x = cos θ with the derivative of the angular normal form at each"""
    theta: np.ndarray
    ydot: np.ndarray
    kappa: float


def _log_one_minus_x(z):
    return math.log(2.0) - np.logaddexp(0.0, 2.0 * np.asarray(z))


def _log_one_plus_x(z):
    return math.log(2.0) - np.logaddexp(0.0, -2.0 * np.asarray(z))


class JacobiOde(TaylorOde):
    """(1-x²) y'' + (β-α-(α+β+2)x) y' + n(n+α+β+1) y = 0, reached through z = atanh x or θ = arccos x"""

    def __init__(self, n: int, alpha: float, beta: float, angular: bool,
                 omega: Callable[[float], float]):
        self.n = n
        self.alpha = alpha
        self.beta = beta
        self.angular = angular
        self.omega = omega

    def _local(self, point: float) -> Tuple[float, float, float, float]:
        """x, 1-x, 1+x and dx/d(point)"""
        if self.angular:
            s, c = math.sin(0.5 * point), math.cos(0.5 * point)
            return math.cos(point), 2.0 * s * s, 2.0 * c * c, -math.sin(point)
        omx = 2.0 * float(special.expit(-2.0 * point))
        opx = 2.0 * float(special.expit(2.0 * point))
        return math.tanh(point), omx, opx, omx * opx

    def step(self, point: float, target: float) -> float:
        if self.angular:
            return -2.0 * math.sin(0.5 * (point + target)) * math.sin(0.5 * (target - point))
        return math.sinh(target - point) / (math.cosh(point) * math.cosh(target))

    def coefficients(self, point: float, value: float, derivative: float, degree: int) -> np.ndarray:
        x0, omx, opx, _ = self._local(point)
        one_minus_x2 = omx * opx
        n, a, b = self.n, self.alpha, self.beta
        b0 = b - a - (a + b + 2.0) * x0
        c = np.zeros(degree + 1)
        c[0], c[1] = value, derivative
        for k in range(degree - 1):
            c[k + 2] = -((k + 1.0) * (b0 - 2.0 * x0 * k) * c[k + 1]
                         + (n - k) * (n + k + a + b + 1.0) * c[k]) / (one_minus_x2 * (k + 1.0) * (k + 2.0))
        return c

    def max_step(self, point: float) -> float:
        _, omx, opx, slope = self._local(point)
        natural = 0.25 * min(omx, opx) / max(abs(slope), 1e-300)
        omega = self.omega(point)
        if omega > 0:
            return min(natural, PHASE_PER_STEP / math.sqrt(omega))
        return natural


class JacobiProblem(TaylorProblem):
    """Normal form of (1-x)^(α/2)(1+x)^(β/2) P_n(x) in z = atanh x"""

    def __init__(self, n: int, alpha: float, beta: float, start: float, direction: int, state):
        self.n, self.alpha, self.beta = n, alpha, beta
        kappa = n + 0.5 * (alpha + beta + 1.0)
        self.k2 = kappa * kappa - 0.25
        self.sweep_start = start
        self.sweep_direction = direction
        self.start_state = state
        self.turning_points = self._turning_points()
        self.ode = JacobiOde(n, alpha, beta, angular=False, omega=self.omega)

    def omega(self, z: float) -> float:
        x, _, _, sech2 = self.ode._local(z)
        a2, b2 = self.alpha ** 2, self.beta ** 2
        return self.k2 * sech2 - 0.5 * (a2 + b2) + 0.5 * (b2 - a2) * x

    def _turning_points(self) -> Tuple[float, float]:
        a2, b2 = self.alpha ** 2, self.beta ** 2
        # Ω as a quadratic in x: -k2 x² + t x + (k2 - (a2+b2)/2)
        t = 0.5 * (b2 - a2)
        c0 = self.k2 - 0.5 * (a2 + b2)
        disc = math.sqrt(max(t * t + 4.0 * self.k2 * c0, 0.0))
        ends = []
        for root in ((t - disc) / (2.0 * self.k2), (t + disc) / (2.0 * self.k2)):
            ends.append(math.atanh(root) if abs(root) < 1.0 else math.copysign(math.inf, root))
        return ends[0], ends[1]

    def normal_form(self, z: float, state) -> Tuple[float, float]:
        p, dp, _ = state
        _, omx, opx, sech2 = self.ode._local(z)
        return p, sech2 * dp + p * (-0.5 * self.alpha * opx + 0.5 * self.beta * omx)


class JacobiAngularProblem(TaylorProblem):
    """Normal form of sin^(α+1/2)(θ/2) cos^(β+1/2)(θ/2) P_n(cos θ) in θ"""

    def __init__(self, n: int, alpha: float, beta: float, start: float, direction: int, state):
        self.n, self.alpha, self.beta = n, alpha, beta
        self.rho2 = (n + 0.5 * (alpha + beta + 1.0)) ** 2
        self.sweep_start = start
        self.sweep_direction = direction
        self.start_state = state
        self.start_at_zero = True
        self.turning_points = (0.0, math.pi)
        self.ode = JacobiOde(n, alpha, beta, angular=True, omega=self.omega)

    def omega(self, theta: float) -> float:
        s, c = math.sin(0.5 * theta), math.cos(0.5 * theta)
        return (self.rho2 + (0.25 - self.alpha ** 2) / (4.0 * s * s)
                + (0.25 - self.beta ** 2) / (4.0 * c * c))

    def normal_form(self, theta: float, state) -> Tuple[float, float]:
        p, dp, _ = state
        half = 0.5 * theta
        drift = 0.5 * (self.alpha + 0.5) / math.tan(half) - 0.5 * (self.beta + 0.5) * math.tan(half)
        return p, p * drift - math.sin(theta) * dp


# ---------------------------------------------------------------------------
# Chebyshev
# ---------------------------------------------------------------------------

def chebyshev_rule(n: int, alpha: float, beta: float,
                   normalization: Normalization = Normalization.NATURAL) -> QuadratureRule:
    """
    Closed-form rule for |α| = |β| = 1/2

    Central nodes use the sine form and the factors 1 ± x come from half-angle
    identities, so the nodes closest to 0 keep full relative accuracy.
    """
    if abs(alpha) != 0.5 or abs(beta) != 0.5:
        raise InvalidParameter(f"Chebyshev rules need |alpha| = |beta| = 1/2, got ({alpha}, {beta})")
    spec = FamilySpec(Family.JACOBI, n, alpha, beta).validate()
    kappa = n + 0.5 * (alpha + beta + 1.0)
    k = np.arange(1, n + 1, dtype=float)

    theta = (n - k + 0.5 * alpha + 0.75) * math.pi / kappa
    shifted = n / 2.0 - k + (alpha - beta + 2.0) / 4.0
    nodes = np.where(np.abs(shifted) < kappa / 4.0, -np.sin(shifted * math.pi / kappa), np.cos(theta))

    one_minus = 2.0 * np.sin(0.5 * theta) ** 2
    one_plus = 2.0 * np.cos(0.5 * theta) ** 2
    weights = (math.pi / kappa) * one_minus ** (alpha + 0.5) * one_plus ** (beta + 0.5)

    if alpha == beta:
        nodes, weights = _mirror(nodes, weights)
    if normalization is Normalization.UNIT:
        weights = weights / mu0(spec)
    return QuadratureRule(spec=spec, nodes=nodes, weights=weights,
                          normalization=normalization, backend=Backend.CLOSED_FORM)


def _mirror(nodes: np.ndarray, weights: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Rebuild the lower half from the upper one"""
    n = len(nodes)
    half = n // 2
    nodes = nodes.copy()
    weights = weights.copy()
    nodes[:half] = -nodes[n - half:][::-1]
    weights[:half] = weights[n - half:][::-1]
    if n % 2:
        nodes[half] = 0.0
    return nodes, weights


# ---------------------------------------------------------------------------
# Iterative backend
# ---------------------------------------------------------------------------

def _theta_from_z(z: float, near_right: bool) -> float:
    """arccos(tanh z) without cancellation at the nearby endpoint"""
    if near_right:
        return 2.0 * math.asin(math.sqrt(special.expit(-2.0 * z)))
    return math.pi - 2.0 * math.asin(math.sqrt(special.expit(2.0 * z)))


def _refine_endpoint(n: int, alpha: float, beta: float, z_start: float, state, right: bool):
    """
    Recompute the node next to an endpoint in the angular variable

    Args:
        z_start: The neighbouring node in z, where the state is known
        right: True for the node closest to +1

    Returns:
        (x, log weight without the common constant) or None when the angular sweep fails
    """
    theta0 = _theta_from_z(z_start, near_right=right)
    problem = JacobiAngularProblem(n, alpha, beta, theta0, -1 if right else 1, state)
    try:
        result = sweep_zeros(problem, 1)
    except QuadratureError as e:
        logger.warning(f"Angular refinement failed, keeping the z-sweep node: {e}")
        return None
    if not len(result):
        return None
    theta = result.zeros[0]
    _, dp, log_scale = result.states[0]
    s, c = math.sin(0.5 * theta), math.cos(0.5 * theta)
    log_w = -math.log(2.0 * s * s) - math.log(2.0 * c * c) - 2.0 * (math.log(abs(dp)) + log_scale)
    return math.cos(theta), log_w


def _sweep_log_weights(z: np.ndarray, states: List) -> np.ndarray:
    dp = np.array([abs(s[1]) for s in states])
    scale = np.array([s[2] for s in states])
    return -_log_one_minus_x(z) - _log_one_plus_x(z) - 2.0 * (np.log(dp) + scale)


def jacobi_iterative_rule(spec: FamilySpec, opts: Optional[ComputeOptions] = None) -> QuadratureRule:
    """
    Zeros of P_n^(α,β) from fixed-point sweeps in z = atanh x

    The sweeps start at the maximum of the normal-form coefficient and run
    towards both endpoints; a Sturm count fixes how many zeros each collects.
    When α < -1/2 (β < -1/2) the node next to +1 (-1) is recomputed in θ = arccos x.
    """
    opts = opts or ComputeOptions()
    spec.validate()
    n, alpha, beta = spec.n, spec.alpha, spec.beta
    if max(alpha, beta) > ITERATIVE_MAX_PARAMETER:
        raise NotComputable(f"iterative Jacobi is limited to parameters <= {ITERATIVE_MAX_PARAMETER}")

    if n == 1:
        nodes = np.array([(beta - alpha) / (alpha + beta + 2.0)])
        return assemble_rule(spec, opts, nodes, np.zeros(1), Backend.ITERATIVE)

    if alpha == beta:
        return _symmetric_iterative(spec, opts)

    kappa = n + 0.5 * (alpha + beta + 1.0)
    x_e = (beta * beta - alpha * alpha) / (4.0 * kappa * kappa - 1.0)
    p, dp, log_scale = jacobi_value(n, alpha, beta, x_e)
    if p == 0.0:
        x_e = math.nextafter(x_e, 0.0 if x_e != 0.0 else 1.0)
        p, dp, log_scale = jacobi_value(n, alpha, beta, x_e)
    a, b = monic_coefficients(spec, n)
    left = sturm_count(a, b, x_e)
    right = n - left
    z_e = math.atanh(x_e)
    state = (p, dp, log_scale)

    # Step 1: both directional sweeps from the maximum of Ω
    right_sweep, left_sweep = run_sweeps([
        (JacobiProblem(n, alpha, beta, z_e, 1, state), right, None),
        (JacobiProblem(n, alpha, beta, z_e, -1, state), left, None),
    ], get_settings().threads)
    if len(right_sweep) != right or len(left_sweep) != left:
        raise NotComputable(
            f"sweeps found {len(left_sweep)}+{len(right_sweep)} zeros, expected {left}+{right}"
        )

    z = np.array(left_sweep.zeros[::-1] + right_sweep.zeros)
    states = left_sweep.states[::-1] + right_sweep.states
    nodes = np.tanh(z)
    log_w = _sweep_log_weights(z, states)

    # Step 2: angular refinement of the extreme nodes
    if alpha < -0.5 and right >= 2:
        refined = _refine_endpoint(n, alpha, beta, z[-2], states[-2], right=True)
        if refined:
            nodes[-1], log_w[-1] = refined
    if beta < -0.5 and left >= 2:
        refined = _refine_endpoint(n, alpha, beta, z[1], states[1], right=False)
        if refined:
            nodes[0], log_w[0] = refined

    check_consecutive_zeros(spec, np.sort(nodes), None, 0)
    return assemble_rule(spec, opts, nodes, log_w, Backend.ITERATIVE)


def _symmetric_iterative(spec: FamilySpec, opts: ComputeOptions) -> QuadratureRule:
    """α = β: one sweep over the positive zeros from parity data at 0, then reflection"""
    n, alpha = spec.n, spec.alpha
    odd = n % 2 == 1
    state = (0.0, 1.0, 0.0) if odd else (1.0, 0.0, 0.0)
    count = n // 2
    sweep = sweep_zeros(JacobiProblem(n, alpha, alpha, 0.0, 1, state), count)
    if len(sweep) != count:
        raise NotComputable(f"sweep found {len(sweep)} positive zeros, expected {count}")

    z = np.array(sweep.zeros)
    nodes = np.tanh(z)
    log_w = _sweep_log_weights(z, sweep.states)
    if alpha < -0.5 and count >= 2:
        refined = _refine_endpoint(n, alpha, alpha, z[-2], sweep.states[-2], right=True)
        if refined:
            nodes[-1], log_w[-1] = refined

    if odd:
        nodes = np.concatenate([[0.0], nodes])
        log_w = np.concatenate([[0.0], log_w])
    full_x = np.concatenate([-nodes[len(nodes) - count:][::-1], nodes])
    full_w = np.concatenate([log_w[len(log_w) - count:][::-1], log_w])
    check_consecutive_zeros(spec, full_x, None, 0)
    return assemble_rule(spec, opts, full_x, full_w, Backend.ITERATIVE)


# ---------------------------------------------------------------------------
# Asymptotic backend
# ---------------------------------------------------------------------------

def _psi_series(alpha: float, beta: float, degree: int) -> np.ndarray:
    """Even series of (1/4-α²)(1/(4 sin²(θ/2)) - 1/θ²) + (1/4-β²)/(4 cos²(θ/2))"""
    psi = np.zeros(degree + 1)
    k = np.arange(1, degree // 2 + 2, dtype=float)
    zeta = special.zeta(2.0 * k)
    coeffs = 2.0 * (2.0 * k - 1.0) * zeta * ((0.25 - alpha ** 2) * (2.0 * math.pi) ** (-2.0 * k)
                                             + (0.25 - beta ** 2) * (1.0 - 2.0 ** (-2.0 * k)) * math.pi ** (-2.0 * k))
    index = (2 * k - 2).astype(int)
    keep = index <= degree
    psi[index[keep]] = coeffs[keep]
    return psi


@lru_cache(maxsize=32)
def _bessel_expansion(alpha: float, beta: float) -> series.UniformCoefficients:
    psi = _psi_series(alpha, beta, BESSEL_DEGREE)
    return series.bessel_type_coefficients(psi, 0.25 - alpha ** 2, BESSEL_TERMS, BESSEL_DEGREE)


def _bessel_part(n: int, alpha: float, beta: float, count: int) -> Tuple[ThetaRepresentation, np.ndarray]:
    """
    The count nodes closest to +1 from the Bessel-type expansion in θ

    Returns:
        Angles (ascending, so nodes descending) and log weights on the common scale
    """
    rho = n + 0.5 * (alpha + beta + 1.0)
    if count == 0:
        return ThetaRepresentation(np.zeros(0), np.zeros(0), rho), np.zeros(0)
    coeffs = _bessel_expansion(alpha, beta)
    theta, wp = specfun.bessel_expansion_zeros(coeffs, alpha, rho, count)

    a0, b1 = coeffs.at_origin(rho)
    log_e = math.log(abs(a0 + (alpha + 0.5) * b1))
    constant = ((alpha + beta + 2.0) * math.log(2.0) + 2.0 * alpha * math.log(rho) + 2.0 * log_e
                + log_gamma_ratio(n, beta + 1.0, alpha + beta + 1.0) + log_gamma_ratio(n, 1.0, alpha + 1.0))
    log_w = (constant + (2.0 * alpha + 1.0) * np.log(np.sin(0.5 * theta))
             + (2.0 * beta + 1.0) * np.log(np.cos(0.5 * theta)) - 2.0 * np.log(np.abs(wp)))
    return ThetaRepresentation(theta, wp, rho), log_w


def _hahn_coefficients(n: int, alpha: float, beta: float) -> List[np.ndarray]:
    """D_{m,l} for m < HAHN_MAX_TERMS, one array over l per m"""
    rho = n + 0.5 * (alpha + beta + 1.0)
    terms = []
    for m in range(HAHN_MAX_TERMS):
        l = np.arange(m + 1, dtype=float)
        c = (special.poch(0.5 + alpha, l) * special.poch(0.5 - alpha, l)
             * special.poch(0.5 + beta, m - l) * special.poch(0.5 - beta, m - l))
        d = c / (special.factorial(l) * special.factorial(m - l) * 2.0 ** m * special.poch(2.0 * rho + 1.0, m))
        terms.append(d)
        if m > 0 and np.max(np.abs(d)) * 4.0 ** m < 1e-18:
            break
    return terms


def _hahn_part(n: int, alpha: float, beta: float, k: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nodes of index k (1 = closest to +1) from the elementary expansion, solved for δ = θ - π/2

    Returns:
        (nodes, log weights on the common scale)
    """
    rho = n + 0.5 * (alpha + beta + 1.0)
    coeffs = _hahn_coefficients(n, alpha, beta)
    delta = math.pi * (k - 0.5 * n + 0.25 * (alpha - beta) - 0.5) / rho
    # phase at θ = π/2 in units of π/2, reduced mod 4
    base = math.fmod(n, 4.0) + 0.5 * (beta - alpha)

    def evaluate(delta):
        half = 0.5 * (0.5 * math.pi + delta)
        s, c = np.sin(half), np.cos(half)
        cot, tan = c / s, s / c
        total = np.zeros_like(delta)
        slope = np.zeros_like(delta)
        for m, d in enumerate(coeffs):
            for l, dml in enumerate(d):
                phase = 0.5 * math.pi * math.fmod(base + 0.5 * m - l, 4.0) + (rho + 0.5 * m) * delta
                factor = dml * s ** (-l) * c ** (-(m - l))
                cos_p = np.cos(phase)
                total = total + factor * cos_p
                slope = slope + factor * (-(rho + 0.5 * m) * np.sin(phase)
                                          + cos_p * (-0.5 * l * cot + 0.5 * (m - l) * tan))
        return total, slope

    for _ in range(NEWTON_STEPS):
        value, slope = evaluate(delta)
        step = value / slope
        delta = delta - step
        if np.all(np.abs(step) <= 4.0 * EPS * np.maximum(np.abs(delta), 1.0 / rho)):
            break
    _, slope = evaluate(delta)

    theta = 0.5 * math.pi + delta
    constant = ((alpha + beta + 1.0) * math.log(2.0) + math.log(math.pi)
                + log_gamma_ratio(n, 0.5 * (alpha + beta) + 1.0, alpha + 1.0)
                + log_gamma_ratio(n, 0.5 * (alpha + beta) + 1.0, beta + 1.0)
                + log_gamma_ratio(n, 0.5 * (alpha + beta + 3.0), 1.0)
                + log_gamma_ratio(n, 0.5 * (alpha + beta + 3.0), alpha + beta + 1.0))
    log_w = (constant + (2.0 * alpha + 1.0) * np.log(np.sin(0.5 * theta))
             + (2.0 * beta + 1.0) * np.log(np.cos(0.5 * theta)) - 2.0 * np.log(np.abs(slope)))
    return -np.sin(delta), log_w


def _central_block(n: int, alpha: float, beta: float) -> Tuple[int, int]:
    """First and last index (1 = closest to +1) of the elementary-expansion block"""
    rho = n + 0.5 * (alpha + beta + 1.0)
    size = max(1, int(round(ELEMENTARY_FRACTION * n)))
    center = int(round(0.5 * rho - 0.5 * alpha + 0.25))
    center = min(max(center, 1), n)
    first = min(max(center - size // 2, 1), n - size + 1)
    return first, first + size - 1


def jacobi_asymptotic_rule(spec: FamilySpec, opts: Optional[ComputeOptions] = None) -> QuadratureRule:
    """
    Nodes and weights from asymptotic expansions

    The block of about 10% of the nodes around θ = π/2 uses the elementary
    expansion; the nodes on its right use the Bessel-type expansion directly and
    the ones on its left use it for P_n^(β,α)(-x).
    """
    opts = opts or ComputeOptions()
    spec.validate()
    n, alpha, beta = spec.n, spec.alpha, spec.beta
    if alpha * alpha + beta * beta >= ASYMPTOTIC_PARAMETER_LIMIT:
        raise NotComputable(f"asymptotic Jacobi needs alpha^2 + beta^2 < {ASYMPTOTIC_PARAMETER_LIMIT}")
    if n < ASYMPTOTIC_MIN_N:
        raise NotComputable(f"asymptotic Jacobi needs n >= {ASYMPTOTIC_MIN_N}, got {n}")

    first, last = _central_block(n, alpha, beta)
    right_count = first - 1
    left_count = n - last

    workers = max(1, min(3, get_settings().threads))
    with ThreadPoolExecutor(max_workers=workers) as executor:
        right = executor.submit(_bessel_part, n, alpha, beta, right_count)
        left = executor.submit(_bessel_part, n, beta, alpha, left_count)
        central = executor.submit(_hahn_part, n, alpha, beta, np.arange(first, last + 1, dtype=float))
        right_theta, right_w = right.result()
        left_theta, left_w = left.result()
        central_x, central_w = central.result()

    nodes = np.concatenate([np.cos(right_theta.theta), central_x, -np.cos(left_theta.theta)])
    log_w = np.concatenate([right_w, central_w, left_w])
    return assemble_rule(spec, opts, nodes, log_w, Backend.ASYMPTOTIC)


# ---------------------------------------------------------------------------
# Selection and dispatch
# ---------------------------------------------------------------------------

def select_jacobi_method(spec: FamilySpec) -> RegionDecision:
    """Backend for a Jacobi spec under the automatic method"""
    n, alpha, beta = spec.n, spec.alpha, spec.beta
    if abs(alpha) == 0.5 and abs(beta) == 0.5:
        return RegionDecision(Backend.CLOSED_FORM, "Chebyshev closed form (|alpha| = |beta| = 1/2)")
    if alpha == 0.0 and beta == 0.0:
        return RegionDecision(Backend.LOOKUP, "Legendre: table for n <= 80, expansions above")
    size = alpha * alpha + beta * beta
    if n > ASYMPTOTIC_SWITCH_N and size < 4.0 * (n - 195) / 55.0 and size < ASYMPTOTIC_PARAMETER_LIMIT:
        return RegionDecision(
            Backend.ASYMPTOTIC,
            f"n > {ASYMPTOTIC_SWITCH_N} and alpha^2 + beta^2 = {size:g} < 4(n-195)/55 = {4.0 * (n - 195) / 55.0:g}",
        )
    if n <= ASYMPTOTIC_SWITCH_N:
        return RegionDecision(Backend.ITERATIVE, f"n = {n} <= {ASYMPTOTIC_SWITCH_N}")
    return RegionDecision(Backend.ITERATIVE, f"alpha^2 + beta^2 = {size:g} outside the asymptotic region")


def decide_jacobi(spec: FamilySpec, opts: ComputeOptions) -> RegionDecision:
    """Selector result with the method override applied"""
    override = opts.method_override
    if override is Method.ITERATIVE:
        return RegionDecision(Backend.ITERATIVE, "method override")
    if override is Method.ASYMPTOTIC:
        return RegionDecision(Backend.ASYMPTOTIC, "method override")
    if override is Method.GOLUB_WELSCH:
        return RegionDecision(Backend.GOLUB_WELSCH, "method override")
    return select_jacobi_method(spec)


def gauss_jacobi(spec: FamilySpec, opts: Optional[ComputeOptions] = None) -> QuadratureRule:
    """Gauss-Jacobi rule through the selected (or overridden) backend"""
    opts = opts or ComputeOptions()
    spec.validate()
    decision = decide_jacobi(spec, opts)
    logger.debug(f"Jacobi n={spec.n} alpha={spec.alpha} beta={spec.beta}: {decision.backend.value} ({decision.reason})")

    if decision.backend is Backend.CLOSED_FORM:
        rule = chebyshev_rule(spec.n, spec.alpha, spec.beta, opts.normalization)
    elif decision.backend is Backend.LOOKUP:
        rule = legendre_rule(spec.n, opts.normalization)
    elif decision.backend is Backend.ASYMPTOTIC:
        return jacobi_asymptotic_rule(spec, opts)
    elif decision.backend is Backend.GOLUB_WELSCH:
        rule = golub_welsch_rule(spec, opts)
    else:
        return jacobi_iterative_rule(spec, opts)

    if opts.want_scaled:
        rule.scaled_weights = rule.weights.copy()
    return subsample_rule(rule, opts.subsample_log_threshold)
