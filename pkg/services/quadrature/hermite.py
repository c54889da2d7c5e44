"""
Gauss-Hermite rules

The iterative sweep over the positive zeros of y = e^(-x²/2) H_n(x) is the
main method. The asymptotic backend (elementary expansion for the bulk,
Airy-type expansion for the 20 largest nodes) is only used on request.
"""
from typing import List, Optional, Tuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from functools import lru_cache
import math
import logging

import numpy as np
from numpy.polynomial import Polynomial

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
)
from .errors import NotComputable
from .fpsolver import TaylorOde, TaylorProblem, sweep_zeros
from .recurrence import check_consecutive_zeros, golub_welsch_rule

logger = logging.getLogger(__name__)

EPS = np.finfo(float).eps
ASYMPTOTIC_MIN_N = 150
AIRY_NODES = 20
AIRY_TERMS = 4
AIRY_DEGREE = 80
ELEMENTARY_TERMS = 6
NEWTON_STEPS = 10
PHASE_PER_STEP = 2.5
_MAX_STEP = 1.0


def gaussian_ratio(x: np.ndarray, anchor: float) -> np.ndarray:
    """log e^(-x²); scaled weights are e^(x²) w with the anchor fixed at 0"""
    return -np.asarray(x, dtype=float) ** 2


def hermite_log_constant(n: int) -> float:
    """
    log of √π 2^(n+1) n! divided by the square of y(0) (n even) or y'(0) (n odd)

    Scaled weights are this constant times y'(x_i)^-2 for the solution with
    y(0) = 1 or y'(0) = 1. The duplication formula reduces it to a single
    gamma ratio.
    """
    m = n // 2
    ratio = log_gamma_ratio(m, 1.0, 0.5)
    if n % 2:
        return math.log(math.pi) - math.log(n) + ratio
    return math.log(2.0 * math.pi) + ratio


class HermiteOde(TaylorOde):
    """y'' + (u - x²) y = 0 with u = 2n+1"""

    def __init__(self, u: float):
        self.u = u

    def coefficients(self, point: float, value: float, derivative: float, degree: int) -> np.ndarray:
        x0 = point
        a0 = self.u - x0 * x0
        y = np.zeros(degree + 1)
        y[0], y[1] = value, derivative
        for k in range(degree - 1):
            acc = a0 * y[k]
            if k >= 1:
                acc -= 2.0 * x0 * y[k - 1]
            if k >= 2:
                acc -= y[k - 2]
            y[k + 2] = -acc / ((k + 1.0) * (k + 2.0))
        return y

    def max_step(self, point: float) -> float:
        omega = self.u - point * point
        if omega > 0:
            return min(_MAX_STEP, PHASE_PER_STEP / math.sqrt(omega))
        return _MAX_STEP


class HermiteProblem(TaylorProblem):
    """Positive zeros of y(x) = e^(-x²/2) H_n(x), swept upwards from 0"""

    def __init__(self, n: int, state):
        self.n = n
        self.u = 2.0 * n + 1.0
        mu = math.sqrt(self.u)
        self.sweep_start = 0.0
        self.sweep_direction = 1
        self.start_state = state
        self.turning_points = (-mu, mu)
        self.ode = HermiteOde(self.u)

    def omega(self, x: float) -> float:
        return self.u - x * x

    def normal_form(self, x: float, state) -> Tuple[float, float]:
        return state[0], state[1]


def _mirror(spec: FamilySpec, positive: np.ndarray, positive_w: np.ndarray,
            zero_w: Optional[float]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full node set, log weights and 1-based positions from the positive nodes (ascending, from 0 outwards)"""
    n = spec.n
    half = n // 2
    pos_idx = n - half + 1 + np.arange(len(positive))
    nodes = [-positive[::-1]]
    logs = [positive_w[::-1]]
    idx = [n + 1 - pos_idx[::-1]]
    if zero_w is not None:
        nodes.append(np.zeros(1))
        logs.append(np.array([zero_w]))
        idx.append(np.array([half + 1]))
    nodes.append(positive)
    logs.append(positive_w)
    idx.append(pos_idx)
    return np.concatenate(nodes), np.concatenate(logs), np.concatenate(idx)


def hermite_iterative_rule(spec: FamilySpec, opts: Optional[ComputeOptions] = None) -> QuadratureRule:
    """
    Positive zeros of H_n by one sweep from x = 0, the rest by reflection

    The start state is the parity data at 0; for odd n the node 0 comes with
    the constant itself as its log scaled weight. Weights fall monotonically
    away from 0, so subsampling just ends the sweep.
    """
    opts = opts or ComputeOptions()
    spec.validate()
    n = spec.n
    odd = n % 2 == 1
    constant = hermite_log_constant(n)
    count = n // 2

    def log_weight(x: float, state) -> float:
        return constant - x * x - 2.0 * (math.log(abs(state[1])) + state[2])

    predicate = None
    if opts.subsample_log_threshold is not None:
        predicate = WeightRatioStop(opts.subsample_log_threshold, log_weight,
                                    largest=constant if odd else -math.inf)

    state = (0.0, 1.0, 0.0) if odd else (1.0, 0.0, 0.0)
    sweep = sweep_zeros(HermiteProblem(n, state), count, predicate)
    if len(sweep) != count and not (predicate and predicate.triggered):
        raise NotComputable(f"sweep found {len(sweep)} positive zeros, expected {count}")

    positive = np.array(sweep.zeros)
    check_consecutive_zeros(spec, positive, 0.5 * positive[0] if len(positive) else 0.0, n - count)
    positive_w = np.array([log_weight(x, s) for x, s in zip(sweep.zeros, sweep.states)])
    nodes, log_w, indices = _mirror(spec, positive, positive_w, constant if odd else None)
    return assemble_rule(spec, opts, nodes, log_w, Backend.ITERATIVE,
                         indices=indices, log_ratio=gaussian_ratio, anchor=0.0)


# ---------------------------------------------------------------------------
# Asymptotic backend
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1)
def _elementary_terms() -> Tuple[List[Polynomial], List[Polynomial]]:
    """
    A_s and B_s as polynomials in τ = tan t for the expansion W = A V + B V'

    Here x = μ sin t, ζ = (2t + sin 2t)/4, d/dζ = (1+τ²)² d/dτ and the
    potential of the change of variable is -(1+τ²)²(1/2 + 5τ²/4).
    """
    tau = Polynomial([0.0, 1.0])
    jacobian = (1.0 + tau ** 2) ** 2
    kernel = Polynomial([0.5, 0.0, 1.25])
    a_terms = [Polynomial([1.0])]
    b_terms: List[Polynomial] = []
    for s in range(ELEMENTARY_TERMS):
        b = 0.5 * jacobian * a_terms[s].deriv() + 0.5 * (kernel * a_terms[s]).integ()
        b_terms.append(b)
        a_terms.append(-0.5 * jacobian * b.deriv() - 0.5 * (kernel * b).integ())
    return a_terms[:ELEMENTARY_TERMS], b_terms


def _elementary_coefficients(u: float, tau: np.ndarray):
    """A, dA/dζ, B, dB/dζ at τ, B carrying its u^-2 factor"""
    a_terms, b_terms = _elementary_terms()
    jacobian = (1.0 + tau * tau) ** 2
    a = np.zeros_like(tau)
    a_der = np.zeros_like(tau)
    b = np.zeros_like(tau)
    b_der = np.zeros_like(tau)
    inv = u ** -2.0
    scale = 1.0
    for a_s, b_s in zip(a_terms, b_terms):
        a = a + scale * a_s(tau)
        a_der = a_der + scale * a_s.deriv()(tau)
        b = b + scale * inv * b_s(tau)
        b_der = b_der + scale * inv * b_s.deriv()(tau)
        scale *= inv
    return a, jacobian * a_der, b, jacobian * b_der


def _elementary_at_origin(u: float) -> Tuple[float, float]:
    a, _, _, b_der = _elementary_coefficients(u, np.zeros(1))
    return float(a[0]), float(b_der[0])


def _t_of_zeta(zeta: np.ndarray) -> np.ndarray:
    """t with (2t + sin 2t)/4 = ζ; Newton from t = ζ increases monotonically"""
    t = np.array(zeta, dtype=float)
    for _ in range(60):
        step = (0.25 * (2.0 * t + np.sin(2.0 * t)) - zeta) / np.cos(t) ** 2
        t = t - step
        if np.all(np.abs(step) <= 4.0 * EPS * t):
            break
    return t


def _elementary_w(u: float, odd: bool, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """W and dW/dζ at t"""
    zeta = 0.25 * (2.0 * t + np.sin(2.0 * t))
    phase = u * zeta
    if odd:
        v, vp = np.sin(phase), u * np.cos(phase)
    else:
        v, vp = np.cos(phase), -u * np.sin(phase)
    a, a_der, b, b_der = _elementary_coefficients(u, np.tan(t))
    return a * v + b * vp, (a_der - u * u * b) * v + (a + b_der) * vp


def _elementary_part(n: int, count: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    The count smallest positive nodes with log |y'| for y(0) = 1 or y'(0) = 1

    Returns:
        (nodes ascending, log |y'(x)|)
    """
    u = 2.0 * n + 1.0
    odd = n % 2 == 1
    k = np.arange(1, count + 1, dtype=float)
    phase = k * math.pi if odd else (k - 0.5) * math.pi
    t = _t_of_zeta(phase / u)
    for _ in range(NEWTON_STEPS):
        w, wp = _elementary_w(u, odd, t)
        step = w / (wp * np.cos(t) ** 2)
        t = t - step
        if np.all(np.abs(step) <= 4.0 * EPS * t):
            break
    _, wp = _elementary_w(u, odd, t)

    a0, b1 = _elementary_at_origin(u)
    norm = math.log(u * abs(a0 + b1)) if odd else math.log(math.sqrt(u) * abs(a0))
    # T' = sec t
    log_dy = 0.5 * np.log(np.cos(t)) + np.log(np.abs(wp)) - norm
    return math.sqrt(u) * np.sin(t), log_dy


@lru_cache(maxsize=1)
def _airy_expansion() -> series.UniformCoefficients:
    phi = series.turning_point_potential(0.0, AIRY_DEGREE)
    return series.airy_type_coefficients(phi, AIRY_TERMS, AIRY_DEGREE)


def hermite_asymptotic_rule(spec: FamilySpec, opts: Optional[ComputeOptions] = None) -> QuadratureRule:
    """
    Nodes and weights from asymptotic expansions

    All positive nodes but the 20 largest come from the elementary expansion;
    those 20 come from the Airy-type expansion in s = x/√(2n+1), tied to the
    elementary one at the 21st largest node.
    """
    opts = opts or ComputeOptions()
    spec.validate()
    n = spec.n
    if n < ASYMPTOTIC_MIN_N:
        raise NotComputable(f"asymptotic Hermite needs n >= {ASYMPTOTIC_MIN_N}, got {n}")

    u = 2.0 * n + 1.0
    half_log_u = 0.5 * math.log(u)
    positives = n // 2
    airy_count = min(AIRY_NODES, positives - 1)
    coeffs = _airy_expansion()

    workers = max(1, min(2, get_settings().threads))
    with ThreadPoolExecutor(max_workers=workers) as executor:
        bulk = executor.submit(_elementary_part, n, positives - airy_count)
        top = executor.submit(specfun.airy_expansion_zeros, coeffs, u, np.arange(airy_count, 0, -1))
        x_e, dy_e = bulk.result()
        zeta_a, wp_a = top.result()

    # dy/ds = √u dy/dx
    log_k = specfun.airy_expansion_scale(coeffs, u, airy_count + 1, float(x_e[-1]) / math.sqrt(u),
                                         float(dy_e[-1]) + half_log_u)
    s_a, tprime_a = series.airy_abscissa(zeta_a)
    dy_a = log_k - 0.5 * np.log(tprime_a) + np.log(np.abs(wp_a)) - half_log_u

    positive = np.concatenate([x_e, math.sqrt(u) * s_a])
    constant = hermite_log_constant(n)
    positive_w = constant - positive ** 2 - 2.0 * np.concatenate([dy_e, dy_a])
    nodes, log_w, indices = _mirror(spec, positive, positive_w, constant if n % 2 else None)
    return assemble_rule(spec, opts, nodes, log_w, Backend.ASYMPTOTIC,
                         indices=indices, log_ratio=gaussian_ratio, anchor=0.0)


# ---------------------------------------------------------------------------
# Selection and dispatch
# ---------------------------------------------------------------------------

def select_hermite_method(spec: FamilySpec) -> RegionDecision:
    """The iterative method is the main one for every n"""
    return RegionDecision(Backend.ITERATIVE, "iterative is the default Hermite method")


def decide_hermite(spec: FamilySpec, opts: ComputeOptions) -> RegionDecision:
    """Selector result with the method override applied"""
    override = opts.method_override
    if override is Method.ASYMPTOTIC:
        return RegionDecision(Backend.ASYMPTOTIC, "method override")
    if override is Method.GOLUB_WELSCH:
        return RegionDecision(Backend.GOLUB_WELSCH, "method override")
    if override is Method.ITERATIVE:
        return RegionDecision(Backend.ITERATIVE, "method override")
    return select_hermite_method(spec)


def gauss_hermite(spec: FamilySpec, opts: Optional[ComputeOptions] = None) -> QuadratureRule:
    """Gauss-Hermite rule through the selected (or overridden) backend"""
    opts = opts or ComputeOptions()
    spec.validate()
    decision = decide_hermite(spec, opts)
    logger.debug(f"Hermite n={spec.n}: {decision.backend.value} ({decision.reason})")

    if decision.backend is Backend.ASYMPTOTIC:
        return hermite_asymptotic_rule(spec, opts)
    if decision.backend is Backend.ITERATIVE:
        return hermite_iterative_rule(spec, opts)

    unit = golub_welsch_rule(spec, replace(opts, normalization=Normalization.UNIT))
    with np.errstate(divide="ignore"):
        log_w = np.log(unit.weights)
    return assemble_rule(spec, opts, unit.nodes, log_w, Backend.GOLUB_WELSCH,
                         log_ratio=gaussian_ratio, anchor=0.0)
