from typing import Optional, Tuple
import math
import logging

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .core import (
    Backend,
    ComputeOptions,
    Family,
    FamilySpec,
    QuadratureRule,
    TINY,
    apply_normalization,
    finalize_weights,
)
from .errors import NotComputable

logger = logging.getLogger(__name__)

# rescaling threshold for the three-term recurrences
_BIG = 1e200
_LOG_BIG = math.log(_BIG)
# Sturm checks sample at most this many points
_STURM_SAMPLE = 256


def monic_coefficients(spec: FamilySpec, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Monic three-term recurrence x p_k = p_{k+1} + a_k p_k + b_k p_{k-1}

    Args:
        spec: Family and parameters
        n: Number of coefficients wanted

    Returns:
        (a, b) with a[k] for k = 0..n-1 and b[k] for k = 0..n-1 (b[0] unused, set to 0)
    """
    k = np.arange(n, dtype=float)
    if spec.family is Family.HERMITE:
        return np.zeros(n), 0.5 * k

    if spec.family is Family.LAGUERRE:
        alpha = spec.alpha
        return 2.0 * k + alpha + 1.0, k * (k + alpha)

    alpha, beta = spec.alpha, spec.beta
    ab = alpha + beta
    a = np.empty(n)
    b = np.zeros(n)
    a[0] = (beta - alpha) / (ab + 2.0)
    if n > 1:
        kk = k[1:]
        a[1:] = (beta * beta - alpha * alpha) / ((2.0 * kk + ab) * (2.0 * kk + ab + 2.0))
        b[1] = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) ** 2 * (3.0 + ab))
    if n > 2:
        kk = k[2:]
        s = 2.0 * kk + ab
        b[2:] = 4.0 * kk * (kk + alpha) * (kk + beta) * (kk + ab) / (s * s * (s + 1.0) * (s - 1.0))
    return a, b


def sturm_count(a: np.ndarray, b: np.ndarray, x: float) -> int:
    """Number of zeros of the degree-len(a) orthogonal polynomial lying below x"""
    count = 0
    d = a[0] - x
    if d == 0.0:
        d = TINY
    if d < 0:
        count += 1
    for k in range(1, len(a)):
        d = a[k] - x - b[k] / d
        if d == 0.0:
            d = TINY
        if d < 0:
            count += 1
    return count


def sturm_counts(a: np.ndarray, b: np.ndarray, points) -> np.ndarray:
    """sturm_count at many points at once"""
    points = np.asarray(points, dtype=float)
    counts = np.zeros(points.shape, dtype=int)
    d = np.ones(points.shape)
    for k in range(len(a)):
        d = a[k] - points - (b[k] / d if k else 0.0)
        d = np.where(d == 0.0, TINY, d)
        counts += d < 0
    return counts


def check_consecutive_zeros(spec: FamilySpec, zeros: np.ndarray, below: Optional[float], zeros_below: int):
    """
    Check that ascending zeros are consecutive zeros of the degree-n polynomial

    A skipped or repeated zero shifts every later count, so a sample of the gaps
    that keeps the first and the last one is enough.

    Args:
        spec: Family and parameters, spec.n the degree
        zeros: Computed zeros in ascending order
        below: A point between the last uncomputed zero and zeros[0], or None to
            check only the gaps between computed zeros
        zeros_below: Number of zeros of the polynomial below zeros[0]

    Raises:
        NotComputable: When a zero was skipped or found twice
    """
    zeros = np.asarray(zeros, dtype=float)
    if len(zeros) == 0:
        return
    a, b = monic_coefficients(spec, spec.n)
    points = 0.5 * (zeros[:-1] + zeros[1:])
    expected = zeros_below + np.arange(1, len(zeros))
    if below is not None:
        points = np.concatenate([[below], points])
        expected = np.concatenate([[zeros_below], expected])
    if len(points) > _STURM_SAMPLE:
        keep = np.unique(np.linspace(0, len(points) - 1, _STURM_SAMPLE).round().astype(int))
        points, expected = points[keep], expected[keep]
    counts = sturm_counts(a, b, points)
    if not np.array_equal(counts, expected):
        first = int(np.argmax(counts != expected))
        raise NotComputable(
            f"{spec.family.value} n={spec.n}: zero count {counts[first]} below {points[first]:.6g}, expected {expected[first]}"
        )


def jacobi_value(n: int, alpha: float, beta: float, x: float) -> Tuple[float, float, float]:
    """
    P_n^(α,β)(x) and its derivative in standard normalization

    Returns:
        (value, derivative, log_scale) where the true values are the returned ones times exp(log_scale)
    """
    ab = alpha + beta
    p_prev, dp_prev = 1.0, 0.0
    if n == 0:
        return p_prev, dp_prev, 0.0
    p = (alpha + 1.0) + 0.5 * (ab + 2.0) * (x - 1.0)
    dp = 0.5 * (ab + 2.0)
    log_scale = 0.0
    for k in range(2, n + 1):
        s = 2.0 * k + ab
        denom = 2.0 * k * (k + ab) * (s - 2.0)
        c1 = (s - 1.0) * (s * (s - 2.0) * x + alpha * alpha - beta * beta)
        c1_slope = (s - 1.0) * s * (s - 2.0)
        c2 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * s
        p_next = (c1 * p - c2 * p_prev) / denom
        dp_next = (c1 * dp + c1_slope * p - c2 * dp_prev) / denom
        p_prev, dp_prev, p, dp = p, dp, p_next, dp_next
        if abs(p) > _BIG or abs(dp) > _BIG:
            p, dp, p_prev, dp_prev = p / _BIG, dp / _BIG, p_prev / _BIG, dp_prev / _BIG
            log_scale += _LOG_BIG
    return p, dp, log_scale


def laguerre_value(n: int, alpha: float, x: float) -> Tuple[float, float, float]:
    """
    L_n^(α)(x) and its derivative in standard normalization

    Returns:
        (value, derivative, log_scale) where the true values are the returned ones times exp(log_scale)
    """
    l_prev, dl_prev = 1.0, 0.0
    if n == 0:
        return l_prev, dl_prev, 0.0
    l, dl = 1.0 + alpha - x, -1.0
    log_scale = 0.0
    for k in range(1, n):
        c = 2.0 * k + alpha + 1.0 - x
        l_next = (c * l - (k + alpha) * l_prev) / (k + 1.0)
        dl_next = (c * dl - l - (k + alpha) * dl_prev) / (k + 1.0)
        l_prev, dl_prev, l, dl = l, dl, l_next, dl_next
        if abs(l) > _BIG or abs(dl) > _BIG:
            l, dl, l_prev, dl_prev = l / _BIG, dl / _BIG, l_prev / _BIG, dl_prev / _BIG
            log_scale += _LOG_BIG
    return l, dl, log_scale


def golub_welsch_rule(spec: FamilySpec, opts: ComputeOptions) -> QuadratureRule:
    """
    Gaussian rule from the eigen-decomposition of the Jacobi matrix in double precision

    The smallest weights lose relative accuracy once they drop far below the
    largest one; the iterative and asymptotic backends do not have that weakness.
    """
    a, b = monic_coefficients(spec, spec.n)
    if spec.n == 1:
        nodes = a[:1].copy()
        unit = np.ones(1)
    else:
        nodes, vectors = eigh_tridiagonal(a, np.sqrt(b[1:]))
        unit = vectors[0, :] ** 2
        unit = unit / unit.sum()

    if spec.family is Family.HERMITE or (spec.family is Family.JACOBI and spec.alpha == spec.beta):
        nodes, unit = _symmetrize(nodes, unit)

    with np.errstate(divide="ignore"):
        log_unit = np.log(np.maximum(unit, 0.0))
    weights, underflow = finalize_weights(log_unit)
    weights = apply_normalization(weights, spec, opts.normalization)
    return QuadratureRule(
        spec=spec,
        nodes=nodes,
        weights=weights,
        normalization=opts.normalization,
        backend=Backend.GOLUB_WELSCH,
        underflow_count=underflow,
    )


def _symmetrize(nodes: np.ndarray, weights: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Average mirrored pairs so the symmetric rule is bit-exact"""
    n = len(nodes)
    half = n // 2
    upper = 0.5 * (nodes[n - half:] - nodes[:half][::-1])
    upper_w = 0.5 * (weights[n - half:] + weights[:half][::-1])
    out_x = np.empty(n)
    out_w = np.empty(n)
    out_x[n - half:] = upper
    out_x[:half] = -upper[::-1]
    out_w[n - half:] = upper_w
    out_w[:half] = upper_w[::-1]
    if n % 2:
        out_x[half] = 0.0
        out_w[half] = weights[half]
    return out_x, out_w
