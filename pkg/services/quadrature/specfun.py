"""
Special-function kernels used by the quadrature engines

Bessel J and Airy Ai/Ai' come from scipy.special; the immutable zero tables used
by the Legendre and Airy-type code are built from mpmath. This module adds
zeros of Bessel functions of real order, Taylor evaluation of Ai near its
zeros and the shifted-argument expansion of J near its zeros.
"""
from typing import Tuple, Union
from dataclasses import dataclass
from functools import lru_cache
import logging
import math

import mpmath
import numpy as np
from scipy import special

from .errors import DeltaTooLarge, InvalidParameter, NotConverged
from .series import UniformCoefficients, airy_zeta

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

AIRY_TABLE_SIZE = 20
BESSEL_TABLE_SIZE = 35

# admissible shift, as a fraction of the zero (Bessel) or of the zero spacing (Airy)
_MAX_RELATIVE_SHIFT = 0.05
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class ZeroTable:
    """Precomputed zeros: Airy a_i with Ai'(a_i), Bessel j_k of J0 with J1(j_k)"""
    airy_zeros: Tuple[float, ...]
    airy_derivatives: Tuple[float, ...]
    bessel_j0_zeros: Tuple[float, ...]
    bessel_j1_values: Tuple[float, ...]


@lru_cache(maxsize=1)
def zero_table() -> ZeroTable:
    """
    Build the zero table once per process

    Zeros come from mpmath at 40 digits and are rounded once, so each entry is
    the double nearest the true zero; the derivative values are taken at the
    true zeros.
    """
    with mpmath.workdps(40):
        airy = [mpmath.airyaizero(k) for k in range(1, AIRY_TABLE_SIZE + 1)]
        bessel = [mpmath.besseljzero(0, k) for k in range(1, BESSEL_TABLE_SIZE + 1)]
        return ZeroTable(
            airy_zeros=tuple(float(a) for a in airy),
            airy_derivatives=tuple(float(mpmath.airyai(a, derivative=1)) for a in airy),
            bessel_j0_zeros=tuple(float(j) for j in bessel),
            bessel_j1_values=tuple(float(mpmath.besselj(1, j)) for j in bessel),
        )


def _check_order(order: float):
    if not order > -1.0:
        raise InvalidParameter(f"Bessel order must be > -1, got {order}")


def bessel_j(order: float, x: ArrayLike) -> ArrayLike:
    """J_order(x) for real order > -1 and x >= 0"""
    _check_order(order)
    return special.jv(order, x)


def _mcmahon(nu: float, ks: np.ndarray) -> np.ndarray:
    b = (ks + 0.5 * nu - 0.25) * np.pi
    mu = 4.0 * nu * nu
    e = 8.0 * b
    return (b - (mu - 1.0) / e
            - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e ** 3)
            - 32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * e ** 5))


def _olver(nu: float, ks: np.ndarray) -> np.ndarray:
    """Leading uniform approximation ν z(ζ) with ζ = ν^(-2/3) a_k"""
    a, _ = airy_zeros_at(ks)
    r = (2.0 / 3.0) * np.abs(a) ** 1.5 / nu
    # sqrt(z^2-1) - arcsec(z) = r; start right of the root, Newton is then monotone
    z = r + 1.0 + 0.5 * np.pi
    for _ in range(100):
        root = np.sqrt(z * z - 1.0)
        step = (root - np.arccos(1.0 / z) - r) * z / root
        z = z - step
        if np.all(np.abs(step) <= 4.0 * _EPS * z):
            break
    return nu * z


def _small_order_first_zero(nu: float) -> float:
    """
    j_{ν,1} for -1 < ν < 0 from the first three terms of J_ν(x)(x/2)^(-ν)Γ(ν+1) in t = x²/4

    The quadratic root t = (ν+2) - √((ν+2)(-ν)) tends to ν+1 as ν → -1, where
    McMahon's expansion is useless.
    """
    t = (nu + 2.0) - math.sqrt((nu + 2.0) * -nu)
    return 2.0 * math.sqrt(t)


def _bessel_zeros_at(order: float, ks) -> np.ndarray:
    nu = float(order)
    ks = np.asarray(ks, dtype=float)
    x = _mcmahon(nu, ks) if nu <= 2.0 else _olver(nu, ks)
    if nu < 0.0:
        x = np.where(ks == 1, _small_order_first_zero(nu), x)

    for _ in range(50):
        if nu < 0.0:
            # Newton on x^(-ν) J_ν, whose derivative is -x^(-ν) J_{ν+1}
            step = -special.jv(nu, x) / special.jv(nu + 1.0, x)
        else:
            step = special.jv(nu, x) / special.jvp(nu, x)
        x_new = np.where(x - step > 0.0, x - step, 0.5 * x)
        done = np.abs(x_new - x) <= 4.0 * _EPS * np.abs(x)
        x = x_new
        if np.all(done):
            break
    else:
        logger.warning(f"Bessel zero Newton for order {nu} hit its iteration cap")
    return x


def bessel_zero(order: float, k: int) -> float:
    """k-th positive zero of J_order"""
    _check_order(order)
    if k < 1:
        raise InvalidParameter(f"zero index must be >= 1, got {k}")
    if order == 0.0 and k <= BESSEL_TABLE_SIZE:
        return zero_table().bessel_j0_zeros[k - 1]
    return float(_bessel_zeros_at(order, [k])[0])


def bessel_zeros(order: float, count: int) -> np.ndarray:
    """The first count positive zeros of J_order"""
    _check_order(order)
    return _bessel_zeros_at(order, np.arange(1, count + 1))


def airy_ai_pair(x: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
    """(Ai(x), Ai'(x))"""
    ai, aip, _, _ = special.airy(x)
    return ai, aip


def airy_zeros_at(ks) -> Tuple[np.ndarray, np.ndarray]:
    """
    Airy zeros a_k and derivatives Ai'(a_k) for an array of 1-based indices

    Indices up to the table size are read from the table; beyond it the
    asymptotic zero expansion is polished by one Newton step.
    """
    ks = np.atleast_1d(np.asarray(ks, dtype=int))
    if np.any(ks < 1):
        raise InvalidParameter("Airy zero indices must be >= 1")
    table = zero_table()
    zeros = np.empty(ks.shape)
    derivs = np.empty(ks.shape)

    small = ks <= AIRY_TABLE_SIZE
    zeros[small] = np.asarray(table.airy_zeros)[ks[small] - 1]
    derivs[small] = np.asarray(table.airy_derivatives)[ks[small] - 1]

    if np.any(~small):
        t = 3.0 * np.pi * (4.0 * ks[~small] - 1.0) / 8.0
        t2 = t ** -2.0
        a = -t ** (2.0 / 3.0) * (1.0 + t2 * (5.0 / 48.0 + t2 * (-5.0 / 36.0 + t2 * 77125.0 / 82944.0)))
        ai, aip = airy_ai_pair(a)
        a = a - ai / aip
        zeros[~small] = a
        derivs[~small] = airy_ai_pair(a)[1]
    return zeros, derivs


def airy_zero(k: int) -> float:
    """k-th zero of Ai (negative)"""
    return float(airy_zeros_at([k])[0][0])


def airy_zeros(count: int) -> np.ndarray:
    """The first count zeros of Ai"""
    return airy_zeros_at(np.arange(1, count + 1))[0]


_AIRY_TAYLOR_TERMS = 30


def airy_near_zero(i, delta) -> Tuple[ArrayLike, ArrayLike]:
    """
    Ai and Ai' at a_i + δ from the Taylor series about the zero

    Args:
        i: 1-based zero index (scalar or array)
        delta: Shift from the zero, |δ| at most 5% of the distance to the next zero

    Returns:
        (Ai(a_i+δ), Ai'(a_i+δ))
    """
    scalar = np.isscalar(i) and np.isscalar(delta)
    idx = np.atleast_1d(np.asarray(i, dtype=int))
    d = np.atleast_1d(np.asarray(delta, dtype=float))
    idx, d = np.broadcast_arrays(idx, d)

    a, aip = airy_zeros_at(idx)
    a_next, _ = airy_zeros_at(idx + 1)
    if np.any(np.abs(d) > _MAX_RELATIVE_SHIFT * np.abs(a - a_next)):
        raise DeltaTooLarge("shift from the Airy zero exceeds the series range")

    value, deriv = _airy_taylor(a, aip, d)
    if scalar:
        return float(value[0]), float(deriv[0])
    return value, deriv


def _airy_taylor(a: np.ndarray, aip: np.ndarray, d: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    # y'' = (a + t) y with y(0) = 0, y'(0) = Ai'(a)
    c_prev2 = np.zeros_like(a)
    c_prev = np.zeros_like(a)
    c_cur = aip.copy()
    value = c_cur * d
    deriv = c_cur.copy()
    power = d.copy()
    coeffs = [c_prev, c_cur]
    for k in range(0, _AIRY_TAYLOR_TERMS):
        c_km1 = coeffs[k - 1] if k >= 1 else c_prev2
        c_next = (a * coeffs[k] + c_km1) / ((k + 2.0) * (k + 1.0))
        coeffs.append(c_next)
        deriv = deriv + (k + 2.0) * c_next * power
        power = power * d
        value = value + c_next * power
    return value, deriv


def airy_pair_near_zero(ks: np.ndarray, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Ai and Ai' at x close to a_k, falling back to scipy where the series does not apply"""
    ks = np.asarray(ks, dtype=int)
    x = np.asarray(x, dtype=float)
    a, aip = airy_zeros_at(ks)
    a_next, _ = airy_zeros_at(ks + 1)
    d = x - a
    near = np.abs(d) <= _MAX_RELATIVE_SHIFT * np.abs(a - a_next)

    value, deriv = airy_ai_pair(x)
    value = np.array(value, dtype=float)
    deriv = np.array(deriv, dtype=float)
    if np.any(near):
        v, dv = _airy_taylor(a[near], aip[near], d[near])
        value[near] = v
        deriv[near] = dv
    return value, deriv


_SHIFT_MAX_TERMS = 80


def _shifted_pair(nu: float, u: np.ndarray, h: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """J_ν(u+h) and J_{ν+1}(u+h) for u a zero of J_ν by the multiplication theorem"""
    w = -h * (2.0 * u + h) / (2.0 * u)
    lam = (u + h) / u

    j_prev = np.zeros_like(u)
    j_cur = special.jv(nu + 1.0, u)
    total0 = np.zeros_like(u)
    total1 = j_cur.copy()
    coef = np.ones_like(u)
    for m in range(1, _SHIFT_MAX_TERMS):
        coef = coef * w / m
        j_next = 2.0 * (nu + m) / u * j_cur - j_prev
        term0 = coef * j_cur
        term1 = coef * j_next
        total0 = total0 + term0
        total1 = total1 + term1
        j_prev, j_cur = j_cur, j_next
        if np.all(np.abs(term0) <= 1e-18 * np.abs(total0)) and np.all(np.abs(term1) <= 1e-18 * np.abs(total1)):
            break
    else:
        raise NotConverged("shifted Bessel series did not converge")
    return lam ** nu * total0, lam ** (nu + 1.0) * total1


def bessel_shifted_pair(order: float, k, h) -> Tuple[ArrayLike, ArrayLike]:
    """
    J_order and J'_order at j_k + h, with j_k the k-th positive zero of J_order

    Raises DeltaTooLarge when |h| > 0.05·j_k.
    """
    _check_order(order)
    scalar = np.isscalar(k) and np.isscalar(h)
    ks = np.atleast_1d(np.asarray(k, dtype=int))
    hs = np.atleast_1d(np.asarray(h, dtype=float))
    ks, hs = np.broadcast_arrays(ks, hs)
    u = _bessel_zeros_at(order, ks)
    value, deriv = _shifted_from_zeros(order, u, hs)
    if scalar:
        return float(value[0]), float(deriv[0])
    return value, deriv


def _shifted_from_zeros(order: float, u: np.ndarray, h: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    if np.any(np.abs(h) > _MAX_RELATIVE_SHIFT * u):
        raise DeltaTooLarge("shift from the Bessel zero exceeds the series range")
    value, upper = _shifted_pair(order, u, h)
    x = u + h
    return value, order / x * value - upper


def bessel_shifted(order: float, k, h) -> ArrayLike:
    """J_order(j_k + h) from the expansion about the zero j_k"""
    return bessel_shifted_pair(order, k, h)[0]


def bessel_pair_near_zero(order: float, zeros: np.ndarray, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """J and J' at x close to the given zeros, falling back to scipy where the expansion does not apply"""
    zeros = np.asarray(zeros, dtype=float)
    x = np.asarray(x, dtype=float)
    h = x - zeros
    near = np.abs(h) <= _MAX_RELATIVE_SHIFT * zeros

    value = np.array(special.jv(order, x), dtype=float)
    deriv = np.array(special.jvp(order, x), dtype=float)
    if np.any(near):
        v, dv = _shifted_from_zeros(order, zeros[near], h[near])
        value[near] = v
        deriv[near] = dv
    return value, deriv


# ---------------------------------------------------------------------------
# Zeros of uniform asymptotic expansions
# ---------------------------------------------------------------------------

_EXPANSION_NEWTON_STEPS = 10


def bessel_expansion_pair(coeffs: UniformCoefficients, order: float, u: float,
                          zeros: np.ndarray, zeta: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    W = A V + B V' and dW/dζ for V = √ζ J_order(uζ)

    Args:
        coeffs: Bessel-type coefficient functions (B carries its u^-2 factor)
        zeros: The Bessel zeros uζ is expected to lie next to
    """
    c = 0.25 - order * order
    j, jp = bessel_pair_near_zero(order, zeros, u * zeta)
    root = np.sqrt(zeta)
    v = root * j
    vp = j / (2.0 * root) + u * root * jp
    a, ap, b, bp = coeffs.evaluate(u, zeta)
    q = u * u + c / (zeta * zeta)
    return a * v + b * vp, (ap - b * q) * v + (a + bp) * vp


def bessel_expansion_zeros(coeffs: UniformCoefficients, order: float, u: float,
                           count: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    The count smallest positive zeros of a Bessel-type expansion

    Returns:
        (ζ, dW/dζ at ζ), Newton-refined from j_k/u
    """
    zeros = bessel_zeros(order, count)
    zeta = zeros / u
    # a quarter of the zero spacing of J(uζ)
    limit = 0.25 * np.pi / u
    for _ in range(_EXPANSION_NEWTON_STEPS):
        w, wp = bessel_expansion_pair(coeffs, order, u, zeros, zeta)
        step = np.clip(w / wp, -limit, limit)
        zeta = np.where(zeta - step > 0.0, zeta - step, 0.5 * zeta)
        if np.all(np.abs(step) <= 4.0 * _EPS * zeta):
            break
    _, wp = bessel_expansion_pair(coeffs, order, u, zeros, zeta)
    return zeta, wp


def airy_expansion_pair(coeffs: UniformCoefficients, u: float, ks: np.ndarray,
                        zeta: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """W = A·Ai(u^(2/3)ζ) + u^(-4/3)·B·Ai'(u^(2/3)ζ) and dW/dζ, with uζ^(2/3) close to a_k"""
    u23 = u ** (2.0 / 3.0)
    scale = u ** (-4.0 / 3.0)
    ai, aip = airy_pair_near_zero(ks, u23 * zeta)
    a, ap, b, bp = coeffs.evaluate(u, zeta)
    return a * ai + scale * b * aip, ai * (ap + zeta * b) + aip * (u23 * a + scale * bp)


def airy_expansion_zeros(coeffs: UniformCoefficients, u: float, ks: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Zeros of an Airy-type expansion next to a_k/u^(2/3), k = 1 closest to the turning point

    Returns:
        (ζ, dW/dζ at ζ)
    """
    ks = np.asarray(ks, dtype=int)
    u23 = u ** (2.0 / 3.0)
    a, _ = airy_zeros_at(ks)
    a_next, _ = airy_zeros_at(ks + 1)
    zeta = a / u23
    limit = 0.25 * (a - a_next) / u23
    for _ in range(_EXPANSION_NEWTON_STEPS):
        w, wp = airy_expansion_pair(coeffs, u, ks, zeta)
        step = np.clip(w / wp, -limit, limit)
        # ζ stays on the oscillatory side of the turning point
        zeta = np.where(zeta - step < 0.0, zeta - step, 0.5 * zeta)
        if np.all(np.abs(step) <= 4.0 * _EPS * np.abs(zeta)):
            break
    _, wp = airy_expansion_pair(coeffs, u, ks, zeta)
    return zeta, wp


def airy_expansion_scale(coeffs: UniformCoefficients, u: float, k: int, s: float, log_slope: float) -> float:
    """
    log K with K·T'^(-1/2)·dW/dζ = exp(log_slope) at a known zero s of the solution

    Args:
        k: Position of the zero counted from the turning point (1 = closest)
        s: The zero in the airy_map variable
        log_slope: log |dy/ds| there, from another expansion

    Returns:
        The log of the factor tying the Airy-type expansion to that solution
    """
    zeta = airy_zeta(np.array([s]))
    _, wp = airy_expansion_pair(coeffs, u, np.array([k]), zeta)
    tprime = math.sqrt(-float(zeta[0])) / math.sqrt((1.0 - s) * (1.0 + s))
    return log_slope + 0.5 * math.log(tprime) - math.log(abs(float(wp[0])))
