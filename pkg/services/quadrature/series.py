"""
Truncated power series and the coefficient recursions of uniform expansions

Series are numpy arrays of coefficients in ascending order. The two
recursions at the bottom build the coefficient functions A_s, B_s of
Bessel-type and Airy-type expansions of solutions of W'' = Q W.
"""
from typing import List, Tuple
from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import special

EPS = np.finfo(float).eps


def truncate(c: np.ndarray, degree: int) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    out = np.zeros(degree + 1)
    m = min(len(c), degree + 1)
    out[:m] = c[:m]
    return out


def mul(a: np.ndarray, b: np.ndarray, degree: int) -> np.ndarray:
    return truncate(P.polymul(a, b), degree)


def add(*terms: np.ndarray) -> np.ndarray:
    result = np.zeros(1)
    for term in terms:
        result = P.polyadd(result, term)
    return result


def derivative(c: np.ndarray) -> np.ndarray:
    if len(c) <= 1:
        return np.zeros(1)
    return P.polyder(c)


def integral(c: np.ndarray) -> np.ndarray:
    """Antiderivative vanishing at 0"""
    return P.polyint(c)


def power(f: np.ndarray, p: float, degree: int) -> np.ndarray:
    """f**p for a series with nonzero constant term"""
    f = truncate(f, degree)
    f0 = f[0]
    if f0 == 0.0:
        raise ValueError("power of a series needs a nonzero constant term")
    g = np.zeros(degree + 1)
    g[0] = f0 ** p
    for k in range(1, degree + 1):
        j = np.arange(1, k + 1)
        g[k] = np.dot(((p + 1.0) * j - k) * f[1:k + 1], g[k - 1::-1][:k]) / (k * f0)
    return g


def divide(a: np.ndarray, b: np.ndarray, degree: int) -> np.ndarray:
    return mul(a, power(b, -1.0, degree), degree)


def compose(f: np.ndarray, g: np.ndarray, degree: int) -> np.ndarray:
    """f(g(x)) for g with zero constant term"""
    g = truncate(g, degree)
    if g[0] != 0.0:
        raise ValueError("inner series of a composition must vanish at 0")
    f = np.asarray(f, dtype=float)
    result = np.zeros(degree + 1)
    result[0] = f[-1]
    for coeff in f[-2::-1]:
        result = mul(result, g, degree)
        result[0] += coeff
    return result


def revert(f: np.ndarray, degree: int) -> np.ndarray:
    """Compositional inverse g with f(g(x)) = x, for f(0) = 0 and f'(0) != 0"""
    f = truncate(f, degree + 1)
    if f[0] != 0.0 or f[1] == 0.0:
        raise ValueError("series reversion needs f(0) = 0 and f'(0) != 0")
    fprime = derivative(f)
    identity = np.zeros(degree + 1)
    identity[1] = 1.0
    g = np.zeros(degree + 1)
    g[1] = 1.0 / f[1]
    # Newton doubles the number of correct terms per pass
    for _ in range(int(math.ceil(math.log2(degree + 1))) + 2):
        residual = compose(f, g, degree) - identity
        slope = compose(fprime, g, degree)
        g = g - divide(residual, slope, degree)
        g[0] = 0.0
    return g


def evaluate(c: np.ndarray, x):
    return P.polyval(x, c)


@dataclass(frozen=True)
class UniformCoefficients:
    """
    Coefficient functions of a uniform expansion W = A·V + u^(-b_shift)·B·V'

    A = Σ A_s u^(-2s) and B = Σ B_s u^(-2s), each A_s and B_s a power series
    in the expansion variable.
    """
    a_terms: Tuple[np.ndarray, ...]
    b_terms: Tuple[np.ndarray, ...]
    b_shift: int

    def evaluate(self, u: float, x) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """A, A', B, B' at x, with the u^(-b_shift) factor folded into B"""
        x = np.asarray(x, dtype=float)
        a_val = np.zeros_like(x)
        a_der = np.zeros_like(x)
        b_val = np.zeros_like(x)
        b_der = np.zeros_like(x)
        inv = u ** -2.0
        scale = 1.0
        for term in self.a_terms:
            a_val = a_val + scale * P.polyval(x, term)
            a_der = a_der + scale * P.polyval(x, derivative(term))
            scale *= inv
        scale = u ** -float(self.b_shift)
        for term in self.b_terms:
            b_val = b_val + scale * P.polyval(x, term)
            b_der = b_der + scale * P.polyval(x, derivative(term))
            scale *= inv
        return a_val, a_der, b_val, b_der

    def at_origin(self, u: float) -> Tuple[float, float]:
        """A(0) and B'(0), with the u^(-b_shift) factor folded into B"""
        a0 = sum(term[0] * u ** (-2.0 * s) for s, term in enumerate(self.a_terms))
        b1 = sum((term[1] if len(term) > 1 else 0.0) * u ** (-2.0 * s - self.b_shift)
                 for s, term in enumerate(self.b_terms))
        return float(a0), float(b1)


def bessel_type_coefficients(psi: np.ndarray, c: float, terms: int, degree: int) -> UniformCoefficients:
    """
    Coefficients for W'' + (u² + c/ζ² + ψ(ζ)) W = 0 with V = √ζ J_ν(uζ), c = 1/4 − ν²

    ψ must be an even series. A_s come out even and B_s odd.
    """
    a_terms: List[np.ndarray] = [truncate([1.0], degree)]
    b_terms: List[np.ndarray] = []
    for s in range(terms):
        a_s = a_terms[s]
        rhs = add(derivative(derivative(a_s)), mul(psi, a_s, degree))
        if s > 0:
            b_prev = b_terms[s - 1]
            m = np.arange(len(b_prev))
            # (ζ B' − B) / ζ³ for odd B
            rhs = add(rhs, -2.0 * c * ((m - 1.0) * b_prev)[3:])
        b_der = 0.5 * truncate(rhs, degree)
        b_s = truncate(integral(b_der), degree)
        b_terms.append(b_s)
        a_next = add(-0.5 * b_der, -0.5 * integral(mul(psi, b_s, degree)))
        a_terms.append(truncate(a_next, degree))
    return UniformCoefficients(tuple(a_terms), tuple(b_terms), b_shift=2)


def airy_type_coefficients(phi: np.ndarray, terms: int, degree: int) -> UniformCoefficients:
    """
    Coefficients for W'' = (u² ζ + φ(ζ)) W with V = Ai(u^(2/3) ζ)

    W = A·Ai(u^(2/3)ζ) + u^(-4/3)·B·Ai'(u^(2/3)ζ); B is returned with b_shift 0
    and the u^(-4/3) factor is applied by the caller.
    """
    a_terms: List[np.ndarray] = [truncate([1.0], degree)]
    b_terms: List[np.ndarray] = []
    for s in range(terms):
        a_s = a_terms[s]
        g = truncate(add(mul(phi, a_s, degree), -derivative(derivative(a_s))), degree)
        k = np.arange(len(g))
        b_s = g / (2.0 * k + 1.0)
        b_terms.append(b_s)
        a_next = add(-0.5 * derivative(b_s), 0.5 * integral(mul(phi, b_s, degree)))
        a_terms.append(truncate(a_next, degree))
    return UniformCoefficients(tuple(a_terms), tuple(b_terms), b_shift=0)


def potential(t: np.ndarray, degree: int) -> np.ndarray:
    """
    r''/r for r = T'^(-1/2), the term a change of variable s = T(ζ) adds to a normal form

    W = T'^(-1/2) y turns y_ss = Q y into W_ζζ = (Q T'² + r''/r) W.
    """
    t = truncate(t, degree + 3)
    d1 = derivative(t)
    d2 = derivative(d1)
    d3 = derivative(d2)
    ratio = divide(d2, d1, degree + 1)
    return truncate(add(-0.5 * divide(d3, d1, degree), 0.75 * mul(ratio, ratio, degree)), degree)


def bessel_map(degree: int) -> np.ndarray:
    """s = T(ζ) for ζ = ∫_0^s √(1-t²) dt, an odd series about s = 0"""
    k = np.arange(degree // 2 + 2)
    forward = np.zeros(2 * len(k))
    forward[2 * k + 1] = special.binom(0.5, k) * (-1.0) ** k / (2.0 * k + 1.0)
    return revert(forward, degree)


def airy_map(degree: int) -> np.ndarray:
    """s = T(ζ) for (2/3)(-ζ)^(3/2) = ∫_s^1 √(1-t²) dt, a series about the turning point s = 1"""
    k = np.arange(degree + 2, dtype=float)
    # (-ζ)^(3/2) = e^(3/2) G(e) with e = 1 - s
    g = 1.5 * math.sqrt(2.0) * special.binom(0.5, k) * (-0.5) ** k / (k + 1.5)
    forward = np.concatenate([[0.0], power(g, 2.0 / 3.0, degree)])
    e_of_w = revert(forward, degree)
    # T(ζ) = 1 - e(-ζ)
    signs = (-1.0) ** np.arange(len(e_of_w))
    t = -e_of_w * signs
    t[0] = 1.0
    return t


def theta_map(degree: int) -> np.ndarray:
    """θ(p) solving θ - sin θ = p³/6, an odd series in p"""
    k = np.arange(degree // 2 + 3)
    # 6(θ - sin θ)/θ³ as a series in θ
    h = np.zeros(2 * len(k))
    h[2 * k] = 6.0 * (-1.0) ** k / special.factorial(2 * k + 3)
    forward = np.concatenate([[0.0], power(h, 1.0 / 3.0, degree)])
    return revert(forward, degree)


_INVERSE_NEWTON_STEPS = 40
# below this p the odd series for θ(p) is accurate to double precision
THETA_SERIES_LIMIT = 0.45
THETA_SERIES_DEGREE = 17


def bessel_abscissa(zeta, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    s and T'(ζ) for ζ = (arcsin s + s√(1-s²))/2

    Args:
        zeta: Values in [0, π/4)
        t: bessel_map series, used for the starting values

    Returns:
        (s, T') after Newton polishing on the closed form
    """
    zeta = np.asarray(zeta, dtype=float)
    s = np.clip(evaluate(t, zeta), 0.0, 1.0 - EPS)
    for _ in range(3):
        root = np.sqrt((1.0 - s) * (1.0 + s))
        s = np.clip(s - (0.5 * (np.arcsin(s) + s * root) - zeta) / root, 0.0, 1.0 - EPS)
    return s, 1.0 / np.sqrt((1.0 - s) * (1.0 + s))


@lru_cache(maxsize=1)
def _theta_series() -> np.ndarray:
    return theta_map(THETA_SERIES_DEGREE)


def _theta_of_p(p: np.ndarray) -> np.ndarray:
    """θ solving θ - sin θ = p³/6"""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    small = p < THETA_SERIES_LIMIT
    theta = np.array(p, dtype=float)
    if np.any(small):
        theta[small] = evaluate(_theta_series(), p[small])
    big = ~small
    if np.any(big):
        th = p[big].copy()
        target = p[big] ** 3 / 6.0
        for _ in range(_INVERSE_NEWTON_STEPS):
            step = (th - np.sin(th) - target) / (2.0 * np.sin(0.5 * th) ** 2)
            th = th - step
            if np.all(np.abs(step) <= 4.0 * EPS * th):
                break
        theta[big] = th
    return theta


def airy_abscissa(zeta) -> Tuple[np.ndarray, np.ndarray]:
    """
    s and T'(ζ) for the airy_map variable, ζ <= 0

    With s = cos(θ/2) the defining relation becomes (8/3)(-ζ)^(3/2) = θ - sin θ,
    solved through p = 2^(4/3)√(-ζ).
    """
    zeta = np.asarray(zeta, dtype=float)
    # rounding can leave ζ just above the turning point
    root = np.sqrt(np.maximum(-zeta, 0.0))
    theta = _theta_of_p(2.0 ** (4.0 / 3.0) * root)
    half = 0.5 * theta
    return np.cos(half), root / np.sin(half)


def airy_zeta(s) -> np.ndarray:
    """Inverse of airy_abscissa: ζ <= 0 for s in (0, 1]"""
    theta = 2.0 * np.arccos(np.asarray(s, dtype=float))
    return -(0.375 * np.maximum(theta - np.sin(theta), 0.0)) ** (2.0 / 3.0)


def origin_potential(c: float, degree: int) -> np.ndarray:
    """
    ψ for y_ss + (u²(1-s²) + c/s²) y = 0 in the bessel_map variable

    The equation becomes W'' + (u² + c/ζ² + ψ(ζ)) W = 0, an even series.
    """
    t = bessel_map(degree + 4)
    # r = T'ζ/T, so c(T'²/T² - 1/ζ²) = c(r² - 1)/ζ²
    r = divide(derivative(t), t[1:], degree + 2)
    excess = mul(r, r, degree + 2)
    excess[0] -= 1.0
    return truncate(add(c * excess[2:], -potential(t, degree)), degree)


def turning_point_potential(c: float, degree: int) -> np.ndarray:
    """
    φ for y_ss + (u²(1-s²) + c/s²) y = 0 in the airy_map variable

    The equation becomes W'' = (u² ζ + φ(ζ)) W.
    """
    t = airy_map(degree + 4)
    d1 = derivative(t)
    inverse_square = power(t, -2.0, degree)
    return truncate(add(potential(t, degree), -c * mul(mul(d1, d1, degree), inverse_square, degree)), degree)
