"""
Extended-precision reference rules and error measures

Two independent double-double references are provided: Golub-Welsch through an
implicit-shift QL eigensolver, and Newton refinement of double-precision
guesses on the orthonormal three-term recurrence. The second one keeps full
relative accuracy on exponentially small weights, which Golub-Welsch does not.
"""
from typing import List, Optional, Tuple, Dict, Any
from dataclasses import dataclass, asdict
import logging

import mpmath
import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from .config import get_settings
from .core import (
    ComputeOptions,
    Family,
    FamilySpec,
    Normalization,
    QuadratureRule,
    Backend,
)
from .ddouble import DoubleDouble, self_test
from .errors import LengthMismatch, NoConvergence, NotComputable
from .recurrence import sturm_counts

logger = logging.getLogger(__name__)

_QL_EPS = 1e-31
_QL_MAX_ITER = 60
_NEWTON_STEPS = 4
_SCALE_EXPONENT = 400
_REFERENCE_MAX_N = 20000

ONE = DoubleDouble(1.0, 0.0)
ZERO = DoubleDouble(0.0, 0.0)


@dataclass
class ExtendedRule:
    """A Gaussian rule carried in double-double"""
    spec: FamilySpec
    nodes: DoubleDouble
    weights: DoubleDouble
    scaled_weights: Optional[DoubleDouble] = None
    anchor_node: Optional[float] = None
    normalization: Normalization = Normalization.NATURAL

    def rounded(self) -> QuadratureRule:
        """Round every entry to the nearest double"""
        scaled = None
        if self.scaled_weights is not None:
            scaled = np.asarray(self.scaled_weights.to_float(), dtype=float)
        return QuadratureRule(
            spec=self.spec,
            nodes=np.asarray(self.nodes.to_float(), dtype=float),
            weights=np.asarray(self.weights.to_float(), dtype=float),
            scaled_weights=scaled,
            anchor_node=self.anchor_node,
            normalization=self.normalization,
            backend=Backend.GOLUB_WELSCH,
        )


@dataclass
class ErrorMetrics:
    """Maximum, average and total relative errors of a rule against a reference"""
    eps_mr: float
    eps_ar: float
    eps_rt: float
    second_max_rel: float
    compared: int

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _mp_to_dd(value) -> DoubleDouble:
    hi = float(value)
    lo = float(value - hi)
    return DoubleDouble(hi, lo)


def mu0_extended(spec: FamilySpec) -> DoubleDouble:
    """Zeroth moment in double-double"""
    with mpmath.workprec(160):
        if spec.family is Family.HERMITE:
            value = mpmath.sqrt(mpmath.pi)
        elif spec.family is Family.LAGUERRE:
            value = mpmath.gamma(mpmath.mpf(spec.alpha) + 1)
        else:
            a, b = mpmath.mpf(spec.alpha), mpmath.mpf(spec.beta)
            value = mpmath.power(2, a + b + 1) * mpmath.beta(a + 1, b + 1)
        return _mp_to_dd(value)


def recurrence_coefficients(spec: FamilySpec, n: Optional[int] = None) -> Tuple[DoubleDouble, DoubleDouble]:
    """
    Monic recurrence coefficients a_k, b_k (k = 0..n-1) in double-double

    b_0 is returned as 0; the three-term relation is
    x p_k = p_{k+1} + a_k p_k + b_k p_{k-1}.
    """
    n = spec.n if n is None else n
    k = np.arange(n, dtype=float)
    zeros = np.zeros(n)
    kd = DoubleDouble(k, zeros.copy())

    if spec.family is Family.HERMITE:
        return DoubleDouble(zeros.copy(), zeros.copy()), DoubleDouble(0.5 * k, zeros.copy())

    if spec.family is Family.LAGUERRE:
        a = DoubleDouble(2.0 * k + 1.0, zeros.copy()) + spec.alpha
        b = kd * (kd + spec.alpha)
        return a, b

    alpha, beta = spec.alpha, spec.beta
    ab = DoubleDouble(alpha) + beta
    diff = DoubleDouble(beta) - alpha
    safe_k = DoubleDouble(np.maximum(k, 1.0), zeros.copy())
    safe_s = safe_k * 2.0 + ab

    a_hi = np.empty(n)
    a_lo = np.empty(n)
    a0 = diff / (ab + 2.0)
    a_hi[0], a_lo[0] = a0.hi, a0.lo
    if n > 1:
        general = diff * (ab) / (safe_s * (safe_s + 2.0))
        a_hi[1:], a_lo[1:] = general.hi[1:], general.lo[1:]

    b_hi = np.zeros(n)
    b_lo = np.zeros(n)
    if n > 1:
        b1 = (DoubleDouble(alpha) + 1.0) * (DoubleDouble(beta) + 1.0) * 4.0 / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0))
        b_hi[1], b_lo[1] = b1.hi, b1.lo
    if n > 2:
        big_k = DoubleDouble(np.maximum(k, 2.0), zeros.copy())
        big_s = big_k * 2.0 + ab
        num = big_k * (big_k + alpha) * (big_k + beta) * (big_k + ab) * 4.0
        den = big_s * big_s * (big_s + 1.0) * (big_s - 1.0)
        general = num / den
        b_hi[2:], b_lo[2:] = general.hi[2:], general.lo[2:]
    return DoubleDouble(a_hi, a_lo), DoubleDouble(b_hi, b_lo)


def _pythag(a: DoubleDouble, b: DoubleDouble) -> DoubleDouble:
    return (a * a + b * b).sqrt()


def _ql_first_row(diag: List[DoubleDouble], off: List[DoubleDouble]) -> Tuple[List[DoubleDouble], List[DoubleDouble]]:
    """
    Implicit-shift QL on a symmetric tridiagonal matrix

    Args:
        diag: Diagonal entries
        off: Sub-diagonal entries (length n-1)

    Returns:
        (eigenvalues, first components of the normalized eigenvectors), unsorted
    """
    n = len(diag)
    d = list(diag)
    e = list(off) + [ZERO]
    z = [ONE] + [ZERO] * (n - 1)
    # absolute floor for blocks whose diagonal is near zero
    floor = 1e-3 * max([abs(v.hi) for v in d] + [abs(v.hi) for v in e])

    for l in range(n):
        iterations = 0
        while True:
            m = l
            while m < n - 1:
                scale = abs(d[m].hi) + abs(d[m + 1].hi) + floor
                if abs(e[m].hi) <= _QL_EPS * scale:
                    break
                m += 1
            if m == l:
                break
            iterations += 1
            if iterations > _QL_MAX_ITER:
                raise NoConvergence(f"QL iteration did not converge for eigenvalue {l}")

            g = (d[l + 1] - d[l]) / (e[l] * 2.0)
            r = _pythag(g, ONE)
            g = d[m] - d[l] + e[l] / (g + (r if g.hi >= 0.0 else -r))
            s, c, p = ONE, ONE, ZERO
            deflated = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = _pythag(f, g)
                e[i + 1] = r
                if r.hi == 0.0:
                    d[i + 1] = d[i + 1] - p
                    e[m] = ZERO
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + c * b * 2.0
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                # first row of the accumulated rotations
                f = z[i + 1]
                z[i + 1] = s * z[i] + c * f
                z[i] = c * z[i] - s * f
            if deflated:
                continue
            d[l] = d[l] - p
            e[l] = g
            e[m] = ZERO
    return d, z


def _cost_guard(n: int, limit: int, what: str):
    if n > limit:
        raise NotComputable(f"{what} is limited to n <= {limit}, got n={n}")


def golub_welsch_extended(spec: FamilySpec, normalization: Normalization = Normalization.NATURAL) -> ExtendedRule:
    """Golub-Welsch in double-double; nodes ascending"""
    spec.validate()
    _cost_guard(spec.n, get_settings().oracle_max_n, "extended Golub-Welsch")
    a, b = recurrence_coefficients(spec)
    n = spec.n
    diag = [DoubleDouble(float(a.hi[k]), float(a.lo[k])) for k in range(n)]
    off = [DoubleDouble(float(b.hi[k]), float(b.lo[k])).sqrt() for k in range(1, n)]
    values, first = _ql_first_row(diag, off)

    order = sorted(range(n), key=lambda i: (values[i].hi, values[i].lo))
    nodes = DoubleDouble(np.array([values[i].hi for i in order]), np.array([values[i].lo for i in order]))
    unit = [first[i] * first[i] for i in order]
    weights = DoubleDouble(np.array([w.hi for w in unit]), np.array([w.lo for w in unit]))
    if normalization is Normalization.NATURAL:
        weights = weights * mu0_extended(spec)
    nodes, weights = _symmetrize_extended(spec, nodes, weights)
    return ExtendedRule(spec=spec, nodes=nodes, weights=weights, normalization=normalization)


def golub_welsch(spec: FamilySpec, opts: Optional[ComputeOptions] = None) -> QuadratureRule:
    """
    Golub-Welsch rule computed in double-double and rounded on return

    Only the largest weights keep full relative accuracy when the weights span
    many orders of magnitude.
    """
    opts = opts or ComputeOptions()
    return golub_welsch_extended(spec, opts.normalization).rounded()


def _is_symmetric(spec: FamilySpec) -> bool:
    return spec.family is Family.HERMITE or (spec.family is Family.JACOBI and spec.alpha == spec.beta)


def _symmetrize_extended(spec: FamilySpec, nodes: DoubleDouble, weights: DoubleDouble):
    if not _is_symmetric(spec):
        return nodes, weights
    n = spec.n
    mirrored_x = (nodes - DoubleDouble(nodes.hi[::-1], nodes.lo[::-1])).scale(0.5)
    mirrored_w = (weights + DoubleDouble(weights.hi[::-1], weights.lo[::-1])).scale(0.5)
    if n % 2:
        mirrored_x.hi[n // 2] = 0.0
        mirrored_x.lo[n // 2] = 0.0
    return mirrored_x, mirrored_w


def _initial_nodes(a: DoubleDouble, b_root: DoubleDouble, n: int) -> np.ndarray:
    """Eigenvalues of the rounded Jacobi matrix, ascending"""
    diag = np.asarray(a.hi[:n], dtype=float)
    if n == 1:
        return diag.copy()
    return eigvalsh_tridiagonal(diag, np.asarray(b_root.hi[1:n], dtype=float))


def _sturm_counts(a: DoubleDouble, b: DoubleDouble, n: int, points: np.ndarray) -> np.ndarray:
    """Zeros of the degree-n polynomial below each point, from the double-precision Sturm sequence"""
    return sturm_counts(np.asarray(a.hi[:n], dtype=float), np.asarray(b.hi[:n], dtype=float), points)


def _check_refined(a: DoubleDouble, b: DoubleDouble, n: int, x: DoubleDouble):
    """Every refined node is finite and isolates exactly one zero"""
    nodes = np.asarray(x.hi, dtype=float)
    if not np.all(np.isfinite(nodes)):
        raise NoConvergence("Newton refinement produced non-finite nodes")
    if n > 1 and not np.all(np.diff(nodes) > 0):
        raise NoConvergence("Newton refinement merged or reordered nodes")
    if n > 1:
        midpoints = 0.5 * (nodes[:-1] + nodes[1:])
        counts = _sturm_counts(a, b, n, midpoints)
        if not np.array_equal(counts, np.arange(1, n)):
            raise NoConvergence("refined nodes do not interlace with the Sturm counts")


def _orthonormal_sweep(a: DoubleDouble, b_root: DoubleDouble, x: DoubleDouble):
    """
    Orthonormal recurrence at every node at once

    a and b_root carry one entry beyond the degree (b_root[n] closes the last step).

    Returns:
        (p_n, p_n', Σ_{k<n} p_k², exponent) with all three scaled by 2^(-exponent·SCALE)
        (the sum by the square of that factor)
    """
    n = len(b_root) - 1
    size = len(x)
    p_prev = DoubleDouble(np.zeros(size), np.zeros(size))
    dp_prev = DoubleDouble(np.zeros(size), np.zeros(size))
    p = DoubleDouble(np.ones(size), np.zeros(size))
    dp = DoubleDouble(np.zeros(size), np.zeros(size))
    total = DoubleDouble(np.zeros(size), np.zeros(size))
    exponent = np.zeros(size, dtype=int)
    threshold = 2.0 ** _SCALE_EXPONENT

    for k in range(n):
        total = total + p * p
        shift = x - a[k]
        inv = ONE / b_root[k + 1]
        if k == 0:
            p_next = shift * p * inv
            dp_next = (shift * dp + p) * inv
        else:
            p_next = (shift * p - p_prev * b_root[k]) * inv
            dp_next = (shift * dp + p - dp_prev * b_root[k]) * inv
        p_prev, dp_prev, p, dp = p, dp, p_next, dp_next

        big = (np.abs(p.hi) > threshold) | (np.abs(dp.hi) > threshold)
        if np.any(big):
            factor = np.where(big, 2.0 ** -_SCALE_EXPONENT, 1.0)
            p, dp = p.scale(factor), dp.scale(factor)
            p_prev, dp_prev = p_prev.scale(factor), dp_prev.scale(factor)
            total = total.scale(factor * factor)
            exponent += big.astype(int)
    return p, dp, total, exponent


def reference_rule_highprec(spec: FamilySpec, opts: Optional[ComputeOptions] = None) -> ExtendedRule:
    """
    Double-double reference rule by Newton refinement on the orthonormal recurrence

    Args:
        spec: Family, degree and parameters
        opts: Normalization and scaled-weight choices

    Returns:
        ExtendedRule with ascending nodes; scaled weights when requested
    """
    opts = opts or ComputeOptions()
    spec.validate()
    _cost_guard(spec.n, _REFERENCE_MAX_N, "the extended reference")
    n = spec.n

    a, b = recurrence_coefficients(spec, n + 1)
    b_root = DoubleDouble(np.zeros(n + 1), np.zeros(n + 1))
    roots = b[1:].sqrt()
    b_root.hi[1:], b_root.lo[1:] = roots.hi, roots.lo

    x = DoubleDouble(_initial_nodes(a, b_root, n), np.zeros(n))
    for _ in range(_NEWTON_STEPS):
        p, dp, _, _ = _orthonormal_sweep(a, b_root, x)
        x = x - p / dp
    _check_refined(a, b, n, x)

    _, _, total, exponent = _orthonormal_sweep(a, b_root, x)
    mantissa = ONE / total
    if opts.normalization is Normalization.NATURAL:
        mantissa = mantissa * mu0_extended(spec)
    shift = -2 * _SCALE_EXPONENT * exponent
    x, weights = _symmetrize_extended(spec, x, mantissa.scale(np.ldexp(1.0, shift)))

    rule = ExtendedRule(spec=spec, nodes=x, weights=weights, normalization=opts.normalization)
    if opts.want_scaled:
        _attach_scaled(rule, mantissa, shift)
    return rule


def _attach_scaled(rule: ExtendedRule, mantissa: DoubleDouble, shift: np.ndarray):
    """
    Scaled weights with the family's anchor, the exponential factor evaluated by mpmath

    The weights enter as mantissa·2^shift so that weights below the double
    range still give their scaled value.
    """
    spec = rule.spec
    if spec.family is Family.JACOBI:
        rule.scaled_weights = rule.weights
        return
    n = spec.n
    with mpmath.workprec(160):
        xs = [mpmath.mpf(float(h)) + mpmath.mpf(float(l)) for h, l in zip(rule.nodes.hi, rule.nodes.lo)]
        ws = [mpmath.ldexp(mpmath.mpf(float(h)) + mpmath.mpf(float(l)), int(e))
              for h, l, e in zip(mantissa.hi, mantissa.lo, shift)]
        if spec.family is Family.HERMITE:
            rule.anchor_node = 0.0
            scaled = [wi * mpmath.exp(xi * xi) for xi, wi in zip(xs, ws)]
            scaled = [(scaled[i] + scaled[n - 1 - i]) / 2 for i in range(n)]
        else:
            s = max(range(n), key=lambda i: ws[i])
            anchor = xs[s]
            rule.anchor_node = float(anchor)
            power = mpmath.mpf(spec.alpha) + mpmath.mpf(0.5)
            scaled = [wi * mpmath.exp(xi - anchor) * mpmath.power(anchor / xi, power) for xi, wi in zip(xs, ws)]
        parts = [_mp_to_dd(v) for v in scaled]
    rule.scaled_weights = DoubleDouble(np.array([v.hi for v in parts]), np.array([v.lo for v in parts]))


def error_metrics(candidate: QuadratureRule, reference: QuadratureRule, target: str = "weights") -> ErrorMetrics:
    """
    ε_mr, ε_ar, ε_rt and the second largest relative error of candidate against reference

    Only indices present in both rules are compared. Where the reference value
    is exactly zero the absolute error stands in for the relative one.
    """
    if target not in ("nodes", "weights", "scaled_weights"):
        raise ValueError(f"unknown comparison target {target!r}")
    if candidate.spec.n != reference.spec.n:
        raise LengthMismatch(f"rules have different degrees: {candidate.spec.n} vs {reference.spec.n}")

    cand_values = getattr(candidate, target)
    ref_values = getattr(reference, target)
    if cand_values is None or ref_values is None:
        raise LengthMismatch(f"{target} missing from one of the rules")
    if len(cand_values) != len(candidate.indices) or len(ref_values) != len(reference.indices):
        raise LengthMismatch("rule values and indices have different lengths")

    common, cand_pos, ref_pos = np.intersect1d(candidate.indices, reference.indices, return_indices=True)
    if len(common) == 0:
        raise LengthMismatch("rules share no node indices")

    c = np.asarray(cand_values, dtype=float)[cand_pos]
    r = np.asarray(ref_values, dtype=float)[ref_pos]
    diff = np.abs(c - r)
    magnitude = np.abs(r)
    rel = np.where(magnitude > 0, diff / np.where(magnitude > 0, magnitude, 1.0), diff)

    total = float(np.sum(magnitude))
    ordered = np.sort(rel)[::-1]
    return ErrorMetrics(
        eps_mr=float(ordered[0]),
        eps_ar=float(np.mean(rel)),
        eps_rt=float(np.sum(diff) / total) if total > 0 else float(np.sum(diff)),
        second_max_rel=float(ordered[1]) if len(ordered) > 1 else 0.0,
        compared=int(len(common)),
    )


def ensure_precision():
    """Abort validation on platforms whose float arithmetic breaks double-double bounds"""
    self_test()
