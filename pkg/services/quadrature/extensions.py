"""
Gauss-Radau and Gauss-Lobatto rules, and barycentric weights

Radau and Lobatto interior nodes are the nodes of a Gaussian rule with one
parameter shifted per fixed endpoint; the interior weights follow by dividing
out the extra endpoint factor and the endpoint weights have closed forms in
gamma functions, evaluated in log space.
"""
from typing import Optional, Union
from dataclasses import dataclass, replace
from enum import Enum
import math
import logging

import numpy as np
from scipy import special

from .core import (
    Backend,
    ComputeOptions,
    Family,
    FamilySpec,
    Normalization,
    QuadratureRule,
    apply_normalization,
    finalize_weights,
    log_gamma_ratio,
    log_mu0,
)
from .errors import InvalidParameter, NegativeWeight
from .jacobi import gauss_jacobi
from .laguerre import gauss_laguerre

logger = logging.getLogger(__name__)


class Variant(Enum):
    GAUSS = "gauss"
    RADAU_LEFT = "radau_left"
    RADAU_RIGHT = "radau_right"
    LOBATTO = "lobatto"


@dataclass
class BoundaryRule:
    """Radau or Lobatto rule: n interior nodes plus one or two endpoints, ascending"""
    spec: FamilySpec
    variant: Variant
    nodes: np.ndarray
    weights: np.ndarray
    exactness_degree: int
    normalization: Normalization = Normalization.NATURAL
    backend: Optional[Backend] = None
    underflow_count: int = 0

    @property
    def boundary_weights(self) -> np.ndarray:
        if self.variant is Variant.RADAU_LEFT:
            return self.weights[:1]
        if self.variant is Variant.RADAU_RIGHT:
            return self.weights[-1:]
        return self.weights[[0, -1]]


def _interior(shifted: FamilySpec, opts: ComputeOptions) -> QuadratureRule:
    """Unit-normalized Gaussian rule with the shifted parameters, the full node set"""
    inner = replace(opts, normalization=Normalization.UNIT, subsample_log_threshold=None, want_scaled=False)
    if shifted.family is Family.LAGUERRE:
        return gauss_laguerre(shifted, inner)
    return gauss_jacobi(shifted, inner)


def _build(spec: FamilySpec, shifted: FamilySpec, variant: Variant, opts: ComputeOptions,
           log_factor: np.ndarray, log_left: Optional[float], log_right: Optional[float],
           exactness: int) -> BoundaryRule:
    """
    Combine interior and endpoint weights

    log_factor is log of the endpoint factor divided out of the interior
    weights; log_left and log_right are natural log endpoint weights.
    """
    interior = _interior(shifted, opts)
    with np.errstate(divide="ignore"):
        log_w = np.log(interior.weights) + log_mu0(shifted) - log_factor(interior.nodes)
    nodes = [interior.nodes]
    logs = [log_w]
    if log_left is not None:
        nodes.insert(0, np.array([-1.0 if spec.family is Family.JACOBI else 0.0]))
        logs.insert(0, np.array([log_left]))
    if log_right is not None:
        nodes.append(np.array([1.0]))
        logs.append(np.array([log_right]))

    unit = np.concatenate(logs) - log_mu0(spec)
    weights, underflow = finalize_weights(unit)
    weights = apply_normalization(weights, spec, opts.normalization)
    return BoundaryRule(
        spec=spec,
        variant=variant,
        nodes=np.concatenate(nodes),
        weights=weights,
        exactness_degree=exactness,
        normalization=opts.normalization,
        backend=interior.backend,
        underflow_count=underflow,
    )


def _gammaln(x: float) -> float:
    return float(special.gammaln(x))


def radau_laguerre(n: int, alpha: float, opts: Optional[ComputeOptions] = None) -> BoundaryRule:
    """
    Gauss-Radau-Laguerre rule with the fixed node x = 0

    Interior nodes are those of Gauss-Laguerre with parameter α+1 and
    w_i = w_i^R / x_i; w_0 = Γ(α+1)Γ(α+2)n!/Γ(n+α+2). Exact to degree 2n.
    """
    opts = opts or ComputeOptions()
    spec = FamilySpec(Family.LAGUERRE, n, alpha).validate()
    shifted = FamilySpec(Family.LAGUERRE, n, alpha + 1.0)
    log_w0 = _gammaln(alpha + 1.0) + _gammaln(alpha + 2.0) + log_gamma_ratio(n, 1.0, alpha + 2.0)
    return _build(spec, shifted, Variant.RADAU_LEFT, opts, np.log, log_w0, None, 2 * n)


def _radau_endpoint(n: int, a: float, b: float) -> float:
    """log weight of the endpoint where the (1±x)^b factor vanishes"""
    return ((a + b + 1.0) * math.log(2.0) + _gammaln(b + 1.0) + _gammaln(b + 2.0)
            + log_gamma_ratio(n, 1.0, b + 2.0) + log_gamma_ratio(n, a + 1.0, a + b + 2.0))


def radau_jacobi(n: int, alpha: float, beta: float, endpoint: int = -1,
                 opts: Optional[ComputeOptions] = None) -> BoundaryRule:
    """
    Gauss-Radau-Jacobi rule with the fixed node x = endpoint (±1)

    Args:
        n: Number of interior nodes
        alpha, beta: Jacobi parameters
        endpoint: -1 uses Gauss-Jacobi(α, β+1), +1 uses Gauss-Jacobi(α+1, β)
        opts: Method override and normalization

    Returns:
        BoundaryRule exact to degree 2n
    """
    opts = opts or ComputeOptions()
    spec = FamilySpec(Family.JACOBI, n, alpha, beta).validate()
    if endpoint == -1:
        shifted = FamilySpec(Family.JACOBI, n, alpha, beta + 1.0)
        return _build(spec, shifted, Variant.RADAU_LEFT, opts, np.log1p,
                      _radau_endpoint(n, alpha, beta), None, 2 * n)
    if endpoint == 1:
        shifted = FamilySpec(Family.JACOBI, n, alpha + 1.0, beta)
        return _build(spec, shifted, Variant.RADAU_RIGHT, opts, lambda x: np.log1p(-x),
                      None, _radau_endpoint(n, beta, alpha), 2 * n)
    raise InvalidParameter(f"Radau endpoint must be -1 or +1, got {endpoint}")


def _lobatto_endpoint(n: int, a: float, b: float) -> float:
    return ((a + b + 1.0) * math.log(2.0) + _gammaln(b + 1.0) + _gammaln(b + 2.0)
            + log_gamma_ratio(n, 1.0, b + 2.0) + log_gamma_ratio(n, a + 2.0, a + b + 3.0))


def lobatto_jacobi(n: int, alpha: float, beta: float, opts: Optional[ComputeOptions] = None) -> BoundaryRule:
    """
    Gauss-Lobatto-Jacobi rule with both endpoints as nodes

    Interior nodes are those of Gauss-Jacobi(α+1, β+1) with
    w_i = w_i^R / (1 - x_i²). Exact to degree 2n+1.
    """
    opts = opts or ComputeOptions()
    spec = FamilySpec(Family.JACOBI, n, alpha, beta).validate()
    shifted = FamilySpec(Family.JACOBI, n, alpha + 1.0, beta + 1.0)
    return _build(spec, shifted, Variant.LOBATTO, opts, lambda x: np.log1p(-x) + np.log1p(x),
                  _lobatto_endpoint(n, alpha, beta), _lobatto_endpoint(n, beta, alpha), 2 * n + 1)


def barycentric_weights(rule: Union[QuadratureRule, BoundaryRule],
                        variant: Optional[Variant] = None) -> np.ndarray:
    """
    Barycentric weights at the nodes of a Gauss, Radau or Lobatto rule

    The weights are fixed up to a common constant, chosen so that max |u_i| = 1.

    Raises:
        NegativeWeight when a weight is negative or NaN
        InvalidParameter for a subsampled rule or an unsupported variant
    """
    if variant is None:
        variant = rule.variant if isinstance(rule, BoundaryRule) else Variant.GAUSS
    if isinstance(rule, QuadratureRule) and not rule.is_complete:
        raise InvalidParameter("barycentric weights need the complete rule, not a subsample")

    x = np.asarray(rule.nodes, dtype=float)
    w = np.asarray(rule.weights, dtype=float)
    if np.any(np.isnan(w)) or np.any(w < 0):
        raise NegativeWeight("barycentric weights need nonnegative quadrature weights")

    family = rule.spec.family
    alpha, beta = rule.spec.alpha, rule.spec.beta
    magnitude = w.copy()
    if variant is Variant.GAUSS:
        if family is Family.LAGUERRE:
            magnitude = x * w
        elif family is Family.JACOBI:
            magnitude = (1.0 - x) * (1.0 + x) * w
    elif family is Family.LAGUERRE and variant is Variant.RADAU_LEFT:
        magnitude[0] = (alpha + 1.0) * w[0]
    elif family is Family.JACOBI and variant is Variant.RADAU_LEFT:
        magnitude[1:] = (1.0 - x[1:]) * w[1:]
        magnitude[0] = 2.0 * (beta + 1.0) * w[0]
    elif family is Family.JACOBI and variant is Variant.RADAU_RIGHT:
        magnitude[:-1] = (1.0 + x[:-1]) * w[:-1]
        magnitude[-1] = 2.0 * (alpha + 1.0) * w[-1]
    elif family is Family.JACOBI and variant is Variant.LOBATTO:
        magnitude[0] = (beta + 1.0) * w[0]
        magnitude[-1] = (alpha + 1.0) * w[-1]
    else:
        raise InvalidParameter(f"no {variant.value} barycentric weights for {family.value}")

    signs = np.where(np.arange(len(x)) % 2 == 0, 1.0, -1.0)
    u = signs * np.sqrt(magnitude)
    return u / np.max(np.abs(u))


def barycentric_interpolate(nodes: np.ndarray, u: np.ndarray, values: np.ndarray, x) -> np.ndarray:
    """Evaluate the interpolant through (nodes, values) with barycentric weights u at x"""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    diff = x[:, None] - nodes[None, :]
    exact = diff == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = u[None, :] / diff
        result = (terms @ values) / terms.sum(axis=1)
    rows, cols = np.nonzero(exact)
    result[rows] = values[cols]
    return result
