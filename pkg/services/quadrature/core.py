from typing import Any, Callable, Dict, Optional
from dataclasses import dataclass, replace
from enum import Enum
import math
import logging

import numpy as np
from scipy import special

from .errors import InvalidParameter, NotComputable, Overflow

logger = logging.getLogger(__name__)

# log of the largest finite double
LOG_MAX_DOUBLE = 709.782712893384
# smallest positive normal double
TINY = np.finfo(float).tiny


class Family(Enum):
    JACOBI = "jacobi"
    LAGUERRE = "laguerre"
    HERMITE = "hermite"


class Normalization(Enum):
    NATURAL = "natural"
    UNIT = "unit"


class Method(Enum):
    AUTO = "auto"
    ITERATIVE = "iterative"
    ASYMPTOTIC = "asymptotic"
    GOLUB_WELSCH = "gw"


class Backend(Enum):
    LOOKUP = "lookup"
    CLOSED_FORM = "closed_form"
    ITERATIVE = "iterative"
    ASYMPTOTIC = "asymptotic"
    GOLUB_WELSCH = "golub_welsch"


@dataclass(frozen=True)
class FamilySpec:
    """Classical family, degree and parameters of a Gaussian rule"""
    family: Family
    n: int
    alpha: float = 0.0
    beta: float = 0.0

    def validate(self) -> "FamilySpec":
        """Check the parameter bounds and return self"""
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise InvalidParameter(f"n must be an integer, got {self.n!r}")
        if self.n < 1:
            raise InvalidParameter(f"n must be at least 1, got {self.n}")
        if self.family in (Family.JACOBI, Family.LAGUERRE):
            if not math.isfinite(self.alpha) or self.alpha <= -1:
                raise InvalidParameter(f"alpha must be a finite number > -1, got {self.alpha}")
        if self.family is Family.JACOBI:
            if not math.isfinite(self.beta) or self.beta <= -1:
                raise InvalidParameter(f"beta must be a finite number > -1, got {self.beta}")
        return self

    def with_degree(self, n: int) -> "FamilySpec":
        return replace(self, n=n)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"family": self.family.value, "n": int(self.n)}
        if self.family in (Family.JACOBI, Family.LAGUERRE):
            data["alpha"] = self.alpha
        if self.family is Family.JACOBI:
            data["beta"] = self.beta
        return data


@dataclass(frozen=True)
class ComputeOptions:
    """Caller choices that do not change which polynomial is being integrated"""
    method_override: Method = Method.AUTO
    normalization: Normalization = Normalization.NATURAL
    subsample_log_threshold: Optional[float] = None
    want_scaled: bool = False

    def __post_init__(self):
        threshold = self.subsample_log_threshold
        if threshold is not None and not (threshold < 0):
            raise InvalidParameter(f"subsample log threshold must be negative, got {threshold}")


@dataclass(frozen=True)
class RegionDecision:
    """Backend chosen for a spec and the rule that chose it"""
    backend: Backend
    reason: str


@dataclass
class QuadratureRule:
    """Nodes and weights of a Gaussian rule, in ascending node order"""
    spec: FamilySpec
    nodes: np.ndarray
    weights: np.ndarray
    scaled_weights: Optional[np.ndarray] = None
    anchor_node: Optional[float] = None
    normalization: Normalization = Normalization.NATURAL
    computed_count: int = 0
    backend: Optional[Backend] = None
    underflow_count: int = 0
    # 1-based positions of the computed nodes inside the full n-point rule
    indices: Optional[np.ndarray] = None

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.scaled_weights is not None:
            self.scaled_weights = np.asarray(self.scaled_weights, dtype=float)
        if not self.computed_count:
            self.computed_count = len(self.nodes)
        if self.indices is None:
            self.indices = np.arange(1, len(self.nodes) + 1)

    @property
    def is_complete(self) -> bool:
        return self.computed_count == self.spec.n


def log_gamma_ratio(x: float, a: float, b: float) -> float:
    """
    log Γ(x+a) − log Γ(x+b) without the cancellation of two large log-gammas

    Args:
        x: Large variable (typically a degree)
        a, b: Shifts with x+a > 0 and x+b > 0

    Returns:
        The log of the gamma ratio
    """
    if a == b:
        return 0.0
    if x + min(a, b) < 20.0:
        return float(math.log(special.poch(x + b, a - b)))

    main = (a - b) * math.log(x) + (x + a - 0.5) * math.log1p(a / x) - (x + b - 0.5) * math.log1p(b / x)
    return main - (a - b) + _stirling_tail(x + a) - _stirling_tail(x + b)


_STIRLING_COEFFS = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)


def _stirling_tail(y: float) -> float:
    inv = 1.0 / y
    inv2 = inv * inv
    total = 0.0
    power = inv
    for coeff in _STIRLING_COEFFS:
        total += coeff * power
        power *= inv2
    return total


def log_mu0(spec: FamilySpec) -> float:
    """log of the zeroth moment of the family's weight function"""
    if spec.family is Family.HERMITE:
        return 0.5 * math.log(math.pi)
    if spec.family is Family.LAGUERRE:
        return float(special.gammaln(spec.alpha + 1.0))
    a, b = spec.alpha, spec.beta
    return ((a + b + 1.0) * math.log(2.0) + float(special.gammaln(a + 1.0))
            + float(special.gammaln(b + 1.0)) - float(special.gammaln(a + b + 2.0)))


def _jacobi_moment_ratios(alpha: float, beta: float, k: int) -> np.ndarray:
    """m_j / m_0 for j = 0..k from the integration-by-parts recurrence"""
    ratios = np.zeros(k + 1)
    ratios[0] = 1.0
    if k >= 1:
        ratios[1] = (beta - alpha) / (alpha + beta + 2.0)
    for j in range(1, k):
        ratios[j + 1] = (j * ratios[j - 1] + (beta - alpha) * ratios[j]) / (j + alpha + beta + 2.0)
    return ratios


def log_exact_moment(spec: FamilySpec, k: int) -> float:
    """
    log |∫ x^k w(x) dx|; −inf when the moment vanishes

    Args:
        spec: Family and parameters (n is ignored)
        k: Moment order

    Returns:
        Logarithm of the absolute value of the moment
    """
    if k < 0:
        raise InvalidParameter(f"moment order must be nonnegative, got {k}")
    if spec.family is Family.HERMITE:
        if k % 2:
            return -math.inf
        return float(special.gammaln((k + 1) / 2.0))
    if spec.family is Family.LAGUERRE:
        return float(special.gammaln(k + spec.alpha + 1.0))
    ratio = _jacobi_moment_ratios(spec.alpha, spec.beta, k)[k]
    if ratio == 0.0:
        return -math.inf
    return log_mu0(spec) + math.log(abs(ratio))


def exact_moment(spec: FamilySpec, k: int) -> float:
    """
    ∫ x^k w(x) dx over the family's interval, from closed forms

    Raises Overflow when the value is not representable; log_exact_moment
    gives the logarithm in that case.
    """
    if k < 0:
        raise InvalidParameter(f"moment order must be nonnegative, got {k}")
    if spec.family is Family.HERMITE:
        if k % 2:
            return 0.0
        value = float(special.gamma((k + 1) / 2.0))
    elif spec.family is Family.LAGUERRE:
        value = float(special.gamma(k + spec.alpha + 1.0))
    else:
        ratios = _jacobi_moment_ratios(spec.alpha, spec.beta, k)
        return math.exp(log_mu0(spec)) * float(ratios[k])

    if not math.isfinite(value):
        raise Overflow(f"moment {k} of {spec.family.value} overflows; use log_exact_moment")
    return value


def exact_moments(spec: FamilySpec, k_max: int) -> np.ndarray:
    """All moments 0..k_max as an array"""
    if spec.family is Family.JACOBI:
        return math.exp(log_mu0(spec)) * _jacobi_moment_ratios(spec.alpha, spec.beta, k_max)
    return np.array([exact_moment(spec, k) for k in range(k_max + 1)])


def finalize_weights(log_weights: np.ndarray) -> tuple:
    """
    Exponentiate log weights, flushing subnormal results to exact zero

    Returns:
        (weights, underflow_count)
    """
    weights = np.exp(log_weights)
    underflow = weights < TINY
    count = int(np.count_nonzero(underflow))
    if count:
        weights[underflow] = 0.0
        logger.warning(f"{count} weights underflowed and were set to zero")
    return weights, count


def mu0(spec: FamilySpec) -> float:
    """Zeroth moment of the weight function; Overflow when not representable"""
    if spec.family is Family.HERMITE:
        return math.sqrt(math.pi)
    if spec.family is Family.LAGUERRE:
        value = float(special.gamma(spec.alpha + 1.0))
    else:
        value = float(special.beta(spec.alpha + 1.0, spec.beta + 1.0))
        if value > 0.0 and math.isfinite(value):
            value = value * 2.0 ** (spec.alpha + spec.beta + 1.0)
        else:
            value = math.exp(min(log_mu0(spec), LOG_MAX_DOUBLE + 1.0))
    if not math.isfinite(value):
        raise Overflow(
            f"zeroth moment of {spec.family.value} with alpha={spec.alpha} overflows; "
            "request unit normalization"
        )
    return value


def unit_log_weights(log_weights: np.ndarray) -> np.ndarray:
    """Shift log weights sharing an arbitrary common constant so they sum to 1"""
    return log_weights - float(special.logsumexp(log_weights))


def apply_normalization(weights: np.ndarray, spec: FamilySpec, normalization: Normalization) -> np.ndarray:
    """Unit weights times μ0 when the natural normalization is requested"""
    if normalization is Normalization.UNIT:
        return weights
    return weights * mu0(spec)


def quadrature(spec: FamilySpec, opts: Optional[ComputeOptions] = None) -> QuadratureRule:
    """
    Compute a Gaussian rule through the backend chosen by the family selector

    Args:
        spec: Family, degree and parameters
        opts: Method override, normalization, subsampling and scaling choices

    Returns:
        QuadratureRule with nodes in ascending order
    """
    from services.routing.dispatch_engine import dispatch_engine

    opts = opts or ComputeOptions()
    spec.validate()
    return dispatch_engine.dispatch(spec, opts).rule


def subsample_mask(log_weights: np.ndarray, threshold: Optional[float]) -> np.ndarray:
    """Weights whose ratio to the largest one is at least exp(threshold)"""
    if threshold is None or len(log_weights) == 0:
        return np.ones(len(log_weights), dtype=bool)
    return log_weights - np.max(log_weights) >= threshold


class WeightRatioStop:
    """
    Sweep stop predicate: fires once a weight drops below exp(threshold) times
    the largest weight seen so far

    log_weight(zero, state) gives the log weight of a freshly found zero.
    """

    def __init__(self, threshold: float, log_weight: Callable[[float, Any], float], largest: float = -math.inf):
        self.threshold = threshold
        self.log_weight = log_weight
        self.largest = largest
        self.triggered = False

    def __call__(self, index: int, zero: float, state: Any) -> bool:
        value = self.log_weight(zero, state)
        self.largest = max(self.largest, value)
        if value - self.largest < self.threshold:
            self.triggered = True
        return self.triggered


LogRatio = Callable[[np.ndarray, float], np.ndarray]


def assemble_rule(spec: FamilySpec, opts: ComputeOptions, nodes: np.ndarray, log_weights: np.ndarray,
                  backend: Backend, indices: Optional[np.ndarray] = None,
                  log_ratio: Optional[LogRatio] = None, anchor: Optional[float] = None) -> QuadratureRule:
    """
    Sort, normalize, subsample and scale a rule given as log weights

    Args:
        spec: Family and parameters of the rule
        opts: Normalization, subsampling and scaling choices
        nodes: Computed nodes in any order
        log_weights: Log weights on a common arbitrary scale when all n nodes
            are present, absolute natural log weights otherwise
        backend: Backend that produced the nodes
        indices: 1-based positions of the nodes in the full rule
        log_ratio: log of the weight-function factor at x relative to the anchor;
            scaled weights are w·exp(-log_ratio), the plain weights when omitted
        anchor: Anchor node for log_ratio, the node of largest weight when omitted

    Returns:
        QuadratureRule in ascending node order
    """
    nodes = np.asarray(nodes, dtype=float)
    log_weights = np.asarray(log_weights, dtype=float)
    indices = np.arange(1, len(nodes) + 1) if indices is None else np.asarray(indices)
    order = np.argsort(nodes, kind="stable")
    nodes, log_weights, indices = nodes[order], log_weights[order], indices[order]
    # -inf marks a weight that underflowed
    if not np.all(np.isfinite(nodes)) or np.any(np.isnan(log_weights)) or np.any(log_weights == np.inf):
        raise NotComputable(f"{backend.value} produced non-finite nodes or weights")
    if np.any(np.diff(nodes) <= 0):
        raise NotComputable(f"{backend.value} produced coincident nodes")

    if len(nodes) == spec.n:
        unit = unit_log_weights(log_weights)
    else:
        unit = log_weights - log_mu0(spec)
    keep = subsample_mask(unit, opts.subsample_log_threshold)
    nodes, unit, indices = nodes[keep], unit[keep], indices[keep]

    weights, underflow = finalize_weights(unit)
    weights = apply_normalization(weights, spec, opts.normalization)
    if anchor is None:
        anchor = float(nodes[int(np.argmax(unit))])

    scaled = None
    if opts.want_scaled:
        if log_ratio is None:
            scaled = weights.copy()
        else:
            level = unit if opts.normalization is Normalization.UNIT else unit + log_mu0(spec)
            scaled = np.exp(level - log_ratio(nodes, anchor))

    return QuadratureRule(
        spec=spec,
        nodes=nodes,
        weights=weights,
        scaled_weights=scaled,
        anchor_node=anchor,
        normalization=opts.normalization,
        computed_count=len(nodes),
        backend=backend,
        underflow_count=underflow,
        indices=indices,
    )


def subsample_rule(rule: QuadratureRule, threshold: Optional[float]) -> QuadratureRule:
    """Drop, in place, the weights of a finished rule that fall below exp(threshold) times the largest"""
    if threshold is None:
        return rule
    with np.errstate(divide="ignore"):
        keep = subsample_mask(np.log(rule.weights), threshold)
    rule.nodes = rule.nodes[keep]
    rule.weights = rule.weights[keep]
    if rule.scaled_weights is not None:
        rule.scaled_weights = rule.scaled_weights[keep]
    rule.indices = rule.indices[keep]
    rule.computed_count = len(rule.nodes)
    return rule
