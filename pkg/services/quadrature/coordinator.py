from typing import Any, Dict, List, Optional, Union
from dataclasses import asdict, dataclass, field
from datetime import datetime
import math
import logging

import numpy as np

from services.routing.dispatch_engine import dispatch_engine

from .core import (
    ComputeOptions,
    Family,
    FamilySpec,
    Method,
    Normalization,
    QuadratureRule,
    RegionDecision,
)
from .errors import InvalidParameter
from .extensions import BoundaryRule, Variant, barycentric_weights, lobatto_jacobi, radau_jacobi, radau_laguerre
from .oracle import ErrorMetrics, ensure_precision, error_metrics, golub_welsch, reference_rule_highprec

logger = logging.getLogger(__name__)

TARGETS = ("nodes", "weights", "scaled_weights")


@dataclass
class QuadratureRequest:
    """One rule request as it arrives from the CLI or the API"""
    family: str
    n: int
    alpha: float = 0.0
    beta: float = 0.0
    method: str = "auto"
    normalization: str = "natural"
    scaled: bool = False
    subsample_log10: Optional[float] = None
    radau: Optional[str] = None
    lobatto: bool = False
    barycentric: bool = False


@dataclass
class OutputRecord:
    """One node of a computed rule; index is 1-based within the full rule"""
    index: int
    node: float
    weight: float
    scaled_weight: Optional[float] = None
    barycentric: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {key: value for key, value in asdict(self).items() if value is not None}


@dataclass
class QuadratureResult:
    spec: FamilySpec
    variant: Variant
    decision: RegionDecision
    rule: Union[QuadratureRule, BoundaryRule]
    records: List[OutputRecord]
    computed_count: int
    underflow_count: int
    processing_time: float

    @property
    def backend(self) -> str:
        return self.decision.backend.value

    def to_dict(self) -> Dict[str, Any]:
        spec = self.spec.to_dict()
        if self.variant is not Variant.GAUSS:
            spec["variant"] = self.variant.value
        return {
            "spec": spec,
            "backend": self.backend,
            "reason": self.decision.reason,
            "computed_count": self.computed_count,
            "underflow_count": self.underflow_count,
            "records": [record.to_dict() for record in self.records],
        }


@dataclass
class ValidationReport:
    """Error measures of a computed rule against the extended-precision reference"""
    spec: FamilySpec
    backend: str
    reference: str
    target: str
    tolerance: float
    metrics: Dict[str, ErrorMetrics] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.metrics[self.target].eps_mr <= self.tolerance

    def to_dict(self) -> Dict[str, Any]:
        return {
            "spec": self.spec.to_dict(),
            "backend": self.backend,
            "reference": self.reference,
            "target": self.target,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "metrics": {name: m.to_dict() for name, m in self.metrics.items()},
        }


class QuadratureCoordinator:
    """Runs a request through validation, backend choice, computation and output shaping"""

    def __init__(self):
        self._initialize_routing_engine()
        logger.info("Quadrature coordinator initialized")

    def _initialize_routing_engine(self):
        """Register the family agents unless already present"""
        if not dispatch_engine.handlers:
            from services.routing.agents import register_agents
            register_agents(dispatch_engine)

    def build_options(self, request: QuadratureRequest) -> ComputeOptions:
        """ComputeOptions from the request's string and log10 fields"""
        try:
            method = Method(request.method.lower())
        except ValueError:
            raise InvalidParameter(f"unknown method {request.method!r}")
        try:
            normalization = Normalization(request.normalization.lower())
        except ValueError:
            raise InvalidParameter(f"unknown normalization {request.normalization!r}")

        threshold = None
        if request.subsample_log10 is not None:
            if not request.subsample_log10 < 0:
                raise InvalidParameter(f"subsample log10 threshold must be negative, got {request.subsample_log10}")
            threshold = request.subsample_log10 * math.log(10.0)
        return ComputeOptions(
            method_override=method,
            normalization=normalization,
            subsample_log_threshold=threshold,
            want_scaled=request.scaled,
        )

    def variant_of(self, request: QuadratureRequest) -> Variant:
        if request.lobatto and request.radau:
            raise InvalidParameter("choose either a Radau or a Lobatto rule, not both")
        if request.lobatto:
            return Variant.LOBATTO
        if request.radau is None:
            return Variant.GAUSS
        side = request.radau.lower()
        if side == "left":
            return Variant.RADAU_LEFT
        if side == "right":
            return Variant.RADAU_RIGHT
        raise InvalidParameter(f"Radau side must be 'left' or 'right', got {request.radau!r}")

    def resolve(self, request: QuadratureRequest):
        """Validated (spec, options, variant) for a request"""
        spec = dispatch_engine.resolve(request.family, request.n, request.alpha, request.beta)
        opts = self.build_options(request)
        variant = self.variant_of(request)
        if variant is not Variant.GAUSS:
            self._check_boundary_request(spec, variant, opts)
        return spec, opts, variant

    def _check_boundary_request(self, spec: FamilySpec, variant: Variant, opts: ComputeOptions):
        if spec.family is Family.HERMITE:
            raise InvalidParameter("Hermite rules have no finite endpoint to fix")
        if spec.family is Family.LAGUERRE and variant is not Variant.RADAU_LEFT:
            raise InvalidParameter("Laguerre supports only the left Radau rule")
        if opts.subsample_log_threshold is not None or opts.want_scaled:
            raise InvalidParameter("Radau and Lobatto rules are computed in full, without scaled weights")

    def _interior_spec(self, spec: FamilySpec, variant: Variant) -> FamilySpec:
        """Gaussian spec whose nodes are the interior nodes of the boundary rule"""
        if variant is Variant.RADAU_LEFT:
            if spec.family is Family.LAGUERRE:
                return FamilySpec(spec.family, spec.n, spec.alpha + 1.0)
            return FamilySpec(spec.family, spec.n, spec.alpha, spec.beta + 1.0)
        if variant is Variant.RADAU_RIGHT:
            return FamilySpec(spec.family, spec.n, spec.alpha + 1.0, spec.beta)
        if variant is Variant.LOBATTO:
            return FamilySpec(spec.family, spec.n, spec.alpha + 1.0, spec.beta + 1.0)
        return spec

    def explain(self, request: QuadratureRequest) -> RegionDecision:
        """Backend decision for a request without computing it"""
        spec, opts, variant = self.resolve(request)
        return dispatch_engine.explain(self._interior_spec(spec, variant), opts)

    def process(self, request: QuadratureRequest) -> QuadratureResult:
        """
        Compute the rule described by a request

        Args:
            request: Family, degree, parameters and output choices

        Returns:
            QuadratureResult with one OutputRecord per computed node
        """
        start_time = datetime.now()

        # Step 1: Validate the request
        spec, opts, variant = self.resolve(request)

        # Step 2: Compute the Gaussian or boundary rule
        if variant is Variant.GAUSS:
            dispatched = dispatch_engine.dispatch(spec, opts)
            rule, decision = dispatched.rule, dispatched.decision
        else:
            decision = dispatch_engine.explain(self._interior_spec(spec, variant), opts)
            rule = self._boundary_rule(spec, variant, opts)

        # Step 3: Barycentric weights on request
        bary = barycentric_weights(rule, variant) if request.barycentric else None

        # Step 4: Build output records
        records = self._build_records(rule, variant, bary)

        processing_time = (datetime.now() - start_time).total_seconds()
        logger.info(f"Processed {request.family} n={request.n} ({variant.value}) in {processing_time:.3f}s")
        return QuadratureResult(
            spec=spec,
            variant=variant,
            decision=decision,
            rule=rule,
            records=records,
            computed_count=len(records),
            underflow_count=rule.underflow_count,
            processing_time=processing_time,
        )

    def _boundary_rule(self, spec: FamilySpec, variant: Variant, opts: ComputeOptions) -> BoundaryRule:
        if spec.family is Family.LAGUERRE:
            return radau_laguerre(spec.n, spec.alpha, opts)
        if variant is Variant.LOBATTO:
            return lobatto_jacobi(spec.n, spec.alpha, spec.beta, opts)
        endpoint = -1 if variant is Variant.RADAU_LEFT else 1
        return radau_jacobi(spec.n, spec.alpha, spec.beta, endpoint, opts)

    def _build_records(self, rule, variant: Variant, bary: Optional[np.ndarray]) -> List[OutputRecord]:
        if variant is Variant.GAUSS:
            indices = rule.indices
            scaled = rule.scaled_weights
        else:
            indices = np.arange(1, len(rule.nodes) + 1)
            scaled = None

        records = []
        for i in range(len(rule.nodes)):
            records.append(OutputRecord(
                index=int(indices[i]),
                node=float(rule.nodes[i]),
                weight=float(rule.weights[i]),
                scaled_weight=float(scaled[i]) if scaled is not None else None,
                barycentric=float(bary[i]) if bary is not None else None,
            ))
        return records

    def validate(self, request: QuadratureRequest, target: str = "weights",
                 tolerance: float = 1e-13) -> ValidationReport:
        """
        Compare a computed rule with the extended-precision reference

        Gegenbauer, Hermite and Laguerre rules are checked against the Newton
        reference; other Jacobi rules against extended Golub-Welsch.
        """
        if target not in TARGETS:
            raise InvalidParameter(f"unknown validation target {target!r}; expected one of {', '.join(TARGETS)}")
        if request.radau or request.lobatto:
            raise InvalidParameter("validation covers Gaussian rules only")
        ensure_precision()

        # Step 1: Candidate rule with scaled weights for every target
        spec, opts, _ = self.resolve(request)
        scaled_opts = ComputeOptions(
            method_override=opts.method_override,
            normalization=opts.normalization,
            subsample_log_threshold=opts.subsample_log_threshold,
            want_scaled=True,
        )
        dispatched = dispatch_engine.dispatch(spec, scaled_opts)
        candidate = dispatched.rule

        # Step 2: Reference rule
        symmetric = spec.family is not Family.JACOBI or spec.alpha == spec.beta
        if symmetric:
            reference = reference_rule_highprec(
                spec, ComputeOptions(normalization=opts.normalization, want_scaled=True)
            ).rounded()
            reference_name = "newton_extended"
        else:
            reference = golub_welsch(spec, ComputeOptions(normalization=opts.normalization))
            reference.scaled_weights = reference.weights.copy()
            reference_name = "golub_welsch_extended"

        # Step 3: Error measures
        report = ValidationReport(
            spec=spec,
            backend=dispatched.decision.backend.value,
            reference=reference_name,
            target=target,
            tolerance=tolerance,
        )
        for name in TARGETS:
            report.metrics[name] = error_metrics(candidate, reference, name)

        level = logging.INFO if report.passed else logging.WARNING
        logger.log(level, f"Validation of {spec.family.value} n={spec.n}: {target} eps_mr="
                          f"{report.metrics[target].eps_mr:.3e} (tolerance {tolerance:.1e})")
        return report


# Global coordinator instance
quadrature_coordinator = QuadratureCoordinator()
