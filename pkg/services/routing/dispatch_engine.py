from typing import Callable, Dict, Optional, Tuple
from dataclasses import dataclass, replace
from datetime import datetime
import logging

import numpy as np

from services.quadrature.core import (
    Backend,
    ComputeOptions,
    Family,
    FamilySpec,
    Method,
    QuadratureRule,
    RegionDecision,
)
from services.quadrature.errors import (
    InvalidParameter,
    NonOscillatory,
    NotComputable,
    NotConverged,
    QuadratureError,
    StalledIteration,
    StepTooLarge,
)

logger = logging.getLogger(__name__)

# Alias parameter rule: (alpha, beta) as given -> (alpha, beta) used
ParameterRule = Callable[[float, float], Tuple[float, float]]

# Numerical failures that the Golub-Welsch backend can stand in for
RECOVERABLE_ERRORS = (NonOscillatory, NotComputable, NotConverged, StalledIteration, StepTooLarge)


@dataclass
class DispatchResult:
    """Rule produced by a handler, with the decision that picked the backend"""
    rule: QuadratureRule
    decision: RegionDecision
    handler_id: str
    processing_time: float


class FamilyHandler:
    """Base class for per-family quadrature handlers"""

    def __init__(self, handler_id: str):
        self.handler_id = handler_id

    def compute(self, spec: FamilySpec, opts: ComputeOptions) -> QuadratureRule:
        """Compute the rule - to be implemented by subclasses"""
        raise NotImplementedError

    def explain(self, spec: FamilySpec, opts: ComputeOptions) -> RegionDecision:
        """Backend the handler would use for this request"""
        raise NotImplementedError

    def validate_request(self, spec: FamilySpec) -> bool:
        """Validate if this handler can process the request"""
        return True

    def check_rule(self, rule: QuadratureRule) -> QuadratureRule:
        """Reject rules that break node ordering or weight positivity"""
        backend = rule.backend.value if rule.backend else "unknown backend"
        label = f"{self.handler_id}: {rule.spec.family.value} n={rule.spec.n} via {backend}"
        if not np.all(np.isfinite(rule.nodes)) or np.any(np.diff(rule.nodes) <= 0):
            raise NotComputable(f"{label} has nodes that are not strictly increasing")
        if np.any(np.isnan(rule.weights)) or np.any(rule.weights < 0):
            raise NotComputable(f"{label} has negative or NaN weights")
        return rule


class DispatchEngine:
    """Central routing engine from family names to quadrature handlers"""

    def __init__(self):
        self.handlers: Dict[Family, FamilyHandler] = {}
        self.routing_rules: Dict[str, Tuple[Family, Optional[ParameterRule]]] = {
            "jacobi": (Family.JACOBI, None),
            "laguerre": (Family.LAGUERRE, None),
            "hermite": (Family.HERMITE, None),
            "legendre": (Family.JACOBI, lambda alpha, beta: (0.0, 0.0)),
            "gegenbauer": (Family.JACOBI, lambda alpha, beta: (alpha, alpha)),
            "chebyshev1": (Family.JACOBI, lambda alpha, beta: (-0.5, -0.5)),
            "chebyshev2": (Family.JACOBI, lambda alpha, beta: (0.5, 0.5)),
        }

    def register_handler(self, family: Family, handler: FamilyHandler):
        """Register a family agent"""
        self.handlers[family] = handler
        logger.info(f"Registered handler {handler.handler_id} for {family.value}")

    @property
    def family_names(self):
        return sorted(self.routing_rules)

    def resolve(self, name: str, n: int, alpha: float = 0.0, beta: float = 0.0) -> FamilySpec:
        """
        Build the spec for a family name, applying alias parameters

        Args:
            name: Family or alias name (case-insensitive)
            n: Number of nodes
            alpha, beta: Parameters; ignored where the family fixes them

        Returns:
            Validated FamilySpec
        """
        key = name.strip().lower()
        if key not in self.routing_rules:
            raise InvalidParameter(f"unknown family {name!r}; expected one of {', '.join(self.family_names)}")
        family, parameters = self.routing_rules[key]
        if parameters is not None:
            alpha, beta = parameters(alpha, beta)
        if family is Family.HERMITE:
            alpha, beta = 0.0, 0.0
        elif family is Family.LAGUERRE:
            beta = 0.0
        return FamilySpec(family, n, float(alpha), float(beta)).validate()

    def dispatch(self, spec: FamilySpec, opts: Optional[ComputeOptions] = None) -> DispatchResult:
        """
        Route a request to the family handler

        Args:
            spec: Validated family spec
            opts: Compute options

        Returns:
            DispatchResult with the rule, the backend decision and timing
        """
        start_time = datetime.now()
        opts = opts or ComputeOptions()

        handler = self._select_handler(spec)
        decision = handler.explain(spec, opts)

        try:
            rule = handler.compute(spec, opts)
        except RECOVERABLE_ERRORS as e:
            if opts.method_override is not Method.AUTO or decision.backend is Backend.GOLUB_WELSCH:
                logger.error(f"Handler {handler.handler_id} failed: {e}")
                raise
            # Fallback to the eigenvalue backend
            logger.warning(f"Handler {handler.handler_id} failed on {decision.backend.value} ({e}); using golub_welsch")
            decision = RegionDecision(Backend.GOLUB_WELSCH, f"fallback after {type(e).__name__}")
            rule = handler.compute(spec, replace(opts, method_override=Method.GOLUB_WELSCH))
        except QuadratureError as e:
            logger.error(f"Handler {handler.handler_id} failed: {e}")
            raise
        except Exception as e:
            logger.error(f"Handler {handler.handler_id} failed: {e}")
            raise QuadratureError(f"{spec.family.value} n={spec.n} failed: {e}") from e

        processing_time = (datetime.now() - start_time).total_seconds()
        logger.info(
            f"{handler.handler_id} computed {rule.computed_count}/{spec.n} nodes "
            f"via {decision.backend.value} in {processing_time:.3f}s"
        )
        return DispatchResult(
            rule=rule,
            decision=decision,
            handler_id=handler.handler_id,
            processing_time=processing_time,
        )

    def explain(self, spec: FamilySpec, opts: Optional[ComputeOptions] = None) -> RegionDecision:
        """Backend decision without computing the rule"""
        return self._select_handler(spec).explain(spec, opts or ComputeOptions())

    def _select_handler(self, spec: FamilySpec) -> FamilyHandler:
        """Select the registered handler for the spec's family"""
        if not self.handlers:
            from .agents import register_agents
            register_agents(self)

        handler = self.handlers.get(spec.family)
        if handler is None or not handler.validate_request(spec):
            raise InvalidParameter(f"no handler registered for {spec.family.value}")
        return handler


# Global dispatch engine instance
dispatch_engine = DispatchEngine()
