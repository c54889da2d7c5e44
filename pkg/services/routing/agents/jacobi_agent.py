import logging

from services.quadrature.core import ComputeOptions, Family, FamilySpec, QuadratureRule, RegionDecision
from services.quadrature.jacobi import ITERATIVE_MAX_PARAMETER, decide_jacobi, gauss_jacobi

from ..dispatch_engine import FamilyHandler

logger = logging.getLogger(__name__)


class JacobiQuadratureAgent(FamilyHandler):
    """Agent for Gauss-Jacobi rules and their named special cases"""

    def __init__(self):
        super().__init__("jacobi_quadrature_agent")

    def validate_request(self, spec: FamilySpec) -> bool:
        return spec.family is Family.JACOBI

    def explain(self, spec: FamilySpec, opts: ComputeOptions) -> RegionDecision:
        return decide_jacobi(spec, opts)

    def compute(self, spec: FamilySpec, opts: ComputeOptions) -> QuadratureRule:
        """Compute a Gauss-Jacobi rule through the selected backend"""
        # Step 1: flag parameters the iterative backend may not handle
        if max(spec.alpha, spec.beta) > ITERATIVE_MAX_PARAMETER:
            logger.warning(
                f"alpha={spec.alpha}, beta={spec.beta} above {ITERATIVE_MAX_PARAMETER:g}; "
                "only the Golub-Welsch override is supported there"
            )

        # Step 2: compute
        rule = gauss_jacobi(spec, opts)

        # Step 3: sanity check the ordering and signs
        return self.check_rule(rule)
