import logging

from services.quadrature.core import ComputeOptions, Family, FamilySpec, QuadratureRule, RegionDecision
from services.quadrature.laguerre import decide_laguerre, gauss_laguerre

from ..dispatch_engine import FamilyHandler

logger = logging.getLogger(__name__)


class LaguerreQuadratureAgent(FamilyHandler):
    """Agent for generalized Gauss-Laguerre rules"""

    def __init__(self):
        super().__init__("laguerre_quadrature_agent")

    def validate_request(self, spec: FamilySpec) -> bool:
        return spec.family is Family.LAGUERRE

    def explain(self, spec: FamilySpec, opts: ComputeOptions) -> RegionDecision:
        return decide_laguerre(spec, opts)

    def compute(self, spec: FamilySpec, opts: ComputeOptions) -> QuadratureRule:
        """Compute a Gauss-Laguerre rule through the selected backend"""
        rule = gauss_laguerre(spec, opts)
        if rule.underflow_count:
            logger.info(f"Laguerre n={spec.n}: {rule.underflow_count} weights below the double range")
        if rule.computed_count < spec.n:
            logger.info(f"Laguerre n={spec.n}: {rule.computed_count} nodes kept after subsampling")
        return self.check_rule(rule)
