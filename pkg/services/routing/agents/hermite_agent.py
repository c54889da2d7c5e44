import logging

from services.quadrature.core import ComputeOptions, Family, FamilySpec, QuadratureRule, RegionDecision
from services.quadrature.hermite import decide_hermite, gauss_hermite

from ..dispatch_engine import FamilyHandler

logger = logging.getLogger(__name__)


class HermiteQuadratureAgent(FamilyHandler):
    """Agent for Gauss-Hermite rules"""

    def __init__(self):
        super().__init__("hermite_quadrature_agent")

    def validate_request(self, spec: FamilySpec) -> bool:
        return spec.family is Family.HERMITE

    def explain(self, spec: FamilySpec, opts: ComputeOptions) -> RegionDecision:
        return decide_hermite(spec, opts)

    def compute(self, spec: FamilySpec, opts: ComputeOptions) -> QuadratureRule:
        rule = gauss_hermite(spec, opts)
        if rule.computed_count < spec.n:
            logger.info(f"Hermite n={spec.n}: {rule.computed_count} nodes kept after subsampling")
        return self.check_rule(rule)
