import os
import logging
from datetime import datetime
from typing import Dict, List, Literal, Optional

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field
import uvicorn
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

from services.quadrature.coordinator import QuadratureRequest, quadrature_coordinator
from services.quadrature.errors import InvalidParameter, NotComputable, Overflow

# Initialize FastAPI app
app = FastAPI(
    title="RapidQuad Gaussian Quadrature Service",
    description="Gauss-Jacobi, Gauss-Laguerre and Gauss-Hermite rules by fixed-point sweeps and asymptotic expansions",
    version="1.0.0"
)

# Add CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],  # Modify this in production
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Configure logging
logging.basicConfig(level=os.getenv("QUADRULE_LOG_LEVEL", "INFO").upper())
logger = logging.getLogger(__name__)


# Pydantic models
class RuleRequest(BaseModel):
    family: str = Field(..., description="jacobi, gegenbauer, legendre, chebyshev1, chebyshev2, laguerre or hermite")
    n: int = Field(..., description="number of nodes")
    alpha: float = 0.0
    beta: float = 0.0
    method: Literal["auto", "iterative", "asymptotic", "gw"] = "auto"
    normalization: Literal["natural", "unit"] = "natural"
    scaled: bool = False
    subsample_log10: Optional[float] = None
    radau: Optional[Literal["left", "right"]] = None
    lobatto: bool = False
    barycentric: bool = False

    def to_request(self) -> QuadratureRequest:
        return QuadratureRequest(**self.model_dump())


class ValidationRequest(RuleRequest):
    target: Literal["nodes", "weights", "scaled_weights"] = "weights"
    tolerance: float = 1e-13

    def to_request(self) -> QuadratureRequest:
        return QuadratureRequest(**self.model_dump(exclude={"target", "tolerance"}))


class RuleRecord(BaseModel):
    index: int
    node: float
    weight: float
    scaled_weight: Optional[float] = None
    barycentric: Optional[float] = None


class RuleResponse(BaseModel):
    spec: Dict
    backend: str
    reason: str
    computed_count: int
    underflow_count: int
    records: List[RuleRecord]


class ExplainResponse(BaseModel):
    backend: str
    reason: str


def _raise_http(e: Exception, action: str):
    """Map library errors onto HTTP status codes"""
    if isinstance(e, InvalidParameter):
        raise HTTPException(status_code=422, detail=str(e))
    if isinstance(e, (NotComputable, Overflow)):
        raise HTTPException(status_code=409, detail=str(e))
    logger.error(f"{action} failed: {e}")
    raise HTTPException(status_code=500, detail=f"{action} failed: {str(e)}")


@app.post("/quadrature", response_model=RuleResponse, response_model_exclude_none=True)
def compute_rule(body: RuleRequest):
    """Compute a Gaussian, Radau or Lobatto rule"""
    try:
        result = quadrature_coordinator.process(body.to_request())
        return result.to_dict()
    except Exception as e:
        _raise_http(e, "Quadrature computation")


@app.get("/quadrature/explain", response_model=ExplainResponse)
def explain_rule(
    family: str,
    n: int,
    alpha: float = 0.0,
    beta: float = 0.0,
    method: str = Query("auto"),
    radau: Optional[str] = None,
    lobatto: bool = False,
):
    """Backend the selector would use, without computing the rule"""
    try:
        decision = quadrature_coordinator.explain(QuadratureRequest(
            family=family, n=n, alpha=alpha, beta=beta, method=method, radau=radau, lobatto=lobatto
        ))
        return {"backend": decision.backend.value, "reason": decision.reason}
    except Exception as e:
        _raise_http(e, "Quadrature computation")


@app.post("/validate")
def validate_rule(body: ValidationRequest):
    """Error measures of a computed rule against the extended-precision reference"""
    try:
        report = quadrature_coordinator.validate(body.to_request(), body.target, body.tolerance)
        return report.to_dict()
    except Exception as e:
        _raise_http(e, "Validation")


@app.get("/health")
async def health_check():
    """Health check endpoint"""
    return {"status": "healthy", "timestamp": datetime.now().isoformat()}


if __name__ == "__main__":
    uvicorn.run(
        "main:app",
        host=os.getenv("HOST", "0.0.0.0"),
        port=int(os.getenv("PORT", 8000)),
        reload=os.getenv("ENVIRONMENT") == "development"
    )
