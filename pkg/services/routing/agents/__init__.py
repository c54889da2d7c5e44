# Agent handlers for the classical quadrature families
from services.quadrature.core import Family

from .hermite_agent import HermiteQuadratureAgent
from .jacobi_agent import JacobiQuadratureAgent
from .laguerre_agent import LaguerreQuadratureAgent


def register_agents(engine):
    """Register one agent per family on a dispatch engine"""
    engine.register_handler(Family.JACOBI, JacobiQuadratureAgent())
    engine.register_handler(Family.LAGUERRE, LaguerreQuadratureAgent())
    engine.register_handler(Family.HERMITE, HermiteQuadratureAgent())
