"""Suite orchestration"""
from .orchestrators.verification_orchestrator import VerificationOrchestrator
