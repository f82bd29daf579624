"""Orchestrators"""
from .verification_orchestrator import AGENTS, VerificationOrchestrator
