"""Abstract interfaces"""
from .agent_interface import VerificationAgent
