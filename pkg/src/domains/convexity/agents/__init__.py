"""Convexity chain verification"""
from .convexity_chain_agent import ConvexityChainAgent
