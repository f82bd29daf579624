"""Self-expanders and the canonical expander over a curve flow"""
from .expander_agent import ExpanderAgent
