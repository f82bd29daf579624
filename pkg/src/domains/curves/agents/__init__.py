from .curve_flow_agent import CurveFlowAgent
