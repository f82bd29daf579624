"""Core domain models"""
from .curve import FlowHistory, HarnackSample, SupportCurve
from .grid import GridField, RadialProfile, SpaceTimeSurface
from .heat import FundamentalSolution, PointSourceSolution, SymmetricMatrix2
from .reports import ChainLink, ChainReport, CheckResult, ConvexityReport, SuiteResult
