from .heat_verification_agent import HeatVerificationAgent
