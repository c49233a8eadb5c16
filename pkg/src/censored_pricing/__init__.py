"""Dynamic pricing under linear demand censored by adversarial perishable inventory."""
from .config import ConfigError, ExperimentConfig, load_config
from .experiment import fit_scaling_slope, run, sweep_horizons
from .inventory import ExhaustedSequenceError, InventoryGenerator
from .market import (ContractViolation, InvalidInstanceError, KnownBounds, Market, Observation,
                     ProblemInstance, validate_instance)
from .noise import DegenerateNoise, TriangularNoise, TruncatedGaussianNoise, UniformNoise, make_noise
from .oracle import RegretLedger, RevenueCurve, optimal_price, revenue, revenue_derivative
from .policies import C20CB, ConstantSchedule, EstimationFailure, ExploreThenCommit, OraclePolicy, UCBGrid
from .simulate import RunSummary, run_replica

__all__ = [
    "C20CB", "ConfigError", "ConstantSchedule", "ContractViolation", "DegenerateNoise", "EstimationFailure",
    "ExhaustedSequenceError", "ExperimentConfig", "ExploreThenCommit", "InvalidInstanceError",
    "InventoryGenerator", "KnownBounds", "Market", "Observation", "OraclePolicy", "ProblemInstance",
    "RegretLedger", "RevenueCurve", "RunSummary", "TriangularNoise", "TruncatedGaussianNoise", "UCBGrid",
    "UniformNoise", "fit_scaling_slope", "load_config", "make_noise", "optimal_price", "revenue",
    "revenue_derivative", "run", "run_replica", "sweep_horizons", "validate_instance",
]
