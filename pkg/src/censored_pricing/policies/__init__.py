from .base import CASES, EstimationFailure, Policy, PolicyDecision
from .baselines import ExploreThenCommit, OraclePolicy, UCBGrid
from .c20cb import C20CB, GridState, Stage1Accumulators, finish_stage1, grid_init_step, opt_price, record_feedback
from .schedule import ConstantSchedule, stage1_length

__all__ = [
    "CASES", "C20CB", "ConstantSchedule", "EstimationFailure", "ExploreThenCommit", "GridState",
    "OraclePolicy", "Policy", "PolicyDecision", "Stage1Accumulators", "UCBGrid", "finish_stage1",
    "grid_init_step", "opt_price", "record_feedback", "stage1_length",
]
