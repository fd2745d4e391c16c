"""Discrimination of two qubit channels with multi-shot measurement strategies."""

__version__ = "0.1.0"

from .channels import ChannelFamily, ChannelSpec, InputState, apply, pure_state
from .helstrom import HelstromResult, Povm, PovmCase, WeightedPair, optimal_povm
from .linalg import HermitianEigen, eigen_hermitian
from .optimizer import BoxDomain, OptResult, OptimizerConfig, maximize
from .strategies import (
    InputSchedule,
    StrategyEval,
    StrategyKind,
    eval_bayesian,
    eval_global,
    eval_markovian,
    simulate_protocol,
)

__all__ = [
    "BoxDomain",
    "ChannelFamily",
    "ChannelSpec",
    "HelstromResult",
    "HermitianEigen",
    "InputSchedule",
    "InputState",
    "OptResult",
    "OptimizerConfig",
    "Povm",
    "PovmCase",
    "StrategyEval",
    "StrategyKind",
    "WeightedPair",
    "apply",
    "eigen_hermitian",
    "eval_bayesian",
    "eval_global",
    "eval_markovian",
    "maximize",
    "optimal_povm",
    "pure_state",
    "simulate_protocol",
]
