"""penflow: multi-agent consensus optimization via an exact l1 penalty.

Agents minimize a sum of nonsmooth convex objectives over the
intersection of their private constraint sets by running a projected
descent flow on a penalized objective whose edge-l1 term enforces
consensus exactly once its factor beats n times the largest subgradient
bound. The package contains the geometric primitives, the penalty
calibration, the discretized flow, a centralized ground-truth solver,
convergence diagnostics, and an experiment CLI.
"""

from .diagnostics import (
    RateFit,
    RunRecord,
    consensus_error,
    fit_exponential_rate,
    lyapunov_v,
    optimality_residual,
    write_trajectory_csv,
)
from .dynamics import (
    AgentState,
    IntegratorConfig,
    euler_step,
    run,
    velocities,
    velocity,
)
from .errors import (
    ConfigError,
    DiagnosticError,
    DomainError,
    InfeasibleProblemError,
    NumericalFailureError,
    PenflowError,
)
from .harness import (
    ExperimentConfig,
    ExperimentResult,
    build,
    generate_example1,
    generate_example2,
    run_experiment,
    sweep,
)
from .network import NetworkGraph, build_topology, is_connected
from .objectives import (
    L1PlusLinear,
    QuadPlusL1,
    lipschitz_bound,
    sign_select,
    strong_convexity_modulus,
    subgradient,
    value,
)
from .oracle import OracleSolution, intersection_project, solve_centralized
from .penalty import (
    ProblemInstance,
    choose_penalty,
    consensus_distance,
    make_problem,
    penalized_value,
    penalty_h,
)
from .sets import Ball, Box, normal_residual, project, tangent_project

__version__ = "0.1.0"

__all__ = [
    "AgentState",
    "Ball",
    "Box",
    "ConfigError",
    "DiagnosticError",
    "DomainError",
    "ExperimentConfig",
    "ExperimentResult",
    "InfeasibleProblemError",
    "IntegratorConfig",
    "L1PlusLinear",
    "NetworkGraph",
    "NumericalFailureError",
    "OracleSolution",
    "PenflowError",
    "ProblemInstance",
    "QuadPlusL1",
    "RateFit",
    "RunRecord",
    "build",
    "build_topology",
    "choose_penalty",
    "consensus_distance",
    "consensus_error",
    "euler_step",
    "fit_exponential_rate",
    "generate_example1",
    "generate_example2",
    "intersection_project",
    "is_connected",
    "lipschitz_bound",
    "lyapunov_v",
    "make_problem",
    "normal_residual",
    "optimality_residual",
    "penalized_value",
    "penalty_h",
    "project",
    "run",
    "run_experiment",
    "sign_select",
    "solve_centralized",
    "strong_convexity_modulus",
    "subgradient",
    "sweep",
    "tangent_project",
    "value",
    "velocities",
    "velocity",
    "write_trajectory_csv",
]
