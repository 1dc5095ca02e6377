"""Python surface of the Markov potential game toolkit.

Everything heavy lives in the compiled ``_mpg`` module; this package just
re-exports it under stable names. Policies cross the boundary as nested
lists ``[agent][state][action]`` of probabilities, potentials as
``[state][joint_action]`` rows, and reports as plain dicts mirroring the
CLI's JSON documents.
"""

from ._mpg import (
    Game,
    GameValidationError,
    IoError,
    SchemaError,
    SolverError,
    __version__,
    check_conditions,
    counterexample_report,
    derive_potential,
    discretize_counterexample,
    evaluate_policy,
    horizon_for_epsilon,
    known_policies,
    nash_gap,
    project_to_simplex,
    run_command,
    run_psga,
    sample_trajectory,
    solve_dual,
    uniform_policy,
    validate_game,
    verify_nash,
)

__all__ = [
    "Game",
    "GameValidationError",
    "IoError",
    "SchemaError",
    "SolverError",
    "__version__",
    "check_conditions",
    "counterexample_report",
    "derive_potential",
    "discretize_counterexample",
    "evaluate_policy",
    "horizon_for_epsilon",
    "known_policies",
    "nash_gap",
    "project_to_simplex",
    "run_command",
    "run_psga",
    "sample_trajectory",
    "solve_dual",
    "uniform_policy",
    "validate_game",
    "verify_nash",
]
