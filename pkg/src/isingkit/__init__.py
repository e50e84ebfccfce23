"""isingkit: quantum-inspired Ising machines with exact verification.

Four dynamical solvers (cac, cfc, sfc, dsb), steepest-descent refinement,
seeded multi-shot sampling, a Gray-code brute-force oracle, canonical
instance files, and an HTTP service plus CLI on top.
"""

__version__ = "0.1.0"

from .descent import DescentOutcome, is_local_minimum, steepest_descent
from .model import (
    InstanceMetadata,
    IsingInstance,
    energy,
    flip_delta,
    local_field,
    qubo_to_ising,
    validate,
)
from .oracle import ExactSolution, brute_force, enumerate_local_minima
from .sampler import (
    EnsembleReport,
    SamplingPlan,
    TtsStats,
    measure_tts,
    run_ensemble,
    samples_to_solution,
    single_shot_plus_descent,
    split_seed,
)
from .solvers import (
    CimParams,
    DivergenceError,
    SbParams,
    ShotResult,
    SolverState,
    Variant,
    default_params,
    run_shot,
)

__all__ = [
    "CimParams",
    "DescentOutcome",
    "DivergenceError",
    "EnsembleReport",
    "ExactSolution",
    "InstanceMetadata",
    "IsingInstance",
    "SamplingPlan",
    "SbParams",
    "ShotResult",
    "SolverState",
    "TtsStats",
    "Variant",
    "__version__",
    "brute_force",
    "default_params",
    "energy",
    "enumerate_local_minima",
    "flip_delta",
    "is_local_minimum",
    "local_field",
    "measure_tts",
    "qubo_to_ising",
    "run_ensemble",
    "run_shot",
    "samples_to_solution",
    "single_shot_plus_descent",
    "split_seed",
    "steepest_descent",
    "validate",
]
