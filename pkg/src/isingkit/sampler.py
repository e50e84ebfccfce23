"""Single-shot and multi-shot sampling protocols.

A sampling plan fans a base seed out into per-shot seeds through a
SplitMix64 mix, runs the shots (optionally across a thread pool — the
integrator kernels release the GIL), applies steepest descent to each
readout when enabled, and aggregates energies, hit counts against a
reference, and wall-clock totals.  Every shot is a pure function of
(instance, plan, shot index), so reports are identical whatever the
worker count or completion order.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

from .descent import steepest_descent
from .model import IsingInstance
from .solvers import (
    CimParams,
    DivergenceError,
    SbParams,
    ShotResult,
    Variant,
    default_params,
    run_shot,
)

__all__ = [
    "EnsembleReport",
    "HIT_TOL",
    "SamplingPlan",
    "TtsStats",
    "measure_tts",
    "run_ensemble",
    "samples_to_solution",
    "single_shot_plus_descent",
    "split_seed",
]

HIT_TOL = 1e-6

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def split_seed(base_seed: int, index: int) -> int:
    """Derive the per-shot seed: output ``index + 1`` of the SplitMix64
    stream seeded with ``base_seed``.  Collision-free in practice and
    stable across platforms."""
    if index < 0:
        raise ValueError(f"shot index must be >= 0, got {index}")
    z = (base_seed + (index + 1) * _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


@dataclass(frozen=True)
class SamplingPlan:
    """What to run: variant, hyperparameters (None = per-instance
    defaults), shot count, seeding, descent toggle, and worker bound."""

    variant: Variant = Variant.CFC
    params: CimParams | SbParams | None = None
    shots: int = 100
    base_seed: int = 0
    apply_descent: bool = True
    worker_limit: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "variant", Variant.coerce(self.variant))
        if self.shots < 1:
            raise ValueError(f"shots must be >= 1, got {self.shots}")
        if self.worker_limit is not None and self.worker_limit < 1:
            raise ValueError(f"worker_limit must be >= 1, got {self.worker_limit}")


@dataclass
class EnsembleReport:
    """Aggregated outcome of a multi-shot run.

    ``energies`` is indexed by shot (NaN for diverged shots); ``best`` is
    the lowest-energy shot with ties going to the lowest index.
    ``hit_count`` / ``samples_to_first_hit`` are populated only when the
    instance carries a reference energy.
    """

    best: ShotResult
    energies: list[float]
    hit_count: int | None
    samples_to_first_hit: int | None
    total_wall_time: float
    per_shot_mean_wall_time: float
    diverged: list[tuple[int, int]] = field(default_factory=list)


def _run_indexed_shot(
    inst: IsingInstance, plan: SamplingPlan, params, index: int
) -> tuple[ShotResult | None, int | None]:
    seed = split_seed(plan.base_seed, index)
    started = time.perf_counter()
    try:
        shot = run_shot(plan.variant, inst, params, seed)
    except DivergenceError as err:
        return None, err.step_index
    if plan.apply_descent:
        outcome = steepest_descent(inst, shot.config)
        shot = replace(
            shot,
            config=outcome.config,
            energy=outcome.energy,
            raw_energy_before_descent=shot.energy,
            wall_time=time.perf_counter() - started,
        )
    return shot, None


def run_ensemble(inst: IsingInstance, plan: SamplingPlan) -> EnsembleReport:
    """Run the plan and aggregate.  Raises :class:`DivergenceError` only
    if every single shot diverged."""
    params = plan.params if plan.params is not None else default_params(plan.variant, inst)
    started = time.perf_counter()
    workers = plan.worker_limit or os.cpu_count() or 1
    workers = min(workers, plan.shots)
    if workers == 1:
        outcomes = [_run_indexed_shot(inst, plan, params, k) for k in range(plan.shots)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(
                pool.map(lambda k: _run_indexed_shot(inst, plan, params, k), range(plan.shots))
            )
    total = time.perf_counter() - started

    energies: list[float] = []
    diverged: list[tuple[int, int]] = []
    best: ShotResult | None = None
    for k, (shot, failed_step) in enumerate(outcomes):
        if shot is None:
            energies.append(float("nan"))
            diverged.append((k, failed_step))
            continue
        energies.append(shot.energy)
        if best is None or shot.energy < best.energy:
            best = shot
    if best is None:
        raise DivergenceError(plan.variant, diverged[0][1])

    hit_count = None
    first_hit = None
    reference = inst.metadata.reference_energy
    if reference is not None:
        hit_count = sum(
            1 for e in energies if math.isfinite(e) and abs(e - reference) <= HIT_TOL
        )
        first_hit = samples_to_solution_from_energies(energies, reference, HIT_TOL)
    return EnsembleReport(
        best=best,
        energies=energies,
        hit_count=hit_count,
        samples_to_first_hit=first_hit,
        total_wall_time=total,
        per_shot_mean_wall_time=total / plan.shots,
        diverged=diverged,
    )


def samples_to_solution_from_energies(
    energies: list[float], reference: float, tol: float = HIT_TOL
) -> int | None:
    for k, e in enumerate(energies):
        if math.isfinite(e) and e <= reference + tol:
            return k + 1
    return None


def samples_to_solution(
    report: EnsembleReport, reference: float, tol: float = HIT_TOL
) -> int | None:
    """1-based index of the first shot reaching ``reference`` within
    ``tol``; None when no shot did."""
    return samples_to_solution_from_energies(report.energies, reference, tol)


def single_shot_plus_descent(
    inst: IsingInstance,
    variant: Variant | str,
    params: CimParams | SbParams | None = None,
    seed: int = 0,
) -> ShotResult:
    """The single-shot protocol: one trajectory, then steepest descent.
    ``raw_energy_before_descent`` records the pre-descent readout."""
    started = time.perf_counter()
    shot = run_shot(variant, inst, params, seed)
    outcome = steepest_descent(inst, shot.config)
    return replace(
        shot,
        config=outcome.config,
        energy=outcome.energy,
        raw_energy_before_descent=shot.energy,
        wall_time=time.perf_counter() - started,
    )


@dataclass(frozen=True)
class TtsStats:
    """Wall-clock cost of one executed plan (file I/O excluded)."""

    shots: int
    total_seconds: float
    per_shot_mean_seconds: float
    best_energy: float


def measure_tts(inst: IsingInstance, plan: SamplingPlan) -> TtsStats:
    """Run the plan purely for timing and summarise."""
    report = run_ensemble(inst, plan)
    return TtsStats(
        shots=plan.shots,
        total_seconds=report.total_wall_time,
        per_shot_mean_seconds=report.per_shot_mean_wall_time,
        best_energy=report.best.energy,
    )
