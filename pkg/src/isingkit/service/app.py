"""FastAPI application wiring the solver suite to HTTP endpoints.

Domain errors (bad instances, unknown override keys, oracle caps,
all-shots-diverged) map to 400 with a plain-text detail; schema errors are
FastAPI's usual 422.  All endpoints are deterministic given the request,
apart from wall-time fields.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import asdict, fields as dc_fields

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..io import (
    InstanceFormatError,
    generate_random_instance,
    instance_from_document,
    instance_to_document,
)
from ..model import InstanceMetadata, IsingInstance, qubo_to_ising
from ..oracle import BRUTE_FORCE_CAP, brute_force
from ..sampler import EnsembleReport, SamplingPlan, run_ensemble, samples_to_solution
from ..solvers import (
    CimParams,
    DivergenceError,
    SbParams,
    ShotResult,
    Variant,
    default_params,
    params_with_overrides,
)
from . import schemas


def _bad_request(message: str) -> HTTPException:
    return HTTPException(status_code=400, detail=message)


def _core_instance(model: schemas.InstanceModel) -> IsingInstance:
    try:
        return instance_from_document(model.model_dump())
    except InstanceFormatError as err:
        raise _bad_request(f"invalid instance: {err}") from None


def _instance_model(inst: IsingInstance) -> schemas.InstanceModel:
    return schemas.InstanceModel.model_validate(instance_to_document(inst))


def _shot_model(shot: ShotResult) -> schemas.ShotModel:
    return schemas.ShotModel(
        config=[int(v) for v in shot.config],
        energy=shot.energy,
        raw_energy_before_descent=shot.raw_energy_before_descent,
        steps_run=shot.steps_run,
        wall_time_s=shot.wall_time,
        seed=shot.seed,
    )


def _resolve_params(variant: Variant, inst: IsingInstance, overrides: dict[str, float]):
    params = default_params(variant, inst)
    if overrides:
        try:
            params = params_with_overrides(params, overrides)
        except ValueError as err:
            raise _bad_request(str(err)) from None
    return params


def _solve_response(
    req: schemas.SolveRequest, inst: IsingInstance, report: EnsembleReport, params
) -> schemas.SolveResponse:
    return schemas.SolveResponse(
        variant=req.variant,
        shots=req.shots,
        base_seed=req.base_seed,
        descent=req.descent,
        params=asdict(params),
        best=_shot_model(report.best),
        energies=[None if math.isnan(e) else e for e in report.energies],
        hit_count=report.hit_count,
        samples_to_first_hit=report.samples_to_first_hit,
        diverged=[
            schemas.DivergedShotModel(shot_index=k, step_index=step)
            for k, step in report.diverged
        ],
        total_wall_s=report.total_wall_time,
        per_shot_mean_wall_s=report.per_shot_mean_wall_time,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="isingkit", version=__version__)

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/instances/generate", response_model=schemas.InstanceModel)
    def generate(req: schemas.GenerateRequest) -> schemas.InstanceModel:
        metadata = None
        if req.metadata is not None:
            metadata = InstanceMetadata(**req.metadata.model_dump())
        inst = generate_random_instance(req.kind, req.n, req.seed, metadata=metadata)
        return _instance_model(inst)

    @app.post("/solve", response_model=schemas.SolveResponse)
    def solve(req: schemas.SolveRequest) -> schemas.SolveResponse:
        inst = _core_instance(req.instance)
        variant = Variant(req.variant)
        params = _resolve_params(variant, inst, req.overrides)
        plan = SamplingPlan(
            variant=variant,
            params=params,
            shots=req.shots,
            base_seed=req.base_seed,
            apply_descent=req.descent,
            worker_limit=req.workers,
        )
        try:
            report = run_ensemble(inst, plan)
        except DivergenceError as err:
            raise _bad_request(f"all {req.shots} shots diverged: {err}") from None
        return _solve_response(req, inst, report, params)

    @app.post("/exact", response_model=schemas.ExactResponse)
    def exact(req: schemas.ExactRequest) -> schemas.ExactResponse:
        inst = _core_instance(req.instance)
        try:
            solution = brute_force(inst)
        except ValueError as err:
            raise _bad_request(str(err)) from None
        return schemas.ExactResponse(
            ground_energy=solution.ground_energy,
            ground_configs=[[int(v) for v in cfg] for cfg in solution.ground_configs],
            evaluations=solution.evaluations,
        )

    @app.post("/convert", response_model=schemas.InstanceModel)
    def convert(req: schemas.ConvertRequest) -> schemas.InstanceModel:
        metadata = None
        if req.metadata is not None:
            metadata = InstanceMetadata(**req.metadata.model_dump())
        try:
            inst = qubo_to_ising(req.Q, req.constant, metadata=metadata)
        except ValueError as err:
            raise _bad_request(str(err)) from None
        return _instance_model(inst)

    @app.post("/bench", response_model=schemas.BenchResponse)
    def bench(req: schemas.BenchRequest) -> schemas.BenchResponse:
        instances = [_core_instance(m) for m in req.instances]
        references: list[float] = []
        for k, inst in enumerate(instances):
            if inst.metadata.reference_energy is not None:
                references.append(inst.metadata.reference_energy)
            elif inst.n <= BRUTE_FORCE_CAP:
                references.append(brute_force(inst).ground_energy)
            else:
                raise _bad_request(
                    f"instance {k} has no reference_energy and n = {inst.n} exceeds "
                    f"the exact-oracle cap of {BRUTE_FORCE_CAP}; supply a reference"
                )
        union = set()
        for cls in (CimParams, SbParams):
            union.update(f.name for f in dc_fields(cls))
        for key in req.overrides:
            if key not in union:
                raise _bad_request(
                    f"unknown override key {key!r}; valid keys: " + ", ".join(sorted(union))
                )
        rows = []
        for name in req.variants:
            variant = Variant(name)
            solved = 0
            samples: list[int] = []
            per_instance = []
            total_wall = 0.0
            for inst, reference in zip(instances, references):
                params = default_params(variant, inst)
                accepted = {f.name for f in dc_fields(type(params))}
                applicable = {k: v for k, v in req.overrides.items() if k in accepted}
                if applicable:
                    params = params_with_overrides(params, applicable)
                plan = SamplingPlan(
                    variant=variant,
                    params=params,
                    shots=req.shots,
                    base_seed=req.base_seed,
                    apply_descent=req.descent,
                    worker_limit=req.workers,
                )
                try:
                    report = run_ensemble(inst, plan)
                except DivergenceError:
                    per_instance.append(
                        schemas.BenchInstanceModel(
                            label=inst.metadata.label,
                            reference_energy=reference,
                            best_energy=None,
                            samples_to_solution=None,
                            solved=False,
                        )
                    )
                    continue
                total_wall += report.total_wall_time
                sts = samples_to_solution(report, reference, req.tol)
                hit = sts is not None
                solved += hit
                if hit:
                    samples.append(sts)
                per_instance.append(
                    schemas.BenchInstanceModel(
                        label=inst.metadata.label,
                        reference_energy=reference,
                        best_energy=report.best.energy,
                        samples_to_solution=sts,
                        solved=hit,
                    )
                )
            rows.append(
                schemas.BenchRowModel(
                    variant=name,
                    instances=len(instances),
                    solved=solved,
                    median_samples_to_solution=(
                        float(statistics.median(samples)) if samples else None
                    ),
                    mean_samples_to_solution=(
                        float(statistics.fmean(samples)) if samples else None
                    ),
                    total_wall_s=total_wall,
                    per_shot_mean_wall_s=(
                        total_wall / (req.shots * len(instances)) if instances else 0.0
                    ),
                    per_instance=per_instance,
                )
            )
        return schemas.BenchResponse(
            shots=req.shots,
            base_seed=req.base_seed,
            descent=req.descent,
            tol=req.tol,
            rows=rows,
        )

    return app


app = create_app()
