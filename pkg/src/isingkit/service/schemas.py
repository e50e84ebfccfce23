"""Request/response models for the solver service.

The wire instance format mirrors the on-disk document: ``J`` as
``[i, j, value]`` triples, optional metadata.  Diverged shots surface as
``null`` energies so responses stay strict JSON.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

VariantName = Literal["cac", "cfc", "sfc", "dsb"]

ALL_VARIANTS: tuple[VariantName, ...] = ("cac", "cfc", "sfc", "dsb")

GeneratorKind = Literal["spin_glass", "ferro_ring", "ferro_complete"]


class MetadataModel(BaseModel):
    label: str = ""
    bond_length: float | None = None
    r: int | None = Field(default=None, ge=1)
    reference_energy: float | None = None
    dissociation_limit: float | None = None


class InstanceModel(BaseModel):
    n: int
    h: list[float]
    J: list[tuple[int, int, float]] = []
    offset: float = 0.0
    metadata: MetadataModel = MetadataModel()


class HealthResponse(BaseModel):
    status: str
    version: str


class GenerateRequest(BaseModel):
    kind: GeneratorKind
    n: int = Field(ge=1)
    seed: int = 0
    metadata: MetadataModel | None = None


class SolveRequest(BaseModel):
    instance: InstanceModel
    variant: VariantName = "cfc"
    shots: int = Field(default=100, ge=1)
    base_seed: int = 0
    descent: bool = True
    workers: int | None = Field(default=None, ge=1)
    overrides: dict[str, float] = {}


class ShotModel(BaseModel):
    config: list[int]
    energy: float
    raw_energy_before_descent: float | None = None
    steps_run: int
    wall_time_s: float
    seed: int


class DivergedShotModel(BaseModel):
    shot_index: int
    step_index: int


class SolveResponse(BaseModel):
    variant: VariantName
    shots: int
    base_seed: int
    descent: bool
    params: dict[str, float | int | None]
    best: ShotModel
    energies: list[float | None]
    hit_count: int | None = None
    samples_to_first_hit: int | None = None
    diverged: list[DivergedShotModel] = []
    total_wall_s: float
    per_shot_mean_wall_s: float


class ExactRequest(BaseModel):
    instance: InstanceModel


class ExactResponse(BaseModel):
    ground_energy: float
    ground_configs: list[list[int]]
    evaluations: int


class ConvertRequest(BaseModel):
    Q: list[list[float]]
    constant: float = 0.0
    metadata: MetadataModel | None = None


class BenchRequest(BaseModel):
    instances: list[InstanceModel] = Field(min_length=1)
    variants: list[VariantName] = list(ALL_VARIANTS)
    shots: int = Field(default=100, ge=1)
    base_seed: int = 0
    descent: bool = True
    tol: float = 1e-9
    workers: int | None = Field(default=None, ge=1)
    overrides: dict[str, float] = {}


class BenchInstanceModel(BaseModel):
    label: str
    reference_energy: float
    best_energy: float | None  # None when every shot diverged
    samples_to_solution: int | None = None
    solved: bool


class BenchRowModel(BaseModel):
    variant: VariantName
    instances: int
    solved: int
    median_samples_to_solution: float | None = None
    mean_samples_to_solution: float | None = None
    total_wall_s: float
    per_shot_mean_wall_s: float
    per_instance: list[BenchInstanceModel]


class BenchResponse(BaseModel):
    shots: int
    base_seed: int
    descent: bool
    tol: float
    rows: list[BenchRowModel]
