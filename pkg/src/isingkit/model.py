"""Ising problem instances and energy bookkeeping.

An instance holds local fields ``h``, symmetric pair couplings ``J`` (stored
once per pair with ``i < j``), and a constant energy offset.  Spin
configurations are vectors over {-1, +1} and the energy of a configuration
``z`` is::

    E(z) = offset + sum_i h[i] * z[i] + sum_{i<j} J[i,j] * z[i] * z[j]

Lower is better throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

Couplings = dict[tuple[int, int], float]

__all__ = [
    "Couplings",
    "InstanceMetadata",
    "IsingInstance",
    "energy",
    "flip_delta",
    "local_field",
    "permute_config",
    "permute_instance",
    "qubo_to_ising",
    "validate",
]


@dataclass(frozen=True)
class InstanceMetadata:
    """Optional descriptive annotations carried along with an instance.

    ``bond_length`` and ``r`` identify a point on a dissociation sweep;
    ``reference_energy`` is a known target (exact ground energy or a
    published value) used for hit-rate accounting.
    """

    label: str = ""
    bond_length: float | None = None
    r: int | None = None
    reference_energy: float | None = None
    dissociation_limit: float | None = None

    def replace_missing(self, **updates: object) -> "InstanceMetadata":
        """Return a copy with ``None`` fields filled from ``updates``."""
        current = {f.name: getattr(self, f.name) for f in fields(self)}
        for key, value in updates.items():
            if key not in current:
                raise ValueError(f"unknown metadata field {key!r}")
            if current[key] is None or current[key] == "":
                current[key] = value
        return InstanceMetadata(**current)


def _frozen_array(values: Sequence[float] | np.ndarray) -> np.ndarray:
    out = np.array(values, dtype=float).reshape(-1)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class IsingInstance:
    """Immutable Ising problem: ``n`` spins, fields ``h``, couplings ``J``.

    Construction is permissive (it only coerces types); call
    :func:`validate` to collect structural violations.  ``couplings`` maps
    index pairs ``(i, j)`` with ``i < j`` to nonzero reals.
    """

    n: int
    h: np.ndarray
    couplings: Couplings = field(default_factory=dict)
    offset: float = 0.0
    metadata: InstanceMetadata = field(default_factory=InstanceMetadata)

    def __post_init__(self) -> None:
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "h", _frozen_array(self.h))
        object.__setattr__(
            self,
            "couplings",
            {(int(i), int(j)): float(v) for (i, j), v in dict(self.couplings).items()},
        )
        object.__setattr__(self, "offset", float(self.offset))

    @cached_property
    def coupling_matrix(self) -> np.ndarray:
        """Dense symmetric coupling matrix with zero diagonal.

        Built on first use and cached; requires a valid instance.
        """
        problems = validate(self)
        if problems:
            raise ValueError("invalid instance: " + "; ".join(problems))
        mat = np.zeros((self.n, self.n))
        for (i, j), v in self.couplings.items():
            mat[i, j] = v
            mat[j, i] = v
        mat.flags.writeable = False
        return mat

    def edge_list(self) -> list[tuple[int, int, float]]:
        """Couplings as ``(i, j, value)`` triples sorted by ``(i, j)``."""
        return [(i, j, v) for (i, j), v in sorted(self.couplings.items())]


def validate(inst: IsingInstance) -> list[str]:
    """Return a list of violation messages; empty when the instance is sound."""
    problems: list[str] = []
    if inst.n < 1:
        problems.append(f"n must be >= 1, got {inst.n}")
    if inst.h.shape != (inst.n,):
        problems.append(f"h has length {inst.h.shape[0]}, expected n = {inst.n}")
    if inst.h.size and not np.all(np.isfinite(inst.h)):
        bad = int(np.flatnonzero(~np.isfinite(inst.h))[0])
        problems.append(f"h[{bad}] is not finite")
    if not np.isfinite(inst.offset):
        problems.append("offset is not finite")
    for (i, j), v in sorted(inst.couplings.items()):
        if not (0 <= i < inst.n and 0 <= j < inst.n):
            problems.append(f"coupling ({i}, {j}) out of range for n = {inst.n}")
        elif i == j:
            problems.append(f"coupling ({i}, {j}) sits on the diagonal")
        elif i > j:
            problems.append(f"coupling ({i}, {j}) must be keyed with i < j")
        if not np.isfinite(v):
            problems.append(f"coupling ({i}, {j}) value is not finite")
    return problems


def _as_spins(inst: IsingInstance, config: Sequence[int] | np.ndarray) -> np.ndarray:
    z = np.asarray(config, dtype=float).reshape(-1)
    if z.shape != (inst.n,):
        raise ValueError(f"configuration has length {z.shape[0]}, expected {inst.n}")
    if not np.all(np.abs(z) == 1.0):
        raise ValueError("configuration entries must be -1 or +1")
    return z


def energy(inst: IsingInstance, config: Sequence[int] | np.ndarray) -> float:
    """Total energy of a spin configuration, including the offset."""
    z = _as_spins(inst, config)
    jz = inst.coupling_matrix @ z
    return float(inst.offset + inst.h @ z + 0.5 * z @ jz)


def local_field(inst: IsingInstance, config: Sequence[int] | np.ndarray, i: int) -> float:
    """Effective field ``h[i] + sum_j J[i,j] z[j]`` seen by spin ``i``."""
    z = _as_spins(inst, config)
    if not 0 <= i < inst.n:
        raise ValueError(f"spin index {i} out of range for n = {inst.n}")
    return float(inst.h[i] + inst.coupling_matrix[i] @ z)


def flip_delta(inst: IsingInstance, config: Sequence[int] | np.ndarray, i: int) -> float:
    """Energy change from flipping spin ``i``: ``-2 z[i] * local_field``."""
    z = _as_spins(inst, config)
    if not 0 <= i < inst.n:
        raise ValueError(f"spin index {i} out of range for n = {inst.n}")
    return float(-2.0 * z[i] * (inst.h[i] + inst.coupling_matrix[i] @ z))


def qubo_to_ising(
    q: Sequence[Sequence[float]] | np.ndarray,
    constant: float = 0.0,
    metadata: InstanceMetadata | None = None,
) -> IsingInstance:
    """Convert ``x^T Q x + constant`` over binary ``x`` to an Ising instance.

    Uses the substitution ``x_i = (1 + z_i) / 2``, so binary 1 maps to spin
    +1.  ``Q`` is symmetrised first; energies agree pointwise under the
    substitution, including the constant.
    """
    mat = np.asarray(q, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"Q must be square, got shape {mat.shape}")
    if mat.size and not np.all(np.isfinite(mat)):
        raise ValueError("Q contains non-finite entries")
    if not np.isfinite(constant):
        raise ValueError("constant is not finite")
    n = mat.shape[0]
    if n == 0:
        raise ValueError("Q must have at least one variable")
    sym = (mat + mat.T) / 2.0
    diag = np.diag(sym)
    h = diag / 2.0 + (sym.sum(axis=1) - diag) / 2.0
    couplings: Couplings = {}
    for i in range(n):
        for j in range(i + 1, n):
            if sym[i, j] != 0.0:
                couplings[(i, j)] = sym[i, j] / 2.0
    off = float(constant + diag.sum() / 2.0 + np.triu(sym, k=1).sum() / 2.0)
    return IsingInstance(
        n=n,
        h=h,
        couplings=couplings,
        offset=off,
        metadata=metadata or InstanceMetadata(),
    )


def permute_instance(inst: IsingInstance, perm: Iterable[int]) -> IsingInstance:
    """Relabel spins: old spin ``i`` becomes spin ``perm[i]``.

    Energies are preserved under the matching configuration relabelling
    ``new_config[perm[i]] = config[i]``.
    """
    p = np.asarray(list(perm), dtype=int)
    if sorted(p.tolist()) != list(range(inst.n)):
        raise ValueError(f"perm must be a permutation of 0..{inst.n - 1}")
    h = np.empty(inst.n)
    h[p] = inst.h
    couplings: Couplings = {}
    for (i, j), v in inst.couplings.items():
        a, b = int(p[i]), int(p[j])
        couplings[(min(a, b), max(a, b))] = v
    return IsingInstance(
        n=inst.n, h=h, couplings=couplings, offset=inst.offset, metadata=inst.metadata
    )


def permute_config(config: Sequence[int] | np.ndarray, perm: Iterable[int]) -> np.ndarray:
    """Apply the same relabelling to a configuration vector."""
    z = np.asarray(config)
    p = np.asarray(list(perm), dtype=int)
    out = np.empty_like(z)
    out[p] = z
    return out
