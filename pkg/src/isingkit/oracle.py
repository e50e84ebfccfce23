"""Exact enumeration over all 2**n configurations.

Meant as ground truth for small instances: a Gray-code scan updates the
energy incrementally (one spin flip per visited configuration), so the
full sweep costs O(n) per configuration.  Hard caps keep accidental
exponential blow-ups out of test suites and services.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import IsingInstance, energy

__all__ = [
    "BRUTE_FORCE_CAP",
    "DEGENERACY_TOL",
    "ExactSolution",
    "LOCAL_MINIMA_CAP",
    "brute_force",
    "enumerate_local_minima",
]

BRUTE_FORCE_CAP = 24
LOCAL_MINIMA_CAP = 16
DEGENERACY_TOL = 1e-9


@dataclass
class ExactSolution:
    """Exact ground energy plus every configuration within
    :data:`DEGENERACY_TOL` of it, sorted by bitmask code (bit i set means
    spin i is +1)."""

    ground_energy: float
    ground_configs: list[np.ndarray]
    evaluations: int


def _codes_to_configs(codes: np.ndarray, n: int) -> np.ndarray:
    bits = (codes[:, None] >> np.arange(n, dtype=np.uint64)) & np.uint64(1)
    return (bits.astype(np.int8) * 2 - 1).astype(np.int8)


def brute_force(inst: IsingInstance) -> ExactSolution:
    """Enumerate all configurations and return the exact ground state(s)."""
    if inst.n > BRUTE_FORCE_CAP:
        raise ValueError(
            f"brute force is capped at n = {BRUTE_FORCE_CAP}, got n = {inst.n}"
        )
    jmat = inst.coupling_matrix  # validates the instance
    h = inst.h
    best = _kernels.gray_best(h, jmat, inst.offset)
    # collect with slack, then confirm against freshly computed energies so
    # scan-order rounding cannot leak into the reported degeneracy
    thresh = best + DEGENERACY_TOL
    count = _kernels.gray_filter(h, jmat, inst.offset, thresh, np.empty(0, np.uint64))
    codes = np.empty(count, np.uint64)
    _kernels.gray_filter(h, jmat, inst.offset, thresh, codes)
    codes.sort()
    candidates = _codes_to_configs(codes, inst.n)
    exact = np.array([energy(inst, cfg) for cfg in candidates])
    ground = float(exact.min())
    keep = exact <= ground + DEGENERACY_TOL
    return ExactSolution(
        ground_energy=ground,
        ground_configs=[candidates[i] for i in np.flatnonzero(keep)],
        evaluations=2**inst.n,
    )


def enumerate_local_minima(inst: IsingInstance) -> list[tuple[np.ndarray, float]]:
    """All 1-flip-stable configurations with their energies.

    Returned sorted by energy (ties by bitmask code).  A configuration is
    stable when every flip delta ``-2 z_i (h_i + (J z)_i)`` is >= 0.
    """
    if inst.n > LOCAL_MINIMA_CAP:
        raise ValueError(
            f"local-minima enumeration is capped at n = {LOCAL_MINIMA_CAP}, "
            f"got n = {inst.n}"
        )
    jmat = inst.coupling_matrix
    codes = np.arange(2**inst.n, dtype=np.uint64)
    spins = _codes_to_configs(codes, inst.n).astype(float)
    grads = spins @ jmat + inst.h
    stable = np.all(-2.0 * spins * grads >= 0.0, axis=1)
    idx = np.flatnonzero(stable)
    energies = inst.offset + spins[idx] @ inst.h + 0.5 * np.einsum(
        "ki,ki->k", spins[idx] @ jmat, spins[idx]
    )
    order = np.lexsort((codes[idx], energies))
    return [
        (spins[idx[k]].astype(np.int8), float(energies[k])) for k in order
    ]
