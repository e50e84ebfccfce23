"""Shared builders for the test suite.

Instances used across files:

* ``ring(n)``      -- ferromagnetic ring, J = -1 on nearest-neighbour edges.
  Ground energy is ``-n`` with the two aligned configurations degenerate.
* ``complete(n)``  -- ferromagnetic complete graph, J = -1 on all pairs,
  ground energy ``-n*(n-1)/2``.
* ``glass(n, seed)`` -- dense Gaussian spin glass from the library generator.

``naive_energy`` is an intentionally independent evaluator (plain Python
loops, no shared code with the package) used to cross-check the oracle.
"""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from isingkit import io
from isingkit.model import IsingInstance


def ring(n: int, j: float = -1.0) -> IsingInstance:
    couplings = {}
    for i in range(n):
        a, b = sorted((i, (i + 1) % n))
        couplings[(a, b)] = j
    return IsingInstance(n=n, h=np.zeros(n), couplings=couplings)


def complete(n: int, j: float = -1.0) -> IsingInstance:
    couplings = {(i, k): j for i in range(n) for k in range(i + 1, n)}
    return IsingInstance(n=n, h=np.zeros(n), couplings=couplings)


def glass(n: int, seed: int) -> IsingInstance:
    return io.generate_random_instance("spin_glass", n, seed=seed)


def all_configs(n: int):
    """Yield every spin configuration of length n as an int array."""
    for bits in itertools.product((-1, +1), repeat=n):
        yield np.array(bits, dtype=np.int8)


def naive_energy(inst: IsingInstance, config) -> float:
    """Reference evaluator: direct double loop, no matrix products."""
    total = float(inst.offset)
    for i in range(inst.n):
        total += float(inst.h[i]) * int(config[i])
    for (i, k), value in inst.couplings.items():
        total += float(value) * int(config[i]) * int(config[k])
    return total


@pytest.fixture
def ring8() -> IsingInstance:
    return ring(8)


@pytest.fixture
def glass10() -> IsingInstance:
    return glass(10, seed=7)


# Acceptance tests append one line per criterion here; the hook replays
# them in the terminal summary so outcomes are visible on any run.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
