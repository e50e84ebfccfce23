"""Model layer: energy algebra, QUBO conversion, validation, permutations."""

import numpy as np
import pytest

from isingkit.model import (
    IsingInstance,
    energy,
    flip_delta,
    local_field,
    permute_config,
    permute_instance,
    qubo_to_ising,
    validate,
)
from isingkit.oracle import brute_force

from conftest import all_configs, ring


# ---------------------------------------------------------------- energy


def test_energy_empty_hamiltonian():
    inst = IsingInstance(n=2, h=np.zeros(2), couplings={})
    assert energy(inst, (+1, -1)) == 0.0


def test_energy_direct_evaluation():
    inst = IsingInstance(n=2, h=[1.0, -1.0], couplings={(0, 1): 0.5})
    assert energy(inst, (+1, +1)) == pytest.approx(0.5)


def test_energy_ferro_ring_aligned():
    assert energy(ring(3), (+1, +1, +1)) == pytest.approx(-3.0)


def test_energy_includes_offset():
    inst = IsingInstance(n=1, h=[0.0], couplings={}, offset=2.5)
    assert energy(inst, (-1,)) == pytest.approx(2.5)


def test_energy_dimension_mismatch():
    inst = IsingInstance(n=2, h=np.zeros(2), couplings={})
    with pytest.raises(ValueError):
        energy(inst, (+1,))


# ---------------------------------------------------------------- local_field


def test_local_field_with_h_and_coupling():
    inst = IsingInstance(n=2, h=[1.0, -1.0], couplings={(0, 1): 0.5})
    assert local_field(inst, (+1, +1), 0) == pytest.approx(1.5)


def test_local_field_no_interactions():
    inst = IsingInstance(n=3, h=np.zeros(3), couplings={})
    for cfg in ((+1, +1, +1), (-1, +1, -1)):
        for i in range(3):
            assert local_field(inst, cfg, i) == 0.0


def test_local_field_chain_middle():
    inst = IsingInstance(
        n=3, h=np.zeros(3), couplings={(0, 1): -1.0, (1, 2): -1.0}
    )
    assert local_field(inst, (+1, -1, +1), 1) == pytest.approx(-2.0)


def test_local_field_index_out_of_range():
    inst = IsingInstance(n=2, h=np.zeros(2), couplings={})
    with pytest.raises(ValueError):
        local_field(inst, (+1, +1), 2)


# ---------------------------------------------------------------- flip_delta


def test_flip_delta_field_only():
    inst = IsingInstance(n=1, h=[1.0], couplings={})
    assert flip_delta(inst, (+1,), 0) == pytest.approx(-2.0)


def test_flip_delta_zero_local_field():
    inst = IsingInstance(n=2, h=np.zeros(2), couplings={})
    assert flip_delta(inst, (+1, -1), 0) == 0.0


def test_flip_delta_coupled_pair():
    inst = IsingInstance(n=2, h=np.zeros(2), couplings={(0, 1): 1.0})
    assert flip_delta(inst, (+1, +1), 0) == pytest.approx(-2.0)


def test_flip_delta_matches_actual_energy_change():
    """flip_delta must equal the literal energy difference, all i, random cfgs."""
    rng = np.random.default_rng(11)
    for n in (2, 5, 9, 12):
        h = rng.normal(size=n)
        couplings = {
            (i, k): rng.normal()
            for i in range(n)
            for k in range(i + 1, n)
            if rng.random() < 0.7
        }
        inst = IsingInstance(n=n, h=h, couplings=couplings, offset=rng.normal())
        for _ in range(20):
            cfg = rng.choice([-1, 1], size=n)
            base = energy(inst, cfg)
            for i in range(n):
                flipped = cfg.copy()
                flipped[i] = -flipped[i]
                assert flip_delta(inst, cfg, i) == pytest.approx(
                    energy(inst, flipped) - base, abs=1e-9
                )


def test_global_flip_changes_only_h_term():
    rng = np.random.default_rng(3)
    n = 7
    inst = IsingInstance(
        n=n,
        h=rng.normal(size=n),
        couplings={(i, k): rng.normal() for i in range(n) for k in range(i + 1, n)},
        offset=0.25,
    )
    for _ in range(10):
        z = rng.choice([-1, 1], size=n)
        lhs = energy(inst, -z) - energy(inst, z)
        rhs = -2.0 * float(inst.h @ z)
        assert lhs == pytest.approx(rhs, abs=1e-9)


# ---------------------------------------------------------------- qubo_to_ising


def test_qubo_single_variable():
    # Identity objective x^2 == x on binary x: E(z=-1)=0, E(z=+1)=1.
    inst = qubo_to_ising([[1.0]])
    assert inst.h[0] == pytest.approx(0.5)
    assert inst.offset == pytest.approx(0.5)
    assert energy(inst, (-1,)) == pytest.approx(0.0)
    assert energy(inst, (+1,)) == pytest.approx(1.0)


def test_qubo_zero_matrix_keeps_constant():
    inst = qubo_to_ising(np.zeros((3, 3)), constant=4.5)
    assert np.all(inst.h == 0.0)
    assert inst.couplings == {}
    assert inst.offset == pytest.approx(4.5)


def test_qubo_random_matrix_exhaustive():
    rng = np.random.default_rng(5)
    for trial in range(5):
        n = 4
        q = rng.normal(size=(n, n))
        constant = rng.normal()
        inst = qubo_to_ising(q, constant=constant)
        for cfg in all_configs(n):
            x = (1 + cfg.astype(float)) / 2
            assert energy(inst, cfg) == pytest.approx(
                float(x @ q @ x) + constant, abs=1e-9
            )


def test_qubo_non_square_rejected():
    with pytest.raises(ValueError):
        qubo_to_ising([[1.0, 2.0]])


def test_qubo_non_finite_rejected():
    with pytest.raises(ValueError):
        qubo_to_ising([[np.nan]])


def test_qubo_ground_state_matches_binary_minimum():
    rng = np.random.default_rng(17)
    n = 6
    q = rng.normal(size=(n, n))
    inst = qubo_to_ising(q)
    best = min(
        float(x @ q @ x)
        for x in (np.array(b) for b in np.ndindex(*(2,) * n))
    )
    assert brute_force(inst).ground_energy == pytest.approx(best, abs=1e-9)


# ---------------------------------------------------------------- validate


def test_validate_well_formed():
    inst = IsingInstance(n=2, h=np.zeros(2), couplings={(0, 1): 1.0})
    assert validate(inst) == []


def test_validate_diagonal_coupling():
    inst = IsingInstance(n=2, h=np.zeros(2), couplings={(1, 1): 1.0})
    assert any("diagonal" in v for v in validate(inst))


def test_validate_non_finite_field():
    inst = IsingInstance(n=1, h=np.array([np.nan]), couplings={})
    assert any("not finite" in v for v in validate(inst))


def test_invalid_instance_rejected_at_use():
    # Construction stays permissive so validate() can inspect bad instances;
    # any energy evaluation refuses to proceed.
    inst = IsingInstance(n=2, h=np.zeros(2), couplings={(1, 0): 1.0})
    with pytest.raises(ValueError):
        energy(inst, (+1, +1))


def test_instance_h_is_read_only():
    inst = IsingInstance(n=2, h=np.zeros(2), couplings={})
    with pytest.raises(ValueError):
        inst.h[0] = 1.0


def test_coupling_matrix_symmetric():
    inst = IsingInstance(n=3, h=np.zeros(3), couplings={(0, 2): -1.5})
    jmat = inst.coupling_matrix
    assert jmat[0, 2] == jmat[2, 0] == -1.5
    assert np.all(np.diag(jmat) == 0.0)


# ---------------------------------------------------------------- permutation


def test_energy_invariant_under_permutation():
    rng = np.random.default_rng(23)
    n = 6
    inst = IsingInstance(
        n=n,
        h=rng.normal(size=n),
        couplings={(i, k): rng.normal() for i in range(n) for k in range(i + 1, n)},
        offset=1.0,
    )
    perm = [2, 0, 5, 1, 4, 3]
    permuted = permute_instance(inst, perm)
    for _ in range(20):
        cfg = rng.choice([-1, 1], size=n)
        assert energy(permuted, permute_config(cfg, perm)) == pytest.approx(
            energy(inst, cfg), abs=1e-9
        )


def test_permute_roundtrip_identity():
    inst = ring(5)
    perm = [4, 2, 0, 3, 1]
    inverse = np.argsort(perm)
    back = permute_instance(permute_instance(inst, perm), inverse)
    assert np.array_equal(back.h, inst.h)
    assert back.couplings == inst.couplings
