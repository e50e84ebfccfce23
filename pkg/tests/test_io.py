"""File formats: instance documents, manifests, profiles, QUBO, generators."""

import json
import os

import numpy as np
import pytest

from isingkit import io
from isingkit.model import IsingInstance, energy, permute_instance

from conftest import all_configs


# ---------------------------------------------------------------- parse_instance


def test_parse_minimal_document():
    inst = io.parse_instance('{"n": 1, "h": [1.0], "J": [], "offset": 0.0}')
    assert inst.n == 1
    assert inst.h[0] == 1.0
    assert inst.couplings == {}
    assert inst.offset == 0.0


def test_parse_diagonal_coupling_positioned_error():
    with pytest.raises(io.InstanceFormatError) as err:
        io.parse_instance('{"n": 1, "h": [1.0], "J": [[1, 1, 0.5]], "offset": 0.0}')
    assert "diagonal coupling at entry 0" in str(err.value)


def test_parse_duplicate_pair_rejected():
    with pytest.raises(io.InstanceFormatError) as err:
        io.parse_instance(
            '{"n": 2, "h": [0, 0], "J": [[0, 1, 0.5], [0, 1, 0.2]], "offset": 0}'
        )
    assert "duplicate" in str(err.value)


def test_parse_reversed_indices_rejected():
    with pytest.raises(io.InstanceFormatError) as err:
        io.parse_instance('{"n": 2, "h": [0, 0], "J": [[1, 0, 0.5]], "offset": 0}')
    assert "i < j" in str(err.value)


def test_parse_unknown_field_rejected():
    with pytest.raises(io.InstanceFormatError) as err:
        io.parse_instance('{"n": 2, "h": [0, 0], "J": [], "offset": 0, "extra": 1}')
    assert "extra" in str(err.value)


def test_parse_boolean_is_not_a_number():
    with pytest.raises(io.InstanceFormatError):
        io.parse_instance('{"n": 2, "h": [0, 0], "J": [[0, 1, true]], "offset": 0}')


def test_parse_syntax_error_carries_position():
    with pytest.raises(io.InstanceFormatError) as err:
        io.parse_instance("{not json")
    message = str(err.value)
    assert "line 1" in message and "column" in message


def test_parse_missing_offset_defaults_to_zero():
    inst = io.parse_instance('{"n": 2, "h": [0, 0], "J": []}')
    assert inst.offset == 0.0


def test_parse_metadata_fields():
    inst = io.parse_instance(
        '{"n": 1, "h": [0.0], "J": [], "offset": 0.0,'
        ' "metadata": {"label": "H2", "bond_length": 0.74, "r": 3,'
        ' "reference_energy": -1.1, "dissociation_limit": -1.0}}'
    )
    md = inst.metadata
    assert md.label == "H2"
    assert md.bond_length == 0.74
    assert md.r == 3
    assert md.reference_energy == -1.1
    assert md.dissociation_limit == -1.0


def test_parse_rejects_invalid_r():
    with pytest.raises(io.InstanceFormatError):
        io.parse_instance(
            '{"n": 1, "h": [0.0], "J": [], "offset": 0.0, "metadata": {"r": 0}}'
        )


# ---------------------------------------------------------------- serialization


def test_serialize_round_trip_preserves_energies():
    for seed in range(3):
        inst = io.generate_random_instance("spin_glass", 8, seed=seed)
        back = io.parse_instance(io.serialize_instance(inst))
        for cfg in all_configs(8):
            assert energy(back, cfg) == pytest.approx(energy(inst, cfg), abs=1e-12)


def test_serialize_full_precision():
    value = 0.1 + 0.2  # not representable in short decimal
    inst = IsingInstance(n=2, h=[value, -value], couplings={(0, 1): value}, offset=value)
    back = io.parse_instance(io.serialize_instance(inst))
    assert back.h[0] == value
    assert back.couplings[(0, 1)] == value
    assert back.offset == value


def test_serialize_canonical_and_stable():
    a = io.generate_random_instance("spin_glass", 6, seed=9)
    b = io.generate_random_instance("spin_glass", 6, seed=9)
    assert io.serialize_instance(a) == io.serialize_instance(b)
    # parse-serialize is the identity on canonical text
    text = io.serialize_instance(a)
    assert io.serialize_instance(io.parse_instance(text)) == text


def test_serialize_couplings_sorted_by_pair():
    inst = IsingInstance(
        n=4, h=np.zeros(4), couplings={(2, 3): 1.0, (0, 1): -1.0, (0, 3): 0.5}
    )
    text = io.serialize_instance(inst)
    rows = [line.strip() for line in text.splitlines() if line.strip().startswith("[")]
    assert rows == ["[0, 1, -1.0],", "[0, 3, 0.5],", "[2, 3, 1.0]"]


def test_serialize_emits_offset_even_when_zero():
    text = io.serialize_instance(IsingInstance(n=1, h=[0.0], couplings={}))
    assert '"offset": 0.0' in text


def test_serialize_permutation_sensitive():
    inst = io.generate_random_instance("spin_glass", 5, seed=2)
    relabeled = permute_instance(inst, [4, 3, 2, 1, 0])
    assert io.serialize_instance(inst) != io.serialize_instance(relabeled)


def test_serialized_text_is_valid_json():
    inst = io.generate_random_instance("ferro_complete", 5, seed=0)
    doc = json.loads(io.serialize_instance(inst))
    assert doc["n"] == 5
    assert len(doc["J"]) == 10


# ---------------------------------------------------------------- generators


def test_ferro_ring_generator():
    inst = io.generate_random_instance("ferro_ring", 5, seed=0)
    assert inst.n == 5
    assert len(inst.couplings) == 5
    assert all(v == -1.0 for v in inst.couplings.values())
    assert np.all(inst.h == 0.0)


def test_ferro_complete_generator():
    inst = io.generate_random_instance("ferro_complete", 6, seed=0)
    assert len(inst.couplings) == 15
    assert all(v == -1.0 for v in inst.couplings.values())


def test_spin_glass_generator():
    inst = io.generate_random_instance("spin_glass", 10, seed=1)
    assert len(inst.couplings) == 45
    assert np.all(inst.h == 0.0)
    values = np.array(list(inst.couplings.values()))
    assert 0.5 < values.std() < 2.0  # standard Gaussian couplings, loose band


def test_generator_deterministic_in_seed():
    a = io.generate_random_instance("spin_glass", 8, seed=5)
    b = io.generate_random_instance("spin_glass", 8, seed=5)
    c = io.generate_random_instance("spin_glass", 8, seed=6)
    assert io.serialize_instance(a) == io.serialize_instance(b)
    assert io.serialize_instance(a) != io.serialize_instance(c)


def test_generator_unknown_kind():
    with pytest.raises(ValueError) as err:
        io.generate_random_instance("lattice", 4, seed=0)
    assert "lattice" in str(err.value)


def test_generator_kinds_constant():
    assert set(io.GENERATOR_KINDS) == {"spin_glass", "ferro_ring", "ferro_complete"}


# ---------------------------------------------------------------- manifests


MANIFEST_TEXT = json.dumps(
    {
        "label": "curve",
        "entries": [
            {"path": "a.json", "bond_length": 0.5, "r": 2},
            {"path": "b.json", "bond_length": 1.0, "r": 2},
            {"path": "c.json", "bond_length": 0.5, "r": 3},
        ],
        "reference_curve": [[0.5, -1.0], [1.0, -1.1]],
        "dissociation_limit": -0.9,
    }
)


def test_parse_manifest_fields():
    man = io.parse_manifest(MANIFEST_TEXT)
    assert man.label == "curve"
    assert [e.path for e in man.entries] == ["a.json", "b.json", "c.json"]
    assert man.entries[0].bond_length == 0.5 and man.entries[0].r == 2
    assert man.reference_curve == ((0.5, -1.0), (1.0, -1.1))
    assert man.dissociation_limit == -0.9


def test_manifest_requires_entries():
    with pytest.raises(io.InstanceFormatError):
        io.parse_manifest('{"label": "x", "entries": []}')


def test_manifest_rejects_duplicate_keys():
    doc = {
        "label": "x",
        "entries": [
            {"path": "a", "bond_length": 1.0, "r": 2},
            {"path": "b", "bond_length": 1.0, "r": 2},
        ],
    }
    with pytest.raises(io.InstanceFormatError) as err:
        io.parse_manifest(json.dumps(doc))
    assert "duplicate" in str(err.value)


# ---------------------------------------------------------------- profiles


def make_points():
    return [
        io.ProfilePoint(1.0, 2, -1.0, -0.9, 0.8, 12.5),
        io.ProfilePoint(0.5, 2, -1.2, -1.0, 1.0, 10.0),
        io.ProfilePoint(0.5, 3, -1.3, -1.1, 0.5, 11.0),
    ]


def make_manifest():
    return io.SweepManifest(
        label="x",
        entries=[
            io.ManifestEntry("a", 1.0, 2),
            io.ManifestEntry("b", 0.5, 2),
            io.ManifestEntry("c", 0.5, 3),
        ],
        reference_curve=None,
        dissociation_limit=None,
    )


def test_export_profile_layout():
    text = io.export_profile(make_manifest(), make_points())
    lines = text.strip().splitlines()
    assert lines[0] == io.PROFILE_HEADER
    assert len(lines) == 4  # header + one row per entry


def test_export_profile_ordered_by_r_then_bond_length():
    text = io.export_profile(make_manifest(), make_points())
    rows = [line.split(",") for line in text.strip().splitlines()[1:]]
    keys = [(int(r[1]), float(r[0])) for r in rows]
    assert keys == sorted(keys)


def test_export_profile_round_trip():
    text = io.export_profile(make_manifest(), make_points())
    points = io.parse_profile(text)
    assert sorted((p.r, p.bond_length) for p in points) == [(2, 0.5), (2, 1.0), (3, 0.5)]
    by_key = {(p.r, p.bond_length): p for p in points}
    assert by_key[(2, 1.0)].best_energy == -1.0
    assert by_key[(3, 0.5)].hit_rate == 0.5


def test_export_profile_stable_bytes():
    a = io.export_profile(make_manifest(), make_points())
    b = io.export_profile(make_manifest(), make_points())
    assert a == b


def test_export_profile_count_mismatch():
    with pytest.raises(ValueError):
        io.export_profile(make_manifest(), make_points()[:2])


# ---------------------------------------------------------------- QUBO documents


def test_parse_qubo_document():
    doc = io.parse_qubo('{"Q": [[1.0, -2.0], [0.0, 3.0]], "constant": 0.5}')
    assert np.array_equal(doc.q, [[1.0, -2.0], [0.0, 3.0]])
    assert doc.constant == 0.5


def test_parse_qubo_defaults_constant():
    doc = io.parse_qubo('{"Q": [[2.0]]}')
    assert doc.constant == 0.0


def test_parse_qubo_requires_square():
    with pytest.raises(io.InstanceFormatError):
        io.parse_qubo('{"Q": [[1, 2]]}')


def test_parse_qubo_requires_q():
    with pytest.raises(io.InstanceFormatError) as err:
        io.parse_qubo('{"constant": 1.0}')
    assert "Q" in str(err.value)


# ---------------------------------------------------------------- atomic write


def test_write_text_atomic(tmp_path):
    target = tmp_path / "out" / "inst.json"
    target.parent.mkdir()
    io.write_text_atomic(target, "hello\n")
    assert target.read_text() == "hello\n"
    io.write_text_atomic(target, "replaced\n")
    assert target.read_text() == "replaced\n"
    assert os.listdir(target.parent) == ["inst.json"]  # no temp litter
