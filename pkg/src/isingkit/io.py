"""Instance, manifest, and QUBO documents plus energy-profile export.

All on-disk formats are JSON with a fixed canonical layout, so files are
human-diffable and byte-stable: serializing structurally equal instances
always produces identical bytes.  Floats are written in full round-trip
precision (``repr``), which the 1e-9 energy tolerances elsewhere rely on.

Instance document::

    {
      "n": 3,
      "h": [0.0, 0.5, -1.0],
      "J": [
        [0, 1, -1.0],
        [1, 2, 0.25]
      ],
      "offset": 0.0,
      "metadata": {"label": "demo"}
    }

``J`` holds one ``[i, j, value]`` triple per coupling with ``i < j``,
sorted.  ``metadata`` keys other than ``label`` (``bond_length``, ``r``,
``reference_energy``, ``dissociation_limit``) are optional and omitted
when unset.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import Couplings, InstanceMetadata, IsingInstance, validate

__all__ = [
    "InstanceFormatError",
    "ManifestEntry",
    "ProfilePoint",
    "QuboDocument",
    "SweepManifest",
    "export_profile",
    "generate_random_instance",
    "instance_from_document",
    "instance_to_document",
    "parse_instance",
    "parse_manifest",
    "parse_profile",
    "parse_qubo",
    "serialize_instance",
    "write_text_atomic",
]

_METADATA_KEYS = ("label", "bond_length", "r", "reference_energy", "dissociation_limit")

PROFILE_HEADER = "bond_length,r,best_energy,mean_energy,hit_rate,wall_ms"


class InstanceFormatError(ValueError):
    """A document failed to parse or violated the format contract."""


def _fail(source: str, message: str) -> None:
    prefix = f"{source}: " if source else ""
    raise InstanceFormatError(prefix + message)


def _load_json(text: str, source: str) -> object:
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise InstanceFormatError(
            f"{source + ': ' if source else ''}line {err.lineno}, column {err.colno}: {err.msg}"
        ) from None


def _real(value: object, where: str, source: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(source, f"{where}: expected a number, got {value!r}")
    return float(value)


# ---------------------------------------------------------------------------
# instances


def instance_from_document(doc: object, source: str = "") -> IsingInstance:
    """Build a validated instance from a parsed document (dict)."""
    if not isinstance(doc, dict):
        _fail(source, f"expected a JSON object, got {type(doc).__name__}")
    unknown = sorted(set(doc) - {"n", "h", "J", "offset", "metadata"})
    if unknown:
        _fail(source, "unknown field(s): " + ", ".join(unknown))
    for key in ("n", "h"):
        if key not in doc:
            _fail(source, f"missing required field {key!r}")
    n = doc["n"]
    if isinstance(n, bool) or not isinstance(n, int):
        _fail(source, f"n: expected an integer, got {n!r}")
    if not isinstance(doc["h"], list):
        _fail(source, "h: expected an array")
    h = [_real(v, f"h[{k}]", source) for k, v in enumerate(doc["h"])]
    couplings: Couplings = {}
    raw_j = doc.get("J", [])
    if not isinstance(raw_j, list):
        _fail(source, "J: expected an array of [i, j, value] triples")
    for k, entry in enumerate(raw_j):
        if not isinstance(entry, (list, tuple)) or len(entry) != 3:
            _fail(source, f"J[{k}]: expected an [i, j, value] triple")
        i, j, value = entry
        for name, idx in (("i", i), ("j", j)):
            if isinstance(idx, bool) or not isinstance(idx, int):
                _fail(source, f"J[{k}]: index {name} must be an integer, got {idx!r}")
        if i == j:
            _fail(source, f"J[{k}]: diagonal coupling at entry {k} (index {i})")
        if i > j:
            _fail(source, f"J[{k}]: indices must satisfy i < j, got ({i}, {j})")
        if (i, j) in couplings:
            _fail(source, f"J[{k}]: duplicate coupling ({i}, {j})")
        couplings[(i, j)] = _real(value, f"J[{k}] value", source)
    offset = _real(doc.get("offset", 0.0), "offset", source)
    metadata = _metadata_from_document(doc.get("metadata", {}), source)
    inst = IsingInstance(n=n, h=np.array(h), couplings=couplings, offset=offset, metadata=metadata)
    problems = validate(inst)
    if problems:
        _fail(source, "; ".join(problems))
    return inst


def _metadata_from_document(doc: object, source: str) -> InstanceMetadata:
    if doc is None:
        return InstanceMetadata()
    if not isinstance(doc, dict):
        _fail(source, "metadata: expected an object")
    unknown = sorted(set(doc) - set(_METADATA_KEYS))
    if unknown:
        _fail(source, "metadata: unknown field(s): " + ", ".join(unknown))
    label = doc.get("label", "")
    if label is None:
        label = ""
    if not isinstance(label, str):
        _fail(source, f"metadata.label: expected a string, got {label!r}")
    values: dict[str, object] = {"label": label}
    for key in _METADATA_KEYS[1:]:
        value = doc.get(key)
        if value is None:
            continue
        if key == "r":
            if isinstance(value, bool) or not isinstance(value, int):
                _fail(source, f"metadata.r: expected an integer, got {value!r}")
            if value < 1:
                _fail(source, f"metadata.r: expected a positive integer, got {value}")
            values[key] = value
        else:
            values[key] = _real(value, f"metadata.{key}", source)
    return InstanceMetadata(**values)  # type: ignore[arg-type]


def parse_instance(text: str, source: str = "") -> IsingInstance:
    """Parse the documented instance format; every malformed input raises
    :class:`InstanceFormatError` with a positioned message."""
    return instance_from_document(_load_json(text, source), source)


def instance_to_document(inst: IsingInstance) -> dict:
    """Plain-dict form of an instance (canonical key and coupling order)."""
    meta: dict[str, object] = {}
    if inst.metadata.label:
        meta["label"] = inst.metadata.label
    for key in _METADATA_KEYS[1:]:
        value = getattr(inst.metadata, key)
        if value is not None:
            meta[key] = value
    return {
        "n": inst.n,
        "h": [float(v) for v in inst.h],
        "J": [[i, j, v] for i, j, v in inst.edge_list()],
        "offset": inst.offset,
        "metadata": meta,
    }


def serialize_instance(inst: IsingInstance) -> str:
    """Canonical text form: fixed key order, sorted couplings, one
    ``[i, j, value]`` triple per line, full-precision floats."""
    problems = validate(inst)
    if problems:
        raise InstanceFormatError("refusing to serialize invalid instance: " + "; ".join(problems))
    doc = instance_to_document(inst)
    h_line = "[" + ", ".join(json.dumps(v) for v in doc["h"]) + "]"
    lines = [
        "{",
        f'  "n": {doc["n"]},',
        f'  "h": {h_line},',
    ]
    if doc["J"]:
        lines.append('  "J": [')
        for k, (i, j, v) in enumerate(doc["J"]):
            comma = "," if k + 1 < len(doc["J"]) else ""
            lines.append(f"    [{i}, {j}, {json.dumps(v)}]{comma}")
        lines.append("  ],")
    else:
        lines.append('  "J": [],')
    lines.append(f'  "offset": {json.dumps(doc["offset"])},')
    lines.append(f'  "metadata": {json.dumps(doc["metadata"])}')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# sweep manifests and profiles


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    bond_length: float
    r: int


@dataclass(frozen=True)
class SweepManifest:
    label: str
    entries: tuple[ManifestEntry, ...]
    reference_curve: tuple[tuple[float, float], ...] | None = None
    dissociation_limit: float | None = None


def parse_manifest(text: str, source: str = "") -> SweepManifest:
    """Parse a sweep manifest document.

    Format: ``{"label": str, "entries": [{"path", "bond_length", "r"}...],
    "reference_curve": [[bond_length, energy]...]?, "dissociation_limit"?}``.
    Entries must be non-empty with unique (bond_length, r) pairs.
    """
    doc = _load_json(text, source)
    if not isinstance(doc, dict):
        _fail(source, f"expected a JSON object, got {type(doc).__name__}")
    unknown = sorted(set(doc) - {"label", "entries", "reference_curve", "dissociation_limit"})
    if unknown:
        _fail(source, "unknown field(s): " + ", ".join(unknown))
    label = doc.get("label", "")
    if not isinstance(label, str):
        _fail(source, f"label: expected a string, got {label!r}")
    raw_entries = doc.get("entries")
    if not isinstance(raw_entries, list) or not raw_entries:
        _fail(source, "entries: expected a non-empty array")
    entries = []
    seen: set[tuple[float, int]] = set()
    for k, entry in enumerate(raw_entries):
        if not isinstance(entry, dict):
            _fail(source, f"entries[{k}]: expected an object")
        missing = [key for key in ("path", "bond_length", "r") if key not in entry]
        if missing:
            _fail(source, f"entries[{k}]: missing field(s): " + ", ".join(missing))
        path = entry["path"]
        if not isinstance(path, str) or not path:
            _fail(source, f"entries[{k}].path: expected a non-empty string")
        bond = _real(entry["bond_length"], f"entries[{k}].bond_length", source)
        r = entry["r"]
        if isinstance(r, bool) or not isinstance(r, int) or r < 1:
            _fail(source, f"entries[{k}].r: expected a positive integer, got {r!r}")
        if (bond, r) in seen:
            _fail(source, f"entries[{k}]: duplicate (bond_length, r) = ({bond}, {r})")
        seen.add((bond, r))
        entries.append(ManifestEntry(path=path, bond_length=bond, r=r))
    curve = None
    if doc.get("reference_curve") is not None:
        raw_curve = doc["reference_curve"]
        if not isinstance(raw_curve, list):
            _fail(source, "reference_curve: expected an array of [bond_length, energy] pairs")
        pairs = []
        for k, pair in enumerate(raw_curve):
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                _fail(source, f"reference_curve[{k}]: expected a [bond_length, energy] pair")
            pairs.append(
                (
                    _real(pair[0], f"reference_curve[{k}][0]", source),
                    _real(pair[1], f"reference_curve[{k}][1]", source),
                )
            )
        curve = tuple(pairs)
    limit = doc.get("dissociation_limit")
    if limit is not None:
        limit = _real(limit, "dissociation_limit", source)
    return SweepManifest(
        label=label, entries=tuple(entries), reference_curve=curve, dissociation_limit=limit
    )


@dataclass(frozen=True)
class ProfilePoint:
    """One row of an energy profile; ``hit_rate`` is None when the entry's
    instance carries no reference energy."""

    bond_length: float
    r: int
    best_energy: float
    mean_energy: float
    hit_rate: float | None
    wall_ms: float


def _as_point(entry: ManifestEntry, report) -> ProfilePoint:
    if isinstance(report, ProfilePoint):
        return report
    finite = [e for e in report.energies if math.isfinite(e)]
    hit_rate = None
    if report.hit_count is not None:
        hit_rate = report.hit_count / len(report.energies)
    return ProfilePoint(
        bond_length=entry.bond_length,
        r=entry.r,
        best_energy=report.best.energy,
        mean_energy=float(np.mean(finite)) if finite else float("nan"),
        hit_rate=hit_rate,
        wall_ms=report.total_wall_time * 1000.0,
    )


def export_profile(manifest: SweepManifest, reports: Sequence[object]) -> str:
    """Render the profile table: header plus one CSV row per manifest entry,
    ordered by (r, bond_length).  ``reports`` holds one
    :class:`ProfilePoint` or ensemble report per entry, in entry order."""
    if len(reports) != len(manifest.entries):
        raise ValueError(
            f"expected {len(manifest.entries)} reports, got {len(reports)}"
        )
    points = [_as_point(entry, rep) for entry, rep in zip(manifest.entries, reports)]
    points.sort(key=lambda p: (p.r, p.bond_length))
    lines = [PROFILE_HEADER]
    for p in points:
        hit = "" if p.hit_rate is None else repr(float(p.hit_rate))
        lines.append(
            f"{float(p.bond_length)!r},{p.r},{float(p.best_energy)!r},"
            f"{float(p.mean_energy)!r},{hit},{float(p.wall_ms)!r}"
        )
    return "\n".join(lines) + "\n"


def parse_profile(text: str) -> list[ProfilePoint]:
    """Read back a profile table produced by :func:`export_profile`."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != PROFILE_HEADER:
        raise InstanceFormatError(f"profile must start with header {PROFILE_HEADER!r}")
    points = []
    for k, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != 6:
            raise InstanceFormatError(f"line {k}: expected 6 columns, got {len(cells)}")
        try:
            points.append(
                ProfilePoint(
                    bond_length=float(cells[0]),
                    r=int(cells[1]),
                    best_energy=float(cells[2]),
                    mean_energy=float(cells[3]),
                    hit_rate=None if cells[4] == "" else float(cells[4]),
                    wall_ms=float(cells[5]),
                )
            )
        except ValueError as err:
            raise InstanceFormatError(f"line {k}: {err}") from None
    return points


# ---------------------------------------------------------------------------
# QUBO documents


@dataclass(frozen=True)
class QuboDocument:
    """Parsed QUBO problem: minimise ``x^T Q x + constant`` over binary x."""

    q: np.ndarray
    constant: float
    metadata: InstanceMetadata


def parse_qubo(text: str, source: str = "") -> QuboDocument:
    """Parse ``{"Q": [[...]...], "constant"?, "metadata"?}``."""
    doc = _load_json(text, source)
    if not isinstance(doc, dict):
        _fail(source, f"expected a JSON object, got {type(doc).__name__}")
    unknown = sorted(set(doc) - {"Q", "constant", "metadata"})
    if unknown:
        _fail(source, "unknown field(s): " + ", ".join(unknown))
    if "Q" not in doc:
        _fail(source, "missing required field 'Q'")
    raw_q = doc["Q"]
    if not isinstance(raw_q, list) or not raw_q:
        _fail(source, "Q: expected a non-empty array of rows")
    n = len(raw_q)
    rows = []
    for i, row in enumerate(raw_q):
        if not isinstance(row, list) or len(row) != n:
            _fail(source, f"Q[{i}]: expected a row of {n} numbers")
        rows.append([_real(v, f"Q[{i}][{j}]", source) for j, v in enumerate(row)])
    constant = _real(doc.get("constant", 0.0), "constant", source)
    metadata = _metadata_from_document(doc.get("metadata", {}), source)
    return QuboDocument(q=np.array(rows), constant=constant, metadata=metadata)


# ---------------------------------------------------------------------------
# corpus generation

GENERATOR_KINDS = ("spin_glass", "ferro_ring", "ferro_complete")


def generate_random_instance(
    kind: str,
    n: int,
    seed: int = 0,
    metadata: InstanceMetadata | None = None,
) -> IsingInstance:
    """Benchmark instances, deterministic in ``seed``.

    spin_glass      i.i.d. standard-Gaussian couplings on all pairs, h = 0
    ferro_ring      J = -1 on ring edges (ground: both aligned states)
    ferro_complete  J = -1 on all pairs
    """
    if kind not in GENERATOR_KINDS:
        raise ValueError(
            f"unknown instance kind {kind!r}; expected one of: " + ", ".join(GENERATOR_KINDS)
        )
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    couplings: Couplings = {}
    if kind == "spin_glass":
        rng = np.random.default_rng(seed)
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        values = rng.standard_normal(len(pairs))
        couplings = {pair: float(v) for pair, v in zip(pairs, values)}
    elif kind == "ferro_ring":
        if n >= 2:
            couplings = {(i, i + 1): -1.0 for i in range(n - 1)}
        if n >= 3:
            couplings[(0, n - 1)] = -1.0
    else:
        couplings = {(i, j): -1.0 for i in range(n) for j in range(i + 1, n)}
    if metadata is None:
        metadata = InstanceMetadata(label=f"{kind}_n{n}_s{seed}")
    return IsingInstance(n=n, h=np.zeros(n), couplings=couplings, offset=0.0, metadata=metadata)


# ---------------------------------------------------------------------------
# atomic file output


def write_text_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a temp file in the target directory plus rename, so a
    concurrent reader never observes a torn file."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
