"""Command-line surface.

Thin client over the HTTP service: every command builds a request, sends
it through :class:`ServiceClient` (in-process by default, remote with
--server), and renders/writes the response.  File outputs are atomic.

Commands: gen | solve | sweep | exact | bench | convert | serve.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import fields as dc_fields

from . import __version__, io
from .client import ServiceClient, ServiceError
from .io import InstanceFormatError, ProfilePoint
from .solvers import CimParams, SbParams

VARIANTS = ("cac", "cfc", "sfc", "dsb")


def _override_epilog() -> str:
    cim = " ".join(f.name for f in dc_fields(CimParams))
    sb = " ".join(f.name for f in dc_fields(SbParams))
    return (
        "override keys for --set key=value:\n"
        f"  cac/cfc/sfc: {cim}\n"
        f"  dsb:         {sb}"
    )


def _parse_set(pairs: list[str]) -> dict[str, float]:
    overrides: dict[str, float] = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise ValueError(f"--set expects key=value, got {pair!r}")
        try:
            overrides[key] = float(value)
        except ValueError:
            raise ValueError(f"--set {key}: expected a numeric value, got {value!r}") from None
    return overrides


def _add_server_out(sub: argparse.ArgumentParser, out_help: str) -> None:
    sub.add_argument("--server", metavar="URL", default=None,
                     help="remote service base URL (default: run in process)")
    sub.add_argument("--out", metavar="PATH", default=None, help=out_help)


def _add_solver_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--variant", choices=VARIANTS, default="cfc")
    sub.add_argument("--shots", type=int, default=100)
    sub.add_argument("--seed", type=int, default=0, help="base seed for the shot fan-out")
    sub.add_argument("--descent", choices=("on", "off"), default="on",
                     help="steepest-descent refinement of every shot")
    sub.add_argument("--workers", type=int, default=None, help="thread-pool bound")
    sub.add_argument("--set", metavar="KEY=VALUE", action="append", default=[],
                     dest="overrides", help="hyperparameter override (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isingkit",
        description="Ising ground-state search: dynamical solvers, descent, exact oracle.",
        epilog=_override_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="generate a benchmark instance",
                              epilog=_override_epilog(),
                              formatter_class=argparse.RawDescriptionHelpFormatter)
    gen.add_argument("kind", choices=io.GENERATOR_KINDS)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--label", default=None)
    gen.add_argument("--bond-length", type=float, default=None)
    gen.add_argument("--r", type=int, default=None)
    gen.add_argument("--reference-energy", type=float, default=None)
    gen.add_argument("--dissociation-limit", type=float, default=None)
    _add_server_out(gen, "write the canonical instance document here")
    gen.set_defaults(func=cmd_gen)

    solve = commands.add_parser("solve", help="run a multi-shot ensemble on an instance",
                                epilog=_override_epilog(),
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    solve.add_argument("instance", help="instance document path")
    _add_solver_flags(solve)
    _add_server_out(solve, "write the JSON ensemble report here")
    solve.set_defaults(func=cmd_solve)

    sweep = commands.add_parser("sweep", help="run a manifest and export the energy profile",
                                epilog=_override_epilog(),
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sweep.add_argument("manifest", help="sweep manifest path")
    _add_solver_flags(sweep)
    _add_server_out(sweep, "write the profile CSV here")
    sweep.set_defaults(func=cmd_sweep)

    exact = commands.add_parser("exact", help="brute-force ground state (n <= 24)")
    exact.add_argument("instance", help="instance document path")
    _add_server_out(exact, "write the JSON solution here")
    exact.set_defaults(func=cmd_exact)

    bench = commands.add_parser("bench", help="samples-to-solution benchmark across variants",
                                epilog=_override_epilog(),
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    bench.add_argument("paths", nargs="+",
                       help="instance documents, or a single sweep manifest")
    bench.add_argument("--variants", default=",".join(VARIANTS),
                       help="comma-separated subset of cac,cfc,sfc,dsb")
    bench.add_argument("--tol", type=float, default=1e-9,
                       help="energy tolerance against the reference")
    _add_solver_flags(bench)
    _add_server_out(bench, "write the benchmark table here")
    bench.set_defaults(func=cmd_bench)

    convert = commands.add_parser("convert", help="convert a QUBO document to an Ising instance")
    convert.add_argument("qubo", help="QUBO document path")
    _add_server_out(convert, "write the canonical instance document here")
    convert.set_defaults(func=cmd_convert)

    serve = commands.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=cmd_serve)

    return parser


def _client(args) -> ServiceClient:
    return ServiceClient(base_url=getattr(args, "server", None))


def _emit(args, text: str) -> None:
    if args.out:
        io.write_text_atomic(args.out, text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)


def _read(path: str) -> str:
    with open(path, "r") as handle:
        return handle.read()


def _load_instance_doc(path: str) -> dict:
    inst = io.parse_instance(_read(path), source=path)
    return io.instance_to_document(inst)


# ---------------------------------------------------------------------------
# commands


def cmd_gen(args) -> int:
    metadata = {}
    for key, value in (
        ("label", args.label),
        ("bond_length", args.bond_length),
        ("r", args.r),
        ("reference_energy", args.reference_energy),
        ("dissociation_limit", args.dissociation_limit),
    ):
        if value is not None:
            metadata[key] = value
    with _client(args) as client:
        doc = client.generate(args.kind, args.n, args.seed, metadata=metadata or None)
    _emit(args, io.serialize_instance(io.instance_from_document(doc)))
    return 0


def cmd_solve(args) -> int:
    doc = _load_instance_doc(args.instance)
    with _client(args) as client:
        resp = client.solve(
            doc,
            variant=args.variant,
            shots=args.shots,
            base_seed=args.seed,
            descent=args.descent == "on",
            workers=args.workers,
            overrides=_parse_set(args.overrides),
        )
    print(f"best energy: {resp['best']['energy']}")
    if resp["hit_count"] is not None:
        first = resp["samples_to_first_hit"]
        if first is not None:
            print(f"reference hit: yes (first at shot {first}, {resp['hit_count']}/{resp['shots']} shots)")
        else:
            print("reference hit: no")
    if resp["diverged"]:
        print(f"diverged shots: {len(resp['diverged'])}", file=sys.stderr)
    if args.out:
        io.write_text_atomic(args.out, json.dumps(resp, indent=2) + "\n")
        print(f"wrote {args.out}")
    return 0


def cmd_sweep(args) -> int:
    manifest = io.parse_manifest(_read(args.manifest), source=args.manifest)
    base_dir = os.path.dirname(os.path.abspath(args.manifest))
    points: list[ProfilePoint] = []
    failures = 0
    with _client(args) as client:
        for entry in manifest.entries:
            path = entry.path
            if not os.path.isabs(path):
                path = os.path.join(base_dir, path)
            try:
                doc = _load_instance_doc(path)
                resp = client.solve(
                    doc,
                    variant=args.variant,
                    shots=args.shots,
                    base_seed=args.seed,
                    descent=args.descent == "on",
                    workers=args.workers,
                    overrides=_parse_set(args.overrides),
                )
            except (OSError, InstanceFormatError, ServiceError) as err:
                failures += 1
                print(
                    f"entry (bond_length={entry.bond_length}, r={entry.r}): {err}",
                    file=sys.stderr,
                )
                points.append(ProfilePoint(entry.bond_length, entry.r,
                                           float("nan"), float("nan"), None, float("nan")))
                continue
            energies = [e for e in resp["energies"] if e is not None]
            hit_rate = None
            if resp["hit_count"] is not None:
                hit_rate = resp["hit_count"] / resp["shots"]
            points.append(
                ProfilePoint(
                    bond_length=entry.bond_length,
                    r=entry.r,
                    best_energy=resp["best"]["energy"],
                    mean_energy=sum(energies) / len(energies) if energies else float("nan"),
                    hit_rate=hit_rate,
                    wall_ms=resp["total_wall_s"] * 1000.0,
                )
            )
    _emit(args, io.export_profile(manifest, points))
    if failures:
        print(f"{failures}/{len(manifest.entries)} entries failed", file=sys.stderr)
    return 0


def cmd_exact(args) -> int:
    doc = _load_instance_doc(args.instance)
    with _client(args) as client:
        resp = client.exact(doc)
    _emit(args, json.dumps(resp, indent=2) + "\n")
    if args.out:
        print(f"ground energy: {resp['ground_energy']} "
              f"({len(resp['ground_configs'])} configs)")
    return 0


def _load_bench_docs(paths: list[str]) -> list[dict]:
    if len(paths) == 1:
        try:
            peek = json.loads(_read(paths[0]))
        except json.JSONDecodeError:
            peek = None
        if isinstance(peek, dict) and "entries" in peek:
            manifest = io.parse_manifest(_read(paths[0]), source=paths[0])
            base_dir = os.path.dirname(os.path.abspath(paths[0]))
            docs = []
            for entry in manifest.entries:
                path = entry.path
                if not os.path.isabs(path):
                    path = os.path.join(base_dir, path)
                docs.append(_load_instance_doc(path))
            return docs
    return [_load_instance_doc(p) for p in paths]


def _format_bench_table(resp: dict) -> str:
    header = (
        f"{'variant':<8}{'instances':>10}{'solved':>8}"
        f"{'median_sts':>12}{'mean_sts':>10}{'total_s':>10}{'per_shot_ms':>13}"
    )
    lines = [header]
    for row in resp["rows"]:
        med = row["median_samples_to_solution"]
        mean = row["mean_samples_to_solution"]
        lines.append(
            f"{row['variant']:<8}{row['instances']:>10}{row['solved']:>8}"
            f"{'-' if med is None else format(med, 'g'):>12}"
            f"{'-' if mean is None else format(mean, '.2f'):>10}"
            f"{row['total_wall_s']:>10.3f}"
            f"{row['per_shot_mean_wall_s'] * 1000.0:>13.3f}"
        )
    return "\n".join(lines) + "\n"


def cmd_bench(args) -> int:
    docs = _load_bench_docs(args.paths)
    variants = [v.strip() for v in args.variants.split(",") if v.strip()]
    for v in variants:
        if v not in VARIANTS:
            raise ValueError(f"unknown variant {v!r}; expected a subset of {','.join(VARIANTS)}")
    with _client(args) as client:
        resp = client.bench(
            docs,
            variants=variants,
            shots=args.shots,
            base_seed=args.seed,
            descent=args.descent == "on",
            tol=args.tol,
            workers=args.workers,
            overrides=_parse_set(args.overrides),
        )
    table = _format_bench_table(resp)
    sys.stdout.write(table)
    if args.out:
        io.write_text_atomic(args.out, table)
        print(f"wrote {args.out}")
    return 0


def cmd_convert(args) -> int:
    qubo = io.parse_qubo(_read(args.qubo), source=args.qubo)
    metadata = {}
    for key in ("label", "bond_length", "r", "reference_energy", "dissociation_limit"):
        value = getattr(qubo.metadata, key)
        if value not in (None, ""):
            metadata[key] = value
    with _client(args) as client:
        doc = client.convert(
            [list(row) for row in qubo.q], qubo.constant, metadata=metadata or None
        )
    _emit(args, io.serialize_instance(io.instance_from_document(doc)))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InstanceFormatError, ServiceError, OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
