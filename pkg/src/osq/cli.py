"""Command-line front end.

    osq run CIRCUIT.osq [--shots N] [--seed S] [--sum-mode kerr|permutation]
                        [--format json|csv] [--out PATH] [--amp-cap N]
    osq converge [--d-min A] [--d-max B] [--step K] [--metrics LIST] [--out PATH]
    osq dump {pauli,phase_op,fourier,sum} --d N [--out PATH]

``run`` exits 0 on success, 1 when the circuit has diagnostics and 2 when the
register would exceed the amplitude cap (``OSQ_AMP_CAP`` or ``--amp-cap``).
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .convergence import METRICS, convergence_rows
from .dsl import compile_source
from .engine import amplitude_cap, check_register_size, run_shots
from .errors import ResourceCapExceeded
from .gates import sum_permutation
from .hilbert import fourier_operator
from .operators import pauli_generators, phase_operator

EXIT_OK, EXIT_DIAGNOSTICS, EXIT_CAP = 0, 1, 2
DUMP_OBJECTS = ("pauli", "phase_op", "fourier", "sum")
ZERO_CUTOFF = 1e-14


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def result_to_json(result, program, dim) -> dict:
    measurements = []
    for i, instr in enumerate(result.measurements):
        marginal = result.marginal(i)
        measurements.append({
            "qudit": instr.label or program.qudit_names[instr.qudit],
            "basis": instr.basis.value,
            "histogram": {str(k): marginal[k] for k in sorted(marginal)},
        })
    return {
        "dim": dim,
        "shots": result.shots,
        "seed": result.seed,
        "measurements": measurements,
        "version": __version__,
    }


def _write_run_csv(fh, payload):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["measurement", "qudit", "basis", "outcome", "count"])
    for i, m in enumerate(payload["measurements"]):
        for label, count in m["histogram"].items():
            w.writerow([i, m["qudit"], m["basis"], label, count])


def cmd_run(args) -> int:
    path = Path(args.circuit)
    try:
        source = path.read_bytes()
    except OSError as exc:
        print(f"{path}: error: {exc.strerror}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    cap = args.amp_cap if args.amp_cap is not None else amplitude_cap()
    try:
        program, diags = compile_source(source, args.sum_mode, cap)
    except ResourceCapExceeded as exc:
        print(f"{path}: error: {exc}", file=sys.stderr)
        return EXIT_CAP
    for d in diags:
        print(f"{path}:{d}", file=sys.stderr)
    if program is None:
        return EXIT_DIAGNOSTICS
    result = run_shots(program, args.shots, args.seed)
    payload = result_to_json(result, program, program.initial.d)
    with _output(args.out) as fh:
        if args.format == "json":
            fh.write(json.dumps(payload, indent=2) + "\n")
        else:
            _write_run_csv(fh, payload)
    return EXIT_OK


def cmd_converge(args) -> int:
    metrics = [m.strip() for m in args.metrics.split(",") if m.strip()]
    try:
        rows = convergence_rows(args.d_min, args.d_max, args.step, metrics, args.alpha)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["d", "metric", "value"])
        for d, name, value in rows:
            w.writerow([d, name, repr(float(value))])
    return EXIT_OK


def _fmt(x) -> str:
    x = float(x)
    return "0" if abs(x) < ZERO_CUTOFF else repr(x)


def write_operator_csv(fh, matrix):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["row", "col", "re", "im"])
    for (r, c), z in np.ndenumerate(np.asarray(matrix)):
        w.writerow([r, c, _fmt(z.real), _fmt(z.imag)])


def dump_tables(obj, d):
    """``[(title, matrix), ...]`` for a dump object."""
    if obj == "pauli":
        x, z = pauli_generators(d)
        return [("X", x.matrix), ("Z", z.matrix)]
    if obj == "phase_op":
        return [("phase_op", phase_operator(d).matrix)]
    if obj == "fourier":
        return [("fourier", fourier_operator(d).matrix)]
    if obj == "sum":
        return [("sum", sum_permutation(d).matrix)]
    raise ValueError(f"unknown object {obj!r}")


def cmd_dump(args) -> int:
    if args.object not in DUMP_OBJECTS:
        print(f"error: unknown object {args.object!r}; choose from {', '.join(DUMP_OBJECTS)}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    if args.d < 1:
        print("error: --d must be >= 1", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    arity = 2 if args.object == "sum" else 1
    try:
        check_register_size(args.d, 2 * arity)
    except ResourceCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    tables = dump_tables(args.object, args.d)
    with _output(args.out) as fh:
        for i, (title, matrix) in enumerate(tables):
            if len(tables) > 1:
                if i:
                    fh.write("\n")
                fh.write(f"# {title}\n")
            write_operator_csv(fh, matrix)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="osq", description="Oscillator-qudit circuit simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a .osq circuit and write shot histograms")
    run.add_argument("circuit")
    run.add_argument("--shots", type=int, default=1000)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--sum-mode", choices=("kerr", "permutation"), default="kerr")
    run.add_argument("--format", choices=("json", "csv"), default="json")
    run.add_argument("--out", default=None)
    run.add_argument("--amp-cap", type=int, default=None, help="override the amplitude cap")
    run.set_defaults(func=cmd_run)

    conv = sub.add_parser("converge", help="finite-d convergence table")
    conv.add_argument("--d-min", type=int, default=2)
    conv.add_argument("--d-max", type=int, default=16)
    conv.add_argument("--step", type=int, default=1)
    conv.add_argument("--metrics", default=",".join(METRICS))
    conv.add_argument("--alpha", type=complex, default=1.0, help="displacement amplitude for the fidelity metric")
    conv.add_argument("--out", default=None)
    conv.set_defaults(func=cmd_converge)

    dump = sub.add_parser("dump", help="write an operator as row,col,re,im CSV")
    dump.add_argument("object")
    dump.add_argument("--d", type=int, required=True)
    dump.add_argument("--out", default=None)
    dump.set_defaults(func=cmd_dump)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "shots", 1) < 1:
        print("error: --shots must be >= 1", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    if getattr(args, "seed", 0) is not None and not 0 <= getattr(args, "seed", 0) < 2**64:
        print("error: --seed must be a 64-bit unsigned integer", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
