"""Command-line front door.

Subcommands: analyze | psi | ergodize | approx | circle | verify.  Reports
are JSON (default) or CSV; every numeric field is either an exact rational
string "p/q" or a decimal interval {lo, hi, width}.  Exit codes: 0 all
checks pass, 1 a theorem-backed check failed (an implementation bug, not a
property of the input), 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from fractions import Fraction
from typing import Any, Sequence

from .approx import certify, find_periodic_basis
from .circle import RotationNumber, ergodization_steps, theorem2_check
from .errors import DomainError
from .ergodization import (
    ergodization_time_bracket,
    theorem1_bound,
)
from .lattice import transference_check
from .resonance import ResonanceData, analyze, psi, theorem1_delta_max
from .scalars import IndependenceSuspectError
from .vectorspec import (
    BUILTIN_VECTORS,
    SweepSpec,
    VectorFormatError,
    VectorSpec,
    dyadic_decimal,
    fraction_str,
    interval_json,
    load_sweep_spec,
    load_vector_spec,
    parse_rational,
    resolve_vector,
    scalar_json,
)

SWEEP_SUITE = "torusflow-v1"
CSV_HEADER = [
    "suite",
    "vector",
    "check",
    "parameter",
    "status",
    "t_lo",
    "t_hi",
    "observed",
    "bound",
    "ratio",
    "detail",
]


def _report_width() -> Fraction:
    bits = int(os.environ.get("TORUSFLOW_PREC_BITS", "48"))
    return Fraction(1, 1 << max(8, bits))


def _emit(payload: Any, args: argparse.Namespace) -> None:
    if args.format == "json":
        text = json.dumps(payload, indent=2, sort_keys=True)
    else:
        rows = payload if isinstance(payload, list) else [payload]
        flat = [
            {k: (json.dumps(v) if isinstance(v, (dict, list)) else v) for k, v in row.items()}
            for row in rows
        ]
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=list(flat[0].keys()))
        writer.writeheader()
        writer.writerows(flat)
        text = buffer.getvalue().rstrip("\n")
    if args.out:
        with open(args.out, "w") as handle:
            handle.write(text + "\n")
    else:
        print(text)


def _load_vector(args: argparse.Namespace) -> VectorSpec:
    if getattr(args, "spec", None):
        return load_vector_spec(args.spec)
    if getattr(args, "vec", None):
        return resolve_vector(args.vec)
    raise VectorFormatError("pass --spec FILE or --vec NAME")


def _analyze_payload(spec: VectorSpec, data: ResonanceData) -> dict[str, Any]:
    width = _report_width()
    return {
        "vector": spec.name,
        "n": data.n,
        "d": data.d,
        "kernel_basis": [[str(x) for x in row] for row in data.kernel.basis],
        "lattice_basis": [[str(x) for x in row] for row in data.lattice.basis],
        "q_alpha": str(data.q_alpha),
        "c_alpha": str(data.c_alpha),
        "scale": {
            "coefficients": scalar_json(data.scale),
            "interval": interval_json(data.sup_norm_interval(width)),
        },
        "normalized": (
            [scalar_json(entry) for entry in data.normalized]
            if data.normalized is not None
            else None
        ),
        "delta_max": fraction_str(theorem1_delta_max(data)),
    }


def _cmd_analyze(args: argparse.Namespace) -> int:
    spec = _load_vector(args)
    start = time.perf_counter()
    data = analyze(spec.alpha())
    payload = _analyze_payload(spec, data)
    payload["wall_time_s"] = round(time.perf_counter() - start, 6)
    _emit(payload, args)
    return 0


def _cmd_psi(args: argparse.Namespace) -> int:
    spec = _load_vector(args)
    radius = parse_rational(args.Q)
    start = time.perf_counter()
    data = analyze(spec.alpha())
    value = psi(data, radius)
    payload = {
        "vector": spec.name,
        "radius": fraction_str(radius),
        "witness": list(value.witness),
        "gap_coefficients": scalar_json(value.gap),
        "value_interval": interval_json(value.value_interval(_report_width())),
        "wall_time_s": round(time.perf_counter() - start, 6),
    }
    _emit(payload, args)
    return 0


def _cmd_ergodize(args: argparse.Namespace) -> int:
    spec = _load_vector(args)
    delta = parse_rational(args.delta)
    tol = parse_rational(args.tol) if args.tol else None
    epsilon = parse_rational(args.epsilon) if args.epsilon else None
    start = time.perf_counter()
    data = analyze(spec.alpha())
    bracket = ergodization_time_bracket(data, delta, tol=tol, epsilon=epsilon)
    payload: dict[str, Any] = {
        "vector": spec.name,
        "delta": fraction_str(delta),
        "t_lo": fraction_str(bracket.t_lo),
        "t_hi": fraction_str(bracket.t_hi),
        "tol": fraction_str(bracket.tol),
        "covering": fraction_str(bracket.covering),
        "probes": len(bracket.trail),
        "bound_interval": None,
        "c_d_alpha": None,
        "bound_holds": None,
    }
    if 0 < delta <= theorem1_delta_max(data):
        bound = theorem1_bound(data, delta)
        payload["bound_interval"] = interval_json(bound.interval(_report_width()))
        payload["c_d_alpha"] = bound.c_d_alpha
        payload["bound_holds"] = bound.dominates(bracket.t_hi)
    payload["wall_time_s"] = round(time.perf_counter() - start, 6)
    _emit(payload, args)
    return 0 if payload["bound_holds"] in (True, None) else 1


def _cmd_approx(args: argparse.Namespace) -> int:
    spec = _load_vector(args)
    radius = parse_rational(args.Q)
    start = time.perf_counter()
    data = analyze(spec.alpha())
    approximation = find_periodic_basis(data, radius)
    report = certify(data, approximation)
    payload = {
        "vector": spec.name,
        "radius": fraction_str(radius),
        "pairs": [
            {
                "q": q,
                "p": list(p),
                "omega": [fraction_str(Fraction(x, q)) for x in p],
            }
            for q, p in approximation.pairs
        ],
        "q_limit_interval": interval_json(approximation.q_limit_interval()),
        "certificates": {
            "pairs": [
                {
                    "q": c.q,
                    "in_lattice": c.in_lattice,
                    "close": c.close,
                    "within_q_limit": c.within_q_limit,
                }
                for c in report.pair_checks
            ],
            "spans_lattice": report.spans_lattice,
            "ok": report.ok,
        },
        "wall_time_s": round(time.perf_counter() - start, 6),
    }
    _emit(payload, args)
    return 0 if report.ok else 1


def _rotation_from_args(args: argparse.Namespace) -> tuple[str, RotationNumber]:
    if getattr(args, "spec", None) or getattr(args, "vec", None):
        spec = _load_vector(args)
        if spec.n != 2:
            raise VectorFormatError("circle rotations need a two-entry vector")
        unit = spec.entries[0]
        if not (unit.is_rational and unit.as_fraction() == 1):
            raise VectorFormatError("circle vectors must have first entry 1")
        return spec.name, RotationNumber.from_scalar(spec.entries[1])
    raw = args.alpha
    if raw is None:
        raise VectorFormatError("pass --alpha NAME|RATIONAL or --spec/--vec")
    if raw in BUILTIN_VECTORS:
        spec = BUILTIN_VECTORS[raw]
        if spec.n != 2:
            raise VectorFormatError(f"built-in vector {raw!r} is not two-dimensional")
        return raw, RotationNumber.from_scalar(spec.entries[1])
    return raw, RotationNumber.from_fraction(parse_rational(raw))


def _cmd_circle(args: argparse.Namespace) -> int:
    name, rotation = _rotation_from_args(args)
    delta = parse_rational(args.delta)
    start = time.perf_counter()
    steps = ergodization_steps(rotation, delta)
    payload: dict[str, Any] = {
        "alpha": name,
        "rational": fraction_str(rotation.rational) if rotation.rational is not None else None,
        "delta": fraction_str(delta),
        "defined": steps is not None,
        "N": steps,
        "psi_floor": None,
        "bound": None,
        "pass": None,
    }
    exit_code = 0
    if not rotation.is_rational:
        report = theorem2_check(rotation, delta)
        payload["psi_floor"] = report.profile_floor
        payload["bound"] = report.bound
        payload["pass"] = report.ok
        exit_code = 0 if report.ok else 1
    payload["wall_time_s"] = round(time.perf_counter() - start, 6)
    _emit(payload, args)
    return exit_code


def _row(
    vector: str,
    check: str,
    parameter: str,
    status: str,
    *,
    t_lo: str = "",
    t_hi: str = "",
    observed: str = "",
    bound: str = "",
    ratio: str = "",
    detail: str = "",
) -> dict[str, str]:
    return {
        "suite": SWEEP_SUITE,
        "vector": vector,
        "check": check,
        "parameter": parameter,
        "status": status,
        "t_lo": t_lo,
        "t_hi": t_hi,
        "observed": observed,
        "bound": bound,
        "ratio": ratio,
        "detail": detail,
    }


def _verify_theorem1(
    data: ResonanceData, spec: VectorSpec, sweep: SweepSpec
) -> list[dict[str, str]]:
    rows = []
    delta_max = theorem1_delta_max(data)
    grid = sweep.delta_grid or tuple(delta_max / 2**i for i in range(4))
    for delta in grid:
        if not 0 < delta <= delta_max:
            rows.append(
                _row(
                    spec.name,
                    "theorem1",
                    fraction_str(delta),
                    "skip",
                    detail=f"hypothesis needs 0 < delta <= {delta_max}",
                )
            )
            continue
        bound = theorem1_bound(data, delta)
        bracket = ergodization_time_bracket(
            data, delta, tol=sweep.tol, epsilon=sweep.epsilon
        )
        ok = bound.dominates(bracket.t_hi)
        ratio = float(bracket.t_hi) / float(bound) if float(bound) else 0.0
        rows.append(
            _row(
                spec.name,
                "theorem1",
                fraction_str(delta),
                "pass" if ok else "fail",
                t_lo=fraction_str(bracket.t_lo),
                t_hi=fraction_str(bracket.t_hi),
                bound=dyadic_decimal(bound.interval().upper),
                ratio=f"{ratio:.6g}",
            )
        )
    return rows


def _verify_proposition(
    data: ResonanceData, spec: VectorSpec, sweep: SweepSpec
) -> list[dict[str, str]]:
    rows = []
    base = (data.n + 2) * data.q_alpha
    grid = sweep.q_grid or (Fraction(base), Fraction(2 * base), Fraction(4 * base))
    for radius in grid:
        if radius < base:
            rows.append(
                _row(
                    spec.name,
                    "proposition",
                    fraction_str(radius),
                    "skip",
                    detail=f"hypothesis needs radius >= (n+2) Q_alpha = {base}",
                )
            )
            continue
        approximation = find_periodic_basis(data, radius)
        report = certify(data, approximation)
        rows.append(
            _row(
                spec.name,
                "proposition",
                fraction_str(radius),
                "pass" if report.ok else "fail",
                observed=str(max(q for q, _ in approximation.pairs)),
                bound=dyadic_decimal(approximation.q_limit_interval().upper),
                detail=f"{len(approximation.pairs)} pairs",
            )
        )
    return rows


def _verify_transference(data: ResonanceData, spec: VectorSpec) -> list[dict[str, str]]:
    report = transference_check(data.lattice)
    worst = max(report.products)
    return [
        _row(
            spec.name,
            "transference",
            f"d={report.rank}",
            "pass" if report.ok else "fail",
            observed=fraction_str(worst),
            bound=str(report.upper),
            detail=" ".join(fraction_str(p) for p in report.products),
        )
    ]


def _verify_theorem2(
    data: ResonanceData, spec: VectorSpec, sweep: SweepSpec
) -> list[dict[str, str]]:
    rows = []
    grid = sweep.delta_grid or tuple(Fraction(1, 2**i) for i in range(1, 9))
    if data.n != 2:
        return [
            _row(spec.name, "theorem2", "", "skip", detail="needs two frequencies")
        ]
    unit = data.alpha[0]
    if not (unit.is_rational and unit.as_fraction() == 1):
        return [
            _row(spec.name, "theorem2", "", "skip", detail="needs leading entry 1")
        ]
    rotation = RotationNumber.from_scalar(data.alpha[1])
    for delta in grid:
        if rotation.is_rational:
            rows.append(
                _row(
                    spec.name,
                    "theorem2",
                    fraction_str(delta),
                    "skip",
                    detail="hypothesis needs an irrational rotation",
                )
            )
            continue
        if not 0 < delta < 1:
            rows.append(
                _row(
                    spec.name,
                    "theorem2",
                    fraction_str(delta),
                    "skip",
                    detail="hypothesis needs 0 < delta < 1",
                )
            )
            continue
        report = theorem2_check(rotation, delta)
        rows.append(
            _row(
                spec.name,
                "theorem2",
                fraction_str(delta),
                "pass" if report.ok else "fail",
                observed=str(report.steps),
                bound=str(report.bound),
                detail=f"profile_floor={report.profile_floor}",
            )
        )
    return rows


def _cmd_verify(args: argparse.Namespace) -> int:
    sweep = load_sweep_spec(args.sweep)
    rows: list[dict[str, str]] = []
    for spec in sweep.vectors:
        data = analyze(spec.alpha())
        for check in sweep.checks:
            if check == "theorem1":
                rows.extend(_verify_theorem1(data, spec, sweep))
            elif check == "proposition":
                rows.extend(_verify_proposition(data, spec, sweep))
            elif check == "transference":
                rows.extend(_verify_transference(data, spec))
            elif check == "theorem2":
                rows.extend(_verify_theorem2(data, spec, sweep))

    if args.format == "json":
        text = json.dumps(rows, indent=2)
    else:
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=CSV_HEADER)
        writer.writeheader()
        writer.writerows(rows)
        text = buffer.getvalue().rstrip("\n")
    if args.out:
        with open(args.out, "w") as handle:
            handle.write(text + "\n")
    else:
        print(text)

    passed = sum(1 for r in rows if r["status"] == "pass")
    failed = sum(1 for r in rows if r["status"] == "fail")
    skipped = sum(1 for r in rows if r["status"] == "skip")
    print(
        f"verify: {passed} passed, {failed} failed, {skipped} skipped",
        file=sys.stderr,
    )
    return 1 if failed else 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torusflow",
        description=(
            "Resonance lattices, certified ergodization times, periodic "
            "approximations, and circle-rotation step counts for linear "
            "flows on tori."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_vector_options(p: argparse.ArgumentParser) -> None:
        p.add_argument("--spec", help="vector-spec JSON file")
        p.add_argument(
            "--vec",
            help=f"built-in vector name ({', '.join(sorted(BUILTIN_VECTORS))})",
        )
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", help="write the report to this file")

    p_analyze = sub.add_parser("analyze", help="resonance structure of a vector")
    add_vector_options(p_analyze)
    p_analyze.set_defaults(handler=_cmd_analyze)

    p_psi = sub.add_parser("psi", help="resonance profile at a box radius")
    add_vector_options(p_psi)
    p_psi.add_argument("--Q", required=True, help="box radius (rational)")
    p_psi.set_defaults(handler=_cmd_psi)

    p_erg = sub.add_parser("ergodize", help="certified ergodization-time bracket")
    add_vector_options(p_erg)
    p_erg.add_argument("--delta", required=True, help="density parameter (rational)")
    p_erg.add_argument("--tol", help="bracket width target")
    p_erg.add_argument("--epsilon", help="grid covering radius")
    p_erg.set_defaults(handler=_cmd_ergodize)

    p_approx = sub.add_parser("approx", help="periodic approximation basis")
    add_vector_options(p_approx)
    p_approx.add_argument("--Q", required=True, help="approximation radius (rational)")
    p_approx.set_defaults(handler=_cmd_approx)

    p_circle = sub.add_parser("circle", help="circle-rotation ergodization steps")
    add_vector_options(p_circle)
    p_circle.add_argument(
        "--alpha", help="rotation: built-in name or exact rational p/q"
    )
    p_circle.add_argument("--delta", required=True, help="density parameter")
    p_circle.set_defaults(handler=_cmd_circle)

    p_verify = sub.add_parser("verify", help="run a verification sweep")
    p_verify.add_argument("--sweep", required=True, help="sweep-spec JSON file")
    p_verify.add_argument("--format", choices=("csv", "json"), default="csv")
    p_verify.add_argument("--out", help="write rows to this file")
    p_verify.set_defaults(handler=_cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (VectorFormatError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except IndependenceSuspectError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
