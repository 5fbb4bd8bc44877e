"""Vector-spec files: declared constants, exact entries, and named built-ins.

A vector spec is a JSON document declaring the irrational constants in play
and the direction vector's exact rational coefficients over them:

    {
      "name": "sqrt2",
      "constants": [
        {"symbol": "one", "kind": "one"},
        {"symbol": "sqrt2", "kind": "sqrt", "radicand": 2}
      ],
      "entries": [["1", "0"], ["0", "1"]],
      "independence_attestation": "1 and sqrt2 are Q-linearly independent."
    }

Entries may be coefficient lists aligned with the declared constants (as
above) or sparse objects keyed by symbol.  Algebraic roots declare integer
polynomial coefficients in ascending order plus a rational isolating
interval: {"symbol": "cbrt2", "kind": "root", "poly": [-2, 0, 0, 1],
"interval": ["1", "2"]}.

The Q-linear independence of the declared constants is a trusted input; the
attestation field records that the user accepts it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, Sequence

from .scalars import ONE, BasisConstant, DyadicInterval, RealScalar


class VectorFormatError(ValueError):
    """A vector-spec or sweep-spec document is malformed."""


def parse_rational(text: Any) -> Fraction:
    if isinstance(text, bool):
        raise VectorFormatError(f"expected a rational, got {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, str):
        try:
            return Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise VectorFormatError(f"bad rational literal {text!r}") from exc
    raise VectorFormatError(f"expected a rational string, got {type(text).__name__}")


def fraction_str(value: Fraction) -> str:
    return str(value)


def dyadic_decimal(value: Fraction) -> str:
    """Exact decimal expansion of a dyadic rational."""
    den = value.denominator
    k = den.bit_length() - 1
    if den != 1 << k:
        raise ValueError(f"{value} is not dyadic")
    scaled = value.numerator * 5**k
    text = str(abs(scaled)).rjust(k + 1, "0")
    sign_chr = "-" if scaled < 0 else ""
    if k == 0:
        return f"{sign_chr}{text}"
    return f"{sign_chr}{text[:-k]}.{text[-k:]}"


def interval_json(interval: DyadicInterval) -> dict[str, str]:
    return {
        "lo": dyadic_decimal(interval.lower),
        "hi": dyadic_decimal(interval.upper),
        "width": fraction_str(interval.width),
    }


def scalar_json(scalar: RealScalar) -> dict[str, str]:
    return {c.symbol: fraction_str(q) for c, q in scalar.terms}


def constant_from_json(obj: Mapping[str, Any]) -> BasisConstant:
    if not isinstance(obj, Mapping):
        raise VectorFormatError("constant declarations must be objects")
    symbol = obj.get("symbol")
    kind = obj.get("kind")
    if not isinstance(symbol, str) or not symbol:
        raise VectorFormatError("constant needs a nonempty 'symbol'")
    try:
        if kind == "one":
            return ONE if symbol == "one" else BasisConstant(symbol, "one")
        if kind == "sqrt":
            return BasisConstant(symbol, "sqrt", radicand=int(obj["radicand"]))
        if kind == "root":
            poly = [int(c) for c in obj["poly"]]
            lo, hi = (parse_rational(x) for x in obj["interval"])
            return BasisConstant.root(symbol, poly, lo, hi)
    except VectorFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise VectorFormatError(f"bad declaration for constant {symbol!r}: {exc}") from exc
    raise VectorFormatError(f"unknown constant kind {kind!r}")


@dataclass(frozen=True)
class VectorSpec:
    name: str
    constants: tuple[BasisConstant, ...]
    entries: tuple[RealScalar, ...]
    attestation: str = ""

    @property
    def n(self) -> int:
        return len(self.entries)

    def alpha(self) -> tuple[RealScalar, ...]:
        return self.entries


def vector_spec_from_json(obj: Mapping[str, Any]) -> VectorSpec:
    if not isinstance(obj, Mapping):
        raise VectorFormatError("vector spec must be a JSON object")
    name = obj.get("name")
    if not isinstance(name, str) or not name:
        raise VectorFormatError("vector spec needs a nonempty 'name'")
    raw_constants = obj.get("constants")
    if not isinstance(raw_constants, Sequence) or not raw_constants:
        raise VectorFormatError("vector spec needs a nonempty 'constants' list")
    constants = tuple(constant_from_json(c) for c in raw_constants)
    symbols = [c.symbol for c in constants]
    if len(set(symbols)) != len(symbols):
        raise VectorFormatError("constant symbols must be unique")
    by_symbol = dict(zip(symbols, constants))

    raw_entries = obj.get("entries")
    if not isinstance(raw_entries, Sequence) or not raw_entries:
        raise VectorFormatError("vector spec needs a nonempty 'entries' list")
    entries = []
    for position, raw in enumerate(raw_entries):
        coeffs: dict[BasisConstant, Fraction] = {}
        if isinstance(raw, Mapping):
            for symbol, value in raw.items():
                if symbol not in by_symbol:
                    raise VectorFormatError(
                        f"entry {position} references undeclared constant {symbol!r}"
                    )
                coeffs[by_symbol[symbol]] = parse_rational(value)
        elif isinstance(raw, Sequence) and not isinstance(raw, str):
            if len(raw) != len(constants):
                raise VectorFormatError(
                    f"entry {position} has {len(raw)} coefficients for "
                    f"{len(constants)} constants"
                )
            for constant, value in zip(constants, raw):
                coeffs[constant] = parse_rational(value)
        else:
            raise VectorFormatError(f"entry {position} must be a list or object")
        entries.append(RealScalar.from_terms(coeffs))
    return VectorSpec(
        name=name,
        constants=constants,
        entries=tuple(entries),
        attestation=str(obj.get("independence_attestation", "")),
    )


def load_vector_spec(path: str | Path) -> VectorSpec:
    try:
        payload = json.loads(Path(path).read_text())
    except OSError as exc:
        raise VectorFormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise VectorFormatError(f"{path} is not valid JSON: {exc}") from exc
    return vector_spec_from_json(payload)


def _builtin(name: str, constants: Sequence[BasisConstant], rows: Sequence[dict]) -> VectorSpec:
    entries = tuple(
        RealScalar.from_terms(
            {c: Fraction(row.get(c.symbol, 0)) for c in constants}
        )
        for row in rows
    )
    return VectorSpec(
        name=name,
        constants=tuple(constants),
        entries=entries,
        attestation="built-in constant set; independence is classical",
    )


_SQRT2 = BasisConstant.sqrt(2)
_SQRT3 = BasisConstant.sqrt(3)
_SQRT5 = BasisConstant.sqrt(5)
_CBRT2 = BasisConstant.root("cbrt2", (-2, 0, 0, 1), 1, 2)

BUILTIN_VECTORS: dict[str, VectorSpec] = {
    spec.name: spec
    for spec in (
        _builtin("sqrt2", (ONE, _SQRT2), [{"one": 1}, {"sqrt2": 1}]),
        _builtin("sqrt3", (ONE, _SQRT3), [{"one": 1}, {"sqrt3": 1}]),
        _builtin(
            "golden",
            (ONE, _SQRT5),
            [{"one": 1}, {"one": Fraction(-1, 2), "sqrt5": Fraction(1, 2)}],
        ),
        _builtin("cbrt2", (ONE, _CBRT2), [{"one": 1}, {"cbrt2": 1}]),
        _builtin(
            "sqrt2-sqrt3",
            (ONE, _SQRT2, _SQRT3),
            [{"one": 1}, {"sqrt2": 1}, {"sqrt3": 1}],
        ),
        _builtin(
            "sqrt2-sum",
            (ONE, _SQRT2),
            [{"one": 1}, {"sqrt2": 1}, {"one": 1, "sqrt2": 1}],
        ),
        _builtin("half", (ONE,), [{"one": 1}, {"one": Fraction(1, 2)}]),
    )
}


def resolve_vector(name_or_path: str) -> VectorSpec:
    """Resolve a built-in vector name, falling back to a spec-file path."""
    if name_or_path in BUILTIN_VECTORS:
        return BUILTIN_VECTORS[name_or_path]
    if Path(name_or_path).exists():
        return load_vector_spec(name_or_path)
    raise VectorFormatError(
        f"{name_or_path!r} is neither a built-in vector "
        f"({', '.join(sorted(BUILTIN_VECTORS))}) nor a readable spec file"
    )


@dataclass(frozen=True)
class SweepSpec:
    vectors: tuple[VectorSpec, ...]
    checks: tuple[str, ...]
    delta_grid: tuple[Fraction, ...] | None
    q_grid: tuple[Fraction, ...] | None
    tol: Fraction | None
    epsilon: Fraction | None


_KNOWN_CHECKS = ("theorem1", "proposition", "transference", "theorem2")


def sweep_spec_from_json(obj: Mapping[str, Any]) -> SweepSpec:
    if not isinstance(obj, Mapping):
        raise VectorFormatError("sweep spec must be a JSON object")
    raw_vectors = obj.get("vectors")
    if not isinstance(raw_vectors, Sequence) or not raw_vectors:
        raise VectorFormatError("sweep spec needs a nonempty 'vectors' list")
    vectors = []
    for item in raw_vectors:
        if isinstance(item, str):
            vectors.append(resolve_vector(item))
        else:
            vectors.append(vector_spec_from_json(item))
    checks = tuple(obj.get("checks", _KNOWN_CHECKS))
    for check in checks:
        if check not in _KNOWN_CHECKS:
            raise VectorFormatError(
                f"unknown check {check!r}; expected a subset of {_KNOWN_CHECKS}"
            )
    if not checks:
        raise VectorFormatError("sweep spec needs at least one check")

    def grid(key: str) -> tuple[Fraction, ...] | None:
        raw = obj.get(key)
        if raw is None:
            return None
        if not isinstance(raw, Sequence) or not raw:
            raise VectorFormatError(f"'{key}' must be a nonempty list when present")
        values = tuple(parse_rational(x) for x in raw)
        if key == "delta_grid" and any(v <= 0 for v in values):
            raise VectorFormatError("delta grid values must be positive")
        return values

    tol = obj.get("tol")
    eps = obj.get("epsilon")
    return SweepSpec(
        vectors=tuple(vectors),
        checks=checks,
        delta_grid=grid("delta_grid"),
        q_grid=grid("q_grid"),
        tol=parse_rational(tol) if tol is not None else None,
        epsilon=parse_rational(eps) if eps is not None else None,
    )


def load_sweep_spec(path: str | Path) -> SweepSpec:
    try:
        payload = json.loads(Path(path).read_text())
    except OSError as exc:
        raise VectorFormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise VectorFormatError(f"{path} is not valid JSON: {exc}") from exc
    return sweep_spec_from_json(payload)
