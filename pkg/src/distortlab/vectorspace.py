"""Finitely supported vectors, canonical keys, scaling functions, run-length vectors.

Coefficients are kept as exact :class:`fractions.Fraction` values at this level;
norm arithmetic elsewhere runs in binary64 (or mpmath in high-precision mode).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Rational, Real
from pathlib import Path
from typing import Callable, Iterable, Sequence

import mpmath
import numpy as np

from .errors import ParseError, ValidationError

SDVEC_FORMAT = "sdvec-1"

CanonKey = tuple  # ordered tuple of positive magnitudes (Fraction or float)


def to_fraction(value) -> Fraction:
    """Exact rational from an int, Fraction, float or a ``"p/q"`` / decimal string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite coefficient {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, Real):
        return Fraction(float(value))
    raise TypeError(f"cannot interpret {value!r} as a rational")


def format_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class FinVector:
    """A finitely supported vector: strictly increasing positions, nonzero values.

    >>> FinVector.dense([1, 0, 2]).entries
    ((1, Fraction(1, 1)), (3, Fraction(2, 1)))
    """

    entries: tuple = ()

    def __post_init__(self):
        clean = []
        last = 0
        for pos, val in self.entries:
            if isinstance(pos, bool) or int(pos) != pos or pos < 1:
                raise ValidationError(f"position {pos!r} is not an integer >= 1")
            pos = int(pos)
            if pos <= last:
                raise ValidationError(f"positions must be strictly increasing ({last} then {pos})")
            val = to_fraction(val)
            if val == 0:
                raise ValidationError(f"zero value stored at position {pos}")
            clean.append((pos, val))
            last = pos
        object.__setattr__(self, "entries", tuple(clean))

    @classmethod
    def dense(cls, values: Iterable, start: int = 1) -> "FinVector":
        """Vector with ``values`` at positions start, start+1, ...; zeros are dropped."""
        out = []
        for k, v in enumerate(values):
            q = to_fraction(v)
            if q != 0:
                out.append((start + k, q))
        return cls(tuple(out))

    @classmethod
    def unit(cls, i: int) -> "FinVector":
        return cls(((i, Fraction(1)),))

    @classmethod
    def from_mapping(cls, mapping: dict) -> "FinVector":
        return cls(tuple(sorted((p, v) for p, v in mapping.items() if to_fraction(v) != 0)))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def support(self) -> tuple:
        return tuple(p for p, _ in self.entries)

    @property
    def values(self) -> tuple:
        return tuple(v for _, v in self.entries)

    def as_dict(self) -> dict:
        return dict(self.entries)

    def restrict(self, positions) -> "FinVector":
        """E(x): keep only coordinates whose position lies in ``positions``."""
        keep = set(positions)
        return FinVector(tuple((p, v) for p, v in self.entries if p in keep))

    def restrict_interval(self, lo: int, hi: int) -> "FinVector":
        return FinVector(tuple((p, v) for p, v in self.entries if lo <= p <= hi))

    def scale(self, c) -> "FinVector":
        c = to_fraction(c)
        if c == 0:
            return FinVector()
        return FinVector(tuple((p, c * v) for p, v in self.entries))

    def shift(self, offset: int) -> "FinVector":
        return FinVector(tuple((p + offset, v) for p, v in self.entries))

    def __add__(self, other: "FinVector") -> "FinVector":
        acc = self.as_dict()
        for p, v in other.entries:
            acc[p] = acc.get(p, Fraction(0)) + v
        return FinVector.from_mapping(acc)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def precedes(self, other: "FinVector") -> bool:
        """Block order x < y: supp(x) lies entirely before supp(y)."""
        if not self.entries or not other.entries:
            return True
        return self.entries[-1][0] < other.entries[0][0]

    def to_dense(self) -> list:
        if not self.entries:
            return []
        out = [Fraction(0)] * self.entries[-1][0]
        for p, v in self.entries:
            out[p - 1] = v
        return out


def canonicalize(v: FinVector) -> CanonKey:
    """Spreading- and sign-invariant key: magnitudes in position order."""
    return tuple(abs(val) for _, val in v.entries)


def as_key(x) -> CanonKey:
    """Coerce a FinVector, a RunVector or a plain sequence of numbers to a CanonKey.

    Zeros are dropped and signs discarded; order is kept.
    """
    if isinstance(x, FinVector):
        return canonicalize(x)
    if isinstance(x, RunVector):
        return x.expand()
    out = []
    for v in x:
        if isinstance(v, str):
            v = to_fraction(v)
        a = abs(v)
        if a != 0:
            out.append(a)
    return tuple(out)


def embed(key: CanonKey, positions: Sequence[int] | None = None, signs: Sequence[int] | None = None) -> FinVector:
    """Place the magnitudes of ``key`` at strictly increasing ``positions`` with ``signs``."""
    if positions is None:
        positions = range(1, len(key) + 1)
    positions = list(positions)
    if len(positions) != len(key):
        raise ValidationError("need one position per magnitude")
    if signs is None:
        signs = [1] * len(key)
    return FinVector(tuple((p, s * to_fraction(m)) for p, s, m in zip(positions, signs, key)))


# ---------------------------------------------------------------------------
# scaling functions


def _log2p1(x):
    return math.log2(x + 1.0)


def _log2p1_mp(x):
    return mpmath.log(mpmath.mpf(x) + 1) / mpmath.log(2)


@dataclass(frozen=True)
class ScalingFunction:
    """The function f with f(1) = 1 that weighs an l-block split by 1/f(l)."""

    kind: str
    description: str
    fn: Callable = field(repr=False)  # compared by identity
    mp_fn: Callable | None = field(default=None, compare=False, repr=False)
    table: tuple | None = None

    def __call__(self, x) -> float:
        return float(self.fn(x))

    def mp(self, x):
        """High-precision evaluation at the current mpmath working precision."""
        if self.mp_fn is not None:
            return self.mp_fn(x)
        return mpmath.mpf(self.fn(float(x)))

    def array(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if self.kind == "default-log":
            return np.log2(xs + 1.0)
        if self.kind == "tabulated":
            tx = [float(x) for x, _ in self.table]
            ty = [float(y) for _, y in self.table]
            return _interp_table(xs, tx, ty)
        return np.array([self.fn(float(x)) for x in xs.ravel()], dtype=float).reshape(xs.shape)

    def upto(self, n: int) -> np.ndarray:
        """Array ``a`` of length n+1 with a[l] = f(l) for 1 <= l <= n; a[0] = nan."""
        return _f_table(self, n)

    @property
    def domain_max(self) -> float:
        if self.table is not None:
            return float(self.table[-1][0])
        return math.inf

    @classmethod
    def from_callable(cls, fn, description: str, mp_fn=None) -> "ScalingFunction":
        return cls("custom", description, fn, mp_fn)

    @classmethod
    def from_table(cls, points, description: str | None = None) -> "ScalingFunction":
        """Piecewise-linear f through ``points`` = [(x, f(x)), ...], x increasing from 1."""
        pts = tuple(sorted((to_fraction(x), to_fraction(y)) for x, y in points))
        if len(pts) < 2:
            raise ValidationError("a tabulated scaling function needs at least two points")
        if pts[0][0] != 1:
            raise ValidationError("the table must start at x = 1")
        for (x0, _), (x1, _) in zip(pts, pts[1:]):
            if x0 == x1:
                raise ValidationError(f"duplicate table abscissa {x0}")
        tx = [float(x) for x, _ in pts]
        ty = [float(y) for _, y in pts]

        def fn(x):
            if x < tx[0] or x > tx[-1]:
                raise ValidationError(f"f({x}) requested outside tabulated range [{tx[0]}, {tx[-1]}]")
            return float(np.interp(x, tx, ty))

        def mp_fn(x):
            x = mpmath.mpf(x)
            for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
                if x0 <= x <= x1:
                    x0, y0, x1, y1 = (mpmath.mpf(x0.numerator) / x0.denominator,
                                      mpmath.mpf(y0.numerator) / y0.denominator,
                                      mpmath.mpf(x1.numerator) / x1.denominator,
                                      mpmath.mpf(y1.numerator) / y1.denominator)
                    return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            raise ValidationError(f"f({x}) requested outside tabulated range")

        return cls("tabulated", description or f"table[{len(pts)} points]", fn, mp_fn, pts)

    @classmethod
    def load_table(cls, path) -> "ScalingFunction":
        """Read ``x f(x)`` pairs (whitespace or comma separated, ``#`` comments)."""
        points = []
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise ParseError("expected two columns", f"{path}:{lineno}")
            try:
                points.append((to_fraction(parts[0]), to_fraction(parts[1])))
            except (ValueError, ZeroDivisionError) as exc:
                raise ParseError(str(exc), f"{path}:{lineno}") from None
        return cls.from_table(points, f"table:{path}")


def _interp_table(xs, tx, ty):
    if np.any(xs < tx[0]) or np.any(xs > tx[-1]):
        raise ValidationError(f"f requested outside tabulated range [{tx[0]}, {tx[-1]}]")
    return np.interp(xs, tx, ty)


@lru_cache(maxsize=64)
def _f_table(f: ScalingFunction, n: int) -> np.ndarray:
    out = np.full(n + 1, np.nan)
    if n >= 1:
        out[1:] = f.array(np.arange(1, n + 1))
    out.setflags(write=False)
    return out


LOG2P1 = ScalingFunction("default-log", "log2(x+1)", _log2p1, _log2p1_mp)


def resolve_scaling(spec: str | ScalingFunction | None) -> ScalingFunction:
    """``None``/``"log2p1"`` -> default; ``"table:FILE"`` -> tabulated."""
    if spec is None or isinstance(spec, ScalingFunction):
        return spec or LOG2P1
    if spec == "log2p1":
        return LOG2P1
    if spec.startswith("table:"):
        return ScalingFunction.load_table(spec[len("table:"):])
    raise ValidationError(f"unknown scaling function {spec!r} (use log2p1 or table:FILE)")


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    status: str  # "pass" | "fail" | "inconclusive"
    detail: str = ""
    heuristic: bool = False


@dataclass(frozen=True)
class ValidationReport:
    function: str
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    @property
    def failed(self) -> tuple:
        return tuple(c.name for c in self.checks if c.status == "fail")

    def __getitem__(self, name) -> PropertyCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {
            "function": self.function,
            "passed": self.passed,
            "checks": [
                {"name": c.name, "status": c.status, "detail": c.detail,
                 **({"note": "asymptotic - heuristic only"} if c.heuristic else {})}
                for c in self.checks
            ],
        }


def _pairs(n):
    if n <= 128:
        return [(i, j) for i in range(n) for j in range(i, n)]
    strides = [1 << k for k in range(n.bit_length())]
    return [(i, i + s) for s in [0] + strides for i in range(n - s)]


def validate_scaling(f: ScalingFunction, grid: Sequence, q_list: Sequence = (0.4, 0.75),
                     tail_start: float = 16.0, tol: float = 1e-12) -> ValidationReport:
    """Check (f1), (f2), (f4), (f5) on ``grid``; (f3) as a slope heuristic.

    (f3) compares f(x)/x**q along grid points >= ``tail_start`` and is reported
    "inconclusive" when fewer than two such points exist.
    """
    xs = [float(x) for x in grid]
    if len(xs) < 3:
        raise ValidationError("grid needs at least 3 points (concavity is untestable otherwise)")
    if any(x < 1 for x in xs):
        raise ValidationError("grid points must be >= 1")
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValidationError("grid must be strictly increasing")
    fx = [f(x) for x in xs]
    checks = []

    f1 = f(1.0)
    bad = next((x for x, y in zip(xs, fx) if x > 1 and not y < x), None)
    if abs(f1 - 1.0) > tol:
        checks.append(PropertyCheck("f1", "fail", f"f(1) = {f1!r} != 1"))
    elif bad is not None:
        checks.append(PropertyCheck("f1", "fail", f"f(x) >= x at x = {bad:g}"))
    else:
        checks.append(PropertyCheck("f1", "pass"))

    bad = next(((a, b) for a, b, ya, yb in zip(xs, xs[1:], fx, fx[1:]) if not yb > ya), None)
    if bad:
        checks.append(PropertyCheck("f2", "fail", f"not strictly increasing between {bad[0]:g} and {bad[1]:g}"))
    else:
        checks.append(PropertyCheck("f2", "pass"))

    status, detail = "inconclusive", "fewer than two grid points in the tail"
    tail = [(x, y) for x, y in zip(xs, fx) if x >= tail_start]
    if len(tail) >= 2:
        status, detail = "pass", ""
        for q in q_list:
            r = [y / x**q for x, y in tail]
            hit = next((k for k in range(len(r) - 1) if r[k + 1] > r[k] * (1 + tol)), None)
            if hit is not None:
                status = "fail"
                detail = f"f(x)/x^{q:g} increases between {tail[hit][0]:g} and {tail[hit + 1][0]:g}"
                break
    checks.append(PropertyCheck("f3", status, detail, heuristic=True))

    def g(x):
        return x / f(x)

    bad = None
    for i, j in _pairs(len(xs)):
        if i == j:
            continue
        a, b = xs[i], xs[j]
        lhs, rhs = g((a + b) / 2), (g(a) + g(b)) / 2
        if lhs < rhs - tol * max(1.0, abs(rhs)):
            bad = (a, b)
            break
    if bad:
        checks.append(PropertyCheck("f4", "fail", f"x/f(x) not midpoint concave on [{bad[0]:g}, {bad[1]:g}]"))
    else:
        checks.append(PropertyCheck("f4", "pass"))

    bad = None
    for i, j in _pairs(len(xs)):
        a, b = xs[i], xs[j]
        if a * b > f.domain_max:
            continue
        lhs, rhs = fx[i] * fx[j], f(a * b)
        if lhs < rhs - tol * max(1.0, abs(rhs)):
            bad = (a, b)
            break
    if bad:
        checks.append(PropertyCheck("f5", "fail", f"f(x)f(y) < f(xy) at x = {bad[0]:g}, y = {bad[1]:g}"))
    else:
        checks.append(PropertyCheck("f5", "pass"))

    order = {"f1": 0, "f2": 1, "f3": 2, "f4": 3, "f5": 4}
    return ValidationReport(f.description, tuple(sorted(checks, key=lambda c: order[c.name])))


# ---------------------------------------------------------------------------
# run-length vectors


@dataclass(frozen=True)
class RunVector:
    """Piecewise constant nonnegative vector: ((value, length), ...) with distinct neighbours."""

    runs: tuple = ()

    def __post_init__(self):
        clean = []
        for value, length in self.runs:
            if isinstance(length, bool) or int(length) != length or length < 1:
                raise ValidationError(f"run length {length!r} is not an integer >= 1")
            if not value > 0:
                raise ValidationError(f"run value {value!r} is not positive")
            if clean and clean[-1][0] == value:
                raise ValidationError("adjacent runs must have distinct values (use RunVector.merged)")
            clean.append((value, int(length)))
        object.__setattr__(self, "runs", tuple(clean))

    @classmethod
    def merged(cls, pairs: Iterable) -> "RunVector":
        out = []
        for value, length in pairs:
            if length == 0:
                continue
            if out and out[-1][0] == value:
                out[-1][1] += length
            else:
                out.append([value, length])
        return cls(tuple((v, n) for v, n in out))

    @classmethod
    def constant(cls, value, length: int) -> "RunVector":
        return cls(((value, length),))

    @property
    def total_length(self) -> int:
        return sum(n for _, n in self.runs)

    def __len__(self):
        return len(self.runs)

    def expand(self) -> tuple:
        return tuple(v for v, n in self.runs for _ in range(n))

    def scale(self, c) -> "RunVector":
        return RunVector(tuple((v * c, n) for v, n in self.runs))

    def as_float(self) -> "RunVector":
        return RunVector.merged((float(v), n) for v, n in self.runs)

    def to_finvector(self, start: int = 1) -> FinVector:
        return FinVector.dense(self.expand(), start=start)


# ---------------------------------------------------------------------------
# text / file formats


def parse_vector(text: str) -> FinVector:
    """Dense literal ``"1,1/2,0,2"`` (zeros dropped) or an sdvec-1 JSON document."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}") from None
        return vector_from_json(doc)
    if not stripped:
        return FinVector()
    values = []
    for k, term in enumerate(stripped.split(","), 1):
        term = term.strip()
        try:
            values.append(to_fraction(term))
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"malformed rational {term!r}", f"term {k}") from None
    return FinVector.dense(values)


def vector_from_json(doc) -> FinVector:
    if not isinstance(doc, dict) or doc.get("format") != SDVEC_FORMAT:
        raise ParseError(f'expected an object with "format": "{SDVEC_FORMAT}"', "$.format")
    entries = doc.get("entries")
    if not isinstance(entries, list):
        raise ParseError("entries must be a list", "$.entries")
    out = []
    last = 0
    for k, item in enumerate(entries):
        where = f"$.entries[{k}]"
        if not isinstance(item, list) or len(item) != 2:
            raise ParseError("entry must be [position, value]", where)
        pos, val = item
        if isinstance(pos, bool) or not isinstance(pos, int) or pos < 1:
            raise ParseError(f"position {pos!r} is not an integer >= 1", where)
        if pos == last:
            raise ParseError(f"duplicate position {pos}", where)
        if pos < last:
            raise ParseError(f"positions not increasing ({last} then {pos})", where)
        if isinstance(val, bool) or not isinstance(val, (int, float, str)):
            raise ParseError(f"value {val!r} is not a number or rational string", where)
        try:
            q = to_fraction(val)
        except (ValueError, ZeroDivisionError, TypeError):
            raise ParseError(f"malformed rational {val!r}", where) from None
        if q == 0:
            raise ParseError("zero values are not stored in sparse files", where)
        out.append((pos, q))
        last = pos
    return FinVector(tuple(out))


def load_vector(source) -> FinVector:
    """Literal string, path to a JSON file, or an already decoded JSON object."""
    if isinstance(source, FinVector):
        return source
    if isinstance(source, dict):
        return vector_from_json(source)
    if isinstance(source, Path) or (isinstance(source, str) and source.endswith(".json")):
        return parse_vector(Path(source).read_text())
    return parse_vector(source)


def emit_vector(v: FinVector, style: str = "auto") -> str:
    """Inverse of :func:`parse_vector`. ``style`` is "dense", "json" or "auto"."""
    if style == "auto":
        style = "dense" if not v.entries or v.entries[-1][0] <= 4 * len(v.entries) + 16 else "json"
    if style == "dense":
        return ",".join(format_fraction(q) for q in v.to_dense())
    if style == "json":
        return json.dumps({"format": SDVEC_FORMAT,
                           "entries": [[p, format_fraction(q)] for p, q in v.entries]})
    raise ValueError(f"unknown style {style!r}")


def parse_runs(text: str) -> RunVector:
    """``"0.5x8,0.25x64"`` -> RunVector; equal neighbouring values are merged."""
    pairs = []
    for k, term in enumerate(text.strip().split(","), 1):
        term = term.strip()
        value, sep, length = term.rpartition("x")
        if not sep:
            raise ParseError(f"run {term!r} is not VALUExLENGTH", f"term {k}")
        try:
            q = to_fraction(value)
            n = int(length)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"malformed run {term!r}", f"term {k}") from None
        if q <= 0 or n < 1:
            raise ParseError(f"run {term!r} needs a positive value and length >= 1", f"term {k}")
        pairs.append((q, n))
    return RunVector.merged(pairs)


def emit_runs(rv: RunVector) -> str:
    def fmt(v):
        return format_fraction(v) if isinstance(v, Fraction) else repr(float(v))

    return ",".join(f"{fmt(v)}x{n}" for v, n in rv.runs)
