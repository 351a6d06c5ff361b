"""Bit vectors, exact dyadic scalars and conditional correlation tables.

Party ``i`` (1-based) lives at bit ``i - 1`` of every input/outcome word, so a
table over ``m`` parties is a dense ``(2**m, 2**m)`` array indexed ``[x, a]``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import total_ordering
from fractions import Fraction

import numpy as np

MAX_PARTIES = 12
DEFAULT_TOL = 1e-12


class TableShapeError(ValueError):
    """Structural problem with a table: wrong entry count or party count."""


class TableInvariantError(ValueError):
    """A table violates positivity or normalisation."""


def check_party_count(m: int, lo: int = 1, hi: int = MAX_PARTIES) -> int:
    if not isinstance(m, (int, np.integer)) or not lo <= m <= hi:
        raise ValueError(f"party count must be an integer in [{lo}, {hi}], got {m!r}")
    return int(m)


def parity(word: int) -> int:
    """Sum of the bits of ``word`` mod 2."""
    return int(word).bit_count() & 1


def popcounts(m: int) -> np.ndarray:
    """Hamming weight of every ``m``-bit word, indexed by word."""
    return np.bitwise_count(np.arange(1 << m, dtype=np.uint64)).astype(np.int64)


def word_bits(m: int) -> np.ndarray:
    """``(2**m, m)`` 0/1 matrix; row ``w`` column ``i`` is bit ``i`` of ``w``."""
    words = np.arange(1 << m, dtype=np.int64)
    return (words[:, None] >> np.arange(m)) & 1


@dataclass(frozen=True)
class BitVector:
    m: int
    bits: int

    def __post_init__(self):
        check_party_count(self.m)
        if not 0 <= self.bits < (1 << self.m):
            raise ValueError(f"word {self.bits} does not fit in {self.m} bits")

    @classmethod
    def from_tuple(cls, values):
        values = tuple(int(v) for v in values)
        if any(v not in (0, 1) for v in values):
            raise ValueError("bit vector entries must be 0 or 1")
        return cls(len(values), sum(v << i for i, v in enumerate(values)))

    def __getitem__(self, party: int) -> int:
        """Bit of 1-based ``party``."""
        if not 1 <= party <= self.m:
            raise IndexError(party)
        return (self.bits >> (party - 1)) & 1

    def as_tuple(self) -> tuple[int, ...]:
        return tuple((self.bits >> i) & 1 for i in range(self.m))

    def flipped(self):
        return type(self)(self.m, self.bits ^ ((1 << self.m) - 1))

    @property
    def parity(self) -> int:
        return parity(self.bits)


class InputVector(BitVector):
    pass


class OutcomeVector(BitVector):
    def signs(self) -> tuple[int, ...]:
        """Signed outcomes ``A_i = (-1)**a_i``."""
        return tuple(1 - 2 * b for b in self.as_tuple())

    @classmethod
    def from_signs(cls, signs):
        if any(s not in (1, -1) for s in signs):
            raise ValueError("signed outcomes must be +1 or -1")
        return cls.from_tuple((1 - s) // 2 for s in signs)


@total_ordering
@dataclass(frozen=True)
class ExactScalar:
    """The dyadic rational ``numerator / 2**exponent`` in canonical form."""

    numerator: int
    exponent: int = 0

    def __post_init__(self):
        n, e = int(self.numerator), int(self.exponent)
        if e < 0:
            n, e = n << -e, 0
        if n == 0:
            e = 0
        else:
            shift = min((n & -n).bit_length() - 1, e)
            n, e = n >> shift, e - shift
        object.__setattr__(self, "numerator", n)
        object.__setattr__(self, "exponent", e)

    @classmethod
    def from_fraction(cls, value) -> ExactScalar:
        value = Fraction(value)
        den = value.denominator
        if den & (den - 1):
            raise ValueError(f"{value} is not a dyadic rational")
        return cls(value.numerator, den.bit_length() - 1)

    def __add__(self, other):
        if not isinstance(other, ExactScalar):
            return NotImplemented
        e = max(self.exponent, other.exponent)
        return ExactScalar(
            (self.numerator << (e - self.exponent)) + (other.numerator << (e - other.exponent)), e
        )

    def __sub__(self, other):
        if not isinstance(other, ExactScalar):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return ExactScalar(-self.numerator, self.exponent)

    def __mul__(self, other):
        if isinstance(other, int):
            return ExactScalar(self.numerator * other, self.exponent)
        if isinstance(other, ExactScalar):
            return ExactScalar(self.numerator * other.numerator, self.exponent + other.exponent)
        return NotImplemented

    __rmul__ = __mul__

    def __lt__(self, other):
        if not isinstance(other, ExactScalar):
            return NotImplemented
        return self.to_fraction() < other.to_fraction()

    def half(self) -> ExactScalar:
        return ExactScalar(self.numerator, self.exponent + 1)

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    def __float__(self):
        return math.ldexp(self.numerator, -self.exponent)

    def __abs__(self):
        return ExactScalar(abs(self.numerator), self.exponent)

    @property
    def sign(self) -> int:
        return (self.numerator > 0) - (self.numerator < 0)

    def __str__(self):
        return str(self.to_fraction())


@dataclass(frozen=True)
class Violation:
    """First failing entry of :func:`validate_table`."""

    condition: str  # "positivity" | "normalisation"
    x: int
    a: int | None
    value: float

    def to_dict(self):
        return {"condition": self.condition, "x": self.x, "a": self.a, "value": self.value}


@dataclass(frozen=True, eq=False)
class CorrelationTable:
    """Conditional distribution ``P(a|x)`` stored densely as ``values[x, a]``.

    Exact tables hold integer numerators over the shared denominator
    ``2**exponent``; floating tables hold probabilities and ``exponent`` is None.
    Use :meth:`exact` / :meth:`floating` to build validated tables.
    """

    m: int
    values: np.ndarray
    exponent: int | None = None

    def __post_init__(self):
        check_party_count(self.m)
        n = 1 << self.m
        if self.values.shape != (n, n):
            raise TableShapeError(
                f"table for m={self.m} needs {n * n} entries in shape ({n}, {n}), "
                f"got shape {self.values.shape}"
            )
        self.values.setflags(write=False)

    @classmethod
    def exact(cls, m: int, numerators, exponent: int, validate: bool = True) -> CorrelationTable:
        arr = np.array(numerators, dtype=np.int64)
        if exponent < 0:
            raise ValueError("exponent must be non-negative")
        # reduce to the smallest shared exponent
        while exponent > 0 and not np.any(arr & 1):
            arr >>= 1
            exponent -= 1
        table = cls(m, arr, int(exponent))
        if validate:
            table.require_valid()
        return table

    @classmethod
    def floating(cls, m: int, probs, validate: bool = True, tol: float = DEFAULT_TOL) -> CorrelationTable:
        table = cls(m, np.array(probs, dtype=np.float64), None)
        if validate:
            table.require_valid(tol)
        return table

    @property
    def is_exact(self) -> bool:
        return self.exponent is not None

    def prob(self, x: int, a: int):
        v = self.values[x, a]
        if self.is_exact:
            return Fraction(int(v), 1 << self.exponent)
        return float(v)

    def as_float(self) -> np.ndarray:
        if self.is_exact:
            return np.ldexp(self.values.astype(np.float64), -self.exponent)
        return self.values

    def require_valid(self, tol: float = DEFAULT_TOL):
        bad = validate_table(self, tol)
        if bad is not None:
            raise TableInvariantError(
                f"{bad.condition} violated at x={bad.x}, a={bad.a} (value {bad.value!r})"
            )

    def equals(self, other: CorrelationTable) -> bool:
        """Exact equality for exact tables, elementwise identity otherwise."""
        if self.m != other.m or self.is_exact != other.is_exact:
            return False
        if self.is_exact:
            e = max(self.exponent, other.exponent)
            return bool(
                np.array_equal(self.values << (e - self.exponent), other.values << (e - other.exponent))
            )
        return bool(np.array_equal(self.values, other.values))

    def to_json(self) -> dict:
        n = 1 << self.m
        if self.is_exact:
            entries = []
            for x in range(n):
                for a in range(n):
                    s = ExactScalar(int(self.values[x, a]), self.exponent)
                    entries.append([x, a, s.numerator, s.exponent])
        else:
            entries = [
                [x, a, float(format(self.values[x, a], ".17g"))] for x in range(n) for a in range(n)
            ]
        return {"m": self.m, "entries": entries}

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, doc: dict, validate: bool = True, tol: float = DEFAULT_TOL) -> CorrelationTable:
        m = check_party_count(doc["m"])
        n = 1 << m
        entries = doc["entries"]
        if len(entries) != n * n:
            raise TableShapeError(f"table for m={m} needs {n * n} entries, got {len(entries)}")
        widths = {len(e) for e in entries}
        if widths == {4}:
            exp = max(int(e[3]) for e in entries)
            arr = np.zeros((n, n), dtype=np.int64)
            seen = np.zeros((n, n), dtype=bool)
            for x, a, num, e in entries:
                arr[x, a] = int(num) << (exp - int(e))
                seen[x, a] = True
            if not seen.all():
                raise TableShapeError("duplicate (x, a) entries in table")
            return cls.exact(m, arr, exp, validate=validate)
        if widths == {3}:
            arr = np.full((n, n), np.nan)
            for x, a, p in entries:
                arr[x, a] = float(p)
            if np.isnan(arr).any():
                raise TableShapeError("duplicate (x, a) entries in table")
            return cls.floating(m, arr, validate=validate, tol=tol)
        raise TableShapeError("entries must all be [x, a, num, exp] or all be [x, a, p]")


def validate_table(table: CorrelationTable, tol: float = DEFAULT_TOL) -> Violation | None:
    """Check positivity and normalisation; return the first violation or None.

    Scans x ascending; within each x, positivity over a ascending comes before
    the column sum. Exact tables are checked exactly and ignore ``tol``.
    """
    n = 1 << table.m
    if table.values.shape != (n, n):
        raise TableShapeError(f"expected shape ({n}, {n}), got {table.values.shape}")
    vals = table.values
    exact = table.is_exact
    for x in range(n):
        row = vals[x]
        neg = np.nonzero(row < 0 if exact else row < -tol)[0]
        if neg.size:
            a = int(neg[0])
            return Violation("positivity", x, a, float(table.prob(x, a)))
        if exact:
            if int(row.sum()) != 1 << table.exponent:
                return Violation("normalisation", x, None, float(Fraction(int(row.sum()), 1 << table.exponent)))
        else:
            total = math.fsum(row)
            if not abs(total - 1.0) <= tol:
                return Violation("normalisation", x, None, total)
    return None


def uniform_table(m: int) -> CorrelationTable:
    n = 1 << m
    return CorrelationTable.exact(m, np.ones((n, n), dtype=np.int64), m)


def delta_table(m: int, outputs) -> CorrelationTable:
    """Deterministic table putting all weight on ``outputs[x]`` for every x."""
    n = 1 << m
    outputs = np.asarray(outputs, dtype=np.int64)
    if outputs.shape != (n,):
        raise TableShapeError(f"need one outcome word per input word ({n}), got {outputs.shape}")
    arr = np.zeros((n, n), dtype=np.int64)
    arr[np.arange(n), outputs] = 1
    return CorrelationTable.exact(m, arr, 0)
