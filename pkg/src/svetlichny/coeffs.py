"""Mermin and Svetlichny coefficient tables.

``M_m = sum_x F_m(x) A_1^{x_1} ... A_m^{x_m}`` and likewise ``S_m`` with
coefficients ``mu_m(x)``. Tables are built with integer numerator arrays over
an implicit power-of-two denominator and only converted to
:class:`~svetlichny.core.ExactScalar` at the end, so nothing is ever rounded.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .core import CorrelationTable, ExactScalar, TableShapeError, check_party_count, popcounts

MERMIN = "mermin"
SVETLICHNY = "svetlichny"


def q_of(m: int) -> int:
    return (m + 1) // 2


@dataclass(frozen=True)
class CoefficientTable:
    m: int
    kind: str
    values: tuple[ExactScalar, ...]

    @property
    def q(self) -> int:
        return q_of(self.m)

    def __getitem__(self, x: int) -> ExactScalar:
        return self.values[x]

    def __eq__(self, other):
        if not isinstance(other, CoefficientTable):
            return NotImplemented
        return self.m == other.m and self.kind == other.kind and self.values == other.values

    def __hash__(self):
        return hash((self.m, self.kind, self.values))

    @property
    def exponent(self) -> int:
        """Smallest shared exponent of all entries."""
        return max(v.exponent for v in self.values)

    def numerators(self, exponent: int | None = None) -> np.ndarray:
        """Integer numerators over ``2**exponent`` (default: the shared one)."""
        e = self.exponent if exponent is None else exponent
        if e < self.exponent:
            raise ValueError(f"exponent {e} too small for table (needs {self.exponent})")
        return np.array([v.numerator << (e - v.exponent) for v in self.values], dtype=np.int64)

    def signs(self) -> np.ndarray:
        return np.array([v.sign for v in self.values], dtype=np.int64)

    def sign_word(self) -> int:
        """Bit x set iff the coefficient at x is negative."""
        return sum(1 << x for x, v in enumerate(self.values) if v.sign < 0)

    def support_word(self) -> int:
        return sum(1 << x for x, v in enumerate(self.values) if v.sign != 0)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "q": self.q,
            "values": [[x, v.numerator, v.exponent] for x, v in enumerate(self.values)],
        }


def _table(m, kind, numerators, exponent) -> CoefficientTable:
    return CoefficientTable(m, kind, tuple(ExactScalar(int(n), exponent) for n in numerators))


def _complement(m: int) -> np.ndarray:
    """Index permutation x -> x-bar (all m bits flipped)."""
    return np.arange(1 << m)[::-1]


# F_2 numerators over 2**1, indexed by x = x1 + 2*x2
_F2 = np.array([1, 1, 1, -1], dtype=np.int64)


def _mermin_single(m: int) -> np.ndarray:
    """F_m numerators over ``2**(m-1)`` via F_m(x, x_m) = [F(x) + (-1)^{x_m} F(x-bar)] / 2."""
    f = _F2
    for k in range(3, m + 1):
        fbar = f[_complement(k - 1)]
        f = np.concatenate([f + fbar, f - fbar])
    return f


def _mermin_double(m: int) -> np.ndarray:
    """Same table, two parties at a time, finishing with one single step for odd m.

    F_{k+2}(x, y) = [F_k(x)(F_2(y) + F_2(y-bar)) + F_k(x-bar)(F_2(y) - F_2(y-bar))] / 2
    """
    f = _F2
    k = 2
    f2bar = _F2[_complement(2)]
    plus, minus = _F2 + f2bar, _F2 - f2bar
    while k + 2 <= m:
        fbar = f[_complement(k)]
        # new index = x + 2**k * y, so y varies along the slow axis
        f = (np.outer(plus, f) + np.outer(minus, fbar)).reshape(-1)
        k += 2
    if k < m:
        fbar = f[_complement(k)]
        f = np.concatenate([f + fbar, f - fbar])
    return f


@lru_cache(maxsize=None)
def mermin_coeffs(m: int, method: str = "single") -> CoefficientTable:
    """Mermin coefficients F_m built from F_2 by recursion.

    ``method`` is ``"single"`` (one party per step) or ``"double"`` (two per step).
    """
    m = check_party_count(m, 2)
    if method == "single":
        nums = _mermin_single(m)
    elif method == "double":
        nums = _mermin_double(m)
    else:
        raise ValueError(f"unknown recursion method {method!r}")
    return _table(m, MERMIN, nums, m - 1)


def svetlichny_sign_word_bits(m: int) -> np.ndarray:
    """Exponent g(x) mod 2 of the closed form, for every x word."""
    q = q_of(m)
    w = popcounts(m)
    # sum_{i<j} x_i x_j counts pairs of set bits
    g = w * (w - 1) // 2 + (q + 1) * w + (q * q - q) // 2
    return g & 1


@lru_cache(maxsize=None)
def svetlichny_coeffs(m: int, method: str = "closed") -> CoefficientTable:
    """Svetlichny coefficients mu_m, either in closed form or from the Mermin table."""
    m = check_party_count(m, 2)
    if method == "closed":
        nums = 1 - 2 * svetlichny_sign_word_bits(m)
        return _table(m, SVETLICHNY, nums, q_of(m))
    if method == "recursive":
        f = mermin_coeffs(m).numerators(m - 1)
        if m % 2 == 0:
            return _table(m, SVETLICHNY, f, m - 1)
        return _table(m, SVETLICHNY, f + f[_complement(m)], m)
    raise ValueError(f"unknown construction method {method!r}")


def coefficient_table(m: int, kind: str = SVETLICHNY, method: str | None = None) -> CoefficientTable:
    if kind in ("svet", SVETLICHNY):
        return svetlichny_coeffs(m, method or "closed")
    if kind == MERMIN:
        return mermin_coeffs(m, method or "single")
    raise ValueError(f"unknown coefficient kind {kind!r}")


def evaluate(table: CorrelationTable, coeffs: CoefficientTable):
    """<S> = sum_{x,a} coeff(x) (-1)^{parity(a)} P(a|x).

    Returns a :class:`~fractions.Fraction` for exact tables, a float otherwise.
    """
    if table.m != coeffs.m:
        raise TableShapeError(f"table has m={table.m}, coefficients have m={coeffs.m}")
    sign_a = 1 - 2 * (popcounts(table.m) & 1)
    if table.is_exact:
        per_x = table.values @ sign_a
        nums = coeffs.numerators()
        total = sum(int(c) * int(r) for c, r in zip(nums, per_x))
        return Fraction(total, 1 << (coeffs.exponent + table.exponent))
    per_x = table.values @ sign_a
    return float(np.dot([float(v) for v in coeffs.values], per_x))


@dataclass(frozen=True)
class TheoryBounds:
    m: int
    lhv_separable: float
    quantum: float
    algebraic: float

    @property
    def lhv_separable_exact(self) -> Fraction:
        return Fraction(2) ** (self.m - q_of(self.m) - 1)

    @property
    def algebraic_exact(self) -> Fraction:
        return Fraction(2) ** (self.m - q_of(self.m))


def theory_bounds(m: int) -> TheoryBounds:
    """Known bounds on <S_m>: lhv/separable, quantum (GHZ) and algebraic."""
    m = check_party_count(m, 2)
    e = m - q_of(m)
    return TheoryBounds(m, math.ldexp(1.0, e - 1), 2.0 ** (e - 0.5), math.ldexp(1.0, e))
