"""Deterministic strategies on a communication graph and maximisation of <S_m>.

On a deterministic strategy the functional only sees the global parity
``c(x) = sum_i a_i(x) mod 2``. Party ``i`` can contribute any Boolean function
of ``Dep(i)``, i.e. any GF(2) combination of monomials ``prod_{t in T} x_t``
with ``T`` a subset of ``Dep(i)``. So the achievable parities form a linear
code and maximising ``sum_x mu(x) (-1)^c(x)`` is a nearest-codeword search
against the sign pattern of ``mu``.
"""
from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .coeffs import CoefficientTable, q_of
from .core import CorrelationTable, TableShapeError, delta_table, popcounts
from .graphs import TP, CommGraph, GraphError, classify, dependency_sets

DIM_CAP = int(os.environ.get("SVETLICHNY_DIM_CAP", 24))
BRUTE_CAP = int(os.environ.get("SVETLICHNY_BRUTE_CAP", 1 << 24))


class CapacityError(RuntimeError):
    pass


class PairingError(GraphError):
    """A totally paired graph was required but the graph is partially paired."""

    def __init__(self, witness):
        super().__init__(f"graph is partially paired: parties {witness[0]} and {witness[1]} are unpaired")
        self.witness = witness


def _restriction_index(m: int, dep) -> np.ndarray:
    """For every x word, its restriction to ``dep`` packed as ``sum_t x_{dep[t]} << t``."""
    x = np.arange(1 << m, dtype=np.int64)
    r = np.zeros_like(x)
    for t, j in enumerate(dep):
        r |= ((x >> (j - 1)) & 1) << t
    return r


@dataclass(frozen=True)
class DeterministicStrategy:
    """Per-party truth tables; ``tables[i-1]`` bit ``r`` is ``a_i`` on restricted input ``r``."""

    m: int
    deps: tuple[tuple[int, ...], ...]
    tables: tuple[int, ...]

    def __post_init__(self):
        if len(self.deps) != self.m or len(self.tables) != self.m:
            raise ValueError("need one dependency set and one truth table per party")
        deps = []
        for i, d in enumerate(self.deps, start=1):
            d = tuple(sorted(set(d) | {i}))
            if any(not 1 <= j <= self.m for j in d):
                raise ValueError(f"dependency of party {i} out of range: {d}")
            deps.append(d)
        object.__setattr__(self, "deps", tuple(deps))
        for i, (d, t) in enumerate(zip(self.deps, self.tables), start=1):
            if not 0 <= t < 1 << (1 << len(d)):
                raise ValueError(f"truth table of party {i} has too many bits for {len(d)} inputs")

    @property
    def graph(self) -> CommGraph:
        return CommGraph.from_deps(self.m, {i + 1: d for i, d in enumerate(self.deps)})

    @classmethod
    def from_functions(cls, m: int, deps, funcs) -> DeterministicStrategy:
        """``funcs[i]`` maps a dict ``{party: bit}`` over ``deps[i]`` to the output bit."""
        deps = [tuple(sorted(set(d) | {i + 1})) for i, d in enumerate(deps)]
        tables = []
        for d, f in zip(deps, funcs):
            t = 0
            for r in range(1 << len(d)):
                if f({j: (r >> k) & 1 for k, j in enumerate(d)}) & 1:
                    t |= 1 << r
            tables.append(t)
        return cls(m, tuple(deps), tuple(tables))

    def party_words(self) -> np.ndarray:
        """``(m, 2**m)`` array of each party's output bit for every x."""
        out = np.empty((self.m, 1 << self.m), dtype=np.int64)
        for i, (d, t) in enumerate(zip(self.deps, self.tables)):
            r = _restriction_index(self.m, d)
            out[i] = np.array([(t >> int(v)) & 1 for v in r], dtype=np.int64)
        return out

    def output_words(self) -> np.ndarray:
        """Outcome word a(x) for every input word x."""
        bits = self.party_words()
        return (bits << np.arange(self.m)[:, None]).sum(axis=0)

    def output(self, x: int) -> int:
        return int(self.output_words()[x])

    def parity_function(self) -> ParityFunction:
        par = self.party_words().sum(axis=0) & 1
        return ParityFunction(self.m, sum(1 << x for x, b in enumerate(par) if b))

    def flipped(self, party: int) -> DeterministicStrategy:
        """Negate the output of one party everywhere."""
        tables = list(self.tables)
        tables[party - 1] ^= (1 << (1 << len(self.deps[party - 1]))) - 1
        return DeterministicStrategy(self.m, self.deps, tuple(tables))

    def shifted(self, b: int) -> DeterministicStrategy:
        """XOR the constant outcome word ``b`` into every output."""
        s = self
        for i in range(self.m):
            if b >> i & 1:
                s = s.flipped(i + 1)
        return s

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "tables": {
                str(i + 1): {"dep": list(d), "bits": format(t, "x")}
                for i, (d, t) in enumerate(zip(self.deps, self.tables))
            },
        }

    @classmethod
    def from_json(cls, doc: dict) -> DeterministicStrategy:
        m = int(doc["m"])
        tabs = doc["tables"]
        if sorted(int(k) for k in tabs) != list(range(1, m + 1)):
            raise ValueError("strategy file needs a table for every party 1..m")
        deps, tables = [], []
        for i in range(1, m + 1):
            entry = tabs[str(i)]
            dep = [int(j) for j in entry["dep"]]
            if i not in dep:
                # table bits were written without the party's own input
                raise ValueError(f"party {i} dependency list must include {i}")
            if len(set(dep)) != len(dep) or dep != sorted(dep):
                raise ValueError(f"party {i} dependency list must be strictly increasing")
            deps.append(tuple(dep))
            tables.append(int(str(entry["bits"]), 16))
        return cls(m, tuple(deps), tuple(tables))

    @classmethod
    def load(cls, path) -> DeterministicStrategy:
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True)
class ParityFunction:
    m: int
    word: int

    def __call__(self, x: int) -> int:
        return (self.word >> x) & 1

    def hex(self) -> str:
        return format(self.word, "x")


@dataclass(frozen=True)
class ParitySubspace:
    m: int
    basis: tuple[frozenset, ...]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def words(self) -> list[int]:
        return [monomial_word(self.m, t) for t in self.basis]


def monomial_word(m: int, t) -> int:
    """Truth table of ``prod_{j in t} x_j`` as a ``2**m``-bit word."""
    mask = sum(1 << (j - 1) for j in t)
    return sum(1 << x for x in range(1 << m) if x & mask == mask)


def parity_basis(g: CommGraph) -> ParitySubspace:
    deps = dependency_sets(g)
    found = set()
    for d in deps.values():
        for k in range(len(d) + 1):
            found.update(frozenset(c) for c in itertools.combinations(sorted(d), k))
    return ParitySubspace(g.m, tuple(sorted(found, key=lambda t: (len(t), sorted(t)))))


# ---------------------------------------------------------------------------
# words of 2**m bits as rows of uint64 limbs, least significant limb first


def _n_limbs(m: int) -> int:
    return max(1, (1 << m) // 64)


def _to_limbs(word: int, n: int) -> np.ndarray:
    return np.array([(word >> (64 * k)) & 0xFFFFFFFFFFFFFFFF for k in range(n)], dtype=np.uint64)


def _from_limbs(limbs) -> int:
    return sum(int(v) << (64 * k) for k, v in enumerate(limbs))


def _span(vectors: np.ndarray) -> np.ndarray:
    words = np.zeros((1, vectors.shape[1]), dtype=np.uint64)
    for v in vectors:
        words = np.concatenate([words, words ^ v])
    return words


def _lex_min(rows: np.ndarray) -> np.ndarray:
    """Row with the smallest integer value (most significant limb decides first)."""
    order = np.lexsort([rows[:, k] for k in range(rows.shape[1])])
    return rows[order[0]]


def nearest_codeword(generators: list[int], target: int, support: int, m: int) -> tuple[int, int]:
    """Minimum masked Hamming distance from ``target`` to span(generators).

    Returns ``(distance, codeword)``; ties go to the numerically smallest codeword.
    Meet in the middle: both halves of the span are materialised, then every
    pair is XORed in chunks.
    """
    n = _n_limbs(m)
    gens = np.array([_to_limbs(w, n) for w in generators], dtype=np.uint64).reshape(-1, n)
    tgt, sup = _to_limbs(target, n), _to_limbs(support, n)
    h = len(gens) // 2
    left, right = _span(gens[:h]), _span(gens[h:])
    chunk = max(1, (1 << 20) // (len(right) * n))
    best_d, best_c = None, None
    for s in range(0, len(left), chunk):
        block = left[s : s + chunk, None, :] ^ right[None, :, :]
        dist = np.bitwise_count((block ^ tgt) & sup).sum(axis=-1, dtype=np.int64)
        d = int(dist.min())
        if best_d is not None and d > best_d:
            continue
        cand = _lex_min(block[dist == d])
        if best_d is None or d < best_d or _from_limbs(cand) < best_c:
            best_d, best_c = d, _from_limbs(cand)
    return best_d, best_c


def anf(word: int, m: int) -> list[int]:
    """Algebraic normal form: masks of the monomials whose XOR equals ``word``."""
    f = np.array([(word >> x) & 1 for x in range(1 << m)], dtype=np.uint8)
    for i in range(m):
        f = f.reshape(-1, 2, 1 << i)
        f[:, 1, :] ^= f[:, 0, :]
        f = f.reshape(-1)
    return [int(x) for x in np.nonzero(f)[0]]


def strategy_from_monomials(m: int, deps, assignment) -> DeterministicStrategy:
    """Party ``i`` outputs the XOR of the monomials (sets of parties) in ``assignment[i]``."""
    deps = {i: tuple(sorted(deps[i])) for i in range(1, m + 1)}
    tables = []
    for i in range(1, m + 1):
        d = deps[i]
        pos = {j: k for k, j in enumerate(d)}
        t = 0
        for mono in assignment.get(i, ()):
            if not set(mono) <= set(d):
                raise ValueError(f"monomial {sorted(mono)} not visible to party {i}")
            mask = sum(1 << pos[j] for j in mono)
            t ^= sum(1 << r for r in range(1 << len(d)) if r & mask == mask)
        tables.append(t)
    return DeterministicStrategy(m, tuple(deps[i] for i in range(1, m + 1)), tuple(tables))


def realise_parity(g: CommGraph, word: int) -> DeterministicStrategy:
    """A strategy on ``g`` whose global parity is ``word``.

    Each monomial goes to the lowest-index party that sees all of its inputs;
    the constant goes to party 1.
    """
    deps = dependency_sets(g)
    assignment = {}
    for mask in anf(word, g.m):
        mono = frozenset(j + 1 for j in range(g.m) if mask >> j & 1)
        owner = next((i for i in range(1, g.m + 1) if mono <= deps[i]), None)
        if owner is None:
            raise ValueError(f"parity word needs monomial {sorted(mono)}, which no party can see")
        assignment.setdefault(owner, []).append(mono)
    return strategy_from_monomials(g.m, deps, assignment)


def _uniform_magnitude(coeffs: CoefficientTable) -> int:
    mags = {abs(int(n)) for n in coeffs.numerators() if n}
    if len(mags) > 1:
        raise ValueError("parity-subspace maximisation needs coefficients of equal magnitude")
    return mags.pop() if mags else 0


@dataclass(frozen=True)
class MaxResult:
    value: Fraction
    best_parity: ParityFunction
    witness: DeterministicStrategy
    dimension: int


def max_over_graph(g: CommGraph, coeffs: CoefficientTable, cap: int = DIM_CAP) -> MaxResult:
    """Exact maximum of the functional over deterministic strategies on ``g``."""
    if g.m != coeffs.m:
        raise TableShapeError(f"graph has m={g.m}, coefficients have m={coeffs.m}")
    space = parity_basis(g)
    if space.dimension > cap:
        raise CapacityError(f"parity subspace has dimension {space.dimension}, above the cap of {cap}")
    mag = _uniform_magnitude(coeffs)
    support = coeffs.support_word()
    dist, word = nearest_codeword(space.words(), coeffs.sign_word(), support, g.m)
    value = Fraction(mag * (support.bit_count() - 2 * dist), 1 << coeffs.exponent)
    return MaxResult(value, ParityFunction(g.m, word), realise_parity(g, word), space.dimension)


def strategy_count(g: CommGraph) -> int:
    return 1 << sum(1 << len(d) for d in dependency_sets(g).values())


def brute_force_max(g: CommGraph, coeffs: CoefficientTable, cap: int = BRUTE_CAP) -> Fraction:
    """Maximum over every truth-table assignment on ``g``, by exhaustion.

    Party truth tables are enumerated literally. Partial strategies whose
    outputs so far have the same XOR are interchangeable for the functional,
    so they are merged before the next party is added.
    """
    if g.m != coeffs.m:
        raise TableShapeError(f"graph has m={g.m}, coefficients have m={coeffs.m}")
    total = strategy_count(g)
    if total > cap:
        raise CapacityError(f"{total} strategies exceed the enumeration cap of {cap}")
    m = g.m
    deps = dependency_sets(g)
    frontier = np.zeros(1, dtype=object if m > 6 else np.uint64)
    for i in range(1, m + 1):
        r = _restriction_index(m, sorted(deps[i]))
        n_tables = 1 << (1 << len(deps[i]))
        if m > 6:
            contrib = [sum(((t >> int(v)) & 1) << x for x, v in enumerate(r)) for t in range(n_tables)]
            frontier = np.array(sorted({int(f) ^ c for f in frontier for c in contrib}), dtype=object)
            continue
        tabs = np.arange(n_tables, dtype=np.uint64)
        bits = (tabs[:, None] >> r.astype(np.uint64)[None, :]) & np.uint64(1)
        contrib = (bits << np.arange(1 << m, dtype=np.uint64)[None, :]).sum(axis=1, dtype=np.uint64)
        frontier = np.unique((frontier[:, None] ^ contrib[None, :]).reshape(-1))
    nums = [int(n) for n in coeffs.numerators()]
    best = None
    for start in range(0, len(frontier), 4096):
        words = frontier[start : start + 4096]
        if m > 6:
            vals = [sum(n if not (int(w) >> x) & 1 else -n for x, n in enumerate(nums)) for w in words]
        else:
            bits = (words[:, None] >> np.arange(1 << m, dtype=np.uint64)[None, :]) & np.uint64(1)
            vals = ((1 - 2 * bits.astype(np.int64)) @ np.array(nums, dtype=np.int64)).tolist()
        top = max(vals)
        best = top if best is None else max(best, top)
    return Fraction(best, 1 << coeffs.exponent)


def tp_strategy(g: CommGraph) -> DeterministicStrategy:
    """Strategy on a totally paired graph reaching the algebraic maximum.

    Each pair monomial ``x_i x_j`` goes to its lowest-index covering party,
    ``(q+1) x_i`` to party ``i`` and the constant ``(q^2-q)/2`` to party 1.
    """
    cls = classify(g)
    if cls.kind != TP:
        raise PairingError(cls.witness)
    m, q = g.m, q_of(g.m)
    assignment: dict[int, list[frozenset]] = {}
    for (i, j), k in cls.cover.items():
        assignment.setdefault(k, []).append(frozenset((i, j)))
    if (q + 1) % 2:
        for i in range(1, m + 1):
            assignment.setdefault(i, []).append(frozenset((i,)))
    if (q * q - q) // 2 % 2:
        assignment.setdefault(1, []).append(frozenset())
    return strategy_from_monomials(m, dependency_sets(g), assignment)


def strategy_to_table(s: DeterministicStrategy) -> CorrelationTable:
    return delta_table(s.m, s.output_words())


def eval_strategy(s: DeterministicStrategy, coeffs: CoefficientTable) -> Fraction:
    """sum_x coeff(x) (-1)^{sum_i a_i(x)}, exactly."""
    if s.m != coeffs.m:
        raise TableShapeError(f"strategy has m={s.m}, coefficients have m={coeffs.m}")
    sign = 1 - 2 * (popcounts(s.m)[s.output_words()] & 1)
    total = sum(int(n) * int(v) for n, v in zip(coeffs.numerators(), sign))
    return Fraction(total, 1 << coeffs.exponent)


def random_strategy(g: CommGraph, rng) -> DeterministicStrategy:
    deps = dependency_sets(g)
    order = [tuple(sorted(deps[i])) for i in range(1, g.m + 1)]
    tables = tuple(
        sum(int(b) << k for k, b in enumerate(rng.integers(0, 2, size=1 << len(d)))) for d in order
    )
    return DeterministicStrategy(g.m, tuple(order), tables)
