"""No-signalling checks and uniform parity-preserving mixtures of strategies."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import DEFAULT_TOL, CorrelationTable, popcounts
from .strategies import DeterministicStrategy, strategy_to_table

NOSIGNAL_MAX_PARTIES = 8


@dataclass(frozen=True)
class SignallingReport:
    """Parties ``subset`` change the marginal of the others on outcome ``outcome``.

    ``outcome`` is the full outcome word with the subset's bits zeroed; inputs
    ``x_ref`` and ``x_other`` differ only on ``subset``.
    """

    subset: tuple[int, ...]
    outcome: int
    x_ref: int
    x_other: int
    marginal_ref: object
    marginal_other: object
    magnitude: float

    def to_json(self) -> dict:
        exact = isinstance(self.marginal_ref, Fraction)
        conv = str if exact else float
        return {
            "nosignalling": False,
            "subset": list(self.subset),
            "outcome": self.outcome,
            "x_ref": self.x_ref,
            "x_other": self.x_other,
            "marginal_ref": conv(self.marginal_ref),
            "marginal_other": conv(self.marginal_other),
            "magnitude": self.magnitude,
        }


def subsets_in_order(m: int):
    """Nonempty proper subsets of 1..m, by size then lexicographically."""
    for k in range(1, m):
        yield from itertools.combinations(range(1, m + 1), k)


def marginal(table: CorrelationTable, subset) -> np.ndarray:
    """Sum out the outcomes of ``subset``; result indexed ``[x, a]`` with subset bits of a zero.

    Entries for outcome words with a subset bit set are zero.
    """
    mask = sum(1 << (i - 1) for i in subset)
    n = 1 << table.m
    out = np.zeros_like(table.values)
    keep = np.arange(n) & ~mask
    np.add.at(out.T, keep, table.values.T)
    return out


def check_nosignalling(table: CorrelationTable, tol: float = DEFAULT_TOL) -> SignallingReport | None:
    """Return None if no subset of parties can signal to the rest, else the first violation.

    Exact tables are compared exactly. For each subset the marginal of the
    complement at every input is compared with the one obtained by setting the
    subset's inputs to zero.
    """
    m = table.m
    if m > NOSIGNAL_MAX_PARTIES:
        raise ValueError(f"no-signalling scan supports at most {NOSIGNAL_MAX_PARTIES} parties")
    n = 1 << m
    xs = np.arange(n)
    for subset in subsets_in_order(m):
        mask = sum(1 << (i - 1) for i in subset)
        marg = marginal(table, subset)
        ref = marg[xs & ~mask]
        diff = np.abs(marg - ref)
        bad = diff > 0 if table.is_exact else diff > tol
        if not bad.any():
            continue
        x, a = (int(v) for v in np.argwhere(bad)[0])
        x_ref = x & ~mask
        if table.is_exact:
            scale = 1 << table.exponent
            p_ref = Fraction(int(marg[x_ref, a]), scale)
            p_other = Fraction(int(marg[x, a]), scale)
        else:
            p_ref, p_other = float(marg[x_ref, a]), float(marg[x, a])
        return SignallingReport(subset, a, x_ref, x, p_ref, p_other, float(abs(p_other - p_ref)))
    return None


def parity_mixture(s: DeterministicStrategy) -> CorrelationTable:
    """Uniform mixture of ``s`` shifted by every even-weight outcome word.

    Closed form: weight ``2**-(m-1)`` on every outcome with the same parity as
    ``s``'s output at that input.
    """
    m = s.m
    par_a = popcounts(m) & 1
    par_x = par_a[s.output_words()]
    nums = (par_a[None, :] == par_x[:, None]).astype(np.int64)
    return CorrelationTable.exact(m, nums, m - 1)


def even_shifts(m: int) -> list[int]:
    return [b for b in range(1 << m) if not b.bit_count() & 1]


@dataclass(frozen=True)
class MixtureSpec:
    components: tuple

    def __post_init__(self):
        comps = tuple((w, s) for w, s in self.components)
        if not comps:
            raise ValueError("mixture needs at least one component")
        if len({s.m for _, s in comps}) != 1:
            raise ValueError("all mixture components must have the same party count")
        if any(w < 0 for w, _ in comps):
            raise ValueError("mixture weights must be non-negative")
        total = sum(w for w, _ in comps)
        exact = all(isinstance(w, (int, Fraction)) for w, _ in comps)
        if (total != 1) if exact else abs(float(total) - 1.0) > DEFAULT_TOL:
            raise ValueError(f"mixture weights sum to {total}, not 1")
        object.__setattr__(self, "components", comps)

    @property
    def m(self) -> int:
        return self.components[0][1].m

    @classmethod
    def uniform(cls, strategies) -> MixtureSpec:
        strategies = list(strategies)
        return cls(tuple((Fraction(1, len(strategies)), s) for s in strategies))


def _dyadic_exponent(w) -> int | None:
    if not isinstance(w, (int, Fraction)):
        return None
    den = Fraction(w).denominator
    return den.bit_length() - 1 if den & (den - 1) == 0 else None


def mixture_from_weights(spec: MixtureSpec) -> CorrelationTable:
    """P(a|x) = sum_mu p(mu) P^mu(a|x); exact when every weight is dyadic."""
    m = spec.m
    exps = [_dyadic_exponent(w) for w, _ in spec.components]
    if all(e is not None for e in exps):
        e = max(exps)
        acc = np.zeros((1 << m, 1 << m), dtype=np.int64)
        for (w, s), _ in zip(spec.components, exps):
            acc += int(Fraction(w) * (1 << e)) * strategy_to_table(s).values
        return CorrelationTable.exact(m, acc, e)
    acc = np.zeros((1 << m, 1 << m))
    for w, s in spec.components:
        acc += float(w) * strategy_to_table(s).values
    return CorrelationTable.floating(m, acc)


def parity_mixture_by_summation(s: DeterministicStrategy) -> CorrelationTable:
    """The same mixture as :func:`parity_mixture`, built component by component."""
    return mixture_from_weights(MixtureSpec.uniform(s.shifted(b) for b in even_shifts(s.m)))
