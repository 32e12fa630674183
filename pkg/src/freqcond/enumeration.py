"""Brute-force enumeration oracles.

Everything here is deliberately naive: strings of chain type are listed by
depth-first backtracking over the remaining transition multiplicities, and
i.i.d. arrangements by backtracking over remaining value counts. These are
the ground truth the exact formulas are tested against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterator, Mapping

from .exceptions import InvalidInputError, ResourceLimitError
from .model import FrequencyMatrix, balance_report, iid_total, require_nonempty

DEFAULT_CAP = 10**7


@dataclass(frozen=True)
class ChainString:
    """Sequence of consecutive pairs ``(y_l, y_{l+1})`` with 1-based labels."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.pairs:
            raise InvalidInputError("a chain string has at least one pair")
        for (a, b), (c, _) in zip(self.pairs, self.pairs[1:]):
            if b != c:
                raise InvalidInputError(f"pairs ({a},{b}) and ({c},.) do not chain")

    @property
    def head(self) -> int:
        return self.pairs[0][0]

    @property
    def tail(self) -> int:
        return self.pairs[-1][1]

    @property
    def states(self) -> tuple[int, ...]:
        """The trajectory ``y_1 .. y_{n+1}``."""
        return (self.head,) + tuple(b for _, b in self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class AdmissibilitySet:
    position: int
    states: frozenset[int]


class _Budget:
    def __init__(self, cap: int):
        self.cap = cap
        self.visited = 0

    def tick(self) -> None:
        self.visited += 1
        if self.visited > self.cap:
            raise ResourceLimitError(f"enumeration exceeded cap of {self.cap} visited partial paths")


def _walks(freq: FrequencyMatrix, head: int, budget: _Budget) -> Iterator[tuple[tuple[int, int], ...]]:
    N, n = freq.N, freq.n
    remaining = [list(row) for row in freq.nu]
    path: list[tuple[int, int]] = []

    def extend(state: int):
        budget.tick()
        if len(path) == n:
            yield tuple(path)
            return
        row = remaining[state - 1]
        for b in range(N):
            if row[b]:
                row[b] -= 1
                path.append((state, b + 1))
                yield from extend(b + 1)
                path.pop()
                row[b] += 1

    yield from extend(head)


def iter_chain_strings(
    freq: FrequencyMatrix, head: int | None = None, cap: int = DEFAULT_CAP
) -> Iterator[ChainString]:
    """Lazily yield chain strings matching ``freq`` in lexicographic order."""
    require_nonempty(freq)
    budget = _Budget(cap)
    if head is not None:
        freq.check_state(head)
        heads = [head]
    else:
        heads = [a + 1 for a, r in enumerate(freq.row_sums) if r > 0]
    for h in heads:
        if freq.row_sum(h) == 0:
            continue
        for pairs in _walks(freq, h, budget):
            yield ChainString(pairs)


def enumerate_chain_strings(
    freq: FrequencyMatrix, head: int | None = None, cap: int = DEFAULT_CAP
) -> list[ChainString]:
    """All distinct strings of chain type using each transition ``nu[i][j]`` times.

    Parameters
    ----------
    freq : FrequencyMatrix
        Transition counts, ``n >= 1``.
    head : int, optional
        Keep only strings whose first state is ``head``.
    cap : int
        Maximum number of visited partial paths before giving up with
        `ResourceLimitError`.

    Returns
    -------
    list of ChainString
        In lexicographic order of their pair sequences; empty when the counts
        admit no string.
    """
    return list(iter_chain_strings(freq, head, cap))


def count_paths_brute(freq: FrequencyMatrix, u: int, v: int, cap: int = DEFAULT_CAP) -> int:
    """Number of chain strings matching ``freq`` with head ``u`` and tail ``v``."""
    freq.check_state(v)
    return sum(1 for s in iter_chain_strings(freq, u, cap) if s.tail == v)


def _check_position(ell: int, upper: int) -> None:
    if isinstance(ell, bool) or not isinstance(ell, int) or not 1 <= ell <= upper:
        raise InvalidInputError(f"position {ell!r} outside 1..{upper}")


def count_with_term_brute(freq: FrequencyMatrix, ell: int, i: int, j: int, cap: int = DEFAULT_CAP) -> int:
    """Number of chain strings matching ``freq`` whose ``ell``-th pair is ``(i, j)``."""
    require_nonempty(freq)
    _check_position(ell, freq.n)
    freq.check_state(i)
    freq.check_state(j)
    return sum(1 for s in iter_chain_strings(freq, cap=cap) if s.pairs[ell - 1] == (i, j))


def admissible_states_brute(freq: FrequencyMatrix, ell: int, cap: int = DEFAULT_CAP) -> AdmissibilitySet:
    """States ``i`` such that some matching chain string has ``y_ell = i``.

    ``ell`` ranges over ``1..n+1``.
    """
    require_nonempty(freq)
    _check_position(ell, freq.n + 1)
    states = frozenset(s.states[ell - 1] for s in iter_chain_strings(freq, cap=cap))
    return AdmissibilitySet(ell, states)


def multiset_permutations(counts: Mapping[Hashable, int]) -> Iterator[tuple]:
    """Distinct arrangements of a multiset, values taken in sorted order."""
    values = sorted(v for v, c in counts.items() if c > 0)
    remaining = {v: counts[v] for v in values}
    n = sum(remaining.values())
    seq: list = []

    def extend():
        if len(seq) == n:
            yield tuple(seq)
            return
        for v in values:
            if remaining[v]:
                remaining[v] -= 1
                seq.append(v)
                yield from extend()
                seq.pop()
                remaining[v] += 1

    yield from extend()


def _arrangements(counts: Mapping, cap: int) -> list[tuple]:
    n = iid_total(counts)
    if n < 1:
        raise InvalidInputError("i.i.d. counts must have total n >= 1")
    total = math.factorial(n)
    for c in counts.values():
        total //= math.factorial(c)
    if total > cap:
        raise ResourceLimitError(f"{total} arrangements exceed the enumeration cap {cap}")
    return list(multiset_permutations(counts))


def iid_conditional_brute(counts: Mapping, ell: int, m, cap: int = DEFAULT_CAP) -> Fraction:
    """Fraction of equally likely arrangements of ``counts`` with value ``m`` at position ``ell``."""
    arrangements = _arrangements(counts, cap)
    _check_position(ell, len(arrangements[0]))
    hits = sum(1 for seq in arrangements if seq[ell - 1] == m)
    return Fraction(hits, len(arrangements))


def iid_pair_conditional_brute(
    counts: Mapping, ell1: int, ell2: int, m1, m2, cap: int = DEFAULT_CAP
) -> Fraction:
    """Joint conditional frequency of ``X_ell1 = m1`` and ``X_ell2 = m2`` by enumeration."""
    arrangements = _arrangements(counts, cap)
    n = len(arrangements[0])
    _check_position(ell1, n)
    _check_position(ell2, n)
    if ell1 == ell2:
        raise InvalidInputError("pairwise law needs two distinct positions")
    hits = sum(1 for seq in arrangements if seq[ell1 - 1] == m1 and seq[ell2 - 1] == m2)
    return Fraction(hits, len(arrangements))


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def iter_frequency_matrices(N: int, n: int, feasible_only: bool = True) -> Iterator[FrequencyMatrix]:
    """Every ``N x N`` count matrix with total ``n``, optionally only balance-feasible ones."""
    if N < 1 or n < 1:
        raise InvalidInputError("need N >= 1 and n >= 1")
    for flat in _compositions(n, N * N):
        freq = FrequencyMatrix([flat[a * N:(a + 1) * N] for a in range(N)])
        if not feasible_only or balance_report(freq).feasible:
            yield freq
