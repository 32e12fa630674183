"""Exact counting of chain strings with Whittle's cofactor formula.

For a frequency matrix ``nu`` with row sums ``r_i`` the normalized matrix
``F*`` has entries ``1{i=j} - nu_ij / r_i`` (identity rows where ``r_i = 0``).
The number of strings with head ``u`` and tail ``v`` is

    N_uv = prod_i r_i! / prod_ij nu_ij!  *  cofactor_{v,u}(F*)

whenever the flow balance admits ``(u, v)``. All arithmetic is exact:
counts are Python ints, matrix entries and cofactors are Fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .exceptions import ConsistencyError, InvalidInputError, PreconditionError
from .model import CIRCUIT, PATH, FrequencyMatrix, balance_report

RationalMatrix = tuple[tuple[Fraction, ...], ...]


def build_fstar(freq: FrequencyMatrix) -> RationalMatrix:
    rows = []
    for a, row in enumerate(freq.nu):
        r = sum(row)
        rows.append(
            tuple(Fraction(int(a == b)) - (Fraction(c, r) if r else 0) for b, c in enumerate(row))
        )
    return tuple(rows)


def build_fstar_tilde(freq: FrequencyMatrix, i: int, j: int) -> RationalMatrix:
    """``F*`` after removing one ``(i, j)`` transition, written out case by case.

    Row ``i`` uses the decremented count and row sum; every other row is
    copied from ``F*``. When ``(i, j)`` was the only transition out of
    ``i``, row ``i`` becomes an identity row.
    """
    if freq.count(i, j) < 1:
        raise InvalidInputError(f"F~* needs nu[{i}][{j}] >= 1")
    fstar = build_fstar(freq)
    r = freq.row_sum(i)
    row = freq.nu[i - 1]
    new_row = []
    for b in range(freq.N):
        jt = b + 1
        if r > 1:
            if jt == j:
                new_row.append(Fraction(int(i == j)) - Fraction(row[b] - 1, r - 1))
            else:
                new_row.append(Fraction(int(i == jt)) - Fraction(row[b], r - 1))
        else:
            new_row.append(Fraction(int(i == jt)))
    return fstar[: i - 1] + (tuple(new_row),) + fstar[i:]


def determinant(M: Sequence[Sequence]) -> Fraction:
    """Exact determinant by rational Gaussian elimination.

    Pivots on the entry of largest magnitude in each column.
    """
    A = [[Fraction(x) for x in row] for row in M]
    size = len(A)
    det = Fraction(1)
    for c in range(size):
        p = max(range(c, size), key=lambda r: abs(A[r][c]))
        if A[p][c] == 0:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = -det
        pivot = A[c][c]
        det *= pivot
        for r in range(c + 1, size):
            factor = A[r][c] / pivot
            if factor:
                Ar, Ac = A[r], A[c]
                for k in range(c + 1, size):
                    Ar[k] -= factor * Ac[k]
    return det


def cofactor(M: Sequence[Sequence], v: int, u: int) -> Fraction:
    """Signed ``(v, u)`` cofactor: delete row ``v`` and column ``u`` (1-based)."""
    size = len(M)
    if any(len(row) != size for row in M):
        raise InvalidInputError("cofactor needs a square matrix")
    if not (1 <= v <= size and 1 <= u <= size):
        raise InvalidInputError(f"cofactor index ({v},{u}) outside 1..{size}")
    minor = [
        [x for b, x in enumerate(row) if b != u - 1]
        for a, row in enumerate(M)
        if a != v - 1
    ]
    sign = -1 if (v + u) % 2 else 1
    return sign * determinant(minor)


@lru_cache(maxsize=None)
def _factorial(k: int) -> int:
    return math.factorial(k)


def multinomial_factor(freq: FrequencyMatrix) -> int:
    """``prod_i r_i! / prod_ij nu_ij!``, a product of per-row multinomials."""
    total = 1
    for row in freq.nu:
        m = _factorial(sum(row))
        for c in row:
            m //= _factorial(c)
        total *= m
    return total


@dataclass(frozen=True)
class WhittleBreakdown:
    count: int
    multinomial: int
    cofactor: Fraction
    admissible: bool


def whittle_breakdown(freq: FrequencyMatrix, u: int, v: int) -> WhittleBreakdown:
    """Whittle count with its multinomial and cofactor factors.

    Pairs ``(u, v)`` that the flow balance rules out give count 0 without
    evaluating the formula, which is only valid for admissible endpoints.
    An empty matrix counts the empty string from ``u`` to itself.
    """
    freq.check_state(u)
    freq.check_state(v)
    multinomial = multinomial_factor(freq)
    cof = cofactor(build_fstar(freq), v, u)
    if freq.n == 0:
        admissible = u == v
    else:
        admissible = balance_report(freq).admits(u, v)
    if not admissible:
        return WhittleBreakdown(0, multinomial, cof, False)
    value = multinomial * cof
    if value.denominator != 1 or value < 0:
        raise ConsistencyError(f"Whittle product {value} for {freq!r}, u={u}, v={v} is not a nonnegative integer")
    return WhittleBreakdown(int(value), multinomial, cof, True)


@lru_cache(maxsize=65536)
def whittle_count(freq: FrequencyMatrix, u: int, v: int) -> int:
    """Exact number of chain strings matching ``freq`` with head ``u`` and tail ``v``."""
    return whittle_breakdown(freq, u, v).count


@dataclass(frozen=True)
class FirstTransitionCount:
    """Both routes to the number of strings that start with ``(i, j)``."""

    count: int
    by_decrement: int
    by_closed_form: Fraction
    tail: int | None
    N_iv: int
    fstar_cofactor: Fraction | None
    fstar_tilde_cofactor: Fraction | None


def first_transition_breakdown(freq: FrequencyMatrix, i: int, j: int) -> FirstTransitionCount:
    """Count strings with first pair ``(i, j)`` by two independent routes.

    Route (a) drops one ``(i, j)`` transition and counts strings from ``j``
    to the tail with Whittle's formula. Route (b) is the closed form
    ``nu_ij / r_i * N_iv * F~*_{vj} / F*_{vi}``. A disagreement raises
    `ConsistencyError`.
    """
    freq.check_state(i)
    freq.check_state(j)
    report = balance_report(freq)
    v = report.tail_for(i)
    if freq.count(i, j) < 1 or v is None:
        return FirstTransitionCount(0, 0, Fraction(0), v, 0, None, None)

    by_decrement = whittle_count(freq.decrement(i, j), j, v)

    N_iv = whittle_count(freq, i, v)
    f_vi = f_vj = None
    if N_iv > 0:
        f_vi = cofactor(build_fstar(freq), v, i)
        f_vj = cofactor(build_fstar_tilde(freq, i, j), v, j)
        closed = Fraction(freq.count(i, j), freq.row_sum(i)) * N_iv * f_vj / f_vi
    else:
        closed = Fraction(0)

    if closed != by_decrement:
        raise ConsistencyError(
            f"first-transition count mismatch for {freq!r}, ({i},{j}): "
            f"decrement route {by_decrement}, closed form {closed}"
        )
    return FirstTransitionCount(by_decrement, by_decrement, closed, v, N_iv, f_vi, f_vj)


@lru_cache(maxsize=65536)
def count_first_transition(freq: FrequencyMatrix, i: int, j: int) -> int:
    """Number of chain strings matching ``freq`` whose first pair is ``(i, j)``."""
    return first_transition_breakdown(freq, i, j).count


def cofactor_row_constancy(freq: FrequencyMatrix) -> bool:
    """Whether every row of cofactors of ``F*`` is constant.

    Requires every row sum to be positive, so that ``F*`` has zero row sums.
    """
    if any(r == 0 for r in freq.row_sums):
        raise PreconditionError("cofactor row constancy needs every row sum positive")
    fstar = build_fstar(freq)
    for v in range(1, freq.N + 1):
        first = cofactor(fstar, v, 1)
        if any(cofactor(fstar, v, u) != first for u in range(2, freq.N + 1)):
            return False
    return True


def head_counts(freq: FrequencyMatrix) -> dict[int, int]:
    """Number of matching strings for every possible head (zero entries dropped)."""
    report = balance_report(freq)
    if report.kind == PATH:
        pairs = [(report.head, report.tail)]
    elif report.kind == CIRCUIT:
        pairs = [(u, u) for u in sorted(report.candidate_heads)]
    else:
        pairs = []
    counts = {u: whittle_count(freq, u, v) for u, v in pairs}
    return {u: c for u, c in counts.items() if c > 0}


def admissible_heads_whittle(freq: FrequencyMatrix) -> frozenset[int]:
    """States that start at least one matching chain string."""
    return frozenset(head_counts(freq))
