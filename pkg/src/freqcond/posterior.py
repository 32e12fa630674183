"""Posterior laws of the first observation given empirical frequencies.

i.i.d. case: the posterior marginal of any ``X_l`` is ``nu_m / n``.

Markov case: every trajectory in a frequency event carries the same
probability weight once its first state is fixed, so the posterior
reduces to ratios of chain-string counts::

    P(X_1 = (i, j) | E, Y_1 = i) = #_1^{(i,j)} / N_i
    P(Y_1 = i | E)               = pi0_i N_i / sum_k pi0_k N_k

where ``N_i`` is the number of matching strings with head ``i``. For open
paths only one head is possible; for closed circuits the candidate heads
can have different string counts, so they are weighted by ``N_i`` rather
than by a bare admissibility indicator.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from . import enumeration, whittle
from .exceptions import InvalidInputError, NullConditioningError
from .model import INFEASIBLE, FrequencyMatrix, balance_report, iid_total, require_nonempty

WHITTLE = "whittle"
BRUTE = "brute"


def iid_posterior(counts: Mapping, m) -> Fraction:
    """``P(X_l = m | counts) = nu_m / n``, the same for every position ``l``."""
    n = iid_total(counts)
    if n < 1:
        raise InvalidInputError("i.i.d. posterior needs n >= 1")
    return Fraction(counts.get(m, 0), n)


def iid_pair_posterior(counts: Mapping, m1, m2) -> Fraction:
    """Joint posterior of two distinct positions taking values ``m1`` and ``m2``.

    Equals ``nu_m1 (nu_m2 - 1{m1 = m2}) / (n (n - 1))``.
    """
    n = iid_total(counts)
    if n < 2:
        raise InvalidInputError("pairwise posterior needs n >= 2")
    a = counts.get(m1, 0)
    b = counts.get(m2, 0) - (1 if m1 == m2 else 0)
    return Fraction(a * max(b, 0), n * (n - 1))


class _BruteCounts:
    """Count backend backed by the enumeration oracle (test configuration)."""

    def __init__(self, freq: FrequencyMatrix, cap: int = enumeration.DEFAULT_CAP):
        strings = enumeration.enumerate_chain_strings(freq, cap=cap)
        self.heads = Counter(s.head for s in strings)
        self.first = Counter(s.pairs[0] for s in strings)

    def head_counts(self) -> dict[int, int]:
        return dict(self.heads)

    def first_count(self, i: int, j: int) -> int:
        return self.first[(i, j)]


class _WhittleCounts:
    def __init__(self, freq: FrequencyMatrix):
        self.freq = freq

    def head_counts(self) -> dict[int, int]:
        return whittle.head_counts(self.freq)

    def first_count(self, i: int, j: int) -> int:
        return whittle.count_first_transition(self.freq, i, j)


def _backend(freq: FrequencyMatrix, method: str):
    require_nonempty(freq)
    if method == WHITTLE:
        return _WhittleCounts(freq)
    if method == BRUTE:
        return _BruteCounts(freq)
    raise InvalidInputError(f"unknown count method {method!r}")


def admissible_at_y2(freq: FrequencyMatrix, i: int, j: int, method: str = WHITTLE) -> bool:
    """Whether some matching string with head ``i`` has second state ``j``."""
    freq.check_state(i)
    freq.check_state(j)
    return _backend(freq, method).first_count(i, j) > 0


def markov_posterior_given_start(
    freq: FrequencyMatrix, i: int, j: int, method: str = WHITTLE
) -> Fraction:
    """``P(X_1 = (i, j) | E, Y_1 = i)``; zero when no matching string starts at ``i``."""
    freq.check_state(i)
    freq.check_state(j)
    counts = _backend(freq, method)
    denom = sum(counts.first_count(i, k) for k in range(1, freq.N + 1))
    if denom == 0:
        return Fraction(0)
    return Fraction(counts.first_count(i, j), denom)


def _exact(values: Sequence) -> bool:
    return all(isinstance(x, (int, Fraction)) for x in values)


def _require_heads(freq: FrequencyMatrix, heads: dict) -> None:
    if heads:
        return
    report = balance_report(freq)
    if report.kind == INFEASIBLE:
        raise NullConditioningError(
            f"event is infeasible: flow balance row_sum - col_sum = {list(report.d)} "
            "is neither a path (+1/-1) nor a circuit (all 0)"
        )
    raise NullConditioningError("event admits no chain string (its support is disconnected)")


def _normalize(weights: dict[int, object], exact: bool) -> dict[int, object]:
    total = sum(weights.values())
    if total == 0:
        raise NullConditioningError("every admissible head has zero initial probability")
    if exact:
        return {k: Fraction(w) / total for k, w in weights.items()}
    return {k: float(w) / float(total) for k, w in weights.items()}


def start_law(freq: FrequencyMatrix, pi0: Sequence, method: str = WHITTLE) -> dict[int, object]:
    """``P(Y_1 = i | E)`` for every state, weighting heads by their string counts.

    Exact Fractions when ``pi0`` is given as rationals, floats otherwise.
    """
    if len(pi0) != freq.N:
        raise InvalidInputError(f"pi0 has length {len(pi0)}, expected {freq.N}")
    heads = _backend(freq, method).head_counts()
    _require_heads(freq, heads)
    exact = _exact(pi0)
    if exact:
        weights = {i: pi0[i - 1] * heads.get(i, 0) for i in range(1, freq.N + 1)}
    else:
        # counts overflow floats at large n; only their ratios matter
        top = max(heads.values(), default=1)
        weights = {i: float(pi0[i - 1]) * float(Fraction(heads.get(i, 0), top)) for i in range(1, freq.N + 1)}
    return _normalize(weights, exact)


def start_posterior(freq: FrequencyMatrix, pi0: Sequence, i: int, method: str = WHITTLE):
    freq.check_state(i)
    return start_law(freq, pi0, method)[i]


def start_law_indicator(freq: FrequencyMatrix, pi0: Sequence, method: str = WHITTLE) -> dict[int, object]:
    """Indicator-weighted start law ``1{i admissible} pi0_i / sum_k 1{k admissible} pi0_k``.

    Coincides with `start_law` for open paths and for circuits whose
    admissible heads all have the same string count. This is the first
    factor of the asymptotic target for the posterior.
    """
    if len(pi0) != freq.N:
        raise InvalidInputError(f"pi0 has length {len(pi0)}, expected {freq.N}")
    heads = _backend(freq, method).head_counts()
    _require_heads(freq, heads)
    exact = _exact(pi0)
    weights = {i: (pi0[i - 1] if exact else float(pi0[i - 1])) if i in heads else 0 for i in range(1, freq.N + 1)}
    return _normalize(weights, exact)


@dataclass(frozen=True)
class PosteriorTable:
    """``P(X_1 = (i, j) | E)`` for all cells, 1-based keys.

    ``start`` holds ``P(Y_1 = i | E)`` and ``given_start`` the exact
    ``P(X_1 = (i, j) | E, Y_1 = i)``; ``entries`` is their product.
    """

    N: int
    n: int
    entries: dict[tuple[int, int], object]
    start: dict[int, object]
    given_start: dict[tuple[int, int], Fraction]

    @property
    def exact(self) -> bool:
        return _exact(list(self.entries.values()))

    def __getitem__(self, cell: tuple[int, int]):
        return self.entries[cell]

    def total(self):
        return sum(self.entries.values())

    def as_array(self) -> np.ndarray:
        out = np.zeros((self.N, self.N))
        for (i, j), p in self.entries.items():
            out[i - 1, j - 1] = float(p)
        return out

    def to_dict(self) -> dict:
        cells = []
        for (i, j), p in sorted(self.entries.items()):
            cell = {"i": i, "j": j, "float": float(p)}
            if isinstance(p, (int, Fraction)):
                cell["exact"] = _fmt(Fraction(p))
            cells.append(cell)
        return {"N": self.N, "n": self.n, "exact": self.exact, "entries": cells}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _fmt(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def markov_posterior(freq: FrequencyMatrix, pi0: Sequence, method: str = WHITTLE) -> PosteriorTable:
    """Posterior law of the first transition ``X_1`` given the frequency event."""
    start = start_law(freq, pi0, method)
    counts = _backend(freq, method)
    given: dict[tuple[int, int], Fraction] = {}
    entries: dict[tuple[int, int], object] = {}
    N = freq.N
    for i in range(1, N + 1):
        row = [counts.first_count(i, j) for j in range(1, N + 1)]
        total = sum(row)
        for j in range(1, N + 1):
            g = Fraction(row[j - 1], total) if total else Fraction(0)
            given[(i, j)] = g
            s = start[i]
            entries[(i, j)] = s * g if isinstance(s, Fraction) else float(s) * float(g)
    return PosteriorTable(N, freq.n, entries, start, given)
