"""Core domain types: frequency matrices, Markov models and flow balance.

States carry the labels ``1..N`` in every public function and in all JSON
documents; arrays are indexed ``0..N-1`` internally.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import numpy as np

from .exceptions import DegenerateModelError, InvalidInputError

ROW_SUM_TOL = 1e-12
STATIONARY_TOL = 1e-10

PATH = "path"
CIRCUIT = "circuit"
INFEASIBLE = "infeasible"


def _check_count(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise InvalidInputError(f"{where}: expected a nonnegative integer, got {value!r}")
    if value < 0:
        raise InvalidInputError(f"{where}: negative count {value}")
    return int(value)


@dataclass(frozen=True)
class FrequencyMatrix:
    """Matrix of one-step transition counts ``nu[i][j]``.

    The same object identifies the frequency event: the set of length-``n``
    trajectories exhibiting exactly these counts. Instances are immutable
    and hashable so they can key caches and event groupings.

    Parameters
    ----------
    nu : sequence of sequences of int
        Square matrix of nonnegative counts, 0-indexed.
    """

    nu: tuple[tuple[int, ...], ...]

    def __init__(self, nu: Sequence[Sequence[int]]):
        rows = tuple(tuple(row) for row in nu)
        size = len(rows)
        if size < 1:
            raise InvalidInputError("frequency matrix must have at least one state")
        for a, row in enumerate(rows):
            if len(row) != size:
                raise InvalidInputError(f"frequency matrix row {a + 1} has length {len(row)}, expected {size}")
        rows = tuple(
            tuple(_check_count(c, f"nu[{a + 1}][{b + 1}]") for b, c in enumerate(row))
            for a, row in enumerate(rows)
        )
        object.__setattr__(self, "nu", rows)

    @classmethod
    def from_pairs(cls, pairs: Mapping[tuple[int, int], int], N: int) -> "FrequencyMatrix":
        """Build from a sparse ``{(i, j): count}`` map with 1-based labels."""
        if N < 1:
            raise InvalidInputError(f"N must be positive, got {N}")
        nu = [[0] * N for _ in range(N)]
        for (i, j), c in pairs.items():
            if not (1 <= i <= N and 1 <= j <= N):
                raise InvalidInputError(f"transition ({i},{j}) outside states 1..{N}")
            nu[i - 1][j - 1] += _check_count(c, f"nu[{i}][{j}]")
        return cls(nu)

    @classmethod
    def zeros(cls, N: int) -> "FrequencyMatrix":
        return cls([[0] * N for _ in range(N)])

    @property
    def N(self) -> int:
        return len(self.nu)

    @property
    def n(self) -> int:
        return sum(sum(row) for row in self.nu)

    def count(self, i: int, j: int) -> int:
        """Count of transition ``(i, j)`` (1-based labels)."""
        self.check_state(i)
        self.check_state(j)
        return self.nu[i - 1][j - 1]

    def row_sum(self, i: int) -> int:
        self.check_state(i)
        return sum(self.nu[i - 1])

    @property
    def row_sums(self) -> tuple[int, ...]:
        return tuple(sum(row) for row in self.nu)

    @property
    def col_sums(self) -> tuple[int, ...]:
        return tuple(sum(row[b] for row in self.nu) for b in range(self.N))

    def check_state(self, i: int) -> None:
        if isinstance(i, bool) or not isinstance(i, (int, np.integer)) or not 1 <= i <= self.N:
            raise InvalidInputError(f"state {i!r} outside 1..{self.N}")

    def pairs(self) -> dict[tuple[int, int], int]:
        """Sparse 1-based ``{(i, j): count}`` view of the nonzero cells."""
        return {
            (a + 1, b + 1): c
            for a, row in enumerate(self.nu)
            for b, c in enumerate(row)
            if c
        }

    def decrement(self, i: int, j: int) -> "FrequencyMatrix":
        """Copy with one fewer ``(i, j)`` transition."""
        if self.count(i, j) < 1:
            raise InvalidInputError(f"cannot remove transition ({i},{j}): count is zero")
        nu = [list(row) for row in self.nu]
        nu[i - 1][j - 1] -= 1
        return FrequencyMatrix(nu)

    def to_array(self) -> np.ndarray:
        return np.array(self.nu, dtype=np.int64)

    def to_dict(self) -> dict:
        return {"N": self.N, "nu": [list(row) for row in self.nu]}

    def key(self) -> str:
        """Canonical row-major serialization, used as the exact event identity."""
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, doc: Mapping) -> "FrequencyMatrix":
        if not isinstance(doc, Mapping) or "nu" not in doc:
            raise InvalidInputError("frequency document must be an object with field 'nu'")
        nu = doc["nu"]
        if not isinstance(nu, list) or not all(isinstance(r, list) for r in nu):
            raise InvalidInputError("field 'nu' must be a list of lists")
        freq = cls(nu)
        if "N" in doc and doc["N"] != freq.N:
            raise InvalidInputError(f"field 'N'={doc['N']!r} does not match 'nu' of size {freq.N}")
        return freq

    def __repr__(self) -> str:
        return f"FrequencyMatrix(N={self.N}, n={self.n}, {self.pairs()})"


def require_nonempty(freq: FrequencyMatrix) -> None:
    if freq.n < 1:
        raise InvalidInputError("frequency event with n = 0 transitions cannot be conditioned on")


def frequency_of_trajectory(traj: Sequence[int], N: int | None = None) -> FrequencyMatrix:
    """Transition counts of a trajectory ``y_1 .. y_{n+1}`` (labels ``1..N``).

    ``N`` defaults to the largest label seen.
    """
    ys = list(traj)
    if len(ys) < 2:
        raise InvalidInputError(f"trajectory needs at least 2 states, got {len(ys)}")
    for y in ys:
        if isinstance(y, bool) or not isinstance(y, (int, np.integer)) or y < 1:
            raise InvalidInputError(f"invalid state label {y!r}")
    if N is None:
        N = max(ys)
    if max(ys) > N:
        raise InvalidInputError(f"state label {max(ys)} outside 1..{N}")
    nu = [[0] * N for _ in range(N)]
    for a, b in zip(ys, ys[1:]):
        nu[a - 1][b - 1] += 1
    return FrequencyMatrix(nu)


@dataclass(frozen=True)
class BalanceReport:
    """Flow-balance classification of a frequency matrix.

    ``d[i] = row_sum(i) - col_sum(i)``. A trajectory's counts have ``d = +1``
    at its first state and ``-1`` at its last, or ``d = 0`` everywhere when
    it is closed.
    """

    d: tuple[int, ...]
    kind: str
    head: int | None = None
    tail: int | None = None
    candidate_heads: frozenset[int] = field(default_factory=frozenset)

    @property
    def feasible(self) -> bool:
        return self.kind != INFEASIBLE

    def tail_for(self, head: int) -> int | None:
        """Tail forced by choosing ``head``, or None if ``head`` is ruled out."""
        if self.kind == PATH:
            return self.tail if head == self.head else None
        if self.kind == CIRCUIT:
            return head if head in self.candidate_heads else None
        return None

    def admits(self, u: int, v: int) -> bool:
        return self.tail_for(u) == v


def balance_report(freq: FrequencyMatrix) -> BalanceReport:
    require_nonempty(freq)
    rows, cols = freq.row_sums, freq.col_sums
    d = tuple(r - c for r, c in zip(rows, cols))
    plus = [a + 1 for a, x in enumerate(d) if x == 1]
    minus = [a + 1 for a, x in enumerate(d) if x == -1]
    others = [x for x in d if x not in (0, 1, -1)]
    if not others and len(plus) == 1 and len(minus) == 1:
        return BalanceReport(d, PATH, head=plus[0], tail=minus[0], candidate_heads=frozenset(plus))
    if all(x == 0 for x in d):
        heads = frozenset(a + 1 for a, r in enumerate(rows) if r > 0)
        return BalanceReport(d, CIRCUIT, candidate_heads=heads)
    return BalanceReport(d, INFEASIBLE)


def _as_number(x, where: str):
    """Accept int, float, Fraction, or a ``{"num": .., "den": ..}`` object."""
    if isinstance(x, Mapping):
        try:
            return Fraction(int(x["num"]), int(x["den"]))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise InvalidInputError(f"{where}: bad rational {x!r}") from exc
    if isinstance(x, bool):
        raise InvalidInputError(f"{where}: expected a number, got {x!r}")
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    raise InvalidInputError(f"{where}: expected a number, got {x!r}")


def _check_distribution(values: Sequence, where: str) -> None:
    for a, x in enumerate(values):
        if x < 0:
            raise InvalidInputError(f"{where}[{a + 1}] = {x} is negative")
    total = sum(values)
    if abs(float(total) - 1.0) > ROW_SUM_TOL:
        raise InvalidInputError(f"{where} sums to {float(total)!r}, expected 1")


class MarkovModel:
    """Finite Markov chain: transition matrix and initial distribution.

    ``P`` is kept as a float array for sampling. Its exact entries are kept
    too when they were given as rationals (``P_exact``), as is ``pi0``,
    so conditional quantities can be computed without rounding.

    Parameters
    ----------
    P : (N, N) array_like
        Row-stochastic transition matrix.
    pi0 : (N,) array_like
        Initial distribution of ``Y_1``.
    """

    def __init__(self, P, pi0):
        rows = [list(r) for r in P]
        N = len(rows)
        if N < 1:
            raise InvalidInputError("model must have at least one state")
        exact = []
        for a, row in enumerate(rows):
            if len(row) != N:
                raise InvalidInputError(f"P row {a + 1} has length {len(row)}, expected {N}")
            vals = [_as_number(x, f"P[{a + 1}][{b + 1}]") for b, x in enumerate(row)]
            _check_distribution(vals, f"P row {a + 1}")
            exact.append(tuple(vals))
        pi0 = [_as_number(x, f"pi0[{a + 1}]") for a, x in enumerate(pi0)]
        if len(pi0) != N:
            raise InvalidInputError(f"pi0 has length {len(pi0)}, expected {N}")
        _check_distribution(pi0, "pi0")
        self.P_exact = tuple(exact)
        self.P = np.array([[float(x) for x in row] for row in exact])
        self.P.setflags(write=False)
        self.pi0 = tuple(pi0)

    @property
    def N(self) -> int:
        return self.P.shape[0]

    @property
    def strictly_positive(self) -> bool:
        return bool(np.all(self.P > 0))

    @property
    def pi0_array(self) -> np.ndarray:
        return np.array([float(x) for x in self.pi0])

    def stationary(self) -> np.ndarray:
        return stationary_distribution(self.P)

    def to_dict(self) -> dict:
        def enc(x):
            if isinstance(x, Fraction):
                return {"num": x.numerator, "den": x.denominator}
            return x

        return {
            "N": self.N,
            "P": [[enc(x) for x in row] for row in self.P_exact],
            "pi0": [enc(x) for x in self.pi0],
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "MarkovModel":
        if not isinstance(doc, Mapping):
            raise InvalidInputError("model document must be a JSON object")
        for name in ("P", "pi0"):
            if name not in doc:
                raise InvalidInputError(f"model document is missing field '{name}'")
        model = cls(doc["P"], doc["pi0"])
        if "N" in doc and doc["N"] != model.N:
            raise InvalidInputError(f"field 'N'={doc['N']!r} does not match P of size {model.N}")
        return model

    def __repr__(self) -> str:
        return f"MarkovModel(N={self.N}, P={self.P.tolist()}, pi0={[float(x) for x in self.pi0]})"


def stationary_distribution(P) -> np.ndarray:
    """Stationary distribution ``pi`` with ``pi P = pi`` and ``sum(pi) = 1``.

    Solves the linear system with one balance equation replaced by the
    normalization. Raises `DegenerateModelError` when the eigenvalue 1 is
    not simple (the chain has more than one closed class).
    """
    P = np.asarray(P, dtype=float)
    N = P.shape[0]
    if P.shape != (N, N):
        raise InvalidInputError(f"P must be square, got shape {P.shape}")
    if np.any(P < 0) or np.any(np.abs(P.sum(axis=1) - 1) > ROW_SUM_TOL):
        raise InvalidInputError("P is not row-stochastic")
    A = P.T - np.eye(N)
    if N > 1 and np.linalg.matrix_rank(A, tol=1e-10) < N - 1:
        raise DegenerateModelError("stationary distribution is not unique (reducible chain)")
    A[-1, :] = 1.0
    b = np.zeros(N)
    b[-1] = 1.0
    pi = np.linalg.solve(A, b)
    pi = np.where(np.abs(pi) < 1e-15, 0.0, pi)
    if np.max(np.abs(pi @ P - pi)) >= STATIONARY_TOL or np.any(pi < 0):
        raise DegenerateModelError("linear solve did not produce a stationary distribution")
    return pi


def load_json(path) -> object:
    """Read a JSON file, reporting the line and column of syntax errors."""
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def iid_total(counts: Mapping) -> int:
    """Validate an i.i.d. count map ``{value: nu}`` and return ``n``."""
    total = 0
    for value, c in counts.items():
        total += _check_count(c, f"count of value {value!r}")
    return total


def trajectories(N: int, length: int) -> Iterable[tuple[int, ...]]:
    """All label sequences of the given length over states ``1..N``."""
    return itertools.product(range(1, N + 1), repeat=length)
