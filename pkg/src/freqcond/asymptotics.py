"""Large-n diagnostics for the posterior of the first transition.

Typical events are sampled from the chain and kept when every empirical
frequency ``nu_ij / n`` lies within ``mu`` of ``pi_i p_ij``. On those events
the harness measures how far the exact posterior is from the prior
transition law and evaluates each ingredient of that convergence: the
frequency-ratio approximation of the conditional law, the symmetry ratio
of first-transition counts, admissibility of every state at ``Y_2``, and
the entrywise gap between ``F*`` and ``F~*``.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .exceptions import InvalidInputError, PreconditionError, UndefinedRatioError
from .model import FrequencyMatrix, MarkovModel, balance_report, stationary_distribution
from .posterior import (
    admissible_at_y2,
    markov_posterior,
    markov_posterior_given_start,
    start_law_indicator,
)
from .simulate import default_threads, sample_trajectories, transition_counts
from .whittle import admissible_heads_whittle, build_fstar, build_fstar_tilde, count_first_transition


@dataclass(frozen=True)
class TypicalityConfig:
    mu: float
    n: int
    samples: int
    seed: int

    def __post_init__(self):
        # mu = 0 is allowed and selects nothing; negative values are rejected
        if not self.mu >= 0:
            raise InvalidInputError(f"mu must be nonnegative, got {self.mu}")
        if self.n < 1 or self.samples < 1:
            raise InvalidInputError("n and samples must be >= 1")


@dataclass(frozen=True)
class TypicalSample:
    events: list[FrequencyMatrix]
    sampled: int
    passed: int

    @property
    def pass_rate(self) -> float:
        return self.passed / self.sampled


def _require_positive(model: MarkovModel) -> None:
    if not model.strictly_positive:
        raise PreconditionError("asymptotic diagnostics need a strictly positive transition matrix")


def sample_typical_events(model: MarkovModel, cfg: TypicalityConfig, threads: int | None = None) -> TypicalSample:
    """Sample trajectories and keep the distinct events passing the ``mu`` test."""
    _require_positive(model)
    N = model.N
    pi = stationary_distribution(model.P)
    target = (pi[:, None] * model.P).ravel()
    trajs = sample_trajectories(model, cfg.n, cfg.samples, cfg.seed, threads)
    counts = transition_counts(trajs, N)
    ok = np.all(np.abs(counts / cfg.n - target) < cfg.mu, axis=1)
    kept = np.unique(counts[ok], axis=0)
    events = [FrequencyMatrix(row.reshape(N, N).tolist()) for row in kept]
    events.sort(key=FrequencyMatrix.key)
    return TypicalSample(events, cfg.samples, int(ok.sum()))


def typical_events(model: MarkovModel, cfg: TypicalityConfig, threads: int | None = None) -> list[FrequencyMatrix]:
    return sample_typical_events(model, cfg, threads).events


def theorem_deviation(freq: FrequencyMatrix, model: MarkovModel, target: str = "indicator") -> float:
    """Largest gap between the exact posterior of ``X_1`` and the prior-based target.

    ``target="indicator"`` compares with
    ``1{i admissible} pi0_i / sum_k 1{k admissible} pi0_k * p_ij``;
    ``target="prior"`` with the unconditioned ``pi0_i p_ij``.
    """
    table = markov_posterior(freq, model.pi0)
    if target == "indicator":
        weights = start_law_indicator(freq, model.pi0)
    elif target == "prior":
        weights = {i: model.pi0[i - 1] for i in range(1, freq.N + 1)}
    else:
        raise ValueError(f"unknown target {target!r}")
    return max(
        abs(float(p) - float(weights[i]) * model.P[i - 1, j - 1])
        for (i, j), p in table.entries.items()
    )


def lemma42_deviation(freq: FrequencyMatrix, head: int | None = None) -> float:
    """Gap between ``P(X_1 = (i, j) | E, Y_1 = i)`` and ``nu_ij / r_i``.

    Maximum over ``j`` and over the given head, or over every admissible
    head when ``head`` is None.
    """
    heads = [head] if head is not None else sorted(admissible_heads_whittle(freq))
    worst = Fraction(0)
    for i in heads:
        r = freq.row_sum(i)
        if r == 0:
            raise PreconditionError(f"state {i} is not an admissible head")
        for j in range(1, freq.N + 1):
            gap = abs(markov_posterior_given_start(freq, i, j) - Fraction(freq.count(i, j), r))
            worst = max(worst, gap)
    return float(worst)


def gamma_ratio(freq: FrequencyMatrix, i: int, k: int, j: int) -> Fraction:
    """Ratio of sequence counts starting with a labelled ``(i, k)`` vs ``(i, j)``.

    ``gamma(k, j) = nu_ij 1{k ok} #_1^{(i,k)} / (nu_ik 1{j ok} #_1^{(i,j)})``,
    where ``1{x ok}`` marks ``x`` admissible at ``Y_2`` given head ``i``.
    """
    if freq.count(i, k) < 1 or freq.count(i, j) < 1:
        raise UndefinedRatioError(f"gamma needs nu[{i}][{k}] >= 1 and nu[{i}][{j}] >= 1")
    num_count = count_first_transition(freq, i, k)
    den_count = count_first_transition(freq, i, j)
    if den_count == 0:
        raise UndefinedRatioError(f"no string starts with ({i},{j}); gamma({k},{j}) is undefined")
    # the Y_2 indicators equal [count > 0], so they fold into the counts
    return Fraction(freq.count(i, j) * num_count, freq.count(i, k) * den_count)


def max_gamma_gap(freq: FrequencyMatrix) -> float | None:
    """``max |gamma(k, j) - 1|`` over admissible heads and defined ratios."""
    worst = None
    for i in sorted(admissible_heads_whittle(freq)):
        out = [b for b in range(1, freq.N + 1) if freq.count(i, b) >= 1]
        for k in out:
            for j in out:
                try:
                    g = gamma_ratio(freq, i, k, j)
                except UndefinedRatioError:
                    continue
                gap = float(abs(g - 1))
                worst = gap if worst is None else max(worst, gap)
    return worst


def admissibility_at_y2(freq: FrequencyMatrix, i: int) -> bool:
    """Whether every state can follow head ``i`` in some matching string."""
    if i not in admissible_heads_whittle(freq):
        raise PreconditionError(f"state {i} is not an admissible head")
    return all(admissible_at_y2(freq, i, j) for j in range(1, freq.N + 1))


def fstar_tilde_deviation(freq: FrequencyMatrix, i: int, j: int) -> tuple[Fraction, Fraction]:
    """Largest entrywise ``|F~* - F*|`` and the bound ``1 / (r_i - 1)``."""
    r = freq.row_sum(i)
    if r < 2:
        raise PreconditionError(f"row sum of state {i} is {r}; the bound needs at least 2")
    a, b = build_fstar(freq), build_fstar_tilde(freq, i, j)
    dev = max(abs(x - y) for ra, rb in zip(a, b) for x, y in zip(ra, rb))
    return dev, Fraction(1, r - 1)


@dataclass(frozen=True)
class EventDiagnostics:
    key: str
    kind: str
    theorem: float
    theorem_prior: float
    lemma42: float
    gamma_gap: float | None
    y2_admissible: bool
    fstar_dev: float
    fstar_bound: float
    fstar_within_bound: bool


def diagnose_event(freq: FrequencyMatrix, model: MarkovModel) -> EventDiagnostics:
    heads = sorted(admissible_heads_whittle(freq))
    worst_dev, worst_bound, within = Fraction(0), Fraction(0), True
    for i in heads:
        for j in range(1, freq.N + 1):
            if freq.count(i, j) >= 1 and freq.row_sum(i) >= 2:
                dev, bound = fstar_tilde_deviation(freq, i, j)
                within = within and dev <= bound
                if dev >= worst_dev:
                    worst_dev, worst_bound = dev, bound
    return EventDiagnostics(
        key=freq.key(),
        kind=balance_report(freq).kind,
        theorem=theorem_deviation(freq, model),
        theorem_prior=theorem_deviation(freq, model, target="prior"),
        lemma42=lemma42_deviation(freq),
        gamma_gap=max_gamma_gap(freq),
        y2_admissible=all(admissibility_at_y2(freq, i) for i in heads),
        fstar_dev=float(worst_dev),
        fstar_bound=float(worst_bound),
        fstar_within_bound=within,
    )


def _median(xs):
    return float(statistics.median(xs)) if xs else None


def _max(xs):
    return float(max(xs)) if xs else None


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    samples: int
    seed: int
    typical_events: int
    pass_rate: float
    theorem_median: float | None
    theorem_max: float | None
    theorem_median_path: float | None
    theorem_median_circuit: float | None
    theorem_prior_median: float | None
    lemma42_median: float | None
    lemma42_max: float | None
    gamma_gap_max: float | None
    y2_admissible_all: bool
    fstar_dev_max: float | None
    fstar_bound_at_max: float | None
    fstar_within_bound: bool


@dataclass
class ConvergenceReport:
    config: dict
    rows: list[ConvergenceRow] = field(default_factory=list)

    def row(self, n: int) -> ConvergenceRow:
        return next(r for r in self.rows if r.n == n)

    def to_dict(self) -> dict:
        return {
            "tool": "freqcond",
            "version": __version__,
            "config": self.config,
            "rows": [asdict(r) for r in self.rows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        names = list(ConvergenceRow.__dataclass_fields__)
        writer = csv.DictWriter(buf, fieldnames=names, lineterminator="\n")
        writer.writeheader()
        for r in self.rows:
            writer.writerow(asdict(r))
        return buf.getvalue()


def convergence_sweep(
    model: MarkovModel,
    n_list,
    mu: float,
    samples: int,
    seed: int,
    threads: int | None = None,
) -> ConvergenceReport:
    """Run every diagnostic on typical events for each ``n`` in ``n_list``.

    Each ``n`` samples with its own seed ``seed + index``. Events are
    evaluated in parallel and reduced in canonical key order, so the
    report is identical for any thread count.
    """
    _require_positive(model)
    threads = threads or default_threads()
    n_list = [int(n) for n in n_list]
    report = ConvergenceReport(
        config={"n_list": n_list, "mu": mu, "samples": samples, "seed": seed, "model": model.to_dict()}
    )
    for index, n in enumerate(n_list):
        row_seed = seed + index
        sample = sample_typical_events(model, TypicalityConfig(mu, n, samples, row_seed), threads)
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                diags = list(pool.map(lambda f: diagnose_event(f, model), sample.events))
        else:
            diags = [diagnose_event(f, model) for f in sample.events]
        theorem = [d.theorem for d in diags]
        gammas = [d.gamma_gap for d in diags if d.gamma_gap is not None]
        worst = max(diags, key=lambda d: d.fstar_dev, default=None)
        report.rows.append(
            ConvergenceRow(
                n=n,
                samples=samples,
                seed=row_seed,
                typical_events=len(diags),
                pass_rate=sample.pass_rate,
                theorem_median=_median(theorem),
                theorem_max=_max(theorem),
                theorem_median_path=_median([d.theorem for d in diags if d.kind == "path"]),
                theorem_median_circuit=_median([d.theorem for d in diags if d.kind == "circuit"]),
                theorem_prior_median=_median([d.theorem_prior for d in diags]),
                lemma42_median=_median([d.lemma42 for d in diags]),
                lemma42_max=_max([d.lemma42 for d in diags]),
                gamma_gap_max=_max(gammas),
                y2_admissible_all=all(d.y2_admissible for d in diags),
                fstar_dev_max=worst.fstar_dev if worst else None,
                fstar_bound_at_max=worst.fstar_bound if worst else None,
                fstar_within_bound=all(d.fstar_within_bound for d in diags),
            )
        )
    return report
