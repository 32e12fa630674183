"""Seeded Monte Carlo sampling and rejection-style conditioning.

Trajectories are drawn in fixed-size blocks. Block ``b`` gets its own
stream ``SeedSequence(seed, spawn_key=(b,))``, so the sample set depends
only on ``(seed, samples)`` and never on how many worker threads ran.
Grouping trajectories by their exact frequency matrix realizes the
conditional law given each observed event.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .model import FrequencyMatrix, MarkovModel, balance_report
from .posterior import markov_posterior

BLOCK_SIZE = 1 << 16
Z_THRESHOLD = 4.0
MIN_HITS = 500


def default_threads() -> int:
    """Worker count from ``FREQCOND_THREADS`` (default 1)."""
    value = os.environ.get("FREQCOND_THREADS", "1")
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def _cumulative(model: MarkovModel) -> tuple[np.ndarray, np.ndarray]:
    return np.cumsum(model.pi0_array), np.cumsum(model.P, axis=1)


def _draw(cum: np.ndarray, u: np.ndarray, N: int) -> np.ndarray:
    # index of the first cumulative entry exceeding u; zero-probability states are skipped
    idx = (cum <= u[:, None]).sum(axis=1)
    return np.minimum(idx, N - 1)


def _sample_block(model: MarkovModel, n: int, size: int, seed: int, block: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))
    cum0, cumP = _cumulative(model)
    N = model.N
    u = rng.random((size, n + 1))
    out = np.empty((size, n + 1), dtype=np.int16)
    out[:, 0] = _draw(np.broadcast_to(cum0, (size, N)), u[:, 0], N)
    for t in range(n):
        out[:, t + 1] = _draw(cumP[out[:, t]], u[:, t + 1], N)
    return out


def sample_trajectory(model: MarkovModel, n: int, rng: np.random.Generator) -> tuple[int, ...]:
    """One trajectory ``y_1 .. y_{n+1}`` (1-based labels) from ``rng``."""
    N = model.N
    y = [int(rng.choice(N, p=model.pi0_array))]
    for _ in range(n):
        y.append(int(rng.choice(N, p=model.P[y[-1]])))
    return tuple(s + 1 for s in y)


def sample_trajectories(
    model: MarkovModel, n: int, samples: int, seed: int, threads: int | None = None
) -> np.ndarray:
    """``(samples, n + 1)`` array of 0-based states, reproducible from ``seed``."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    threads = threads or default_threads()
    sizes = [min(BLOCK_SIZE, samples - start) for start in range(0, samples, BLOCK_SIZE)]

    def work(b):
        return _sample_block(model, n, sizes[b], seed, b)

    if threads == 1 or len(sizes) == 1:
        blocks = [work(b) for b in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(work, range(len(sizes))))
    return np.concatenate(blocks, axis=0)


def transition_counts(trajs: np.ndarray, N: int) -> np.ndarray:
    """``(samples, N * N)`` row-major transition counts of 0-based trajectories."""
    S = trajs.shape[0]
    pair = trajs[:, :-1].astype(np.int64) * N + trajs[:, 1:]
    flat = pair + (np.arange(S, dtype=np.int64) * N * N)[:, None]
    return np.bincount(flat.ravel(), minlength=S * N * N).reshape(S, N * N)


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo estimate of the first-transition law within one event."""

    key: str
    freq: FrequencyMatrix
    hits: int
    counts: dict[tuple[int, int], int]
    seed: int

    @property
    def estimates(self) -> dict[tuple[int, int], float]:
        return {c: k / self.hits for c, k in self.counts.items()}

    @property
    def stderr(self) -> dict[tuple[int, int], float]:
        return {c: math.sqrt(p * (1 - p) / self.hits) for c, p in self.estimates.items()}


def mc_conditional_x1(
    model: MarkovModel, n: int, samples: int, seed: int, threads: int | None = None
) -> list[McEstimate]:
    """Sample trajectories, group them by frequency event, tally first transitions.

    Returns one estimate per observed event, sorted by canonical event key.
    """
    N = model.N
    trajs = sample_trajectories(model, n, samples, seed, threads)
    counts = transition_counts(trajs, N)
    first = trajs[:, 0].astype(np.int64) * N + trajs[:, 1]
    keys, inverse = np.unique(counts, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    G = keys.shape[0]
    tally = np.bincount(inverse * N * N + first, minlength=G * N * N).reshape(G, N * N)
    out = []
    for g in range(G):
        freq = FrequencyMatrix(keys[g].reshape(N, N).tolist())
        cells = {(a // N + 1, a % N + 1): int(tally[g, a]) for a in range(N * N)}
        out.append(McEstimate(freq.key(), freq, int(tally[g].sum()), cells, seed))
    out.sort(key=lambda e: e.key)
    return out


def _z(p_hat: float, p: float, hits: int) -> float:
    se = math.sqrt(p_hat * (1 - p_hat) / hits)
    if se == 0.0:
        # Wald error vanishes at 0 or 1; fall back to the exact-law standard error
        se = math.sqrt(p * (1 - p) / hits)
    if se == 0.0:
        return 0.0 if abs(p_hat - p) < 1e-12 else math.copysign(1e9, p_hat - p)
    return (p_hat - p) / se


def verify_exact_vs_mc(
    model: MarkovModel,
    n: int,
    samples: int,
    seed: int,
    min_hits: int = MIN_HITS,
    z_threshold: float = Z_THRESHOLD,
    threads: int | None = None,
) -> dict:
    """Compare Monte Carlo conditional frequencies with the exact posterior.

    Every event with at least ``min_hits`` trajectories is checked on each
    cell ``(i, j)`` with ``nu_ij >= 1`` (the only cells the posterior can
    charge). The report is a plain dict ready for JSON.
    """
    estimates = mc_conditional_x1(model, n, samples, seed, threads)
    events = []
    n_cells = n_pass = 0
    for est in estimates:
        if est.hits < min_hits:
            continue
        table = markov_posterior(est.freq, model.pi0)
        cells = []
        for (i, j), k in sorted(est.counts.items()):
            if est.freq.count(i, j) < 1:
                continue
            p_hat = k / est.hits
            p = float(table[(i, j)])
            z = _z(p_hat, p, est.hits)
            ok = abs(z) <= z_threshold
            n_cells += 1
            n_pass += ok
            cells.append({"i": i, "j": j, "mc": p_hat, "exact": p, "z": z, "pass": ok})
        events.append({"key": est.key, "hits": est.hits, "cells": cells})
    summary = {
        "events_observed": len(estimates),
        "events_checked": len(events),
        "cells_checked": n_cells,
        "cells_passed": n_pass,
        "pass_fraction": (n_pass / n_cells) if n_cells else None,
        "status": "ok" if events else "no qualifying events",
        "group_sizes_sum": sum(e.hits for e in estimates),
    }
    return {
        "config": {
            "n": n,
            "samples": samples,
            "seed": seed,
            "min_hits": min_hits,
            "z_threshold": z_threshold,
            "block_size": BLOCK_SIZE,
            "model": model.to_dict(),
        },
        "events": events,
        "summary": summary,
    }


def all_events_feasible(estimates: list[McEstimate]) -> bool:
    return all(balance_report(e.freq).feasible for e in estimates)
