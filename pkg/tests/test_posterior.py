import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from _oracles import bayes_first_transition, random_rational_model
from conftest import trajectories
from freqcond.enumeration import enumerate_chain_strings
from freqcond.exceptions import InvalidInputError, NullConditioningError
from freqcond.model import FrequencyMatrix, frequency_of_trajectory
from freqcond.posterior import (
    BRUTE,
    admissible_at_y2,
    iid_pair_posterior,
    iid_posterior,
    markov_posterior,
    markov_posterior_given_start,
    start_law,
    start_law_indicator,
    start_posterior,
)

F = Fraction
U3 = (F(1, 3),) * 3
RETURN13 = FrequencyMatrix.from_pairs({(1, 2): 1, (2, 1): 1, (1, 3): 1}, 3)
CHAIN123 = FrequencyMatrix.from_pairs({(1, 2): 1, (2, 3): 1}, 3)
LOOP = FrequencyMatrix.from_pairs({(1, 2): 1, (2, 1): 1}, 2)
LOOP3 = FrequencyMatrix.from_pairs({(1, 1): 1, (1, 2): 1, (2, 1): 1}, 2)


class TestIid:
    def test_examples(self):
        assert iid_posterior({1: 2, 2: 1}, 1) == F(2, 3)
        assert iid_posterior({1: 2, 2: 1}, 7) == 0

    def test_pairs(self):
        c = {1: 2, 2: 1}
        assert iid_pair_posterior(c, 1, 2) == F(1, 3)
        assert iid_pair_posterior(c, 1, 1) == F(1, 3)
        assert iid_pair_posterior(c, 2, 2) == 0
        assert iid_pair_posterior({5: 4}, 5, 5) == 1

    def test_pair_table_sums_to_one(self):
        c = {"a": 3, "b": 2, "c": 1}
        assert sum(iid_pair_posterior(c, x, y) for x in c for y in c) == 1

    def test_errors(self):
        with pytest.raises(InvalidInputError):
            iid_posterior({1: 0}, 1)
        with pytest.raises(InvalidInputError):
            iid_pair_posterior({1: 1}, 1, 1)


class TestGivenStart:
    def test_examples(self):
        assert markov_posterior_given_start(RETURN13, 1, 2) == 1
        assert markov_posterior_given_start(RETURN13, 2, 1) == 0
        assert markov_posterior_given_start(LOOP3, 1, 1) == F(1, 2)

    def test_rows_sum_to_one_on_admissible_heads(self):
        for f in (RETURN13, CHAIN123, LOOP, LOOP3):
            for i in range(1, f.N + 1):
                total = sum(markov_posterior_given_start(f, i, j) for j in range(1, f.N + 1))
                heads = {s.head for s in enumerate_chain_strings(f)}
                assert total == (1 if i in heads else 0)

    def test_y2_admissibility(self):
        assert admissible_at_y2(CHAIN123, 1, 2) and not admissible_at_y2(CHAIN123, 1, 3)


class TestStart:
    def test_forced_path(self):
        assert start_posterior(CHAIN123, U3, 1) == 1
        assert start_posterior(CHAIN123, U3, 2) == start_posterior(CHAIN123, U3, 3) == 0

    def test_symmetric_circuit(self):
        assert start_posterior(LOOP, (0.3, 0.7), 1) == pytest.approx(0.3)

    def test_circuit_heads_weighted_by_string_count(self):
        # head 1 starts two strings, head 2 one; uniform prior gives 2/3 vs 1/3
        law = start_law(LOOP3, (F(1, 2), F(1, 2)))
        assert law == {1: F(2, 3), 2: F(1, 3)}
        assert start_law_indicator(LOOP3, (F(1, 2), F(1, 2))) == {1: F(1, 2), 2: F(1, 2)}
        bayes = bayes_first_transition([[F(1, 2)] * 2] * 2, [F(1, 2)] * 2, 3)[LOOP3.nu]
        assert bayes[(1, 1)] + bayes[(1, 2)] == F(2, 3)

    def test_null_prior(self):
        with pytest.raises(NullConditioningError):
            start_law(CHAIN123, (0, F(1, 2), F(1, 2)))

    def test_infeasible_event_names_balance(self):
        with pytest.raises(NullConditioningError, match="flow balance"):
            start_law(FrequencyMatrix.from_pairs({(1, 2): 2}, 2), (F(1, 2), F(1, 2)))

    def test_disconnected_event(self):
        f = FrequencyMatrix.from_pairs({(1, 1): 1, (2, 2): 1}, 2)
        with pytest.raises(NullConditioningError, match="disconnected"):
            markov_posterior(f, (F(1, 2), F(1, 2)))

    def test_float_prior_at_large_n(self):
        f = FrequencyMatrix([[300, 200, 100], [150, 400, 150], [150, 100, 250]])
        law = start_law(f, (0.5, 0.3, 0.2))
        assert sum(law.values()) == pytest.approx(1)
        assert all(isinstance(x, float) for x in law.values())


class TestMarkovPosterior:
    def test_path(self):
        t = markov_posterior(CHAIN123, U3)
        assert t[(1, 2)] == 1 and t.total() == 1
        assert t.exact

    def test_circuit(self):
        t = markov_posterior(LOOP, (F(1, 2), F(1, 2)))
        assert t[(1, 2)] == t[(2, 1)] == F(1, 2)

    def test_forced_head(self):
        t = markov_posterior(LOOP3, (1, 0))
        assert (t[(1, 1)], t[(1, 2)], t[(2, 1)]) == (F(1, 2), F(1, 2), 0)

    def test_methods_agree(self):
        for f in (RETURN13, CHAIN123, LOOP, LOOP3):
            pi0 = tuple(F(1, f.N) for _ in range(f.N))
            assert markov_posterior(f, pi0).entries == markov_posterior(f, pi0, method=BRUTE).entries

    def test_serialization(self):
        d = markov_posterior(LOOP, (F(1, 2), F(1, 2))).to_dict()
        cells = {(c["i"], c["j"]): c["exact"] for c in d["entries"]}
        assert cells[(1, 2)] == "1/2"

    def test_prior_length_checked(self):
        with pytest.raises(InvalidInputError):
            markov_posterior(CHAIN123, (1,))

    @given(st.integers(0, 2**32 - 1), trajectories(max_N=3, max_n=5))
    def test_equals_exact_bayes(self, seed, case):
        N, traj = case
        P, pi0 = random_rational_model(random.Random(seed), N)
        f = frequency_of_trajectory(traj, N)
        bayes = bayes_first_transition(P, pi0, len(traj) - 1)[f.nu]
        t = markov_posterior(f, pi0)
        for i, j in itertools.product(range(1, N + 1), repeat=2):
            assert t[(i, j)] == bayes.get((i, j), 0)
        assert t.total() == 1
        assert all(f.count(i, j) >= 1 for (i, j), p in t.entries.items() if p)

    @given(st.integers(0, 2**32 - 1), trajectories(max_N=3, max_n=5))
    def test_weights_constant_within_head(self, seed, case):
        N, traj = case
        P, pi0 = random_rational_model(random.Random(seed), N)
        f = frequency_of_trajectory(traj, N)
        by_head = {}
        for s in enumerate_chain_strings(f):
            w = pi0[s.head - 1]
            for a, b in s.pairs:
                w *= P[a - 1][b - 1]
            by_head.setdefault(s.head, set()).add(w)
        assert all(len(ws) == 1 for ws in by_head.values())
