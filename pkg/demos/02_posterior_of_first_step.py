"""
Where did the chain start?
==========================

Given only the transition counts, every matching trajectory with the same
first state has the same probability. The posterior law of the first
transition is therefore a ratio of counts, weighted by the initial law.
"""

from fractions import Fraction

from freqcond.enumeration import enumerate_chain_strings
from freqcond.model import FrequencyMatrix
from freqcond.posterior import markov_posterior, start_law, start_law_indicator

third = Fraction(1, 3)

# %%
# Observing one (1,2) and one (2,3) pins the trajectory to 1 -> 2 -> 3.
path = FrequencyMatrix.from_pairs({(1, 2): 1, (2, 3): 1}, 3)
table = markov_posterior(path, (third,) * 3)
print("P(Y1 | E):", {i: str(p) for i, p in table.start.items()})
print("P(X1 | E):", {c: str(p) for c, p in table.entries.items() if p})

# %%
# For a closed trajectory every visited state could be the head. Head 1 of
# this event starts two strings and head 2 only one, so under a uniform
# prior the exact posterior favours state 1 two to one.
loop = FrequencyMatrix.from_pairs({(1, 1): 1, (1, 2): 1, (2, 1): 1}, 2)
prior = (Fraction(1, 2), Fraction(1, 2))
print("strings:", [s.states for s in enumerate_chain_strings(loop)])
print("exact start law:    ", {i: str(p) for i, p in start_law(loop, prior).items()})
print("indicator start law:", {i: str(p) for i, p in start_law_indicator(loop, prior).items()})

# %%
# The full table for that event.
table = markov_posterior(loop, prior)
for (i, j), p in sorted(table.entries.items()):
    if p:
        print(f"P(X1 = ({i},{j}) | E) = {p}")
