"""
Exchangeability in the i.i.d. case
==================================

For independent draws, knowing only the value counts makes every
arrangement equally likely, so each position sees value ``m`` with
probability ``nu_m / n``. Two positions see ``(m1, m2)`` with probability
``nu_m1 (nu_m2 - [m1 = m2]) / (n (n - 1))``.
"""

from freqcond.enumeration import iid_conditional_brute, iid_pair_conditional_brute, multiset_permutations
from freqcond.posterior import iid_pair_posterior, iid_posterior

counts = {"a": 2, "b": 1}

# %%
# The three equally likely arrangements.
for seq in multiset_permutations(counts):
    print("".join(seq))

# %%
# Every position has the same marginal.
for ell in (1, 2, 3):
    print(f"P(X_{ell} = a) = {iid_conditional_brute(counts, ell, 'a')}   formula: {iid_posterior(counts, 'a')}")

# %%
# Pairs, including equal values, against enumeration at positions 1 and 3.
for m1 in counts:
    for m2 in counts:
        print(m1, m2, iid_pair_posterior(counts, m1, m2), iid_pair_conditional_brute(counts, 1, 3, m1, m2))
