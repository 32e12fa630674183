"""
Counting trajectories behind a frequency matrix
===============================================

A trajectory of a Markov chain can be summarized by how often each
transition ``i -> j`` occurred. Many trajectories share the same summary.
This script counts them two ways: by brute-force listing and by Whittle's
cofactor formula, which stays exact for very long trajectories.
"""

from freqcond.enumeration import enumerate_chain_strings
from freqcond.model import FrequencyMatrix, balance_report, frequency_of_trajectory
from freqcond.whittle import first_transition_breakdown, whittle_breakdown, whittle_count

# %%
# The trajectory 1 -> 2 -> 1 -> 3 uses each of (1,2), (2,1), (1,3) once.
freq = frequency_of_trajectory([1, 2, 1, 3])
print(freq)
print(balance_report(freq))

# %%
# Only one ordering of those three transitions chains together.
for s in enumerate_chain_strings(freq):
    print("string:", s.states)

# %%
# Whittle's formula gives the same count as a multinomial times a cofactor.
b = whittle_breakdown(freq, 1, 3)
print(f"N_13 = {b.multinomial} * {b.cofactor} = {b.count}")

# %%
# Strings that begin with a given first transition, computed by dropping
# that transition and recounting, and by the closed-form cofactor ratio.
for j in (2, 3):
    fc = first_transition_breakdown(freq, 1, j)
    print(f"first pair (1,{j}): decrement route {fc.by_decrement}, closed form {fc.by_closed_form}")

# %%
# Closed trajectories: a self-loop plus a 2-cycle. Heads 1 and 2 are both
# possible but start different numbers of strings.
loop = FrequencyMatrix.from_pairs({(1, 1): 1, (1, 2): 1, (2, 1): 1}, 2)
for u in (1, 2):
    print(f"strings with head {u}:", [s.states for s in enumerate_chain_strings(loop, head=u)])

# %%
# At n = 1800 enumeration is hopeless, but the count is still an exact integer.
big = FrequencyMatrix([[300, 200, 100], [150, 400, 150], [150, 100, 250]])
count = whittle_count(big, 1, 1)
print(f"closed strings with head 1: an integer with {len(str(count))} digits")
