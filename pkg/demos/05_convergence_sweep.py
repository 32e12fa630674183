"""
Posterior versus prior on typical events
========================================

For long trajectories whose transition frequencies are close to their
stationary values, the posterior of the first transition should approach
``P(Y_1 = i | E) p_ij``. The sweep measures that gap together with each
of its ingredients.
"""

from freqcond.asymptotics import convergence_sweep
from freqcond.model import MarkovModel

model = MarkovModel([[0.5, 0.3, 0.2], [0.2, 0.6, 0.2], [0.3, 0.3, 0.4]], [0.5, 0.3, 0.2])

# %%
# A small sweep; the acceptance suite uses 20000 samples per n.
report = convergence_sweep(model, [50, 200, 800], mu=0.02, samples=3000, seed=1)
print(report.to_csv())

# %%
# Path events (head fixed) shrink toward the target; closed ones keep a gap
# because their heads are weighted by string counts, not by indicators.
for row in report.rows:
    print(row.n, "paths", row.theorem_median_path, "circuits", row.theorem_median_circuit)
