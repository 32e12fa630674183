"""
Checking exact posteriors by simulation
=======================================

Sample many short trajectories, group them by their exact transition
counts, and compare the empirical first-transition frequencies in each
group with the exact posterior. With 4 standard errors as the threshold
almost every cell should agree.
"""

from freqcond.model import MarkovModel
from freqcond.simulate import verify_exact_vs_mc

model = MarkovModel([[0.5, 0.3, 0.2], [0.2, 0.6, 0.2], [0.3, 0.3, 0.4]], [0.5, 0.3, 0.2])

# %%
# 200k trajectories of 5 steps; events seen at least 500 times are checked.
report = verify_exact_vs_mc(model, n=5, samples=200_000, seed=7)
print(report["summary"])

# %%
# The worst cell.
worst = max((c for e in report["events"] for c in e["cells"]), key=lambda c: abs(c["z"]))
print(f"largest |z| = {abs(worst['z']):.2f} at ({worst['i']},{worst['j']}): mc {worst['mc']:.4f} exact {worst['exact']:.4f}")
