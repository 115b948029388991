"""
Worst cases in one and two dimensions
=====================================

At the best stepsize no univariate function reaches the middle-regime rate:
the worst direction error has to be rotated off the gradient. A random
multi-start search with local refinement finds it in two dimensions.
"""

from inexact_gd import pep_search, rates

delta = 0.5
h, _ = rates.optimal_stepsize(delta, 1)
C = rates.rate_one_step_to_fstar(h, delta)
(c1, v1), (c2, v2) = pep_search.compare_1d_2d(h, delta, budget=5000, seed=0)
print(f"h = {h:.4f}, proven rate {C:.6f}")
print(f"  1D worst case found: {v1:.6f}  ({v1 / C:.4f} of the rate)")
print(f"  2D worst case found: {v2:.6f}  ({v2 / C:.4f} of the rate)")

###############################################################################
# The error of the worst direction is orthogonal to the direction itself, so
# its cosine with the gradient is -delta.

print(pep_search.orthogonality_diagnostic(c2))
print(c2.to_json(indent=1)[:400], "...")
