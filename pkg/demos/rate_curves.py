"""
Worst-case rates across the three stepsize regimes
==================================================

With relative gradient error ``delta``, the one-step rate has a different
closed form to the left of ``h_LI``, between ``h_LI`` and ``h_IR``, and to the
right of ``h_IR``. We tabulate it and locate the minimum.
"""

import numpy as np

from inexact_gd import rates

for delta in (0.0, 0.1, 0.5, 0.8):
    lo, hi, hm = rates.regime_boundaries(delta)
    print(f"delta = {delta}:  h_LI = {lo:.4f}  h_IR = {hi:.4f}  h_max = {hm:.4f}")

###############################################################################
# A coarse look at the rate towards f* as a function of h. The curve falls
# like 1/h on the left, rises like 2(1 - h(1+delta))^2 on the right, and the
# minimum sits in the narrow middle band.

delta = 0.5
hs = np.linspace(0.05, rates.h_max(delta) * 0.999, 12)
for h, c in zip(hs, rates.rate_one_step_to_fstar(hs, delta)):
    print(f"  h = {h:.3f}  {rates.classify_regime(h, delta).value:>12}  C~ = {c:.4f}")

###############################################################################
# After N steps the bound is 1/(N/C + 1/2), with C the one-step rate relative
# to f(x0) - f(x1). It decreases like 1/N in every regime.

h = 1.0
for N in (1, 2, 5, 10, 50):
    print(f"  N = {N:>2}  upper = {rates.rate_N_steps(h, delta, N):.5f}  lower = {rates.lower_bound_N(h, delta, N):.5f}")

###############################################################################
# Optionally draw the curves if matplotlib is around.

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots()
    for delta in (0.0, 0.1, 0.5, 0.8):
        hs = np.linspace(0.02, rates.h_max(delta), 500)
        ax.plot(hs, rates.rate_one_step_to_fstar(hs, delta), label=f"delta={delta}")
    ax.set_xlabel("h")
    ax.set_ylabel("one-step rate")
    ax.set_ylim(0, 3)
    ax.legend()
    fig.savefig("rate_curves.png", dpi=120)
    print("wrote rate_curves.png")
