"""
Choosing the stepsize
=====================

The N-step bound is 1/(N/C + 1/2), a decreasing function of the one-step rate
C, so the minimizing stepsize does not depend on N. The right end of the
middle regime is a closed-form choice that is almost as good.
"""

from inexact_gd import rates

print(" delta   h_opt    h_IR   rate(h_IR)/rate(h_opt), N = 20")
for delta in (0.1, 0.2, 0.4, 0.6, 0.8, 0.9):
    h_opt, best = rates.optimal_stepsize(delta, 20)
    h_ir = rates.approx_optimal_stepsize(delta)
    print(f"  {delta:.1f}   {h_opt:.4f}  {h_ir:.4f}   {rates.rate_N_steps(h_ir, delta, 20) / best:.4f}")

###############################################################################
# The largest stepsize with any guarantee, against an earlier sufficient bound.

for delta in (0.1, 0.5, 0.8, 0.95):
    ours, prior, ratio = rates.compare_h_max(delta)
    print(f"  delta = {delta}: 2/(1+delta) = {ours:.4f}, earlier = {prior:.4f}, ratio {ratio:.1f}")
