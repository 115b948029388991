"""
Functions that attain the rates
===============================

A Huber function with the shortened direction ``(1 - delta) g`` attains the
left-regime rate for any number of steps. A quadratic with the lengthened
direction ``(1 + delta) g`` attains the right-regime rate after one step.
"""

from inexact_gd import rates, simulator
from inexact_gd.instances import make_huber, make_quadratic, oracle_scaled

delta, h, N = 0.3, 0.75, 20
trace = simulator.run(make_huber(delta, h, N), oracle_scaled(1 - delta, delta), h, delta, N)
m = simulator.metrics(trace)
print(f"Huber:     min_k |g_k|^2 / (f0 - f*) = {m['ratio_min']:.6f}, bound = {rates.rate_N_steps(h, delta, N):.6f}")

delta, h = 0.5, 1.25
trace = simulator.run(make_quadratic(), oracle_scaled(1 + delta, delta), h, delta, 1)
m = simulator.metrics(trace)
print(f"quadratic: |g_1|^2 / (f0 - f*)       = {m['ratio_last']:.6f}, bound = {rates.rate_one_step_to_fstar(h, delta):.6f}")

###############################################################################
# Past 2/(1+delta) the same quadratic blows up: every step multiplies the
# gradient norm by |1 - h(1+delta)| > 1.

p = simulator.divergence_probe(0.5, 1.1 * rates.h_max(0.5), N=10)
print("gradient norms:", " ".join(f"{g:.3g}" for g in p["grad_norms"]))
