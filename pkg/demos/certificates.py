"""
Checking the dual certificates
==============================

Each one-step rate is proved by adding two interpolation inequalities and the
inexactness inequality with weights ``lam + 1``, ``lam`` and ``b``. The
resulting 3x3 matrix must be positive semidefinite; it splits into a 2x2
block ``A1`` plus a rank-one term.
"""

import numpy as np

from inexact_gd import certificate, rates

delta = 0.5
lo, hi, hm = rates.regime_boundaries(delta)

for h in (0.5, 0.5 * (lo + hi), 1.25):
    rep = certificate.verify_certificate(h, delta)
    c = rep.certificate
    print(f"h = {h:.4f} ({c.regime.value}): lam = {c.lam:.4f}, b = {c.b:.4f}, rho = {c.rho:.4f}")
    print(f"   min eig A1 = {rep.min_eig_A1:.2e}, 1/rho - C = {rep.rate_gap:.1e}, passed = {rep.passed}")

###############################################################################
# In the middle regime the multiplier is the largest root of a cubic, and the
# 2x2 block vanishes entirely: the certificate is tight there.

h = 0.5 * (lo + hi)
m = certificate.build_proof_matrices(h, delta, certificate.certificate_params(h, delta))
print(np.array_str(m.A1, precision=3, suppress_small=True))

###############################################################################
# A wrong multiplier breaks positive semidefiniteness.

from dataclasses import replace

bad = replace(certificate.certificate_params(1.0, delta), rho=0.6)
print(certificate.verify_certificate(1.0, delta, bad).failures)
