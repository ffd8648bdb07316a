"""
The log-field covariance, computed two ways
===========================================

The limiting covariance of the log-determinant field paired with test
functions phi and psi has a kernel form (a double integral against
-log|E - E'| plus a rank-one fourth-cumulant term) and a series form in
the Chebyshev pairings d_n.  Here both are evaluated and compared.
"""

import numpy as np

from logdet_lab import theory
from logdet_lab.testfn import DirichletMode, Interval, SmoothBump

I = Interval(-1.0, 1.0)
phi = SmoothBump(0.0, 0.3, I)
psi = SmoothBump(0.4, 0.3, I)
e1 = DirichletMode(1, I)

###############################################################################
# The Chebyshev pairings of a smooth bump eventually decay faster than any
# power of n.  For halfwidth 0.3 the decay only sets in past n ~ 30, which is
# why the series default keeps 512 terms.

d = phi.cos_moments(64)
for n in (2, 4, 8, 16, 32, 64):
    print(f"d_{n:<3d} = {d[n - 1]: .3e}")

###############################################################################
# Series route against kernel route, for both fields and a non-Gaussian s4.

s4 = -0.8192
for kind in ("log", "cnt"):
    spec = theory.KernelSpec(kind, s4)
    for a, b in ((phi, phi), (phi, psi), (e1, e1)):
        series = theory.V_series(kind, a, b, s4)
        kernel = theory.V_quadrature(spec, a, b)
        print(f"{kind}  V({a.name}, {b.name}) series {series:.12f}  kernel {kernel:.12f}"
              f"  rel gap {abs(series - kernel) / abs(series):.1e}")

###############################################################################
# The Chebyshev identity d_n(phi) = -n alpha_n(F_phi) ties the pairings to
# the arcsine-weighted coefficients of the log potential F_phi.

n = np.arange(1, 33)
alpha = theory.arcsine_coeff(phi.F, n)
print("max |d_n + n alpha_n| over n <= 32:", np.max(np.abs(phi.cos_moments(32) + n * alpha)))
