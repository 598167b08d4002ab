"""Evaluate E_{alpha,mu}(-x) across the three evaluation regimes.

The double-precision evaluator switches between a power series, a contour
integral and an asymptotic expansion. This script prints the regime chosen
for a sweep of arguments and compares the result with the arbitrary-precision
series, where that series is affordable.

Run with ``python demos/mittag_leffler_regimes.py``.
"""

from __future__ import annotations

import math

import numpy as np

from fraclange import MLQuery, ml, ml_reference

alpha, mu = 0.6, 1.0

print(f"E_{{{alpha},{mu}}}(-x)")
print(f"{'x':>10} {'value':>24} {'regime':>11} {'reference error':>16}")
for x in np.geomspace(1e-2, 1e4, 13):
    r = ml(MLQuery(alpha, mu, -x))
    # the series needs about x^(1/alpha)/alpha extra digits to converge
    digits = int(x ** (1 / alpha) / alpha) + 30
    if digits <= 200:
        err = f"{abs(r.value - ml_reference(MLQuery(alpha, mu, -x), digits)):.2e}"
    else:
        err = "-"
    print(f"{x:10.3g} {r.value:24.17g} {r.regime.value:>11} {err:>16}")

# the large-argument behaviour is x^-1 / Gamma(mu - alpha)
x = 1e4
print()
print("leading asymptotic term at x = 1e4:", 1 / (x * math.gamma(mu - alpha)))
