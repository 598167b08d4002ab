"""Independent high-precision Mittag-Leffler values for the tests.

Small arguments use the power series at a working precision large enough to
absorb its cancellation. Large arguments use the real integral

.. math::

    E_{\\alpha,\\beta}(-x) = \\frac{1}{\\pi}\\int_0^\\infty e^{-r} r^{\\alpha-\\beta}
        \\frac{r^\\alpha \\sin(\\pi\\beta) - x \\sin(\\pi(\\alpha-\\beta))}
             {r^{2\\alpha} + 2 x r^\\alpha \\cos(\\pi\\alpha) + x^2} \\,dr,

valid for :math:`\\beta < 1 + \\alpha`, followed by the upward recurrence
:math:`E_{\\alpha,\\beta+\\alpha}(z) = (E_{\\alpha,\\beta}(z) - 1/\\Gamma(\\beta))/z`.
None of this shares code with the library.
"""

from __future__ import annotations

import math

import mpmath as mp


def _series(a: float, b: float, x: float) -> float:
    dps = int((x ** (1.0 / a)) / math.log(10.0) + 40) if x > 0 else 40
    with mp.workdps(dps):
        aa, bb, z = mp.mpf(a), mp.mpf(b), -mp.mpf(x)
        total = mp.mpf(0)
        tol = mp.mpf(10) ** (-dps)
        n = 0
        while True:
            term = z**n * mp.rgamma(aa * n + bb)
            total += term
            if n > 5 and abs(term) < tol:
                break
            n += 1
        return float(total)


def _integral(a: float, b: float, x: float, dps: int = 80):
    with mp.workdps(dps):
        a, b, x = mp.mpf(a), mp.mpf(b), mp.mpf(x)
        g = 1 + a - b
        c = mp.cos(mp.pi * a)
        sb = mp.sin(mp.pi * b)
        sab = mp.sin(mp.pi * (a - b))

        # substitute r = u**(1/g) to remove the r**(a - b) endpoint singularity
        def integrand(u):
            r = u ** (1 / g)
            ra = r**a
            return mp.exp(-r) * (ra * sb - x * sab) / (ra * ra + 2 * x * ra * c + x * x) / g

        pts = [mp.mpf(0)]
        if c < 0:
            # near-singular peak of the denominator
            peak = (-x * c) ** (1 / a)
            width = (x * mp.sin(mp.pi * a)) ** (1 / a)
            pts += [peak / 4, max(peak - width, peak / 2), peak, peak + width, 2 * peak]
        pts += [pts[-1] + 1, pts[-1] + 50, pts[-1] + 150]
        pts = [p**g for p in sorted(set(pts))]
        return mp.quad(integrand, pts) / mp.pi


def ml_truth(a: float, b: float, x: float) -> float:
    """:math:`E_{a,b}(-x)` for ``x >= 0`` to (nearly) full double precision."""
    if x == 0:
        return float(mp.rgamma(b))
    if a == 1:
        with mp.workdps(40):
            return float(mp.hyp1f1(1, b, -x) * mp.rgamma(b))
    if x ** (1.0 / a) < 300:
        return _series(a, b, x)

    m, steps = b, 0
    while m >= 1 + a:
        m -= a
        steps += 1
    with mp.workdps(80):
        v = _integral(a, m, x)
        for _ in range(steps):
            v = (v - mp.rgamma(m)) / (-mp.mpf(x))
            m += a
    return float(v)
