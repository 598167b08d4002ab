r"""
Scalar Cauchy problem

.. math::

    D^\beta (D^\alpha y) + \lambda D^\beta y = f, \qquad
    y(+0) = \varphi, \quad D^\alpha y(+0) = \psi,

with Caputo derivatives of orders :math:`\alpha, \beta \in (0, 1)` and a
forcing that is a finite sum of monomials :math:`c\,t^p`.

The closed form is

.. math::

    y(t) = \varphi E_{\alpha,1}(-\lambda t^\alpha)
         + (\psi + \lambda\varphi) t^\alpha E_{\alpha,\alpha+1}(-\lambda t^\alpha)
         + \int_0^t (t-\eta)^{\alpha+\beta-1}
           E_{\alpha,\alpha+\beta}(-\lambda(t-\eta)^\alpha) f(\eta)\,\mathrm{d}\eta,

where each monomial is convolved exactly through

.. math::

    \int_0^t (t-\eta)^{\mu-1} E_{\alpha,\mu}(-\lambda (t-\eta)^\alpha)
        \eta^p \,\mathrm{d}\eta
    = \Gamma(p+1)\, t^{\mu+p} E_{\alpha,\mu+p+1}(-\lambda t^\alpha).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .exceptions import DomainError
from .fracops import (
    GridFunction,
    TimeGrid,
    _powdiff,
    caputo_l1,
    product_weights,
    rl_integral_matrix,
)
from .special import mittag_leffler

__all__ = [
    "Forcing",
    "ForcingTerm",
    "FractionalOrders",
    "PICARD_MAX_TERM",
    "PICARD_STABILITY_LIMIT",
    "ScalarProblem",
    "dalpha_closed_form",
    "monomial_convolution",
    "picard_iterations",
    "picard_peak_term",
    "picard_solve",
    "quadrature_convolve",
    "residual",
    "solve_closed_form",
]

#: oracle use of the Picard iteration requires lambda * T**alpha <= this
PICARD_STABILITY_LIMIT = 5.0
#: ... and the largest term x**k / Gamma(alpha k + 1), x = lambda T**alpha, below this
PICARD_MAX_TERM = 1.0e6


# {{{ domain types


@dataclass(frozen=True)
class FractionalOrders:
    alpha: float
    beta: float
    T: float = 1.0

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha < 1.0):
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if not (0.0 < self.beta < 1.0):
            raise DomainError(f"beta must lie in (0, 1), got {self.beta!r}")
        if not (math.isfinite(self.T) and self.T > 0.0):
            raise DomainError(f"horizon T must be positive, got {self.T!r}")


@dataclass(frozen=True)
class ForcingTerm:
    """The monomial :math:`c\\,t^p`."""

    c: float
    p: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.c) and math.isfinite(self.p)):
            raise DomainError("forcing coefficients must be finite")
        if self.p < 0:
            raise DomainError(f"forcing exponents must be >= 0, got {self.p!r}")


@dataclass(frozen=True)
class Forcing:
    """Finite sum of monomials :math:`f(t) = \\sum_j c_j t^{p_j}`."""

    terms: tuple[ForcingTerm, ...] = ()

    def __post_init__(self) -> None:
        terms = tuple(self.terms)
        exponents = [term.p for term in terms]
        if len(set(exponents)) != len(exponents):
            raise DomainError("forcing exponents must be distinct")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> Forcing:
        return cls(tuple(ForcingTerm(float(c), float(p)) for c, p in pairs))

    @property
    def is_zero(self) -> bool:
        return all(term.c == 0.0 for term in self.terms)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for term in self.terms:
            out = out + term.c * t**term.p
        return out

    def __mul__(self, scalar: float) -> Forcing:
        return Forcing(tuple(ForcingTerm(scalar * u.c, u.p) for u in self.terms))

    __rmul__ = __mul__

    def __add__(self, other: Forcing) -> Forcing:
        merged: dict[float, float] = {}
        for term in (*self.terms, *other.terms):
            merged[term.p] = merged.get(term.p, 0.0) + term.c
        return Forcing(tuple(ForcingTerm(c, p) for p, c in sorted(merged.items())))

    def max_abs(self, T: float, samples: int = 4097) -> float:
        """:math:`\\max_{[0, T]} |f|`, sampled on a dense uniform grid."""
        if self.is_zero:
            return 0.0
        t = np.linspace(0.0, T, samples)
        return float(np.max(np.abs(self(t))))

    def rl_integral(self, sigma: float, t):
        """Exact :math:`I^\\sigma f` by the power rule."""
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for term in self.terms:
            coeff = math.exp(math.lgamma(term.p + 1) - math.lgamma(term.p + 1 + sigma))
            out = out + term.c * coeff * t ** (term.p + sigma)
        return out


@dataclass(frozen=True)
class ScalarProblem:
    orders: FractionalOrders
    lam: float
    phi: float
    psi: float
    forcing: Forcing = field(default_factory=Forcing)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lam) and self.lam >= 0.0):
            raise DomainError(f"lambda must be a finite number >= 0, got {self.lam!r}")
        if not (math.isfinite(self.phi) and math.isfinite(self.psi)):
            raise DomainError("initial data must be finite")

    @property
    def alpha(self) -> float:
        return self.orders.alpha

    @property
    def beta(self) -> float:
        return self.orders.beta

    @property
    def T(self) -> float:
        return self.orders.T

    @property
    def picard_parameter(self) -> float:
        return self.lam * self.T**self.alpha


# }}}


# {{{ closed forms


def _check_times(p: ScalarProblem, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(t)) or np.any(t < 0.0) or np.any(t > p.T):
        raise DomainError(f"t must lie in [0, T] = [0, {p.T}]")
    return t


def monomial_convolution(alpha: float, mu: float, lam: float, pexp: float, t):
    """Closed form of :math:`\\int_0^t (t-\\eta)^{\\mu-1}E_{\\alpha,\\mu}(-\\lambda(t-\\eta)^\\alpha)\\eta^p d\\eta`."""
    t = np.asarray(t, dtype=float)
    E = mittag_leffler(alpha, mu + pexp + 1.0, -lam * t**alpha)
    return math.gamma(pexp + 1.0) * t ** (mu + pexp) * E


def _forcing_convolution(p: ScalarProblem, mu: float, t: np.ndarray):
    out = np.zeros_like(t)
    for term in p.forcing.terms:
        if term.c != 0.0:
            out = out + term.c * monomial_convolution(p.alpha, mu, p.lam, term.p, t)
    return out


def solve_closed_form(p: ScalarProblem, t):
    r"""Closed-form solution :math:`y(t)`; accepts scalar or array *t*.

    :math:`\varphi E_{\alpha,1}(z) + (\psi + \lambda\varphi) t^\alpha E_{\alpha,\alpha+1}(z)`
    with :math:`z = -\lambda t^\alpha` is evaluated as
    :math:`\varphi + \psi t^\alpha E_{\alpha,\alpha+1}(z)`, using
    :math:`E_{\alpha,1}(z) = 1 + z E_{\alpha,\alpha+1}(z)`. The two are equal,
    but the second has no cancellation and keeps :math:`y \equiv \varphi`
    exact when :math:`\psi = 0` and :math:`f = 0`.
    """
    t = _check_times(p, t)
    a = p.alpha
    z = -p.lam * t**a

    y = p.phi + p.psi * t**a * mittag_leffler(a, a + 1.0, z)
    y = y + _forcing_convolution(p, a + p.beta, t)

    return float(y) if np.ndim(y) == 0 else y


def dalpha_closed_form(p: ScalarProblem, t):
    r"""Closed form of :math:`D^\alpha y(t) = \psi E_{\alpha,1}(-\lambda t^\alpha)
    + \int_0^t f(\eta)(t-\eta)^{\beta-1}E_{\alpha,\beta}(-\lambda(t-\eta)^\alpha)\,d\eta`.
    """
    t = _check_times(p, t)
    z = -p.lam * t**p.alpha

    d = p.psi * mittag_leffler(p.alpha, 1.0, z)
    d = d + _forcing_convolution(p, p.beta, t)

    return float(d) if np.ndim(d) == 0 else d


# }}}


# {{{ quadrature


def quadrature_convolve(
    alpha: float, mu: float, lam: float, f: GridFunction, index: int
) -> float:
    r"""Product integration of :math:`\int_0^{t_n} k(t_n - \eta) f(\eta)\,d\eta`
    with :math:`k(w) = w^{\mu-1} E_{\alpha,\mu}(-\lambda w^\alpha)`.

    *f* is interpolated piecewise linearly and the kernel moments are exact:
    :math:`\int_0^w k = w^\mu E_{\alpha,\mu+1}(-\lambda w^\alpha)` and
    :math:`\int_0^w\!\int_0^v k = w^{\mu+1} E_{\alpha,\mu+2}(-\lambda w^\alpha)`.
    """
    if not mu > 0.0:
        raise DomainError(f"mu must be positive, got {mu!r}")
    if lam < 0.0:
        raise DomainError(f"lambda must be >= 0, got {lam!r}")

    n = int(index)
    if not (0 <= n <= f.grid.N):
        raise DomainError(f"index {index} outside the grid")
    if n == 0:
        return 0.0

    t = f.grid.nodes[: n + 1]
    rows = np.array([n])

    kernel = None
    if lam == 0.0:
        g1 = math.gamma(mu + 1.0)
        g2 = math.gamma(mu + 2.0)

        def first(w):
            return w**mu / g1

        def second_diff(A, tau):
            return _powdiff(A, tau, mu + 1.0) / g2

    else:

        def P1(w):
            return w**mu * mittag_leffler(alpha, mu + 1.0, -lam * w**alpha)

        def P2(w):
            return w ** (mu + 1.0) * mittag_leffler(alpha, mu + 2.0, -lam * w**alpha)

        first = P1

        def second_diff(A, tau):
            return P2(A) - P2(np.maximum(A - tau, 0.0))

        def kernel(w):
            return w ** (mu - 1.0) * mittag_leffler(alpha, mu, -lam * w**alpha)

    wl, wr, _ = product_weights(t, rows, first, second_diff, kernel)
    values = f.values[: n + 1]
    return float(wl[0] @ values[:-1] + wr[0] @ values[1:])


# }}}


# {{{ Picard iteration


def _log_picard_terms(p: ScalarProblem, kmax: int) -> np.ndarray:
    """``log(x**k / Gamma(alpha k + 1))`` for ``k = 0..kmax``, ``x = lambda T**alpha``."""
    k = np.arange(kmax + 1, dtype=float)
    lg = np.array([math.lgamma(p.alpha * kk + 1.0) for kk in k])
    with np.errstate(divide="ignore"):
        return k * math.log(p.picard_parameter) - lg


def picard_peak_term(p: ScalarProblem) -> float:
    r"""Largest :math:`x^k/\Gamma(\alpha k + 1)`, :math:`x = \lambda T^\alpha`.

    The iterates are partial sums of an alternating series with these
    magnitudes, so a large peak means cancellation in double precision.
    """
    if p.lam == 0.0:
        return 1.0
    # the terms peak near alpha k = x**(1 / alpha)
    kmax = int(2.0 * p.picard_parameter ** (1.0 / p.alpha) / p.alpha) + 10
    peak = float(np.max(_log_picard_terms(p, min(kmax, 100_000))))
    return math.exp(peak) if peak < 700.0 else math.inf


def picard_iterations(p: ScalarProblem, tol: float = 1.0e-10, m_max: int = 10_000) -> int:
    r"""Smallest m whose truncation term :math:`x^{m+1}/\Gamma(\alpha(m+1)+1)`
    is at most *tol* (and decreasing), ``x = lambda T**alpha``."""
    if p.lam == 0.0:
        return 1
    logs = _log_picard_terms(p, m_max + 1)
    ok = (logs[1:] <= math.log(tol)) & (np.diff(logs) < 0)
    hits = np.flatnonzero(ok)
    if hits.size == 0:
        raise DomainError(f"Picard iteration needs more than {m_max} steps")
    return int(hits[0])


def picard_solve(p: ScalarProblem, grid: TimeGrid, m: int) -> GridFunction:
    r"""Successive approximations for the equivalent integral equation

    .. math::

        y_m = \varphi + \frac{\psi + \lambda\varphi}{\Gamma(\alpha+1)} t^\alpha
            - \lambda I^\alpha y_{m-1} + I^{\alpha+\beta} f,

    started from :math:`y_0 = \varphi + (\psi + \lambda\varphi)
    t^\alpha / \Gamma(\alpha + 1)`. :math:`I^\alpha` is the product-integration
    operator; :math:`I^{\alpha+\beta} f` uses the exact power rule.
    """
    if int(m) < 0:
        raise DomainError(f"iteration count must be >= 0, got {m!r}")
    if grid.T > p.T * (1 + 1e-14):
        raise DomainError("grid extends past the horizon T")

    t = grid.nodes
    a = p.alpha
    base = p.phi + (p.psi + p.lam * p.phi) / math.gamma(a + 1.0) * t**a

    y = base.copy()
    if m == 0:
        return GridFunction(grid, y)

    source = base + p.forcing.rl_integral(a + p.beta, t)
    if p.lam == 0.0:
        return GridFunction(grid, source)

    W = rl_integral_matrix(grid, a)
    for _ in range(int(m)):
        y = source - p.lam * (W @ y)

    return GridFunction(grid, y)


# }}}


# {{{ residual


def residual(p: ScalarProblem, y: GridFunction) -> float:
    r"""Max over :math:`t \in [T/4, T]` of the discrete equation residual

    .. math::

        |D_h^\beta(D_h^\alpha y) + \lambda D_h^\beta y - f|

    with :math:`D_h` the L1 scheme. The inner derivative has no value at
    :math:`t_0`; the prescribed :math:`D^\alpha y(+0) = \psi` is used there,
    since a copied :math:`t_1` value carries an O(1) start-up error that the
    outer derivative never forgets.
    """
    t = y.grid.nodes
    inner = caputo_l1(y, p.alpha).values.copy()
    inner[0] = p.psi
    lhs = caputo_l1(GridFunction(y.grid, inner), p.beta).values
    if p.lam != 0.0:
        lhs = lhs + p.lam * caputo_l1(y, p.beta).values

    mask = t >= 0.25 * y.grid.T
    return float(np.max(np.abs(lhs - p.forcing(t))[mask]))


# }}}
