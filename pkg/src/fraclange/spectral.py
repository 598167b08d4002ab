r"""
Eigenfunction expansion of the abstract problem

.. math::

    D^\beta (D^\alpha u) + D^\beta (A u) = f, \qquad
    u(+0) = \varphi, \quad D^\alpha u(+0) = \psi,

for a self-adjoint positive operator :math:`A v_k = \lambda_k v_k`. Each
Fourier coefficient :math:`T_k(t) = (u(t), v_k)` solves the scalar problem of
:mod:`fraclange.scalar` with :math:`\lambda = \lambda_k`, so

.. math::

    u(t, x) = \sum_{k \ge 1} T_k(t) v_k(x).

The concrete operator is the Dirichlet Laplacian on :math:`(0, L)`; an
explicit eigenvalue list is also accepted and is realized as the diagonal
operator in the same sine basis.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .exceptions import DomainError, ModeIndexError, TruncationWarning, VerificationError
from .fracops import GridFunction, TimeGrid
from .scalar import (
    Forcing,
    FractionalOrders,
    ScalarProblem,
    dalpha_closed_form,
    monomial_convolution,
    quadrature_convolve,
    residual,
    solve_closed_form,
)
from .special import decay_bound_sweep, interpolation_bound_sweep, mittag_leffler

__all__ = [
    "EstimateReport",
    "ConvolutionEstimate",
    "ModeSpec",
    "OperatorSpec",
    "RegularityReport",
    "ResidualReport",
    "SequenceVerdict",
    "SolutionField",
    "SpectralProblem",
    "TruncationResult",
    "assemble",
    "check_regularity",
    "choose_truncation",
    "estimate_report",
    "lemma6_check",
    "residual_report",
    "resolve_threads",
    "sobolev_norm",
    "solve_mode",
    "tail_proxy_terms",
]

#: relative mismatch allowed between a mode's lambda_k and the operator's
_LAMBDA_RTOL = 1.0e-12

#: log-log slope thresholds of the regularity heuristic
_SLOPE_CONVERGED = -1.5
_SLOPE_GROWING = -1.0
_MIN_NONZERO_TERMS = 6

#: sample grid for the constants of the pointwise Mittag-Leffler bounds
_BOUND_X = np.concatenate([[0.0], np.geomspace(1.0e-8, 1.0e8, 801)])


# {{{ domain types


@dataclass(frozen=True)
class OperatorSpec:
    """Spectral data of :math:`A`.

    ``kind="dirichlet_laplacian_1d"``: :math:`\\lambda_k = (k\\pi/L)^2`.
    ``kind="explicit"``: a finite nondecreasing list of positive eigenvalues.
    Both use :math:`v_k(x) = \\sqrt{2/L}\\sin(k\\pi x/L)`.
    """

    kind: str = "dirichlet_laplacian_1d"
    L: float = math.pi
    eigenvalues: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not (math.isfinite(self.L) and self.L > 0):
            raise DomainError(f"interval length must be positive, got {self.L!r}")

        if self.kind == "dirichlet_laplacian_1d":
            if self.eigenvalues:
                raise DomainError("the Dirichlet Laplacian takes no eigenvalue list")
        elif self.kind == "explicit":
            ev = tuple(float(v) for v in self.eigenvalues)
            if not ev:
                raise DomainError("an explicit operator needs at least one eigenvalue")
            if not all(math.isfinite(v) and v > 0 for v in ev):
                raise DomainError("eigenvalues must be finite and positive")
            if any(b < a for a, b in zip(ev, ev[1:])):
                raise DomainError("eigenvalues must be nondecreasing")
            object.__setattr__(self, "eigenvalues", ev)
        else:
            raise DomainError(f"unknown operator kind {self.kind!r}")

    @classmethod
    def dirichlet(cls, L: float = math.pi) -> OperatorSpec:
        return cls("dirichlet_laplacian_1d", float(L))

    @classmethod
    def explicit(cls, eigenvalues: Sequence[float], L: float = math.pi) -> OperatorSpec:
        return cls("explicit", float(L), tuple(eigenvalues))

    @property
    def size(self) -> int | None:
        """Number of available modes (``None`` if unbounded)."""
        return len(self.eigenvalues) if self.kind == "explicit" else None

    def eigenvalue(self, k: int) -> float:
        if k < 1 or (self.size is not None and k > self.size):
            raise ModeIndexError(f"operator has no mode k={k}")
        if self.kind == "explicit":
            return self.eigenvalues[k - 1]
        return (k * math.pi / self.L) ** 2

    def eigenfunction(self, k: int, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return math.sqrt(2.0 / self.L) * np.sin(k * math.pi * x / self.L)

    @property
    def sup_eigenfunction(self) -> float:
        return math.sqrt(2.0 / self.L)


@dataclass(frozen=True)
class ModeSpec:
    k: int
    lambda_k: float
    phi_k: float = 0.0
    psi_k: float = 0.0
    forcing_k: Forcing = field(default_factory=Forcing)

    def __post_init__(self) -> None:
        if int(self.k) != self.k or self.k < 1:
            raise DomainError(f"mode index must be an integer >= 1, got {self.k!r}")
        if not (math.isfinite(self.lambda_k) and self.lambda_k > 0):
            raise DomainError(f"lambda_k must be positive, got {self.lambda_k!r}")

    def scalar_problem(self, orders: FractionalOrders) -> ScalarProblem:
        return ScalarProblem(orders, self.lambda_k, self.phi_k, self.psi_k, self.forcing_k)


@dataclass(frozen=True)
class SpectralProblem:
    orders: FractionalOrders
    operator: OperatorSpec
    #: kept in the order given; indices must be exactly 1..N_max
    modes: tuple[ModeSpec, ...]
    epsilon: float = 0.25

    def __post_init__(self) -> None:
        modes = tuple(self.modes)
        if not modes:
            raise DomainError("at least one mode is required")
        if not (0.0 < self.epsilon < 1.0):
            raise DomainError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")

        ks = sorted(m.k for m in modes)
        if ks != list(range(1, len(modes) + 1)):
            raise DomainError("modes must be indexed 1..N_max without gaps or repeats")

        for m in modes:
            lam = self.operator.eigenvalue(m.k)
            if abs(m.lambda_k - lam) > _LAMBDA_RTOL * lam:
                raise DomainError(
                    f"mode {m.k}: lambda_k={m.lambda_k!r} does not match "
                    f"the operator eigenvalue {lam!r}"
                )

        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "_by_k", {m.k: m for m in modes})

    @classmethod
    def from_coefficients(
        cls,
        orders: FractionalOrders,
        operator: OperatorSpec,
        phi: Sequence[float],
        psi: Sequence[float] | None = None,
        forcing: Sequence[Forcing] | None = None,
        epsilon: float = 0.25,
    ) -> SpectralProblem:
        n = len(phi)
        psi = [0.0] * n if psi is None else list(psi)
        forcing = [Forcing()] * n if forcing is None else list(forcing)
        if not (len(psi) == len(forcing) == n):
            raise DomainError("phi, psi and forcing need the same number of modes")

        modes = tuple(
            ModeSpec(k, operator.eigenvalue(k), float(phi[k - 1]), float(psi[k - 1]),
                     forcing[k - 1])
            for k in range(1, n + 1)
        )
        return cls(orders, operator, modes, epsilon)

    @property
    def N_max(self) -> int:
        return len(self.modes)

    @property
    def T(self) -> float:
        return self.orders.T

    def mode(self, k: int) -> ModeSpec:
        try:
            return self._by_k[k]
        except KeyError:
            raise ModeIndexError(f"mode k={k} outside 1..{self.N_max}") from None

    def sorted_modes(self) -> list[ModeSpec]:
        return [self._by_k[k] for k in range(1, self.N_max + 1)]


@dataclass(frozen=True)
class SolutionField:
    grid: TimeGrid
    x: np.ndarray
    #: ``u[i, j] = u(t_i, x_j)``
    u: np.ndarray
    #: mode indices in ascending order, one row of ``coefficients`` each
    ks: tuple[int, ...]
    #: ``coefficients[r, i] = T_{ks[r]}(t_i)``
    coefficients: np.ndarray
    N: int
    #: :math:`\sup|v_k| \sum_{N < k \le N_{max}} \max_i |T_k(t_i)|`
    tail_bound: float

    def __post_init__(self) -> None:
        nt, nx = self.grid.nodes.size, np.size(self.x)
        if self.u.shape != (nt, nx):
            raise DomainError(f"u has shape {self.u.shape}, expected {(nt, nx)}")
        if self.coefficients.shape != (len(self.ks), nt):
            raise DomainError("coefficient trajectories do not match the grid")
        if not self.tail_bound >= 0.0:
            raise DomainError("tail bound must be nonnegative")

    @property
    def t(self) -> np.ndarray:
        return self.grid.nodes

    def trajectory(self, k: int) -> GridFunction:
        return GridFunction(self.grid, self.coefficients[self.ks.index(k)])


# }}}


# {{{ threads


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit argument, else ``FRACLANGE_THREADS``, else 1."""
    if threads is None:
        raw = os.environ.get("FRACLANGE_THREADS", "").strip()
        if not raw:
            return 1
        try:
            threads = int(raw)
        except ValueError:
            threads = 0
        if threads < 1:
            raise DomainError(f"FRACLANGE_THREADS must be a positive integer, got {raw!r}")
    if int(threads) < 1:
        raise DomainError(f"thread count must be a positive integer, got {threads!r}")
    return int(threads)


def _map(fn, items: list, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(fn, items))


# }}}


# {{{ mode solutions and synthesis


def solve_mode(p: SpectralProblem, k: int, t):
    """:math:`T_k(t)`, evaluated by :func:`fraclange.scalar.solve_closed_form`."""
    return solve_closed_form(p.mode(k).scalar_problem(p.orders), t)


def tail_proxy_terms(p: SpectralProblem) -> np.ndarray:
    r"""Per-mode terms :math:`\lambda_k^2\varphi_k^2 + \psi_k^2
    + \lambda_k^{2\epsilon}\max_t|f_k|^2` for ``k = 1..N_max``."""
    out = np.empty(p.N_max)
    for i, m in enumerate(p.sorted_modes()):
        fmax = m.forcing_k.max_abs(p.T)
        out[i] = (
            m.lambda_k**2 * m.phi_k**2
            + m.psi_k**2
            + m.lambda_k ** (2 * p.epsilon) * fmax**2
        )
    return out


@dataclass(frozen=True)
class TruncationResult:
    N: int
    #: ``tails[n] = sum of proxy terms with k > n`` for ``n = 0..N_max``
    tails: np.ndarray
    achieved: bool

    @property
    def tail(self) -> float:
        return float(self.tails[self.N])


def choose_truncation(p: SpectralProblem, tol: float) -> TruncationResult:
    """Smallest N whose tail proxy is at most ``tol**2``.

    When the criterion is met only by running out of nonzero data (the last
    nonzero mode lies in the upper half of ``1..N_max`` and there are at least
    six nonzero modes), ``N_max`` is returned with ``achieved=False`` and a
    :class:`TruncationWarning`.
    """
    if not (math.isfinite(tol) and tol > 0):
        raise DomainError(f"tolerance must be positive, got {tol!r}")

    terms = tail_proxy_terms(p)
    # tails[n] = sum_{k > n}, summed from the small end
    tails = np.concatenate([np.cumsum(terms[::-1])[::-1], [0.0]])
    N = int(np.argmax(tails <= tol**2))

    nonzero = np.flatnonzero(terms)
    last = int(nonzero[-1]) + 1 if nonzero.size else 0
    # too few nonzero terms to tell slow decay from band-limited data
    slow = nonzero.size >= _MIN_NONZERO_TERMS
    achieved = not (slow and N >= 1 and N == last and 2 * last > p.N_max)
    if not achieved:
        warnings.warn(
            f"tail proxy {tails[last - 1]:.3e} exceeds tol**2={tol**2:.3e} until the "
            f"last nonzero mode k={last}; using N_max={p.N_max}",
            TruncationWarning,
            stacklevel=2,
        )
        N = p.N_max

    return TruncationResult(max(N, 1), tails, achieved)


def _neumaier(terms):
    s = None
    c = None
    for term in terms:
        if s is None:
            s = np.array(term, dtype=float)
            c = np.zeros_like(s)
            continue
        total = s + term
        c += np.where(np.abs(s) >= np.abs(term), (s - total) + term, (term - total) + s)
        s = total
    return s + c


def assemble(
    p: SpectralProblem,
    grid: TimeGrid,
    x,
    N: int | None = None,
    threads: int | None = None,
) -> SolutionField:
    """Synthesize :math:`u(t_i, x_j) = \\sum_{k \\le N} T_k(t_i) v_k(x_j)`.

    Modes are evaluated concurrently (at most ``threads`` workers) and summed
    in the order they appear in ``p.modes`` with compensated accumulation, so
    the result does not depend on that order beyond round-off.
    """
    N = p.N_max if N is None else int(N)
    if not (1 <= N <= p.N_max):
        raise ModeIndexError(f"N={N} outside 1..{p.N_max}")
    if grid.T > p.T * (1 + 1e-14):
        raise DomainError("time grid extends past the horizon T")
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise DomainError("space grid must be a nonempty 1-d array")

    threads = resolve_threads(threads)
    t = grid.nodes

    def trajectory(m: ModeSpec) -> np.ndarray:
        return np.asarray(solve_mode(p, m.k, t), dtype=float)

    ordered = list(p.modes)
    traj = dict(zip((m.k for m in ordered), _map(trajectory, ordered, threads)))

    contributions = (
        np.outer(traj[m.k], p.operator.eigenfunction(m.k, x))
        for m in ordered
        if m.k <= N
    )
    u = _neumaier(contributions)

    ks = tuple(range(1, N + 1))
    coefficients = np.array([traj[k] for k in ks])
    tail = math.fsum(float(np.max(np.abs(traj[k]))) for k in range(N + 1, p.N_max + 1))

    return SolutionField(grid, x, u, ks, coefficients, N, p.operator.sup_eigenfunction * tail)


def sobolev_norm(coeffs, eps: float, eigenvalues) -> float:
    """:math:`(\\sum_k \\lambda_k^{2\\epsilon} |h_k|^2)^{1/2}` over the supplied modes."""
    h = np.asarray(coeffs, dtype=float)
    lam = np.asarray(eigenvalues, dtype=float)
    if h.shape != lam.shape:
        raise DomainError("coefficients and eigenvalues must have the same length")
    return math.sqrt(math.fsum(lam ** (2.0 * eps) * h**2))


# }}}


# {{{ regularity


@dataclass(frozen=True)
class SequenceVerdict:
    terms: np.ndarray
    partial_sums: np.ndarray
    #: fitted log-log slope of the upper half of the nonzero terms
    slope: float | None
    verdict: str

    @property
    def value(self) -> float:
        return float(self.partial_sums[-1]) if self.partial_sums.size else 0.0


def _classify(terms: np.ndarray) -> SequenceVerdict:
    partial = np.cumsum(terms)
    idx = np.flatnonzero(terms > 0)
    if idx.size == 0:
        return SequenceVerdict(terms, partial, None, "converged")
    if idx.size < _MIN_NONZERO_TERMS:
        return SequenceVerdict(terms, partial, None, "inconclusive")

    upper = idx[idx.size // 2 :]
    k = upper + 1.0
    slope = float(np.polyfit(np.log(k), np.log(terms[upper]), 1)[0])
    if slope <= _SLOPE_CONVERGED:
        verdict = "converged"
    elif slope >= _SLOPE_GROWING:
        verdict = "growing"
    else:
        verdict = "inconclusive"
    return SequenceVerdict(terms, partial, slope, verdict)


@dataclass(frozen=True)
class RegularityReport:
    #: terms :math:`\lambda_k^{2\epsilon}\max_t|f_k|^2`
    forcing: SequenceVerdict
    #: terms :math:`\lambda_k^2|\varphi_k|^2`
    phi: SequenceVerdict

    @property
    def verdict(self) -> str:
        verdicts = (self.forcing.verdict, self.phi.verdict)
        if "growing" in verdicts:
            return "growing"
        if all(v == "converged" for v in verdicts):
            return "converged"
        return "inconclusive"


def check_regularity(p: SpectralProblem) -> RegularityReport:
    r"""Heuristic membership tests :math:`f \in C([0,T]; D(A^\epsilon))` and
    :math:`\varphi \in D(A)`.

    The terms of each series are fitted by :math:`c k^s` over the upper half
    of the nonzero terms: :math:`s \le -1.5` is reported as converged,
    :math:`s \ge -1` as growing, anything in between (or fewer than six
    nonzero terms) as inconclusive.
    """
    modes = p.sorted_modes()
    lam = np.array([m.lambda_k for m in modes])
    fmax = np.array([m.forcing_k.max_abs(p.T) for m in modes])
    phi = np.array([m.phi_k for m in modes])
    return RegularityReport(
        forcing=_classify(lam ** (2 * p.epsilon) * fmax**2),
        phi=_classify(lam**2 * phi**2),
    )


# }}}


# {{{ convolution estimate


@lru_cache(maxsize=256)
def _interpolation_constant(alpha: float, mu: float, eps: float) -> float:
    return 2.0 * interpolation_bound_sweep(alpha, mu, eps, _BOUND_X)


@lru_cache(maxsize=256)
def _sup_abs_constant(alpha: float, mu: float) -> float:
    return 2.0 * float(np.max(np.abs(mittag_leffler(alpha, mu, -_BOUND_X))))


@lru_cache(maxsize=256)
def _decay_constant(alpha: float, mu: float) -> float:
    return 2.0 * decay_bound_sweep(alpha, mu, _BOUND_X)


def _max_sobolev_sq(p: SpectralProblem, eps: float, samples: int = 1025) -> float:
    """:math:`\\max_t \\|f(t)\\|_\\epsilon^2` on a uniform sample of [0, T]."""
    t = np.linspace(0.0, p.T, samples)
    total = np.zeros_like(t)
    for m in p.sorted_modes():
        if not m.forcing_k.is_zero:
            total += m.lambda_k ** (2 * eps) * m.forcing_k(t) ** 2
    return float(np.max(total))


@dataclass(frozen=True)
class ConvolutionEstimate:
    lhs: float
    rhs_proxy: float
    #: partial sums of the left-hand side over k = 1..N_max
    partial_sums: np.ndarray
    constant: float

    def __iter__(self):
        return iter((self.lhs, self.rhs_proxy))


def lemma6_check(
    p: SpectralProblem,
    mu: float | None = None,
    t: float | None = None,
    n_time: int = 256,
) -> ConvolutionEstimate:
    r"""Check the forcing estimate

    .. math::

        \sum_k \Big|\lambda_k \int_0^t (t-\eta)^{\mu-1}
            E_{\alpha,\mu}(-\lambda_k(t-\eta)^\alpha) f_k(\eta)\,d\eta\Big|^2
        \le C_\epsilon \max_{[0,T]} \|f\|_\epsilon^2

    with the integrals computed by :func:`~fraclange.scalar.quadrature_convolve`
    on a uniform grid of *n_time* intervals. The constant is
    :math:`C_\epsilon = (C t^q / q)^2`, :math:`q = \mu - \alpha + \alpha\epsilon`,
    where :math:`C` bounds :math:`x^{1-\epsilon}|E_{\alpha,\mu}(-x)|` (swept and
    doubled); this follows from the pointwise kernel bound and Minkowski's
    inequality. The default :math:`\mu = \alpha` is the kernel that appears
    in the equation for :math:`D^\beta(Au)`.

    :raises DomainError: if the forcing regularity verdict is ``"growing"``.
    :raises VerificationError: if the left side exceeds the right side.
    """
    a, eps = p.orders.alpha, p.epsilon
    mu = a if mu is None else float(mu)
    t = p.T if t is None else float(t)
    if not (0.0 < t <= p.T):
        raise DomainError(f"t must lie in (0, T], got {t!r}")
    q = mu - a + a * eps
    if not q > 0:
        raise DomainError(f"the estimate needs mu > alpha (1 - eps), got mu={mu!r}")

    if check_regularity(p).forcing.verdict == "growing":
        raise DomainError("forcing is not in C([0,T]; D(A^eps)); the estimate does not apply")

    grid = TimeGrid.uniform(t, n_time)
    terms = np.zeros(p.N_max)
    for i, m in enumerate(p.sorted_modes()):
        if m.forcing_k.is_zero:
            continue
        f = GridFunction.sample(grid, m.forcing_k)
        conv = quadrature_convolve(a, mu, m.lambda_k, f, grid.N)
        terms[i] = (m.lambda_k * conv) ** 2

    partial = np.cumsum(terms)
    lhs = float(partial[-1])
    const = (_interpolation_constant(a, mu, eps) * t**q / q) ** 2
    rhs = const * _max_sobolev_sq(p, eps)

    if lhs > rhs:
        raise VerificationError(f"convolution estimate violated: {lhs:.6e} > {rhs:.6e}")
    return ConvolutionEstimate(lhs, rhs, partial, const)


# }}}


# {{{ reports


@dataclass(frozen=True)
class ResidualReport:
    ks: tuple[int, ...]
    #: max over [T/4, T] of the double-L1 residual, per mode
    per_mode: np.ndarray
    #: :math:`|T_k(0) - \varphi_k|`
    initial_value: np.ndarray
    #: :math:`|D^\alpha T_k(\delta) - \psi_k|` at ``delta``
    initial_derivative: np.ndarray
    delta: float

    @property
    def worst(self) -> float:
        return float(np.max(self.per_mode))

    @property
    def l2(self) -> float:
        return math.sqrt(math.fsum(self.per_mode**2))


def residual_report(
    p: SpectralProblem, sol: SolutionField, delta: float = 1.0e-8
) -> ResidualReport:
    """Equation and initial-condition residuals of every assembled mode."""
    per_mode = []
    ic0 = []
    ic1 = []
    for k in sol.ks:
        m = p.mode(k)
        sp = m.scalar_problem(p.orders)
        traj = sol.trajectory(k)
        per_mode.append(residual(sp, traj))
        ic0.append(abs(traj.values[0] - m.phi_k))
        ic1.append(abs(dalpha_closed_form(sp, delta) - m.psi_k))

    return ResidualReport(
        sol.ks, np.array(per_mode), np.array(ic0), np.array(ic1), float(delta),
    )


@dataclass(frozen=True)
class EstimateReport:
    """Squared partial-sum norms of the solution pieces at one time ``t``.

    ``terms`` holds the computed sums; ``bounds`` holds the matching
    right-hand sides built from the data norms and swept constants.
    """

    t: float
    terms: dict[str, float]
    bounds: dict[str, float]

    @property
    def violations(self) -> list[str]:
        return [
            name for name, rhs in self.bounds.items()
            if self.terms[name] > rhs * (1 + 1e-12) + 1e-300
        ]

    @property
    def ok(self) -> bool:
        return not self.violations


def estimate_report(p: SpectralProblem, t: float) -> EstimateReport:
    r"""Evaluate the estimate splittings of :math:`\|AS_j\|^2`,
    :math:`\|D^\beta(AS_j)\|^2` and :math:`\|D^\alpha S_j\|^2` at ``t > 0``.

    ``K1_literal`` uses :math:`-\lambda_k E_{\alpha,1}` for the order-:math:`\beta`
    derivative of :math:`E_{\alpha,1}(-\lambda_k t^\alpha)`, which is only
    right for :math:`\beta = \alpha`; ``K1`` is the exact value, which is zero
    because the :math:`\varphi` part of :math:`T_k` is the constant
    :math:`\varphi_k`. No bound is attached to ``K1_literal``.
    """
    a, b, eps = p.orders.alpha, p.orders.beta, p.epsilon
    if not (0.0 < t <= p.T):
        raise DomainError(f"t must lie in (0, T], got {t!r}")

    acc: dict[str, list[float]] = {
        name: []
        for name in ("AS1", "AS11", "AS12", "AS2", "AS3", "K1", "K1_literal",
                     "K2", "K3", "B1", "B2")
    }
    norms = {"phi_DA": [], "phi_H": [], "psi_H": []}
    for m in p.sorted_modes():
        lam, phi, psi = m.lambda_k, m.phi_k, m.psi_k
        x = lam * t**a
        e1 = mittag_leffler(a, 1.0, -x)
        ea1 = t**a * mittag_leffler(a, a + 1.0, -x)
        eab = t ** (a - b) * mittag_leffler(a, a - b + 1.0, -x)

        def conv(mu: float) -> float:
            return math.fsum(
                u.c * monomial_convolution(a, mu, lam, u.p, t) for u in m.forcing_k.terms
            )

        acc["AS1"].append(lam**2 * phi**2 * (e1 + lam * ea1) ** 2)
        acc["AS11"].append(lam**2 * phi**2 * e1**2)
        acc["AS12"].append(lam**4 * phi**2 * ea1**2)
        acc["AS2"].append(lam**2 * (psi * ea1) ** 2)
        acc["AS3"].append(lam**2 * conv(a + b) ** 2)
        acc["K1"].append(0.0)
        acc["K1_literal"].append(lam**2 * (-lam * phi * e1 + phi * lam * eab) ** 2)
        acc["K2"].append(lam**2 * (psi * eab) ** 2)
        acc["K3"].append(lam**2 * conv(a) ** 2)
        acc["B1"].append(psi**2 * e1**2)
        acc["B2"].append(conv(b) ** 2)
        norms["phi_DA"].append(lam**2 * phi**2)
        norms["phi_H"].append(phi**2)
        norms["psi_H"].append(psi**2)

    terms = {name: math.fsum(v) for name, v in acc.items()}
    n = {name: math.fsum(v) for name, v in norms.items()}

    c1 = _decay_constant(a, 1.0)
    c1a = _decay_constant(a, a + 1.0)
    c1ab = _decay_constant(a, a - b + 1.0)
    q_as3 = b + a * eps
    q_k3 = a * eps
    f_eps = _max_sobolev_sq(p, eps)
    f_h = _max_sobolev_sq(p, 0.0)

    bounds = {
        # phi E_{a,1} + lam phi t^a E_{a,a+1} is the constant phi
        "AS1": n["phi_DA"] * (1 + 1e-12),
        "AS11": c1**2 * n["phi_DA"],
        "AS12": c1a**2 * n["phi_DA"],
        "AS2": c1a**2 * n["psi_H"],
        "AS3": (_interpolation_constant(a, a + b, eps) * t**q_as3 / q_as3) ** 2 * f_eps,
        "K1": 0.0,
        "K2": c1ab**2 * t ** (-2 * b) * n["psi_H"],
        "K3": (_interpolation_constant(a, a, eps) * t**q_k3 / q_k3) ** 2 * f_eps,
        "B1": n["psi_H"],
        "B2": (_sup_abs_constant(a, b) * t**b / b) ** 2 * f_h,
    }
    return EstimateReport(float(t), terms, bounds)


# }}}
