"""
Grid-based fractional integral and Caputo derivative.

Both operators are product-integration rules applied to the piecewise-linear
interpolant of the data, with every singular moment integrated in closed
form. They are meant as slow, transparent oracles for the closed-form
identities used by the solvers, not as production time steppers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import DomainError

__all__ = [
    "GridFunction",
    "TimeGrid",
    "caputo_l1",
    "compose_check",
    "graded_exponent",
    "product_weights",
    "rl_integral",
    "rl_integral_matrix",
]

# maximum number of matrix entries materialized at once
_BLOCK_ENTRIES = 1 << 21

# 8-point Gauss-Legendre rule on [-1, 1] for smooth kernel intervals
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


# {{{ grids


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing nodes :math:`0 = t_0 < t_1 < \\dots < t_N = T`."""

    nodes: np.ndarray
    kind: str = "uniform"
    exponent: float = 1.0

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 3:
            raise DomainError("a time grid needs at least N = 2 intervals")
        if nodes[0] != 0.0:
            raise DomainError("the first node must be t_0 = 0")
        if not np.all(np.diff(nodes) > 0):
            raise DomainError("grid nodes must be strictly increasing")
        if self.kind not in ("uniform", "graded"):
            raise DomainError(f"unknown grid kind {self.kind!r}")
        if self.exponent < 1.0:
            raise DomainError("grading exponent must be >= 1")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def uniform(cls, T: float, N: int) -> TimeGrid:
        return cls.graded(T, N, 1.0)

    @classmethod
    def graded(cls, T: float, N: int, r: float) -> TimeGrid:
        """Nodes :math:`t_i = T (i / N)^r`, clustered at the origin for r > 1."""
        if not T > 0:
            raise DomainError(f"horizon must be positive, got {T!r}")
        if int(N) < 2:
            raise DomainError(f"N must be >= 2, got {N!r}")
        if r < 1.0:
            raise DomainError(f"grading exponent must be >= 1, got {r!r}")

        N = int(N)
        nodes = T * (np.arange(N + 1) / N) ** r
        nodes[-1] = T
        return cls(nodes, "uniform" if r == 1.0 else "graded", float(r))

    @property
    def N(self) -> int:
        return self.nodes.size - 1

    @property
    def T(self) -> float:
        return float(self.nodes[-1])


def graded_exponent(alpha: float) -> float:
    """Grading exponent :math:`\\max(1, 2/\\alpha)` for :math:`t^\\alpha` data."""
    return max(1.0, 2.0 / alpha)


@dataclass(frozen=True)
class GridFunction:
    grid: TimeGrid
    values: np.ndarray
    #: True when ``values[0]`` is a copy of ``values[1]`` (no value at t_0)
    first_node_filled: bool = field(default=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.nodes.shape:
            raise DomainError(
                f"expected {self.grid.nodes.size} values, got {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise DomainError("grid function values must be finite")
        object.__setattr__(self, "values", values)

    @classmethod
    def sample(cls, grid: TimeGrid, f: Callable[[np.ndarray], np.ndarray]) -> GridFunction:
        return cls(grid, np.broadcast_to(f(grid.nodes), grid.nodes.shape).copy())

    @property
    def t(self) -> np.ndarray:
        return self.grid.nodes

    def __add__(self, other: GridFunction) -> GridFunction:
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other: GridFunction) -> GridFunction:
        return GridFunction(self.grid, self.values - other.values)

    def __rmul__(self, scalar: float) -> GridFunction:
        return GridFunction(self.grid, scalar * self.values)


# }}}


# {{{ product integration


def _powdiff(A: np.ndarray, tau: np.ndarray, q: float) -> np.ndarray:
    """Evaluate :math:`A^q - (A - \\tau)^q` without cancellation."""
    with np.errstate(divide="ignore", invalid="ignore"):
        d = -(A**q) * np.expm1(q * np.log1p(-tau / A))
    return np.where(tau >= A, A**q, d)


def _row_blocks(N: int):
    rows = max(1, _BLOCK_ENTRIES // max(N, 1))
    for start in range(1, N + 1, rows):
        yield np.arange(start, min(N + 1, start + rows))


def _interval_geometry(t: np.ndarray, rows: np.ndarray):
    tau = np.diff(t)
    A = t[rows, None] - t[None, :-1]
    mask = np.arange(t.size - 1)[None, :] < rows[:, None]
    # masked entries get harmless positive values
    A = np.where(mask, A, 1.0)
    tau = np.where(mask, tau[None, :], 0.5)
    return A, tau, mask


def product_weights(
    t: np.ndarray,
    rows: np.ndarray,
    first: Callable[[np.ndarray], np.ndarray],
    second_diff: Callable[[np.ndarray, np.ndarray], np.ndarray],
    kernel: Callable[[np.ndarray], np.ndarray] | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    r"""Product-integration weights for a kernel :math:`k(t_n - s)`.

    For the piecewise-linear interpolant :math:`h_I` of nodal data,

    .. math::

        \int_0^{t_n} k(t_n - s) h_I(s) \,\mathrm{d}s
        = \sum_j w^L_{nj} h_j + w^R_{nj} h_{j+1}.

    *first* is :math:`P_1(w) = \int_0^w k` and ``second_diff(A, tau)`` is
    :math:`P_2(A) - P_2(A - \tau)` with :math:`P_2 = \int_0^w P_1`.
    Returns ``(w_left, w_right, mask)`` for the requested rows.

    If *kernel* is given, intervals at distance at least :math:`2\tau` from
    the singular endpoint use Gauss-Legendre quadrature of the kernel instead,
    because ``second_diff / tau`` cancels catastrophically when
    :math:`\tau \ll A` unless *second_diff* is evaluated stably.
    """
    A, tau, mask = _interval_geometry(t, rows)
    B = np.maximum(A - tau, 0.0)

    if kernel is None:
        near = mask
    else:
        near = mask & (B < 2.0 * tau)

    w_left = np.zeros_like(A)
    w_right = np.zeros_like(A)
    if near.any():
        An, tn, Bn = A[near], tau[near], B[near]
        dP2 = second_diff(An, tn) / tn
        w_left[near] = first(An) - dP2
        w_right[near] = dP2 - first(Bn)

    far = mask & ~near
    if far.any():
        Af, tf = A[far], tau[far]
        # s = t_j + tau * (1 + xi) / 2, kernel argument A - (s - t_j)
        frac = 0.5 * (1.0 + _GL_NODES)
        k = kernel(Af[:, None] - tf[:, None] * frac[None, :])
        g = 0.5 * tf[:, None] * _GL_WEIGHTS[None, :] * k
        w_left[far] = g @ (1.0 - frac)
        w_right[far] = g @ frac

    return w_left, w_right, mask


def _rl_weights(t: np.ndarray, rows: np.ndarray, sigma: float):
    g1 = math.gamma(sigma + 1.0)
    g2 = math.gamma(sigma + 2.0)
    return product_weights(
        t,
        rows,
        lambda w: w**sigma / g1,
        lambda A, tau: _powdiff(A, tau, sigma + 1.0) / g2,
    )


def _check_sigma(sigma: float) -> None:
    if not (0.0 < sigma < 2.0):
        raise DomainError(f"sigma must lie in (0, 2), got {sigma!r}")


def rl_integral(h: GridFunction, sigma: float) -> GridFunction:
    r"""Riemann-Liouville integral :math:`I^\sigma h` at every node.

    Exact (to round-off) whenever *h* is piecewise linear on the grid.
    """
    _check_sigma(sigma)
    t = h.grid.nodes
    values = h.values
    out = np.zeros_like(values)
    for rows in _row_blocks(h.grid.N):
        wl, wr, _ = _rl_weights(t, rows, sigma)
        out[rows] = wl @ values[:-1] + wr @ values[1:]
    return GridFunction(h.grid, out)


def rl_integral_matrix(grid: TimeGrid, sigma: float) -> np.ndarray:
    """Dense lower-triangular matrix ``W`` with ``rl_integral(h).values == W @ h``."""
    _check_sigma(sigma)
    t = grid.nodes
    W = np.zeros((t.size, t.size))
    for rows in _row_blocks(grid.N):
        wl, wr, _ = _rl_weights(t, rows, sigma)
        W[rows, :-1] += wl
        W[rows, 1:] += wr
    return W


# }}}


# {{{ Caputo derivative


def caputo_l1(h: GridFunction, rho: float) -> GridFunction:
    r"""L1 approximation of the Caputo derivative :math:`D^\rho h`.

    The derivative of the piecewise-linear interpolant is integrated exactly
    against :math:`(t_n - s)^{-\rho} / \Gamma(1 - \rho)`. No value exists at
    :math:`t_0`; it is filled with the :math:`t_1` value and flagged.
    """
    if not (0.0 < rho < 1.0):
        raise DomainError(f"rho must lie in (0, 1), got {rho!r}")

    t = h.grid.nodes
    dh = np.diff(h.values)
    q = 1.0 - rho
    scale = math.gamma(2.0 - rho)

    out = np.empty_like(h.values)
    for rows in _row_blocks(h.grid.N):
        A, tau, mask = _interval_geometry(t, rows)
        c = np.where(mask, _powdiff(A, tau, q) / tau, 0.0)
        out[rows] = (c @ dh) / scale
    out[0] = out[1]

    return GridFunction(h.grid, out, first_node_filled=True)


def compose_check(h: GridFunction, rho: float) -> float:
    """Max-norm of :math:`I^\\rho D^\\rho h - (h - h(0))` on the grid."""
    d = caputo_l1(h, rho)
    back = rl_integral(GridFunction(h.grid, d.values), rho)
    return float(np.max(np.abs(back.values - (h.values - h.values[0]))))


# }}}
