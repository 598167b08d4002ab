from __future__ import annotations

import math
import warnings

import numpy as np
import pytest

import fraclange.spectral as spectral
from fraclange import (
    DomainError,
    Forcing,
    FractionalOrders,
    ModeIndexError,
    ModeSpec,
    OperatorSpec,
    SpectralProblem,
    TimeGrid,
    TruncationWarning,
    VerificationError,
    assemble,
    check_regularity,
    choose_truncation,
    estimate_report,
    lemma6_check,
    monomial_convolution,
    residual_report,
    sobolev_norm,
    solve_closed_form,
    solve_mode,
)
from fraclange.checks import beta_derivative_of_relaxation
from fraclange.spectral import resolve_threads, tail_proxy_terms

#: sobolev_norm of 2^-k with lambda_k = k^2, eps = 1, k = 1..40 (direct sum)
SOBOLEV_GEOMETRIC_40 = 2.1659542988464366

ORDERS = FractionalOrders(0.5, 0.5, 1.0)
LAPLACE = OperatorSpec.dirichlet()


def geometric_problem(n=40, orders=ORDERS, **kw):
    k = np.arange(1, n + 1)
    return SpectralProblem.from_coefficients(orders, LAPLACE, phi=2.0**-k, **kw)


def three_modes(orders=FractionalOrders(0.7, 0.5, 1.0)):
    k = np.arange(1, 4)
    return SpectralProblem.from_coefficients(
        orders, LAPLACE, phi=2.0**-k, psi=k**-2.0,
        forcing=[Forcing.from_pairs([(kk**-2.0, 1.0)]) for kk in k],
    )


# {{{ domain types


def test_operator_spec():
    op = OperatorSpec.dirichlet(2.0)
    assert op.eigenvalue(3) == pytest.approx((3 * math.pi / 2) ** 2)
    assert op.size is None and op.sup_eigenfunction == 1.0
    x = np.linspace(0, 2, 5)
    np.testing.assert_allclose(op.eigenfunction(1, x), np.sin(math.pi * x / 2), atol=1e-15)
    ex = OperatorSpec.explicit([1.0, 2.0, 2.0])
    assert ex.size == 3 and ex.eigenvalue(2) == 2.0
    with pytest.raises(ModeIndexError):
        ex.eigenvalue(4)
    with pytest.raises(ModeIndexError):
        op.eigenvalue(0)


@pytest.mark.parametrize(
    "kwargs",
    [dict(kind="neumann"), dict(L=0.0), dict(kind="explicit", eigenvalues=()),
     dict(kind="explicit", eigenvalues=(2.0, 1.0)), dict(kind="explicit", eigenvalues=(0.0, 1.0)),
     dict(eigenvalues=(1.0,))],
)
def test_operator_validation(kwargs):
    with pytest.raises(DomainError):
        OperatorSpec(**kwargs)


def test_problem_validation():
    m1 = ModeSpec(1, 1.0, 1.0)
    m3 = ModeSpec(3, 9.0, 1.0)
    with pytest.raises(DomainError):
        SpectralProblem(ORDERS, LAPLACE, (m1, m3))
    with pytest.raises(DomainError):
        SpectralProblem(ORDERS, LAPLACE, (m1, m1))
    with pytest.raises(DomainError):
        SpectralProblem(ORDERS, LAPLACE, (ModeSpec(1, 2.0),))
    with pytest.raises(DomainError):
        SpectralProblem(ORDERS, LAPLACE, (m1,), epsilon=1.0)
    with pytest.raises(DomainError):
        SpectralProblem(ORDERS, LAPLACE, ())
    with pytest.raises(DomainError):
        ModeSpec(1, -1.0)
    # modes may be given in any order
    p = SpectralProblem(ORDERS, LAPLACE, (ModeSpec(2, 4.0), m1))
    assert p.N_max == 2 and [m.k for m in p.sorted_modes()] == [1, 2]


# }}}


# {{{ mode solutions


def test_solve_mode_examples():
    p = SpectralProblem(ORDERS, OperatorSpec.explicit([1.0, 50.0]), (ModeSpec(1, 1.0, 0.0, 1.0), ModeSpec(2, 50.0, 1.0)))
    assert solve_mode(p, 1, 1.0) == pytest.approx(0.572416423844193, rel=1e-14)
    np.testing.assert_allclose(solve_mode(p, 2, np.linspace(0, 1, 9)), 1.0, atol=1e-12)
    assert solve_mode(p, 1, 0.0) == 0.0 and solve_mode(p, 2, 0.0) == 1.0
    with pytest.raises(ModeIndexError):
        solve_mode(p, 3, 0.5)


def test_solve_mode_delegates(monkeypatch):
    calls = []

    def spy(problem, t):
        calls.append((problem, t))
        return 42.0

    monkeypatch.setattr(spectral, "solve_closed_form", spy)
    p = three_modes()
    assert solve_mode(p, 2, 0.5) == 42.0
    (problem, t), = calls
    assert t == 0.5
    assert problem == p.mode(2).scalar_problem(p.orders)
    assert problem.lam == p.mode(2).lambda_k


def test_solve_mode_bitwise_equal_to_scalar():
    p = three_modes()
    t = np.linspace(0, 1, 17)
    for k in (1, 2, 3):
        np.testing.assert_array_equal(solve_mode(p, k, t), solve_closed_form(p.mode(k).scalar_problem(p.orders), t))


# }}}


# {{{ truncation


def test_truncation_single_mode():
    p = SpectralProblem.from_coefficients(ORDERS, LAPLACE, phi=[0.0, 0.0, 0.7, 0.0, 0.0, 0.0, 0.0, 0.0])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert choose_truncation(p, 1e-3).N == 3
    p = SpectralProblem.from_coefficients(ORDERS, LAPLACE, phi=[0.7])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        tr = choose_truncation(p, 1e-3)
    assert tr.N == 1 and tr.achieved


def test_truncation_geometric():
    p = geometric_problem(80)
    tr = choose_truncation(p, 1e-6)
    assert tr.achieved and tr.N == 29 and tr.N <= 40
    assert tr.tail <= 1e-12 and tr.tails[tr.N - 1] > 1e-12


def test_truncation_rough_data_warns():
    # sine coefficients of x(pi - x): 8 / (pi k^3) for odd k
    k = np.arange(1, 201)
    phi = np.where(k % 2 == 1, 8 / (math.pi * k**3.0), 0.0)
    p = SpectralProblem.from_coefficients(ORDERS, LAPLACE, phi=phi)
    with pytest.warns(TruncationWarning):
        tr = choose_truncation(p, 1e-4)
    assert tr.N == 200 and not tr.achieved


def test_truncation_errors():
    for tol in (0.0, -1.0, math.nan):
        with pytest.raises(DomainError):
            choose_truncation(geometric_problem(5), tol)


def test_tail_monotone():
    rng = np.random.default_rng(2)
    n = 30
    p = SpectralProblem.from_coefficients(
        ORDERS, LAPLACE, phi=rng.normal(size=n) / np.arange(1, n + 1) ** 3, psi=rng.normal(size=n) / np.arange(1, n + 1),
        forcing=[Forcing.from_pairs([(rng.normal(), 1.0)]) for _ in range(n)],
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        tails = choose_truncation(p, 1e-3).tails
    assert np.all(np.diff(tails) <= 0)
    assert tails[0] == pytest.approx(np.sum(tail_proxy_terms(p)))


# }}}


# {{{ assembly


def test_assemble_single_mode():
    p = SpectralProblem(ORDERS, LAPLACE, (ModeSpec(1, 1.0, 0.5, 1.0, Forcing.from_pairs([(1.0, 1.0)])),))
    g = TimeGrid.graded(1.0, 16, 4.0)
    x = np.linspace(0, math.pi, 9)
    sol = assemble(p, g, x)
    expected = np.outer(solve_mode(p, 1, g.nodes), math.sqrt(2 / math.pi) * np.sin(x))
    np.testing.assert_allclose(sol.u, expected, rtol=1e-15, atol=1e-16)
    assert sol.N == 1 and sol.tail_bound == 0.0 and sol.ks == (1,)


def test_assemble_initial_slice():
    p = geometric_problem(12)
    x = np.linspace(0, math.pi, 33)
    sol = assemble(p, TimeGrid.uniform(1.0, 4), x)
    synth = sum(2.0**-k * LAPLACE.eigenfunction(k, x) for k in range(1, 13))
    np.testing.assert_allclose(sol.u[0], synth, atol=1e-15)


def test_assemble_tail_bound_on_doubling():
    p = geometric_problem(40)
    g = TimeGrid.graded(1.0, 32, 4.0)
    x = np.linspace(0, math.pi, 41)
    coarse = assemble(p, g, x, N=10)
    fine = assemble(p, g, x, N=20)
    assert coarse.tail_bound > 0
    assert np.max(np.abs(fine.u - coarse.u)) <= coarse.tail_bound


def test_assemble_permutation_invariance():
    p = three_modes()
    rng = np.random.default_rng(4)
    k = np.arange(1, 25)
    p = SpectralProblem.from_coefficients(
        p.orders, LAPLACE, phi=rng.normal(size=24) / k**3, psi=rng.normal(size=24) / k**2,
    )
    g = TimeGrid.graded(1.0, 32, 2.0 / 0.7)
    x = np.linspace(0, math.pi, 50)
    base = assemble(p, g, x).u
    for _ in range(3):
        shuffled = SpectralProblem(p.orders, p.operator, tuple(rng.permutation(p.modes)), p.epsilon)
        assert np.max(np.abs(assemble(shuffled, g, x).u - base)) <= 1e-13


def test_assemble_threads_bit_identical(monkeypatch):
    p = geometric_problem(20, forcing=[Forcing.from_pairs([(1.0, 1.0)])] * 20)
    g = TimeGrid.graded(1.0, 64, 4.0)
    x = np.linspace(0, math.pi, 20)
    serial = assemble(p, g, x, threads=1)
    parallel = assemble(p, g, x, threads=4)
    np.testing.assert_array_equal(serial.u, parallel.u)
    monkeypatch.setenv("FRACLANGE_THREADS", "3")
    np.testing.assert_array_equal(assemble(p, g, x).u, serial.u)


def test_resolve_threads(monkeypatch):
    monkeypatch.delenv("FRACLANGE_THREADS", raising=False)
    assert resolve_threads() == 1
    monkeypatch.setenv("FRACLANGE_THREADS", "6")
    assert resolve_threads() == 6
    assert resolve_threads(2) == 2
    for bad in ("0", "-2", "many", "1.5"):
        monkeypatch.setenv("FRACLANGE_THREADS", bad)
        with pytest.raises(DomainError):
            resolve_threads()


def test_assemble_errors():
    p = geometric_problem(4)
    g = TimeGrid.uniform(1.0, 4)
    with pytest.raises(ModeIndexError):
        assemble(p, g, [0.0, 1.0], N=5)
    with pytest.raises(DomainError):
        assemble(p, TimeGrid.uniform(2.0, 4), [0.0, 1.0])
    with pytest.raises(DomainError):
        assemble(p, g, np.zeros((2, 2)))


def test_parseval():
    p = three_modes()
    xf = np.linspace(0, math.pi, 4097)
    sol = assemble(p, TimeGrid.graded(1.0, 16, 2.0), xf)
    energy_x = np.trapezoid(sol.u**2, xf, axis=1)
    energy_k = np.sum(sol.coefficients**2, axis=0)
    assert np.max(np.abs(energy_x - energy_k) / energy_k) <= 1e-6


# }}}


# {{{ norms and regularity


def test_sobolev_norm_examples():
    assert sobolev_norm([1.0], 0.5, [4.0]) == 2.0
    h = np.array([3.0, -4.0, 12.0])
    assert sobolev_norm(h, 0.0, [1.0, 7.0, 9.0]) == pytest.approx(13.0)
    k = np.arange(1, 41)
    assert sobolev_norm(2.0**-k, 1.0, k**2.0) == pytest.approx(SOBOLEV_GEOMETRIC_40, rel=1e-15)
    assert SOBOLEV_GEOMETRIC_40 == pytest.approx(math.sqrt(sum(k**4 * 4.0**-k for k in range(1, 41))), rel=1e-15)
    assert sobolev_norm([1.0], -0.5, [4.0]) == 0.5
    with pytest.raises(DomainError):
        sobolev_norm([1.0, 2.0], 0.0, [1.0])


def test_regularity_examples():
    zero = geometric_problem(30)
    rep = check_regularity(zero)
    assert rep.forcing.verdict == "converged" and rep.forcing.value == 0.0
    assert rep.phi.verdict == "converged"

    k = np.arange(1, 101)
    rough = SpectralProblem.from_coefficients(ORDERS, LAPLACE, phi=1.0 / k)
    rep = check_regularity(rough)
    assert rep.phi.verdict == "growing" and rep.verdict == "growing"
    assert rep.phi.slope == pytest.approx(2.0, abs=1e-6)
    assert np.all(np.diff(rep.phi.partial_sums) > 0)

    smooth_f = SpectralProblem.from_coefficients(
        ORDERS, LAPLACE, phi=np.zeros(100), forcing=[Forcing.from_pairs([(kk**-2.0, 0.0)]) for kk in k], epsilon=0.25,
    )
    rep = check_regularity(smooth_f)
    assert rep.forcing.verdict == "converged"
    assert rep.forcing.value == pytest.approx(sum(kk**1.0 * kk**-4.0 for kk in k), rel=1e-12)


def test_regularity_inconclusive():
    assert check_regularity(geometric_problem(4)).phi.verdict == "inconclusive"


# }}}


# {{{ convolution estimate


def test_convolution_estimate_zero_forcing():
    lhs, rhs = lemma6_check(geometric_problem(10))
    assert lhs == 0.0 and rhs == 0.0


def test_convolution_estimate_single_mode_closed_form():
    lam = 4.0
    p = SpectralProblem(ORDERS, LAPLACE, (ModeSpec(1, 1.0), ModeSpec(2, lam, forcing_k=Forcing.from_pairs([(1.0, 1.0)]))))
    result = lemma6_check(p, n_time=1024)
    exact = (lam * monomial_convolution(0.5, 0.5, lam, 1.0, 1.0)) ** 2
    assert result.lhs == pytest.approx(exact, rel=1e-5)
    assert result.lhs <= result.rhs_proxy


def test_convolution_estimate_partial_sums():
    k = np.arange(1, 201)
    p = SpectralProblem.from_coefficients(
        ORDERS, LAPLACE, phi=np.zeros(200), forcing=[Forcing.from_pairs([(kk**-3.0, 1.0)]) for kk in k],
    )
    result = lemma6_check(p)
    assert np.all(np.diff(result.partial_sums) >= 0)
    assert abs(result.partial_sums[199] - result.partial_sums[99]) <= 1e-8
    assert result.lhs <= result.rhs_proxy


def test_convolution_estimate_rejects_growing_forcing():
    k = np.arange(1, 61)
    p = SpectralProblem.from_coefficients(
        ORDERS, LAPLACE, phi=np.zeros(60), forcing=[Forcing.from_pairs([(1.0, 0.0)]) for _ in k],
    )
    with pytest.raises(DomainError):
        lemma6_check(p)


def test_convolution_estimate_violation_channel(monkeypatch):
    monkeypatch.setattr(spectral, "_interpolation_constant", lambda a, mu, eps: 1e-12)
    with pytest.raises(VerificationError):
        lemma6_check(three_modes())


# }}}


# {{{ reports


def test_residual_report_constant_modes():
    p = SpectralProblem.from_coefficients(ORDERS, LAPLACE, phi=[1.0, -0.5, 0.25])
    sol = assemble(p, TimeGrid.graded(1.0, 128, 4.0), np.linspace(0, math.pi, 5))
    rep = residual_report(p, sol)
    assert rep.worst <= 1e-10
    assert np.all(rep.initial_value == 0.0)
    assert np.all(rep.initial_derivative == 0.0)


def test_residual_report_refinement():
    p = three_modes()
    x = np.linspace(0, math.pi, 5)
    reps = [residual_report(p, assemble(p, TimeGrid.graded(1.0, N, 2 / 0.7), x)) for N in (256, 512, 1024)]
    per_mode = np.array([r.per_mode for r in reps])
    assert np.all(per_mode[1:] < per_mode[:-1])
    assert all(np.all(r.initial_value == 0.0) for r in reps)
    assert reps[-1].l2 >= reps[-1].worst
    assert np.max(reps[-1].initial_derivative) <= 1e-4


def test_estimate_report():
    p = three_modes(FractionalOrders(0.5, 0.3, 1.0))
    rep = estimate_report(p, 0.5)
    assert rep.ok, rep.violations
    assert rep.terms["K1"] == 0.0
    assert rep.terms["K1_literal"] > 0.0
    # the two pieces of AS1 bound the whole by the triangle inequality
    assert rep.terms["AS1"] <= 2 * (rep.terms["AS11"] + rep.terms["AS12"]) + 1e-300
    with pytest.raises(DomainError):
        estimate_report(p, 0.0)


def test_estimate_report_literal_matches_at_equal_orders():
    p = three_modes(FractionalOrders(0.5, 0.5, 1.0))
    assert estimate_report(p, 0.7).terms["K1_literal"] == 0.0


def test_beta_derivative_of_relaxation():
    """The order-beta derivative of E_{a,1}(-lam t^a) carries t^(a-b) E_{a,a-b+1}."""
    d = beta_derivative_of_relaxation(0.5, 0.3, 1.0)
    assert d["shifted"] <= 1e-5
    assert d["unshifted"] >= 1e-2
    same = beta_derivative_of_relaxation(0.5, 0.5, 1.0)
    assert same["shifted"] == pytest.approx(same["unshifted"], rel=1e-12)


# }}}
