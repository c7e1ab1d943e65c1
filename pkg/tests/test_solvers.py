import numpy as np
import pytest

from avebcd import (
    AveProblem,
    DimensionMismatch,
    SolverOptions,
    Status,
    ZeroRhs,
    eval_f,
    make_random_spd,
    make_tridiag_example,
    solve,
    solve_bcda,
    solve_mgsm,
    verify_solution,
)
from avebcd.oracle import enumerate_solutions
from avebcd.solvers import bcda_blocks

from .conftest import X41


def test_block_schedule():
    assert bcda_blocks(4) == [(0, 1), (2, 3)]
    assert bcda_blocks(5) == [(0, 1), (2, 3), (4,)]
    assert bcda_blocks(1) == [(0,)]


def test_bcda_small_example_one_update(ex41):
    rep = solve_bcda(ex41, SolverOptions(tol=1e-12))
    assert rep.status is Status.CONVERGED
    assert rep.it == 1 and rep.sweeps == 1
    assert rep.res_final <= 1e-12
    np.testing.assert_allclose(rep.x_final, X41, atol=1e-15)
    assert rep.certificate.is_spd


def test_bcda_indefinite_example(ex43):
    rep = solve_bcda(ex43, SolverOptions(tol=1e-10, x0=np.array([0.1, -1.0])))
    assert rep.converged
    np.testing.assert_allclose(rep.x_final, [2.0, 4.0], atol=1e-8)
    assert not rep.certificate.is_spd


def test_bcda_tridiag_1000():
    rep = solve_bcda(make_tridiag_example(1000))
    assert rep.converged
    assert rep.res_final <= 1e-6
    assert rep.it <= 4000


def test_bcda_odd_dimension():
    p = make_tridiag_example(7)
    rep = solve_bcda(p, SolverOptions(tol=1e-12))
    assert rep.converged
    assert verify_solution(p, rep.x_final, 1e-10)


@pytest.mark.parametrize(
    "x0, iterates, f_values",
    [
        ([0.6, 1.2], [[-2 / 3, 7 / 3], X41], [-36 / 25, -23 / 18, -77 / 38]),
        ([-0.6, 1.2], [X41, X41], [-21 / 25, -77 / 38, -77 / 38]),
    ],
)
def test_mgsm_small_example_rows(ex41, x0, iterates, f_values):
    opts = SolverOptions(tol=1e-12, x0=np.array(x0), record_trace=True, record_iterates=True)
    rep = solve_mgsm(ex41, opts)
    assert rep.converged and rep.it == 2
    xs = [rec.x for rec in rep.trace]
    np.testing.assert_allclose(xs[1:], iterates, atol=1e-14)
    np.testing.assert_allclose([rec.f_value for rec in rep.trace], f_values, atol=1e-13)


def test_mgsm_from_zero(ex41):
    rep = solve_mgsm(ex41, SolverOptions(tol=1e-12))
    assert rep.converged and rep.it == 2 and rep.sweeps == 1
    assert rep.res_final <= 1e-12


def test_mgsm_can_increase_objective(ex41):
    opts = SolverOptions(x0=np.array([0.6, 1.2]), record_trace=True)
    f = [rec.f_value for rec in solve_mgsm(ex41, opts).trace]
    assert f[1] > f[0]


def test_mgsm_cycles_on_indefinite_example(ex43):
    opts = SolverOptions(x0=np.array([0.1, -1.0]), cycle_window=4, max_updates=100,
                         record_trace=True, record_iterates=True)
    rep = solve_mgsm(ex43, opts)
    assert rep.status is Status.CYCLE_DETECTED
    xs = np.array([rec.x for rec in rep.trace])
    np.testing.assert_allclose(xs[1:4], [[-30, 4], [2, -12], [-30, 4]], atol=1e-9)


def test_mgsm_without_cycle_check_hits_cap(ex43):
    opts = SolverOptions(x0=np.array([0.1, -1.0]), max_updates=50)
    rep = solve_mgsm(ex43, opts)
    assert rep.status is Status.MAX_UPDATES and rep.it == 50


def test_mgsm_needs_two_coordinates():
    with pytest.raises(DimensionMismatch):
        solve_mgsm(AveProblem(np.array([[3.0]]), np.array([1.0])))


def test_bcda_scalar_problem():
    rep = solve_bcda(AveProblem(np.array([[3.0]]), np.array([-4.0])), SolverOptions(tol=1e-14))
    assert rep.converged and rep.it == 1
    assert rep.x_final[0] == -1.0


@pytest.mark.parametrize("n", [2, 5, 10, 11])
@pytest.mark.parametrize("seed", range(5))
def test_bcda_monotone_and_confined(n, seed):
    margin = 0.1
    p = make_random_spd(n, seed, margin)
    x0 = np.random.default_rng(seed).normal(scale=3.0, size=n)
    rep = solve_bcda(p, SolverOptions(tol=1e-10, x0=x0, record_trace=True, record_iterates=True))
    assert rep.converged
    f = np.array([rec.f_value for rec in rep.trace])
    assert np.all(np.diff(f) <= 1e-12 * (1 + np.abs(f[:-1])))
    # f(x) >= lam ||x||^2 - 2 ||b|| ||x|| bounds the level set of f(x0)
    lam = np.linalg.eigvalsh(np.asarray(p.a) - np.eye(n))[0]
    bn = np.linalg.norm(p.b)
    radius = (bn + np.sqrt(bn * bn + lam * max(f[0], 0.0))) / lam
    assert max(np.linalg.norm(rec.x) for rec in rep.trace) <= radius * (1 + 1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_bcda_reaches_enumerated_solution(seed):
    p = make_random_spd(6, seed)
    (x_star,) = enumerate_solutions(p)
    rep = solve_bcda(p, SolverOptions(tol=1e-12))
    assert rep.converged
    np.testing.assert_allclose(rep.x_final, x_star, atol=1e-9)
    assert verify_solution(p, rep.x_final, 1e-10)


def test_trace_matches_direct_evaluation():
    p = make_random_spd(5, 3)
    rep = solve_bcda(p, SolverOptions(tol=1e-10, record_trace=True, record_iterates=True))
    for rec in rep.trace:
        assert rec.f_value == pytest.approx(eval_f(p, np.array(rec.x)), abs=1e-11)
    assert [rec.update_index for rec in rep.trace] == list(range(len(rep.trace)))
    assert rep.trace[-1].res == pytest.approx(rep.res_final, rel=1e-9)


@pytest.mark.parametrize("method", ["bcda", "mgsm"])
def test_deterministic(method):
    p = make_random_spd(20, 1)
    r1 = solve(p, method)
    r2 = solve(p, method)
    assert r1.it == r2.it and r1.status is r2.status
    assert np.array_equal(r1.x_final, r2.x_final)


def test_x0_not_modified(ex41):
    x0 = np.array([0.6, 1.2])
    solve_bcda(ex41, SolverOptions(x0=x0))
    solve_mgsm(ex41, SolverOptions(x0=x0))
    assert np.array_equal(x0, [0.6, 1.2])


def test_already_converged_start(ex41):
    rep = solve_bcda(ex41, SolverOptions(x0=X41, tol=1e-12))
    assert rep.converged and rep.it == 0 and rep.sweeps == 0


_REFERENCE_RUNS = {
    1000: (2000, 9.1891e-08, 6000, 3.0374e-07),
    1500: (2250, 8.8970e-07, 9000, 3.0432e-07),
    2000: (3000, 7.7050e-07, 12000, 3.0461e-07),
    2500: (3750, 6.8916e-07, 15000, 3.0478e-07),
    3000: (4500, 6.2911e-07, 18000, 3.0490e-07),
}


@pytest.mark.parametrize("n", sorted(_REFERENCE_RUNS))
def test_tridiag_reference_counts_and_residuals(n):
    bcda_it, bcda_res, mgsm_it, mgsm_res = _REFERENCE_RUNS[n]
    p = make_tridiag_example(n)
    rb = solve_bcda(p, SolverOptions(res_check="sweep", certify=False))
    assert rb.it == bcda_it
    assert rb.res_final == pytest.approx(bcda_res, rel=5e-5)
    rm = solve_mgsm(p, SolverOptions(mgsm_sign_at_zero=0.0, certify=False))
    assert rm.it == mgsm_it
    assert rm.res_final == pytest.approx(mgsm_res, rel=5e-5)


def test_default_check_counts():
    its = [solve_bcda(make_tridiag_example(n), SolverOptions(certify=False)).it for n in (1000, 2000, 3000)]
    assert its == [1501, 2002, 3002]


def test_sign_at_zero_choice_matters_for_mgsm(ex41):
    assert solve_mgsm(ex41, SolverOptions(tol=1e-12, mgsm_sign_at_zero=1.0)).it == 2
    assert solve_mgsm(ex41, SolverOptions(tol=1e-12, mgsm_sign_at_zero=0.0)).it == 4


@pytest.mark.parametrize(
    "kwargs",
    [
        {"tol": 0.0},
        {"tol": -1.0},
        {"max_updates": 0},
        {"cycle_window": -1},
        {"res_check": "block"},
        {"mgsm_sign_at_zero": 0.5},
        {"tol": 1.0, "divergence_cap": 0.5},
    ],
)
def test_option_validation(kwargs):
    with pytest.raises(ValueError):
        SolverOptions(**kwargs)


@pytest.mark.parametrize("method", ["bcda", "mgsm"])
def test_zero_rhs_rejected(method):
    with pytest.raises(ZeroRhs):
        solve(AveProblem(2 * np.eye(2), np.zeros(2)), method)


@pytest.mark.parametrize("method", ["bcda", "mgsm"])
def test_x0_dimension_checked(method, ex41):
    with pytest.raises(DimensionMismatch):
        solve(ex41, method, SolverOptions(x0=np.zeros(3)))


def test_unknown_method(ex41):
    with pytest.raises(ValueError):
        solve(ex41, "newton")


@pytest.mark.parametrize("method", ["bcda", "mgsm"])
def test_max_updates(method):
    rep = solve(make_tridiag_example(100), method, SolverOptions(tol=1e-15, max_updates=5))
    assert rep.status is Status.MAX_UPDATES and rep.it == 5


def test_divergence_cap(ex43):
    opts = SolverOptions(x0=np.array([0.1, -1.0]), divergence_cap=1.0)
    rep = solve_mgsm(ex43, opts)
    assert rep.status is Status.DIVERGED
    assert rep.res_final > 1.0


@pytest.mark.parametrize("method", ["bcda", "mgsm"])
def test_degenerate_block_status(method):
    # the nonnegative piece of the pair is singular: a_ij^2 = (a_ii - 1)(a_jj - 1)
    p = AveProblem(np.array([[2.0, 1.0], [1.0, 2.0]]), np.array([1.0, 1.0]))
    rep = solve(p, method)
    assert rep.status is Status.DEGENERATE_BLOCK
    assert rep.message
    assert not rep.converged


def test_verify_solution(ex41):
    assert verify_solution(ex41, X41, 1e-12)
    assert not verify_solution(ex41, np.zeros(2), 1e-3)
    with pytest.raises(DimensionMismatch):
        verify_solution(ex41, np.zeros(3), 1e-3)
