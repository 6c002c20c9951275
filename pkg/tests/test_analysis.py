import mpmath as mp
import numpy as np
import pytest

from rscorr.analysis import (
    crossing_count,
    distinguished_lag,
    growth_record,
    growth_slope,
    growth_table,
    lower_bound_trace,
    mq_norms,
    projection_reproduces_integers,
    verify_lower_bound_recursion,
)
from rscorr.exactmat import LOWER_STEP, matvec
from rscorr.sequences import autocorrelate, generate, moment4


def test_distinguished_lags():
    assert distinguished_lag(2) == 3
    assert distinguished_lag(3) == 5
    assert distinguished_lag(4) == 11


def test_growth_record_level2():
    rec = growth_record(2)
    assert rec.max_abs_a == 1 and rec.argmax_k == 1


@pytest.mark.parametrize("n", range(2, 13))
def test_growth_matches_bruteforce(n):
    rec = growth_record(n)
    a = autocorrelate(generate(n), "direct").values
    assert rec.max_abs_a == int(np.max(np.abs(a[1:])))
    assert int(abs(a[rec.argmax_k])) == rec.max_abs_a
    assert np.all(np.abs(a[1 : rec.argmax_k]) < rec.max_abs_a)  # smallest argmax


@pytest.mark.parametrize("n", range(2, 13))
def test_max_dominates_distinguished_lag(n):
    rec = growth_record(n)
    a = autocorrelate(generate(n)).values
    assert rec.max_abs_a >= abs(int(a[distinguished_lag(n)]))


def test_growth_slope_rough_band():
    # the asymptotic exponent is 0.73028...; finite windows sit visibly lower
    # because the correction term decays only like (|lambda'|/lambda)^(n/2)
    recs = growth_table(8, 14)
    slope = growth_slope(recs)
    assert 0.62 < slope < 0.78


def test_lower_bound_even_constants():
    t = lower_bound_trace("even", 40)
    assert abs(abs(t.lam_const[0]) - 0.38215952) < 1e-6
    assert abs(t.lam_prime_const[0] - mp.mpc(0.19107976, 0.08854102)) < 1e-6
    # second component (the cross-correlation sequence) carries its own pair
    assert abs(t.lam_const[1] - 0.28744961) < 1e-6
    assert abs(t.lam_prime_const[1] - mp.mpc(0.3562751947, -0.3300357859)) < 1e-6
    # first components are real: conjugate symmetry forces Re(b) = -a/2
    with mp.workdps(60):
        assert abs(mp.im(t.lam_const[0])) < 1e-30
        assert abs(mp.re(t.lam_prime_const[0]) + t.lam_const[0] / 2) < 1e-40


def test_lower_bound_odd_constants():
    t = lower_bound_trace("odd", 41)
    assert abs(t.lam_const[0] - 0.63399007) < 1e-6
    # the odd chain's leading constant equals |a| after the sqrt(lambda) shift
    assert abs(t.normalized_leading - 0.38215952) < 1e-6
    assert abs(t.lam_prime_const[0] - mp.mpc(0.18300496, 0.27100844)) < 1e-6


def test_lower_bound_trace_sequence():
    t = lower_bound_trace("even", 8)
    assert t.omega_sequence[0] == (0, 1, 1)
    assert t.omega_sequence[1] == (-1, 3, 1)
    assert t.omega_sequence[2] == (-5, 3, 1)
    assert t.levels == [0, 2, 4, 6, 8]
    to = lower_bound_trace("odd", 9)
    assert to.omega_sequence[0] == (1, 1, -1)
    assert to.omega_sequence[1] == (1, 1, -5)
    assert to.omega_sequence[2] == (1, -7, -13)


@pytest.mark.parametrize("parity,n_max", [("even", 40), ("odd", 41), ("even", 160)])
def test_projection_reproduces_exact_integers(parity, n_max):
    t = lower_bound_trace(parity, n_max)
    assert projection_reproduces_integers(t)


def test_scaled_values_oscillate_inside_envelope():
    # |w_n[0]|/lambda^(n/2) stays within the eigenprojection envelope
    # |a| +- 2|b|(|lambda'|/lambda)^(n/2), which is the true convergence rate
    t = lower_bound_trace("even", 80)
    with mp.workdps(40):
        from rscorr.spectral import solve_characteristic_cubic

        roots = solve_characteristic_cubic()
        q = abs(roots.lam_prime) / roots.lam
        a_mag = abs(t.lam_const[0])
        b_mag = abs(t.lam_prime_const[0])
        for lvl, scaled in zip(t.levels, t.lambda_scaled_values):
            if lvl == 0:
                continue
            envelope = 2 * b_mag * q ** (mp.mpf(lvl) / 2)
            assert abs(scaled - a_mag) <= float(envelope) * (1 + 1e-9)


def test_lower_bound_recursion_oracle():
    report = verify_lower_bound_recursion(14)
    assert report["ok"]
    assert report["checked"] == 13


def test_recursion_two_step_example():
    # omega_2 = step(omega_0), omega_3 = step(omega_1) against hand values
    assert matvec(LOWER_STEP, (0, 1, 1)) == (-1, 3, 1)
    assert matvec(LOWER_STEP, (1, 1, -1)) == (1, 1, -5)


def test_crossing_level1():
    # R(t) = 2 + 2cos(t) crosses level 2 exactly at +-pi/2
    assert crossing_count(1, 0.0, 64).count == 2


def test_crossing_monotone_in_grid():
    prev = 0
    for g in (4 * 1024, 8 * 1024, 16 * 1024, 32 * 1024):
        c = crossing_count(10, 0.0, g).count
        assert c >= prev
        prev = c


def test_crossing_eta_validation():
    with pytest.raises(ValueError):
        crossing_count(8, 0.01)
    with pytest.raises(ValueError):
        crossing_count(8, 0.0, 100)  # below 4*L


def test_crossing_refinement_confirms_roots():
    plain = crossing_count(8, 0.0)
    refined = crossing_count(8, 0.0, refine=True)
    assert refined.count == plain.count
    assert refined.refine_width < 1e-12


def test_crossing_eta_rough_symmetry():
    eta = 2.0**-9
    up = crossing_count(10, eta).count
    dn = crossing_count(10, -eta).count
    assert up <= 2 * dn and dn <= 2 * up


def test_crossing_counts_are_even():
    # R is even in t, so grid sign changes pair up across t=0
    for n in (4, 6, 8, 10):
        assert crossing_count(n, 0.0).count % 2 == 0


def test_mq_norms_exact_entries():
    out = mq_norms(6)
    assert out["m2_squared"] == 2**6
    assert out["m4_fourth"] == moment4(6)
    assert out["f_mu_squared"] == moment4(6) - 4**6
    assert out["m_inf"] ** 2 <= 2 ** (6 + 1) + 1e-9


@pytest.mark.parametrize("n", range(1, 15))
def test_centered_sup_norm_bound(n):
    out = mq_norms(n, q_list=("inf",))
    assert out["f_m_inf"] <= 2.0**n + 1e-9


def test_mq_partial_sum_matches_exact_ratio():
    out = mq_norms(8, h=4.0)
    a = autocorrelate(generate(8)).values
    cut = out["cut"]
    num = 4 * sum(int(a[m]) ** 2 for m in range(1, cut + 1))
    assert out["s_cut"] == pytest.approx(num / out["f_mu_squared"])


def test_m1_m2_ordering():
    out = mq_norms(8)
    # norm monotonicity in q on the circle
    assert out["m1"] <= out["m2"] <= out["m4"] <= out["m_inf"]
