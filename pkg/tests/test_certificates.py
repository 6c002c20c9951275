import json
import math

import mpmath as mp
import numpy as np
import pytest

from rscorr.certificates import (
    NormCertificate,
    ScaledMat,
    bound_word_norm,
    check_lemma4_mixed,
    check_lemma4_powers,
    default_l_max,
    mp_route_log2_norm,
    sweep_lemma3,
)
from rscorr.exactmat import GEN_M1, MAT_B, mat_pow, mul, random_admissible_word
from rscorr.spectral import named_constants, spectral_norm


def test_default_l_max_matches_thresholds():
    assert default_l_max(1) == 1318902
    assert default_l_max(2) == 991945
    assert default_l_max(3) == 0


def test_scaled_mat_normalization_is_exact():
    m = ScaledMat(np.array(mul(GEN_M1, MAT_B), dtype=float), 0)
    n = m.normalized()
    # power-of-two rescaling: mantissa * 2^exponent reproduces the value exactly
    assert np.array_equal(n.mantissa * 2.0**n.exponent, m.mantissa)
    f = math.sqrt(float(np.sum(n.mantissa**2)))
    assert 1.0 <= f < 2.0


def test_short_sweep_against_direct_norms():
    cert = sweep_lemma3(2, l_max=40, num_samples=10)
    nc = named_constants()
    worst = 0.0
    arg = 0
    with mp.workdps(40):
        for l in range(1, 41):
            m = mat_pow(GEN_M1, l)
            m = mul(m, mat_pow(MAT_B, 2))
            r = float(spectral_norm(m).value / nc["growth_base"] ** (mp.mpf(l + 2) / 2))
            if r > worst:
                worst, arg = r, l
    assert cert.argmax_l == arg
    assert abs(cert.max_ratio - worst) < 1e-12


def test_sweep_exclusion_of_first_power():
    # (l,k) = (1,1) is excluded: the certificate maximum must not come from it
    cert = sweep_lemma3(1, l_max=10, num_samples=5)
    assert cert.detail["excluded"] == [[1, 1]]
    with mp.workdps(40):
        nc = named_constants()
        r11 = float(spectral_norm(mul(GEN_M1, MAT_B)).value / nc["growth_base"])
    assert r11 > 1.0  # the excluded term genuinely violates the bound
    assert cert.max_ratio < 1.0


def test_sweep_partition_determinism():
    base = sweep_lemma3(1, l_max=30000, num_samples=40)
    for parts in (3, 8):
        other = sweep_lemma3(1, l_max=30000, num_samples=40, partitions=parts)
        assert other.max_ratio == base.max_ratio  # bit-identical
        assert other.argmax_l == base.argmax_l
    again = sweep_lemma3(1, l_max=30000, num_samples=40)
    assert again.max_ratio == base.max_ratio


def test_sweep_route_cross_validation_tight():
    cert = sweep_lemma3(2, l_max=20000, num_samples=200)
    assert cert.detail["route_ok"]
    assert cert.detail["route_worst_rel"] < 1e-9


def test_sweep_tail_flag():
    short = sweep_lemma3(1, l_max=1000, num_samples=10)
    assert not short.detail["tail_ok"]  # tail not covered by a short sweep
    assert not short.passed
    assert short.max_ratio + short.error_budget < 1.0  # numeric part clean


def test_sweep_k3_vacuous_analytic():
    cert = sweep_lemma3(3)
    assert cert.passed
    assert cert.detail.get("vacuous")
    assert cert.l_range == (1, 0)


def test_monotone_threshold_formula():
    # beyond the analytic threshold the formula bound c_k/(1+eps)^(l+k) dips
    # below 1, so no sweep ever needs to pass l_max from the constants table
    nc = named_constants()
    eps = float(nc["epsilon"])
    for k in (1, 2, 3):
        for route in ("even", "odd"):
            c = float(nc[f"c_{route}"][k])
            thr = float(nc[f"threshold_{route}"][k])
            l = max(int(math.ceil(thr)), 1)
            assert c / (1 + eps) ** (l + 1 + k) < 1.0


def test_mp_route_matches_exact_norm():
    with mp.workdps(40):
        for l, k in [(2, 1), (5, 2), (9, 3), (16, 1)]:
            m = mul(mat_pow(GEN_M1, l), mat_pow(MAT_B, k))
            exact = mp.log(spectral_norm(m).value, 2)
            assert abs(mp_route_log2_norm(l, k) - exact) < 1e-25


def test_lemma4_powers_certificate():
    cert = check_lemma4_powers()
    assert cert.passed
    assert abs(cert.detail["l1_norm"] - 2 * math.sqrt(2)) < 1e-9
    assert cert.detail["l1_exceeds_base"]
    assert abs(cert.detail["S1_cond"] - 5.61541131) < 1e-6
    assert cert.l_range == (2, 24)
    assert cert.max_ratio < 1.0


def test_lemma4_mixed_certificate():
    cert = check_lemma4_mixed()
    assert cert.passed
    assert abs(cert.max_ratio - 0.92894011) < 1e-6
    assert tuple(cert.detail["worst_term"]) == (3, 1)
    assert abs(cert.detail["reduction_norm"] - 19.97828015) < 1e-6
    assert abs(cert.detail["base_cubed"] - 20.84624870) < 1e-6


def test_certificate_json_schema(tmp_path):
    cert = sweep_lemma3(2, l_max=100, num_samples=5)
    path = tmp_path / "cert.json"
    cert.to_json(path)
    data = json.loads(path.read_text())
    for key in ("kind", "k", "epsilon", "l_range", "max_ratio", "argmax_l",
                "error_budget", "passed", "precision_mode", "runtime_ms"):
        assert key in data
    assert data["l_range"] == [1, 100]
    assert data["k"] == 2


def test_extended_precision_mode():
    d = sweep_lemma3(2, l_max=500, num_samples=5, precision_mode="double")
    e = sweep_lemma3(2, l_max=500, num_samples=5, precision_mode="extended")
    assert e.precision_mode == "extended"
    assert abs(d.max_ratio - e.max_ratio) < 1e-12


def test_bound_word_norm_small():
    res = bound_word_norm("AD")
    assert res.word_length == 2
    assert res.exponent_check
    with mp.workdps(30):
        direct = float(spectral_norm(mul(GEN_M1, GEN_M1)).value)
    assert abs(res.norm - direct) < 1e-9


def test_bound_word_norm_random_batch():
    worst = 0.0
    for seed in range(100):
        res = bound_word_norm(random_admissible_word(40, seed))
        assert res.exponent_check
        worst = max(worst, res.ratio)
    assert worst <= 8.0


def test_bound_word_norm_rejects_inadmissible():
    with pytest.raises(ValueError):
        bound_word_norm("AB")


def test_error_budget_scales_with_range():
    c1 = sweep_lemma3(2, l_max=1000, num_samples=5)
    c2 = sweep_lemma3(2, l_max=2000, num_samples=5)
    assert c2.error_budget == pytest.approx(2 * c1.error_budget)
