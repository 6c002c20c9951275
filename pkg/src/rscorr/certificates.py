"""Norm-bound certificates for products of the derived generators.

The central object is the machine-verified statement

    ||M1^l B^k|| <= ((1+eps)^2 * lambda)^((l+k)/2)

over an explicit l-range (with (l,k) = (1,1) excluded), plus the finite
checks for powers of M1*B and the mixed products M1*B*M1^l*B^k.  The sweep
maintains M1^l B^k as a float64 mantissa with a power-of-two exponent
(renormalization is exact), evaluates the spectral norm per step in closed
form, and accounts a linear first-order error budget.  Sampled steps are
cross-validated against the independent eigendecomposition route in
extended precision, and the scan maximum is re-certified the same way.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict

import mpmath as mp
import numba
import numpy as np

from .exactmat import GEN_M1, MAT_B, Mat3, is_admissible, mat_pow, mul, word_product
from .spectral import DEFAULT_EPSILON, mp_spectral_norm, named_constants, spectral_norm

# Per-multiply relative error allowance in units of roundoff (documented
# budget constant; the multiply itself contributes ~3 ulp, the closed-form
# norm evaluation a few more, amplification through the well-conditioned
# generator covers the rest).
ERR_UNITS_PER_STEP = 20
SAFETY_FACTOR = 8
UNIT_ROUNDOFF = 2.0 ** -53

DEFAULT_PRECISION_MODE = os.environ.get("RSCORR_PRECISION", "double")


@dataclass
class ScaledMat:
    """3x3 float64 mantissa times 2^exponent, with a relative error bound.

    Renormalization multiplies by exact powers of two only, so it never
    perturbs the represented value; `err` grows by ERR_UNITS_PER_STEP units
    of roundoff per generator multiply, compounded linearly.
    """

    mantissa: np.ndarray
    exponent: int
    err: float = 0.0

    def normalized(self) -> "ScaledMat":
        f = float(np.sqrt(np.sum(self.mantissa**2)))
        if f == 0:
            return self
        shift = math.floor(math.log2(f))
        return ScaledMat(self.mantissa * 2.0**-shift, self.exponent + shift, self.err)

    def log2_spectral_norm(self, dps: int = 40) -> float:
        sn = spectral_norm(self.mantissa, dps)
        return float(mp.log(sn.value, 2)) + self.exponent


@dataclass
class NormCertificate:
    kind: str  # lemma3-even | lemma3-odd | lemma4-power | lemma4-mixed
    k: int
    epsilon: float
    l_range: tuple[int, int]
    max_ratio: float
    argmax_l: int
    error_budget: float
    passed: bool
    precision_mode: str = "double"
    runtime_ms: float = 0.0
    detail: dict | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["l_range"] = list(self.l_range)
        return d

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict(), indent=2, default=float)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text


@numba.njit(cache=True, nogil=True)
def _sweep_kernel(state, exponent, l_lo, l_hi, k, log2_base_half, skip_l1k1,
                  sample_ls, sample_out):  # pragma: no cover - jitted
    a00 = state[0, 0]; a01 = state[0, 1]; a02 = state[0, 2]
    a10 = state[1, 0]; a11 = state[1, 1]; a12 = state[1, 2]
    a20 = state[2, 0]; a21 = state[2, 1]; a22 = state[2, 2]
    e = exponent
    best = -1.0e300
    best_l = -1
    si = 0
    n_samples = sample_ls.shape[0]
    while si < n_samples and sample_ls[si] < l_lo:
        si += 1
    for l in range(l_lo, l_hi + 1):
        if l > l_lo:
            # left-multiply by M1 = [[0,1,0],[2,0,-1],[2,0,1]]
            b00 = a10; b01 = a11; b02 = a12
            b10 = 2.0 * a00 - a20; b11 = 2.0 * a01 - a21; b12 = 2.0 * a02 - a22
            b20 = 2.0 * a00 + a20; b21 = 2.0 * a01 + a21; b22 = 2.0 * a02 + a22
            a00 = b00; a01 = b01; a02 = b02
            a10 = b10; a11 = b11; a12 = b12
            a20 = b20; a21 = b21; a22 = b22
            f2 = (a00 * a00 + a01 * a01 + a02 * a02 + a10 * a10 + a11 * a11
                  + a12 * a12 + a20 * a20 + a21 * a21 + a22 * a22)
            while f2 > 4.0:
                a00 *= 0.5; a01 *= 0.5; a02 *= 0.5
                a10 *= 0.5; a11 *= 0.5; a12 *= 0.5
                a20 *= 0.5; a21 *= 0.5; a22 *= 0.5
                f2 *= 0.25
                e += 1
        # largest eigenvalue of the Gram matrix, closed form
        g00 = a00 * a00 + a10 * a10 + a20 * a20
        g11 = a01 * a01 + a11 * a11 + a21 * a21
        g22 = a02 * a02 + a12 * a12 + a22 * a22
        g01 = a00 * a01 + a10 * a11 + a20 * a21
        g02 = a00 * a02 + a10 * a12 + a20 * a22
        g12 = a01 * a02 + a11 * a12 + a21 * a22
        p1 = g01 * g01 + g02 * g02 + g12 * g12
        if p1 == 0.0:
            lam = max(g00, max(g11, g22))
        else:
            q = (g00 + g11 + g22) / 3.0
            p2 = (g00 - q) ** 2 + (g11 - q) ** 2 + (g22 - q) ** 2 + 2.0 * p1
            p = math.sqrt(p2 / 6.0)
            b00_ = (g00 - q) / p; b11_ = (g11 - q) / p; b22_ = (g22 - q) / p
            b01_ = g01 / p; b02_ = g02 / p; b12_ = g12 / p
            detb = (b00_ * (b11_ * b22_ - b12_ * b12_)
                    - b01_ * (b01_ * b22_ - b12_ * b02_)
                    + b02_ * (b01_ * b12_ - b11_ * b02_))
            r = detb / 2.0
            if r > 1.0:
                r = 1.0
            elif r < -1.0:
                r = -1.0
            lam = q + 2.0 * p * math.cos(math.acos(r) / 3.0)
        log2norm = 0.5 * math.log2(lam) + e
        if si < n_samples and sample_ls[si] == l:
            sample_out[si] = log2norm
            si += 1
        if skip_l1k1 and l == 1 and k == 1:
            continue
        log2ratio = log2norm - (l + k) * log2_base_half
        if log2ratio > best:
            best = log2ratio
            best_l = l
    return best, best_l


_EIGEN_CACHE: dict = {}


def _growth_eigensystem(dps: int):
    key = dps
    if key not in _EIGEN_CACHE:
        from .spectral import eigensystem

        es = eigensystem(mul(GEN_M1, GEN_M1), dps)
        _EIGEN_CACHE[key] = (es.eigenvalues, es.vectors, es.vectors**-1)
    return _EIGEN_CACHE[key]


def _mp_power_matrix(l: int, k: int, dps: int) -> mp.matrix:
    """M1^l * B^k via the eigendecomposition of M1^2, in extended precision."""
    with mp.workdps(dps):
        eigenvalues, s, s_inv = _growth_eigensystem(dps)
        half = l // 2
        lam_pow = mp.diag([eigenvalues[j] ** half for j in range(3)])
        out = s * lam_pow * s_inv
        if l % 2:
            out = mp.matrix(GEN_M1) * out
        return out * mp.matrix(mat_pow(MAT_B, k))


def mp_route_log2_norm(l: int, k: int, dps: int = 40):
    """log2 ||M1^l B^k|| through the diagonalized route (independent of the sweep)."""
    with mp.workdps(dps):
        m = _mp_power_matrix(l, k, dps)
        return mp.log(mp_spectral_norm(m, dps), 2)


def _seed_state(l0: int, k: int, dps: int) -> ScaledMat:
    """ScaledMat for M1^l0 B^k; exact for l0 = 1, eigen route otherwise."""
    if l0 == 1:
        m = np.array(mul(GEN_M1, mat_pow(MAT_B, k)), dtype=np.float64)
        return ScaledMat(m, 0).normalized()
    with mp.workdps(dps):
        m = _mp_power_matrix(l0, k, dps)  # real matrix, tiny imaginary residue
        log2f = mp.log(mp.sqrt(sum(abs(m[i, j]) ** 2 for i in range(3) for j in range(3))), 2)
        shift = int(mp.floor(log2f))
        mant = np.array([[float(mp.re(m[i, j]) * mp.mpf(2) ** -shift) for j in range(3)] for i in range(3)])
        return ScaledMat(mant, shift)


def default_l_max(k: int, epsilon: float = DEFAULT_EPSILON, dps: int = 40) -> int:
    """Smallest sweep end covered by the analytic tail for both parities."""
    nc = named_constants(epsilon, dps)
    thr = max(nc["threshold_even"][k], nc["threshold_odd"][k])
    return max(int(mp.ceil(thr)) - 1, 0) if thr > 0 else 0


def sweep_lemma3(k: int, epsilon: float = DEFAULT_EPSILON, l_max: int | None = None,
                 partitions: int = 1, num_samples: int = 1000, dps: int = 40,
                 precision_mode: str | None = None) -> NormCertificate:
    """Certify ||M1^l B^k|| <= ((1+eps)^2 lambda)^((l+k)/2) for 1 <= l <= l_max.

    Covers both parities of l numerically ((l,k) = (1,1) excluded); `passed`
    additionally requires the analytic tail condition, i.e. that every
    l > l_max is covered by c_k <= (1+eps)^(l+k).  The incremental scan runs
    in float64 with a linear error budget; the maximum and an evenly spaced
    sample set are re-verified against the eigendecomposition route in
    extended precision.  Partitions split the range; each one is seeded
    through the eigen route and results merge by max.
    """
    if k not in (1, 2, 3):
        raise ValueError("k must be 1, 2 or 3")
    precision_mode = precision_mode or DEFAULT_PRECISION_MODE
    t0 = time.perf_counter()
    nc = named_constants(epsilon, max(dps, 40))
    if l_max is None:
        l_max = default_l_max(k, epsilon, dps)
    log2_base_half = float(mp.log(nc["growth_base"], 2)) / 2.0
    tail_threshold = float(max(nc["threshold_even"][k], nc["threshold_odd"][k]))
    tail_ok = l_max + 1 >= tail_threshold

    if l_max < 1:
        runtime = (time.perf_counter() - t0) * 1000
        return NormCertificate(
            kind="lemma3-even", k=k, epsilon=epsilon, l_range=(1, l_max),
            max_ratio=0.0, argmax_l=0, error_budget=0.0, passed=bool(tail_ok),
            precision_mode=precision_mode, runtime_ms=runtime,
            detail={"vacuous": True, "tail_threshold": tail_threshold},
        )

    sample_ls = np.unique(np.linspace(1, l_max, min(num_samples, l_max)).astype(np.int64))
    sample_out = np.full(sample_ls.size, np.nan)

    partitions = max(1, min(partitions, l_max))
    bounds = np.linspace(1, l_max + 1, partitions + 1).astype(np.int64)
    jobs = []
    for p in range(partitions):
        lo, hi = int(bounds[p]), int(bounds[p + 1]) - 1
        if lo > hi:
            continue
        seed = _seed_state(lo, k, max(dps, 40))
        jobs.append((lo, hi, seed))

    def run(job):
        lo, hi, seed = job
        return _sweep_kernel(seed.mantissa, seed.exponent, lo, hi, k,
                             log2_base_half, k == 1, sample_ls, sample_out)

    if len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=len(jobs)) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(jobs[0])]

    best_log2, best_l = max(results)
    steps = l_max
    budget = SAFETY_FACTOR * ERR_UNITS_PER_STEP * UNIT_ROUNDOFF * steps

    # re-certify the scan maximum through the independent route
    wdps = max(dps, 40)
    with mp.workdps(wdps):
        refined = mp.mpf(2) ** (mp_route_log2_norm(best_l, k, wdps)
                                - (best_l + k) * mp.log(nc["growth_base"], 2) / 2)
        max_ratio = float(refined)

    # cross-validation of sampled steps (difference taken in extended
    # precision so the comparison is not polluted by float64 log resolution)
    worst_rel = 0.0
    checked = 0
    with mp.workdps(wdps):
        for l, log2n in zip(sample_ls, sample_out):
            if math.isnan(log2n) or (k == 1 and l == 1):
                continue
            delta = mp.mpf(log2n) - mp_route_log2_norm(int(l), k, wdps)
            rel = abs(float(mp.mpf(2) ** delta - 1))
            worst_rel = max(worst_rel, rel)
            checked += 1
    route_ok = worst_rel < 1e-9

    if precision_mode == "extended":
        with mp.workdps(wdps):
            lo = max(1, best_l - 50)
            hi = min(l_max, best_l + 50)
            for l in range(lo, hi + 1):
                if k == 1 and l == 1:
                    continue
                r = mp.mpf(2) ** (mp_route_log2_norm(l, k, wdps)
                                  - (l + k) * mp.log(nc["growth_base"], 2) / 2)
                max_ratio = max(max_ratio, float(r))

    passed = bool(max_ratio + budget < 1.0 and tail_ok and route_ok)
    runtime = (time.perf_counter() - t0) * 1000
    return NormCertificate(
        kind="lemma3-even", k=k, epsilon=epsilon, l_range=(1, l_max),
        max_ratio=max_ratio, argmax_l=int(best_l), error_budget=budget,
        passed=passed, precision_mode=precision_mode, runtime_ms=runtime,
        detail={
            "tail_threshold": tail_threshold,
            "tail_ok": bool(tail_ok),
            "route_samples": checked,
            "route_worst_rel": worst_rel,
            "route_ok": bool(route_ok),
            "partitions": partitions,
            "scan_log2_ratio": best_log2,
            "covers_both_parities": True,
            "excluded": [[1, 1]] if k == 1 else [],
        },
    )


def check_lemma4_powers(epsilon: float = DEFAULT_EPSILON, dps: int = 50) -> NormCertificate:
    """Certify ||(M1 B)^l|| <= ((1+eps)^2 lambda)^l for l >= 2.

    Direct certified norms for 2 <= l <= 24; for l >= 25 the analytic branch
    ||S1|| ||S1^-1|| ((1+sqrt(17))/2)^l takes over.  Also records that l = 1
    genuinely fails: ||M1 B|| = 2*sqrt(2) exceeds the base.
    """
    t0 = time.perf_counter()
    nc = named_constants(epsilon, dps)
    with mp.workdps(dps):
        base = nc["growth_base"]
        m1b = mul(GEN_M1, MAT_B)
        sn1 = spectral_norm(m1b, dps)
        l1_fails = bool(sn1.value > base)
        worst = 0.0
        arg = 0
        err_acc = 0.0
        mat = m1b
        for l in range(2, 25):
            mat = mul(mat, m1b)
            sn = spectral_norm(mat, dps)
            ratio = float(sn.value / base**l)
            err_acc = max(err_acc, float(sn.error_bound / base**l))
            if ratio > worst:
                worst, arg = ratio, l
        cond = nc["S1_cond"]
        top = nc["m1b_top_eig"]
        # tail: cond <= (base/top)^l for all l >= 25; base/top > 1 so l = 25 suffices
        tail_ok = bool(cond <= (base / top) ** 25)
        passed = bool(l1_fails and worst + err_acc < 1.0 and tail_ok)
        runtime = (time.perf_counter() - t0) * 1000
        return NormCertificate(
            kind="lemma4-power", k=0, epsilon=epsilon, l_range=(2, 24),
            max_ratio=worst, argmax_l=arg, error_budget=err_acc, passed=passed,
            precision_mode="extended", runtime_ms=runtime,
            detail={
                "l1_norm": float(sn1.value),
                "l1_exceeds_base": l1_fails,
                "S1_cond": float(cond),
                "tail_ok": tail_ok,
            },
        )


def check_lemma4_mixed(epsilon: float = DEFAULT_EPSILON, dps: int = 50) -> NormCertificate:
    """Certify ||M1 B M1^l B^k|| <= ((1+eps)^2 lambda)^((l+k+2)/2).

    Direct certified norms for the fifteen terms 1 <= l <= 5, 1 <= k <= 3;
    l >= 6 reduces through the split at M1*B*M1^4, whose norm must stay below
    the cubed base.
    """
    t0 = time.perf_counter()
    nc = named_constants(epsilon, dps)
    with mp.workdps(dps):
        base = nc["growth_base"]
        m1b = mul(GEN_M1, MAT_B)
        worst = 0.0
        arg = (0, 0)
        err_acc = 0.0
        for l in range(1, 6):
            left = mul(m1b, mat_pow(GEN_M1, l))
            for k in range(1, 4):
                mat = mul(left, mat_pow(MAT_B, k))
                sn = spectral_norm(mat, dps)
                denom = base ** (mp.mpf(l + k + 2) / 2)
                ratio = float(sn.value / denom)
                err_acc = max(err_acc, float(sn.error_bound / denom))
                if ratio > worst:
                    worst, arg = ratio, (l, k)
        reduce_mat = mul(m1b, mat_pow(GEN_M1, 4))
        sn_red = spectral_norm(reduce_mat, dps)
        base_cubed = base**3
        reduction_ok = bool(sn_red.value < base_cubed)
        passed = bool(worst + err_acc < 1.0 and reduction_ok)
        runtime = (time.perf_counter() - t0) * 1000
        return NormCertificate(
            kind="lemma4-mixed", k=0, epsilon=epsilon, l_range=(1, 5),
            max_ratio=worst, argmax_l=arg[0], error_budget=err_acc, passed=passed,
            precision_mode="extended", runtime_ms=runtime,
            detail={
                "worst_term": list(arg),
                "reduction_norm": float(sn_red.value),
                "base_cubed": float(base_cubed),
                "reduction_ok": reduction_ok,
            },
        )


@dataclass
class WordNormBound:
    word_length: int
    norm: float
    bound_base: float  # ((1+eps)^2 lambda)^(n/2)
    ratio: float
    cap: float
    exponent_check: bool


def bound_word_norm(word: str, epsilon: float = DEFAULT_EPSILON, cap: float = 8.0,
                    dps: int = 40) -> WordNormBound:
    """Norm of an admissible word product against cap * base^(n/2).

    The cap covers the boundary factors of the canonical form (at most
    ||B^k1|| * ||B^k_last|| <= 3 plus one peeled letter of norm 2*sqrt(2));
    the observed ratio is reported so callers can tighten it empirically.
    """
    if not is_admissible(word):
        raise ValueError(f"word {word!r} violates the successor rules")
    n = len(word)
    with mp.workdps(dps):
        nc = named_constants(epsilon, dps)
        norm = spectral_norm(word_product(word), dps).value
        base = nc["growth_base"] ** (mp.mpf(n) / 2)
        ratio = float(norm / base)
        return WordNormBound(n, float(norm), float(base), ratio, cap, bool(ratio <= cap))
