"""Growth tables, lower-bound constants, and level-crossing counts.

Ties the exact spectra to the asymptotic statements: per-level maxima of
the correlation coefficients and their fitted growth exponent, the exact
integer two-step recursion at the distinguished lags k_n = (2*2^n +- 1)/3
with its eigenprojection constants, and certified lower bounds on the
number of solutions of |P_n(e^it)|^2 = (1+eta) 2^n.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath as mp
import numpy as np

from .exactmat import LOWER_STEP, matvec
from .sequences import (
    CoefficientSequence,
    autocorrelate,
    crosscorrelate,
    generate,
    generate_pair,
    moment4,
)
from .spectral import DEFAULT_DPS, eigensystem


def distinguished_lag(n: int) -> int:
    """k_n = (2*2^n + (-1)^n)/3, the lag driving the lower-bound recursion."""
    return (2 * (1 << n) + (1 if n % 2 == 0 else -1)) // 3


# -- growth of the maximal coefficients ---------------------------------------

@dataclass
class GrowthRecord:
    n: int
    max_abs_a: int
    argmax_k: int  # smallest positive lag attaining the max
    max_abs_b: int
    argmax_k_b: int  # smallest |lag| attaining the max; positive on ties
    log2_ratio: float  # log2(max_abs_a) / n


def growth_record(n: int, method: str = "fft") -> GrowthRecord:
    p, q = generate_pair(n)
    a = autocorrelate(p, method).values
    mags = np.abs(a[1:])
    max_a = int(mags.max())
    arg_a = int(np.argmax(mags)) + 1
    c = crosscorrelate(p, q, method)
    pos = np.abs(c.values[1:])
    neg = np.abs(c.neg_values)
    max_b = int(max(pos.max(), neg.max()))
    cands = []
    if pos.max() == max_b:
        cands.append((int(np.argmax(pos)) + 1, 1))
    if neg.max() == max_b:
        cands.append((int(np.argmax(neg)) + 1, -1))
    lag_abs, sign = min(cands)
    return GrowthRecord(n, max_a, arg_a, max_b, sign * lag_abs,
                        float(np.log2(max_a)) / n if max_a else 0.0)


def growth_table(n_lo: int, n_hi: int, method: str = "fft") -> list[GrowthRecord]:
    if not 1 <= n_lo <= n_hi:
        raise ValueError("need 1 <= n_lo <= n_hi")
    return [growth_record(n, method) for n in range(n_lo, n_hi + 1)]


def growth_slope(records: list[GrowthRecord], use: str = "a") -> float:
    """Least-squares slope of log2(max coefficient) against the level."""
    ns = np.array([r.n for r in records], dtype=float)
    ys = np.array([np.log2(r.max_abs_a if use == "a" else r.max_abs_b) for r in records])
    return float(np.polyfit(ns, ys, 1)[0])


# -- lower-bound recursion and constants --------------------------------------

@dataclass
class LowerBoundTrace:
    """Exact two-step iteration at the distinguished lags plus eigenprojection.

    omega_sequence[i] is the integer triple at level parity_start + 2i.  The
    projection writes component j of the triple at level n as

        lam_const[j] * lambda^(steps) + 2*Re(lam_prime_const[j] * lambda'^(steps))

    with steps = (n - parity_start)/2, which reproduces the integers exactly.
    leading_constant is lam_const[0]; for the odd chain the sequence grows
    like (leading_constant/sqrt(lambda)) * lambda^(n/2).
    """

    parity: str
    levels: list[int]
    omega_sequence: list[tuple[int, int, int]]
    lam_const: tuple  # mpc per component
    lam_prime_const: tuple
    lambda_scaled_values: list[float] = field(default_factory=list)

    @property
    def leading_constant(self):
        return self.lam_const[0]

    @property
    def normalized_leading(self):
        """Coefficient of lambda^(n/2) for the first component."""
        from .spectral import solve_characteristic_cubic

        lam = solve_characteristic_cubic().lam
        return self.lam_const[0] / mp.sqrt(lam) if self.parity == "odd" else self.lam_const[0]


def lower_bound_trace(parity: str, n_max: int, dps: int = DEFAULT_DPS) -> LowerBoundTrace:
    """Iterate the exact two-step recursion and project onto the eigenbasis.

    Seeds: (0, 1, 1) at level 0 for the even chain, (1, 1, -1) at level 1 for
    the odd chain; each step multiplies by the exact integer matrix
    [[2,-1,0],[2,1,2],[-2,-1,2]].  The projection constants come from
    decomposing the seed in the eigenbasis; per component j they are
    vectors[j, i] * (S^-1 seed)[i] for the dominant and the complex
    eigenvalue.
    """
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    start = 0 if parity == "even" else 1
    seed = (0, 1, 1) if parity == "even" else (1, 1, -1)
    levels = [start]
    seq = [seed]
    w = seed
    while levels[-1] + 2 <= n_max:
        w = matvec(LOWER_STEP, w)
        levels.append(levels[-1] + 2)
        seq.append(w)
    with mp.workdps(dps):
        es = eigensystem(LOWER_STEP, dps)
        s = es.vectors
        u = (s**-1) * mp.matrix(seed)
        lam_const = tuple(s[j, 0] * u[0] for j in range(3))
        lamp_const = tuple(s[j, 1] * u[1] for j in range(3))
        lam = mp.re(es.eigenvalues[0])
        scaled = [float(abs(seq[i][0]) / lam ** (mp.mpf(levels[i]) / 2)) for i in range(len(seq))]
    return LowerBoundTrace(parity, levels, seq, lam_const, lamp_const, scaled)


def projection_reproduces_integers(trace: LowerBoundTrace, dps: int = DEFAULT_DPS) -> bool:
    """Exactness check: the eigen expansion must reproduce every stored triple."""
    with mp.workdps(dps):
        es = eigensystem(LOWER_STEP, dps)
        lam, lamp = es.eigenvalues[0], es.eigenvalues[1]
        tol = mp.mpf(10) ** (-(dps // 2))
        for steps, triple in enumerate(trace.omega_sequence):
            for j in range(3):
                pred = (trace.lam_const[j] * lam**steps
                        + 2 * mp.re(trace.lam_prime_const[j] * lamp**steps))
                if abs(pred - triple[j]) > tol * max(1, abs(triple[j])):
                    return False
    return True


def verify_lower_bound_recursion(n_max: int) -> dict:
    """Exact oracle check of the two-step recursion at the distinguished lags.

    For each n in 2..n_max, compares the directly computed correlation triple
    at k_n against the matrix step applied to the level n-2 triple.  Returns
    {"ok": bool, "checked": int, "first_mismatch": ... or None}.
    """
    if n_max > 16:
        raise ValueError("oracle range capped at 16")
    triples = {}
    for n in range(0, n_max + 1):
        L = 1 << n
        p, q = generate_pair(n)
        a = autocorrelate(p)
        c = crosscorrelate(p, q)
        if n == 0:
            triples[n] = (0, 1, 1)  # level-0 convention: k_0 = 1, k_0' = 0
            continue
        k = distinguished_lag(n)
        kp = k - L
        triples[n] = (a.value(k), c.value(kp), c.value(-kp))
    checked = 0
    for n in range(2, n_max + 1):
        expect = matvec(LOWER_STEP, triples[n - 2])
        if expect != triples[n]:
            return {"ok": False, "checked": checked, "first_mismatch": (n, triples[n], expect)}
        checked += 1
    return {"ok": True, "checked": checked, "first_mismatch": None}


# -- level crossings -----------------------------------------------------------

@dataclass
class CrossingReport:
    n: int
    eta: float
    count: int  # certified lower bound: strict sign changes on the grid
    grid_size: int
    refined: bool
    refine_width: float | None = None


def _sample_power_on_circle(coeffs: np.ndarray, grid_size: int) -> np.ndarray:
    """|P(e^{it})|^2 at t = 2 pi m / G via one padded transform."""
    vals = np.fft.fft(coeffs.astype(np.float64), grid_size)
    return vals.real**2 + vals.imag**2


def crossing_count(n: int, eta: float = 0.0, grid_size: int | None = None,
                   refine: bool = False, seq: CoefficientSequence | None = None) -> CrossingReport:
    """Lower bound on the number of solutions of R(t) = (1+eta) 2^n in (-pi, pi).

    Counts strict sign changes of R - (1+eta)2^n on a uniform grid; each
    change brackets a distinct root, so the count is a certified lower
    bound.  The sample at t = pi (outside the open interval) is excluded.
    With refine=True every bracket is bisected to width 1e-12 and the count
    is re-confirmed on the refined roots.
    """
    if abs(eta) > 2.0**-8:
        raise ValueError("|eta| must be <= 2^-8")
    L = 1 << n
    if grid_size is None:
        grid_size = 4 * L
    if grid_size < 4 * L:
        raise ValueError(f"grid too coarse: need at least {4 * L} points")
    p = seq if seq is not None else generate(n)
    r = _sample_power_on_circle(p.coeffs, grid_size)
    level = (1.0 + eta) * 2.0**n
    f = r - level
    g = grid_size
    half = g // 2
    # linear order over (-pi, pi); for even g the sample at t = pi is dropped
    ms = np.concatenate([np.arange(half + 1, g), np.arange(0, half if g % 2 == 0 else half + 1)])
    angles = 2 * np.pi * ms / g
    angles[: g - half - 1] -= 2 * np.pi
    lin = f[ms]
    # samples that hit a root exactly carry no usable sign; drop them so an
    # alternation across them still counts as one bracketed root
    keep = lin != 0.0
    lin = lin[keep]
    angles = angles[keep]
    sign_change = lin[:-1] * lin[1:] < 0
    count = int(np.sum(sign_change))
    width = None
    if refine and count:
        idx = np.nonzero(sign_change)[0]
        lo = angles[idx]
        hi = angles[idx + 1]
        flo = lin[idx]
        coeffs = p.coeffs.astype(np.float64)
        target_width = 1e-12
        for _ in range(64):
            if np.max(hi - lo) < target_width:
                break
            mid = 0.5 * (lo + hi)
            z = np.exp(-1j * mid)
            pv = np.zeros_like(z)
            for cj in coeffs[::-1]:
                pv = pv * z + cj
            fmid = (pv.real**2 + pv.imag**2) - level
            take_lo = (flo * fmid) > 0
            lo = np.where(take_lo, mid, lo)
            flo = np.where(take_lo, fmid, flo)
            hi = np.where(take_lo, hi, mid)
        width = float(np.max(hi - lo))
        count = int(lo.size)
    return CrossingReport(n, eta, count, grid_size, bool(refine), width)


# -- integral norms ------------------------------------------------------------

def mq_norms(n: int, q_list=(1, 2, 4, "inf"), grid_factor: int = 16, h: float | None = None) -> dict:
    """Normalized circle norms of P_n plus the oscillation statistics.

    M2 and M4 are exact (squared / fourth powers are integers); M1 and the
    sup norm are dense-grid samples at grid_factor * 2^n points.  For the
    centered function f = R - 2^n the report carries mu = M2(f) (exact square)
    and the cosine-coefficient partial sum s_cut = sum_{m<=cut} (2 a_m)^2/mu^2
    at cut = floor((2^n - 1)/h); h defaults to 2^((2*alpha-1) n) with alpha
    the growth exponent log2(lambda)/2.
    """
    L = 1 << n
    p = generate(n)
    a = autocorrelate(p).values
    m4 = moment4(n)
    out: dict = {"n": n, "grid": grid_factor * L}
    r = _sample_power_on_circle(p.coeffs, grid_factor * L)
    mod = np.sqrt(r)
    if 1 in q_list:
        out["m1"] = float(np.mean(mod))
    if 2 in q_list:
        out["m2_squared"] = 1 << n
        out["m2"] = float(np.sqrt(1 << n))
    if 4 in q_list:
        out["m4_fourth"] = m4
        out["m4"] = float(m4) ** 0.25
        out["m4_ratio_4n"] = m4 / 4.0**n
    if "inf" in q_list or float("inf") in q_list:
        out["m_inf"] = float(np.max(mod))
    mu_sq = m4 - 4**n  # exact: squared L2 norm of f = R - 2^n
    out["f_mu_squared"] = mu_sq
    out["f_mu"] = float(mu_sq) ** 0.5
    out["f_m_inf"] = float(np.max(np.abs(r - 2.0**n)))
    if h is None:
        alpha = 0.7302852
        h = 2.0 ** ((2 * alpha - 1) * n)
    cut = int((L - 1) / h)
    out["h"] = h
    out["cut"] = cut
    num = 4 * int(np.sum((a[1 : cut + 1].astype(object)) ** 2)) if cut >= 1 else 0
    out["s_cut"] = float(num / mu_sq) if mu_sq else 0.0
    return out
