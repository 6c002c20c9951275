"""Certified numeric linear algebra for the 3x3 certificate machinery.

Everything here runs in mpmath extended precision (default 50 significant
digits).  Spectral norms of exact integer matrices come with a genuine
enclosure: the largest eigenvalue of M^T M is bracketed by exact rational
sign evaluation of the (exact, integer) characteristic cubic.  Norms of
high-precision complex matrices carry a first-order error estimate instead;
the quoted constants only need ten significant digits, so the slack is
enormous.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp
import numpy as np

from .exactmat import GEN_M1, MAT_A, MAT_B, Mat3, char_poly, mul

DEFAULT_DPS = 50
DEFAULT_EPSILON = 5e-7


def _workdps(dps):
    return mp.workdps(dps)


# -- cubic solvers ------------------------------------------------------------

def real_cubic_roots_sorted(c2, c1, c0):
    """All-real roots of x^3 + c2 x^2 + c1 x + c0, descending (trig form)."""
    c2, c1, c0 = mp.mpf(c2), mp.mpf(c1), mp.mpf(c0)
    q = -c2 / 3
    p2 = (c2 * c2 - 3 * c1) * 2 / 3  # = sum (root - q)^2
    if p2 <= 0:
        return [q, q, q]
    p = mp.sqrt(p2 / 6)
    # det of the scaled, shifted companion evaluated via the cubic itself:
    # r = -p(q)/ (2 p^3)
    val = ((q + c2) * q + c1) * q + c0
    r = -val / (2 * p**3)
    r = max(mp.mpf(-1), min(mp.mpf(1), r))
    phi = mp.acos(r) / 3
    third = 2 * mp.pi / 3
    roots = [q + 2 * p * mp.cos(phi), q + 2 * p * mp.cos(phi - third), q + 2 * p * mp.cos(phi + third)]
    return sorted(roots, reverse=True)


def cubic_roots(c2, c1, c0):
    """Roots of the real monic cubic x^3 + c2 x^2 + c1 x + c0.

    Returns three mpc/mpf values; uses the trigonometric form when all roots
    are real and Cardano plus quadratic factorization otherwise.
    """
    c2, c1, c0 = mp.mpf(c2), mp.mpf(c1), mp.mpf(c0)
    # depressed cubic t^3 + pt + q, x = t - c2/3
    p = c1 - c2 * c2 / 3
    q = 2 * c2**3 / 27 - c2 * c1 / 3 + c0
    disc = -(4 * p**3 + 27 * q * q)
    if disc >= 0:
        return real_cubic_roots_sorted(c2, c1, c0)
    # one real root via Cardano with real cube roots
    s = mp.sqrt(-disc / 108)
    u = -q / 2 + s
    v = -q / 2 - s
    t = mp.sign(u) * mp.cbrt(abs(u)) + mp.sign(v) * mp.cbrt(abs(v))
    x1 = t - c2 / 3
    # refine and factor out: x^2 + bx + c with b = c2 + x1, c = -c0/x1
    x1 = mp.findroot(lambda x: ((x + c2) * x + c1) * x + c0, x1)
    b = c2 + x1
    c = c1 + b * x1
    disc2 = mp.sqrt(b * b - 4 * c)
    return [x1, (-b + disc2) / 2, (-b - disc2) / 2]


@dataclass
class CubicRoots:
    """Roots of the growth cubic x^3 - 5x^2 + 12x - 16."""

    lam: mp.mpf  # real root 2.75217177...
    lam_prime: mp.mpc  # complex root with positive imaginary part
    residual: mp.mpf  # max |p(root)| over the three roots

    @property
    def conjugate(self) -> mp.mpc:
        return mp.conj(self.lam_prime)


def solve_characteristic_cubic(dps: int = DEFAULT_DPS) -> CubicRoots:
    """High-precision roots of x^3 - 5x^2 + 12x - 16.

    The real root governs the lag-correlation growth rate; it also has the
    closed form ((71+6*sqrt(177))^(1/3) - (-71+6*sqrt(177))^(1/3) + 5)/3.
    """
    with _workdps(dps):
        roots = cubic_roots(-5, 12, -16)
        lam = [r for r in roots if abs(mp.im(r)) < mp.mpf(10) ** (-dps // 2)][0]
        lam = mp.re(lam)
        lamp = [r for r in roots if mp.im(r) > 0][0]
        poly = lambda x: ((x - 5) * x + 12) * x - 16
        residual = max(abs(poly(lam)), abs(poly(lamp)))
        return CubicRoots(lam, lamp, residual)


# -- spectral norms -----------------------------------------------------------

@dataclass
class SpectralNorm:
    value: mp.mpf
    error_bound: mp.mpf
    certified: bool  # True when the enclosure comes from exact sign brackets

    def __float__(self) -> float:
        return float(self.value)


def _as_exact_rows(m):
    """Rows of m as exact Fractions, or None if entries are not real-exact."""
    if isinstance(m, (tuple, list)):
        return [[Fraction(int(x)) for x in row] for row in m]
    if isinstance(m, np.ndarray):
        if np.issubdtype(m.dtype, np.integer):
            return [[Fraction(int(x)) for x in row] for row in m]
        if np.issubdtype(m.dtype, np.floating):
            # binary floats are exact dyadic rationals
            return [[Fraction(float(x)) for x in row] for row in m]
    return None


def _mpf_to_fraction(x) -> Fraction:
    sign, man, exp, _ = mp.mpf(x)._mpf_
    if man == 0:
        return Fraction(0)
    v = Fraction(-man if sign else man)
    return v * Fraction(2) ** exp if exp >= 0 else v / (Fraction(2) ** -exp)


def _bracket_largest_root(c2: Fraction, c1: Fraction, c0: Fraction, approx, dps: int):
    """Certify the largest real root of monic x^3+c2x^2+c1x+c0 near approx.

    Returns (lo, hi) dyadic bracket with p(lo) < 0 < p(hi), and p, p', p''
    all positive at hi (so no root beyond hi).  Raises on failure.
    """
    def ev(x: Fraction) -> Fraction:
        return ((x + c2) * x + c1) * x + c0

    scale = max(abs(approx), mp.mpf(1))
    delta = scale * mp.mpf(10) ** (-(dps - 10))
    for _ in range(6):
        lo = _mpf_to_fraction(approx - delta)
        hi = _mpf_to_fraction(approx + delta)
        p_hi = ev(hi)
        dp_hi = 3 * hi * hi + 2 * c2 * hi + c1
        ddp_hi = 6 * hi + 2 * c2
        if ev(lo) < 0 < p_hi and dp_hi > 0 and ddp_hi > 0:
            return lo, hi
        delta *= 1024
    raise ArithmeticError("could not certify largest-root bracket")


def spectral_norm(m, dps: int = DEFAULT_DPS) -> SpectralNorm:
    """Largest singular value with an error enclosure.

    Exact integer (or exactly-represented float) input: the Gram matrix and
    its characteristic cubic are exact, and the largest root is bracketed by
    exact rational sign checks -- the enclosure is rigorous for the matrix as
    represented.  mpmath matrix input: closed-form eigenvalue plus a
    first-order residual estimate.
    """
    with _workdps(dps):
        rows = None if isinstance(m, mp.matrix) else _as_exact_rows(m)
        if rows is not None:
            g = [[sum(rows[k][i] * rows[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
            c2 = -(g[0][0] + g[1][1] + g[2][2])
            c1 = (g[0][0] * g[1][1] - g[0][1] * g[1][0]
                  + g[0][0] * g[2][2] - g[0][2] * g[2][0]
                  + g[1][1] * g[2][2] - g[1][2] * g[2][1])
            c0 = -(g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
                   - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
                   + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]))
            lam_max = real_cubic_roots_sorted(_frac_to_mpf(c2), _frac_to_mpf(c1), _frac_to_mpf(c0))[0]
            lam_max = _polish_root(c2, c1, c0, lam_max)
            if lam_max <= 0:
                return SpectralNorm(mp.mpf(0), mp.mpf(0), True)
            try:
                lo, hi = _bracket_largest_root(c2, c1, c0, lam_max, dps)
                v_lo, v_hi = mp.sqrt(_frac_to_mpf(lo)), mp.sqrt(_frac_to_mpf(hi))
                return SpectralNorm((v_lo + v_hi) / 2, (v_hi - v_lo) / 2 + mp.mpf(10) ** (-dps + 2), True)
            except ArithmeticError:
                val = mp.sqrt(lam_max)
                return SpectralNorm(val, val * mp.mpf(10) ** (-(dps - 10)), False)
        g = m.H * m
        lam_max = _hermitian_largest_eig(g)
        val = mp.sqrt(lam_max) if lam_max > 0 else mp.mpf(0)
        return SpectralNorm(val, (val + 1) * mp.mpf(10) ** (-(dps - 10)), False)


def _frac_to_mpf(x) -> mp.mpf:
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


def _polish_root(c2: Fraction, c1: Fraction, c0: Fraction, x0) -> mp.mpf:
    c2f, c1f, c0f = _frac_to_mpf(c2), _frac_to_mpf(c1), _frac_to_mpf(c0)
    x = mp.mpf(x0)
    for _ in range(4):
        f = ((x + c2f) * x + c1f) * x + c0f
        df = (3 * x + 2 * c2f) * x + c1f
        if df == 0:
            break
        x -= f / df
    return x


def _hermitian_largest_eig(g) -> mp.mpf:
    p1 = abs(g[0, 1]) ** 2 + abs(g[0, 2]) ** 2 + abs(g[1, 2]) ** 2
    diag = [mp.re(g[i, i]) for i in range(3)]
    if p1 == 0:
        return max(diag)
    q = sum(diag) / 3
    p2 = sum((d - q) ** 2 for d in diag) + 2 * p1
    p = mp.sqrt(p2 / 6)
    b = (g - q * mp.eye(3)) / p
    r = mp.re(mp.det(b)) / 2
    r = max(mp.mpf(-1), min(mp.mpf(1), r))
    return q + 2 * p * mp.cos(mp.acos(r) / 3)


def mp_spectral_norm(m, dps: int = DEFAULT_DPS) -> mp.mpf:
    """Bare largest singular value of an mpmath matrix."""
    with _workdps(dps):
        return mp.sqrt(max(_hermitian_largest_eig(m.H * m), mp.mpf(0)))


# -- eigensystems -------------------------------------------------------------

@dataclass
class EigenSystem:
    matrix: Mat3
    eigenvalues: list  # descending modulus; positive-imag first within a pair
    vectors: mp.matrix  # columns, third component normalized to 1 when possible
    residual_bound: mp.mpf
    reconstruction_error: mp.mpf

    def vector(self, j: int) -> list:
        return [self.vectors[i, j] for i in range(3)]


def eigensystem(m: Mat3, dps: int = DEFAULT_DPS) -> EigenSystem:
    """Eigen decomposition of an exact 3x3 integer matrix with distinct roots.

    Eigenvector columns are scaled so the third component equals 1, falling
    back to largest-component scaling when the third component vanishes.
    """
    with _workdps(dps):
        _, mc2, mc1, mc0 = char_poly(m)
        roots = cubic_roots(mc2, mc1, mc0)
        roots.sort(key=lambda r: (-abs(r), -mp.im(r)))
        if min(abs(roots[i] - roots[j]) for i in range(3) for j in range(i + 1, 3)) < mp.mpf(10) ** (-dps + 8):
            raise ValueError("repeated eigenvalue; eigensystem requires distinct roots")
        mm = mp.matrix(m)
        cols = []
        for mu in roots:
            r = mm - mu * mp.eye(3)
            rows = [[r[i, 0], r[i, 1], r[i, 2]] for i in range(3)]
            best = None
            for a, b in ((0, 1), (0, 2), (1, 2)):
                v = _cross(rows[a], rows[b])
                nv = sum(abs(x) ** 2 for x in v)
                if best is None or nv > best[0]:
                    best = (nv, v)
            v = best[1]
            vmax = max(abs(x) for x in v)
            if abs(v[2]) > vmax * mp.mpf(10) ** (-dps // 2):
                v = [x / v[2] for x in v]
            else:
                pivot = [x for x in v if abs(x) == vmax][0]
                v = [x / pivot for x in v]
            cols.append(v)
        s = mp.matrix(3, 3)
        for j, v in enumerate(cols):
            for i in range(3):
                s[i, j] = v[i]
        residual = mp.mpf(0)
        for j, mu in enumerate(roots):
            diff = mm * mp.matrix(cols[j]) - mu * mp.matrix(cols[j])
            residual = max(residual, mp.norm(diff) / mp.norm(mp.matrix(cols[j])))
        lam_diag = mp.diag(roots)
        recon = s * lam_diag * (s**-1) - mm
        recon_err = max(abs(recon[i, j]) for i in range(3) for j in range(3))
        return EigenSystem(m, roots, s, residual, recon_err)


def _cross(a, b):
    return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]


# -- named constants ----------------------------------------------------------

_GROWTH_MATRIX: Mat3 = mul(GEN_M1, GEN_M1)  # = A*D, characteristic cubic x^3-5x^2+12x-16


def named_constants(epsilon: float = DEFAULT_EPSILON, dps: int = DEFAULT_DPS) -> dict:
    """Constants of the norm-certificate machinery for a given epsilon.

    Includes the growth cubic roots, the eigenvector-matrix norms, the
    per-exponent constants c_k (even route) and c'_k (odd route), the sweep
    thresholds log(c)/log(1+eps) - k, the exponent alpha = log2(lambda)/2 and
    its epsilon-inflated upper version, and the norms of the eigenvector
    matrix of M1*B used by the fixed-power certificate.
    """
    with _workdps(dps):
        eps = mp.mpf(epsilon)
        roots = solve_characteristic_cubic(dps)
        lam = roots.lam
        es = eigensystem(_GROWTH_MATRIX, dps)
        s = es.vectors
        s_inv = s**-1
        s_norm = mp_spectral_norm(s, dps)
        m1 = mp.matrix(GEN_M1)
        c_even = {}
        c_odd = {}
        thr_even = {}
        thr_odd = {}
        log1e = mp.log(1 + eps)
        for k in (1, 2, 3):
            bk = mp.matrix(_int_pow(MAT_B, k))
            c_even[k] = s_norm * mp_spectral_norm(s_inv * bk, dps) / lam ** (mp.mpf(k) / 2)
            c_odd[k] = s_norm * mp_spectral_norm(s_inv * m1 * bk, dps) / lam ** (mp.mpf(k + 1) / 2)
            thr_even[k] = mp.log(c_even[k]) / log1e - k
            thr_odd[k] = mp.log(c_odd[k]) / log1e - k
        m1b = mul(GEN_M1, MAT_B)
        es1 = eigensystem(m1b, dps)
        s1_norm = mp_spectral_norm(es1.vectors, dps)
        s1_inv_norm = mp_spectral_norm(es1.vectors**-1, dps)
        growth_base = (1 + eps) ** 2 * lam
        return {
            "epsilon": eps,
            "lambda": lam,
            "lambda_prime": roots.lam_prime,
            "alpha": mp.log(lam) / (2 * mp.log(2)),
            "alpha_upper": mp.log(growth_base) / (2 * mp.log(2)),
            "growth_base": growth_base,
            "S_norm": s_norm,
            "c_even": c_even,
            "c_odd": c_odd,
            "threshold_even": thr_even,
            "threshold_odd": thr_odd,
            "S1_norm": s1_norm,
            "S1_inv_norm": s1_inv_norm,
            "S1_cond": s1_norm * s1_inv_norm,
            "m1b_top_eig": es1.eigenvalues[0],
            "dps": dps,
        }


def _int_pow(m: Mat3, e: int) -> Mat3:
    out = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    for _ in range(e):
        out = mul(out, m)
    return out
