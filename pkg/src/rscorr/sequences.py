"""Rudin-Shapiro coefficient sequences and exact correlation spectra.

The pair recursion P_0 = Q_0 = 1, P_n = P_{n-1} + z^(2^(n-1)) Q_{n-1},
Q_n = P_{n-1} - z^(2^(n-1)) Q_{n-1} produces +-1 coefficient vectors of
length 2^n.  Correlation spectra are exact integers; the transform route
rounds to nearest integer behind a residual guard, the direct route is the
quadratic-time oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_MAX_LEVEL = 30  # 2^30 int8 coefficients ~ 1 GiB; raise at your own risk
DIRECT_LIMIT = 1 << 14  # longest sequence the quadratic oracle accepts by default
ROUNDING_MARGIN = 0.25


class RoundingMarginError(ArithmeticError):
    """Transform-route residual too large to round safely to integers."""


@dataclass(frozen=True)
class CoefficientSequence:
    n: int
    which: str  # "P" or "Q"
    coeffs: np.ndarray  # int8, length 2^n, entries +-1

    def __len__(self) -> int:
        return self.coeffs.size

    def __post_init__(self):
        if self.which not in ("P", "Q"):
            raise ValueError("which must be 'P' or 'Q'")
        if self.coeffs.size != 1 << self.n:
            raise ValueError("coefficient vector length is not 2^n")


def generate(n: int, which: str = "P", max_level: int = DEFAULT_MAX_LEVEL) -> CoefficientSequence:
    """Exact coefficient vector of P_n or Q_n."""
    if not 0 <= n <= max_level:
        raise ValueError(f"level {n} outside supported range [0, {max_level}]")
    if which not in ("P", "Q"):
        raise ValueError("which must be 'P' or 'Q'")
    p = np.ones(1, dtype=np.int8)
    q = np.ones(1, dtype=np.int8)
    for _ in range(n):
        p, q = np.concatenate([p, q]), np.concatenate([p, -q])
    return CoefficientSequence(n, which, p if which == "P" else q)


def generate_pair(n: int, max_level: int = DEFAULT_MAX_LEVEL) -> tuple[CoefficientSequence, CoefficientSequence]:
    return generate(n, "P", max_level), generate(n, "Q", max_level)


@dataclass(frozen=True)
class CorrelationSpectrum:
    """Exact integer correlation coefficients for one level.

    kind "auto": values[k] = sum_j c_j c_{j+k} for 0 <= k < 2^n, mirrored to
    negative lags by symmetry.
    kind "cross": values[k] = sum_j p_j q_{j+k} (the lag-k coefficient of
    conj(P)*Q on |z| = 1); negative lags are stored separately because the
    cross spectrum is not symmetric.
    """

    n: int
    kind: str  # "auto" or "cross"
    values: np.ndarray  # int64, lags 0 .. 2^n - 1
    neg_values: np.ndarray | None = None  # int64, lags -1 .. -(2^n - 1), cross only

    @property
    def symmetric(self) -> bool:
        return self.kind == "auto"

    def value(self, k: int) -> int:
        L = 1 << self.n
        if abs(k) >= L:
            return 0
        if k >= 0:
            return int(self.values[k])
        if self.symmetric:
            return int(self.values[-k])
        return int(self.neg_values[-k - 1])

    def lag_range(self) -> range:
        L = 1 << self.n
        return range(-L + 1, L)


def _guarded_round(v: np.ndarray) -> np.ndarray:
    r = np.rint(v)
    resid = float(np.max(np.abs(v - r))) if v.size else 0.0
    if resid >= ROUNDING_MARGIN:
        raise RoundingMarginError(
            f"max rounding residual {resid:.3g} >= {ROUNDING_MARGIN}; "
            "insufficient float precision at this level"
        )
    return r.astype(np.int64)


def autocorrelate(seq: CoefficientSequence, method: str = "auto") -> CorrelationSpectrum:
    """Exact autocorrelation spectrum of a +-1 sequence.

    method "direct" is the quadratic-summation oracle (length-capped),
    "fft" the O(L log L) transform route with integer-rounding guard,
    "auto" picks direct for short inputs and fft otherwise.
    """
    x = seq.coeffs
    L = x.size
    if method == "auto":
        method = "direct" if L <= 1 << 10 else "fft"
    if method == "direct":
        if L > DIRECT_LIMIT:
            raise ValueError(f"direct oracle limited to length {DIRECT_LIMIT}")
        full = np.correlate(x.astype(np.int64), x.astype(np.int64), "full")
        vals = full[L - 1 :].copy()
    elif method == "fft":
        f = np.fft.rfft(x.astype(np.float64), 2 * L)
        v = np.fft.irfft(f * np.conj(f), 2 * L)[:L]
        vals = _guarded_round(v)
    else:
        raise ValueError(f"unknown method {method!r}")
    return CorrelationSpectrum(seq.n, "auto", vals)


def crosscorrelate(p: CoefficientSequence, q: CoefficientSequence, method: str = "auto") -> CorrelationSpectrum:
    """Spectrum of conj(P)*Q on the unit circle: value(k) = sum_j p_j q_{j+k}."""
    if p.n != q.n:
        raise ValueError(f"level mismatch: {p.n} != {q.n}")
    xp = p.coeffs
    xq = q.coeffs
    L = xp.size
    if method == "auto":
        method = "direct" if L <= 1 << 10 else "fft"
    if method == "direct":
        if L > DIRECT_LIMIT:
            raise ValueError(f"direct oracle limited to length {DIRECT_LIMIT}")
        # full[L-1+k] = sum_j p_j q_{j+k}
        full = np.correlate(xq.astype(np.int64), xp.astype(np.int64), "full")
    elif method == "fft":
        fp = np.fft.rfft(xp.astype(np.float64), 2 * L)
        fq = np.fft.rfft(xq.astype(np.float64), 2 * L)
        v = np.fft.irfft(np.conj(fp) * fq, 2 * L)
        # circular index m: lag m for 0 <= m < L, lag m - 2L for m >= L
        full = np.concatenate([_guarded_round(v[L + 1 :]), _guarded_round(v[:L])])
    else:
        raise ValueError(f"unknown method {method!r}")
    pos = full[L - 1 :].copy()
    neg = full[: L - 1][::-1].copy()  # neg[i] = lag -(i+1)
    return CorrelationSpectrum(p.n, "cross", pos, neg)


def parseval_check(n: int, method: str = "auto") -> bool:
    """Coefficient-level statement of |P_n|^2 + |Q_n|^2 = 2^(n+1).

    True iff autocorrelations of P_n and Q_n cancel at every nonzero lag and
    their zero lags sum to 2^(n+1).
    """
    p, q = generate_pair(n)
    ap = autocorrelate(p, method).values
    aq = autocorrelate(q, method).values
    s = ap + aq
    return int(s[0]) == 1 << (n + 1) and not np.any(s[1:])


def moment4(n: int, method: str = "auto") -> int:
    """Exact sum of squared autocorrelation values over all lags.

    Equals the normalized fourth-moment integral of |P_n| over the circle;
    moment4(n) / 4^n tends to 4/3.
    """
    a = autocorrelate(generate(n), method).values
    total = int(a[0]) ** 2
    if n == 0:
        return total
    # chunked exact accumulation; chunk sized so int64 partial sums cannot wrap
    sq = a[1:].astype(np.int64) ** 2
    peak = int(np.max(sq)) if sq.size else 1
    chunk = max(1, (1 << 62) // max(peak, 1))
    for lo in range(0, sq.size, chunk):
        total += 2 * int(np.sum(sq[lo : lo + chunk]))
    return total


# -- text/CSV interchange ----------------------------------------------------

def write_coefficients(path, seq: CoefficientSequence) -> None:
    """Text format: header line 'n=<n> which=<P|Q>', then +1/-1 tokens."""
    with open(path, "w") as fh:
        fh.write(f"n={seq.n} which={seq.which}\n")
        fh.write(" ".join("+1" if c > 0 else "-1" for c in seq.coeffs) + "\n")


def read_coefficients(path) -> CoefficientSequence:
    with open(path) as fh:
        header = fh.readline().split()
        fields = dict(part.split("=", 1) for part in header)
        n = int(fields["n"])
        which = fields["which"]
        coeffs = np.array([int(tok) for tok in fh.readline().split()], dtype=np.int8)
    seq = CoefficientSequence(n, which, coeffs)
    if np.any(np.abs(coeffs) != 1):
        raise ValueError("coefficients must be +-1")
    return seq


def write_spectrum_csv(path, spec: CorrelationSpectrum) -> None:
    """CSV columns k,value; non-negative lags only."""
    with open(path, "w") as fh:
        fh.write("k,value\n")
        for k, v in enumerate(spec.values):
            fh.write(f"{k},{int(v)}\n")
