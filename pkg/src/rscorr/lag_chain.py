"""Odd-lag classification and the matrix recursion for correlation triples.

For level n, the odd lags k with |k| < 2^n split into four dyadic classes
tau = 1..4 by (tau-3)*2^(n-1) < k <= (tau-2)*2^(n-1).  Descending a lag one
level selects one of the step matrices A, B, C, D, and the triple

    omega_n(k) = ( auto(k), cross(k'), mirror-cross(k') )

of autocorrelation / cross-correlation coefficients satisfies
omega_n(k_n) = M(tau(k_n)) * omega_{n-1}(k_{n-1}) down to the level-1 seeds
omega_1(1) = (1, 1, -1) and omega_1(-1) = (1, -1, 1).
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactmat import LETTERS, MAT_A, MAT_B, MAT_C, MAT_D, Mat3, matvec

_CLASS_MATRIX = {1: MAT_A, 2: MAT_B, 3: MAT_C, 4: MAT_D}
_CLASS_LETTER = {1: "A", 2: "B", 3: "C", 4: "D"}


def _check_lag(n: int, k: int) -> None:
    if n < 1:
        raise ValueError("level must be >= 1")
    if k % 2 == 0:
        raise ValueError(f"lag {k} is even")
    if not -(1 << n) < k < (1 << n):
        raise ValueError(f"lag {k} out of range for level {n}")


def classify(n: int, k: int) -> int:
    """Class index tau in {1,2,3,4} of an odd lag."""
    _check_lag(n, k)
    h = 1 << (n - 1)
    return (k - 1) // h + 3


def descend(n: int, k: int) -> tuple[int, int]:
    """Companion lag k' (same level) and descended lag (level n-1).

    k' = k + 2^n for classes 1,2 and k - 2^n for classes 3,4; the descended
    lag keeps k for classes 2,3 and takes k' for classes 1,4.
    """
    tau = classify(n, k)
    kp = k + (1 << n) if tau in (1, 2) else k - (1 << n)
    kd = k if tau in (2, 3) else kp
    return kp, kd


def select_matrix(tau: int) -> Mat3:
    """Step matrix for a class index."""
    try:
        return _CLASS_MATRIX[tau]
    except KeyError:
        raise ValueError(f"class index must be 1..4, got {tau}") from None


def chain(n: int, k: int) -> tuple[str, int]:
    """Selector word (product order, highest level first) and the level-1 lag."""
    _check_lag(n, k)
    word = []
    m, kk = n, k
    while m >= 2:
        word.append(_CLASS_LETTER[classify(m, kk)])
        _, kk = descend(m, kk)
        m -= 1
    return "".join(word), kk


def admissible_word(n: int, k: int) -> str:
    """Word of length n-1 realized by the descent chain of lag k."""
    if n < 2:
        raise ValueError("need level >= 2 for a nonempty word")
    return chain(n, k)[0]


@dataclass(frozen=True)
class OmegaVector:
    """Exact integer correlation triple at an odd lag."""

    n: int
    k: int
    entries: tuple[int, int, int]

    @property
    def companion_lag(self) -> int:
        return descend(self.n, self.k)[0] if self.n >= 1 else 0


def seed_triple(k1: int) -> tuple[int, int, int]:
    """Level-1 triples: (1, 1, -1) at lag 1 and its mirror (1, -1, 1) at -1."""
    if k1 == 1:
        return (1, 1, -1)
    if k1 == -1:
        return (1, -1, 1)
    raise ValueError("level-1 lag must be +-1")


def omega_by_recursion(n: int, k: int) -> OmegaVector:
    """Correlation triple via the exact matrix recursion along the descent chain."""
    word, k1 = chain(n, k)
    v = seed_triple(k1)
    for letter in reversed(word):
        v = matvec(LETTERS[letter], v)
    return OmegaVector(n, k, v)


def omega_direct(n: int, k: int, auto_spec, cross_spec) -> OmegaVector:
    """Correlation triple read off precomputed spectra (the convolution oracle).

    auto_spec/cross_spec are CorrelationSpectrum objects for P_n, (P_n, Q_n).
    The third entry is the conj-mirror coefficient, i.e. the cross value at
    the negated companion lag.
    """
    kp, _ = descend(n, k)
    return OmegaVector(n, k, (auto_spec.value(k), cross_spec.value(kp), cross_spec.value(-kp)))


def verify_recursion(n_max: int) -> dict:
    """Exhaustive recursion-vs-oracle comparison over all odd lags, n <= n_max.

    Returns per-class lag counts, total comparisons, and the mismatches list
    (empty on success).
    """
    from .sequences import autocorrelate, crosscorrelate, generate_pair

    class_counts = {1: 0, 2: 0, 3: 0, 4: 0}
    mismatches = []
    total = 0
    for n in range(1, n_max + 1):
        p, q = generate_pair(n)
        a = autocorrelate(p)
        c = crosscorrelate(p, q)
        for k in range(-(1 << n) + 1, 1 << n, 2):
            class_counts[classify(n, k)] += 1
            total += 1
            rec = omega_by_recursion(n, k)
            direct = omega_direct(n, k, a, c)
            if rec.entries != direct.entries:
                mismatches.append((n, k, rec.entries, direct.entries))
    return {"total": total, "class_counts": class_counts, "mismatches": mismatches}
