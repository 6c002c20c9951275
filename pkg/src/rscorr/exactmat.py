"""Exact 3x3 integer matrix algebra for the correlation step matrices.

The four step matrices A, B, C, D drive the one-level descent of the
correlation triple (see lag_chain).  Together with the swap matrix T they
generate everything needed for the norm certificates: the derived
generators M1 = A*T, ..., M4 = T*B, and the canonical factorization of any
admissible product into T^d1 * B^k1 * M1^l1 * B^k2 * ... * B^k_last * T^d2.

Matrices are tuples of tuples of Python ints, so products are exact at any
size without an explicit wide-integer backend.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

Mat3 = tuple[tuple[int, int, int], ...]

IDENT: Mat3 = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
SWAP: Mat3 = ((1, 0, 0), (0, 0, 1), (0, 1, 0))  # T: exchanges rows/cols 2 and 3

# Step matrices for lag classes 1..4.  C carries (2,3)-entry 1, which is the
# value forced by the convolution oracle and by the identity C = T*B*T.
MAT_A: Mat3 = ((0, 0, 1), (2, -1, 0), (2, 1, 0))
MAT_B: Mat3 = ((0, 0, 1), (0, -1, 0), (0, 1, 0))
MAT_C: Mat3 = ((0, 1, 0), (0, 0, 1), (0, 0, -1))
MAT_D: Mat3 = ((0, 1, 0), (2, 0, 1), (2, 0, -1))

LETTERS: dict[str, Mat3] = {"A": MAT_A, "B": MAT_B, "C": MAT_C, "D": MAT_D}

# Admissible successors: adjacent product pairs must lie in
# {AC, AD, BA, BB, CC, CD, DA, DB}.
NEXT_LETTERS: dict[str, str] = {"A": "CD", "B": "AB", "C": "CD", "D": "AB"}

ADMISSIBLE_PAIRS = frozenset(
    left + right for left in "ABCD" for right in NEXT_LETTERS[left]
)


def mul(a: Mat3, b: Mat3) -> Mat3:
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3))
        for i in range(3)
    )


def mat_pow(m: Mat3, e: int) -> Mat3:
    if e < 0:
        raise ValueError("negative exponent")
    out = IDENT
    base = m
    while e:
        if e & 1:
            out = mul(out, base)
        base = mul(base, base)
        e >>= 1
    return out


def matvec(m: Mat3, v: tuple[int, int, int]) -> tuple[int, int, int]:
    return (
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    )


# Derived generators.
GEN_M1: Mat3 = mul(MAT_A, SWAP)
GEN_M2: Mat3 = mul(SWAP, MAT_A)
GEN_M3: Mat3 = mul(MAT_B, SWAP)
GEN_M4: Mat3 = mul(SWAP, MAT_B)

# Two-step descent matrix of the lower-bound recursion (analysis module).
LOWER_STEP: Mat3 = ((2, -1, 0), (2, 1, 2), (-2, -1, 2))


def char_poly(m: Mat3) -> tuple[int, int, int, int]:
    """Coefficients (1, -trace, minor-sum, -det) of det(xI - m), exact."""
    tr = m[0][0] + m[1][1] + m[2][2]
    minors = (
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
        + m[0][0] * m[2][2] - m[0][2] * m[2][0]
        + m[1][1] * m[2][2] - m[1][2] * m[2][1]
    )
    det = (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )
    return (1, -tr, minors, -det)


def is_admissible(word: str) -> bool:
    if not word or any(c not in LETTERS for c in word):
        return False
    return all(word[i : i + 2] in ADMISSIBLE_PAIRS for i in range(len(word) - 1))


def word_product(word) -> Mat3:
    """Exact left-to-right product of a word over {A, B, C, D}."""
    out = IDENT
    for c in word:
        try:
            out = mul(out, LETTERS[c])
        except KeyError:
            raise ValueError(f"unknown letter {c!r}") from None
    if not word:
        raise ValueError("empty word")
    return out


def random_admissible_word(length: int, seed: int) -> str:
    """Seeded random word honoring the successor rules.

    First letter uniform over {A,B,C,D}, each successor uniform over the two
    allowed continuations.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    rng = random.Random(seed)
    out = [rng.choice("ABCD")]
    for _ in range(length - 1):
        out.append(rng.choice(NEXT_LETTERS[out[-1]]))
    return "".join(out)


@dataclass
class CanonicalForm:
    """Product shape T^d1 * B^k[0] * M1^l[0] * B^k[1] * ... * B^k[-1] * T^d2.

    `k_exps` has one more entry than `l_exps`; boundary B-exponents may be 0,
    interior ones are >= 1 by construction.  In the unreduced form the
    exponents sum to the originating word length; `reduce()` folds B-powers
    with B^4 = B^2 so that every exponent lands in {0,1,2,3}.
    """

    delta1: int
    delta2: int
    k_exps: list[int]
    l_exps: list[int]
    reduced: bool = False

    @property
    def blocks(self) -> list[tuple[int, int]]:
        return list(zip(self.k_exps[:-1], self.l_exps))

    @property
    def trailing_k(self) -> int:
        return self.k_exps[-1]

    def exponent_sum(self) -> int:
        return sum(self.k_exps) + sum(self.l_exps)

    def reduce(self) -> "CanonicalForm":
        """Fold B-exponents via B^4 = B^2 into {0,1,2,3}."""
        folded = [k if k < 4 else 2 + (k & 1) for k in self.k_exps]
        return CanonicalForm(self.delta1, self.delta2, folded, list(self.l_exps), True)

    def matrix(self) -> Mat3:
        out = mat_pow(SWAP, self.delta1)
        for k, l in zip(self.k_exps, self.l_exps + [None]):
            out = mul(out, mat_pow(MAT_B, k))
            if l is not None:
                out = mul(out, mat_pow(GEN_M1, l))
        return mul(out, mat_pow(SWAP, self.delta2))


def canonicalize(word: str) -> CanonicalForm:
    """Rewrite an admissible word into its canonical B/M1 form, exactly.

    Two passes: expand letters via A = M1*T, B = B, C = T*B*T, D = T*M1,
    then cancel interior T pairs (the admissibility rules guarantee interior
    T's always meet in pairs).  The returned form multiplies back to
    word_product(word) with exact integer equality, and its exponents sum to
    len(word).
    """
    if not is_admissible(word):
        raise ValueError(f"word {word!r} violates the successor rules")
    expansion = {"A": "MT", "B": "B", "C": "TBT", "D": "TM"}
    symbols: list[str] = []
    for c in word:
        for s in expansion[c]:
            if s == "T" and symbols and symbols[-1] == "T":
                symbols.pop()  # T*T = I
            else:
                symbols.append(s)
    delta1 = 1 if symbols and symbols[0] == "T" else 0
    delta2 = 1 if len(symbols) > delta1 and symbols[-1] == "T" else 0
    core = symbols[delta1 : len(symbols) - delta2]
    if "T" in core:
        raise AssertionError("interior swap survived cancellation")

    # Run-length encode the core, starting and ending on a B-run (possibly empty).
    k_exps = [0]
    l_exps: list[int] = []
    for s in core:
        if s == "B":
            if l_exps and len(k_exps) == len(l_exps):
                k_exps.append(1)
            else:
                k_exps[-1] += 1
        else:  # M1 symbol
            if len(k_exps) > len(l_exps):
                l_exps.append(1)
            else:
                l_exps[-1] += 1
    if len(k_exps) == len(l_exps):
        k_exps.append(0)
    return CanonicalForm(delta1, delta2, k_exps, l_exps)
