import pytest

from rscorr.exactmat import (
    ADMISSIBLE_PAIRS,
    GEN_M1,
    GEN_M2,
    GEN_M3,
    GEN_M4,
    IDENT,
    LOWER_STEP,
    MAT_A,
    MAT_B,
    MAT_C,
    MAT_D,
    SWAP,
    canonicalize,
    char_poly,
    is_admissible,
    mat_pow,
    mul,
    random_admissible_word,
    word_product,
)


def test_swap_identities():
    assert mul(SWAP, SWAP) == IDENT
    assert mul(mul(SWAP, MAT_B), SWAP) == MAT_C
    assert mul(mul(SWAP, MAT_A), SWAP) == MAT_D


def test_b_power_identities():
    assert mat_pow(MAT_B, 4) == mat_pow(MAT_B, 2)
    assert mat_pow(MAT_B, 5) == mat_pow(MAT_B, 3)


def test_generator_definitions():
    assert GEN_M1 == mul(MAT_A, SWAP)
    assert GEN_M2 == mul(SWAP, MAT_A)
    assert GEN_M3 == mul(MAT_B, SWAP)
    assert GEN_M4 == mul(SWAP, MAT_B)
    assert mul(GEN_M1, GEN_M1) == mul(MAT_A, MAT_D)


def test_characteristic_polynomials():
    growth = (1, -5, 12, -16)
    assert char_poly(mul(MAT_A, MAT_D)) == growth
    assert char_poly(LOWER_STEP) == growth


def test_mul_examples():
    assert mul(SWAP, SWAP) == IDENT
    assert mul(IDENT, MAT_A) == MAT_A
    assert word_product("AD") == mul(MAT_A, MAT_D)
    assert word_product("BB") == ((0, 1, 0), (0, 1, 0), (0, -1, 0))


def test_word_product_rejects():
    with pytest.raises(ValueError):
        word_product("AXB")
    with pytest.raises(ValueError):
        word_product("")


def test_pair_set():
    expect = {"AC", "AD", "BB", "BA", "CC", "CD", "DA", "DB"}
    assert set(ADMISSIBLE_PAIRS) == expect
    for pair in expect:
        assert is_admissible(pair)
    assert not is_admissible("AB")
    assert not is_admissible("CA")


def test_random_word_determinism_and_rules():
    w1 = random_admissible_word(20, 42)
    w2 = random_admissible_word(20, 42)
    assert w1 == w2 and len(w1) == 20
    assert random_admissible_word(20, 43) != w1
    assert is_admissible(w1)
    assert random_admissible_word(1, 5) in "ABCD"
    assert random_admissible_word(2, 5) in ADMISSIBLE_PAIRS


def test_canonicalize_known_forms():
    # DA realizes the square of the swapped generator: T * M1^2 * T
    form = canonicalize("DA")
    assert (form.delta1, form.delta2) == (1, 1)
    assert form.k_exps == [0, 0] and form.l_exps == [2]
    # BB realizes B^2
    form = canonicalize("BB")
    assert (form.delta1, form.delta2) == (0, 0)
    assert form.k_exps == [2] and form.l_exps == []
    # ACDB realizes the alternating block M1 B M1 B
    form = canonicalize("ACDB")
    assert form.k_exps == [0, 1, 1] and form.l_exps == [1, 1]


def test_canonicalize_rejects_inadmissible():
    with pytest.raises(ValueError):
        canonicalize("AB")


def test_canonicalize_odd_length_words():
    for word in ("A", "D", "CCD", "BADBA"):
        form = canonicalize(word)
        assert form.matrix() == word_product(word)
        assert form.exponent_sum() == len(word)


def test_reduction_bounds_exponents():
    word = "B" * 11  # long B-run forces folding
    form = canonicalize(word).reduce()
    assert all(0 <= k <= 3 for k in form.k_exps)
    assert form.matrix() == word_product(word)


@pytest.mark.parametrize("length", range(2, 21, 2))
def test_canonical_form_property(length):
    # 1000 seeded words per even length: exact matrix equality for both the
    # unreduced and reduced forms, plus the exponent-sum identity
    for trial in range(1000):
        word = random_admissible_word(length, seed=1009 * length + trial)
        form = canonicalize(word)
        target = word_product(word)
        assert form.exponent_sum() == length
        assert form.matrix() == target
        reduced = form.reduce()
        assert reduced.matrix() == target
        assert all(1 <= k <= 3 for k in reduced.k_exps[1:-1])
        assert all(0 <= k <= 3 for k in (reduced.k_exps[0], reduced.k_exps[-1]))
        assert all(l >= 1 for l in reduced.l_exps)
