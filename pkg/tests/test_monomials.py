import itertools
import random

import pytest
from hypothesis import given, strategies as st

from toricbound import (
    Binomial,
    ConfigError,
    MultiMonomial,
    PnMonomial,
    ResourceCapExceeded,
    enumerate_pn_variables,
    flatten,
    is_invariant,
    is_relation,
    row_block_replace,
    validate_rep,
    weight_matrix,
)
from toricbound.monomials import (
    format_monomial,
    format_pn_monomial,
    parse_binomial,
    parse_monomial,
    parse_pn_monomial,
    random_invariant_monomial,
)


def mono(rep, text):
    return parse_monomial(rep, text)


def pn(rep, text):
    return parse_pn_monomial(rep, text)


def test_weight_matrix_lookups(rep1, rep2):
    assert weight_matrix(mono(rep1, "x|y")) == (((1,),), ((-1,),))
    assert weight_matrix(mono(rep1, "x*y|x*y")) == (((1,), (-1,)), ((1,), (-1,)))
    assert weight_matrix(mono(rep2, "x1*x4|x2*x3")) == (((1, 0), (0, -1)), ((-1, 0), (0, 1)))


def test_invariance_examples(rep1, rep2):
    assert is_invariant(mono(rep1, "x|y"))
    assert not is_invariant(mono(rep1, "x|x"))
    assert is_invariant(mono(rep2, "x1*x4|x2*x3"))


def test_rows_are_canonical(rep1):
    assert mono(rep1, "y*x|x*y") == mono(rep1, "x*y|y*x")


def test_ragged_rows_rejected(rep1):
    with pytest.raises(ConfigError):
        mono(rep1, "x*y|x")


def test_flatten_examples(rep1):
    a = flatten(pn(rep1, "(x|y)(y|x)"))
    assert a.rows == ((0, 1), (0, 1))
    assert a == flatten(pn(rep1, "(x*y|x*y)"))
    empty = flatten(PnMonomial.one(rep1, 3))
    assert (empty.n, empty.degree) == (3, 0)


def test_mixed_n_rejected(rep1):
    with pytest.raises(ConfigError):
        PnMonomial(rep1, 2, (mono(rep1, "x*y"),))


def test_is_relation_examples(rep1):
    F, G = pn(rep1, "(x|y)(y|x)"), pn(rep1, "(x*y|x*y)")
    assert is_relation(Binomial(F, G))
    assert not is_relation(Binomial(pn(rep1, "(x|y)"), pn(rep1, "(y|x)")))
    assert is_relation(Binomial(F, F))


def test_row_block_replace_examples(rep1):
    m, b = mono(rep1, "x|y"), mono(rep1, "y|x")
    assert row_block_replace(m, {0, 1}, b) == b
    assert row_block_replace(m, set(), b) == m
    m4, b4 = mono(rep1, "x|y|x|y"), mono(rep1, "x|x|y|x")
    out = row_block_replace(m4, {2, 3}, b4)
    assert out == mono(rep1, "x|y|y|x")
    assert is_invariant(out)


def test_row_block_replace_errors(rep1):
    with pytest.raises(ValueError, match="degree"):
        row_block_replace(mono(rep1, "x|y"), {0}, mono(rep1, "x*y|x*y"))
    with pytest.raises(ValueError, match="zero-sum"):
        row_block_replace(mono(rep1, "x*y|x*y"), {0}, mono(rep1, "x*x|y*y"))


def brute_force_variables(rep, n, dcap):
    out = []
    for d in range(1, dcap + 1):
        rows = list(itertools.combinations_with_replacement(range(rep.k), d))
        for choice in itertools.product(rows, repeat=n):
            f = MultiMonomial(rep, choice)
            if is_invariant(f):
                out.append(f)
    return out


def test_enumerate_small_cases(rep1):
    assert [format_monomial(f) for f in enumerate_pn_variables(rep1, 1, 2)] == ["x*y"]
    assert [format_monomial(f) for f in enumerate_pn_variables(rep1, 2, 1)] == ["x|y", "y|x"]
    got = {format_monomial(f) for f in enumerate_pn_variables(rep1, 2, 2)}
    assert got == {"x|y", "y|x", "x*x|y*y", "x*y|x*y", "y*y|x*x"}


@pytest.mark.parametrize("n, dcap", [(1, 4), (2, 3), (3, 2), (4, 2)])
def test_enumerate_matches_brute_force(rep1, rep2, n, dcap):
    for rep in (rep1, rep2):
        if rep is rep2 and n * dcap > 6:
            continue
        got = enumerate_pn_variables(rep, n, dcap)
        assert got == brute_force_variables(rep, n, dcap)


def test_enumerate_limit(rep2):
    with pytest.raises(ResourceCapExceeded) as info:
        enumerate_pn_variables(rep2, 3, 2, limit=10)
    assert len(info.value.partial) == 10


def test_text_round_trip(rep1, rep2):
    for text in ["x*y|x*y", "x|y"]:
        assert format_monomial(mono(rep1, text)) == text
    F = pn(rep2, "(x1*x2|x3*x4)(x1|x2)")
    assert pn(rep2, format_pn_monomial(F)) == F
    assert format_pn_monomial(PnMonomial.one(rep1, 2)) == "1"
    b = parse_binomial(rep1, "(x|y)(y|x) = (x*y|x*y)")
    assert is_relation(b)
    assert parse_binomial(rep1, "1 = (x|y)").lhs == PnMonomial.one(rep1, 2)


@pytest.mark.parametrize("text", ["(x|y", "x|y", "(x|y) = ", "(x|y)(q|y) = 1", "1 = 1"])
def test_bad_text(rep1, text):
    with pytest.raises(ConfigError):
        parse_binomial(rep1, text) if "=" in text else pn(rep1, text)


def test_division_and_gcd(rep1):
    F = pn(rep1, "(x|y)(x|y)(y|x)")
    G = pn(rep1, "(x|y)(x*y|x*y)")
    assert F.gcd(G) == pn(rep1, "(x|y)")
    assert F / pn(rep1, "(x|y)") == pn(rep1, "(x|y)(y|x)")
    with pytest.raises(ValueError):
        G / pn(rep1, "(y|x)")
    common, rest = Binomial(F, G).reduced()
    assert common == pn(rep1, "(x|y)") and rest.lhs.gcd(rest.rhs).size == 0


# ---------------------------------------------------------------- properties

REP1 = validate_rep(1, [(1,), (-1,)], ["x", "y"])
REP2 = validate_rep(2, [(1, 0), (-1, 0), (0, 1), (0, -1)])


@st.composite
def monomials(draw, rep=None):
    rep = rep or draw(st.sampled_from([REP1, REP2]))
    n = draw(st.integers(1, 4))
    d = draw(st.integers(0, 6))
    rows = draw(st.lists(st.lists(st.integers(0, rep.k - 1), min_size=d, max_size=d),
                         min_size=n, max_size=n))
    return MultiMonomial(rep, tuple(map(tuple, rows)))


@given(monomials(), st.randoms(use_true_random=False))
def test_invariance_ignores_order_within_rows(f, rnd):
    shuffled = []
    for row in f.rows:
        row = list(row)
        rnd.shuffle(row)
        shuffled.append(row)
    W = weight_matrix(f)
    total = [sum(e[c] for row in W for e in row) for c in range(f.rep.rank)]
    assert is_invariant(f) == (not any(total))
    assert is_invariant(MultiMonomial(f.rep, tuple(map(tuple, shuffled)))) == is_invariant(f)


@given(st.lists(monomials(REP1), min_size=0, max_size=4), st.integers(1, 4))
def test_flatten_is_multiplicative(factors, n):
    factors = [f for f in factors if f.n == n]
    F = PnMonomial(REP1, n, tuple(factors))
    G = PnMonomial(REP1, n, tuple(factors[:1]))
    H = F * G
    rows = [sorted(a + b) for a, b in zip(flatten(F).rows, flatten(G).rows)]
    assert flatten(H).rows == tuple(map(tuple, rows))


@given(st.integers(1, 5), st.integers(1, 4), st.integers(0, 10**6))
def test_row_block_replace_is_an_involution(n, d, seed):
    rng = random.Random(seed)
    m = random_invariant_monomial(REP1, n, 2 * d, rng)
    b = random_invariant_monomial(REP1, n, 2 * d, rng)
    # a block is usable when both m and b are zero-sum on it
    blocks = [set(I) for k in range(n + 1) for I in itertools.combinations(range(n), k)
              if not sum(REP1.weights[v][0] for i in I for v in m.rows[i])
              and not sum(REP1.weights[v][0] for i in I for v in b.rows[i])]
    I = rng.choice(blocks)
    out = row_block_replace(m, I, b)
    assert is_invariant(out) and out.degree == m.degree
    assert row_block_replace(out, I, m) == m


@given(st.sampled_from([REP1, REP2]), st.integers(1, 5), st.integers(1, 6), st.integers(0, 10**6))
def test_random_invariant_monomial(rep, n, d, seed):
    f = random_invariant_monomial(rep, n, d, random.Random(seed))
    if f is None:
        assert (n * d) % 2 == 1
    else:
        assert is_invariant(f) and (f.n, f.degree) == (n, d)
