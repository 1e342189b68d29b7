import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tdspec.errors import TraceFormatError
from tdspec.generate import random_qddc, random_secenl, random_word
from tdspec.prop import PVar
from tdspec.qddc import TRUE, Chop, Exists, Forall, Not, ScountCmp, SdurCmp, SlenCmp, box, diamond, parse_qddc
from tdspec.generate import OPERATOR_ARITY, random_secenl_atom
from tdspec.secenl import parse_secenl
from tdspec.semantics import (
    Word,
    eval_term,
    find_valuation,
    nominal_word,
    read_trace,
    sat_all_words,
    sat_interval,
    sat_secenl,
    sat_secenl_literal,
    sat_timing_diagram,
    sat_word,
    write_trace,
)
from tdspec.timing_diagram import parse_timing_diagram

seeds = st.integers(0, 2**32 - 1)
SIGMA = ["p", "q"]


def w(*letters: str) -> Word:
    return Word.from_sets(SIGMA, [set(x) for x in letters])


def intervals(n: int):
    return [(b, e) for b in range(n) for e in range(b, n)]


def test_eval_term_examples():
    word = w("p", "", "p")
    assert eval_term(word, 0, 2, ScountCmp(PVar("p"), "=", 0)) == 2
    assert eval_term(word, 0, 2, SdurCmp(PVar("p"), "=", 0)) == 1
    assert eval_term(w("", "", "", ""), 0, 3, SlenCmp("=", 0)) == 3


def test_example_1_interval():
    word = Word.from_sets(["p", "q"], [{"p"}] * 7 + [{"q"}])
    assert sat_interval(word, (0, 7), parse_qddc("[p]"))
    assert not sat_interval(word, (0, 7), parse_qddc("[[p]]"))


def test_example_2_chop_points():
    word = Word.from_sets(["p", "q", "r"], [{"p"}] * 4 + [{"p", "q", "r"}] * 4 + [{"q", "r"}] * 3)
    left, right = parse_qddc("[p]"), parse_qddc("[[!p && r]]")
    assert sat_interval(word, (0, 10), Chop(left, right))
    assert not sat_interval(word, (0, 7), Chop(left, right))
    points = [i for i in range(11) if sat_interval(word, (0, i), left) and sat_interval(word, (i, 10), right)]
    # the right part must cover position i itself, and p still holds at 7
    assert points == [8]


def test_point_start_ignores_length():
    assert sat_interval(w("p", "", "q"), (0, 2), parse_qddc("<p> ^ [[q]]"))
    assert sat_word(w("p", "", "", ""), parse_qddc("<p>"))


def test_sat_word_examples():
    assert sat_word(w("p", "p"), parse_qddc("[[p]]"))
    assert not sat_word(w("p", ""), parse_qddc("[[p]]"))
    fig1 = parse_qddc("[!p] ^ <u> ^ ((slen=3) && ([!p]^[[p]])) ^ [[p]]", ["p", "u"])
    word = Word.from_sets(["p", "u"], [{"u"}, set(), set(), {"p"}, {"p"}])
    assert sat_word(word, fig1)


def test_star_is_chop_iteration():
    d = parse_qddc("([[p]] && slen=1)*", SIGMA)
    assert sat_word(w("q"), d)
    assert sat_word(w("p", "p", "p"), d)
    assert not sat_word(w("p", "", "p"), d)


@given(seeds)
@settings(max_examples=40)
def test_chop_monotone(seed):
    rng = random.Random(seed)
    d1, d2 = random_qddc(rng, SIGMA, depth=2), random_qddc(rng, SIGMA, depth=2)
    word = random_word(rng, SIGMA, rng.randint(1, 5))
    for b, e in intervals(len(word)):
        for i in range(b, e + 1):
            if sat_interval(word, (b, i), d1) and sat_interval(word, (i, e), d2):
                assert sat_interval(word, (b, e), Chop(d1, d2))


@given(seeds)
@settings(max_examples=40)
def test_box_diamond_duality(seed):
    rng = random.Random(seed)
    d = random_qddc(rng, SIGMA, depth=3)
    word = random_word(rng, SIGMA, rng.randint(1, 5))
    for iv in intervals(len(word)):
        assert sat_interval(word, iv, diamond(d)) == sat_interval(word, iv, Chop(Chop(TRUE, d), TRUE))
        assert sat_interval(word, iv, box(d)) == (not sat_interval(word, iv, diamond(Not(d))))


@given(seeds)
@settings(max_examples=30)
def test_quantifier_duality(seed):
    rng = random.Random(seed)
    d = random_qddc(rng, ["p", "z"], depth=3)
    for n in range(1, 6):
        forall = sat_all_words(Forall("z", d), ["p"], n)
        exists_not = sat_all_words(Exists("z", Not(d)), ["p"], n)
        assert np.array_equal(forall, ~exists_not)


@given(seeds)
def test_scount_is_sdur_plus_last(seed):
    rng = random.Random(seed)
    word = random_word(rng, SIGMA, rng.randint(1, 6))
    phi = PVar(rng.choice(SIGMA))
    for b, e in intervals(len(word)):
        last = int(phi.name in word.letter(e))
        assert eval_term(word, b, e, ScountCmp(phi, "=", 0)) == eval_term(word, b, e, SdurCmp(phi, "=", 0)) + last


def test_secenl_examples():
    identity = parse_secenl("implies(<p> ~> <p>)", SIGMA)
    for n in range(1, 4):
        for letters in itertools.product(["", "p", "q", "pq"], repeat=n):
            assert sat_secenl(w(*letters), identity)
    anti = parse_secenl("anti(<p>)", SIGMA)
    assert sat_secenl(w("", "q", ""), anti)
    assert not sat_secenl(w("", "q", "p"), anti)


def test_lags_fails_when_response_missing():
    # P held from u for two cycles up to v forces Q at v
    lags = parse_secenl("implies(([P] ^ (<u> && pt) ^ ([P] && slen=2) ^ (<v> && pt)):{u,v}"
                        " ~> (true ^ (<v> && pt) ^ [[Q]]):{v})", ["P", "Q"], ["u", "v"])
    word = Word.from_sets(["P", "Q"], [{"P"}, {"P"}, {"P", "Q"}, {"P"}])
    assert not sat_secenl(word, lags)
    good = Word.from_sets(["P", "Q"], [{"P"}, {"P"}, {"P", "Q"}, {"P", "Q"}])
    assert sat_secenl(good, lags)


@given(seeds)
@settings(max_examples=25)
def test_secenl_batch_matches_clause_reading(seed):
    rng = random.Random(seed)
    z = random_secenl(rng, SIGMA, ["u"] if rng.random() < 0.5 else [], depth=1, body_depth=1)
    word = random_word(rng, SIGMA, rng.randint(1, 4))
    assert sat_secenl(word, z) == sat_secenl_literal(word, z)


@given(seeds, st.sampled_from(sorted(OPERATOR_ARITY)))
@settings(max_examples=30)
def test_liveness_atoms_prefix_closed(seed, op):
    rng = random.Random(seed)
    z = random_secenl_atom(rng, SIGMA, op, ["u"] if rng.random() < 0.5 else [], depth=2)
    word = random_word(rng, SIGMA, rng.randint(1, 6))
    if sat_secenl(word, z):
        assert all(sat_secenl(word.prefix(m), z) for m in range(1, len(word)))


def test_sat_timing_diagram_examples():
    td = parse_timing_diagram("p: 01;")
    assert sat_timing_diagram(w("", "p", ""), (0, 2), {}, td)
    high = parse_timing_diagram("p: 1|;")
    assert sat_timing_diagram(w("p", "p", ""), (0, 2), {}, high)
    assert sat_timing_diagram(w("p", "p", "p"), (0, 2), {}, high)
    fig3_like = parse_timing_diagram("p: <a>1|<b>0|; @sync:(a, b, [10,10]);")
    word = Word.from_sets(SIGMA, [{"p"}] * 9 + [set()] * 3)
    assert not sat_timing_diagram(word, (0, 11), {"a": 0, "b": 9}, fig3_like)
    word = Word.from_sets(SIGMA, [{"p"}] * 10 + [set()] * 3)
    assert sat_timing_diagram(word, (0, 12), {"a": 0, "b": 10}, fig3_like)


def test_find_valuation_replays():
    body = parse_qddc("[!p] ^ (<u> && pt) ^ [[p]]", ["p", "u"])
    word = w("", "", "p", "p")
    nu = find_valuation(word, body, ["u"])
    assert nu == {"u": 2}
    assert sat_word(nominal_word(word, nu), body)
    assert find_valuation(w("", "p", ""), body, ["u"]) is None


def test_trace_round_trip():
    word = w("p", "", "pq")
    assert read_trace(write_trace(word)) == word


def test_trace_missing_variable_is_an_error():
    with pytest.raises(TraceFormatError):
        read_trace("vars: p, q\np=1, q=0\np=1\n")
    with pytest.raises(TraceFormatError):
        read_trace("p=1, q=0\n")
