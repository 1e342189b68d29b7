import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tdspec import automata as fa
from tdspec.compile import compile_formula
from tdspec.errors import ResourceLimitError, UndeclaredVariableError
from tdspec.generate import random_qddc
from tdspec.qddc import And, Chop, Exists, Forall, Not, Or, Star, parse_qddc
from tdspec.semantics import Word, sat_all_words_upto

seeds = st.integers(0, 2**32 - 1)
SIGMA = ["p", "q"]


def dfa(d, sigma=SIGMA):
    return compile_formula(d, sigma)[0]


def agrees(d, sigma=SIGMA, upto: int = 6) -> bool:
    a = dfa(d, sigma)
    oracle = sat_all_words_upto(d, sigma, upto)
    return all(np.array_equal(a.accepts_all_words(n), oracle[n]) for n in range(1, upto + 1))


def test_compile_examples():
    a = dfa(parse_qddc("[[p]]", SIGMA))
    assert a.accepts(Word.from_sets(SIGMA, [{"p"}, {"p"}]))
    assert not a.accepts(Word.from_sets(SIGMA, [{"p"}, set()]))
    sig3 = ["p", "q", "r"]
    word = Word.from_sets(sig3, [{"p"}] * 4 + [{"p", "q", "r"}] * 4 + [{"q", "r"}] * 3)
    assert dfa(parse_qddc("[p] ^ [[!p && r]]", sig3), sig3).accepts(word)


def test_fig1_pattern():
    d = parse_qddc("[!P] ^ <u> ^ ((slen=3) && ([!P]^[[P]])) ^ [[P]]", ["P", "u"])
    a = dfa(d, ["P", "u"])
    assert agrees(d, ["P", "u"], upto=7)
    assert all(a.accepts_all_words(n).any() for n in range(5, 9))


@given(seeds)
@settings(max_examples=150)
def test_matches_oracle(seed):
    d = random_qddc(random.Random(seed), SIGMA, depth=4)
    assert agrees(d)


def test_quantifier_blocks_match_oracle():
    for text in ("ex z. ex y. [[z => p]] && <y> && (slen=2 ^ [[!z]])",
                 "all z. all y. ([[z]] ^ <y>) => [p]",
                 "ex z. ([z] ^ (all y. [[y]] || <!y>)) && scount q >= 1"):
        assert agrees(parse_qddc(text, SIGMA), upto=5)


@given(seeds)
@settings(max_examples=40)
def test_compositional(seed):
    rng = random.Random(seed)
    d1, d2 = random_qddc(rng, SIGMA, depth=2), random_qddc(rng, SIGMA, depth=2)
    a, b = dfa(d1), dfa(d2)
    assert fa.isomorphic(dfa(And(d1, d2)), fa.product(a, b, "and"))
    assert fa.isomorphic(dfa(Or(d1, d2)), fa.product(a, b, "or"))
    assert fa.isomorphic(dfa(Not(d1)), fa.complement(a))
    assert fa.isomorphic(dfa(Chop(d1, d2)), fa.concat(a, b))
    assert fa.isomorphic(dfa(Star(d1)), fa.star(a))
    body = random_qddc(rng, ["p", "z"], depth=2)
    inner = dfa(body, ["p", "z"])
    assert fa.isomorphic(dfa(Exists("z", body), ["p"]), fa.exists(inner, "z"))
    assert fa.isomorphic(dfa(Forall("z", body), ["p"]), fa.forall(inner, "z"))


def test_deterministic_output():
    d = parse_qddc("ex z. [z] ^ <q> ^ [[p || z]]", SIGMA)
    assert fa.to_json(dfa(d)) == fa.to_json(dfa(parse_qddc("ex z. [z] ^ <q> ^ [[p || z]]", SIGMA)))


def test_state_cap_reports_path():
    d = parse_qddc("<p> ^ (slen = 40)", SIGMA)
    with pytest.raises(ResourceLimitError) as err:
        compile_formula(d, SIGMA, cap=10)
    assert err.value.path


def test_free_variable_must_be_declared():
    with pytest.raises(UndeclaredVariableError):
        compile_formula(parse_qddc("[[r]]"), SIGMA)


def test_report_is_filled():
    a, report = compile_formula(parse_qddc("[p] ^ <q>", SIGMA), SIGMA)
    assert report.final_states == a.states
    assert report.peak_states >= a.states
    assert report.to_dict()["nodes"]
