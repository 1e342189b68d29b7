import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tdspec import automata as fa
from tdspec.compile import compile_formula
from tdspec.errors import AlphabetMismatchError, NotTotalError
from tdspec.generate import random_qddc
from tdspec.prop import truth_table
from tdspec.qddc import ATOMS, parse_qddc
from tdspec.semantics import Word, sat_all_words

seeds = st.integers(0, 2**32 - 1)
SIGMA = ["p", "q"]


def atom(text: str, sigma=SIGMA) -> fa.Dfa:
    d = parse_qddc(text, sigma)
    if isinstance(d, ATOMS):
        return fa.cylindrify(fa.atom_automaton(d, sigma), sigma)
    return compile_formula(d, sigma)[0]


def w(*letters: str, sigma=SIGMA) -> Word:
    return Word.from_sets(sigma, [set(x) for x in letters])


def same_language(a: fa.Dfa, d, sigma=SIGMA, upto: int = 6) -> bool:
    return all(np.array_equal(a.accepts_all_words(n), sat_all_words(d, sigma, n)) for n in range(1, upto + 1))


def test_atom_examples():
    a = atom("[[p]]")
    assert a.accepts(w("p", "p")) and not a.accepts(w("p", ""))
    slen3 = atom("slen=3")
    assert [n for n in range(1, 8) if slen3.accepts_all_words(n).all()] == [4]
    assert not slen3.accepts_all_words(3).any()
    assert fa.minimize(fa.atom_automaton(parse_qddc("[p]", ["p"]), ["p"])).states == 4


@pytest.mark.parametrize("text", ["<p>", "[p]", "[[p && !q]]", "{q}", "slen<2", "scount p >= 2", "sdur q = 1"])
def test_atoms_match_oracle(text):
    assert same_language(atom(text), parse_qddc(text, SIGMA))


def test_product_examples():
    a, b = atom("[[p]]"), atom("[[q]]")
    assert fa.product(a, b, "and").accepts(w("pq", "pq"))
    assert fa.is_empty(fa.product(a, fa.complement(a), "and"))
    assert fa.is_universal(fa.product(a, fa.complement(a), "or"))


def test_product_aligns_alphabets():
    both = fa.product(atom("[[p]]", ["p"]), atom("[[q]]", ["q"]), "and")
    assert both.alphabet == ("p", "q")
    assert fa.isomorphic(both, atom("[[p && q]]"))
    with pytest.raises(AlphabetMismatchError):
        fa.cylindrify(atom("[[p]]", ["p"]), ["q"])


def test_complement_examples():
    a = atom("[p]")
    assert fa.complement(a).accepts(w("", ""))
    assert fa.isomorphic(fa.complement(fa.complement(a)), a)
    assert fa.is_empty(fa.complement(fa.universal(SIGMA)))


def test_complement_rejects_partial():
    a = fa.universal(SIGMA)
    broken = fa.Dfa(a.alphabet, a.trans[:, :2], a.accepting)
    with pytest.raises(NotTotalError):
        fa.complement(broken)


def test_fusion_examples():
    chop = fa.determinize(fa.fusion_concat(atom("<p>"), atom("[[q]]")))
    assert chop.accepts(w("pq", "q")) and chop.accepts(w("p", "", "q"))
    assert same_language(chop, parse_qddc("<p> ^ [[q]]", SIGMA))
    a = atom("[p] ^ <q>")
    for other in (fa.concat(a, atom("pt")), fa.concat(atom("pt"), a)):
        assert fa.equivalent(other, a)
    sig3 = ["p", "q", "r"]
    word = Word.from_sets(sig3, [{"p"}] * 4 + [{"p", "q", "r"}] * 4 + [{"q", "r"}] * 3)
    assert fa.concat(atom("[p]", sig3), atom("[[!p && r]]", sig3)).accepts(word)


def test_star_examples():
    assert fa.is_universal(fa.star(atom("slen=1")))
    assert same_language(fa.star(atom("[[p]]")), parse_qddc("([[p]])*", SIGMA), upto=5)
    assert fa.equivalent(fa.star(fa.empty(SIGMA)), fa.length_one(SIGMA))


def test_project_examples():
    iff = atom("[[p <=> q]]")
    assert fa.is_universal(fa.exists(iff, "p"))
    assert fa.exists(iff, "p").alphabet == ("q",)
    assert fa.is_universal(fa.exists(atom("[[p]]"), "p"))
    assert fa.is_empty(fa.exists(fa.empty(SIGMA), "p"))
    with pytest.raises(AlphabetMismatchError):
        fa.project(iff, "r")


def test_minimize_idempotent():
    a = fa.concat(atom("<p>"), atom("[[q]]"))
    assert fa.isomorphic(fa.minimize(a), a)


def test_emptiness_universality_shortest():
    assert fa.shortest_word(atom("slen=3")) == [0, 0, 0, 0]
    assert fa.is_universal(atom("pt || ext"))
    assert fa.is_empty(atom("pt && ext"))
    assert fa.shortest_word(fa.empty(SIGMA)) is None
    # least letter first: [[q]] needs q=1, the code puts p above q
    assert fa.shortest_word(atom("[[q]]")) == [1]


def test_json_round_trip():
    a = atom("[p] ^ <q>")
    assert fa.isomorphic(fa.from_json(fa.to_json(a)), a)
    assert fa.to_json(a) == fa.to_json(atom("[p] ^ <q>"))


def test_guard_partition():
    a, _ = compile_formula(parse_qddc("[p] ^ <q> ^ [[!p]]", SIGMA), SIGMA)
    for s in range(a.states):
        guards = [g for src, g, _ in fa.edges(a) if src == s]
        tables = [truth_table(g, a.alphabet) for g in guards]
        assert np.logical_or.reduce(tables).all()
        for i in range(len(tables)):
            for j in range(i + 1, len(tables)):
                assert not (tables[i] & tables[j]).any()


def test_guard_formula_is_exact():
    mask = np.array([True, False, False, True])
    g = fa.guard_formula(mask, ("p", "q"))
    assert np.array_equal(truth_table(g, ("p", "q")), mask)


@given(seeds)
@settings(max_examples=40)
def test_minimal_dfas_are_canonical(seed):
    rng = random.Random(seed)
    d = random_qddc(rng, SIGMA, depth=3)
    a, _ = compile_formula(d, SIGMA)
    # a language twin built differently: double complement and a product with universal
    twin = fa.product(fa.complement(fa.complement(a)), fa.universal(SIGMA), "and")
    assert fa.isomorphic(a, twin)


@given(seeds)
@settings(max_examples=40)
def test_operations_stay_total(seed):
    rng = random.Random(seed)
    a, _ = compile_formula(random_qddc(rng, SIGMA, depth=2), SIGMA)
    b, _ = compile_formula(random_qddc(rng, SIGMA, depth=2), SIGMA)
    for out in (fa.product(a, b, "and"), fa.product(a, b, "or"), fa.complement(a), fa.concat(a, b),
                fa.star(a), fa.exists(a, "p")):
        fa.check_total(out)
        assert fa.isomorphic(fa.minimize(out), out)
