import itertools
import json
import random
from importlib import resources

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tdspec import automata as fa
from tdspec.analysis import (
    Verdict,
    check_equiv,
    check_sat,
    check_valid,
    input_codes,
    load_model,
    model_check,
    prefix_verdicts,
    run_trace,
    simulate,
)
from tdspec.compile import compile_formula
from tdspec.errors import AlphabetMismatchError, SpecError
from tdspec.generate import random_qddc, random_sece
from tdspec.qddc import TRUE, Chop, diamond, iff, parse_qddc
from tdspec.secenl import Nominated, Pref
from tdspec.semantics import Word, sat_all_words, sat_word
from tdspec.specfile import parse_spec_file, requirement_formula
from tdspec.translate import aleph

seeds = st.integers(0, 2**32 - 1)
SIGMA = ["p", "q"]

WIRE = json.dumps({"inputs": ["i"], "outputs": [{"name": "o", "def": "i"}]})


def corpus(name: str) -> str:
    return resources.files("tdspec.corpus").joinpath(name).read_text()


def requirement(text: str, constants=None):
    spec = parse_spec_file(text, constants)
    return spec, compile_formula(requirement_formula(spec), spec.interface)[0]


def test_sat_and_unsat():
    assert check_sat(parse_qddc("pt && ext"), SIGMA).kind == "unsat"
    v = check_sat(parse_qddc("[p] ^ <q> ^ slen=1", SIGMA), SIGMA)
    assert v.kind == "sat" and sat_word(v.witness, parse_qddc("[p] ^ <q> ^ slen=1", SIGMA))


def test_invalid_has_counter_witness():
    d = parse_qddc("[[p]]", SIGMA)
    v = check_valid(d, SIGMA)
    assert v.kind == "invalid" and not sat_word(v.witness, d)
    assert len(v.witness) == 1


@given(seeds)
@settings(max_examples=30)
def test_diamond_definition_valid(seed):
    d = random_qddc(random.Random(seed), SIGMA, depth=3)
    assert check_valid(iff(diamond(d), Chop(Chop(TRUE, d), TRUE)), SIGMA).kind == "valid"


@given(seeds)
@settings(max_examples=40)
def test_equivalence_matches_oracle(seed):
    rng = random.Random(seed)
    d1, d2 = random_qddc(rng, SIGMA, depth=2), random_qddc(rng, SIGMA, depth=2)
    v = check_equiv(d1, d2, SIGMA)
    same = all(np.array_equal(sat_all_words(d1, SIGMA, n), sat_all_words(d2, SIGMA, n)) for n in range(1, 6))
    if v.kind == "inequivalent":
        assert sat_word(v.witness, d1) != sat_word(v.witness, d2)
    else:
        assert same


def test_equivalent_twin():
    # the twin spells out the chop point cases: p before it, q at it
    d = parse_qddc("[p] ^ <q>", SIGMA)
    twin = parse_qddc("<q> || ([p] && ext) ^ <q>", SIGMA)
    assert check_equiv(d, twin, SIGMA).kind == "equivalent"
    assert check_equiv(d, parse_qddc("[[p]] ^ <q>", SIGMA), SIGMA).kind == "inequivalent"


@given(seeds)
@settings(max_examples=40)
def test_shortest_witness_is_shortest(seed):
    d = random_qddc(random.Random(seed), SIGMA, depth=3)
    v = check_sat(d, SIGMA)
    lengths = [n for n in range(1, 6) if sat_all_words(d, SIGMA, n).any()]
    if v.kind == "sat":
        assert not lengths or len(v.witness) == lengths[0]
    else:
        assert not lengths


def test_verdict_witness_rule():
    with pytest.raises(ValueError):
        Verdict("sat")
    with pytest.raises(ValueError):
        Verdict("holds", Word.from_sets(["p"], [set()]))


def test_run_trace_minepump():
    spec, req = requirement(corpus("minepump.spec"))
    quiet = Word.from_sets(req.alphabet, [set()] * 6)
    assert run_trace(req, quiet).kind == "holds"
    # methane for one cycle with the pump on; [.] leaves the last point of an
    # interval unchecked, so the violation shows once the next letter arrives
    word = Word.from_sets(req.alphabet, [set(), {"HCH4", "PUMPON", "ALARM"}, {"ALARM"}, set()])
    v = run_trace(req, word, prefix_closed=True)
    assert v.kind == "fails" and v.position == 2
    assert prefix_verdicts(req, word) == [True, True, False, False]


def test_run_trace_missing_variable():
    _, req = requirement(corpus("minepump.spec"))
    with pytest.raises(AlphabetMismatchError):
        run_trace(req, Word.from_sets(["HH2O"], [set()]))


def test_model_check_wire():
    model = load_model(WIRE)
    req = compile_formula(aleph(Pref(Nominated(parse_qddc("[[i => o]]", ["i", "o"])))), ["i", "o"])[0]
    assert model_check(model, req).kind == "holds"
    req = compile_formula(aleph(Pref(Nominated(parse_qddc("[[i => !o]]", ["i", "o"])))), ["i", "o"])[0]
    v = model_check(model, req)
    assert v.kind == "fails" and v.position == 0


def test_model_check_alphabet_mismatch():
    req = compile_formula(parse_qddc("[[x]]"), ["x"])[0]
    with pytest.raises(AlphabetMismatchError):
        model_check(load_model(WIRE), req)


def test_model_format_errors():
    with pytest.raises(SpecError):
        load_model(json.dumps({"latches": []}))
    with pytest.raises(SpecError):
        load_model(json.dumps({"inputs": ["i"], "outputs": [{"name": "o", "def": "i"}, {"name": "o", "def": "!i"}]}))


def test_arbiter_counterexample_replays():
    model = load_model(corpus("arbiter3.model.json"))
    _, req = requirement(corpus("arbiter_deadtime.spec"), {"n": 2})
    v = model_check(model, req)
    assert v.kind == "fails"
    again = simulate(model, input_codes(v.witness, model.inputs))
    assert again == v.witness
    assert run_trace(req, again.restrict(req.alphabet), prefix_closed=True).position == v.position
    # a run of three cycles with some request and no grant; [.] reports it one
    # cycle after the run ends
    tail = again.prefix(v.position + 1)
    lost = [any(x.startswith("req") for x in tail.letter(t)) and not any(x.startswith("ack") for x in tail.letter(t))
            for t in range(len(tail))]
    assert lost[-4:] == [True, True, True, False]


def test_model_check_no_short_violation():
    model = load_model(corpus("arbiter3.model.json"))
    _, req = requirement(corpus("arbiter_deadtime.spec"), {"n": 2})
    v = model_check(model, req)
    assert v.position == 6
    # exhaustive up to four cycles; the full 8^7 sweep is too slow for the suite
    for n in range(1, 5):
        for seq in itertools.product(range(8), repeat=n):
            trace = simulate(model, seq)
            assert all(prefix_verdicts(req, trace.restrict(req.alphabet)))


@given(seeds, st.sampled_from(["pref", "anti", "init", "implies", "follows", "triggers"]))
@settings(max_examples=30)
def test_liveness_requirements_prefix_closed(seed, op):
    from tdspec.secenl import Anti, Follows, Implies, Init, Triggers

    rng = random.Random(seed)
    ctor = {"pref": Pref, "anti": Anti, "init": Init, "implies": Implies, "follows": Follows, "triggers": Triggers}[op]
    arity = {"pref": 1, "anti": 1, "init": 2, "implies": 2, "follows": 3, "triggers": 3}[op]
    z = ctor(*[Nominated(random_sece(rng, SIGMA, 2, 2)) for _ in range(arity)])
    assert fa.is_prefix_closed(compile_formula(aleph(z), SIGMA)[0])


def test_prefix_closed_detector_rejects_open_language():
    assert not fa.is_prefix_closed(compile_formula(parse_qddc("slen >= 2"), SIGMA)[0])
