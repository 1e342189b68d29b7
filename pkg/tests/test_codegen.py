import json
import random
from importlib import resources

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tdspec import automata as fa
from tdspec.analysis import prefix_verdicts
from tdspec.codegen import SmvObserver, emit_controller, emit_monitor
from tdspec.compile import compile_formula
from tdspec.errors import NotTotalError, SpecError
from tdspec.generate import random_qddc
from tdspec.semantics import Word
from tdspec.specfile import parse_spec_file, requirement_formula
from tdspec.synth import synthesize
from tdspec.syntax import parse_qddc, parse_secenl
from tdspec.translate import aleph

seeds = st.integers(0, 2**32 - 1)
SIGMA = ["p", "q"]


def corpus(name: str) -> str:
    return resources.files("tdspec.corpus").joinpath(name).read_text()


def random_word(rng: random.Random, sigma, n: int) -> Word:
    return Word.from_sets(sigma, [{v for v in sigma if rng.random() < 0.5} for _ in range(n)])


@pytest.fixture(scope="module")
def minepump():
    spec = parse_spec_file(corpus("minepump.spec"))
    dfa = compile_formula(requirement_formula(spec), spec.interface)[0]
    return spec, dfa


def test_universal_observer():
    u = fa.universal(SIGMA)
    obs = SmvObserver(emit_monitor(u, "smv-observer"))
    # the initial state only stands for the empty prefix; every target is accepting
    assert {t for _, _, t in obs.cases} == obs.accepting
    assert obs.run(Word.from_sets(SIGMA, [set(), {"p"}, {"q"}])) == [True] * 3


def test_observer_replays_minepump(minepump):
    _, dfa = minepump
    obs = SmvObserver(emit_monitor(dfa, "smv-observer", "minepump"))
    rng = random.Random(7)
    for _ in range(100):
        word = random_word(rng, dfa.alphabet, rng.randint(1, 12))
        assert obs.run(word) == prefix_verdicts(dfa, word)


@given(seeds)
@settings(max_examples=40, deadline=None)
def test_observer_replay_equality(seed):
    rng = random.Random(seed)
    dfa = compile_formula(random_qddc(rng, SIGMA, depth=3), SIGMA)[0]
    word = random_word(rng, SIGMA, rng.randint(1, 8))
    assert SmvObserver(emit_monitor(dfa, "smv-observer")).run(word) == prefix_verdicts(dfa, word)


def test_dot_monitor_nodes():
    dfa = fa.minimize(fa.atom_automaton(parse_qddc("[p]", ["p"]), ["p"]))
    text = emit_monitor(dfa, "dot")
    assert text.count("shape=circle") + text.count("shape=doublecircle") == 4 == dfa.states
    assert text.count("doublecircle") == int(dfa.accepting.sum())


def test_monitor_json_round_trip():
    dfa = compile_formula(parse_qddc("[p] ^ <q>", SIGMA), SIGMA)[0]
    assert fa.isomorphic(fa.from_json(emit_monitor(dfa, "json")), dfa)


def test_monitor_errors():
    a = fa.universal(SIGMA)
    with pytest.raises(NotTotalError):
        emit_monitor(fa.Dfa(a.alphabet, a.trans[:, :2], a.accepting), "smv-observer")
    with pytest.raises(SpecError):
        emit_monitor(a, "verilog")


def test_controller_targets():
    copy = compile_formula(aleph(parse_secenl("pref([[i => o]])", ["i", "o"])), ["i", "o"])[0]
    ctrl = synthesize(copy, ["i"], ["o"])
    doc = json.loads(emit_controller(ctrl, "json"))
    assert doc["states"] == 1 and len(doc["table"]) == 2
    dot = emit_controller(ctrl, "dot")
    assert '"!i / !o"' in dot and '"i / o"' in dot
    with pytest.raises(SpecError):
        emit_controller(ctrl, "smv-observer")


def test_minepump_controller_keeps_pump_off_with_methane(minepump):
    spec, dfa = minepump
    ctrl = synthesize(dfa, spec.inputs, spec.outputs, spec.softreqs, name="minepump")
    doc = json.loads(emit_controller(ctrl, "json"))
    arms = [row for row in doc["table"] if row["input"]["HCH4"]]
    assert arms and all(not row["output"]["PUMPON"] for row in arms)


def test_emission_is_deterministic(minepump):
    spec, dfa = minepump
    for target in ("json", "dot", "smv-observer"):
        assert emit_monitor(dfa, target) == emit_monitor(dfa, target)
    a = synthesize(dfa, spec.inputs, spec.outputs, spec.softreqs)
    b = synthesize(dfa, spec.inputs, spec.outputs, spec.softreqs)
    assert emit_controller(a, "dot") == emit_controller(b, "dot")
    assert np.array_equal(a.out, b.out)
