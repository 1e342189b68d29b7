"""The eleven acceptance criteria; the terminal summary lists one PASS/FAIL line each.

Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import random
import time
from importlib import resources

import numpy as np
import pytest

from tdspec import automata as fa
from tdspec.analysis import input_codes, load_model, model_check, run_trace, simulate
from tdspec.compile import compile_formula
from tdspec.corpus import stack
from tdspec.generate import OPERATOR_ARITY, random_bound, random_qddc, random_secenl, random_sece, random_td
from tdspec.prop import PVar
from tdspec.qddc import nodecount, parse_qddc
from tdspec.secenl import Anti, Follows, Implies, Init, Nominated, Pref, SAnd, SNot, Triggers, size
from tdspec.semantics import (
    Rows,
    Word,
    _Nominal,
    find_valuation,
    nominal_word,
    sat_all_words_upto,
    sat_interval,
    sat_secenl_all_words,
    sat_word,
    td_tables,
)
from tdspec.specfile import parse_spec_file, requirement_formula
from tdspec.synth import synthesize
from tdspec.timing_diagram import Cell, Constraint, TimingDiagram, Waveform, xi
from tdspec.translate import aleph

SIGMA = ["p", "q"]


def corpus(name: str) -> str:
    return resources.files("tdspec.corpus").joinpath(name).read_text()


def requirement(name: str, constants=None):
    spec = parse_spec_file(corpus(name), constants)
    dfa, _ = compile_formula(requirement_formula(spec), spec.interface)
    return spec, dfa


def timed(limit: float):
    start = time.perf_counter()
    return lambda: time.perf_counter() - start <= limit


@pytest.mark.acceptance(1, "example 1: A([p]) accepts the 8-letter word, A([[p]]) rejects it")
def test_criterion_01_example_1():
    within = timed(1.0)
    word = Word.from_sets(["p", "q"], [{"p"}] * 7 + [{"q"}])
    abl, all_ = parse_qddc("[p]"), parse_qddc("[[p]]")
    assert compile_formula(abl, word.sigma)[0].accepts(word)
    assert not compile_formula(all_, word.sigma)[0].accepts(word)
    assert sat_interval(word, (0, 7), abl) and not sat_interval(word, (0, 7), all_)
    assert within()


@pytest.mark.acceptance(2, "example 2: 11-letter word accepted, [0,7] oracle check false")
def test_criterion_02_example_2():
    within = timed(1.0)
    word = Word.from_sets(["p", "q", "r"], [{"p"}] * 4 + [{"p", "q", "r"}] * 4 + [{"q", "r"}] * 3)
    d = parse_qddc("[p] ^ [[!p && r]]")
    assert compile_formula(d, word.sigma)[0].accepts(word)
    assert sat_interval(word, (0, 10), d)
    assert not sat_interval(word, (0, 7), d)
    assert within()


@pytest.mark.acceptance(3, "10,000 random QDDC formulas: DFA equals oracle on all words up to length 6")
def test_criterion_03_random_qddc():
    within = timed(600.0)
    rng = random.Random(20260101)
    mismatches = []
    for i in range(10_000):
        d = random_qddc(rng, SIGMA, depth=4, max_const=3)
        dfa, _ = compile_formula(d, SIGMA)
        oracle = sat_all_words_upto(d, SIGMA, 6)
        for n in range(1, 7):
            if not np.array_equal(dfa.accepts_all_words(n), oracle[n]):
                mismatches.append((i, n, str(d)))
                break
    assert mismatches == []
    assert within()


@pytest.mark.acceptance(4, "200 SeCeNL formulas: direct semantics equals the QDDC translation up to length 6")
def test_criterion_04_secenl_translation():
    within = timed(900.0)
    rng = random.Random(4)
    mismatches = []
    for i in range(200):
        theta = [] if i % 3 == 0 else ["u", "v"]
        z = random_secenl(rng, SIGMA, theta, depth=1)
        d = aleph(z)
        dfa, _ = compile_formula(d, SIGMA)
        short = sat_all_words_upto(d, SIGMA, 3) if not theta else {}
        for n in range(1, 7):
            direct = sat_secenl_all_words(z, SIGMA, n)
            same = np.array_equal(direct, dfa.accepts_all_words(n))
            if n in short:
                same = same and np.array_equal(direct, short[n])
            if not same:
                mismatches.append((i, n, str(z)))
                break
    assert mismatches == []
    assert within()


def _xi_agrees(td: TimingDiagram, n: int) -> bool:
    rows = Rows.cube(SIGMA, n)
    order = sorted(td.theta)
    direct = td_tables(td, rows, order)
    via_xi = np.broadcast_to(_Nominal(rows, order).table(xi(td)), direct.shape)
    upper = np.arange(n)[:, None] <= np.arange(n)[None, :]
    return bool(np.array_equal(direct, via_xi & upper))


@pytest.mark.acceptance(5, "100 random timing diagrams: semantics equals xi on all words up to length 7, all valuations")
def test_criterion_05_xi_preservation():
    within = timed(900.0)
    rng = random.Random(5)
    bad = []
    for i in range(100):
        td = random_td(rng, SIGMA)
        for n in range(1, 8):
            if not _xi_agrees(td, n):
                bad.append((i, n, td.text()))
                break
    assert bad == []
    assert within()


def _diagram_of_size(rng: random.Random, target: int) -> TimingDiagram:
    cons = target // 10
    noms = [f"n{i}" for i in range(max(2, target // 25))]
    cells = target - cons
    waves = []
    for k, name in enumerate(SIGMA):
        count = cells // 2 if k == 0 else cells - cells // 2
        mine = noms[k::2]
        seq = [Cell(rng.choice("012x"), rng.random() < 0.35) for _ in range(count)]
        for j, u in enumerate(mine):
            c = seq[(j * count) // len(mine)]
            seq[(j * count) // len(mine)] = Cell(c.symbol, c.stutter, c.markers + (u,))
        waves.append((PVar(name), Waveform(tuple(seq))))
    constraints = tuple(Constraint(rng.choice(noms), rng.choice(noms), random_bound(rng, 9)) for _ in range(cons))
    return TimingDiagram(tuple(waves), constraints)


def _secenl_of_size(rng: random.Random, target: int):
    z = None
    while z is None or size(z) < target:
        op = rng.choice(list(OPERATOR_ARITY))
        ds = [Nominated(random_sece(rng, SIGMA, 3, 3, ["u"]), frozenset({"u"})) for _ in range(OPERATOR_ARITY[op])]
        atom = {"pref": Pref, "anti": Anti, "init": Init, "implies": Implies, "follows": Follows,
                "triggers": Triggers}[op](*ds)
        atom = SNot(atom) if rng.random() < 0.3 else atom
        z = atom if z is None else SAnd(z, atom)
    return z


@pytest.mark.acceptance(6, "linearity: xi within 12x and aleph within 20x of input size, up to size 1000")
def test_criterion_06_linearity():
    within = timed(60.0)
    rng = random.Random(6)
    ratios = {}
    for target in (10, 30, 100, 300, 1000):
        td = _diagram_of_size(rng, target)
        z = _secenl_of_size(rng, target)
        ratios[target] = (nodecount(xi(td).body) / td.size(), nodecount(aleph(z)) / size(z))
    assert all(r_xi <= 12 for r_xi, _ in ratios.values()), ratios
    assert all(r_al <= 20 for _, r_al in ratios.values()), ratios
    # no growth of the xi ratio beyond size 100
    assert ratios[1000][0] <= ratios[100][0] + 0.5, ratios
    assert within()


def _closed_loop(ctrl, dfa) -> bool:
    return model_check(ctrl, dfa).kind == "holds"


@pytest.mark.acceptance(7, "minepump is realizable and the closed loop satisfies the requirement")
def test_criterion_07_minepump():
    within = timed(120.0)
    spec, dfa = requirement("minepump.spec")
    assert spec.constants == {"delta": 1, "w": 10, "epsilon": 2, "zeta": 14, "kappa": 2}
    ctrl = synthesize(dfa, spec.inputs, spec.outputs, spec.softreqs, name=spec.name)
    assert ctrl.states > 0
    assert _closed_loop(ctrl, dfa)
    assert within()


@pytest.mark.acceptance(8, "arbiter synthesis (response 3, deadtime 0): realizable, closed loop holds, exclusive arms")
def test_criterion_08_arbiter_synthesis():
    within = timed(60.0)
    spec, dfa = requirement("arbiter.spec")
    assert spec.constants == {"response": 3, "deadtime": 0}
    ctrl = synthesize(dfa, spec.inputs, spec.outputs, name=spec.name)
    assert _closed_loop(ctrl, dfa)
    _, values = ctrl.table()
    sig = ctrl.signals
    for arm in values.reshape(-1, len(sig)):
        env = dict(zip(sig, map(bool, arm)))
        assert sum(env[f"ack{i}"] for i in (1, 2, 3)) <= 1
        assert all(env[f"req{i}"] or not env[f"ack{i}"] for i in (1, 2, 3))
    assert within()


def _replays(model, dfa, verdict) -> bool:
    trace = simulate(model, input_codes(verdict.witness, model.inputs))
    again = run_trace(dfa, trace.restrict(dfa.alphabet), prefix_closed=True)
    return trace == verdict.witness and again.kind == "fails" and again.position == verdict.position


@pytest.mark.acceptance(9, "arbiter fixture: deadtime 3 holds, 2 fails replayably; responses 3/6/6 tight")
def test_criterion_09_arbiter_model_checking():
    within = timed(60.0)
    model = load_model(corpus("arbiter3.model.json"))
    _, ok = requirement("arbiter_deadtime.spec", {"n": 3})
    assert model_check(model, ok).kind == "holds"
    _, tight = requirement("arbiter_deadtime.spec", {"n": 2})
    v = model_check(model, tight)
    assert v.kind == "fails" and _replays(model, tight, v)
    bounds = {"r1": 3, "r2": 6, "r3": 6}
    _, resp = requirement("arbiter_response.spec", bounds)
    assert model_check(model, resp).kind == "holds"
    for name in bounds:
        _, less = requirement("arbiter_response.spec", {**bounds, name: bounds[name] - 1})
        v = model_check(model, less)
        assert v.kind == "fails" and _replays(model, less, v), name
    assert within()


@pytest.mark.acceptance(10, "all six liveness forms over 50 random bodies compile to prefix-closed automata")
def test_criterion_10_prefix_closed():
    within = timed(300.0)
    rng = random.Random(10)
    ctors = {"pref": Pref, "anti": Anti, "init": Init, "implies": Implies, "follows": Follows, "triggers": Triggers}
    open_ = []
    for i in range(50):
        bodies = [Nominated(random_sece(rng, SIGMA, 3, 3)) for _ in range(3)]
        for op, ctor in ctors.items():
            z = ctor(*bodies[:OPERATOR_ARITY[op]])
            dfa, _ = compile_formula(aleph(z), SIGMA)
            if not fa.is_prefix_closed(dfa):
                open_.append((i, op, str(z)))
    assert open_ == []
    assert within()


@pytest.mark.acceptance(11, "stack corpus: ordered stack satisfiable; unordered accepts a permuted witness ordered rejects")
def test_criterion_11_stack():
    within = timed(300.0)
    sig = list(stack.SIGNALS)
    ordered = stack.formula("ordered")
    dfa, _ = compile_formula(ordered, sig)
    found = fa.shortest_word(dfa)
    assert found is not None
    witness = Word(dfa.alphabet, tuple(found))
    nu = find_valuation(witness, stack.body("ordered"), stack.ordered_nominals())
    assert nu is not None and sat_word(nominal_word(witness, nu), stack.body("ordered"))
    natural = stack.witness("abcde")
    assert dfa.accepts(natural)
    permuted = stack.witness("bacde")
    unordered = stack.body("unordered")
    assert sat_word(nominal_word(permuted, stack.valuation("bacde")), unordered)
    assert not dfa.accepts(permuted)
    assert find_valuation(permuted, stack.body("ordered"), stack.ordered_nominals()) is None
    assert within()
