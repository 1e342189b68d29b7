"""Decision procedures on formula automata: satisfiability, validity,
equivalence, trace checking and model checking of synchronous machines.

Requirement automata are used as safety monitors when checking traces of
a machine: a run violates the requirement at the first prefix the
automaton rejects.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np

from . import automata as fa
from .compile import compile_formula
from .errors import AlphabetMismatchError, ResourceLimitError, SpecError
from .prop import PropFormula, eval_prop, parse_prop, print_prop, prop_vars
from .qddc import Formula, Not
from .semantics import Word

MODEL_CAP = 10_000_000

KINDS = ("sat", "unsat", "valid", "invalid", "equivalent", "inequivalent", "holds", "fails")
_WITNESSED = {"sat", "invalid", "inequivalent", "fails"}


@dataclass
class Verdict:
    kind: str
    witness: Word | None = None
    position: int | None = None
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown verdict {self.kind!r}")
        if (self.witness is not None) != (self.kind in _WITNESSED):
            raise ValueError(f"verdict {self.kind!r} {'needs' if self.kind in _WITNESSED else 'takes no'} witness")

    @property
    def positive(self) -> bool:
        """True for the outcomes reported with exit code 0."""
        return self.kind in ("sat", "valid", "equivalent", "holds")

    def to_dict(self) -> dict:
        out: dict = {"verdict": self.kind}
        if self.witness is not None:
            out["witness"] = {"vars": list(self.witness.sigma),
                              "letters": [sorted(self.witness.letter(t)) for t in range(len(self.witness))]}
        if self.position is not None:
            out["position"] = self.position
        out.update(self.info)
        return out


def _word(dfa: fa.Dfa, codes: list[int] | None) -> Word | None:
    return None if codes is None else Word(dfa.alphabet, tuple(codes))


# -- formulas ----------------------------------------------------------------

def sat_dfa(dfa: fa.Dfa) -> Verdict:
    w = _word(dfa, fa.shortest_word(dfa))
    return Verdict("unsat") if w is None else Verdict("sat", w)


def valid_dfa(dfa: fa.Dfa) -> Verdict:
    w = _word(dfa, fa.shortest_word(fa.complement(dfa)))
    return Verdict("valid") if w is None else Verdict("invalid", w)


def check_sat(d: Formula, sigma: Sequence[str], cap: int | None = None) -> Verdict:
    """``sat`` with a shortest (then lexicographically least) model, or ``unsat``."""
    dfa, report = compile_formula(d, sigma, cap)
    v = sat_dfa(dfa)
    v.info["states"] = dfa.states
    return v


def check_valid(d: Formula, sigma: Sequence[str], cap: int | None = None) -> Verdict:
    """``valid`` over all non-empty words, or ``invalid`` with a shortest counter-model."""
    dfa, _ = compile_formula(Not(d), sigma, cap)
    w = _word(dfa, fa.shortest_word(dfa))
    return Verdict("valid") if w is None else Verdict("invalid", w)


def check_equiv(d1: Formula, d2: Formula, sigma: Sequence[str], cap: int | None = None) -> Verdict:
    """Equivalence via emptiness of the symmetric difference."""
    a, _ = compile_formula(d1, sigma, cap)
    b, _ = compile_formula(d2, sigma, cap)
    diff = fa.product(a, b, "xor", sigma, cap)
    w = _word(diff, fa.shortest_word(diff))
    return Verdict("equivalent") if w is None else Verdict("inequivalent", w)


# -- traces ------------------------------------------------------------------

def prefix_verdicts(dfa: fa.Dfa, word: Word) -> list[bool]:
    """Acceptance of every non-empty prefix of ``word``."""
    codes = fa.word_codes(word, dfa.alphabet)
    out = []
    s = 0
    for x in codes:
        s = int(dfa.trans[s, x])
        out.append(bool(dfa.accepting[s]))
    return out


def run_trace(dfa: fa.Dfa, word: Word, prefix_closed: bool | None = None) -> Verdict:
    """``holds`` iff the whole trace is accepted.

    For prefix-closed automata a failing verdict also carries the first
    rejected prefix position (0-based index of its last letter).
    """
    fa.check_total(dfa)
    seq = prefix_verdicts(dfa, word)
    if seq[-1]:
        return Verdict("holds")
    closed = fa.is_prefix_closed(dfa) if prefix_closed is None else prefix_closed
    pos = seq.index(False) if closed else None
    return Verdict("fails", word, pos)


def first_violation(dfa: fa.Dfa, word: Word) -> int | None:
    """Index of the first rejected prefix, the monitor reading of a requirement."""
    seq = prefix_verdicts(dfa, word)
    return seq.index(False) if False in seq else None


# -- synchronous machines ----------------------------------------------------

class Machine(Protocol):
    """Finite synchronous machine with an explicit (state, input) table."""

    inputs: tuple[str, ...]

    @property
    def signals(self) -> tuple[str, ...]: ...

    def table(self) -> tuple[np.ndarray, np.ndarray]:
        """(next[state, input], values[state, input, signal]); state 0 is initial."""
        ...


def input_assignments(inputs: Sequence[str]) -> np.ndarray:
    """Row ``c`` holds the values of ``inputs`` for input code ``c`` (first input most significant)."""
    return fa.letter_bits(len(inputs))


@dataclass
class SystemModel:
    """Inputs, latches with initial values and next-state functions, and defined outputs.

    Outputs are defined over inputs, latches and previously defined outputs,
    so the definition order rules out combinational cycles.
    """

    inputs: tuple[str, ...]
    latches: tuple[tuple[str, bool, PropFormula], ...]
    outputs: tuple[tuple[str, PropFormula], ...]
    name: str = ""

    def __post_init__(self):
        seen: set[str] = set()
        for v in list(self.inputs) + [n for n, _, _ in self.latches] + [n for n, _ in self.outputs]:
            if v in seen:
                raise SpecError(f"duplicate signal {v!r} in system model")
            seen.add(v)
        known = set(self.inputs) | {n for n, _, _ in self.latches}
        for name, phi in self.outputs:
            stray = prop_vars(phi) - known
            if stray:
                raise SpecError(f"output {name!r} refers to {sorted(stray)}, which is not an input, latch "
                                "or earlier output")
            known.add(name)
        for name, _, phi in self.latches:
            stray = prop_vars(phi) - known
            if stray:
                raise SpecError(f"next-state of latch {name!r} refers to unknown {sorted(stray)}")

    @property
    def signals(self) -> tuple[str, ...]:
        return tuple(self.inputs) + tuple(n for n, _, _ in self.latches) + tuple(n for n, _ in self.outputs)

    def _evaluate(self, latch_bits: np.ndarray, in_bits: np.ndarray):
        env: dict[str, np.ndarray] = {}
        for i, v in enumerate(self.inputs):
            env[v] = in_bits[:, i]
        for j, (v, _, _) in enumerate(self.latches):
            env[v] = latch_bits[:, j]
        for v, phi in self.outputs:
            env[v] = np.broadcast_to(eval_prop(phi, env), in_bits.shape[:1]).astype(bool)
        nxt = [np.broadcast_to(eval_prop(phi, env), in_bits.shape[:1]).astype(bool) for _, _, phi in self.latches]
        values = np.stack([env[v] for v in self.signals], axis=1)
        return values, (np.stack(nxt, axis=1) if nxt else np.zeros((in_bits.shape[0], 0), dtype=bool))

    def table(self, cap: int = MODEL_CAP) -> tuple[np.ndarray, np.ndarray]:
        """Explore reachable latch valuations breadth-first."""
        k_in = len(self.inputs)
        ins = input_assignments(self.inputs)
        L = len(self.latches)
        weights = 1 << np.arange(L - 1, -1, -1) if L else np.zeros(0, dtype=np.int64)
        init = np.array([[b for _, b, _ in self.latches]], dtype=bool).reshape(1, L)
        ids = {int((init[0] * weights).sum()): 0}
        states = [init[0]]
        nexts: list[np.ndarray] = []
        vals: list[np.ndarray] = []
        i = 0
        while i < len(states):
            lb = np.repeat(states[i][None, :], 1 << k_in, axis=0)
            values, nb = self._evaluate(lb, ins)
            codes = (nb * weights).sum(axis=1) if L else np.zeros(1 << k_in, dtype=np.int64)
            row = np.empty(1 << k_in, dtype=np.int64)
            for c, code in enumerate(codes.tolist()):
                if code not in ids:
                    if len(ids) >= cap:
                        raise ResourceLimitError(f"system model exceeds {cap} states")
                    ids[code] = len(states)
                    states.append(nb[c])
                row[c] = ids[code]
            nexts.append(row)
            vals.append(values)
            i += 1
        return np.stack(nexts), np.stack(vals)

    def to_json(self) -> str:
        doc = {
            "inputs": list(self.inputs),
            "latches": [{"name": n, "init": b, "next": print_prop(p)} for n, b, p in self.latches],
            "outputs": [{"name": n, "def": print_prop(p)} for n, p in self.outputs],
        }
        if self.name:
            doc["name"] = self.name
        return json.dumps(doc, indent=2) + "\n"


def load_model(text: str) -> SystemModel:
    """Read the JSON model format; Mealy controller tables are accepted too."""
    doc = json.loads(text)
    if "table" in doc:
        from .synth import Controller

        return Controller.from_json(text)  # type: ignore[return-value]
    try:
        inputs = tuple(doc["inputs"])
        latch_names = [item["name"] for item in doc.get("latches", [])]
        out_names = [item["name"] for item in doc.get("outputs", [])]
        scope = set(inputs) | set(latch_names) | set(out_names)
        latches = tuple((item["name"], bool(item.get("init", False)), parse_prop(str(item["next"]), scope))
                        for item in doc.get("latches", []))
        outputs = tuple((item["name"], parse_prop(str(item["def"]), scope)) for item in doc.get("outputs", []))
    except (KeyError, TypeError) as err:
        raise SpecError(f"malformed system model: missing {err}") from None
    return SystemModel(inputs, latches, outputs, str(doc.get("name", "")))


def model_check(model, req: fa.Dfa, cap: int = MODEL_CAP) -> Verdict:
    """Check every finite run of ``model`` against the monitor ``req``.

    Breadth-first search of the synchronous product; the first rejected
    prefix found gives a shortest counterexample, returned as a trace over
    all model signals with the failure position.
    """
    fa.check_total(req)
    signals = tuple(model.signals)
    missing = set(req.alphabet) - set(signals)
    if missing:
        raise AlphabetMismatchError(f"model does not drive requirement variable(s) {sorted(missing)}")
    nxt, values = model.table()
    S, C = nxt.shape
    k = len(req.alphabet)
    cols = [signals.index(v) for v in req.alphabet]
    weights = (1 << np.arange(k - 1, -1, -1)).astype(np.int64)
    letter = (values[:, :, cols].astype(np.int64) * weights).sum(axis=2) if k else np.zeros((S, C), dtype=np.int64)
    Q = req.states
    trans = req.trans.astype(np.int64)
    seen = np.zeros(S * Q, dtype=bool)
    parent = -np.ones(S * Q, dtype=np.int64)
    via = -np.ones(S * Q, dtype=np.int64)
    start = 0
    seen[start] = True
    frontier = np.array([start], dtype=np.int64)
    explored = 1
    while frontier.size:
        m, q = frontier // Q, frontier % Q
        m2 = nxt[m]  # (F, C)
        q2 = trans[q[:, None], letter[m]]  # (F, C)
        bad = ~req.accepting[q2]
        if bad.any():
            f, c = map(int, np.argwhere(bad)[0])
            inputs = [c]
            node = int(frontier[f])
            while node != start:
                inputs.append(int(via[node]))
                node = int(parent[node])
            inputs.reverse()
            trace = simulate(model, inputs, (nxt, values))
            return Verdict("fails", trace, len(inputs) - 1, {"product_states": explored})
        codes = (m2 * Q + q2).reshape(-1)
        src = np.repeat(frontier, C)
        lab = np.tile(np.arange(C), frontier.size)
        fresh_mask = ~seen[codes]
        codes, src, lab = codes[fresh_mask], src[fresh_mask], lab[fresh_mask]
        codes, first = np.unique(codes, return_index=True)
        seen[codes] = True
        parent[codes] = src[first]
        via[codes] = lab[first]
        explored += codes.size
        if explored > cap:
            raise ResourceLimitError(f"product exceeds {cap} states")
        frontier = codes
    return Verdict("holds", info={"product_states": explored})


def simulate(model, input_codes: Sequence[int], tables=None) -> Word:
    """Trace of all model signals for a sequence of input codes."""
    nxt, values = model.table() if tables is None else tables
    signals = tuple(model.signals)
    s = 0
    rows = []
    for c in input_codes:
        rows.append(values[s, c])
        s = int(nxt[s, c])
    return Word.from_bits(signals, np.array(rows, dtype=bool).reshape(len(rows), len(signals)))


def input_codes(word: Word, inputs: Sequence[str]) -> list[int]:
    """Input codes of a trace, in the numbering of ``input_assignments``."""
    k = len(inputs)
    bits = word.bits()
    cols = [word.sigma.index(v) for v in inputs]
    return [int(sum(int(bits[t, c]) << (k - 1 - i) for i, c in enumerate(cols))) for t in range(len(word))]
