"""Controller synthesis from requirement automata by solving safety games.

A round of the game: the environment picks an input assignment, the
controller answers with an output assignment (Mealy convention; with
``moore=True`` the controller commits to its outputs first), and the
combined letter moves the requirement automaton.  The controller loses as
soon as the automaton rejects.  Soft requirements only break ties among
the outputs the winning region allows.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import automata as fa
from .errors import AlphabetMismatchError, SpecError, UnrealizableError
from .prop import PropFormula, eval_prop, prop_vars
from .specfile import PREVIOUS

EXPLANATION_CAP = 200_000


@dataclass
class SafetyGame:
    dfa: fa.Dfa
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    moore: bool = False
    letter: np.ndarray = field(init=False, repr=False)  # (input code, output code) -> automaton letter

    def __post_init__(self):
        ins, outs = set(self.inputs), set(self.outputs)
        if ins & outs:
            raise AlphabetMismatchError(f"variables {sorted(ins & outs)} are both inputs and outputs")
        if ins | outs != set(self.dfa.alphabet):
            extra = (ins | outs) ^ set(self.dfa.alphabet)
            raise AlphabetMismatchError(f"inputs and outputs must partition the alphabet; mismatch on {sorted(extra)}")
        k = len(self.dfa.alphabet)
        ki, ko = len(self.inputs), len(self.outputs)
        letter = np.zeros((1 << ki, 1 << ko), dtype=np.int64)
        ib, ob = fa.letter_bits(ki), fa.letter_bits(ko)
        for j, v in enumerate(self.inputs):
            letter |= ib[:, j].astype(np.int64)[:, None] << (k - 1 - self.dfa.alphabet.index(v))
        for j, v in enumerate(self.outputs):
            letter |= ob[:, j].astype(np.int64)[None, :] << (k - 1 - self.dfa.alphabet.index(v))
        self.letter = letter

    @property
    def safe_states(self) -> np.ndarray:
        """States the controller may occupy: accepting ones, plus the initial state."""
        ok = self.dfa.accepting.copy()
        ok[0] = True
        return ok

    def successors(self) -> np.ndarray:
        """(states, input codes, output codes) successor table."""
        return self.dfa.trans[:, self.letter]


def build_game(req: fa.Dfa, inputs: Sequence[str], outputs: Sequence[str], moore: bool = False) -> SafetyGame:
    fa.check_total(req)
    # the initial state counts as safe only before the first letter
    return SafetyGame(fa.split_initial(req), tuple(inputs), tuple(outputs), moore)


@dataclass
class Strategy:
    """Winning region and, for winning states, the safe outputs per input."""

    game: SafetyGame
    winning: np.ndarray  # (states,) bool
    allowed: np.ndarray  # (states, input codes, output codes) bool
    iterations: int = 0

    @property
    def realizable(self) -> bool:
        return bool(self.winning[0])


def solve_safety(game: SafetyGame) -> Strategy:
    """Greatest fixpoint: drop states where some input leaves no output that stays winning."""
    succ = game.successors()
    win = game.safe_states
    rounds = 0
    while True:
        rounds += 1
        stay = win[succ]  # (S, I, O)
        if game.moore:
            ok = np.any(np.all(stay, axis=1), axis=1)
        else:
            ok = np.all(np.any(stay, axis=2), axis=1)
        new = win & ok
        if np.array_equal(new, win):
            break
        win = new
    allowed = win[succ] & win[:, None, None]
    if game.moore:
        allowed &= np.all(allowed, axis=1, keepdims=True)
    return Strategy(game, win, allowed, rounds)


# -- explanations -------------------------------------------------------------

def explain(game: SafetyGame, strategy: Strategy, cap: int = EXPLANATION_CAP) -> dict:
    """Why the controller loses.

    First looks for an input sequence that defeats every output response
    (breadth-first over sets of automaton states that some response keeps
    alive).  If the environment must watch the outputs, falls back to its
    attractor strategy: one input per losing state, with the rank bounding
    the rounds left.
    """
    succ = game.successors()
    safe = game.safe_states
    S, I, O = succ.shape
    start = frozenset([0])
    parent: dict[frozenset, tuple[frozenset, int] | None] = {start: None}
    queue = deque([start])
    while queue and len(parent) < cap:
        alive = queue.popleft()
        for c in range(I):
            nxt = succ[list(alive), c, :].reshape(-1)
            nxt = frozenset(int(s) for s in np.unique(nxt) if safe[s])
            if nxt in parent:
                continue
            parent[nxt] = (alive, c)
            if not nxt:
                seq = []
                node = nxt
                while parent[node] is not None:
                    node, code = parent[node]
                    seq.append(code)
                seq.reverse()
                return {"kind": "input-sequence", "inputs": [_assignment(game.inputs, c) for c in seq]}
            queue.append(nxt)
    # attractor of the losing states
    rank = np.where(safe, -1, 0)
    choice = -np.ones(S, dtype=np.int64)
    r = 0
    while True:
        r += 1
        lost = rank >= 0
        reach = lost[succ]
        forced = np.all(reach, axis=2) if not game.moore else np.all(np.any(reach, axis=1), axis=1)[:, None]
        new = (rank < 0) & np.any(forced, axis=1)
        if not new.any():
            break
        rank[new] = r
        choice[new] = np.argmax(forced[new], axis=1)
    table = {int(s): _assignment(game.inputs, int(choice[s])) for s in np.flatnonzero(rank > 0)}
    return {"kind": "environment-strategy", "rank": int(rank[0]), "strategy": table}


def _assignment(names: Sequence[str], code: int) -> dict[str, bool]:
    k = len(names)
    return {v: bool(code >> (k - 1 - i) & 1) for i, v in enumerate(names)}


# -- controllers --------------------------------------------------------------

@dataclass
class Controller:
    """Deterministic Mealy machine; ``nxt[s, i]`` and ``out[s, i]`` are indexed by input code."""

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    nxt: np.ndarray
    out: np.ndarray
    moore: bool = False
    name: str = ""
    info: dict = field(default_factory=dict)

    @property
    def states(self) -> int:
        return int(self.nxt.shape[0])

    @property
    def signals(self) -> tuple[str, ...]:
        return self.inputs + self.outputs

    def table(self) -> tuple[np.ndarray, np.ndarray]:
        S, I = self.nxt.shape
        ib = np.broadcast_to(fa.letter_bits(len(self.inputs))[None], (S, I, len(self.inputs)))
        ob = fa.letter_bits(len(self.outputs))[self.out]
        return self.nxt.astype(np.int64), np.concatenate([ib, ob], axis=2)

    def step(self, state: int, inputs: dict[str, bool]) -> tuple[dict[str, bool], int]:
        code = sum(int(bool(inputs[v])) << (len(self.inputs) - 1 - i) for i, v in enumerate(self.inputs))
        return _assignment(self.outputs, int(self.out[state, code])), int(self.nxt[state, code])

    def to_json(self) -> str:
        rows = []
        for s in range(self.states):
            for c in range(self.nxt.shape[1]):
                rows.append({"state": s, "input": _assignment(self.inputs, c),
                             "output": _assignment(self.outputs, int(self.out[s, c])), "next": int(self.nxt[s, c])})
        doc = {"name": self.name, "inputs": list(self.inputs), "outputs": list(self.outputs),
               "states": self.states, "initial": 0, "moore": self.moore, "table": rows}
        return json.dumps(doc, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Controller":
        doc = json.loads(text)
        inputs, outputs = tuple(doc["inputs"]), tuple(doc["outputs"])
        S, I = int(doc["states"]), 1 << len(inputs)
        nxt = -np.ones((S, I), dtype=np.int64)
        out = np.zeros((S, I), dtype=np.int64)
        for row in doc["table"]:
            c = sum(int(bool(row["input"][v])) << (len(inputs) - 1 - i) for i, v in enumerate(inputs))
            o = sum(int(bool(row["output"][v])) << (len(outputs) - 1 - i) for i, v in enumerate(outputs))
            nxt[int(row["state"]), c] = int(row["next"])
            out[int(row["state"]), c] = o
        if np.any(nxt < 0) or np.any(nxt >= S):
            raise SpecError("controller table is not total")
        return cls(inputs, outputs, nxt, out, bool(doc.get("moore", False)), str(doc.get("name", "")))


def _score(prefs: Sequence[PropFormula], inputs, outputs, previous, in_code: int, prev_code: int) -> np.ndarray:
    """Preference vector of every output code, packed so larger is better."""
    O = 1 << len(outputs)
    ob = fa.letter_bits(len(outputs))
    env: dict[str, object] = {v: ob[:, j] for j, v in enumerate(outputs)}
    ib = _assignment(inputs, in_code)
    env.update({v: np.full(O, b) for v, b in ib.items()})
    pb = _assignment(previous, prev_code)
    env.update({PREVIOUS + v: np.full(O, b) for v, b in pb.items()})
    score = np.zeros(O, dtype=np.int64)
    for phi in prefs:
        score = score * 2 + np.broadcast_to(eval_prop(phi, env), (O,)).astype(np.int64)
    return score


def extract_controller(strategy: Strategy, prefs: Sequence[PropFormula] = (), name: str = "") -> Controller:
    """Determinise the permissive strategy and minimise the resulting machine.

    Among the allowed outputs the controller takes the one satisfying the
    highest-priority soft requirements (compared lexicographically by
    priority), then the least output code.  A soft requirement may read the
    previous value of a signal ``v`` as ``Yv``; those values are kept in
    registers that become part of the controller state.
    """
    game = strategy.game
    if not strategy.realizable:
        raise UnrealizableError("requirement is unrealizable", explain(game, strategy))
    signals = game.inputs + game.outputs
    prev_vars: list[str] = []
    for phi in prefs:
        for v in sorted(prop_vars(phi)):
            if v in signals:
                continue
            base = v[len(PREVIOUS):] if v.startswith(PREVIOUS) else None
            if base not in signals:
                raise SpecError(f"soft requirement refers to unknown variable {v!r}")
            if base not in prev_vars:
                prev_vars.append(base)
    previous = tuple(v for v in signals if v in prev_vars)
    I = 1 << len(game.inputs)
    succ = game.successors()
    ids: dict[tuple[int, int], int] = {(0, 0): 0}
    keys = [(0, 0)]
    nxt_rows, out_rows = [], []
    i = 0
    while i < len(keys):
        q, prev = keys[i]
        nrow = np.zeros(I, dtype=np.int64)
        orow = np.zeros(I, dtype=np.int64)
        for c in range(I):
            allowed = strategy.allowed[q, c]
            score = _score(prefs, game.inputs, game.outputs, previous, c, prev) if prefs else np.zeros(allowed.size, np.int64)
            cand = np.flatnonzero(allowed)
            best = cand[score[cand] == score[cand].max()]
            o = int(best[0])
            if game.moore:  # one output for every input
                o = _moore_choice(strategy, q, prefs, game, previous, prev)
            values = {**_assignment(game.inputs, c), **_assignment(game.outputs, o)}
            new_prev = sum(int(values[v]) << (len(previous) - 1 - j) for j, v in enumerate(previous))
            key = (int(succ[q, c, o]), new_prev)
            if key not in ids:
                ids[key] = len(keys)
                keys.append(key)
            nrow[c] = ids[key]
            orow[c] = o
        nxt_rows.append(nrow)
        out_rows.append(orow)
        i += 1
    raw = Controller(game.inputs, game.outputs, np.stack(nxt_rows), np.stack(out_rows), game.moore, name)
    ctrl = minimize_controller(raw)
    ctrl.info = {"unminimised_states": raw.states, "states": ctrl.states, "fixpoint_rounds": strategy.iterations,
                 "winning_states": int(strategy.winning.sum())}
    return ctrl


def _moore_choice(strategy: Strategy, q: int, prefs, game: SafetyGame, previous, prev: int) -> int:
    allowed = strategy.allowed[q, 0]
    cand = np.flatnonzero(allowed)
    if prefs:
        score = _score(prefs, game.inputs, game.outputs, previous, 0, prev)
        cand = cand[score[cand] == score[cand].max()]
    return int(cand[0])


def minimize_controller(c: Controller) -> Controller:
    """Merge states with identical input/output behaviour (partition refinement)."""
    _, cls = np.unique(c.out, axis=0, return_inverse=True)
    cls = cls.reshape(-1)
    count = int(cls.max()) + 1
    while True:
        sig = np.column_stack([cls, cls[c.nxt]])
        _, new = np.unique(sig, axis=0, return_inverse=True)
        new = new.reshape(-1)
        n = int(new.max()) + 1
        cls = new
        if n == count:
            break
        count = n
    # renumber breadth-first from the initial state
    order = -np.ones(count, dtype=np.int64)
    order[cls[0]] = 0
    seen = 1
    queue = deque([int(cls[0])])
    rep = np.zeros(count, dtype=np.int64)
    rep[cls] = np.arange(c.states)
    while queue:
        k = queue.popleft()
        for t in cls[c.nxt[rep[k]]]:
            if order[t] < 0:
                order[t] = seen
                seen += 1
                queue.append(int(t))
    keep = np.flatnonzero(order >= 0)
    nxt = np.zeros((seen, c.nxt.shape[1]), dtype=np.int64)
    out = np.zeros_like(nxt)
    for k in keep:
        nxt[order[k]] = order[cls[c.nxt[rep[k]]]]
        out[order[k]] = c.out[rep[k]]
    return Controller(c.inputs, c.outputs, nxt, out, c.moore, c.name)


def synthesize(req: fa.Dfa, inputs: Sequence[str], outputs: Sequence[str], prefs: Sequence[PropFormula] = (),
               moore: bool = False, name: str = "") -> Controller:
    """Controller keeping every prefix of every closed-loop run inside ``req``."""
    game = build_game(req, inputs, outputs, moore)
    return extract_controller(solve_safety(game), prefs, name)


def describe_controller(c: Controller) -> str:
    lines = [f"controller {c.name or '(unnamed)'}: {c.states} states, inputs {', '.join(c.inputs)}, "
             f"outputs {', '.join(c.outputs)}"]
    return "\n".join(lines)

