"""Finite automata over the letter space 2^Σ.

A ``Dfa`` stores an explicit transition table ``trans[state, letter]`` with
letters numbered so that variable i of the alphabet is bit k-1-i (the
numbering used for words in ``semantics``).  Guards only appear when an
automaton is serialised.  State 0 is initial.  The word universe is
non-empty words, so the initial state is never accepting.

Nondeterminism only arises from fusion (chop), fusion-star and projection,
each with fan-out at most two; ``Nfa`` is therefore a padded successor
table and ``determinize`` a vectorised subset construction.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import AlphabetMismatchError, NotTotalError, ResourceLimitError
from .prop import PConst, PNot, PVar, PropFormula, conj, disj, eval_prop, letter_bits, print_prop, parse_prop, prop_vars
from .qddc import compare

DEFAULT_CAP = 2_000_000
CONSTANT_CAP = 100_000


def state_cap() -> int:
    return int(os.environ.get("TDSPEC_STATE_CAP", DEFAULT_CAP))


@dataclass(frozen=True, eq=False)
class Dfa:
    alphabet: tuple[str, ...]
    trans: np.ndarray  # (states, 2**k) int32
    accepting: np.ndarray  # (states,) bool
    minimal: bool = False

    @property
    def states(self) -> int:
        return int(self.trans.shape[0])

    @property
    def letters(self) -> int:
        return 1 << len(self.alphabet)

    def run(self, codes: Sequence[int]) -> int:
        s = 0
        for x in codes:
            s = int(self.trans[s, x])
        return s

    def accepts_codes(self, codes: Sequence[int]) -> bool:
        return bool(self.accepting[self.run(codes)]) if len(codes) else False

    def accepts(self, word) -> bool:
        return self.accepts_codes(word_codes(word, self.alphabet))

    def accepts_batch(self, codes: np.ndarray) -> np.ndarray:
        """Verdicts for a (words, length) array of letter codes."""
        s = np.zeros(codes.shape[0], dtype=np.int64)
        for t in range(codes.shape[1]):
            s = self.trans[s, codes[:, t]]
        return self.accepting[s] if codes.shape[1] else np.zeros(codes.shape[0], dtype=bool)

    def accepts_all_words(self, n: int) -> np.ndarray:
        """Verdicts for every word of length ``n``, indexed as in ``semantics.all_words_bits``."""
        k = len(self.alphabet)
        idx = np.arange(1 << (k * n), dtype=np.int64)
        shifts = np.arange(n - 1, -1, -1, dtype=np.int64) * k
        codes = (idx[:, None] >> shifts[None, :]) & ((1 << k) - 1)
        return self.accepts_batch(codes)


@dataclass(frozen=True, eq=False)
class Nfa:
    alphabet: tuple[str, ...]
    succ: np.ndarray  # (states, 2**k, fanout) int32, -1 = none
    initial: np.ndarray  # (states,) bool
    accepting: np.ndarray  # (states,) bool

    @property
    def states(self) -> int:
        return int(self.succ.shape[0])


def word_codes(word, alphabet: Sequence[str]) -> list[int]:
    """Letter codes of a ``semantics.Word`` re-expressed over ``alphabet``."""
    if tuple(word.sigma) == tuple(alphabet):
        return list(word.codes)
    missing = set(alphabet) - set(word.sigma)
    if missing:
        raise AlphabetMismatchError(f"trace lacks variable(s) {sorted(missing)}")
    bits = word.bits()
    k = len(alphabet)
    cols = [word.sigma.index(v) for v in alphabet]
    out = []
    for row in bits:
        code = 0
        for i, c in enumerate(cols):
            if row[c]:
                code |= 1 << (k - 1 - i)
        out.append(code)
    return out


# -- basic constructions ----------------------------------------------------

def _dfa(alphabet, trans, accepting, minimal=False) -> Dfa:
    trans = np.ascontiguousarray(trans, dtype=np.int32)
    accepting = np.asarray(accepting, dtype=bool).copy()
    accepting[0] = False
    return Dfa(tuple(alphabet), trans, accepting, minimal)


def build(alphabet: Sequence[str], init, step: Callable, accept: Callable, cap: int | None = None) -> Dfa:
    """DFA from a deterministic step function on hashable keys (used for atoms)."""
    alphabet = tuple(alphabet)
    L = 1 << len(alphabet)
    cap = state_cap() if cap is None else cap
    ids = {init: 0}
    keys = [init]
    rows = []
    i = 0
    while i < len(keys):
        key = keys[i]
        row = []
        for x in range(L):
            nxt = step(key, x)
            if nxt not in ids:
                ids[nxt] = len(keys)
                keys.append(nxt)
                if len(keys) > cap:
                    raise ResourceLimitError(f"state cap {cap} exceeded")
            row.append(ids[nxt])
        rows.append(row)
        i += 1
    acc = [bool(accept(k)) if idx else False for idx, k in enumerate(keys)]
    return minimize(_dfa(alphabet, np.array(rows).reshape(len(keys), L), acc))


def universal(alphabet: Sequence[str] = ()) -> Dfa:
    """All non-empty words."""
    L = 1 << len(alphabet)
    return _dfa(alphabet, np.ones((2, L)), [False, True], True)


def empty(alphabet: Sequence[str] = ()) -> Dfa:
    L = 1 << len(alphabet)
    return _dfa(alphabet, np.zeros((1, L)), [False], True)


def length_one(alphabet: Sequence[str] = ()) -> Dfa:
    L = 1 << len(alphabet)
    trans = np.array([[1] * L, [2] * L, [2] * L])
    return _dfa(alphabet, trans, [False, True, False], True)


def letter_predicate(phi: PropFormula, alphabet: Sequence[str]) -> np.ndarray:
    bits = letter_bits(len(alphabet))
    env = {v: bits[:, i] for i, v in enumerate(alphabet)}
    val = eval_prop(phi, env)
    return np.broadcast_to(np.asarray(val, dtype=bool), (1 << len(alphabet),)).copy()


def ordered(names: Iterable[str], order: Sequence[str]) -> tuple[str, ...]:
    rank = {v: i for i, v in enumerate(order)}
    return tuple(sorted(set(names), key=lambda v: (rank.get(v, len(rank)), v)))


def atom_automaton(atom, order: Sequence[str] = (), cap: int | None = None) -> Dfa:
    """DFA of a QDDC atom over its own free variables (ordered by ``order``)."""
    from .qddc import All, AllButLast, Pt, ScountCmp, SdurCmp, SlenCmp, Unit

    if isinstance(atom, SlenCmp):
        alphabet: tuple[str, ...] = ()
        truth = np.zeros(1, dtype=bool)
    else:
        alphabet = ordered(prop_vars(atom.phi), order)
        truth = letter_predicate(atom.phi, alphabet)
    if isinstance(atom, (SlenCmp, ScountCmp, SdurCmp)):
        c = atom.const
        if not isinstance(c, int):
            raise ValueError(f"unresolved constant {c!r}")
        if c > CONSTANT_CAP:
            raise ResourceLimitError(f"constant {c} exceeds the counter limit {CONSTANT_CAP}")
        top = c + 1
    init = ("init",)
    if isinstance(atom, Pt):
        return build(alphabet, init, lambda k, x: k if k != init else ("ok" if truth[x] else "dead"),
                     lambda k: k == "ok")
    if isinstance(atom, AllButLast):
        def step(k, x):
            if k in (init, "ok"):
                return "ok" if truth[x] else "last"
            return "dead"
        return build(alphabet, init, step, lambda k: k in ("ok", "last"))
    if isinstance(atom, All):
        return build(alphabet, init, lambda k, x: "ok" if k in (init, "ok") and truth[x] else "dead",
                     lambda k: k == "ok")
    if isinstance(atom, Unit):
        def step(k, x):
            if k == init:
                return 1 if truth[x] else "dead"
            if k == 1:
                return 2
            return "dead"
        return build(alphabet, init, step, lambda k: k == 2)
    if isinstance(atom, SlenCmp):
        # key = letters read - 1, saturating above the constant
        return build(alphabet, init, lambda k, x: 0 if k == init else min(k + 1, top),
                     lambda k: k != init and compare(k, atom.op, c))
    if isinstance(atom, ScountCmp):
        return build(alphabet, init, lambda k, x: min((0 if k == init else k) + int(truth[x]), top),
                     lambda k: k != init and compare(k, atom.op, c))
    if isinstance(atom, SdurCmp):
        # key = (count over all letters but the last, last letter satisfies phi)
        def step(k, x):
            if k == init:
                return (0, bool(truth[x]))
            return (min(k[0] + int(k[1]), top), bool(truth[x]))
        return build(alphabet, init, step, lambda k: k != init and compare(k[0], atom.op, c))
    raise TypeError(f"not an atom: {atom!r}")


# -- alphabets --------------------------------------------------------------

def cylindrify(a: Dfa, alphabet: Sequence[str]) -> Dfa:
    """Re-express ``a`` over a superset alphabet; new variables are unconstrained."""
    alphabet = tuple(alphabet)
    if alphabet == a.alphabet:
        return a
    missing = set(a.alphabet) - set(alphabet)
    if missing:
        raise AlphabetMismatchError(f"cannot drop variables {sorted(missing)} by cylindrification")
    bits = letter_bits(len(alphabet))
    k_old = len(a.alphabet)
    old = np.zeros(1 << len(alphabet), dtype=np.int64)
    for i, v in enumerate(a.alphabet):
        old |= bits[:, alphabet.index(v)].astype(np.int64) << (k_old - 1 - i)
    trans = a.trans[:, old]
    if not a.minimal:
        return Dfa(alphabet, np.ascontiguousarray(trans), a.accepting, False)
    # still minimal, but the new letter order changes the canonical numbering
    order = _renumber_bfs(trans, 0)
    out = np.empty_like(trans)
    out[order] = order[trans]
    acc = np.empty_like(a.accepting)
    acc[order] = a.accepting
    return Dfa(alphabet, np.ascontiguousarray(out, dtype=np.int32), acc, True)


def align(a: Dfa, b: Dfa, order: Sequence[str] = ()) -> tuple[Dfa, Dfa]:
    if a.alphabet == b.alphabet:
        return a, b
    union = ordered(set(a.alphabet) | set(b.alphabet), list(order) + list(a.alphabet) + list(b.alphabet))
    return cylindrify(a, union), cylindrify(b, union)


# -- exploration helpers ----------------------------------------------------

def _explore(init: int, successors: Callable[[np.ndarray], np.ndarray], cap: int):
    """Reachable part of an implicit deterministic system over int64 codes.

    Returns (codes in id order, transition table of ids)."""
    known = np.array([init], dtype=np.int64)
    known_ids = np.array([0], dtype=np.int64)
    order = [np.array([init], dtype=np.int64)]
    rows = []
    frontier = order[0]
    count = 1
    while frontier.size:
        nxt = successors(frontier)
        rows.append(nxt)
        flat = np.unique(nxt)
        pos = np.searchsorted(known, flat)
        hit = (pos < known.size) & (known[np.minimum(pos, known.size - 1)] == flat)
        new = flat[~hit]
        if new.size:
            ids = np.arange(count, count + new.size, dtype=np.int64)
            count += new.size
            if count > cap:
                raise ResourceLimitError(f"state cap {cap} exceeded")
            merged = np.concatenate([known, new])
            merged_ids = np.concatenate([known_ids, ids])
            srt = np.argsort(merged, kind="stable")
            known, known_ids = merged[srt], merged_ids[srt]
            order.append(new)
        frontier = new
    codes = np.concatenate(order)
    table = np.concatenate(rows) if rows else np.zeros((0, 0), dtype=np.int64)
    ids = known_ids[np.searchsorted(known, table)]
    return codes, ids


def product(a: Dfa, b: Dfa, mode: str = "and", order: Sequence[str] = (), cap: int | None = None) -> Dfa:
    """Synchronous product; ``mode`` in and/or/xor/diff."""
    a, b = align(a, b, order)
    cap = state_cap() if cap is None else cap
    nb = b.states
    ta, tb = a.trans.astype(np.int64), b.trans.astype(np.int64)

    def succ(codes):
        return ta[codes // nb] * nb + tb[codes % nb]

    codes, trans = _explore(0, succ, cap)
    fa, fb = a.accepting[codes // nb], b.accepting[codes % nb]
    acc = {"and": fa & fb, "or": fa | fb, "xor": fa ^ fb, "diff": fa & ~fb}[mode]
    return minimize(_dfa(a.alphabet, trans, acc))


def split_initial(a: Dfa) -> Dfa:
    """Make state 0 have no incoming edges, so its acceptance bit only concerns ε."""
    if not np.any(a.trans == 0):
        return a
    trans = np.vstack([a.trans[:1], a.trans]) + 1
    acc = np.concatenate([[False], a.accepting])
    return Dfa(a.alphabet, trans.astype(np.int32), acc)


def complement(a: Dfa) -> Dfa:
    """Complement relative to non-empty words."""
    check_total(a)
    b = split_initial(a)
    return minimize(_dfa(b.alphabet, b.trans, ~b.accepting))


def check_total(a: Dfa) -> None:
    if a.trans.ndim != 2 or a.trans.shape[1] != a.letters:
        raise NotTotalError("transition table does not cover every letter")
    if a.trans.size and (a.trans.min() < 0 or a.trans.max() >= a.states):
        raise NotTotalError("transition table has missing or dangling targets")


# -- nondeterministic constructions ---------------------------------------

def fusion_concat(a: Dfa, b: Dfa, order: Sequence[str] = ()) -> Nfa:
    """L(a) ⋄ L(b) = { u·x·v : u·x ∈ L(a), x·v ∈ L(b) } (the chop of the two languages)."""
    a, b = align(a, b, order)
    na, nb = a.states, b.states
    L = a.letters
    succ = -np.ones((na + nb, L, 2), dtype=np.int32)
    succ[:na, :, 0] = a.trans
    jump = b.trans[0] + na  # where b is after reading the shared letter
    land = a.accepting[a.trans]  # (na, L)
    succ[:na, :, 1] = np.where(land, jump[None, :], -1)
    succ[na:, :, 0] = b.trans + na
    init = np.zeros(na + nb, dtype=bool)
    init[0] = True
    acc = np.concatenate([np.zeros(na, dtype=bool), b.accepting])
    return Nfa(a.alphabet, succ, init, acc)


def fusion_star(a: Dfa) -> Nfa:
    """Fusion iteration of L(a) with at least one step; length-1 words are added by the caller."""
    n, L = a.states, a.letters
    succ = -np.ones((n, L, 2), dtype=np.int32)
    succ[:, :, 0] = a.trans
    land = a.accepting[a.trans]
    succ[:, :, 1] = np.where(land, a.trans[0][None, :], -1)
    init = np.zeros(n, dtype=bool)
    init[0] = True
    return Nfa(a.alphabet, succ, init, a.accepting.copy())


def project(a: Dfa, var: str) -> Nfa:
    """∃var: the alphabet loses ``var``; each letter reads both of its var-extensions."""
    if var not in a.alphabet:
        raise AlphabetMismatchError(f"{var!r} not in alphabet {list(a.alphabet)}")
    k = len(a.alphabet)
    j = a.alphabet.index(var)
    rest = tuple(v for v in a.alphabet if v != var)
    bit = 1 << (k - 1 - j)
    y = np.arange(1 << (k - 1), dtype=np.int64)
    # insert a zero bit at position of var
    high = (y >> (k - 1 - j)) << (k - j)
    low = y & ((1 << (k - 1 - j)) - 1)
    x0 = high | low
    succ = np.stack([a.trans[:, x0], a.trans[:, x0 | bit]], axis=2).astype(np.int32)
    init = np.zeros(a.states, dtype=bool)
    init[0] = True
    return Nfa(rest, succ, init, a.accepting.copy())


def simulation(nfa: Nfa) -> np.ndarray:
    """Greatest direct simulation: ``R[s, t]`` means t can mimic every move of s."""
    m, L, F = nfa.succ.shape
    rel = ~nfa.accepting[:, None] | nfa.accepting[None, :]
    while True:
        new = rel.copy()
        for x in range(L):
            tgt = nfa.succ[:, x, :]
            # can[u, t]: some move of t on x lands in a state simulating u
            can = np.zeros((m, m), dtype=bool)
            for g in range(F):
                live = tgt[:, g] >= 0
                can[:, live] |= rel[:, tgt[live, g]]
            for f in range(F):
                live = tgt[:, f] >= 0
                new[live] &= can[tgt[live, f]]
        if np.array_equal(new, rel):
            return rel
        rel = new


def _dominated(nfa: Nfa) -> np.ndarray:
    """``D[t, s]``: s may be dropped from any subset holding t. Ties go to the lower id."""
    rel = simulation(nfa)
    m = rel.shape[0]
    idx = np.arange(m)
    strict = rel & (~rel.T | (idx[None, :] < idx[:, None]))
    np.fill_diagonal(strict, False)
    return strict.T.astype(np.float32)


def determinize(nfa: Nfa, cap: int | None = None, chunk: int = 2048) -> Dfa:
    """Subset construction; subsets are packed bit rows, explored breadth-first.

    States simulated by another member of the same subset add no words and are
    pruned, which keeps star and projection of larger automata tractable.
    """
    cap = state_cap() if cap is None else cap
    m = nfa.states
    dom = _dominated(nfa)

    def prune(block: np.ndarray) -> np.ndarray:
        return block & ~((block.astype(np.float32) @ dom) > 0)
    L = nfa.succ.shape[1]
    # per (letter, slot): sources grouped by target
    plans = []
    for x in range(L):
        slots = []
        for f in range(nfa.succ.shape[2]):
            t = nfa.succ[:, x, f]
            src = np.nonzero(t >= 0)[0]
            if not src.size:
                continue
            dst = t[src]
            srt = np.argsort(dst, kind="stable")
            dst, src = dst[srt], src[srt]
            starts = np.flatnonzero(np.r_[True, dst[1:] != dst[:-1]])
            slots.append((src, starts, dst[starts]))
        plans.append(slots)
    start = prune(nfa.initial[None, :])[0]
    ids: dict[bytes, int] = {np.packbits(start).tobytes(): 0}
    sets = [start]
    rows: list[np.ndarray] = []
    done = 0
    while done < len(sets):
        block = np.stack(sets[done:done + chunk])
        done_block = block.shape[0]
        out = np.empty((done_block, L), dtype=np.int64)
        for x in range(L):
            nxt = np.zeros((done_block, m), dtype=bool)
            for src, starts, tgt in plans[x]:
                nxt[:, tgt] |= np.logical_or.reduceat(block[:, src], starts, axis=1)
            nxt = prune(nxt)
            packed = np.packbits(nxt, axis=1)
            uniq, first, inv = np.unique(packed, axis=0, return_index=True, return_inverse=True)
            inv = inv.reshape(-1)
            uid = np.empty(uniq.shape[0], dtype=np.int64)
            for r in range(uniq.shape[0]):
                key = uniq[r].tobytes()
                got = ids.get(key)
                if got is None:
                    got = ids[key] = len(sets)
                    sets.append(nxt[first[r]].copy())
                    if len(sets) > cap:
                        raise ResourceLimitError(f"state cap {cap} exceeded during subset construction")
                uid[r] = got
            out[:, x] = uid[inv]
        rows.append(out)
        done += done_block
    trans = np.concatenate(rows)
    acc = np.array([bool(np.any(s & nfa.accepting)) for s in sets])
    return minimize(_dfa(nfa.alphabet, trans, acc))


def concat(a: Dfa, b: Dfa, order: Sequence[str] = (), cap: int | None = None) -> Dfa:
    return determinize(fusion_concat(a, b, order), cap)


def star(a: Dfa, cap: int | None = None) -> Dfa:
    d = determinize(fusion_star(a), cap)
    return product(d, length_one(a.alphabet), "or", cap=cap)


def exists(a: Dfa, var: str, cap: int | None = None) -> Dfa:
    if var not in a.alphabet:
        return a
    return determinize(project(a, var), cap)


def forall(a: Dfa, var: str, cap: int | None = None) -> Dfa:
    if var not in a.alphabet:
        return a
    return complement(exists(complement(a), var, cap))


# -- minimisation -----------------------------------------------------------

def reachable(a: Dfa) -> np.ndarray:
    seen = np.zeros(a.states, dtype=bool)
    seen[0] = True
    frontier = np.array([0])
    while frontier.size:
        nxt = np.unique(a.trans[frontier])
        nxt = nxt[~seen[nxt]]
        seen[nxt] = True
        frontier = nxt
    return seen


def _renumber_bfs(trans: np.ndarray, init: int) -> np.ndarray:
    """Canonical ids: breadth-first from ``init``, letters in ascending order."""
    n = trans.shape[0]
    new_id = -np.ones(n, dtype=np.int64)
    new_id[init] = 0
    count = 1
    frontier = np.array([init])
    while frontier.size:
        flat = trans[frontier].reshape(-1)
        flat = flat[new_id[flat] < 0]
        if flat.size:
            _, first = np.unique(flat, return_index=True)
            fresh = flat[np.sort(first)]
            new_id[fresh] = np.arange(count, count + fresh.size)
            count += fresh.size
            frontier = fresh
        else:
            frontier = flat
    return new_id


def minimize(a: Dfa) -> Dfa:
    """Moore partition refinement followed by canonical breadth-first numbering."""
    if a.minimal:
        return a
    keep = reachable(a)
    if not keep.all():
        idx = np.flatnonzero(keep)
        remap = -np.ones(a.states, dtype=np.int64)
        remap[idx] = np.arange(idx.size)
        trans = remap[a.trans[idx]]
        acc = a.accepting[idx]
    else:
        trans = a.trans.astype(np.int64)
        acc = a.accepting
    # state 0 is distinguished only through ε, which lies outside the universe
    cls = acc.astype(np.int64)
    count = len(np.unique(cls))
    while True:
        sig = np.column_stack([cls, cls[trans]])
        _, new = np.unique(sig, axis=0, return_inverse=True)
        new = new.reshape(-1)
        new_count = int(new.max()) + 1
        cls = new
        if new_count == count:
            break
        count = new_count
    qtrans = np.zeros((count, trans.shape[1]), dtype=np.int64)
    qtrans[cls] = cls[trans]
    qacc = np.zeros(count, dtype=bool)
    qacc[cls] = acc
    order = _renumber_bfs(qtrans, int(cls[0]))
    out = np.empty_like(qtrans)
    out[order] = order[qtrans]
    oacc = np.empty_like(qacc)
    oacc[order] = qacc
    return _dfa(a.alphabet, out, oacc, True)


# -- queries ----------------------------------------------------------------

def live_states(a: Dfa) -> np.ndarray:
    """States reached by at least one letter from the initial state."""
    seen = np.zeros(a.states, dtype=bool)
    frontier = np.unique(a.trans[0])
    seen[frontier] = True
    while frontier.size:
        nxt = np.unique(a.trans[frontier])
        nxt = nxt[~seen[nxt]]
        seen[nxt] = True
        frontier = nxt
    return seen


def is_empty(a: Dfa) -> bool:
    return not np.any(live_states(a) & a.accepting)


def is_universal(a: Dfa) -> bool:
    check_total(a)
    return bool(np.all(a.accepting[live_states(a)]))


def distance_to_accept(a: Dfa) -> np.ndarray:
    """Fewest letters leading to an accepting state (0 for accepting states; -1 if none)."""
    n = a.states
    dist = -np.ones(n, dtype=np.int64)
    dist[a.accepting] = 0
    layer = 0
    while True:
        known = dist >= 0
        hit = np.any(known[a.trans], axis=1) & ~known
        if not hit.any():
            return dist
        layer += 1
        dist[hit] = layer


def shortest_word(a: Dfa) -> list[int] | None:
    """Minimum-length accepted word (letter codes), lexicographically least among those."""
    dist = distance_to_accept(a)
    first = dist[a.trans[0]]
    ok = first >= 0
    if not ok.any():
        return None
    best = first[ok].min()
    x = int(np.flatnonzero(ok & (first == best))[0])
    word = [x]
    s = int(a.trans[0, x])
    while dist[s] > 0:
        nxt = dist[a.trans[s]]
        x = int(np.flatnonzero(nxt == dist[s] - 1)[0])
        word.append(x)
        s = int(a.trans[s, x])
    return word


def is_prefix_closed(a: Dfa) -> bool:
    """No rejecting state reached by a non-empty word can lead on to acceptance."""
    live = live_states(a)
    dist = distance_to_accept(a)
    bad = live & ~a.accepting & (dist >= 0)
    return not bad.any()


def equivalent(a: Dfa, b: Dfa) -> bool:
    return is_empty(product(a, b, "xor"))


def isomorphic(a: Dfa, b: Dfa) -> bool:
    """Equality of canonical numberings (both inputs minimal)."""
    return (a.alphabet == b.alphabet and np.array_equal(a.trans, b.trans)
            and np.array_equal(a.accepting, b.accepting))


# -- guards and serialisation -----------------------------------------------

def guard_formula(letters: np.ndarray, alphabet: Sequence[str]) -> PropFormula:
    """A propositional formula true exactly on the letter set ``letters`` (bool mask)."""
    k = len(alphabet)

    def build_guard(mask: np.ndarray, depth: int) -> PropFormula:
        if mask.all():
            return PConst(True)
        if not mask.any():
            return PConst(False)
        half = mask.size // 2
        hi, lo = mask[half:], mask[:half]  # variable alphabet[depth] true / false
        var = PVar(alphabet[depth])
        if np.array_equal(hi, lo):
            return build_guard(lo, depth + 1)
        g1, g0 = build_guard(hi, depth + 1), build_guard(lo, depth + 1)
        parts = []
        if g1 != PConst(False):
            parts.append(var if g1 == PConst(True) else conj([var, g1]))
        if g0 != PConst(False):
            parts.append(PNot(var) if g0 == PConst(True) else conj([PNot(var), g0]))
        return disj(parts)

    if k == 0:
        return PConst(bool(letters[0]))
    return build_guard(np.asarray(letters, dtype=bool), 0)


def edges(a: Dfa) -> list[tuple[int, PropFormula, int]]:
    out = []
    for s in range(a.states):
        row = a.trans[s]
        for t in np.unique(row):
            out.append((s, guard_formula(row == t, a.alphabet), int(t)))
    return out


def to_json(a: Dfa) -> str:
    doc = {
        "alphabet": list(a.alphabet),
        "states": a.states,
        "initial": 0,
        "accepting": [int(s) for s in np.flatnonzero(a.accepting)],
        "edges": [{"from": s, "guard": print_prop(g), "to": t} for s, g, t in edges(a)],
    }
    return json.dumps(doc, indent=2) + "\n"


def from_json(text: str) -> Dfa:
    doc = json.loads(text)
    alphabet = tuple(doc["alphabet"])
    n = int(doc["states"])
    L = 1 << len(alphabet)
    trans = -np.ones((n, L), dtype=np.int64)
    for e in doc["edges"]:
        mask = letter_predicate(parse_prop(e["guard"], alphabet), alphabet)
        s = int(e["from"])
        if np.any(trans[s][mask] >= 0):
            raise NotTotalError(f"state {s}: overlapping guards")
        trans[s][mask] = int(e["to"])
    if np.any(trans < 0):
        raise NotTotalError("guards do not cover every letter")
    if int(doc.get("initial", 0)) != 0:
        raise NotTotalError("initial state must be 0")
    acc = np.zeros(n, dtype=bool)
    acc[list(doc["accepting"])] = True
    return Dfa(alphabet, trans.astype(np.int32), acc)
