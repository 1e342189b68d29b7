"""Seeded random generators for formulas, diagrams and words.

Used by the property tests, the acceptance suite and ``tdspec random``.
Every generator takes a ``random.Random`` so runs are reproducible.
"""

from __future__ import annotations

import random
from typing import Sequence

from .prop import PAnd, PConst, PIff, PImplies, PNot, POr, PropFormula, PVar
from .qddc import (
    CMP_OPS,
    All,
    AllButLast,
    And,
    Chop,
    Exists,
    Forall,
    Formula,
    Not,
    Or,
    Pt,
    ScountCmp,
    SdurCmp,
    SlenCmp,
    Star,
    Unit,
    chop_all,
)
from .secenl import Anti, Follows, Implies, Init, Nominated, Pref, SAnd, SeCeNL, SNot, SOr, Triggers
from .timing_diagram import Bound, Cell, Constraint, TimingDiagram, Waveform
from .semantics import Word

FRESH = "z"


def random_prop(rng: random.Random, names: Sequence[str], depth: int = 2) -> PropFormula:
    if depth <= 0 or rng.random() < 0.4:
        if not names or rng.random() < 0.08:
            return PConst(rng.random() < 0.5)
        return PVar(rng.choice(list(names)))
    kind = rng.choice(("not", "and", "or", "or", "and", "implies", "iff"))
    if kind == "not":
        return PNot(random_prop(rng, names, depth - 1))
    ctor = {"and": PAnd, "or": POr, "implies": PImplies, "iff": PIff}[kind]
    return ctor(random_prop(rng, names, depth - 1), random_prop(rng, names, depth - 1))


def random_atom(rng: random.Random, names: Sequence[str], max_const: int = 3) -> Formula:
    kind = rng.choice(("pt", "abl", "all", "unit", "slen", "scount", "sdur"))
    if kind == "slen":
        return SlenCmp(rng.choice(CMP_OPS), rng.randint(0, max_const))
    phi = random_prop(rng, names, 1)
    if kind == "scount":
        return ScountCmp(phi, rng.choice(CMP_OPS), rng.randint(0, max_const))
    if kind == "sdur":
        return SdurCmp(phi, rng.choice(CMP_OPS), rng.randint(0, max_const))
    return {"pt": Pt, "abl": AllButLast, "all": All, "unit": Unit}[kind](phi)


def random_qddc(rng: random.Random, sigma: Sequence[str], depth: int = 4, max_const: int = 3,
                fresh: bool = True) -> Formula:
    """Full QDDC of tree depth <= ``depth``; quantifiers bind Σ names or the fresh name ``z``."""

    def gen(d: int, scope: tuple[str, ...]) -> Formula:
        if d <= 0 or rng.random() < 0.25:
            return random_atom(rng, scope, max_const)
        kind = rng.choice(("chop", "chop", "not", "or", "and", "star", "ex", "all"))
        if kind in ("ex", "all"):
            var = rng.choice(list(sigma) + ([FRESH] if fresh else []))
            inner = scope if var in scope else scope + (var,)
            body = gen(d - 1, inner)
            return Exists(var, body) if kind == "ex" else Forall(var, body)
        if kind == "not":
            return Not(gen(d - 1, scope))
        if kind == "star":
            return Star(gen(d - 1, scope))
        ctor = {"chop": Chop, "or": Or, "and": And}[kind]
        return ctor(gen(d - 1, scope), gen(d - 1, scope))

    return gen(depth, tuple(sigma))


def random_sece(rng: random.Random, sigma: Sequence[str], depth: int = 3, max_const: int = 3,
                anchors: Sequence[str] = ()) -> Formula:
    """A SeCe formula; each name in ``anchors`` is forced to occur inside every model interval.

    Anchors are placed as ``[[u]]`` (or ``<u>``) pieces of a top-level chop
    chain, so every model of the body contains a position marked by them.
    """

    def gen(d: int) -> Formula:
        if d <= 0 or rng.random() < 0.3:
            return random_atom(rng, sigma, max_const)
        kind = rng.choice(("chop", "chop", "or", "and", "star"))
        if kind == "star":
            return Star(gen(d - 1))
        ctor = {"chop": Chop, "or": Or, "and": And}[kind]
        return ctor(gen(d - 1), gen(d - 1))

    body = gen(depth)
    if not anchors:
        return body
    pieces: list[Formula] = [body]
    for u in anchors:
        mark = All(PVar(u)) if rng.random() < 0.5 else Pt(PVar(u) if rng.random() < 0.7 else PAnd(PVar(u), random_prop(rng, sigma, 0)))
        pos = rng.randint(0, len(pieces))
        pieces.insert(pos, mark)
        if rng.random() < 0.5:
            pieces.insert(rng.randint(0, len(pieces)), gen(max(depth - 2, 0)))
    return chop_all(pieces)


OPERATOR_ARITY = {"pref": 1, "anti": 1, "init": 2, "implies": 2, "follows": 3, "triggers": 3}


def random_secenl_atom(rng: random.Random, sigma: Sequence[str], op: str, theta: Sequence[str] = (),
                       shared: bool = False, depth: int = 2, max_const: int = 2) -> SeCeNL:
    """One liveness atom; with ``shared`` at least one nominal occurs in two operands."""
    arity = OPERATOR_ARITY[op]
    theta = list(theta)
    sets: list[list[str]] = []
    for _ in range(arity):
        sets.append([u for u in theta if rng.random() < 0.5])
    if shared and arity > 1 and theta:
        u = rng.choice(theta)
        a, b = rng.sample(range(arity), 2)
        for i in (a, b):
            if u not in sets[i]:
                sets[i].append(u)
    ds = [Nominated(random_sece(rng, sigma, depth, max_const, sorted(s)), frozenset(s)) for s in sets]
    ctor = {"pref": Pref, "anti": Anti, "init": Init, "implies": Implies, "follows": Follows, "triggers": Triggers}[op]
    return ctor(*ds)


def random_secenl(rng: random.Random, sigma: Sequence[str], theta: Sequence[str] = (), depth: int = 1,
                  ops: Sequence[str] = tuple(OPERATOR_ARITY), shared: bool | None = None,
                  body_depth: int = 2, max_const: int = 2) -> SeCeNL:
    if depth <= 0 or rng.random() < 0.5:
        share = rng.random() < 0.5 if shared is None else shared
        return random_secenl_atom(rng, sigma, rng.choice(list(ops)), theta, share, body_depth, max_const)
    kind = rng.choice(("not", "and", "or"))
    if kind == "not":
        return SNot(random_secenl(rng, sigma, theta, depth - 1, ops, shared, body_depth, max_const))
    ctor = SAnd if kind == "and" else SOr
    return ctor(random_secenl(rng, sigma, theta, depth - 1, ops, shared, body_depth, max_const),
                random_secenl(rng, sigma, theta, depth - 1, ops, shared, body_depth, max_const))


def random_waveform(rng: random.Random, max_cells: int, names: Sequence[str], null: bool = False) -> Waveform:
    count = rng.randint(1, max_cells)
    symbols = ("2", "x") if null else ("0", "1", "2", "x")
    cells = [Cell(rng.choice(symbols), rng.random() < 0.35) for _ in range(count)]
    for u in names:
        i = rng.randrange(count)
        c = cells[i]
        cells[i] = Cell(c.symbol, c.stutter, c.markers + (u,))
    return Waveform(tuple(cells))


def random_bound(rng: random.Random, max_const: int) -> Bound:
    lo = rng.choice((None, rng.randint(0, max_const)))
    hi = rng.choice((None, rng.randint(0, max_const)))
    if lo is not None and hi is not None and hi < lo:
        lo, hi = hi, lo
    lo_open = lo is not None and rng.random() < 0.3
    hi_open = hi is not None and rng.random() < 0.3
    if lo is not None and hi is not None and lo == hi:
        lo_open = hi_open = False
    return Bound(lo, lo_open, hi, hi_open)


def random_td(rng: random.Random, sigma: Sequence[str], max_cells: int = 6, max_constraints: int = 2,
              max_nominals: int = 2, max_const: int = 4) -> TimingDiagram:
    """Up to one waveform per signal; nominals may be shared between waveforms."""
    signals = [v for v in sigma if rng.random() < 0.8] or [sigma[0]]
    noms = ["a", "b", "c", "d"][: rng.randint(0, max_nominals)]
    placed: list[list[str]] = [[] for _ in signals]
    for u in noms:
        for i in rng.sample(range(len(signals)), rng.randint(1, len(signals))):
            placed[i].append(u)
    waves = tuple((PVar(p), random_waveform(rng, max_cells, placed[i])) for i, p in enumerate(signals))
    constraints = []
    if len(noms) >= 1:
        for _ in range(rng.randint(0, max_constraints)):
            a, b = rng.choice(noms), rng.choice(noms)
            constraints.append(Constraint(a, b, random_bound(rng, max_const)))
    return TimingDiagram(waves, tuple(constraints))


def random_word(rng: random.Random, sigma: Sequence[str], n: int, density: float = 0.5) -> Word:
    return Word.from_sets(sigma, [{v for v in sigma if rng.random() < density} for _ in range(n)])
