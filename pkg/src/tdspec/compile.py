"""Formula automata: structural compilation of QDDC to minimal total DFAs.

Every node is compiled over its own free variables and minimised straight
away; binary nodes cylindrify their operands to the union alphabet.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field
from typing import Sequence

from . import automata as fa
from .errors import ResourceLimitError, UndeclaredVariableError
from .qddc import (
    ATOMS,
    And,
    Chop,
    Exists,
    Forall,
    Formula,
    Not,
    Or,
    Star,
    all_vars,
    free_vars,
    print_qddc,
)


@dataclass
class CompilationReport:
    nodes: list[tuple[str, str, int]] = field(default_factory=list)  # (path, kind, states)
    final_states: int = 0
    seconds: float = 0.0

    @property
    def peak_states(self) -> int:
        return max((s for _, _, s in self.nodes), default=self.final_states)

    def to_dict(self) -> dict:
        return {
            "final_states": self.final_states,
            "peak_states": self.peak_states,
            "seconds": round(self.seconds, 4),
            "nodes": [{"path": p, "kind": k, "states": s} for p, k, s in self.nodes],
        }


class _Compiler:
    def __init__(self, order: Sequence[str], cap: int):
        self.order = list(order)
        self.cap = cap
        self.report = CompilationReport()
        self.memo: dict[Formula, fa.Dfa] = {}

    def run(self, d: Formula, path: tuple) -> fa.Dfa:
        hit = self.memo.get(d)
        if hit is not None:
            return hit
        try:
            out = self._node(d, path)
        except ResourceLimitError as err:
            if err.path:
                raise
            raise ResourceLimitError(str(err), path or ("root",)) from None
        if out.states > self.cap:
            raise ResourceLimitError(f"state cap {self.cap} exceeded", path or ("root",))
        self.report.nodes.append(("/".join(map(str, path)) or "root", type(d).__name__, out.states))
        self.memo[d] = out
        return out

    def _node(self, d: Formula, path: tuple) -> fa.Dfa:
        cap = self.cap
        if isinstance(d, ATOMS):
            return fa.atom_automaton(d, self.order, cap)
        if isinstance(d, Not):
            return fa.complement(self.run(d.arg, path + (0,)))
        if isinstance(d, (And, Or)):
            a = self.run(d.left, path + (0,))
            b = self.run(d.right, path + (1,))
            return fa.product(a, b, "and" if isinstance(d, And) else "or", self.order, cap)
        if isinstance(d, Chop):
            a = self.run(d.left, path + (0,))
            b = self.run(d.right, path + (1,))
            return fa.concat(a, b, self.order, cap)
        if isinstance(d, Star):
            return fa.star(self.run(d.arg, path + (0,)), cap)
        if isinstance(d, (Exists, Forall)):
            return self._quantified(d, path)
        raise TypeError(f"not a QDDC formula: {d!r}")


    def _quantified(self, d: Exists | Forall, path: tuple) -> fa.Dfa:
        """A block of like quantifiers over a conjunction is eliminated one
        variable at a time, joining only the conjuncts that mention it."""
        kind = type(d)
        names: list[str] = []
        body: Formula = d
        while isinstance(body, kind):
            names.append(body.var)
            body = body.body
        depth = len(names)
        if kind is Forall:
            body = Not(body)
        parts = [self.run(c, path + (0,) * depth + (i,)) for i, c in enumerate(_conjuncts(body))]
        pending = set(names)
        while pending:
            def cost(u):
                group = [p for p in parts if u in p.alphabet]
                width = len(set().union(*(p.alphabet for p in group))) if group else 0
                return (width, sum(p.states for p in group), u)
            u = min(pending, key=cost)
            pending.discard(u)
            group = [p for p in parts if u in p.alphabet]
            if not group:
                continue
            parts = [p for p in parts if u not in p.alphabet]
            parts.append(fa.exists(self._conjoin(group), u, self.cap))
        out = self._conjoin(parts)
        return fa.complement(out) if kind is Forall else out

    def _conjoin(self, parts: list[fa.Dfa]) -> fa.Dfa:
        parts = sorted(parts, key=lambda p: (len(p.alphabet), p.states))
        out = parts[0]
        for p in parts[1:]:
            out = fa.product(out, p, "and", self.order, self.cap)
        return out


def _conjuncts(d: Formula) -> list[Formula]:
    if isinstance(d, And):
        return _conjuncts(d.left) + _conjuncts(d.right)
    if isinstance(d, Not):
        if isinstance(d.arg, Or):
            return _conjuncts(Not(d.arg.left)) + _conjuncts(Not(d.arg.right))
        if isinstance(d.arg, Not):
            return _conjuncts(d.arg.arg)
    return [d]


def compile_formula(d: Formula, sigma: Sequence[str], cap: int | None = None) -> tuple[fa.Dfa, CompilationReport]:
    """Minimal total DFA over ``sigma`` accepting exactly the word models of ``d``."""
    sigma = tuple(sigma)
    stray = free_vars(d) - set(sigma)
    if stray:
        raise UndeclaredVariableError(sorted(stray)[0])
    cap = fa.state_cap() if cap is None else cap
    order = list(sigma) + sorted(all_vars(d) - set(sigma))
    comp = _Compiler(order, cap)
    start = time.perf_counter()
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20000))
    try:
        dfa = comp.run(d, ())
    finally:
        sys.setrecursionlimit(limit)
    dfa = fa.cylindrify(dfa, sigma)
    comp.report.final_states = dfa.states
    comp.report.seconds = time.perf_counter() - start
    return dfa, comp.report


def compile(d: Formula, sigma: Sequence[str], cap: int | None = None) -> fa.Dfa:  # noqa: A001
    return compile_formula(d, sigma, cap)[0]


def describe(d: Formula) -> str:
    return print_qddc(d)
