"""QDDC abstract syntax, surface parser, printer and fragment classification.

Derived constructs (``pt``, ``ext``, ``true``, ``false``, ``<>``, ``[]``, ``=>``,
``<=>``) are expanded by the parser, so later stages only see the core grammar.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Union

from .errors import ParseError, SpecError, UndeclaredVariableError
from .lexer import Lexer
from .prop import (
    PropFormula,
    PropParser,
    PVar,
    print_prop,
    prop_size,
    prop_vars,
    substitute_prop,
)

CMP_OPS = ("<", "<=", "=", ">=", ">")
Const = Union[int, str]


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return print_qddc(self)


@dataclass(frozen=True, slots=True)
class Pt(Formula):
    """<phi>: phi holds at the first point; the length is unconstrained."""

    phi: PropFormula


@dataclass(frozen=True, slots=True)
class AllButLast(Formula):
    """[phi]: phi at every point except the last."""

    phi: PropFormula


@dataclass(frozen=True, slots=True)
class All(Formula):
    """[[phi]]: phi at every point."""

    phi: PropFormula


@dataclass(frozen=True, slots=True)
class Unit(Formula):
    """{{phi}}: a unit interval whose first point satisfies phi."""

    phi: PropFormula


@dataclass(frozen=True, slots=True)
class Chop(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Star(Formula):
    arg: Formula


@dataclass(frozen=True, slots=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class SlenCmp(Formula):
    op: str
    const: Const


@dataclass(frozen=True, slots=True)
class ScountCmp(Formula):
    phi: PropFormula
    op: str
    const: Const


@dataclass(frozen=True, slots=True)
class SdurCmp(Formula):
    phi: PropFormula
    op: str
    const: Const


PROP_ATOMS = (Pt, AllButLast, All, Unit)
TERM_ATOMS = (SlenCmp, ScountCmp, SdurCmp)
ATOMS = PROP_ATOMS + TERM_ATOMS
BINARY = (Chop, Or, And)

# derived constructs
TRUE = SlenCmp(">=", 0)
FALSE = SlenCmp("<", 0)
PT = SlenCmp("=", 0)
EXT = SlenCmp(">=", 1)


def diamond(d: Formula) -> Formula:
    return Chop(Chop(TRUE, d), TRUE)


def box(d: Formula) -> Formula:
    return Not(diamond(Not(d)))


def implies(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    return And(implies(a, b), implies(b, a))


def chop_all(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    out = parts[0]
    for p in parts[1:]:
        out = Chop(out, p)
    return out


def and_all(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def or_all(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return FALSE
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def compare(value: int, op: str, const: int) -> bool:
    if op == "<":
        return value < const
    if op == "<=":
        return value <= const
    if op == "=":
        return value == const
    if op == ">=":
        return value >= const
    return value > const


# -- traversal helpers ------------------------------------------------------

def children(d: Formula) -> tuple[Formula, ...]:
    if isinstance(d, BINARY):
        return (d.left, d.right)
    if isinstance(d, (Not, Star)):
        return (d.arg,)
    if isinstance(d, (Exists, Forall)):
        return (d.body,)
    return ()


def rebuild(d: Formula, kids: tuple[Formula, ...]) -> Formula:
    if isinstance(d, BINARY):
        return type(d)(*kids)
    if isinstance(d, (Not, Star)):
        return type(d)(kids[0])
    if isinstance(d, (Exists, Forall)):
        return type(d)(d.var, kids[0])
    return d


def walk(d: Formula, path: tuple = ()) -> Iterator[tuple[tuple, Formula]]:
    yield path, d
    for i, kid in enumerate(children(d)):
        yield from walk(kid, path + (i,))


def nodecount(d: Formula) -> int:
    """AST size including the propositional sub-trees."""
    total = 0
    for _, node in walk(d):
        total += 1
        if isinstance(node, PROP_ATOMS) or isinstance(node, (ScountCmp, SdurCmp)):
            total += prop_size(node.phi)
    return total


def free_vars(d: Formula) -> frozenset[str]:
    if isinstance(d, (Pt, AllButLast, All, Unit, ScountCmp, SdurCmp)):
        return prop_vars(d.phi)
    if isinstance(d, SlenCmp):
        return frozenset()
    if isinstance(d, (Exists, Forall)):
        return free_vars(d.body) - {d.var}
    out: frozenset[str] = frozenset()
    for kid in children(d):
        out |= free_vars(kid)
    return out


def all_vars(d: Formula) -> frozenset[str]:
    out = set(free_vars(d))
    for _, node in walk(d):
        if isinstance(node, (Exists, Forall)):
            out.add(node.var)
    return frozenset(out)


def substitute(d: Formula, mapping: Mapping[str, PropFormula]) -> Formula:
    """Replace free propositional variables; quantifiers shadow."""
    if not mapping:
        return d
    if isinstance(d, (Pt, AllButLast, All, Unit)):
        return type(d)(substitute_prop(d.phi, mapping))
    if isinstance(d, (ScountCmp, SdurCmp)):
        return type(d)(substitute_prop(d.phi, mapping), d.op, d.const)
    if isinstance(d, SlenCmp):
        return d
    if isinstance(d, (Exists, Forall)):
        inner = {k: v for k, v in mapping.items() if k != d.var}
        return type(d)(d.var, substitute(d.body, inner))
    return rebuild(d, tuple(substitute(k, mapping) for k in children(d)))


def resolve_constants(d: Formula, constants: Mapping[str, int]) -> Formula:
    if isinstance(d, TERM_ATOMS):
        if isinstance(d.const, str):
            if d.const not in constants:
                raise SpecError(f"unresolved constant {d.const!r}")
            value = constants[d.const]
            if value < 0:
                raise SpecError(f"constant {d.const!r} is negative")
            if isinstance(d, SlenCmp):
                return SlenCmp(d.op, value)
            return type(d)(d.phi, d.op, value)
        return d
    return rebuild(d, tuple(resolve_constants(k, constants) for k in children(d)))


def max_constant(d: Formula) -> int:
    best = 0
    for _, node in walk(d):
        if isinstance(node, TERM_ATOMS) and isinstance(node.const, int):
            best = max(best, node.const)
    return best


# -- fragments --------------------------------------------------------------

@dataclass(frozen=True)
class FragmentTag:
    tag: str  # "CE", "SeCe" or "FullQDDC"
    offending: tuple[tuple, ...] = ()

    def within(self, fragment: str) -> bool:
        order = {"CE": 0, "SeCe": 1, "FullQDDC": 2}
        return order[self.tag] <= order[fragment]


def classify_fragment(d: Formula) -> FragmentTag:
    """Smallest of CE ⊆ SeCe ⊆ FullQDDC containing ``d``.

    ``offending`` lists the paths that keep ``d`` out of the next smaller
    fragment (negations/quantifiers for FullQDDC, conjunctions for SeCe).
    """
    full = [p for p, n in walk(d) if isinstance(n, (Not, Exists, Forall))]
    if full:
        return FragmentTag("FullQDDC", tuple(full))
    conj = [p for p, n in walk(d) if isinstance(n, And)]
    if conj:
        return FragmentTag("SeCe", tuple(conj))
    return FragmentTag("CE")


# -- printing ---------------------------------------------------------------

_LEVEL = {Or: 1, And: 2, Chop: 3}


def _level(d: Formula) -> int:
    if isinstance(d, (Exists, Forall)):
        return 0
    if isinstance(d, Not):
        return 4
    if isinstance(d, Star):
        return 5
    return _LEVEL.get(type(d), 6)


def _prop_arg(phi: PropFormula) -> str:
    text = print_prop(phi)
    return text if isinstance(phi, PVar) or text in ("true", "false") else f"({text})"


def print_qddc(d: Formula) -> str:
    if isinstance(d, Pt):
        return f"<{print_prop(d.phi)}>"
    if isinstance(d, AllButLast):
        return f"[{print_prop(d.phi)}]"
    if isinstance(d, All):
        return f"[[{print_prop(d.phi)}]]"
    if isinstance(d, Unit):
        return f"{{{{{print_prop(d.phi)}}}}}"
    if d == TRUE:
        return "true"
    if d == FALSE:
        return "false"
    if isinstance(d, SlenCmp):
        return f"slen{d.op}{d.const}"
    if isinstance(d, ScountCmp):
        return f"scount {_prop_arg(d.phi)}{d.op}{d.const}"
    if isinstance(d, SdurCmp):
        return f"sdur {_prop_arg(d.phi)}{d.op}{d.const}"
    if isinstance(d, (Exists, Forall)):
        kw = "ex" if isinstance(d, Exists) else "all"
        return f"{kw} {d.var}. {print_qddc(d.body)}"
    if isinstance(d, Not):
        inner = print_qddc(d.arg)
        return "!" + (inner if _level(d.arg) >= 4 else f"({inner})")
    if isinstance(d, Star):
        inner = print_qddc(d.arg)
        return (inner if _level(d.arg) >= 5 else f"({inner})") + "*"
    lvl = _level(d)
    op = {Or: " || ", And: " && ", Chop: " ^ "}[type(d)]
    left, right = print_qddc(d.left), print_qddc(d.right)
    if _level(d.left) < lvl:
        left = f"({left})"
    if _level(d.right) <= lvl:
        right = f"({right})"
    return left + op + right


# -- parsing ----------------------------------------------------------------

CallHook = Callable[["QddcParser", str, int], Formula]


class QddcParser:
    """Precedence, weakest first: quantifiers, <=>, =>, ||, &&, ^, unary, postfix *.

    ``call_hook`` handles ``name(`` primaries (liveness operators and macro
    calls in the spec-file grammar); without it such input is an error.
    """

    def __init__(
        self,
        lexer: Lexer,
        sigma: Iterable[str] | None = None,
        call_hook: CallHook | None = None,
        allow_symbolic: bool = False,
    ):
        self.lx = lexer
        self.sigma = None if sigma is None else frozenset(sigma)
        self.call_hook = call_hook
        self.allow_symbolic = allow_symbolic
        self.bound: list[str] = []

    # props inside brackets see bound quantifier variables too
    def prop(self) -> PropFormula:
        scope = None if self.sigma is None else self.sigma | set(self.bound)
        return PropParser(self.lx, scope).parse()

    def parse(self) -> Formula:
        if self.lx.at("ex") or self.lx.at("all"):
            return self._quant()
        left = self._implies()
        if self.lx.accept("<=>"):
            left = iff(left, self._implies())
        return left

    def _quant(self) -> Formula:
        kind = self.lx.next().text
        var = self.lx.expect_ident().text
        self.lx.expect(".")
        self.bound.append(var)
        try:
            body = self.parse()
        finally:
            self.bound.pop()
        return Exists(var, body) if kind == "ex" else Forall(var, body)

    def _implies(self) -> Formula:
        left = self._or()
        if self.lx.accept("=>"):
            return implies(left, self._implies_or_quant())
        return left

    def _implies_or_quant(self) -> Formula:
        if self.lx.at("ex") or self.lx.at("all"):
            return self._quant()
        return self._implies()

    def _or(self) -> Formula:
        left = self._and()
        while self.lx.accept("||"):
            left = Or(left, self._and())
        return left

    def _and(self) -> Formula:
        left = self._chop()
        while self.lx.accept("&&"):
            left = And(left, self._chop())
        return left

    def _chop(self) -> Formula:
        left = self._unary()
        while self.lx.accept("^"):
            left = Chop(left, self._unary())
        return left

    def _unary(self) -> Formula:
        if self.lx.accept("!"):
            return Not(self._unary())
        if self.lx.accept("<>"):
            return diamond(self._unary())
        if self.lx.accept("[]"):
            return box(self._unary())
        d = self._primary()
        while self.lx.accept("*"):
            d = Star(d)
        return d

    def _const(self) -> Const:
        tok = self.lx.peek()
        if tok.kind == "sym" and tok.text == "-":
            raise self.lx.error("negative constant; constants must be natural numbers")
        if tok.kind == "num":
            self.lx.next()
            return int(tok.text)
        if tok.kind == "id" and self.allow_symbolic:
            self.lx.next()
            return tok.text
        raise self.lx.error(f"expected natural-number constant, found {tok.text or 'end of input'!r}")

    def _cmp(self) -> str:
        tok = self.lx.peek()
        if tok.kind == "sym" and tok.text in CMP_OPS:
            self.lx.next()
            return tok.text
        raise self.lx.error(f"expected comparison operator, found {tok.text or 'end of input'!r}")

    def _primary(self) -> Formula:
        lx = self.lx
        tok = lx.peek()
        if tok.kind == "sym":
            if tok.text == "(":
                lx.next()
                inner = self.parse()
                lx.expect(")")
                return inner
            if tok.text == "<":
                lx.next()
                phi = self.prop()
                lx.expect(">")
                return Pt(phi)
            if tok.text == "[":
                if lx.adjacent("["):
                    lx.next()
                    lx.next()
                    phi = self.prop()
                    if not lx.adjacent("]"):
                        raise lx.error("expected ']]'")
                    lx.next()
                    lx.next()
                    return All(phi)
                lx.next()
                phi = self.prop()
                lx.expect("]")
                return AllButLast(phi)
            if tok.text == "{":
                double = lx.adjacent("{")
                lx.next()
                if double:
                    lx.next()
                phi = self.prop()
                if double:
                    if not lx.adjacent("}"):
                        raise lx.error("expected '}}'")
                    lx.next()
                lx.expect("}")
                return Unit(phi)
        if tok.kind == "id":
            word = tok.text
            if word in ("ex", "all"):
                return self._quant()
            if word == "slen":
                lx.next()
                op = self._cmp()
                return SlenCmp(op, self._const())
            if word in ("scount", "sdur"):
                lx.next()
                phi = self.prop()
                op = self._cmp()
                c = self._const()
                return ScountCmp(phi, op, c) if word == "scount" else SdurCmp(phi, op, c)
            if word == "pt":
                lx.next()
                return PT
            if word == "ext":
                lx.next()
                return EXT
            if word == "true":
                lx.next()
                return TRUE
            if word == "false":
                lx.next()
                return FALSE
            if lx.at("(", 1) and self.call_hook is not None:
                lx.next()
                return self.call_hook(self, word, tok.start)
        raise lx.error(f"expected QDDC formula, found {tok.text or 'end of input'!r}")


def parse_qddc(text: str, sigma: Iterable[str] | None = None, allow_symbolic: bool = False) -> Formula:
    """Parse a QDDC formula; free variables must lie in ``sigma`` when given."""
    lx = Lexer(text)
    if lx.at_eof():
        raise lx.error("empty formula")
    d = QddcParser(lx, sigma, allow_symbolic=allow_symbolic).parse()
    if not lx.at_eof():
        raise lx.error(f"unexpected {lx.peek().text!r}")
    return d


__all__ = [
    "Formula", "Pt", "AllButLast", "All", "Unit", "Chop", "Not", "Or", "And", "Star",
    "Exists", "Forall", "SlenCmp", "ScountCmp", "SdurCmp", "TRUE", "FALSE", "PT", "EXT",
    "diamond", "box", "implies", "iff", "chop_all", "and_all", "or_all", "compare",
    "children", "rebuild", "walk", "nodecount", "free_vars", "all_vars", "substitute",
    "resolve_constants", "max_constant", "FragmentTag", "classify_fragment", "print_qddc",
    "QddcParser", "parse_qddc", "ParseError", "UndeclaredVariableError",
]
