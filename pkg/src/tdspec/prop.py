"""Propositional formulas over a finite variable set.

Formulas are immutable trees.  Evaluation works on Python bools and on numpy
bool arrays alike, which is how letters of an automaton alphabet and batches
of words are evaluated in bulk.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import UndeclaredVariableError
from .lexer import Lexer


class PropFormula:
    __slots__ = ()

    def __and__(self, other: "PropFormula") -> "PropFormula":
        return PAnd(self, other)

    def __or__(self, other: "PropFormula") -> "PropFormula":
        return POr(self, other)

    def __invert__(self) -> "PropFormula":
        return PNot(self)

    def __str__(self) -> str:
        return print_prop(self)


@dataclass(frozen=True, slots=True)
class PConst(PropFormula):
    value: bool


@dataclass(frozen=True, slots=True)
class PVar(PropFormula):
    name: str


@dataclass(frozen=True, slots=True)
class PNot(PropFormula):
    arg: PropFormula


@dataclass(frozen=True, slots=True)
class PAnd(PropFormula):
    left: PropFormula
    right: PropFormula


@dataclass(frozen=True, slots=True)
class POr(PropFormula):
    left: PropFormula
    right: PropFormula


@dataclass(frozen=True, slots=True)
class PImplies(PropFormula):
    left: PropFormula
    right: PropFormula


@dataclass(frozen=True, slots=True)
class PIff(PropFormula):
    left: PropFormula
    right: PropFormula


TRUE = PConst(True)
FALSE = PConst(False)


def conj(items: Iterable[PropFormula]) -> PropFormula:
    items = list(items)
    if not items:
        return TRUE
    out = items[0]
    for item in items[1:]:
        out = PAnd(out, item)
    return out


def disj(items: Iterable[PropFormula]) -> PropFormula:
    items = list(items)
    if not items:
        return FALSE
    out = items[0]
    for item in items[1:]:
        out = POr(out, item)
    return out


def prop_vars(phi: PropFormula) -> frozenset[str]:
    if isinstance(phi, PVar):
        return frozenset((phi.name,))
    if isinstance(phi, PConst):
        return frozenset()
    if isinstance(phi, PNot):
        return prop_vars(phi.arg)
    return prop_vars(phi.left) | prop_vars(phi.right)


def prop_size(phi: PropFormula) -> int:
    if isinstance(phi, (PVar, PConst)):
        return 1
    if isinstance(phi, PNot):
        return 1 + prop_size(phi.arg)
    return 1 + prop_size(phi.left) + prop_size(phi.right)


def eval_prop(phi: PropFormula, env: Mapping[str, object]):
    """Evaluate under ``env``; values may be bools or same-shaped bool arrays."""
    if isinstance(phi, PVar):
        return env[phi.name]
    if isinstance(phi, PConst):
        return np.bool_(phi.value)
    if isinstance(phi, PNot):
        return np.logical_not(eval_prop(phi.arg, env))
    a = eval_prop(phi.left, env)
    b = eval_prop(phi.right, env)
    if isinstance(phi, PAnd):
        return np.logical_and(a, b)
    if isinstance(phi, POr):
        return np.logical_or(a, b)
    if isinstance(phi, PImplies):
        return np.logical_or(np.logical_not(a), b)
    return np.equal(a, b)


def substitute_prop(phi: PropFormula, mapping: Mapping[str, PropFormula]) -> PropFormula:
    if isinstance(phi, PVar):
        return mapping.get(phi.name, phi)
    if isinstance(phi, PConst):
        return phi
    if isinstance(phi, PNot):
        return PNot(substitute_prop(phi.arg, mapping))
    return type(phi)(substitute_prop(phi.left, mapping), substitute_prop(phi.right, mapping))


def letter_bits(k: int) -> np.ndarray:
    """Bit matrix (2**k, k); variable i of letter x is bit k-1-i, so letter order is lexicographic."""
    idx = np.arange(1 << k, dtype=np.int64)
    shifts = np.arange(k - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts[None, :]) & 1).astype(bool)


def truth_table(phi: PropFormula, alphabet: tuple[str, ...]) -> np.ndarray:
    """Bool vector over the 2**k letters of ``alphabet``."""
    bits = letter_bits(len(alphabet))
    env = {name: bits[:, i] for i, name in enumerate(alphabet)}
    missing = prop_vars(phi) - set(alphabet)
    if missing:
        raise UndeclaredVariableError(sorted(missing)[0])
    val = eval_prop(phi, env)
    return np.broadcast_to(np.asarray(val, dtype=bool), (1 << len(alphabet),)).copy()


# -- printing ---------------------------------------------------------------

_PREC = {PIff: 1, PImplies: 2, POr: 3, PAnd: 4}


def _prec(phi: PropFormula) -> int:
    return _PREC.get(type(phi), 5)


def print_prop(phi: PropFormula) -> str:
    if isinstance(phi, PVar):
        return phi.name
    if isinstance(phi, PConst):
        return "true" if phi.value else "false"
    if isinstance(phi, PNot):
        inner = print_prop(phi.arg)
        return "!" + (inner if _prec(phi.arg) >= 5 else f"({inner})")
    p = _prec(phi)
    op = {PAnd: " && ", POr: " || ", PImplies: " => ", PIff: " <=> "}[type(phi)]
    left, right = print_prop(phi.left), print_prop(phi.right)
    # && and || are left-associative, => right-associative, <=> non-associative.
    if isinstance(phi, (PAnd, POr)):
        lp, rp = _prec(phi.left) < p, _prec(phi.right) <= p
    elif isinstance(phi, PImplies):
        lp, rp = _prec(phi.left) <= p, _prec(phi.right) < p
    else:
        lp, rp = _prec(phi.left) <= p, _prec(phi.right) <= p
    if lp:
        left = f"({left})"
    if rp:
        right = f"({right})"
    return left + op + right


# -- parsing ----------------------------------------------------------------

class PropParser:
    """Recursive-descent parser; reused by the QDDC parser for bracket contents."""

    def __init__(self, lexer: Lexer, sigma: Iterable[str] | None = None):
        self.lx = lexer
        self.sigma = None if sigma is None else frozenset(sigma)

    def parse(self) -> PropFormula:
        left = self._implies()
        if self.lx.accept("<=>"):
            left = PIff(left, self._implies())
        return left

    def _implies(self) -> PropFormula:
        left = self._or()
        if self.lx.accept("=>"):
            return PImplies(left, self._implies())
        return left

    def _or(self) -> PropFormula:
        left = self._and()
        while self.lx.accept("||"):
            left = POr(left, self._and())
        return left

    def _and(self) -> PropFormula:
        left = self._unary()
        while self.lx.accept("&&"):
            left = PAnd(left, self._unary())
        return left

    def _unary(self) -> PropFormula:
        if self.lx.accept("!"):
            return PNot(self._unary())
        tok = self.lx.peek()
        if tok.kind == "sym" and tok.text == "(":
            self.lx.next()
            inner = self.parse()
            self.lx.expect(")")
            return inner
        if tok.kind == "num" and tok.text in ("0", "1"):
            self.lx.next()
            return PConst(tok.text == "1")
        if tok.kind == "id":
            self.lx.next()
            if tok.text == "true":
                return TRUE
            if tok.text == "false":
                return FALSE
            if self.sigma is not None and tok.text not in self.sigma:
                raise UndeclaredVariableError(tok.text, *self.lx.position(tok.start))
            return PVar(tok.text)
        raise self.lx.error(f"expected propositional formula, found {tok.text or 'end of input'!r}")


def parse_prop(text: str, sigma: Iterable[str] | None = None) -> PropFormula:
    """Parse ``text``; with ``sigma`` given, every variable must be declared in it."""
    lx = Lexer(text)
    if lx.at_eof():
        raise lx.error("empty propositional formula")
    phi = PropParser(lx, sigma).parse()
    if not lx.at_eof():
        raise lx.error(f"unexpected {lx.peek().text!r}")
    return phi
