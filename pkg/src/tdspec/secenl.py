"""SeCeNL: boolean combinations of the six limited-liveness operators over
nominated SeCe formulas."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import AlphabetMismatchError, FragmentError
from .lexer import Lexer
from .qddc import Formula, QddcParser, all_vars, classify_fragment, nodecount, print_qddc

OPERATORS = ("pref", "init", "anti", "implies", "follows", "triggers")


@dataclass(frozen=True)
class Nominated:
    """``D:Θ``; the nominals are variables of ``body`` pinned to one position."""

    body: Formula
    noms: frozenset[str] = frozenset()

    def __str__(self) -> str:
        text = print_qddc(self.body)
        if self.noms:
            text = f"({text}):{{{', '.join(sorted(self.noms))}}}"
        return text


class SeCeNL:
    __slots__ = ()

    def __str__(self) -> str:
        return print_secenl(self)


@dataclass(frozen=True)
class Pref(SeCeNL):
    d: Nominated


@dataclass(frozen=True)
class Init(SeCeNL):
    """init(D1/D2): D1 occurs on an initial prefix no later than D2 does."""

    d1: Nominated
    d2: Nominated


@dataclass(frozen=True)
class Anti(SeCeNL):
    d: Nominated


@dataclass(frozen=True)
class Implies(SeCeNL):
    d1: Nominated
    d2: Nominated


@dataclass(frozen=True)
class Follows(SeCeNL):
    d1: Nominated
    d2: Nominated
    d3: Nominated


@dataclass(frozen=True)
class Triggers(SeCeNL):
    d1: Nominated
    d2: Nominated
    d3: Nominated


@dataclass(frozen=True)
class Plain(SeCeNL):
    """A QDDC formula evaluated on the whole word (spec-file items such as ``dc`` blocks)."""

    d: Formula


@dataclass(frozen=True)
class SNot(SeCeNL):
    arg: SeCeNL


@dataclass(frozen=True)
class SAnd(SeCeNL):
    left: SeCeNL
    right: SeCeNL


@dataclass(frozen=True)
class SOr(SeCeNL):
    left: SeCeNL
    right: SeCeNL


ATOMIC = (Pref, Init, Anti, Implies, Follows, Triggers)


def operands(z: SeCeNL) -> tuple[Nominated, ...]:
    if isinstance(z, (Pref, Anti)):
        return (z.d,)
    if isinstance(z, (Init, Implies)):
        return (z.d1, z.d2)
    if isinstance(z, (Follows, Triggers)):
        return (z.d1, z.d2, z.d3)
    return ()


def op_name(z: SeCeNL) -> str:
    return type(z).__name__.lower()


def s_and_all(items: Iterable[SeCeNL]) -> SeCeNL | None:
    out = None
    for item in items:
        out = item if out is None else SAnd(out, item)
    return out


def atoms(z: SeCeNL) -> list[SeCeNL]:
    if isinstance(z, SNot):
        return atoms(z.arg)
    if isinstance(z, (SAnd, SOr)):
        return atoms(z.left) + atoms(z.right)
    return [z]


def nominals(z: SeCeNL) -> frozenset[str]:
    out: set[str] = set()
    for a in atoms(z):
        for d in operands(a):
            out |= d.noms
    return frozenset(out)


def size(z: SeCeNL) -> int:
    """Node count: connectives, operators, nominal annotations and bodies."""
    if isinstance(z, SNot):
        return 1 + size(z.arg)
    if isinstance(z, (SAnd, SOr)):
        return 1 + size(z.left) + size(z.right)
    if isinstance(z, Plain):
        return nodecount(z.d)
    return 1 + sum(nodecount(d.body) + len(d.noms) for d in operands(z))


def check_nominated(d: Nominated, sigma: Iterable[str] | None = None) -> None:
    tag = classify_fragment(d.body)
    if not tag.within("SeCe"):
        paths = ", ".join("/".join(map(str, p)) or "root" for p in tag.offending)
        raise FragmentError(f"operand {print_qddc(d.body)!r} is not SeCe (offending nodes at {paths})")
    missing = d.noms - all_vars(d.body)
    if missing:
        raise AlphabetMismatchError(f"nominal(s) {sorted(missing)} do not occur in {print_qddc(d.body)!r}")
    if sigma is not None:
        clash = d.noms & frozenset(sigma)
        if clash:
            raise AlphabetMismatchError(f"nominal(s) {sorted(clash)} clash with the system alphabet")


def check_secenl(z: SeCeNL, sigma: Iterable[str] | None = None) -> None:
    for a in atoms(z):
        for d in operands(a):
            check_nominated(d, sigma)


# -- printing ---------------------------------------------------------------

def print_secenl(z: SeCeNL) -> str:
    if isinstance(z, SNot):
        inner = print_secenl(z.arg)
        return "!" + (inner if isinstance(z.arg, ATOMIC + (Plain, SNot)) else f"({inner})")
    if isinstance(z, (SAnd, SOr)):
        op = " && " if isinstance(z, SAnd) else " || "
        lvl = 2 if isinstance(z, SAnd) else 1

        def wrap(x: SeCeNL, strict: bool) -> str:
            text = print_secenl(x)
            xl = 2 if isinstance(x, SAnd) else 1 if isinstance(x, SOr) else 3
            return f"({text})" if (xl < lvl or (strict and xl == lvl)) else text

        return wrap(z.left, False) + op + wrap(z.right, True)
    if isinstance(z, Plain):
        return f"qddc({print_qddc(z.d)})"
    name = op_name(z)
    ds = [str(d) for d in operands(z)]
    if isinstance(z, (Pref, Anti)):
        return f"{name}({ds[0]})"
    if isinstance(z, Init):
        return f"init({ds[0]} / {ds[1]})"
    if isinstance(z, Implies):
        return f"implies({ds[0]} ~> {ds[1]})"
    return f"{name}({ds[0]} ~> {ds[1]} / {ds[2]})"


# -- parsing ----------------------------------------------------------------

class SecenlParser:
    """Atoms are ``op(D[:{u,..}] ...)``; separators are ``~>`` (or ``,``) and ``/`` (or ``,``)."""

    def __init__(self, lexer: Lexer, sigma: Iterable[str] | None, theta: Iterable[str] = ()):
        self.lx = lexer
        self.sigma = None if sigma is None else frozenset(sigma)
        self.theta = frozenset(theta)
        scope = None if self.sigma is None else self.sigma | self.theta
        self.qp = QddcParser(lexer, scope)

    def parse(self) -> SeCeNL:
        left = self._and()
        while self.lx.accept("||"):
            left = SOr(left, self._and())
        return left

    def _and(self) -> SeCeNL:
        left = self._unary()
        while self.lx.accept("&&"):
            left = SAnd(left, self._unary())
        return left

    def _unary(self) -> SeCeNL:
        if self.lx.accept("!"):
            return SNot(self._unary())
        if self.lx.accept("("):
            inner = self.parse()
            self.lx.expect(")")
            return inner
        tok = self.lx.peek()
        if tok.kind == "id" and tok.text in OPERATORS and self.lx.at("(", 1):
            self.lx.next()
            self.lx.next()
            return self.atom_body(tok.text)
        raise self.lx.error(f"expected a liveness operator, found {tok.text or 'end of input'!r}")

    def nominated(self) -> Nominated:
        body = self.qp.parse()
        if self.lx.accept(":"):
            self.lx.expect("{")
            names: list[str] = []
            if not self.lx.at("}"):
                names.append(self.lx.expect_ident().text)
                while self.lx.accept(","):
                    names.append(self.lx.expect_ident().text)
            self.lx.expect("}")
            noms = frozenset(names)
            unknown = noms - self.theta if self.sigma is not None else frozenset()
            if unknown:
                raise AlphabetMismatchError(f"undeclared nominal(s) {sorted(unknown)}")
        else:
            # D alone abbreviates D:{}; nominals actually used are picked up.
            noms = all_vars(body) & self.theta
        d = Nominated(body, noms)
        check_nominated(d, self.sigma)
        return d

    def _sep(self, *options: str) -> None:
        for opt in options:
            if self.lx.accept(opt):
                return
        raise self.lx.error(f"expected {' or '.join(repr(o) for o in options)}")

    def atom_body(self, name: str) -> SeCeNL:
        """Parse operands after ``name(``, through the closing parenthesis."""
        d1 = self.nominated()
        if name in ("pref", "anti"):
            out: SeCeNL = Pref(d1) if name == "pref" else Anti(d1)
        elif name == "init":
            self._sep("/", ",")
            out = Init(d1, self.nominated())
        else:
            self._sep("~>", ",")
            d2 = self.nominated()
            if name == "implies":
                out = Implies(d1, d2)
            else:
                self._sep("/", ",")
                d3 = self.nominated()
                out = Follows(d1, d2, d3) if name == "follows" else Triggers(d1, d2, d3)
        self.lx.expect(")")
        return out


def parse_secenl(text: str, sigma: Iterable[str] | None = None, theta: Iterable[str] = ()) -> SeCeNL:
    """Parse a SeCeNL formula; ``theta`` declares the nominals and must avoid ``sigma``."""
    theta = frozenset(theta)
    if sigma is not None and theta & frozenset(sigma):
        raise AlphabetMismatchError(f"nominals {sorted(theta & frozenset(sigma))} clash with the system alphabet")
    lx = Lexer(text)
    if lx.at_eof():
        raise lx.error("empty formula")
    z = SecenlParser(lx, sigma, theta).parse()
    if not lx.at_eof():
        raise lx.error(f"unexpected {lx.peek().text!r}")
    return z
