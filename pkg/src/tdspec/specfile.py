"""Spec files: an interface block, named timing diagrams, named QDDC
formulas, liveness macros over timing diagrams and a ``main`` block of
assumptions and requirements.

Elaboration resolves every name and constant, so the ``SpecFile`` returned
by ``parse_spec_file`` holds plain SeCeNL values.  The requirement of a
spec is ``/\\ assumes => /\\ reqs``; auxiliary variables are universally
quantified when it is compiled.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

from .errors import SpecError, UndeclaredVariableError
from .lexer import Lexer
from .prop import PropFormula, PropParser, PVar, prop_vars
from .qddc import (
    TRUE,
    And,
    Forall,
    Formula,
    Not,
    Or,
    QddcParser,
    children,
    free_vars,
    resolve_constants,
    substitute,
)
from .secenl import (
    OPERATORS,
    Anti,
    Follows,
    Implies,
    Init,
    Nominated,
    Plain,
    Pref,
    SAnd,
    SeCeNL,
    SecenlParser,
    SNot,
    SOr,
    Triggers,
    atoms,
    check_nominated,
    operands,
    s_and_all,
)
from .timing_diagram import TimingDiagram, parse_td_lines, xi
from .translate import aleph, exists1

PREVIOUS = "Y"  # softreq prefix for previous-cycle values


@dataclass(frozen=True)
class Block:
    """A ``dc`` formula block; the body may use its parameters and symbolic constants."""

    name: str
    params: tuple[str, ...]
    body: Formula


@dataclass(frozen=True)
class Macro:
    """``#op name(params) { td ... }``: a liveness operator applied to ξ of each diagram."""

    op: str
    name: str
    params: tuple[str, ...]
    diagrams: tuple[TimingDiagram, ...]


@dataclass
class SpecFile:
    name: str = ""
    inputs: tuple[str, ...] = ()
    outputs: tuple[str, ...] = ()
    auxvars: tuple[str, ...] = ()
    constants: dict[str, int] = field(default_factory=dict)
    softreqs: tuple[PropFormula, ...] = ()
    diagrams: dict[str, TimingDiagram] = field(default_factory=dict)
    blocks: dict[str, Block] = field(default_factory=dict)
    macros: dict[str, Macro] = field(default_factory=dict)
    assumes: tuple[SeCeNL, ...] = ()
    reqs: tuple[SeCeNL, ...] = ()

    @property
    def sigma(self) -> tuple[str, ...]:
        return self.inputs + self.outputs + self.auxvars

    @property
    def interface(self) -> tuple[str, ...]:
        """The variables a requirement automaton is built over (auxiliaries quantified away)."""
        return self.inputs + self.outputs

    def requirement(self) -> SeCeNL:
        commit = s_and_all(self.reqs) or Plain(TRUE)
        assume = s_and_all(self.assumes)
        return commit if assume is None else SOr(SNot(assume), commit)

    def previous(self) -> tuple[str, ...]:
        """Variables whose previous-cycle value the soft requirements read."""
        used: set[str] = set()
        for phi in self.softreqs:
            used |= {v[len(PREVIOUS):] for v in prop_vars(phi) if v not in self.interface}
        return tuple(v for v in self.interface if v in used)


def requirement_formula(spec: SpecFile, variant: str = "exact") -> Formula:
    """QDDC formula over ``spec.interface`` whose word models satisfy the requirement."""
    out = aleph(spec.requirement(), variant)
    for v in sorted(spec.auxvars, reverse=True):
        out = Forall(v, out)
    return out


# -- elaboration helpers ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class _Live(Formula):
    """Placeholder carrying a SeCeNL atom through the QDDC parser of ``main``."""

    z: SeCeNL


def _lift(d: Formula) -> SeCeNL:
    if not any(isinstance(n, _Live) for _, n in _walk_live(d)):
        return Plain(d)
    if isinstance(d, _Live):
        return d.z
    if isinstance(d, Not):
        return SNot(_lift(d.arg))
    if isinstance(d, And):
        return SAnd(_lift(d.left), _lift(d.right))
    if isinstance(d, Or):
        return SOr(_lift(d.left), _lift(d.right))
    raise SpecError("liveness operators may only be combined with !, &&, || and =>")


def _walk_live(d: Formula):
    yield (), d
    if isinstance(d, _Live):
        return
    for i, c in enumerate(children(d)):
        for p, n in _walk_live(c):
            yield (i,) + p, n


def _resolve_nominated(d: Nominated, constants: Mapping[str, int]) -> Nominated:
    return Nominated(resolve_constants(d.body, constants), d.noms)


def _resolve_secenl(z: SeCeNL, constants: Mapping[str, int]) -> SeCeNL:
    if isinstance(z, SNot):
        return SNot(_resolve_secenl(z.arg, constants))
    if isinstance(z, (SAnd, SOr)):
        return type(z)(_resolve_secenl(z.left, constants), _resolve_secenl(z.right, constants))
    if isinstance(z, Plain):
        return Plain(resolve_constants(z.d, constants))
    return type(z)(*(_resolve_nominated(d, constants) for d in operands(z)))


_OP_CTOR = {"pref": Pref, "anti": Anti, "init": Init, "implies": Implies, "follows": Follows, "triggers": Triggers}
_ARITY = {"pref": 1, "anti": 1, "init": 2, "implies": 2, "follows": 3, "triggers": 3}
_HEADER = re.compile(r'^[ \t]*#lhrs[ \t]+"([^"\n]*)"[^\n]*', re.MULTILINE)


class _SpecParser:
    def __init__(self, text: str, overrides: Mapping[str, int] | None):
        self.name = ""
        m = _HEADER.search(text)
        if m:
            self.name = m.group(1)
            text = text[: m.start()] + " " * (m.end() - m.start()) + text[m.end():]
        self.lx = Lexer(text)
        self.spec = SpecFile(name=self.name)
        self.overrides = dict(overrides or {})
        self.in_operand = False

    # names
    def _declare_var(self, tok, seen: set[str]) -> None:
        if tok.text in seen:
            raise self.lx.error(f"duplicate declaration of {tok.text!r}", tok.start)
        seen.add(tok.text)

    def _declare_block(self, tok) -> None:
        s = self.spec
        if tok.text in s.diagrams or tok.text in s.blocks or tok.text in s.macros:
            raise self.lx.error(f"duplicate block name {tok.text!r}", tok.start)
        if tok.text in s.sigma or tok.text in OPERATORS:
            raise self.lx.error(f"block name {tok.text!r} clashes with a variable or operator", tok.start)

    def _params(self) -> tuple[str, ...]:
        lx = self.lx
        out: list[str] = []
        lx.expect("(")
        if not lx.at(")"):
            while True:
                tok = lx.expect_ident()
                if tok.text in out:
                    raise lx.error(f"duplicate parameter {tok.text!r}", tok.start)
                out.append(tok.text)
                if not lx.accept(","):
                    break
        lx.expect(")")
        return tuple(out)

    # top level
    def parse(self) -> SpecFile:
        lx = self.lx
        if lx.at("interface"):
            self._interface()
        else:
            raise lx.error("a spec file starts with an interface block")
        while not lx.at_eof():
            if lx.at("td"):
                td = self._td(set(self.spec.sigma))
                self.spec.diagrams[td.name] = td
            elif lx.at("dc"):
                self._dc()
            elif lx.at("#"):
                self._macro()
            elif lx.at("main"):
                self._main()
                if not lx.at_eof():
                    raise lx.error("nothing may follow the main block")
            else:
                raise lx.error(f"expected td, dc, #macro or main, found {lx.peek().text!r}")
        return self.spec

    def _interface(self) -> None:
        lx, s = self.lx, self.spec
        lx.expect("interface")
        lx.expect("{")
        seen: set[str] = set()
        inputs: list[str] = []
        outputs: list[str] = []
        aux: list[str] = []
        while not lx.accept("}"):
            tok = lx.expect_ident()
            kind = tok.text
            if kind in ("input", "output", "auxvar"):
                dest = {"input": inputs, "output": outputs, "auxvar": aux}[kind]
                while True:
                    var = lx.expect_ident()
                    self._declare_var(var, seen)
                    dest.append(var.text)
                    if lx.accept("monitor"):  # annotation kept by some tool chains; ignored
                        lx.expect_ident()
                    if not lx.accept(","):
                        break
            elif kind == "constant":
                while True:
                    name = lx.expect_ident()
                    lx.expect("=")
                    num = lx.peek()
                    if num.kind == "sym" and num.text == "-":
                        raise lx.error("negative constant; constants must be natural numbers")
                    if num.kind != "num":
                        raise lx.error(f"constant {name.text!r} needs a natural-number value")
                    lx.next()
                    if name.text in s.constants:
                        raise lx.error(f"duplicate constant {name.text!r}", name.start)
                    s.constants[name.text] = int(num.text)
                    if not lx.accept(","):
                        break
            elif kind == "softreq":
                s.softreqs += (self._soft(inputs, outputs),)
            else:
                raise lx.error(f"unknown interface item {kind!r}", tok.start)
            lx.expect(";")
        clash = set(s.constants) & seen
        if clash:
            raise SpecError(f"constant(s) {sorted(clash)} clash with variable names")
        for k, v in self.overrides.items():
            if k not in s.constants:
                raise SpecError(f"override for undeclared constant {k!r}")
            if v < 0:
                raise SpecError(f"constant {k!r} must be a natural number")
            s.constants[k] = int(v)
        s.inputs, s.outputs, s.auxvars = tuple(inputs), tuple(outputs), tuple(aux)

    def _soft(self, inputs: list[str], outputs: list[str]) -> PropFormula:
        known = inputs + outputs
        scope = set(known) | {PREVIOUS + v for v in known}
        return PropParser(self.lx, scope).parse()

    def _td(self, scope: set[str]) -> TimingDiagram:
        lx = self.lx
        lx.expect("td")
        name = lx.expect_ident()
        self._declare_block(name)
        params = self._params()
        lx.expect("{")
        waves, cons = parse_td_lines(lx, scope | set(params))
        lx.expect("}")
        if not waves:
            raise lx.error(f"timing diagram {name.text!r} has no waveform", name.start)
        td = TimingDiagram(tuple(waves), tuple(cons), name.text, params)
        td.validate()
        clash = td.theta & set(self.spec.sigma)
        if clash:
            raise SpecError(f"nominal(s) {sorted(clash)} of {name.text!r} clash with declared variables")
        return td

    def _dc(self) -> None:
        lx = self.lx
        lx.expect("dc")
        name = lx.expect_ident()
        self._declare_block(name)
        params = self._params()
        lx.expect("{")
        qp = QddcParser(lx, set(self.spec.sigma) | set(params), self._hook, allow_symbolic=True)
        body = qp.parse()
        lx.accept(";")
        lx.expect("}")
        if any(isinstance(n, _Live) for _, n in _walk_live(body)):
            raise SpecError(f"dc block {name.text!r} may not use liveness operators or macros")
        self.spec.blocks[name.text] = Block(name.text, params, body)

    def _macro(self) -> None:
        lx = self.lx
        lx.expect("#")
        op = lx.expect_ident()
        if op.text not in _OP_CTOR:
            raise lx.error(f"unknown macro kind #{op.text}", op.start)
        name = lx.expect_ident()
        self._declare_block(name)
        params = self._params()
        lx.expect("{")
        tds: list[TimingDiagram] = []
        scope = set(self.spec.sigma) | set(params)
        while not lx.accept("}"):
            td = self._td(scope)
            stray = set(td.params) - set(params)
            if stray:
                raise SpecError(f"diagram {td.name!r} uses parameter(s) {sorted(stray)} not declared by {name.text!r}")
            tds.append(td)
        if len(tds) != _ARITY[op.text]:
            raise SpecError(f"#{op.text} macro {name.text!r} needs {_ARITY[op.text]} diagram(s), found {len(tds)}")
        self.spec.macros[name.text] = Macro(op.text, name.text, params, tuple(tds))

    def _main(self) -> None:
        lx = self.lx
        lx.expect("main")
        lx.expect("(")
        lx.expect(")")
        lx.expect("{")
        assumes: list[SeCeNL] = []
        reqs: list[SeCeNL] = []
        while not lx.accept("}"):
            kind = lx.expect_ident()
            if kind.text not in ("assume", "req"):
                raise lx.error(f"expected assume or req, found {kind.text!r}", kind.start)
            qp = QddcParser(lx, set(self.spec.sigma), self._hook, allow_symbolic=True)
            z = _lift(qp.parse())
            lx.expect(";")
            z = _resolve_secenl(z, self.spec.constants)
            self._check(z)
            (assumes if kind.text == "assume" else reqs).append(z)
        self.spec.assumes, self.spec.reqs = tuple(assumes), tuple(reqs)

    def _check(self, z: SeCeNL) -> None:
        sigma = set(self.spec.sigma)
        for a in atoms(z):
            if isinstance(a, Plain):
                stray = free_vars(a.d) - sigma
                if stray:
                    raise UndeclaredVariableError(sorted(stray)[0])
                continue
            for d in operands(a):
                check_nominated(d, sigma)
                stray = free_vars(d.body) - sigma - d.noms
                if stray:
                    raise UndeclaredVariableError(sorted(stray)[0])

    # calls: liveness operators, macros, dc blocks and diagrams
    def _args(self) -> list[object]:
        lx = self.lx
        out: list[object] = []
        lx.expect("(")
        if lx.accept(")"):
            return out
        while True:
            tok = lx.peek()
            if tok.kind == "num":
                lx.next()
                out.append(int(tok.text))
            else:
                phi = PropParser(lx, set(self.spec.sigma) | set(self.spec.constants)).parse()
                if isinstance(phi, PVar) and phi.name in self.spec.constants:
                    out.append(self.spec.constants[phi.name])
                else:
                    stray = prop_vars(phi) & set(self.spec.constants)
                    if stray:
                        raise lx.error(f"constant {sorted(stray)[0]!r} used as a signal")
                    out.append(phi)
            if not lx.accept(","):
                break
        lx.expect(")")
        return out

    def _bind(self, name: str, params: tuple[str, ...], args: list[object], start: int):
        if len(args) != len(params):
            raise self.lx.error(f"{name} expects {len(params)} argument(s), got {len(args)}", start)
        props: dict[str, PropFormula] = {}
        consts = dict(self.spec.constants)
        for p, a in zip(params, args):
            if isinstance(a, int):
                consts[p] = a
                props[p] = PVar(p)  # a constant used as a signal is caught as an undeclared variable
            else:
                props[p] = a
        return props, consts

    def _instance(self, td: TimingDiagram, props, consts) -> Nominated:
        mapping = {p: props[p] for p in td.params if p in props}
        inst = td.substitute(mapping, consts)
        return xi(inst)

    def _hook(self, qp: QddcParser, word: str, start: int) -> Formula:
        lx, s = self.lx, self.spec
        if word in OPERATORS:
            if self.in_operand:
                raise lx.error(f"liveness operator {word!r} cannot be nested", start)
            lx.expect("(")
            sp = SecenlParser(lx, None)
            sp.qp.call_hook = self._hook
            sp.qp.allow_symbolic = True
            sp.qp.sigma = None
            self.in_operand = True
            try:
                z = sp.atom_body(word)
            finally:
                self.in_operand = False
            return _Live(z)
        if word in s.macros:
            if self.in_operand:
                raise lx.error(f"macro {word!r} cannot be used inside an operand", start)
            m = s.macros[word]
            props, consts = self._bind(word, m.params, self._args(), start)
            ds = [self._instance(td, props, consts) for td in m.diagrams]
            return _Live(_OP_CTOR[m.op](*ds))
        if word in s.blocks:
            b = s.blocks[word]
            props, consts = self._bind(word, b.params, self._args(), start)
            body = substitute(b.body, {p: v for p, v in props.items() if v != PVar(p)})
            return resolve_constants(body, consts)
        if word in s.diagrams:
            td = s.diagrams[word]
            props, consts = self._bind(word, td.params, self._args(), start)
            d = self._instance(td, props, consts)
            return exists1(d.noms, d.body)
        raise lx.error(f"undeclared name {word!r}", start)


def parse_spec_file(text: str, constants: Mapping[str, int] | None = None) -> SpecFile:
    """Parse and elaborate a spec file; ``constants`` overrides interface constants."""
    return _SpecParser(text, constants).parse()


def describe(spec: SpecFile) -> str:
    lines = [f"spec {spec.name or '(unnamed)'}",
             f"inputs: {', '.join(spec.inputs)}",
             f"outputs: {', '.join(spec.outputs)}"]
    if spec.auxvars:
        lines.append(f"auxvars: {', '.join(spec.auxvars)}")
    if spec.constants:
        lines.append("constants: " + ", ".join(f"{k}={v}" for k, v in spec.constants.items()))
    lines += [f"assume {z}" for z in spec.assumes]
    lines += [f"req {z}" for z in spec.reqs]
    return "\n".join(lines)
