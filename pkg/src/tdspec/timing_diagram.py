"""Timing diagrams: waveform parsing, the direct waveform semantics, the ξ
translation to nominated SeCe formulas and WaveDrom export."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import ParseError, SpecError
from .lexer import Lexer
from .prop import PNot, PropFormula, PropParser, PVar, print_prop, substitute_prop
from .qddc import (
    PT,
    TRUE,
    All,
    AllButLast,
    Const,
    Formula,
    Or,
    SlenCmp,
    Unit,
    and_all,
    chop_all,
)
from .secenl import Nominated

SYMBOLS = ("0", "1", "2", "x")


@dataclass(frozen=True)
class Cell:
    symbol: str  # one of SYMBOLS
    stutter: bool = False
    markers: tuple[str, ...] = ()

    def text(self) -> str:
        pre = "".join(f"<{m}>" for m in self.markers)
        return pre + self.symbol + ("|" if self.stutter else "")


@dataclass(frozen=True)
class Waveform:
    cells: tuple[Cell, ...]

    @property
    def markers(self) -> list[str]:
        return [m for c in self.cells for m in c.markers]

    def __str__(self) -> str:
        return "".join(c.text() for c in self.cells)


_MARK_ANGLE = re.compile(r"<([A-Za-z_][A-Za-z0-9_]*)>")
_MARK_COLON = re.compile(r"([A-Za-wyz_]):")


def parse_waveform(text: str, line: int = 0, column: int = 0) -> Waveform:
    """Cells in textual order; ``u:``/``<u>`` mark the next symbol, ``|`` stutters the previous one."""
    s = "".join(text.split())
    cells: list[Cell] = []
    pending: list[str] = []
    seen: set[str] = set()
    pos = 0

    def fail(msg: str) -> ParseError:
        return ParseError(msg, line, column + pos) if line else ParseError(msg)

    while pos < len(s):
        ch = s[pos]
        m = _MARK_ANGLE.match(s, pos) or _MARK_COLON.match(s, pos)
        if m:
            name = m.group(1)
            if name in seen:
                raise fail(f"duplicate nominal {name!r} in waveform")
            seen.add(name)
            pending.append(name)
            pos = m.end()
            continue
        if ch in SYMBOLS:
            stutter = pos + 1 < len(s) and s[pos + 1] == "|"
            cells.append(Cell(ch, stutter, tuple(pending)))
            pending = []
            pos += 2 if stutter else 1
            continue
        if ch == "|":
            raise fail("stutter '|' must follow a symbol")
        raise fail(f"unknown waveform symbol {ch!r}")
    if pending:
        raise fail(f"dangling nominal marker {pending[-1]!r} with no symbol")
    if not cells:
        raise fail("empty waveform")
    return Waveform(tuple(cells))


@dataclass(frozen=True)
class Bound:
    """Interval ⟨lo, hi⟩ over ℕ; ``None`` ends are unbounded."""

    lo: Const | None = None
    lo_open: bool = False
    hi: Const | None = None
    hi_open: bool = False

    def contains(self, d: int) -> bool:
        if d < 0:
            return False
        if self.lo is not None and (d <= self.lo if self.lo_open else d < self.lo):
            return False
        if self.hi is not None and (d >= self.hi if self.hi_open else d > self.hi):
            return False
        return True

    def text(self) -> str:
        if self.lo is not None and self.lo == self.hi and not self.lo_open and not self.hi_open:
            return str(self.lo)
        left = "(" if self.lo_open or self.lo is None else "["
        right = ")" if self.hi_open or self.hi is None else "]"
        lo = "" if self.lo is None else str(self.lo)
        hi = "" if self.hi is None else str(self.hi)
        return f"{left}{lo},{hi}{right}"

    def resolve(self, constants: Mapping[str, int]) -> "Bound":
        def r(v):
            if isinstance(v, str):
                if v not in constants:
                    raise SpecError(f"unresolved constant {v!r}")
                return constants[v]
            return v

        out = Bound(r(self.lo), self.lo_open, r(self.hi), self.hi_open)
        out.validate()
        return out

    def validate(self) -> None:
        if isinstance(self.lo, int) and isinstance(self.hi, int):
            if self.lo > self.hi or (self.lo == self.hi and (self.lo_open or self.hi_open)):
                raise SpecError(f"empty constraint interval {self.text()}")


@dataclass(frozen=True)
class Constraint:
    a: str
    b: str
    bound: Bound

    def text(self) -> str:
        return f"@sync:({self.a}, {self.b}, {self.bound.text()});"


@dataclass(frozen=True)
class TimingDiagram:
    """Waveforms keyed by a signal formula (``None`` for ``@null`` anchor rows) plus constraints."""

    waves: tuple[tuple[PropFormula | None, Waveform], ...]
    constraints: tuple[Constraint, ...] = ()
    name: str = ""
    params: tuple[str, ...] = field(default=(), compare=False)

    @property
    def theta(self) -> frozenset[str]:
        return frozenset(m for _, w in self.waves for m in w.markers)

    def size(self) -> int:
        return sum(len(w.cells) for _, w in self.waves) + len(self.constraints)

    def signals(self) -> frozenset[str]:
        from .prop import prop_vars

        out: frozenset[str] = frozenset()
        for p, _ in self.waves:
            if p is not None:
                out |= prop_vars(p)
        return out

    def substitute(self, mapping: Mapping[str, PropFormula], constants: Mapping[str, int]) -> "TimingDiagram":
        waves = tuple((None if p is None else substitute_prop(p, mapping), w) for p, w in self.waves)
        cons = tuple(Constraint(c.a, c.b, c.bound.resolve(constants)) for c in self.constraints)
        return TimingDiagram(waves, cons, self.name)

    def validate(self) -> None:
        theta = self.theta
        for c in self.constraints:
            for u in (c.a, c.b):
                if u not in theta:
                    raise SpecError(f"constraint references unknown nominal {u!r}")
            c.bound.validate()

    def text(self) -> str:
        lines = []
        for p, w in self.waves:
            head = "@null" if p is None else (print_prop(p) if isinstance(p, PVar) else f"({print_prop(p)})")
            lines.append(f"{head}: {w};")
        lines.extend(c.text() for c in self.constraints)
        return "\n".join(lines)


# -- td block parsing -------------------------------------------------------

def parse_bound(lx: Lexer) -> Bound:
    """``n`` (meaning [n,n]) or one of the bracketed forms with optional ends."""
    def value():
        tok = lx.peek()
        if tok.kind == "num":
            lx.next()
            return int(tok.text)
        if tok.kind == "id":
            lx.next()
            return tok.text
        if tok.kind == "sym" and tok.text == "-":
            raise lx.error("negative bound")
        return None

    if not (lx.at("[") or lx.at("(")):
        v = value()
        if v is None:
            raise lx.error("expected interval bound")
        return Bound(v, False, v, False)
    lo_open = lx.next().text == "("
    lo = value()
    lx.expect(",")
    hi = value()
    tok = lx.peek()
    if not (tok.kind == "sym" and tok.text in ("]", ")")):
        raise lx.error("expected ']' or ')'")
    lx.next()
    hi_open = tok.text == ")"
    if lo is None and not lo_open and hi is not None:
        pass  # "[,r)" reads as an unbounded lower end
    return Bound(lo, lo_open and lo is not None, hi, hi_open and hi is not None)


def parse_td_lines(lx: Lexer, sigma: Iterable[str] | None = None, stop: str = "}") -> tuple[list, list]:
    waves: list[tuple[PropFormula | None, Waveform]] = []
    cons: list[Constraint] = []
    while not lx.at(stop) and not lx.at_eof():
        if lx.accept("@"):
            kind = lx.expect_ident()
            if kind.text == "sync":
                lx.expect(":")
                lx.expect("(")
                a = lx.expect_ident().text
                lx.expect(",")
                b = lx.expect_ident().text
                lx.expect(",")
                bound = parse_bound(lx)
                lx.expect(")")
                lx.expect(";")
                cons.append(Constraint(a, b, bound))
                continue
            if kind.text == "null":
                lx.expect(":")
                raw, start = lx.raw_until(";")
                lx.expect(";")
                waves.append((None, parse_waveform(raw, *lx.position(start))))
                continue
            raise lx.error(f"unknown directive @{kind.text}", kind.start)
        if lx.at("("):
            lx.next()
            sig = PropParser(lx, sigma).parse()
            lx.expect(")")
        else:
            sig = PropParser(lx, sigma)._unary()
        lx.expect(":")
        raw, start = lx.raw_until(";")
        lx.expect(";")
        waves.append((sig, parse_waveform(raw, *lx.position(start))))
    return waves, cons


def parse_timing_diagram(block: str, sigma: Iterable[str] | None = None) -> TimingDiagram:
    """Parse ``td name(params) { ... }`` or just the lines inside the braces."""
    lx = Lexer(block)
    name, params = "", ()
    if lx.at("td"):
        lx.next()
        name = lx.expect_ident().text
        params = []
        if lx.accept("("):
            if not lx.at(")"):
                params.append(lx.expect_ident().text)
                while lx.accept(","):
                    params.append(lx.expect_ident().text)
            lx.expect(")")
        lx.expect("{")
        scope = None if sigma is None else set(sigma) | set(params)
        waves, cons = parse_td_lines(lx, scope)
        lx.expect("}")
    else:
        waves, cons = parse_td_lines(lx, sigma, stop="")
    if not lx.at_eof():
        raise lx.error(f"unexpected {lx.peek().text!r}")
    if not waves:
        raise lx.error("timing diagram has no waveform")
    td = TimingDiagram(tuple(waves), tuple(cons), name, tuple(params))
    td.validate()
    return td


# -- semantics --------------------------------------------------------------

def _cell_ok(cell: Cell, bits: Sequence[bool] | None, i: int, j: int) -> bool:
    """Does ``cell`` (markers aside) hold on [i, j] of the signal ``bits``?"""
    if not cell.stutter:
        if j != i + 1:
            return False
        if cell.symbol in ("2", "x"):
            return True
        if bits is None:
            raise SpecError("@null waveforms may only use 2 and x symbols")
        return bits[i] == (cell.symbol == "1")
    if cell.symbol == "2":
        return True
    if bits is None:
        raise SpecError("@null waveforms may only use 2 and x symbols")
    seg = bits[i:j]
    if cell.symbol == "1":
        return all(seg)
    if cell.symbol == "0":
        return not any(seg)
    return all(seg) or not any(seg)


def sat_waveform(bits: Sequence[bool] | None, b: int, e: int, nu: Mapping[str, int], w: Waveform,
                 strict: bool = False) -> bool:
    """Direct waveform satisfaction on [b, e].

    Concatenation shares the split point (``b <= i <= e``); ``strict`` demands
    every cell after the first to be non-degenerate, the ``i < e`` reading of a
    left-nested chain.
    """
    reach = {b}
    for k, cell in enumerate(w.cells):
        nxt: set[int] = set()
        for i in reach:
            if any(nu.get(m) != i for m in cell.markers):
                continue
            lo = i + 1 if (strict and k > 0) else i
            for j in range(lo, e + 1):
                if _cell_ok(cell, bits, i, j):
                    nxt.add(j)
        reach = nxt
        if not reach:
            return False
    return e in reach


def sat_constraints(nu: Mapping[str, int], constraints: Iterable[Constraint]) -> bool:
    for c in constraints:
        if c.a not in nu or c.b not in nu:
            raise SpecError(f"valuation misses nominal of constraint {c.text()}")
        if not c.bound.contains(nu[c.b] - nu[c.a]):
            return False
    return True


# -- ξ ----------------------------------------------------------------------

def xi_cell(cell: Cell, p: PropFormula | None) -> Formula:
    sym, st = cell.symbol, cell.stutter
    if not st:
        if sym in ("2", "x"):
            return SlenCmp("=", 1)
        if p is None:
            raise SpecError("@null waveforms may only use 2 and x symbols")
        return Unit(p if sym == "1" else PNot(p))
    if sym == "2":
        return TRUE
    if p is None:
        raise SpecError("@null waveforms may only use 2 and x symbols")
    hi, lo = AllButLast(p), AllButLast(PNot(p))
    if sym == "1":
        return Or(PT, hi)
    if sym == "0":
        return Or(PT, lo)
    return Or(Or(PT, hi), lo)


def anchor(u: str) -> Formula:
    """A nominal pinned to a point: ``[[u]]`` holds only on [ν(u), ν(u)]."""
    return All(PVar(u))


def xi_waveform(w: Waveform, p: PropFormula | None) -> Formula:
    parts: list[Formula] = []
    for cell in w.cells:
        parts.extend(anchor(m) for m in cell.markers)
        parts.append(xi_cell(cell, p))
    return chop_all(parts)


def bound_formula(bound: Bound) -> Formula:
    lo, hi = bound.lo, bound.hi
    if lo is not None and lo == hi and not bound.lo_open and not bound.hi_open:
        return SlenCmp("=", lo)
    parts = []
    if lo is not None:
        parts.append(SlenCmp(">" if bound.lo_open else ">=", lo))
    if hi is not None:
        parts.append(SlenCmp("<" if bound.hi_open else "<=", hi))
    return and_all(parts)


def xi_constraint(c: Constraint) -> Formula:
    return chop_all([TRUE, anchor(c.a), bound_formula(c.bound), anchor(c.b), TRUE])


def xi_constraints(constraints: Iterable[Constraint]) -> Formula | None:
    parts = [xi_constraint(c) for c in constraints]
    return and_all(parts) if parts else None


def xi(td: TimingDiagram) -> Nominated:
    parts = [xi_waveform(w, p) for p, w in td.waves]
    cons = xi_constraints(td.constraints)
    if cons is not None:
        parts.append(cons)
    return Nominated(and_all(parts), td.theta)


# -- WaveDrom ---------------------------------------------------------------

_NODE_IDS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def export_wavedrom(td: TimingDiagram) -> str:
    """WaveDrom JSON.

    WaveDrom node ids are single characters and cannot be shared between
    signals, so every marker occurrence gets a fresh id; repeated nominals are
    renamed ``<name>_<k>`` in the ``nominals`` legend.
    """
    counts: dict[str, int] = {}
    first_id: dict[str, str] = {}
    legend: dict[str, str] = {}
    signals = []
    next_id = 0
    for p, w in td.waves:
        wave, node = [], []
        for cell in w.cells:
            wave.append(cell.symbol)
            mark = "."
            for m in cell.markers:
                k = counts.get(m, 0)
                counts[m] = k + 1
                ident = _NODE_IDS[next_id % len(_NODE_IDS)]
                next_id += 1
                legend[ident] = m if k == 0 else f"{m}_{k}"
                first_id.setdefault(m, ident)
                mark = ident
            node.append(mark)
            if cell.stutter:
                wave.append(".")
                node.append(".")
        signals.append({"name": "null" if p is None else print_prop(p), "wave": "".join(wave),
                        "node": "".join(node)})
    doc: dict = {"signal": signals}
    if td.constraints:
        doc["edge"] = [f"{first_id[c.a]}<->{first_id[c.b]} {c.b}-{c.a} in {c.bound.text()}" for c in td.constraints]
    if legend:
        doc["nominals"] = legend
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
