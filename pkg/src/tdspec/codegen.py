"""Emission backends: JSON tables, an SMV-style observer module, DOT graphs.

Every emitter is a pure function of its input and produces byte-identical
text across runs.
"""

from __future__ import annotations

import re
from typing import Sequence

import numpy as np

from . import automata as fa
from .errors import NotTotalError, ParseError, SpecError
from .prop import PAnd, PConst, PIff, PImplies, PNot, POr, PropFormula, PVar, eval_prop, parse_prop, print_prop
from .synth import Controller, _assignment

MONITOR_FORMATS = ("json", "smv-observer", "dot")
CONTROLLER_FORMATS = ("json", "dot")


def print_smv(phi: PropFormula) -> str:
    if isinstance(phi, PConst):
        return "TRUE" if phi.value else "FALSE"
    if isinstance(phi, PVar):
        return phi.name
    if isinstance(phi, PNot):
        return f"!{print_smv(phi.arg)}" if isinstance(phi.arg, (PVar, PConst)) else f"!({print_smv(phi.arg)})"
    ops = {PAnd: "&", POr: "|", PImplies: "->", PIff: "<->"}
    for cls, sym in ops.items():
        if isinstance(phi, cls):
            return f"({print_smv(phi.left)} {sym} {print_smv(phi.right)})"
    raise TypeError(f"not a propositional formula: {phi!r}")


def _smv_to_prop(text: str) -> str:
    text = text.replace("<->", "<=>").replace("->", "=>").replace("&", "&&").replace("|", "||")
    return text.replace("TRUE", "true").replace("FALSE", "false")


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


# -- monitors -----------------------------------------------------------------

def emit_monitor(dfa: fa.Dfa, target: str = "json", name: str = "observer") -> str:
    fa.check_total(dfa)
    if target == "json":
        return fa.to_json(dfa)
    if target == "dot":
        return _monitor_dot(dfa, name)
    if target == "smv-observer":
        return _monitor_smv(dfa, name)
    raise SpecError(f"unknown monitor format {target!r}; expected one of {', '.join(MONITOR_FORMATS)}")


def _monitor_dot(dfa: fa.Dfa, name: str) -> str:
    lines = [f'digraph "{_dot_escape(name)}" {{', "  rankdir=LR;", '  init [shape=point, label=""];']
    for s in range(dfa.states):
        shape = "doublecircle" if dfa.accepting[s] else "circle"
        lines.append(f'  s{s} [shape={shape}, label="{s}"];')
    lines.append("  init -> s0;")
    for s, g, t in fa.edges(dfa):
        lines.append(f'  s{s} -> s{t} [label="{_dot_escape(print_prop(g))}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _monitor_smv(dfa: fa.Dfa, name: str) -> str:
    # state is the automaton state before the current letter; target the one
    # after it, so ok reports the verdict on the prefix read so far
    params = ", ".join(dfa.alphabet)
    head = f"MODULE {name}({params})" if params else f"MODULE {name}"
    states = ", ".join(f"s{s}" for s in range(dfa.states))
    lines = [head, "VAR", f"  state : {{{states}}};", "DEFINE", "  target :=", "    case"]
    for s, g, t in fa.edges(dfa):
        lines.append(f"      state = s{s} & {print_smv(g)} : s{t};")
    lines.append("    esac;")
    acc = [f"s{s}" for s in np.flatnonzero(dfa.accepting)]
    lines.append(f"  ok := target in {{{', '.join(acc)}}};" if acc else "  ok := FALSE;")
    lines += ["ASSIGN", "  init(state) := s0;", "  next(state) := target;"]
    return "\n".join(lines) + "\n"


class SmvObserver:
    """Interpreter for the observer text produced by ``emit_monitor``."""

    _CASE = re.compile(r"^state = s(\d+) & (.+) : s(\d+);$")

    def __init__(self, text: str):
        lines = [ln.strip() for ln in text.splitlines()]
        m = re.match(r"^MODULE \w+(?:\((.*)\))?$", lines[0]) if lines else None
        if not m:
            raise ParseError("observer text must start with a MODULE line", 1)
        self.inputs = tuple(v.strip() for v in (m.group(1) or "").split(",") if v.strip())
        self.cases: list[tuple[int, PropFormula, int]] = []
        self.accepting: set[int] = set()
        for no, ln in enumerate(lines, 1):
            c = self._CASE.match(ln)
            if c:
                guard = parse_prop(_smv_to_prop(c.group(2)), self.inputs)
                self.cases.append((int(c.group(1)), guard, int(c.group(3))))
            elif ln.startswith("ok :="):
                self.accepting = {int(x) for x in re.findall(r"s(\d+)", ln)}
        if not self.cases:
            raise ParseError("observer text has no transition cases")

    def step(self, state: int, letter: dict[str, bool]) -> int:
        for s, g, t in self.cases:
            if s == state and eval_prop(g, letter):
                return t
        raise NotTotalError(f"no case for state s{state} on {letter}")

    def run(self, word) -> list[bool]:
        """The ok value at every step of ``word``."""
        cols = {v: word.column(v) for v in self.inputs}
        state, out = 0, []
        for t in range(len(word)):
            state = self.step(state, {v: bool(cols[v][t]) for v in self.inputs})
            out.append(state in self.accepting)
        return out


# -- controllers ----------------------------------------------------------------

def emit_controller(ctrl: Controller, target: str = "json") -> str:
    if target == "json":
        return ctrl.to_json()
    if target == "dot":
        return _controller_dot(ctrl)
    if target == "smv-observer":
        raise SpecError("smv-observer is a monitor format; controllers emit json or dot")
    raise SpecError(f"unknown controller format {target!r}; expected one of {', '.join(CONTROLLER_FORMATS)}")


def _outputs_text(outputs: Sequence[str], code: int) -> str:
    vals = _assignment(outputs, code)
    return ", ".join(v if vals[v] else f"!{v}" for v in outputs) or "-"


def _controller_dot(ctrl: Controller) -> str:
    name = ctrl.name or "controller"
    lines = [f'digraph "{_dot_escape(name)}" {{', "  rankdir=LR;", '  init [shape=point, label=""];']
    for s in range(ctrl.states):
        lines.append(f'  s{s} [shape=circle, label="{s}"];')
    lines.append("  init -> s0;")
    for s in range(ctrl.states):
        arms: dict[tuple[int, int], np.ndarray] = {}
        for c in range(ctrl.nxt.shape[1]):
            key = (int(ctrl.nxt[s, c]), int(ctrl.out[s, c]))
            arms.setdefault(key, np.zeros(ctrl.nxt.shape[1], dtype=bool))[c] = True
        for (t, o), mask in sorted(arms.items()):
            guard = print_prop(fa.guard_formula(mask, ctrl.inputs))
            label = f"{guard} / {_outputs_text(ctrl.outputs, o)}"
            lines.append(f'  s{s} -> s{t} [label="{_dot_escape(label)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
