"""Command-line front end.

Exit codes: 0 success (sat, valid, holds, realizable), 1 negative verdict
with its artifact on stdout, 2 usage or input error, 3 resource cap hit.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import re
import sys
from typing import Sequence

from . import automata as fa
from .analysis import check_equiv, check_sat, check_valid, load_model, model_check, run_trace
from .codegen import CONTROLLER_FORMATS, MONITOR_FORMATS, emit_controller, emit_monitor
from .compile import compile_formula
from .errors import ResourceLimitError, SpecError, TdSpecError, UnrealizableError
from .generate import random_qddc, random_secenl, random_td
from .prop import parse_prop, print_prop
from .qddc import classify_fragment, free_vars, parse_qddc, print_qddc
from .secenl import OPERATORS, SeCeNL, parse_secenl, print_secenl
from .semantics import read_trace, write_trace
from .specfile import PREVIOUS, SpecFile, describe, parse_spec_file, requirement_formula
from .synth import Controller, synthesize
from .timing_diagram import export_wavedrom, parse_timing_diagram, xi
from .translate import VARIANTS, aleph, exists1

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3
LOGICS = ("auto", "prop", "qddc", "secenl", "td", "spec")


class UsageError(TdSpecError):
    kind = "usage"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- inputs -------------------------------------------------------------------

def _read(source: str) -> str:
    """File contents when ``source`` names a file, ``-`` for stdin, else the text itself."""
    if source == "-":
        return sys.stdin.read()
    if os.path.isfile(source):
        with open(source, encoding="utf-8") as fh:
            return fh.read()
    return source


def _names(text: str | None) -> list[str] | None:
    if text is None:
        return None
    return [v.strip() for v in text.split(",") if v.strip()]


def _constants(items: Sequence[str] | None) -> dict[str, int] | None:
    if not items:
        return None
    out = {}
    for item in items:
        m = re.fullmatch(r"\s*(\w+)\s*=\s*(\d+)\s*", item)
        if not m:
            raise UsageError(f"--const expects name=natural, got {item!r}")
        out[m.group(1)] = int(m.group(2))
    return out


_LIVE = re.compile(r"^\s*[!(\s]*(" + "|".join(OPERATORS) + r")\s*\(")


def _detect(source: str, text: str) -> str:
    stripped = re.sub(r"//[^\n]*", "", text).strip()
    if source.endswith(".spec") or re.match(r"^(#lhrs\b|interface\b)", stripped):
        return "spec"
    if source.endswith(".td") or re.match(r"^td\b", stripped):
        return "td"
    return "secenl" if _LIVE.match(stripped) else "qddc"


class Source:
    """A formula-like input elaborated to a closed QDDC formula over ``sigma``."""

    def __init__(self, source: str, logic: str = "auto", sigma=None, theta=None, variant: str = "exact",
                 constants=None):
        self.text = _read(source)
        self.logic = _detect(source, self.text) if logic == "auto" else logic
        sigma, theta = _names(sigma), _names(theta) or []
        self.spec: SpecFile | None = None
        self.secenl: SeCeNL | None = None
        self.td = None
        if self.logic == "spec":
            self.spec = parse_spec_file(self.text, constants)
            self.formula = requirement_formula(self.spec, variant)
            self.sigma = tuple(sigma or self.spec.interface)
        elif self.logic == "td":
            self.td = parse_timing_diagram(self.text, sigma)
            nom = xi(self.td)
            self.formula = exists1(nom.noms, nom.body)
        elif self.logic == "secenl":
            self.secenl = parse_secenl(self.text, sigma, theta)
            self.formula = aleph(self.secenl, variant)
        elif self.logic == "qddc":
            self.formula = parse_qddc(self.text, None if sigma is None else list(sigma) + theta)
        else:
            raise UsageError(f"logic {self.logic!r} does not denote a formula")
        if self.spec is None:
            self.sigma = tuple(sigma) if sigma is not None else tuple(sorted(free_vars(self.formula)))


def _emit(doc) -> None:
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")


def _verdict(v) -> int:
    _emit(v.to_dict())
    return EXIT_OK if v.positive else EXIT_NEGATIVE


# -- subcommands ----------------------------------------------------------------

def cmd_parse(args) -> int:
    text = _read(args.source)
    logic = _detect(args.source, text) if args.logic == "auto" else args.logic
    if logic == "prop":
        print(print_prop(parse_prop(text, _names(args.sigma))))
    elif logic == "spec":
        print(describe(parse_spec_file(text, _constants(args.const))))
    elif logic == "td":
        print(parse_timing_diagram(text, _names(args.sigma)).text())
    elif logic == "secenl":
        print(print_secenl(parse_secenl(text, _names(args.sigma), _names(args.theta) or [])))
    else:
        sigma = _names(args.sigma)
        d = parse_qddc(text, None if sigma is None else sigma + (_names(args.theta) or []))
        print(print_qddc(d))
        print(f"// fragment: {classify_fragment(d).tag}")
    return EXIT_OK


def cmd_translate(args) -> int:
    src = Source(args.source, args.logic, args.sigma, args.theta, args.variant, _constants(args.const))
    if src.spec is not None:
        for z in src.spec.assumes:
            print(f"assume {print_secenl(z)}")
        for z in src.spec.reqs:
            print(f"req {print_secenl(z)}")
    elif src.td is not None:
        print(f"secenl {xi(src.td)}")
    elif src.secenl is not None:
        print(f"secenl {print_secenl(src.secenl)}")
    print(f"qddc {print_qddc(src.formula)}")
    return EXIT_OK


def cmd_compile(args) -> int:
    src = Source(args.source, args.logic, args.sigma, args.theta, args.variant, _constants(args.const))
    dfa, report = compile_formula(src.formula, src.sigma, args.cap)
    if args.report:
        sys.stderr.write(json.dumps(report.to_dict(), indent=2) + "\n")
    sys.stdout.write(emit_monitor(dfa, args.format))
    return EXIT_OK


def cmd_check(args) -> int:
    src = Source(args.source, args.logic, args.sigma, args.theta, args.variant, _constants(args.const))
    check = check_sat if args.command == "check-sat" else check_valid
    return _verdict(check(src.formula, src.sigma, args.cap))


def cmd_check_equiv(args) -> int:
    a = Source(args.left, args.logic, args.sigma, args.theta, args.variant)
    b = Source(args.right, args.logic, args.sigma, args.theta, args.variant)
    sigma = tuple(_names(args.sigma) or sorted(set(a.sigma) | set(b.sigma)))
    return _verdict(check_equiv(a.formula, b.formula, sigma, args.cap))


def cmd_check_trace(args) -> int:
    word = read_trace(_read(args.trace))
    src = Source(args.source, args.logic, args.sigma or ",".join(word.sigma), args.theta, args.variant,
                 _constants(args.const))
    dfa, _ = compile_formula(src.formula, word.sigma, args.cap)
    return _verdict(run_trace(dfa, word))


def _requirement(path: str, consts, cap) -> tuple[SpecFile, fa.Dfa]:
    spec = parse_spec_file(_read(path), consts)
    dfa, _ = compile_formula(requirement_formula(spec), spec.interface, cap)
    return spec, dfa


def cmd_model_check(args) -> int:
    model = load_model(_read(args.model))
    _, req = _requirement(args.spec, _constants(args.const), args.cap)
    v = model_check(model, req)
    if args.trace_out and v.witness is not None:
        with open(args.trace_out, "w", encoding="utf-8") as fh:
            fh.write(write_trace(v.witness))
    return _verdict(v)


def cmd_synth(args) -> int:
    spec, req = _requirement(args.spec, _constants(args.const), args.cap)
    scope = list(spec.interface) + [PREVIOUS + v for v in spec.interface]
    prefs = list(spec.softreqs) + [parse_prop(s, scope) for s in args.soft or ()]
    try:
        ctrl = synthesize(req, spec.inputs, spec.outputs, prefs, args.moore, spec.name)
    except UnrealizableError as err:
        _emit({"verdict": "unrealizable", "message": str(err), "explanation": err.explanation})
        return EXIT_NEGATIVE
    sys.stdout.write(emit_controller(ctrl, args.format))
    return EXIT_OK


def cmd_emit(args) -> int:
    text = _read(args.source)
    if args.artifact == "controller":
        sys.stdout.write(emit_controller(Controller.from_json(text), args.format))
        return EXIT_OK
    try:
        doc = json.loads(text)
    except ValueError:
        doc = None
    if isinstance(doc, dict) and "edges" in doc:
        dfa = fa.from_json(text)
    else:
        src = Source(args.source, args.logic, args.sigma, args.theta, args.variant, _constants(args.const))
        dfa, _ = compile_formula(src.formula, src.sigma, args.cap)
    sys.stdout.write(emit_monitor(dfa, args.format))
    return EXIT_OK


def cmd_render_wavedrom(args) -> int:
    text = _read(args.source)
    if _detect(args.source, text) == "spec":
        spec = parse_spec_file(text)
        # macro diagrams are addressed as name:k, k counting from 1
        found = dict(spec.diagrams)
        for m in spec.macros.values():
            for k, d in enumerate(m.diagrams, 1):
                found[f"{m.name}:{k}"] = d
            found.setdefault(m.name, m.diagrams[0])
        if args.diagram not in found:
            known = ", ".join(sorted(found)) or "none"
            raise SpecError(f"no diagram {args.diagram!r} in spec (diagrams: {known})")
        td = found[args.diagram]
    else:
        td = parse_timing_diagram(text, _names(args.sigma))
    sys.stdout.write(export_wavedrom(td).rstrip("\n") + "\n")
    return EXIT_OK


def cmd_random(args) -> int:
    rng = random.Random(args.seed)
    sigma = _names(args.sigma) or ["p", "q"]
    for _ in range(args.count):
        if args.kind == "qddc":
            print(print_qddc(random_qddc(rng, sigma, depth=args.depth)))
        elif args.kind == "secenl":
            print(print_secenl(random_secenl(rng, sigma)))
        else:
            print(random_td(rng, sigma).text() + "\n")
    return EXIT_OK


# -- wiring -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="tdspec", description="Timing-diagram and QDDC requirements tool chain.")
    top.add_argument("--json-errors", action="store_true", help="report errors as JSON on stderr")
    top.add_argument("--seed", type=int, default=0, help="seed for randomised generators")
    top.add_argument("--cap", type=int, default=None, help="automaton state cap (default TDSPEC_STATE_CAP)")
    sub = top.add_subparsers(dest="command", parser_class=_Parser)

    def formula_opts(p, with_source=True):
        if with_source:
            p.add_argument("source", help="formula text, a file, or - for stdin")
        p.add_argument("--logic", choices=LOGICS, default="auto")
        p.add_argument("--sigma", help="comma-separated system variables, in letter order")
        p.add_argument("--theta", help="comma-separated nominals")
        p.add_argument("--variant", choices=VARIANTS, default="exact", help="translation of liveness operators")
        p.add_argument("--const", action="append", metavar="NAME=N", help="override a spec constant")

    p = sub.add_parser("parse", help="parse and pretty-print")
    formula_opts(p)
    p.set_defaults(run=cmd_parse)
    p = sub.add_parser("translate", help="print the SeCeNL and QDDC translations")
    formula_opts(p)
    p.set_defaults(run=cmd_translate)
    p = sub.add_parser("compile", help="compile to a minimal DFA")
    formula_opts(p)
    p.add_argument("--format", choices=MONITOR_FORMATS, default="json")
    p.add_argument("--report", action="store_true", help="per-node state counts on stderr")
    p.set_defaults(run=cmd_compile)
    for name in ("check-sat", "check-valid"):
        p = sub.add_parser(name, help=f"{name[6:]}isfiability check" if name == "check-sat" else "validity check")
        formula_opts(p)
        p.set_defaults(run=cmd_check)
    p = sub.add_parser("check-equiv", help="equivalence of two formulas")
    p.add_argument("left")
    p.add_argument("right")
    formula_opts(p, with_source=False)
    p.set_defaults(run=cmd_check_equiv)
    p = sub.add_parser("check-trace", help="evaluate a formula on a trace file")
    formula_opts(p)
    p.add_argument("trace", help="trace file (vars: header, one var=0|1 line per step)")
    p.set_defaults(run=cmd_check_trace)
    p = sub.add_parser("model-check", help="check a synchronous model against a spec")
    p.add_argument("model", help="model JSON (latches and outputs, or a controller table)")
    p.add_argument("spec")
    p.add_argument("--const", action="append", metavar="NAME=N")
    p.add_argument("--trace-out", help="also write the counterexample as a trace file")
    p.set_defaults(run=cmd_model_check)
    p = sub.add_parser("synth", help="synthesise a controller from a spec")
    p.add_argument("spec")
    p.add_argument("--const", action="append", metavar="NAME=N")
    p.add_argument("--soft", action="append", metavar="PROP", help="extra soft requirement, highest priority first")
    p.add_argument("--moore", action="store_true", help="outputs may not depend on the current input")
    p.add_argument("--format", choices=CONTROLLER_FORMATS, default="json")
    p.set_defaults(run=cmd_synth)
    p = sub.add_parser("emit", help="emit a monitor or controller in another format")
    formula_opts(p)
    p.add_argument("--artifact", choices=("monitor", "controller"), default="monitor")
    p.add_argument("--format", choices=MONITOR_FORMATS, default="json")
    p.set_defaults(run=cmd_emit)
    p = sub.add_parser("render-wavedrom", help="export a timing diagram as WaveDrom JSON")
    p.add_argument("source", help="timing diagram block, or a spec file with --diagram")
    p.add_argument("--diagram", help="diagram name inside a spec file; name:k for the k-th diagram of a macro")
    p.add_argument("--sigma")
    p.set_defaults(run=cmd_render_wavedrom)
    p = sub.add_parser("random", help="print random formulas or diagrams")
    p.add_argument("kind", choices=("qddc", "secenl", "td"))
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--sigma")
    p.set_defaults(run=cmd_random)
    return top


def _fail(err: Exception, json_errors: bool, code: int) -> int:
    if json_errors:
        doc = err.to_dict() if isinstance(err, TdSpecError) else {"kind": "io-error", "message": str(err)}
        doc["exit"] = code
        sys.stderr.write(json.dumps(doc) + "\n")
    else:
        sys.stderr.write(f"tdspec: {err}\n")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    json_errors = "--json-errors" in argv
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("missing subcommand")
        return args.run(args)
    except ResourceLimitError as err:
        return _fail(err, json_errors, EXIT_CAP)
    except UnrealizableError as err:
        return _fail(err, json_errors, EXIT_NEGATIVE)
    except (TdSpecError, OSError, ValueError) as err:
        return _fail(err, json_errors, EXIT_USAGE)


if __name__ == "__main__":
    sys.exit(main())
