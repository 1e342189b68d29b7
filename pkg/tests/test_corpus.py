from importlib import resources

import pytest

from tdspec import automata as fa
from tdspec.analysis import load_model
from tdspec.compile import compile_formula
from tdspec.corpus import stack
from tdspec.qddc import free_vars
from tdspec.specfile import parse_spec_file, requirement_formula

CORPUS = resources.files("tdspec.corpus")
SPECS = ["minepump.spec", "arbiter.spec", "arbiter_deadtime.spec", "arbiter_response.spec"]


def test_minepump_shape():
    spec = parse_spec_file((CORPUS / "minepump.spec").read_text())
    assert spec.name == "minepump"
    assert spec.inputs == ("HH2O", "HCH4") and spec.outputs == ("ALARM", "PUMPON")
    assert spec.auxvars == ("DH2O",)
    assert len(spec.assumes) == 7 and len(spec.reqs) == 5
    assert len(spec.softreqs) == 1
    assert spec.constants == {"delta": 1, "w": 10, "epsilon": 2, "zeta": 14, "kappa": 2}


@pytest.mark.parametrize("name", SPECS)
def test_corpus_specs_compile(name):
    spec = parse_spec_file((CORPUS / name).read_text())
    dfa = compile_formula(requirement_formula(spec), spec.interface)[0]
    assert dfa.alphabet == tuple(spec.interface)
    assert not fa.is_empty(dfa)
    # commitments alone are safety properties; assume => commit need not be
    if not spec.assumes:
        assert fa.is_prefix_closed(dfa)


def test_empty_main_is_universal():
    spec = parse_spec_file("interface { input i; output o; }\nmain() { }\n")
    assert fa.is_universal(compile_formula(requirement_formula(spec), spec.interface)[0])


def test_arbiter_model_matches_specs():
    model = load_model((CORPUS / "arbiter3.model.json").read_text())
    spec = parse_spec_file((CORPUS / "arbiter.spec").read_text())
    assert tuple(model.inputs) == spec.inputs
    assert set(spec.outputs) <= set(model.signals)


def test_stack_formulas_are_closed():
    for form in ("ordered", "unordered"):
        assert free_vars(stack.formula(form)) <= set(stack.SIGNALS)
