import json
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tdspec.errors import ParseError, SpecError
from tdspec.generate import random_td
from tdspec.prop import PNot, PVar
from tdspec.qddc import PT, TRUE, All, AllButLast, And, Or, SlenCmp, Unit, chop_all, classify_fragment, nodecount
from tdspec.semantics import Rows, _Nominal, td_tables
from tdspec.timing_diagram import (
    Bound,
    Cell,
    Constraint,
    export_wavedrom,
    parse_timing_diagram,
    parse_waveform,
    xi,
    xi_constraint,
    xi_waveform,
)

seeds = st.integers(0, 2**32 - 1)
P = PVar("p")

FIG3 = """
p: 01a:2x011xb:x2|220c:00;
q: 00a:0|d:11|e:xxx|f:01c:11;
@sync:(a, d, [1,8]);
@sync:(d, c, [20,30]);
@sync:(a, b, [10,10]);
"""


def test_parse_waveform_paper_example():
    w = parse_waveform("01a:2x011xb:x2|220c:00")
    assert len(w.cells) == 15
    assert [(i, c.markers) for i, c in enumerate(w.cells) if c.markers] == [(2, ("a",)), (8, ("b",)), (13, ("c",))]
    assert w.cells[9] == Cell("2", True)


def test_parse_waveform_small():
    assert parse_waveform("1|").cells == (Cell("1", True),)
    assert parse_waveform("<u>0").cells == (Cell("0", False, ("u",)),)
    with pytest.raises(ParseError):
        parse_waveform("0y:")
    with pytest.raises(ParseError):
        parse_waveform("01q")
    with pytest.raises(ParseError):
        parse_waveform("")


def test_parse_fig3():
    td = parse_timing_diagram(FIG3)
    assert td.theta == {"a", "b", "c", "d", "e", "f"}
    assert len(td.constraints) == 3
    assert len(td.waves) == 2


def test_parse_td_errors():
    with pytest.raises(SpecError):
        parse_timing_diagram("p: <a>01; @sync:(a, z, [1,2]);")
    with pytest.raises(SpecError):
        parse_timing_diagram("p: <a>0<b>1; @sync:(a, b, [3,2]);")


def test_xi_waveform_fig3():
    td = parse_timing_diagram(FIG3)
    lo, hi, one = Unit(PNot(P)), Unit(P), SlenCmp("=", 1)
    a, b, c = (All(PVar(u)) for u in "abc")
    expected = chop_all([lo, hi, a, one, one, lo, hi, hi, one, b, one, TRUE, one, one, lo, c, lo, lo])
    assert xi_waveform(td.waves[0][1], P) == expected


def test_xi_cell_table():
    assert xi_waveform(parse_waveform("1|"), P) == Or(PT, AllButLast(P))
    assert xi_waveform(parse_waveform("0|"), P) == Or(PT, AllButLast(PNot(P)))
    assert xi_waveform(parse_waveform("x|"), P) == Or(Or(PT, AllButLast(P)), AllButLast(PNot(P)))
    assert xi_waveform(parse_waveform("2|"), P) == TRUE
    assert xi_waveform(parse_waveform("x"), P) == SlenCmp("=", 1)
    assert xi_waveform(parse_waveform("2"), P) == SlenCmp("=", 1)


def test_xi_constraint_examples():
    a, d = All(PVar("a")), All(PVar("d"))
    assert xi_constraint(Constraint("a", "d", Bound(1, False, 8, False))) == \
        chop_all([TRUE, a, And(SlenCmp(">=", 1), SlenCmp("<=", 8)), d, TRUE])
    assert xi_constraint(Constraint("a", "d", Bound(10, False, 10, False))) == \
        chop_all([TRUE, a, SlenCmp("=", 10), d, TRUE])
    assert xi_constraint(Constraint("a", "d", Bound(3, True, None, False))) == \
        chop_all([TRUE, a, SlenCmp(">", 3), d, TRUE])


def test_xi_single_cell():
    z = xi(parse_timing_diagram("p: 1;"))
    assert z.body == Unit(P) and z.noms == frozenset()


def test_xi_fig3_shape():
    td = parse_timing_diagram(FIG3)
    z = xi(td)
    assert z.noms == td.theta
    assert classify_fragment(z.body).tag in ("CE", "SeCe")


@given(seeds)
def test_xi_in_sece_and_linear(seed):
    td = random_td(random.Random(seed), ["p", "q"], max_cells=10, max_constraints=4, max_nominals=4)
    body = xi(td).body
    assert classify_fragment(body).within("SeCe")
    # cells plus constraints alone undercount marker-dense diagrams; markers are
    # part of the input too
    markers = sum(len(w.markers) for _, w in td.waves)
    assert nodecount(body) <= 12 * (td.size() + markers)


@given(seeds)
@settings(max_examples=15)
def test_xi_preserves_semantics(seed):
    td = random_td(random.Random(seed), ["p", "q"], max_cells=4)
    order = sorted(td.theta)
    for n in range(1, 6):
        rows = Rows.cube(["p", "q"], n)
        direct = td_tables(td, rows, order)
        via_xi = np.broadcast_to(_Nominal(rows, order).table(xi(td)), direct.shape)
        upper = np.arange(n)[:, None] <= np.arange(n)[None, :]
        assert np.array_equal(direct, via_xi & upper)


def test_wavedrom_fig3():
    doc = json.loads(export_wavedrom(parse_timing_diagram(FIG3)))
    assert [s["name"] for s in doc["signal"]] == ["p", "q"]
    assert len(doc["edge"]) == 3
    names = sorted(doc["nominals"].values())
    assert names == ["a", "a_1", "b", "c", "c_1", "d", "e", "f"]


def test_wavedrom_without_constraints():
    doc = json.loads(export_wavedrom(parse_timing_diagram("p: 01|;")))
    assert "edge" not in doc
    assert doc["signal"] == [{"name": "p", "wave": "01.", "node": "..."}]


def test_wavedrom_deterministic():
    td = parse_timing_diagram(FIG3)
    assert export_wavedrom(td) == export_wavedrom(parse_timing_diagram(FIG3))
