"""The ℵ translation from SeCeNL to QDDC.

Nominal-free atoms use the first translation list; atoms with nominals use
the relativised list.  Two variants of the latter exist:

``"paper"``
    the relativised formulas transcribed as published;
``"exact"`` (default)
    the same shapes, with each operand's nominals required to fall inside
    the operand's own interval and each existential placed inside the
    chop split it depends on.  This is what makes the translation agree
    with the operator semantics for arbitrary SeCe bodies (see
    ``tests/test_translate.py`` for the witnesses that separate the two).
"""

from __future__ import annotations

from typing import Iterable

from .prop import PVar
from .qddc import (
    EXT,
    TRUE,
    And,
    Chop,
    Exists,
    Forall,
    Formula,
    Not,
    Or,
    ScountCmp,
    and_all,
    box,
    chop_all,
    implies,
)
from .secenl import (
    Anti,
    Follows,
    Implies,
    Init,
    Nominated,
    Plain,
    Pref,
    SAnd,
    SeCeNL,
    SNot,
    SOr,
    Triggers,
    operands,
)

VARIANTS = ("exact", "paper")


def focc(d: Formula) -> Formula:
    """First occurrence: D holds and no proper prefix interval satisfies D."""
    return And(d, Not(Chop(d, EXT)))


def singleton(u: str) -> Formula:
    return ScountCmp(PVar(u), "=", 1)


def relativize(kind: str, theta: Iterable[str], body: Formula) -> Formula:
    """∃¹_Θ (``exists1``) or ∀¹_Θ (``forall1``): quantify each nominal over single positions."""
    names = sorted(theta)
    if not names:
        return body
    guard = and_all(singleton(u) for u in names)
    if kind == "exists1":
        out: Formula = And(guard, body)
        ctor = Exists
    elif kind == "forall1":
        out = implies(guard, body)
        ctor = Forall
    else:
        raise ValueError(f"unknown relativised quantifier {kind!r}")
    for u in reversed(names):
        out = ctor(u, out)
    return out


def exists1(theta: Iterable[str], body: Formula) -> Formula:
    return relativize("exists1", theta, body)


def forall1(theta: Iterable[str], body: Formula) -> Formula:
    return relativize("forall1", theta, body)


def qpref(d: Formula) -> Formula:
    """pref as a QDDC formula: every prefix interval satisfies D."""
    return Not(Chop(Not(d), TRUE))


def inside(theta: Iterable[str]) -> Formula:
    """Every nominal of Θ occurs in the current interval."""
    return and_all(ScountCmp(PVar(u), ">=", 1) for u in sorted(theta))


def _pinned(d: Nominated) -> Formula:
    return And(d.body, inside(d.noms)) if d.noms else d.body


def aleph_atom_free(z: SeCeNL) -> Formula:
    """First list: atoms whose operands carry no nominals."""
    if isinstance(z, Pref):
        return qpref(z.d.body)
    if isinstance(z, Init):
        return qpref(implies(focc(z.d2.body), Chop(z.d1.body, TRUE)))
    if isinstance(z, Anti):
        return Not(chop_all([TRUE, z.d.body, TRUE]))
    if isinstance(z, Implies):
        return box(implies(z.d1.body, z.d2.body))
    if isinstance(z, Follows):
        d1, d2, d3 = (d.body for d in operands(z))
        return box(Not(Chop(d1, And(focc(d3), Not(Chop(d2, TRUE))))))
    if isinstance(z, Triggers):
        d1, d2, d3 = (d.body for d in operands(z))
        reply = implies(focc(d3), Chop(d2, TRUE))
        return And(box(implies(Chop(d1, TRUE), reply)), box(implies(d1, qpref(reply))))
    raise TypeError(f"not an atomic SeCeNL formula: {z!r}")


def aleph_atom_paper(z: SeCeNL) -> Formula:
    """Second list, as published (item 3 read as anti)."""
    if isinstance(z, Pref):
        return Not(exists1(z.d.noms, Chop(Not(z.d.body), TRUE)))
    if isinstance(z, Init):
        d1, d2 = z.d1, z.d2
        return qpref(forall1(d2.noms, implies(d2.body, exists1(d1.noms - d2.noms, Chop(d1.body, TRUE)))))
    if isinstance(z, Anti):
        return Not(exists1(z.d.noms, chop_all([TRUE, z.d.body, TRUE])))
    if isinstance(z, Implies):
        d1, d2 = z.d1, z.d2
        return box(forall1(d1.noms, implies(d1.body, exists1(d2.noms - d1.noms, d2.body))))
    d1, d2, d3 = operands(z)
    only2 = d2.noms - (d1.noms | d3.noms)
    if isinstance(z, Follows):
        core = Not(Chop(d1.body, And(focc(d3.body), Not(Chop(d2.body, TRUE)))))
        return box(forall1(d1.noms, forall1(d3.noms - d1.noms, exists1(only2, core))))
    if isinstance(z, Triggers):
        reply = forall1(d3.noms - d1.noms, implies(focc(d3.body), exists1(only2, Chop(d2.body, TRUE))))
        return And(box(forall1(d1.noms, implies(Chop(d1.body, TRUE), reply))),
                   box(forall1(d1.noms, implies(d1.body, qpref(reply)))))
    raise TypeError(f"not an atomic SeCeNL formula: {z!r}")


def aleph_atom_exact(z: SeCeNL) -> Formula:
    """Second list with nominal ranges tied to each operand's own interval."""
    if isinstance(z, Pref):
        return Not(Chop(forall1(z.d.noms, Not(_pinned(z.d))), TRUE))
    if isinstance(z, Init):
        d1, d2 = z.d1, z.d2
        return qpref(forall1(d2.noms, implies(_pinned(d2), Chop(exists1(d1.noms - d2.noms, _pinned(d1)), TRUE))))
    if isinstance(z, Anti):
        return Not(exists1(z.d.noms, chop_all([TRUE, _pinned(z.d), TRUE])))
    if isinstance(z, Implies):
        d1, d2 = z.d1, z.d2
        return box(forall1(d1.noms, implies(d1.body, exists1(d2.noms - d1.noms, d2.body))))
    d1, d2, d3 = operands(z)
    only2 = d2.noms - (d1.noms | d3.noms)
    first3 = And(focc(d3.body), inside(d3.noms)) if d3.noms else focc(d3.body)
    answer = Chop(exists1(only2, _pinned(d2)), TRUE)
    if isinstance(z, Follows):
        core = Not(Chop(_pinned(d1), And(first3, Not(answer))))
        return box(forall1(d1.noms | d3.noms, core))
    if isinstance(z, Triggers):
        reply = implies(first3, answer)
        return And(box(forall1(d1.noms | d3.noms, implies(Chop(_pinned(d1), TRUE), reply))),
                   box(forall1(d1.noms, implies(d1.body, qpref(forall1(d3.noms - d1.noms, reply))))))
    raise TypeError(f"not an atomic SeCeNL formula: {z!r}")


def aleph(z: SeCeNL, variant: str = "exact") -> Formula:
    """Translate a SeCeNL formula to an equivalent QDDC formula over whole words."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; choose from {VARIANTS}")
    if isinstance(z, SNot):
        return Not(aleph(z.arg, variant))
    if isinstance(z, SAnd):
        return And(aleph(z.left, variant), aleph(z.right, variant))
    if isinstance(z, SOr):
        return Or(aleph(z.left, variant), aleph(z.right, variant))
    if isinstance(z, Plain):
        return z.d
    if not any(d.noms for d in operands(z)):
        return aleph_atom_free(z)
    if variant == "paper":
        return aleph_atom_paper(z)
    return aleph_atom_exact(z)
