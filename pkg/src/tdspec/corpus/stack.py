"""Stacked-signal corpus: n signals rise and fall in first-on-last-off order.

Both formulas are nominated QDDC formulas over the signals plus their
nominals; ``formula`` returns the closed form with each nominal bound by ∃¹.
"""

from __future__ import annotations

from ..qddc import Formula, parse_qddc
from ..translate import exists1

SIGNALS = ("a", "b", "c", "d", "e")


def _waves(sig) -> list[str]:
    return [f"([!{x}] ^ <u{x}> ^ [{x}] ^ <v{x}> ^ [!{x}])" for x in sig]


def _before(x: str, y: str) -> str:
    return f"(ext ^ <{x}> ^ ext ^ <{y}> ^ ext)"


def ordered_text(sig=SIGNALS) -> str:
    rises = [_before(f"u{x}", f"u{y}") for x, y in zip(sig, sig[1:])]
    falls = [_before(f"v{x}", f"v{y}") for x, y in zip(sig, sig[1:])]
    return " && ".join(_waves(sig) + rises + falls)


def ordered_nominals(sig=SIGNALS) -> tuple[str, ...]:
    return tuple(f"{p}{x}" for x in sig for p in "uv")


def unordered_text(sig=SIGNALS) -> str:
    ks = range(1, len(sig) + 1)
    rises = [_before(f"u{i}", f"u{i + 1}") for i in ks if i < len(sig)]
    falls = [_before(f"v{i + 1}", f"v{i}") for i in ks if i < len(sig)]
    parts = _waves(sig) + rises + falls
    for p in "uv":
        slots = " || ".join(f"{p}{i}" for i in ks)
        named = " || ".join(f"{p}{x}" for x in sig)
        parts.append(f"[[({slots}) <=> ({named})]]")
        clash = " && ".join(f"!({p}{i} && {p}{j})" for i in ks for j in ks if i < j)
        parts.append(f"[[{clash}]]")
    for i in ks:
        for x in sig:
            parts.append(f"((true ^ <u{i} && u{x}> ^ true) <=> (true ^ <v{i} && v{x}> ^ true))")
    return " && ".join(parts)


def unordered_nominals(sig=SIGNALS) -> tuple[str, ...]:
    ks = range(1, len(sig) + 1)
    return ordered_nominals(sig) + tuple(f"{p}{i}" for i in ks for p in "uv")


def body(kind: str, sig=SIGNALS) -> Formula:
    """The nominated body over signals and nominals; ``kind`` is ordered or unordered."""
    text, noms = (ordered_text(sig), ordered_nominals(sig)) if kind == "ordered" else \
        (unordered_text(sig), unordered_nominals(sig))
    return parse_qddc(text, list(sig) + list(noms))


def formula(kind: str, sig=SIGNALS) -> Formula:
    noms = ordered_nominals(sig) if kind == "ordered" else unordered_nominals(sig)
    return exists1(noms, body(kind, sig))


def witness(order: str, sig=SIGNALS):
    """Signals rise one per step in ``order`` and fall in reverse, then a quiet step."""
    from ..semantics import Word
    span = 2 * len(order) + 3
    rows: list[set[str]] = [set() for _ in range(span)]
    for i, x in enumerate(order):
        for t in range(i + 1, span - 2 - i):
            rows[t].add(x)
    return Word.from_sets(list(sig), rows)


def valuation(order: str) -> dict[str, int]:
    """The ν that makes ``witness(order)`` satisfy the unordered body."""
    span = 2 * len(order) + 3
    nu: dict[str, int] = {}
    for i, x in enumerate(order):
        nu[f"u{x}"] = nu[f"u{i + 1}"] = i + 1
        nu[f"v{x}"] = nu[f"v{i + 1}"] = span - 2 - i
    return nu
