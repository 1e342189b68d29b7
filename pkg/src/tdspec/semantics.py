"""Reference interpreters for QDDC, SeCeNL and timing diagrams.

Two independent QDDC evaluators live here.  ``sat_interval`` follows the
satisfaction clauses literally (recursion over intervals, enumeration of
chop points and p-variants).  ``BatchOracle`` computes the truth table of
every subformula on every interval of many words at once with numpy; it is
what makes exhaustive sweeps over all short words affordable.  The two are
cross-checked in the test-suite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import TraceFormatError
from .prop import PNot, eval_prop, prop_vars
from .qddc import (
    All,
    AllButLast,
    And,
    Chop,
    Exists,
    Forall,
    Formula,
    Not,
    Or,
    Pt,
    ScountCmp,
    SdurCmp,
    SlenCmp,
    Star,
    Unit,
    compare,
    free_vars,
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
from .timing_diagram import Cell, TimingDiagram, sat_constraints, sat_waveform


# -- words ------------------------------------------------------------------

@dataclass(frozen=True)
class Word:
    """A non-empty word; letter ``t`` is the integer code of σ(t) with variable i at bit k-1-i."""

    sigma: tuple[str, ...]
    codes: tuple[int, ...]

    def __post_init__(self):
        if not self.codes:
            raise ValueError("words are non-empty")

    @classmethod
    def from_sets(cls, sigma: Sequence[str], letters: Iterable[Iterable[str]]) -> "Word":
        sigma = tuple(sigma)
        index = {v: i for i, v in enumerate(sigma)}
        k = len(sigma)
        codes = []
        for letter in letters:
            code = 0
            for v in letter:
                if v not in index:
                    raise TraceFormatError(f"variable {v!r} not in alphabet {list(sigma)}")
                code |= 1 << (k - 1 - index[v])
            codes.append(code)
        return cls(sigma, tuple(codes))

    @classmethod
    def from_bits(cls, sigma: Sequence[str], bits) -> "Word":
        bits = np.asarray(bits, dtype=bool).reshape(-1, len(sigma))
        k = len(sigma)
        weights = 1 << np.arange(k - 1, -1, -1)
        return cls(tuple(sigma), tuple(int(x) for x in (bits * weights).sum(axis=1)))

    def __len__(self) -> int:
        return len(self.codes)

    def bits(self) -> np.ndarray:
        k = len(self.sigma)
        shifts = np.arange(k - 1, -1, -1)
        return ((np.array(self.codes)[:, None] >> shifts[None, :]) & 1).astype(bool)

    def column(self, var: str) -> np.ndarray:
        return self.bits()[:, self.sigma.index(var)]

    def letter(self, t: int) -> frozenset[str]:
        k = len(self.sigma)
        return frozenset(v for i, v in enumerate(self.sigma) if self.codes[t] >> (k - 1 - i) & 1)

    def prefix(self, n: int) -> "Word":
        return Word(self.sigma, self.codes[:n])

    def extend(self, columns: Mapping[str, Sequence[bool]]) -> "Word":
        """Add or override variables (used for nominal valuations and p-variants)."""
        sigma = list(self.sigma)
        bits = self.bits()
        cols = {v: bits[:, i] for i, v in enumerate(sigma)}
        for v, col in columns.items():
            if v not in cols:
                sigma.append(v)
            cols[v] = np.asarray(col, dtype=bool)
        return Word.from_bits(sigma, np.stack([cols[v] for v in sigma], axis=1))

    def restrict(self, sigma: Sequence[str]) -> "Word":
        bits = self.bits()
        return Word.from_bits(sigma, np.stack([bits[:, self.sigma.index(v)] for v in sigma], axis=1))

    def __str__(self) -> str:
        return " ".join("{" + ",".join(sorted(self.letter(t), key=self.sigma.index)) + "}" for t in range(len(self)))


def nominal_word(word: Word, nu: Mapping[str, int]) -> Word:
    """σ_ν: each nominal holds exactly at its assigned position."""
    n = len(word)
    return word.extend({u: [t == pos for t in range(n)] for u, pos in nu.items()})


# -- trace format -----------------------------------------------------------

def read_trace(text: str) -> Word:
    """``vars: p, q`` header, then one ``p=0, q=1`` line per step; every variable every line."""
    lines = [ln.split("//", 1)[0].strip() for ln in text.splitlines()]
    lines = [(i + 1, ln) for i, ln in enumerate(lines) if ln]
    if not lines:
        raise TraceFormatError("empty trace")
    lineno, header = lines[0]
    if not header.startswith("vars:"):
        raise TraceFormatError(f"line {lineno}: expected 'vars:' header")
    sigma = [v.strip() for v in header[5:].split(",") if v.strip()]
    if len(set(sigma)) != len(sigma):
        raise TraceFormatError(f"line {lineno}: duplicate variable in header")
    rows = []
    for lineno, ln in lines[1:]:
        seen: dict[str, bool] = {}
        for item in ln.split(","):
            if "=" not in item:
                raise TraceFormatError(f"line {lineno}: expected var=0|1, got {item.strip()!r}")
            v, val = (s.strip() for s in item.split("=", 1))
            if v not in sigma:
                raise TraceFormatError(f"line {lineno}: variable {v!r} not declared in header")
            if val not in ("0", "1"):
                raise TraceFormatError(f"line {lineno}: value of {v!r} must be 0 or 1")
            if v in seen:
                raise TraceFormatError(f"line {lineno}: variable {v!r} repeated")
            seen[v] = val == "1"
        missing = [v for v in sigma if v not in seen]
        if missing:
            raise TraceFormatError(f"line {lineno}: missing variable(s) {missing}")
        rows.append([seen[v] for v in sigma])
    if not rows:
        raise TraceFormatError("trace has no steps")
    return Word.from_bits(sigma, np.array(rows, dtype=bool))


def write_trace(word: Word) -> str:
    bits = word.bits()
    out = ["vars: " + ", ".join(word.sigma)]
    for row in bits:
        out.append(", ".join(f"{v}={int(b)}" for v, b in zip(word.sigma, row)))
    return "\n".join(out) + "\n"


# -- literal recursive oracle -----------------------------------------------

def eval_term(word: Word, b: int, e: int, term: Formula) -> int:
    """Value of the term of a comparison atom on [b, e]."""
    if isinstance(term, SlenCmp):
        return e - b
    cols = _columns(word)
    hi = e + 1 if isinstance(term, ScountCmp) else e
    return sum(bool(eval_prop(term.phi, {v: c[i] for v, c in cols.items()})) for i in range(b, hi))


def _columns(word: Word) -> dict[str, np.ndarray]:
    bits = word.bits()
    return {v: bits[:, i] for i, v in enumerate(word.sigma)}


class _Recursive:
    def __init__(self, cols: Mapping[str, Sequence[bool]], n: int):
        self.cols = cols
        self.n = n
        self.memo: dict[tuple[int, int, int], bool] = {}
        self.keep: list[Formula] = []

    def at(self, phi, i: int) -> bool:
        return bool(eval_prop(phi, {v: c[i] for v, c in self.cols.items()}))

    def sat(self, d: Formula, b: int, e: int) -> bool:
        key = (id(d), b, e)
        hit = self.memo.get(key)
        if hit is None:
            self.keep.append(d)
            hit = self.memo[key] = self._sat(d, b, e)
        return hit

    def _sat(self, d: Formula, b: int, e: int) -> bool:
        if isinstance(d, Pt):
            return self.at(d.phi, b)
        if isinstance(d, AllButLast):
            return all(self.at(d.phi, i) for i in range(b, e))
        if isinstance(d, All):
            return all(self.at(d.phi, i) for i in range(b, e + 1))
        if isinstance(d, Unit):
            return e == b + 1 and self.at(d.phi, b)
        if isinstance(d, SlenCmp):
            return compare(e - b, d.op, d.const)
        if isinstance(d, ScountCmp):
            return compare(sum(self.at(d.phi, i) for i in range(b, e + 1)), d.op, d.const)
        if isinstance(d, SdurCmp):
            return compare(sum(self.at(d.phi, i) for i in range(b, e)), d.op, d.const)
        if isinstance(d, Not):
            return not self.sat(d.arg, b, e)
        if isinstance(d, Or):
            return self.sat(d.left, b, e) or self.sat(d.right, b, e)
        if isinstance(d, And):
            return self.sat(d.left, b, e) and self.sat(d.right, b, e)
        if isinstance(d, Chop):
            return any(self.sat(d.left, b, i) and self.sat(d.right, i, e) for i in range(b, e + 1))
        if isinstance(d, Star):
            # b = e, or a first non-degenerate step followed by more iterations
            return b == e or any(self.sat(d.arg, b, i) and self.sat(d, i, e) for i in range(b + 1, e + 1))
        if isinstance(d, (Exists, Forall)):
            want = isinstance(d, Exists)
            for variant in itertools.product((False, True), repeat=self.n):
                cols = dict(self.cols)
                cols[d.var] = np.array(variant, dtype=bool)
                if _Recursive(cols, self.n).sat(d.body, b, e) == want:
                    return want
            return not want
        raise TypeError(f"not a QDDC formula: {d!r}")


def sat_interval(word: Word, interval: tuple[int, int], d: Formula) -> bool:
    b, e = interval
    if not 0 <= b <= e < len(word):
        raise ValueError(f"interval {interval} outside word of length {len(word)}")
    return _Recursive(_columns(word), len(word)).sat(d, b, e)


def sat_word(word: Word, d: Formula) -> bool:
    """σ ⊨ D, evaluated on [0, |σ|-1]."""
    return sat_interval(word, (0, len(word) - 1), d)


def find_valuation(word: Word, body: Formula, noms: Iterable[str]) -> dict[str, int] | None:
    """Some ν with σ_ν ⊨ body, or None.  Backtracks over positions, checking
    each top-level conjunct as soon as its nominals are all placed."""
    noms = list(noms)
    parts: list[Formula] = []
    stack = [body]
    while stack:
        d = stack.pop()
        if isinstance(d, And):
            stack += [d.right, d.left]
        else:
            parts.append(d)
    need = [free_vars(p) & set(noms) for p in parts]
    order: list[str] = []
    rest = set(noms)
    while rest:
        # place next the nominal that completes the most conjuncts
        def gain(u):
            placed = set(order) | {u}
            return (sum(1 for n in need if u in n and n <= placed), -noms.index(u))
        u = max(sorted(rest), key=gain)
        order.append(u)
        rest.discard(u)
    due: list[list[Formula]] = [[] for _ in order]
    for p, n in zip(parts, need):
        at = max((order.index(u) for u in n), default=-1)
        if at < 0:
            if not sat_word(word, p):
                return None
        else:
            due[at].append(p)
    nu: dict[str, int] = {}

    def place(k: int) -> bool:
        if k == len(order):
            return True
        for pos in range(len(word)):
            nu[order[k]] = pos
            w = nominal_word(word, nu)
            if all(sat_word(w, p) for p in due[k]) and place(k + 1):
                return True
        del nu[order[k]]
        return False

    return dict(nu) if place(0) else None


# -- vectorised oracle ------------------------------------------------------

def all_words_bits(k: int, n: int) -> np.ndarray:
    """Bits (2**(k*n), n, k) of every word of length n; row index = word read as a big-endian integer."""
    total = k * n
    idx = np.arange(1 << total, dtype=np.int64)
    shifts = np.arange(total - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts[None, :]) & 1).astype(bool).reshape(-1, n, k)


class Rows:
    """A batch of words of one length; ``axes`` tags the factorised row index.

    Each axis is ``(var, position)`` for a cube bit, or ``("", size)`` for an
    opaque factor.  Quantifying a variable whose bits span the row index is a
    reduction over those axes; any other variable is added as new axes.
    """

    def __init__(self, cols: dict[str, np.ndarray], n: int, axes: list[tuple[str, int]], shape: list[int]):
        self.cols = cols
        self.n = n
        self.axes = axes
        self.shape = shape
        self.count = int(np.prod(shape)) if shape else 1

    @classmethod
    def cube(cls, sigma: Sequence[str], n: int) -> "Rows":
        bits = all_words_bits(len(sigma), n)
        cols = {v: bits[:, :, i] for i, v in enumerate(sigma)}
        axes = [(v, t) for t in range(n) for v in sigma]
        return cls(cols, n, axes, [2] * len(axes))

    @classmethod
    def explicit(cls, cols: dict[str, np.ndarray], n: int, count: int | None = None) -> "Rows":
        if count is None:
            count = len(next(iter(cols.values()))) if cols else 1
        return cls(cols, n, [("", count)], [count])

    @classmethod
    def of_words(cls, words: Sequence[Word]) -> "Rows":
        n = len(words[0])
        sigma = words[0].sigma
        bits = np.stack([w.bits() for w in words])
        return cls.explicit({v: bits[:, :, i] for i, v in enumerate(sigma)}, n)

    def covers(self, var: str) -> bool:
        return sum(1 for a in self.axes if a[0] == var) == self.n

    def extend(self, var: str) -> "Rows":
        m = 1 << self.n
        fresh = all_words_bits(1, self.n)[:, :, 0]
        cols = {v: np.repeat(c, m, axis=0) for v, c in self.cols.items() if v != var}
        cols[var] = np.tile(fresh, (self.count, 1))
        return Rows(cols, self.n, self.axes + [(var, t) for t in range(self.n)], self.shape + [2] * self.n)


class BatchOracle:
    """Truth tables ``(rows, n, n)``: entry [r, b, e] is row r on [b, e] (False when b > e)."""

    def __init__(self, rows: Rows):
        self.rows = rows
        n = rows.n
        self.n = n
        b = np.arange(n)[:, None]
        e = np.arange(n)[None, :]
        self.upper = b <= e
        self.slen = np.where(self.upper, e - b, -1)
        self.cache: dict[int, np.ndarray] = {}
        self.keep: list[Formula] = []

    def prop(self, phi) -> np.ndarray:
        val = eval_prop(phi, self.rows.cols) if prop_vars(phi) else eval_prop(phi, {})
        return np.broadcast_to(np.asarray(val, dtype=bool), (self.rows.count, self.n))

    def _counts(self, phi) -> np.ndarray:
        v = self.prop(phi).astype(np.int32)
        c = np.zeros((self.rows.count, self.n + 1), dtype=np.int32)
        np.cumsum(v, axis=1, out=c[:, 1:])
        return c

    def table(self, d: Formula) -> np.ndarray:
        key = id(d)
        hit = self.cache.get(key)
        if hit is None:
            self.keep.append(d)
            hit = self.cache[key] = self._table(d)
        return hit

    def chop(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        # boolean matrix product over the chop point; counts stay below n
        return np.matmul(left.view(np.uint8), right.view(np.uint8)) > 0

    def _table(self, d: Formula) -> np.ndarray:
        n, R = self.n, self.rows.count
        up = self.upper
        if isinstance(d, SlenCmp):
            return np.broadcast_to(up & compare(self.slen, d.op, d.const), (R, n, n))
        if isinstance(d, Pt):
            v = self.prop(d.phi)
            return v[:, :, None] & up
        if isinstance(d, Unit):
            v = self.prop(d.phi)
            unit = np.eye(n, k=1, dtype=bool)
            return v[:, :, None] & unit
        if isinstance(d, (AllButLast, All, ScountCmp, SdurCmp)):
            if isinstance(d, (AllButLast, All)):
                c = self._counts(PNot(d.phi))
            else:
                c = self._counts(d.phi)
            last = 1 if isinstance(d, (All, ScountCmp)) else 0
            idx_e = np.minimum(np.arange(n) + last, n)
            cnt = c[:, None, idx_e] - c[:, :n, None]
            if isinstance(d, (AllButLast, All)):
                return (cnt == 0) & up
            return compare(cnt, d.op, d.const) & up
        if isinstance(d, Not):
            return ~self.table(d.arg) & up
        if isinstance(d, Or):
            return self.table(d.left) | self.table(d.right)
        if isinstance(d, And):
            return self.table(d.left) & self.table(d.right)
        if isinstance(d, Chop):
            return self.chop(self.table(d.left), self.table(d.right))
        if isinstance(d, Star):
            body = self.table(d.arg)
            acc = np.broadcast_to(np.eye(n, dtype=bool), (R, n, n)).copy()
            while True:
                nxt = acc | self.chop(body, acc)
                if np.array_equal(nxt, acc):
                    return acc
                acc = nxt
        if isinstance(d, (Exists, Forall)):
            return self._quant(d)
        raise TypeError(f"not a QDDC formula: {d!r}")

    def _quant(self, d) -> np.ndarray:
        reduce = np.any if isinstance(d, Exists) else np.all
        rows = self.rows
        n = self.n
        if rows.covers(d.var):
            # the bound variable ranges over exactly the axes of the shadowed one
            body = self.table(d.body).reshape(rows.shape + [n, n])
            axes = tuple(i for i, a in enumerate(rows.axes) if a[0] == d.var)
            red = reduce(body, axis=axes, keepdims=True)
            return np.broadcast_to(red, rows.shape + [n, n]).reshape(rows.count, n, n)
        inner = BatchOracle(rows.extend(d.var))
        body = inner.table(d.body).reshape(rows.count, 1 << n, n, n)
        return reduce(body, axis=1)

    def words(self, d: Formula) -> np.ndarray:
        """σ ⊨ D for every row."""
        return self.table(d)[:, 0, self.n - 1]


def sat_all_words(d: Formula, sigma: Sequence[str], n: int) -> np.ndarray:
    """Verdicts for all words of length ``n``, indexed by the word's big-endian code."""
    return BatchOracle(Rows.cube(sigma, n)).words(d)


def sat_all_words_upto(d: Formula, sigma: Sequence[str], n: int) -> dict[int, np.ndarray]:
    """``sat_all_words`` for every length 1..n from one table: a length-m word
    is read as the interval [0, m-1] of its extension by all-false letters."""
    table = BatchOracle(Rows.cube(sigma, n)).table(d)
    k = len(sigma)
    out = {}
    for m in range(1, n + 1):
        idx = np.arange(1 << (k * m), dtype=np.int64) << (k * (n - m))
        out[m] = table[idx, 0, m - 1]
    return out


def sat_word_batch(word: Word, d: Formula) -> bool:
    return bool(BatchOracle(Rows.of_words([word])).words(d)[0])


# -- SeCeNL -----------------------------------------------------------------

class _Nominal:
    """Tables of nominated bodies over (rows, ν-axes..., b, e) with a fixed nominal order."""

    def __init__(self, rows: Rows, order: Sequence[str]):
        self.rows = rows
        self.order = list(order)
        self.n = rows.n

    def table(self, d: Nominated) -> np.ndarray:
        n, W = self.n, self.rows.count
        mine = [u for u in self.order if u in d.noms]
        m = len(mine)
        P = n ** m
        cols = {v: np.repeat(c, P, axis=0) for v, c in self.rows.cols.items() if v not in d.noms}
        if m:
            place = np.array(list(itertools.product(range(n), repeat=m)), dtype=np.int64).reshape(P, m)
            for j, u in enumerate(mine):
                onehot = place[:, j, None] == np.arange(n)[None, :]
                cols[u] = np.tile(onehot, (W, 1))
        tab = BatchOracle(Rows.explicit(cols, n, W * P)).table(d.body)
        shape = [W] + [n if u in d.noms else 1 for u in self.order] + [n, n]
        return tab.reshape(shape)

    def valid(self, noms: Iterable[str]) -> np.ndarray:
        """Mask over (1, ν-axes..., b, e): every nominal of ``noms`` lies in [b, e]."""
        n = self.n
        k = len(self.order)
        out = np.ones([1] * (k + 1) + [n, n], dtype=bool)
        pos = np.arange(n)
        for u in noms:
            j = self.order.index(u)
            shape = [1] * (k + 1) + [n, n]
            shape[j + 1] = n
            p = pos.reshape(n, 1, 1)
            inside = (pos[None, :, None] <= p) & (p <= pos[None, None, :])
            out = out & inside.reshape(shape)
        return out

    def axes_of(self, noms: Iterable[str]) -> tuple[int, ...]:
        noms = set(noms)
        return tuple(j + 1 for j, u in enumerate(self.order) if u in noms)


def _focc(t: np.ndarray) -> np.ndarray:
    """Keep [j, k] only when no [j, k'] with k' < k holds."""
    earlier = np.zeros_like(t)
    earlier[..., 1:] = np.logical_or.accumulate(t, axis=-1)[..., :-1]
    return t & ~earlier


def _upto(t: np.ndarray) -> np.ndarray:
    """[j, k] holds some [j, l] with l <= k."""
    return np.logical_or.accumulate(t, axis=-1)


def _reduce_any(t: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
    return t.any(axis=axes, keepdims=True) if axes else t


def _flat_any(t: np.ndarray, W: int) -> np.ndarray:
    return np.broadcast_to(t, (W,) + t.shape[1:]).reshape(W, -1).any(axis=1)


def _atom_verdicts(z: SeCeNL, rows: Rows) -> np.ndarray:
    n, W = rows.n, rows.count
    if isinstance(z, Plain):
        return BatchOracle(rows).words(z.d)
    ds = operands(z)
    order = sorted(set().union(*(d.noms for d in ds)))
    ctx = _Nominal(rows, order)
    tabs = [ctx.table(d) for d in ds]
    sats = [t & ctx.valid(d.noms) for t, d in zip(tabs, ds)]

    if isinstance(z, Pref):
        s = _reduce_any(sats[0], ctx.axes_of(ds[0].noms))
        s = np.broadcast_to(s, (W,) + s.shape[1:]).reshape(W, -1, n, n)[:, 0, 0, :]
        return s.all(axis=1)
    if isinstance(z, Anti):
        return ~_flat_any(sats[0], W)
    if isinstance(z, Init):
        d1, d2 = ds
        e1 = _reduce_any(_upto(sats[0][..., 0:1, :]), ctx.axes_of(d1.noms - d2.noms))
        viol = sats[1][..., 0:1, :] & ~e1
        return ~_flat_any(viol, W)
    if isinstance(z, Implies):
        d1, d2 = ds
        e2 = _reduce_any(sats[1], ctx.axes_of(d2.noms - d1.noms))
        return ~_flat_any(sats[0] & ~e2, W)
    if isinstance(z, (Follows, Triggers)):
        d1, d2, d3 = ds
        f3 = _focc(tabs[2]) & ctx.valid(d3.noms)
        g = _reduce_any(_upto(sats[1]), ctx.axes_of(d2.noms - (d1.noms | d3.noms)))
        # the antecedent matters only through the point where the D3 search starts
        if isinstance(z, Follows):
            a1 = sats[0].any(axis=-2)  # exists i: [i, j]; indexed by j
        else:
            a1 = sats[0].any(axis=-1)  # exists j: [i, j]; indexed by i
        viol = a1[..., :, None] & f3 & ~g
        return ~_flat_any(viol, W)
    raise TypeError(f"not an atomic SeCeNL formula: {z!r}")


def secenl_verdicts(z: SeCeNL, rows: Rows) -> np.ndarray:
    if isinstance(z, SNot):
        return ~secenl_verdicts(z.arg, rows)
    if isinstance(z, SAnd):
        return secenl_verdicts(z.left, rows) & secenl_verdicts(z.right, rows)
    if isinstance(z, SOr):
        return secenl_verdicts(z.left, rows) | secenl_verdicts(z.right, rows)
    return np.broadcast_to(_atom_verdicts(z, rows), (rows.count,))


def sat_secenl(word: Word, z: SeCeNL) -> bool:
    return bool(secenl_verdicts(z, Rows.of_words([word]))[0])


def sat_secenl_all_words(z: SeCeNL, sigma: Sequence[str], n: int) -> np.ndarray:
    return secenl_verdicts(z, Rows.cube(sigma, n))


def _valuations(noms: Iterable[str], lo: int, hi: int, fixed: Mapping[str, int]):
    """Every ν over [lo, hi] on ``noms`` that agrees with ``fixed``."""
    noms = sorted(noms)
    free = [u for u in noms if u not in fixed]
    for pos in itertools.product(range(lo, hi + 1), repeat=len(free)):
        nu = {u: fixed[u] for u in noms if u in fixed}
        if any(not lo <= v <= hi for v in nu.values()):
            continue
        nu.update(zip(free, pos))
        yield nu


def _holds(word: Word, d: Nominated, b: int, e: int, nu: Mapping[str, int]) -> bool:
    mine = {u: nu[u] for u in d.noms}
    return sat_interval(nominal_word(word, mine), (b, e), d.body)


def _first(word: Word, d: Nominated, j: int, k: int, nu: Mapping[str, int]) -> bool:
    return _holds(word, d, j, k, nu) and not any(_holds_raw(word, d, j, kk, nu) for kk in range(j, k))


def _holds_raw(word: Word, d: Nominated, b: int, e: int, nu: Mapping[str, int]) -> bool:
    # focc looks at σ_ν with ν fixed, whether or not ν lies inside [b, e]
    return sat_interval(nominal_word(word, {u: nu[u] for u in d.noms}), (b, e), d.body)


def sat_secenl_literal(word: Word, z: SeCeNL) -> bool:
    """Clause-by-clause reading of the operator semantics, for small words only."""
    if isinstance(z, SNot):
        return not sat_secenl_literal(word, z.arg)
    if isinstance(z, SAnd):
        return sat_secenl_literal(word, z.left) and sat_secenl_literal(word, z.right)
    if isinstance(z, SOr):
        return sat_secenl_literal(word, z.left) or sat_secenl_literal(word, z.right)
    if isinstance(z, Plain):
        return sat_word(word, z.d)
    n = len(word)
    if isinstance(z, Pref):
        return all(any(_holds(word, z.d, 0, j, nu) for nu in _valuations(z.d.noms, 0, j, {}))
                   for j in range(n))
    if isinstance(z, Anti):
        return not any(_holds(word, z.d, i, j, nu)
                       for i in range(n) for j in range(i, n) for nu in _valuations(z.d.noms, i, j, {}))
    if isinstance(z, Init):
        for j in range(n):
            for nu in _valuations(z.d2.noms, 0, j, {}):
                if _holds(word, z.d2, 0, j, nu) and not any(
                        _holds(word, z.d1, 0, k, nu1)
                        for k in range(j + 1) for nu1 in _valuations(z.d1.noms, 0, k, nu)):
                    return False
        return True
    if isinstance(z, Implies):
        for i in range(n):
            for j in range(i, n):
                for nu in _valuations(z.d1.noms, i, j, {}):
                    if _holds(word, z.d1, i, j, nu) and not any(
                            _holds(word, z.d2, i, j, nu2) for nu2 in _valuations(z.d2.noms, i, j, nu)):
                        return False
        return True
    if isinstance(z, (Follows, Triggers)):
        for i in range(n):
            for j in range(i, n):
                for nu1 in _valuations(z.d1.noms, i, j, {}):
                    if not _holds(word, z.d1, i, j, nu1):
                        continue
                    start = j if isinstance(z, Follows) else i
                    for k in range(start, n):
                        for nu2 in _valuations(z.d3.noms, start, k, nu1):
                            if not _first(word, z.d3, start, k, nu2):
                                continue
                            both = {**nu1, **nu2}
                            if not any(_holds(word, z.d2, start, l, nu3)
                                       for l in range(start, k + 1)
                                       for nu3 in _valuations(z.d2.noms, start, l, both)):
                                return False
        return True
    raise TypeError(f"not a SeCeNL formula: {z!r}")


# -- timing diagrams --------------------------------------------------------

def sat_timing_diagram(word: Word, interval: tuple[int, int], nu: Mapping[str, int], td: TimingDiagram,
                       strict: bool = False) -> bool:
    """σ, [b, e] ⊨_ν T: every waveform on its signal, and ν ⊨ C."""
    b, e = interval
    missing = td.theta - set(nu)
    if missing:
        raise ValueError(f"valuation misses nominals {sorted(missing)}")
    cols = _columns(word)
    for p, w in td.waves:
        bits = None
        if p is not None:
            bits = [bool(eval_prop(p, {v: c[i] for v, c in cols.items()})) for i in range(len(word))]
        if not sat_waveform(bits, b, e, nu, w, strict):
            return False
    return sat_constraints(nu, td.constraints)


def td_tables(td: TimingDiagram, rows: Rows, order: Sequence[str], strict: bool = False) -> np.ndarray:
    """Vectorised waveform semantics: (W, ν-axes (size n each, in ``order``), b, e).

    A reachability sweep over cells, written directly from the waveform
    clauses; it shares no code with ξ or the QDDC oracle.
    """
    n, W = rows.n, rows.count
    k = len(order)
    pos = np.arange(n)
    result = np.ones([W] + [n] * k + [n, n], dtype=bool)
    # one-hot valuation masks: at[u][..., i] == (ν(u) == i)
    def at(u: str) -> np.ndarray:
        shape = [1] * (k + 1) + [n]
        shape[order.index(u) + 1] = n
        return (pos[:, None] == pos[None, :]).reshape(shape)

    for p, w in td.waves:
        bits = None if p is None else np.broadcast_to(np.asarray(eval_prop(p, rows.cols), dtype=bool), (W, n))
        ok = [_cell_table(cell, bits, n, W) for cell in w.cells]  # (W, n, n) each
        for b in range(n):
            reach = np.zeros([W] + [n] * k + [n], dtype=bool)
            reach[..., b] = True
            for idx, cell in enumerate(w.cells):
                for u in cell.markers:
                    reach = reach & at(u)
                step = ok[idx]
                if strict and idx > 0:
                    step = step & ~np.eye(n, dtype=bool)
                step = step.reshape([W] + [1] * k + [n, n])
                nxt = np.zeros_like(reach)
                for i in range(n):
                    nxt |= reach[..., i:i + 1] & step[..., i, :]
                reach = nxt
            result[..., b, :] &= reach
    if td.constraints:
        grid = np.array(list(itertools.product(range(n), repeat=k)), dtype=np.int64).reshape(-1, k)
        okc = np.ones(len(grid), dtype=bool)
        for c in td.constraints:
            diff = grid[:, order.index(c.b)] - grid[:, order.index(c.a)]
            okc &= np.array([c.bound.contains(int(x)) for x in diff], dtype=bool)
        result &= okc.reshape([1] + [n] * k + [1, 1])
    return result & (pos[:, None] <= pos[None, :])


def _cell_table(cell: Cell, bits: np.ndarray | None, n: int, W: int) -> np.ndarray:
    pos = np.arange(n)
    b, e = pos[:, None], pos[None, :]
    if not cell.stutter:
        unit = e == b + 1
        if cell.symbol in ("2", "x"):
            return np.broadcast_to(unit, (W, n, n))
        if bits is None:
            raise ValueError("@null waveforms may only use 2 and x symbols")
        v = bits if cell.symbol == "1" else ~bits
        return v[:, :, None] & unit
    if cell.symbol == "2":
        return np.broadcast_to(b <= e, (W, n, n))
    if bits is None:
        raise ValueError("@null waveforms may only use 2 and x symbols")

    def all_of(v: np.ndarray) -> np.ndarray:
        c = np.zeros((W, n + 1), dtype=np.int32)
        np.cumsum(~v, axis=1, out=c[:, 1:])
        return ((c[:, None, :n] - c[:, :n, None]) == 0) & (b <= e)  # positions b..e-1

    if cell.symbol == "1":
        return all_of(bits)
    if cell.symbol == "0":
        return all_of(~bits)
    return all_of(bits) | all_of(~bits)
