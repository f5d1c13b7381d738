"""Digit-set calculus and partial-join spectra.

``B(J)`` is the set of naturals whose binary 1-positions lie in ``J``.  It is
kept symbolic in :class:`ShiftedDigitSet`; explicit sets are
:class:`ValueSet`.  ``spectrum_exhaustive`` evaluates ``i`` on every
cross-edge assignment between two small graphs.
"""

from __future__ import annotations

import bisect
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .counting import independent_indicator, count_fast
from .errors import CeilingExceeded
from .graph_core import CliqueUnion, Graph, PartialJoinSpec, disjoint_union, empty_graph, join_all

DIGIT_CEILING = 20
SUMSET_CEILING = 10**7
SPECTRUM_CEILING = 20
_CHUNK = 1 << 16


class ValueSet(tuple):
    """Sorted, deduplicated tuple of naturals."""

    def __new__(cls, values: Iterable[int] = ()):
        return super().__new__(cls, sorted({int(v) for v in values}))

    def __contains__(self, x) -> bool:
        i = bisect.bisect_left(self, x)
        return i < len(self) and self[i] == x

    def issubset(self, other: Iterable[int]) -> bool:
        other = other if isinstance(other, (set, frozenset, ValueSet)) else set(other)
        return all(v in other for v in self)

    def shift(self, c: int) -> "ValueSet":
        return ValueSet(v + c for v in self)

    def scale(self, k: int) -> "ValueSet":
        return ValueSet(v * k for v in self)

    def to_json(self) -> list[str]:
        return [str(v) for v in self]

    @classmethod
    def from_json(cls, data: Sequence[str | int]) -> "ValueSet":
        return cls(int(v) for v in data)


def _merge_intervals(intervals: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    out: list[list[int]] = []
    for lo, hi in sorted((int(a), int(b)) for a, b in intervals):
        if lo < 0:
            raise ValueError("digit positions must be nonnegative")
        if lo > hi:
            continue
        if out and lo <= out[-1][1] + 1:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return tuple((lo, hi) for lo, hi in out)


def _runs(positions: Iterable[int]) -> list[tuple[int, int]]:
    runs: list[list[int]] = []
    for j in sorted(set(positions)):
        if runs and j == runs[-1][1] + 1:
            runs[-1][1] = j
        else:
            runs.append([j, j])
    return [(a, b) for a, b in runs]


class ShiftedDigitSet:
    """``B(J) + offset`` with J kept as disjoint closed intervals.

    Nothing is materialised unless asked, so supports with ``2^81``
    positions are fine for membership, shifting and disjoint sums.
    """

    __slots__ = ("intervals", "offset")

    def __init__(self, support: Iterable[int] = (), offset: int = 0):
        self.intervals = _merge_intervals(_runs(support))
        self.offset = int(offset)
        if self.offset < 0:
            raise ValueError("offset must be nonnegative")

    @classmethod
    def from_intervals(cls, intervals: Iterable[tuple[int, int]], offset: int = 0) -> "ShiftedDigitSet":
        out = cls((), offset)
        out.intervals = _merge_intervals(intervals)
        return out

    @classmethod
    def interval(cls, lo: int, hi: int, offset: int = 0) -> "ShiftedDigitSet":
        return cls.from_intervals([(lo, hi)], offset)

    def __eq__(self, other) -> bool:
        return isinstance(other, ShiftedDigitSet) and (self.intervals, self.offset) == (other.intervals, other.offset)

    def __hash__(self):
        return hash((self.intervals, self.offset))

    def __repr__(self):
        return f"ShiftedDigitSet(intervals={list(self.intervals)}, offset={self.offset})"

    @property
    def size(self) -> int:
        """``|J|``, i.e. log2 of the cardinality."""
        return sum(hi - lo + 1 for lo, hi in self.intervals)

    @property
    def support(self) -> frozenset[int]:
        if self.size > DIGIT_CEILING * 50:
            raise CeilingExceeded(f"|J| = {self.size} is too large to list")
        return frozenset(j for lo, hi in self.intervals for j in range(lo, hi + 1))

    @property
    def mask(self) -> int:
        if self.intervals and self.intervals[-1][1] > 1 << 24:
            raise CeilingExceeded("support mask would be too large")
        m = 0
        for lo, hi in self.intervals:
            m |= ((1 << (hi - lo + 1)) - 1) << lo
        return m

    def _covers(self, j: int) -> bool:
        i = bisect.bisect_right(self.intervals, (j, float("inf"))) - 1
        return i >= 0 and self.intervals[i][0] <= j <= self.intervals[i][1]

    def __contains__(self, x: int) -> bool:
        y = x - self.offset
        if y < 0:
            return False
        while y:
            low = y & -y
            if not self._covers(low.bit_length() - 1):
                return False
            y ^= low
        return True

    def cardinality(self) -> int:
        if self.size > 1 << 16:
            raise CeilingExceeded(f"2^{self.size} is too large to write out; use .size")
        return 1 << self.size

    def expand(self, ceiling: int = DIGIT_CEILING) -> ValueSet:
        if self.size > ceiling:
            raise CeilingExceeded(f"|J| = {self.size} exceeds {ceiling}")
        return expand_digit_set(self.support, ceiling).shift(self.offset)

    def shifted(self, c: int) -> "ShiftedDigitSet":
        return ShiftedDigitSet.from_intervals(self.intervals, self.offset + c)

    def doubled(self, t: int) -> "ShiftedDigitSet":
        """``2**t * (B(J) + c) = B(J + t) + 2**t c``."""
        return ShiftedDigitSet.from_intervals([(a + t, b + t) for a, b in self.intervals], self.offset << t)

    def overlaps(self, other: "ShiftedDigitSet") -> bool:
        i = j = 0
        a, b = self.intervals, other.intervals
        while i < len(a) and j < len(b):
            if a[i][1] < b[j][0]:
                i += 1
            elif b[j][1] < a[i][0]:
                j += 1
            else:
                return True
        return False

    def __add__(self, other: "ShiftedDigitSet") -> "ShiftedDigitSet":
        if self.overlaps(other):
            raise ValueError("supports overlap; the sum is not a digit set")
        return ShiftedDigitSet.from_intervals(self.intervals + other.intervals, self.offset + other.offset)

    def to_json(self) -> dict:
        if self.size <= 4096:
            return {"support": sorted(self.support), "offset": str(self.offset)}
        return {"intervals": [[str(lo), str(hi)] for lo, hi in self.intervals], "offset": str(self.offset)}

    @classmethod
    def from_json(cls, data: dict) -> "ShiftedDigitSet":
        if "intervals" in data:
            return cls.from_intervals([(int(a), int(b)) for a, b in data["intervals"]], int(data["offset"]))
        return cls(frozenset(int(j) for j in data["support"]), int(data["offset"]))


def expand_digit_set(support: Iterable[int], ceiling: int = DIGIT_CEILING) -> ValueSet:
    support = sorted(set(support))
    if len(support) > ceiling:
        raise CeilingExceeded(f"|J| = {len(support)} exceeds {ceiling}")
    values = [0]
    for j in support:
        step = 1 << j
        values += [v + step for v in values]
    return ValueSet(values)


def sumset(a: Iterable[int], b: Iterable[int], ceiling: int = SUMSET_CEILING) -> ValueSet:
    a, b = ValueSet(a), ValueSet(b)
    if len(a) * len(b) > ceiling:
        raise CeilingExceeded(f"|A|*|B| = {len(a) * len(b)} exceeds {ceiling}")
    if not a or not b:
        return ValueSet()
    if a[-1] + b[-1] < 1 << 62:
        out = np.add.outer(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        return ValueSet(np.unique(out).tolist())
    return ValueSet(x + y for x in a for y in b)


# exhaustive spectra ---------------------------------------------------------

def subset_count_table(g: Graph) -> np.ndarray:
    """``T[W] = i(g[W])`` for every vertex mask W (zeta transform of the indicator)."""
    t = independent_indicator(g).astype(np.int64)
    for b in range(g.n):
        view = t.reshape(-1, 2, 1 << b)
        view[:, 1, :] += view[:, 0, :]
    return t


def _right_sets(g_r: Graph) -> list[int]:
    return [int(m) for m in np.flatnonzero(independent_indicator(g_r))]


def _chunk_values(g_l: Graph, g_r: Graph, lo: int, hi: int) -> np.ndarray:
    """``i`` for cross-edge assignments ``lo..hi-1``.

    Assignment ``a`` gives right vertex ``w`` the left neighbourhood
    ``(a >> (w * nL)) & fullL``.  Each value is the summation-trick sum over
    independent right sets, evaluated against the left count table.
    """
    nl, nr = g_l.n, g_r.n
    full = (1 << nl) - 1
    table = subset_count_table(g_l)
    a = np.arange(lo, hi, dtype=np.int64)
    nbr = [(a >> (w * nl)) & full for w in range(nr)]
    out = np.zeros(hi - lo, dtype=np.int64)
    zero = np.zeros(hi - lo, dtype=np.int64)
    for s in _right_sets(g_r):
        cover = zero
        w = 0
        while s >> w:
            if s >> w & 1:
                cover = cover | nbr[w]
            w += 1
        out += table[full & ~cover]
    return out


def _chunk_unique(args) -> np.ndarray:
    g_l, g_r, lo, hi = args
    return np.unique(_chunk_values(g_l, g_r, lo, hi))


def _as_graph(g):
    return g.graph if isinstance(g, CliqueUnion) else g


def _check_spectrum(g_l: Graph, g_r: Graph, ceiling: int) -> int:
    nbits = g_l.n * g_r.n
    if nbits > ceiling:
        raise CeilingExceeded(f"|V_L|*|V_R| = {nbits} exceeds the spectrum ceiling {ceiling}")
    return nbits


def spectrum_exhaustive(
    g_l: Graph,
    g_r: Graph | CliqueUnion,
    ceiling: int = SPECTRUM_CEILING,
    parallelism: int = 1,
) -> ValueSet:
    g_r = _as_graph(g_r)
    total = 1 << _check_spectrum(g_l, g_r, ceiling)
    tasks = [(g_l, g_r, lo, min(lo + _CHUNK, total)) for lo in range(0, total, _CHUNK)]
    if parallelism > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            parts = list(pool.map(_chunk_unique, tasks))
    else:
        parts = [_chunk_unique(t) for t in tasks]
    return ValueSet(np.unique(np.concatenate(parts)).tolist())


def decode_assignment(a: int, nl: int, nr: int) -> tuple[int, ...]:
    full = (1 << nl) - 1
    return tuple((a >> (w * nl)) & full for w in range(nr))


def find_partial_join(
    g_l: Graph, g_r: Graph | CliqueUnion, target: int, ceiling: int = SPECTRUM_CEILING
) -> PartialJoinSpec | None:
    """First cross-edge assignment (in assignment order) with ``i = target``."""
    g_r_graph = _as_graph(g_r)
    total = 1 << _check_spectrum(g_l, g_r_graph, ceiling)
    for lo in range(0, total, _CHUNK):
        vals = _chunk_values(g_l, g_r_graph, lo, min(lo + _CHUNK, total))
        hit = np.flatnonzero(vals == target)
        if hit.size:
            a = lo + int(hit[0])
            return PartialJoinSpec(g_l, g_r, decode_assignment(a, g_l.n, g_r_graph.n))
    return None


@dataclass(frozen=True)
class PaddingResult:
    t: int
    scaled: ValueSet  # 2^t * Sp(G_L, G_R): padding left unjoined
    shifted: ValueSet  # Sp(G_L, G_R) + (2^t - 1) i(G_L): padding joined to every right vertex
    padded: ValueSet  # Sp(G_L + t isolated, G_R), exhaustively

    @property
    def certified(self) -> bool:
        return self.scaled.issubset(self.padded) and self.shifted.issubset(self.padded)


def pad_left_spectrum(
    g_l: Graph, g_r: Graph | CliqueUnion, t: int, ceiling: int = SPECTRUM_CEILING
) -> PaddingResult:
    if t < 0:
        raise ValueError("t must be nonnegative")
    g_r = _as_graph(g_r)
    _check_spectrum(empty_graph(g_l.n + t), g_r, ceiling)
    base = spectrum_exhaustive(g_l, g_r, ceiling)
    padded = spectrum_exhaustive(disjoint_union(g_l, empty_graph(t)), g_r, ceiling)
    return PaddingResult(
        t=t,
        scaled=base.scale(1 << t),
        shifted=base.shift(((1 << t) - 1) * count_fast(g_l)),
        padded=padded,
    )


def combine_spectra(parts: Sequence[Iterable[int]], i_gl: int) -> ValueSet:
    """Spectrum over a full join of right parts: ``sum(parts) - (l - 1) i(G_L)``."""
    if not parts:
        raise ValueError("need at least one part")
    acc = ValueSet(parts[0])
    for p in parts[1:]:
        acc = sumset(acc, p)
    out = acc.shift(-(len(parts) - 1) * i_gl)
    if out and out[0] < 0:
        raise ValueError("negative value: parts are not spectra over the same left graph")
    return out


def full_join_spectrum(g_l: Graph, parts: Sequence[Graph | CliqueUnion], ceiling: int = SPECTRUM_CEILING) -> ValueSet:
    """Exhaustive spectrum against the full join of ``parts``."""
    return spectrum_exhaustive(g_l, join_all(parts), ceiling)
