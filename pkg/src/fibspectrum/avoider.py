"""Point sets in F_2^n built from graphs, and exhaustive flat checking.

A vector ``x`` is an n-bit word; bit ``u`` is coordinate ``x_u``.  A point
set is a boolean bitmap of length ``2^n``.

Flats are enumerated in a canonical order.  Linear subspaces come in reduced
echelon form: every basis vector has a distinct leading (highest) bit, which
is clear in every other basis vector.  Offsets are the coset members with
every leading bit clear, which is the least member of each coset.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .census import census, CENSUS_CEILING
from .counting import count_fast, independent_indicator
from .errors import CeilingExceeded
from .graph_core import Graph

POINT_CEILING = 24
FLAT_CEILING = 10**7


def _check_points(n: int):
    if not 0 <= n <= POINT_CEILING:
        raise CeilingExceeded(f"n = {n} outside the point-set range [0, {POINT_CEILING}]")


@dataclass(frozen=True, eq=False)
class PointSet:
    n: int
    bitmap: np.ndarray  # bool, length 2^n

    def __post_init__(self):
        _check_points(self.n)
        if self.bitmap.shape != (1 << self.n,) or self.bitmap.dtype != bool:
            raise ValueError("bitmap must be a bool array of length 2^n")

    @classmethod
    def empty(cls, n: int) -> "PointSet":
        _check_points(n)
        return cls(n, np.zeros(1 << n, dtype=bool))

    @classmethod
    def from_points(cls, n: int, points) -> "PointSet":
        s = cls.empty(n)
        pts = np.asarray(list(points), dtype=np.int64)
        if pts.size and (pts.min() < 0 or pts.max() >= 1 << n):
            raise ValueError("point outside F_2^n")
        s.bitmap[pts] = True
        return s

    def __len__(self) -> int:
        return int(np.count_nonzero(self.bitmap))

    def __contains__(self, x: int) -> bool:
        return 0 <= x < 1 << self.n and bool(self.bitmap[x])

    def __eq__(self, other) -> bool:
        return isinstance(other, PointSet) and self.n == other.n and bool(np.array_equal(self.bitmap, other.bitmap))

    def points(self) -> list[int]:
        return np.flatnonzero(self.bitmap).tolist()

    def complement(self) -> "PointSet":
        return PointSet(self.n, ~self.bitmap)

    def to_json(self) -> dict:
        return {"n": self.n, "points": [format(x, "x") for x in self.points()]}

    @classmethod
    def from_json(cls, data: dict) -> "PointSet":
        return cls.from_points(int(data["n"]), (int(h, 16) for h in data["points"]))


def edge_flat(n: int, u: int, v: int) -> PointSet:
    """``{x : x_u = x_v = 1}``, an (n-2)-flat."""
    idx = np.arange(1 << n, dtype=np.int64)
    return PointSet(n, ((idx >> u) & (idx >> v) & 1).astype(bool))


def build_avoider(g: Graph) -> PointSet:
    """Union of the edge flats of ``g``; its complement is the family of independent sets."""
    _check_points(g.n)
    s = PointSet.empty(g.n)
    for u, v in g.edges():
        s.bitmap[edge_flat(g.n, u, v).bitmap] = True
    if not np.array_equal(~s.bitmap, independent_indicator(g)):
        raise AssertionError("avoider complement differs from the independent-set family")
    if len(s) != (1 << g.n) - count_fast(g):
        raise AssertionError("avoider size differs from 2^n - i(G)")
    return s


# flats ----------------------------------------------------------------------

def gaussian_binomial(n: int, k: int, q: int = 2) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def flat_count(n: int, k: int) -> int:
    return gaussian_binomial(n, k) << (n - k) if 0 <= k <= n else 0


@dataclass(frozen=True)
class AffineFlat:
    n: int
    basis: tuple[int, ...]
    offset: int

    def __post_init__(self):
        if self.offset >> self.n or any(b <= 0 or b >> self.n for b in self.basis):
            raise ValueError("vectors must be nonzero n-bit words")
        if _rank(self.basis) != len(self.basis):
            raise ValueError("basis is not linearly independent")

    @property
    def k(self) -> int:
        return len(self.basis)

    def points(self) -> tuple[int, ...]:
        return tuple(sorted(self.offset ^ v for v in span(self.basis)))


def _rank(vectors) -> int:
    pivots: dict[int, int] = {}
    for v in vectors:
        while v:
            top = v.bit_length() - 1
            if top not in pivots:
                pivots[top] = v
                break
            v ^= pivots[top]
    return len(pivots)


def span(basis) -> list[int]:
    out = [0]
    for b in basis:
        out += [x ^ b for x in out]
    return out


def _check_flats(n: int, k: int, ceiling: int) -> int:
    if n < 0 or k < 0:
        raise ValueError("n and k must be nonnegative")
    count = flat_count(n, k)
    if count > ceiling:
        raise CeilingExceeded(f"{count} {k}-flats in F_2^{n} exceeds the ceiling {ceiling}")
    return count


def _pivot_bases(n: int, k: int) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    """``(pivots, basis)`` for every k-dimensional subspace, in canonical order."""
    for pivots in itertools.combinations(range(n), k):
        pset = set(pivots)
        free = [[j for j in range(p) if j not in pset] for p in pivots]
        for choice in itertools.product(*(range(1 << len(f)) for f in free)):
            basis = []
            for p, f, c in zip(pivots, free, choice):
                v = 1 << p
                for i, j in enumerate(f):
                    if c >> i & 1:
                        v |= 1 << j
                basis.append(v)
            yield pivots, tuple(basis)


def _offsets(n: int, pivots) -> list[int]:
    clear = 0
    for p in pivots:
        clear |= 1 << p
    return [x for x in range(1 << n) if not x & clear]


def enumerate_flats(n: int, k: int, ceiling: int = FLAT_CEILING) -> Iterator[AffineFlat]:
    """Every k-flat of F_2^n exactly once."""
    _check_flats(n, k, ceiling)
    if k > n:
        return
    for pivots, basis in _pivot_bases(n, k):
        for off in _offsets(n, pivots):
            yield AffineFlat(n, basis, off)


@lru_cache(maxsize=8)
def flat_point_array(n: int, k: int, ceiling: int = FLAT_CEILING) -> np.ndarray:
    """``(flat_count, 2^k)`` array of flat members, rows in canonical flat order."""
    count = _check_flats(n, k, ceiling)
    dtype = np.int32 if n > 15 else np.int16
    if k > n:
        return np.zeros((0, 1 << k), dtype=dtype)
    rows = []
    by_pivots: dict[tuple, list] = {}
    for pivots, basis in _pivot_bases(n, k):
        by_pivots.setdefault(pivots, []).append(span(basis))
    for pivots, spans in by_pivots.items():
        offs = np.asarray(_offsets(n, pivots), dtype=np.int64)
        sp = np.asarray(spans, dtype=np.int64)
        rows.append((sp[:, None, :] ^ offs[None, :, None]).reshape(-1, 1 << k))
    out = np.concatenate(rows).astype(dtype)
    assert out.shape[0] == count
    out.setflags(write=False)
    return out


def flat_at(n: int, k: int, index: int) -> AffineFlat:
    """The flat at position ``index`` of the canonical order."""
    for i, f in enumerate(enumerate_flats(n, k)):
        if i == index:
            return f
    raise IndexError(index)


@dataclass(frozen=True)
class AvoiderVerdict:
    k: int
    t: int
    flats_checked: int
    violator: AffineFlat | None = None
    violator_index: int | None = None

    @property
    def passed(self) -> bool:
        return self.violator is None

    def to_json(self) -> dict:
        out = {"k": self.k, "t": self.t, "flats_checked": self.flats_checked, "passed": self.passed}
        if self.violator is not None:
            f = self.violator
            out["violator"] = {"index": self.violator_index, "basis": [format(b, "x") for b in f.basis],
                               "offset": format(f.offset, "x")}
        return out


def check_avoider(s: PointSet, k: int = 3, t: int = 1, ceiling: int = FLAT_CEILING) -> AvoiderVerdict:
    """Pass iff no k-flat meets ``s`` in exactly t points; otherwise report the first such flat."""
    if not 0 <= t <= 1 << k:
        raise ValueError("need 0 <= t <= 2^k")
    pts = flat_point_array(s.n, k, ceiling)
    hits = s.bitmap[pts].sum(axis=1) == t
    bad = np.flatnonzero(hits)
    if bad.size == 0:
        return AvoiderVerdict(k, t, pts.shape[0])
    idx = int(bad[0])
    return AvoiderVerdict(k, t, pts.shape[0], flat_at(s.n, k, idx), idx)


@dataclass
class GapReport:
    n: int
    excluded_sizes: list[int]
    avoiders_checked: bool

    @property
    def count(self) -> int:
        return len(self.excluded_sizes)

    def to_json(self) -> dict:
        return {"n": self.n, "excluded_sizes": self.excluded_sizes, "count": self.count,
                "avoiders_checked": self.avoiders_checked}


def spectrum_gap_report(n: int, verify: bool = True) -> GapReport:
    """Sizes ``2^n - i(G)`` of graph avoiders: a certified set of sizes outside Sp(n; 3, 1).

    With ``verify`` each size's witness graph is rebuilt and checked against every 3-flat.
    """
    if n > 6:
        raise CeilingExceeded(f"n = {n} exceeds the gap-report ceiling 6")
    res = census(n, witnesses=verify, ceiling=min(CENSUS_CEILING, 6))
    sizes = sorted((1 << n) - v for v in res.values)
    if verify:
        for v, mask in res.witnesses.items():
            s = build_avoider(Graph.from_edge_mask(n, mask))
            if n >= 3 and not check_avoider(s).passed:
                raise AssertionError(f"witness for size {(1 << n) - v} induces a [3,1]-flat")
    return GapReport(n, sizes, verify)
