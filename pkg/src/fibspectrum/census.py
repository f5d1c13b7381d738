"""Exhaustive value census over labelled graphs, and the numeric upper-bound pieces.

Enumeration works level by level.  For each labelled graph ``g`` on the first
``k`` vertices we keep the table ``T_g[W] = i(g[W])``.  Adding vertex ``k``
with lower neighbourhood ``N`` gives ``T[W + k] = T_g[W] + T_g[W - N]``.  In
graph6 edge order the neighbourhood of the last vertex occupies the top
``n - 1`` bits of the edge mask, so the final level is split across workers
by those high-order bits; every worker reads the shared level ``n - 1``
table and returns a private bitmap of values.
"""

from __future__ import annotations

import math
import multiprocessing as mp
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import CeilingExceeded
from .spectra import ValueSet

CENSUS_CEILING = 8
AUDIT_CEILING = 7


def _pairs(k: int) -> int:
    return k * (k - 1) // 2


def _check(n: int, ceiling: int):
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > ceiling:
        raise CeilingExceeded(f"n = {n} exceeds the census ceiling {ceiling}")


def _extend_counts(table: np.ndarray, k: int) -> np.ndarray:
    """Level ``k`` table ``(graphs, 2^k)`` to level ``k + 1`` ``(graphs * 2^k, 2^(k+1))``.

    Row order of the result is ``g + N * graphs``, matching the edge mask
    ``g | N << C(k, 2)``.
    """
    graphs, width = table.shape
    idx = np.arange(width)
    out = np.empty((width, graphs, 2 * width), dtype=table.dtype)
    out[:, :, :width] = table[None, :, :]
    for nb in range(width):
        out[nb, :, width:] = table + table[:, idx & ~nb]
    return out.reshape(width * graphs, 2 * width)


def count_tables(k: int) -> np.ndarray:
    """``T[g, W] = i(g[W])`` for every labelled graph g on k vertices, indexed by edge mask."""
    dtype = np.uint8 if k <= 7 else np.uint16
    table = np.ones((1, 1), dtype=dtype)
    for level in range(k):
        table = _extend_counts(table, level)
    return table


_SHARED: dict = {}


def _final_slice(args) -> tuple[np.ndarray, dict[int, int] | None]:
    lo, hi, want_witness = args
    table = _SHARED["table"]
    n = _SHARED["n"]
    width = table.shape[1]
    full = width - 1
    off = _pairs(n - 1)
    seen = np.zeros((1 << n) + 1, dtype=bool)
    witness: dict[int, int] | None = {} if want_witness else None
    top = table[:, full].astype(np.int32)
    for nb in range(lo, hi):
        vals = top + table[:, full & ~nb]
        if want_witness:
            uniq, first = np.unique(vals, return_index=True)
            for v, g in zip(uniq.tolist(), first.tolist()):
                if v not in witness:
                    witness[v] = g | nb << off
            seen[uniq] = True
        else:
            seen[vals] = True
    return seen, witness


def _ranges(total: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, total))
    step = -(-total // parts)
    return [(lo, min(lo + step, total)) for lo in range(0, total, step)]


@dataclass
class CensusResult:
    n: int
    values: ValueSet
    elapsed: float
    graphs: int
    witnesses: dict[int, int] | None = field(default=None, repr=False)

    @property
    def count(self) -> int:
        return len(self.values)

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "values": list(self.values),
            "Ni": self.count,
            "graphs": str(self.graphs),
            "elapsed": round(self.elapsed, 4),
        }
        if self.witnesses is not None:
            out["witnesses"] = {str(v): str(m) for v, m in sorted(self.witnesses.items())}
        return out


def census(n: int, parallelism: int = 1, witnesses: bool = False, ceiling: int = CENSUS_CEILING) -> CensusResult:
    """All values ``i(G)`` over the ``2^C(n,2)`` labelled graphs on n vertices.

    Witnesses, when asked for, are the least edge mask (graph6 order) per value.
    """
    _check(n, ceiling)
    start = time.perf_counter()
    if n == 0:
        return CensusResult(0, ValueSet([1]), 0.0, 1, {1: 0} if witnesses else None)
    _SHARED["table"] = count_tables(n - 1)
    _SHARED["n"] = n
    try:
        tasks = [(lo, hi, witnesses) for lo, hi in _ranges(1 << (n - 1), parallelism)]
        if parallelism > 1 and len(tasks) > 1:
            ctx = mp.get_context("fork")
            with ctx.Pool(parallelism) as pool:
                parts = pool.map(_final_slice, tasks)
        else:
            parts = [_final_slice(t) for t in tasks]
    finally:
        _SHARED.clear()
    seen = np.logical_or.reduce([p[0] for p in parts])
    wit = None
    if witnesses:
        wit = {}
        for _, w in parts:
            for v, m in w.items():
                if v not in wit or m < wit[v]:
                    wit[v] = m
    values = ValueSet(np.flatnonzero(seen).tolist())
    return CensusResult(n, values, time.perf_counter() - start, 1 << _pairs(n), wit)


def census_csv(results: Sequence[CensusResult]) -> str:
    lines = ["n,Ni"] + [f"{r.n},{r.count}" for r in results]
    return "\n".join(lines) + "\n"


# matching bound -------------------------------------------------------------

def _extend_matching(table: np.ndarray, k: int) -> np.ndarray:
    """Same layout as ``_extend_counts`` for ``nu(g[W])``."""
    graphs, width = table.shape
    idx = np.arange(width)
    out = np.empty((width, graphs, 2 * width), dtype=table.dtype)
    out[:, :, :width] = table[None, :, :]
    for nb in range(width):
        best = table.copy()
        for u in range(k):
            if nb >> u & 1:
                has_u = (idx >> u & 1).astype(bool)
                cand = table[:, idx & ~(1 << u)] + 1
                best = np.where(has_u[None, :], np.maximum(best, cand), best)
        out[nb, :, width:] = best
    return out.reshape(width * graphs, 2 * width)


def matching_tables(k: int) -> np.ndarray:
    table = np.zeros((1, 1), dtype=np.uint8)
    for level in range(k):
        table = _extend_matching(table, level)
    return table


@dataclass
class MatchingAudit:
    n: int
    graphs: int
    violations: int
    max_ratio: Fraction
    witness: int  # edge mask attaining the max ratio (least such mask)
    tight: int  # graphs with i(G) equal to the bound

    @property
    def holds(self) -> bool:
        return self.violations == 0

    def to_json(self) -> dict:
        return {
            "n": self.n, "graphs": str(self.graphs), "violations": self.violations,
            "max_ratio": str(self.max_ratio), "witness": str(self.witness), "tight": self.tight,
        }


def matching_bound(n: int, nu: int) -> int:
    return 3**nu * 2 ** (n - 2 * nu)


def matching_bound_audit(n: int, ceiling: int = AUDIT_CEILING) -> MatchingAudit:
    """Check ``i(G) <= 3^nu 2^(n - 2 nu)`` over every labelled graph on n vertices."""
    _check(n, ceiling)
    if n == 0:
        return MatchingAudit(0, 1, 0, Fraction(1), 0, 1)
    counts = count_tables(n - 1).astype(np.int64)
    match = matching_tables(n - 1).astype(np.int64)
    width = counts.shape[1]
    full = width - 1
    off = _pairs(n - 1)
    bound_of = np.array([matching_bound(n, v) for v in range(n // 2 + 1)], dtype=np.int64)
    violations = tight = 0
    best: tuple[Fraction, int] | None = None
    for nb in range(width):
        i_vals = counts[:, full] + counts[:, full & ~nb]
        nu = match[:, full].copy()
        for u in range(n - 1):
            if nb >> u & 1:
                nu = np.maximum(nu, match[:, full & ~(1 << u)] + 1)
        bound = bound_of[nu]
        violations += int(np.count_nonzero(i_vals > bound))
        tight += int(np.count_nonzero(i_vals == bound))
        # cross-multiplied ratio comparison keeps the argmax exact
        ratio = i_vals / bound
        g = int(np.flatnonzero(ratio == ratio.max())[0])
        cand = Fraction(int(i_vals[g]), int(bound[g]))
        if best is None or cand > best[0]:
            best = (cand, g | nb << off)
    return MatchingAudit(n, 1 << _pairs(n), violations, best[0], best[1], tight)


# entropy and the upper bound ------------------------------------------------

def binary_entropy(p: float) -> float:
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    if p in (0, 1):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def entropy_exponent(mu: float) -> float:
    """``(1 + 2 mu) H(1 / (1 + 2 mu))``, the growth rate of low-cover graph counts."""
    return (1 + 2 * mu) * binary_entropy(1 / (1 + 2 * mu))


def solve_mu0() -> float:
    """Positive root of ``entropy_exponent(mu) = 1``."""
    return brentq(lambda mu: entropy_exponent(mu) - 1, 0.01, 0.5, xtol=1e-15)


def entropy_power(n: int, k: int) -> Fraction:
    """``2^(n H(k/n))`` exactly: ``n^n / (k^k (n-k)^(n-k))`` with ``0^0 = 1``."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    return Fraction(n**n, k**k * (n - k) ** (n - k))


def entropy_sandwich_holds(n: int, k: int) -> bool:
    """``2^(nH)/(n+1) <= C(n, k) <= 2^(nH)`` in exact arithmetic."""
    e = entropy_power(n, k)
    c = math.comb(n, k)
    return e / (n + 1) <= c <= e


@dataclass(frozen=True)
class UpperBound:
    n: int
    mu: float
    low_cover_log2: float  # 0.99997 n
    high_cover_log2: float  # n + 0.5 log(0.75) log(mu n)
    total_log2: float
    envelope_log2: float  # n - 0.2075 log n

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def upper_bound_eval(n: int, mu: float = 0.1469, low_rate: float = 0.99997) -> UpperBound:
    """Log2 of ``2^(0.99997 n) + 2^n 2^(0.5 log(0.75) log(mu n))`` and the envelope ``n - 0.2075 log n``."""
    if n < 10:
        raise ValueError("the bound is evaluated for n >= 10")
    low = low_rate * n
    high = n + 0.5 * math.log2(0.75) * math.log2(mu * n)
    total = float(np.logaddexp2(low, high))
    return UpperBound(n, mu, low, high, total, n - 0.2075 * math.log2(n))
