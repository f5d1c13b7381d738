"""Exact independent-set counting.

Three routes that share no code path beyond the graph type:

* ``count_brute`` / ``independence_polynomial`` enumerate every vertex subset
  with packed-bit edge tests (numpy, blocked above 20 vertices);
* ``count_fast`` branches on a maximum-degree vertex,
  ``i(G) = i(G - v) + i(G - N[v])``, multiplies over components and memoises
  on the vertex mask;
* ``count_via_summation_trick`` sums left-side counts over the independent
  sets of the right side of a partial join.

All results are Python ints.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Callable, Iterator

import numpy as np

from .errors import CeilingExceeded
from .graph_core import CliqueUnion, Graph, PartialJoinSpec, bits, induced_subgraph

BRUTE_CEILING = 30
EXACT_SEARCH_CEILING = 20
SUMMATION_RIGHT_CEILING = 24
_LOW_BITS = 20


# subset enumeration ---------------------------------------------------------

@lru_cache(maxsize=None)
def _popcounts(n: int) -> np.ndarray:
    pc = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        pc = np.concatenate([pc, pc + 1])
    return pc


def independent_indicator(g: Graph) -> np.ndarray:
    """Boolean array over all ``2**n`` subsets; entry ``W`` says whether W is independent.

    Built by doubling: subset ``W | {b}`` with ``W < 2**b`` is independent iff W
    is and ``adj[b] & W == 0``.  Intended for n up to about 24.
    """
    ind = np.ones(1, dtype=bool)
    for b in range(g.n):
        lower = g.adj[b] & ((1 << b) - 1)
        idx = np.arange(1 << b, dtype=np.int64)
        ind = np.concatenate([ind, ind & ((idx & lower) == 0)])
    return ind


def _independent_blocks(g: Graph) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(popcount of high part, indicator over low subsets)`` for every
    independent high-part pattern.  Low part is the first ``_LOW_BITS`` vertices."""
    low = min(g.n, _LOW_BITS)
    low_full = (1 << low) - 1
    low_graph = Graph(low, tuple(row & low_full for row in g.adj[:low]))
    ind_low = independent_indicator(low_graph)
    high = g.n - low
    if high == 0:
        yield 0, ind_low
        return
    idx = np.arange(1 << low, dtype=np.int64)
    for hp in range(1 << high):
        hmask = hp << low
        if not g.is_independent(hmask):
            continue
        forbidden = 0
        for v in bits(hmask):
            forbidden |= g.adj[v]
        forbidden &= low_full
        block = ind_low if forbidden == 0 else ind_low & ((idx & forbidden) == 0)
        yield hp.bit_count(), block


def _check_brute(g: Graph, ceiling: int):
    if g.n > ceiling:
        raise CeilingExceeded(f"{g.n} vertices exceeds the enumeration ceiling {ceiling}")


def count_brute(g: Graph, ceiling: int = BRUTE_CEILING) -> int:
    _check_brute(g, ceiling)
    return sum(int(np.count_nonzero(block)) for _, block in _independent_blocks(g))


def _poly_direct(g: Graph) -> list[int]:
    low = min(g.n, _LOW_BITS)
    pc = _popcounts(low)
    coeffs = np.zeros(g.n + 1, dtype=np.int64)
    for hpop, block in _independent_blocks(g):
        counts = np.bincount(pc[block], minlength=low + 1)
        coeffs[hpop:hpop + low + 1] += counts
    out = [int(c) for c in coeffs]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def poly_multiply(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def independence_polynomial(g: Graph, ceiling: int = BRUTE_CEILING) -> list[int]:
    """Coefficients ``[i_0, i_1, ..., i_alpha]``.

    Graphs above the ceiling are split into connected components, each of
    which must fit under it; the component polynomials are multiplied.
    """
    if g.n <= ceiling:
        return _poly_direct(g)
    out = [1]
    for comp in connected_components(g):
        sub = induced_subgraph(g, comp)
        _check_brute(sub, ceiling)
        out = poly_multiply(out, _poly_direct(sub))
    return out


def connected_components(g: Graph, mask: int | None = None) -> list[int]:
    """Vertex masks of the components of ``g[mask]``, ordered by lowest vertex."""
    remaining = g.full_mask if mask is None else mask
    comps = []
    while remaining:
        comp = _component_of(g.adj, remaining & -remaining, remaining)
        comps.append(comp)
        remaining &= ~comp
    return comps


def _component_of(adj, seed: int, mask: int) -> int:
    comp = frontier = seed
    while frontier:
        reach = 0
        for v in bits(frontier):
            reach |= adj[v]
        frontier = reach & mask & ~comp
        comp |= frontier
    return comp


# branching engine -----------------------------------------------------------

class SubsetCounter:
    """``i(G[mask])`` for masks of one fixed graph, memoised on the mask."""

    def __init__(self, g: Graph):
        self.g = g
        self.adj = g.adj
        self.memo: dict[int, int] = {}

    def __call__(self, mask: int | None = None) -> int:
        return self.count(self.g.full_mask if mask is None else mask)

    def count(self, mask: int) -> int:
        if mask == 0:
            return 1
        hit = self.memo.get(mask)
        if hit is not None:
            return hit
        adj = self.adj
        isolated = 0
        for v in bits(mask):
            if not adj[v] & mask:
                isolated |= 1 << v
        rest = mask & ~isolated
        factor = 1 << isolated.bit_count()
        if rest == 0:
            result = factor
        else:
            comp = _component_of(adj, rest & -rest, rest)
            if comp != rest:
                result = factor * self.count(comp) * self.count(rest & ~comp)
            else:
                result = factor * self._branch(rest)
        self.memo[mask] = result
        return result

    def _branch(self, mask: int) -> int:
        adj = self.adj
        pivot, best = -1, -1
        for v in bits(mask):
            deg = (adj[v] & mask).bit_count()
            if deg > best:
                pivot, best = v, deg
        pbit = 1 << pivot
        return self.count(mask & ~pbit) + self.count(mask & ~(adj[pivot] | pbit))


def count_fast(g: Graph) -> int:
    return SubsetCounter(g)()


# summation over the right class ---------------------------------------------

def partial_transversals(cu: CliqueUnion) -> Iterator[tuple[int, ...]]:
    """All partial transversals, as tuples of right-vertex indices."""
    choices = [(None,) + tuple(block) for block in cu.blocks]
    for pick in itertools.product(*choices):
        yield tuple(v for v in pick if v is not None)


def _independent_sets(g: Graph, ceiling: int) -> Iterator[tuple[int, ...]]:
    if g.n > ceiling:
        raise CeilingExceeded(
            f"right class has {g.n} vertices; enumeration ceiling is {ceiling}"
        )
    ind = independent_indicator(g)
    for mask in np.flatnonzero(ind):
        yield tuple(bits(int(mask)))


def right_independent_sets(spec: PartialJoinSpec, ceiling: int = SUMMATION_RIGHT_CEILING):
    if isinstance(spec.right, CliqueUnion):
        return partial_transversals(spec.right)
    return _independent_sets(spec.right, ceiling)


def summation_terms(
    spec: PartialJoinSpec,
    inner: Callable[[int], int] | None = None,
    ceiling: int = SUMMATION_RIGHT_CEILING,
) -> Iterator[tuple[tuple[int, ...], int, int]]:
    """Yield ``(S_R, surviving left mask, i(G_L[surviving]))`` per independent S_R."""
    inner = inner or SubsetCounter(spec.left)
    full = spec.left.full_mask
    nbrs = spec.neighbors
    for s_r in right_independent_sets(spec, ceiling):
        covered = 0
        for w in s_r:
            covered |= nbrs[w]
        left = full & ~covered
        yield s_r, left, inner(left)


def count_via_summation_trick(spec: PartialJoinSpec, ceiling: int = SUMMATION_RIGHT_CEILING) -> int:
    return sum(term for _, _, term in summation_terms(spec, ceiling=ceiling))


# cover and matching numbers -------------------------------------------------

def _check_exact(g: Graph, ceiling: int):
    if g.n > ceiling:
        raise CeilingExceeded(f"{g.n} vertices exceeds the exact-search ceiling {ceiling}")


def independence_number(g: Graph, ceiling: int = EXACT_SEARCH_CEILING) -> int:
    _check_exact(g, ceiling)
    adj = g.adj
    memo: dict[int, int] = {}

    def alpha(mask: int) -> int:
        if mask == 0:
            return 0
        if mask in memo:
            return memo[mask]
        pivot, best = -1, -1
        for v in bits(mask):
            deg = (adj[v] & mask).bit_count()
            if deg > best:
                pivot, best = v, deg
        if best == 0:
            res = mask.bit_count()
        else:
            pbit = 1 << pivot
            res = max(alpha(mask & ~pbit), 1 + alpha(mask & ~(adj[pivot] | pbit)))
        memo[mask] = res
        return res

    return alpha(g.full_mask)


def vertex_cover_number(g: Graph, ceiling: int = EXACT_SEARCH_CEILING) -> int:
    # complements of independent sets are exactly the vertex covers
    return g.n - independence_number(g, ceiling)


def matching_number(g: Graph, ceiling: int = EXACT_SEARCH_CEILING) -> int:
    _check_exact(g, ceiling)
    adj = g.adj
    memo: dict[int, int] = {}

    def nu(mask: int) -> int:
        if mask == 0:
            return 0
        if mask in memo:
            return memo[mask]
        low = mask & -mask
        v = low.bit_length() - 1
        rest = mask ^ low
        best = nu(rest)
        for u in bits(adj[v] & rest):
            best = max(best, 1 + nu(rest & ~(1 << u)))
        memo[mask] = best
        return best

    return nu(g.full_mask)
