"""Graphs as tuples of adjacency bitmasks, plus joins and graph6 I/O.

Vertices are ``0..n-1``.  Row ``adj[v]`` is an int whose bit ``u`` is set when
``uv`` is an edge.  Python ints are unbounded, so the same packed form serves
small census graphs and the 100+ vertex construction graphs alike.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Sequence


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


@dataclass(frozen=True)
class Graph:
    n: int
    adj: tuple[int, ...]

    def __post_init__(self):
        if self.n < 0 or len(self.adj) != self.n:
            raise ValueError("adjacency must have exactly n rows")
        full = (1 << self.n) - 1
        for v, row in enumerate(self.adj):
            if row & ~full:
                raise ValueError(f"vertex {v} has a neighbour outside [0, {self.n})")
            if row >> v & 1:
                raise ValueError(f"self-loop at vertex {v}")
            for u in bits(row):
                if not self.adj[u] >> v & 1:
                    raise ValueError(f"asymmetric adjacency between {u} and {v}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) outside [0, {n})")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @classmethod
    def from_edge_mask(cls, n: int, mask: int) -> "Graph":
        """Decode an edge mask in graph6 order: bit ``C(j,2) + i`` is edge ``ij`` (i < j)."""
        rows = [0] * n
        pos = 0
        for j in range(1, n):
            for i in range(j):
                if mask >> pos & 1:
                    rows[i] |= 1 << j
                    rows[j] |= 1 << i
                pos += 1
        return cls(n, tuple(rows))

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def edge_mask(self) -> int:
        mask = 0
        pos = 0
        for j in range(1, self.n):
            row = self.adj[j]
            for i in range(j):
                if row >> i & 1:
                    mask |= 1 << pos
                pos += 1
        return mask

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for v in range(self.n) for u in bits(self.adj[v] & ((1 << v) - 1))]

    @property
    def num_edges(self) -> int:
        return sum(row.bit_count() for row in self.adj) // 2

    def degree_sequence(self) -> list[int]:
        return sorted((row.bit_count() for row in self.adj), reverse=True)

    def is_independent(self, mask: int) -> bool:
        return all(not (self.adj[v] & mask) for v in bits(mask))

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.edges()})"


@dataclass(frozen=True)
class CliqueUnion:
    """A disjoint union of cliques with its block layout kept explicitly.

    ``blocks[j]`` lists the vertices of the j-th clique.  Block and member
    indices here are 0-based; ``vertex(j, k)`` is the 1-based ``w_{j+1,k+1}``.
    """

    graph: Graph
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen = set()
        for block in self.blocks:
            for v in block:
                if v in seen:
                    raise ValueError(f"vertex {v} appears in two blocks")
                seen.add(v)
        if seen != set(range(self.graph.n)):
            raise ValueError("blocks must partition the vertex set")
        for block in self.blocks:
            bm = mask_of(block)
            for v in block:
                if self.graph.adj[v] != bm & ~(1 << v):
                    raise ValueError(f"block containing {v} is not an isolated clique")

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def vertex(self, j: int, k: int) -> int:
        return self.blocks[j][k]


@dataclass(frozen=True)
class PartialJoinSpec:
    """Left graph, right graph and the left-neighbourhood mask of each right vertex."""

    left: Graph
    right: Graph | CliqueUnion
    neighbors: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not self.neighbors:
            object.__setattr__(self, "neighbors", (0,) * self.right_graph.n)
        if len(self.neighbors) != self.right_graph.n:
            raise ValueError("need one neighbour mask per right vertex")
        full = self.left.full_mask
        for w, nb in enumerate(self.neighbors):
            if nb < 0 or nb & ~full:
                raise ValueError(
                    f"neighbour set of right vertex {w} references indices outside the left class"
                )

    @property
    def right_graph(self) -> Graph:
        return self.right.graph if isinstance(self.right, CliqueUnion) else self.right

    @property
    def n(self) -> int:
        return self.left.n + self.right_graph.n

    def left_vertices(self) -> int:
        return self.left.full_mask

    def right_vertices(self) -> int:
        return ((1 << self.right_graph.n) - 1) << self.left.n


def empty_graph(n: int) -> Graph:
    if n < 0:
        raise ValueError("n must be nonnegative")
    return Graph(n, (0,) * n)


def complete_graph(n: int) -> Graph:
    if n < 0:
        raise ValueError("n must be nonnegative")
    full = (1 << n) - 1
    return Graph(n, tuple(full & ~(1 << v) for v in range(n)))


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((v, v + 1) for v in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycles need at least 3 vertices")
    return Graph.from_edges(n, [(v, (v + 1) % n) for v in range(n)])


def disjoint_cliques(sizes: Sequence[int]) -> CliqueUnion:
    if not sizes or any(s < 1 for s in sizes):
        raise ValueError("block sizes must be a nonempty list of positive integers")
    rows = []
    blocks = []
    start = 0
    for s in sizes:
        bm = ((1 << s) - 1) << start
        rows.extend(bm & ~(1 << v) for v in range(start, start + s))
        blocks.append(tuple(range(start, start + s)))
        start += s
    return CliqueUnion(Graph(start, tuple(rows)), tuple(blocks))


def _as_graph(g: Graph | CliqueUnion) -> Graph:
    return g.graph if isinstance(g, CliqueUnion) else g


def disjoint_union(g1: Graph | CliqueUnion, g2: Graph | CliqueUnion) -> Graph:
    g1, g2 = _as_graph(g1), _as_graph(g2)
    return Graph(g1.n + g2.n, g1.adj + tuple(row << g1.n for row in g2.adj))


def full_join(g1: Graph | CliqueUnion, g2: Graph | CliqueUnion) -> Graph:
    g1, g2 = _as_graph(g1), _as_graph(g2)
    left_all = g1.full_mask
    right_all = g2.full_mask << g1.n
    rows = tuple(row | right_all for row in g1.adj) + tuple((row << g1.n) | left_all for row in g2.adj)
    return Graph(g1.n + g2.n, rows)


def realize_partial_join(spec: PartialJoinSpec) -> Graph:
    """Left vertices keep indices ``0..nL-1``; right vertex ``w`` becomes ``nL + w``."""
    left, right = spec.left, spec.right_graph
    nl = left.n
    rows = list(left.adj) + [row << nl for row in right.adj]
    for w, nb in enumerate(spec.neighbors):
        rw = nl + w
        rows[rw] |= nb
        for u in bits(nb):
            rows[u] |= 1 << rw
    return Graph(nl + right.n, tuple(rows))


def induced_subgraph(g: Graph, vertices: int | Iterable[int]) -> Graph:
    """Subgraph on the given vertices, relabelled ``0..k-1`` in increasing order."""
    mask = vertices if isinstance(vertices, int) else mask_of(vertices)
    if mask & ~g.full_mask:
        raise ValueError("vertex set is not contained in the graph")
    order = list(bits(mask))
    index = {v: i for i, v in enumerate(order)}
    rows = tuple(mask_of(index[u] for u in bits(g.adj[v] & mask)) for v in order)
    return Graph(len(order), rows)


def complement(g: Graph) -> Graph:
    full = g.full_mask
    return Graph(g.n, tuple(full & ~row & ~(1 << v) for v, row in enumerate(g.adj)))


def join_all(graphs: Sequence[Graph | CliqueUnion]) -> Graph:
    """Full join of several graphs, in order."""
    out = empty_graph(0)
    for g in graphs:
        out = full_join(out, g)
    return out


# graph6 ---------------------------------------------------------------------

def _size_prefix(n: int) -> str:
    if n <= 62:
        return chr(n + 63)
    if n <= 258047:
        return "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
    if n <= 68719476735:
        return "~~" + "".join(chr(((n >> s) & 63) + 63) for s in (30, 24, 18, 12, 6, 0))
    raise ValueError("graph too large for graph6")


def emit_graph6(g: Graph | CliqueUnion) -> str:
    g = _as_graph(g)
    out = [_size_prefix(g.n)]
    acc = 0
    nbits = 0
    for j in range(1, g.n):
        row = g.adj[j]
        for i in range(j):
            acc = (acc << 1) | (row >> i & 1)
            nbits += 1
            if nbits == 6:
                out.append(chr(acc + 63))
                acc = nbits = 0
    if nbits:
        out.append(chr((acc << (6 - nbits)) + 63))
    return "".join(out)


def parse_graph6(text: str) -> Graph:
    s = text.strip()
    if s.startswith(">>graph6<<"):
        s = s[len(">>graph6<<"):]
    if not s:
        raise ValueError("graph6: empty input")
    vals = []
    for ch in s:
        c = ord(ch) - 63
        if not 0 <= c <= 63:
            raise ValueError(f"graph6: invalid character {ch!r}")
        vals.append(c)
    if vals[0] != 63:
        n, body = vals[0], vals[1:]
    elif len(vals) >= 2 and vals[1] == 63:
        if len(vals) < 8:
            raise ValueError("graph6: truncated 8-byte size header")
        n = 0
        for c in vals[2:8]:
            n = (n << 6) | c
        body = vals[8:]
    else:
        if len(vals) < 4:
            raise ValueError("graph6: truncated 4-byte size header")
        n = (vals[1] << 12) | (vals[2] << 6) | vals[3]
        body = vals[4:]
    need = (n * (n - 1) // 2 + 5) // 6
    if len(body) != need:
        raise ValueError(f"graph6: expected {need} data bytes for n={n}, got {len(body)}")
    rows = [0] * n
    pos = 0
    for j in range(1, n):
        for i in range(j):
            c = body[pos // 6]
            if c >> (5 - pos % 6) & 1:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
            pos += 1
    return Graph(n, tuple(rows))


def emit_edge_list(g: Graph) -> str:
    """Plain text: first line ``n m``, then one ``u v`` pair per line."""
    lines = [f"{g.n} {g.num_edges}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Graph:
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError("edge list: empty input")
    header = lines[0]
    n = int(header[0])
    pairs = []
    for ln in lines[1:]:
        if len(ln) != 2:
            raise ValueError(f"edge list: expected 'u v', got {' '.join(ln)!r}")
        pairs.append((int(ln[0]), int(ln[1])))
    if len(header) > 1 and int(header[1]) != len(pairs):
        raise ValueError(f"edge list: header says {header[1]} edges, found {len(pairs)}")
    return Graph.from_edges(n, pairs)


def all_labeled_graphs(n: int) -> Iterator[Graph]:
    """Every labelled graph on n vertices, ordered by graph6 edge mask."""
    for mask in range(1 << (n * (n - 1) // 2)):
        yield Graph.from_edge_mask(n, mask)


def random_graph(n: int, p: float, rng) -> Graph:
    return Graph.from_edges(n, [(u, v) for u, v in combinations(range(n), 2) if rng.random() < p])
