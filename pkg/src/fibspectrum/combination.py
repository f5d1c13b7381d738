"""Combining several hypercube blocks into one partial join.

Two layers:

* the exact arithmetic skeleton at real scale (``choose_m``,
  ``plan_combination``), all in Python ints and Fractions, never building
  the ``2^((D+1)^2)``-vertex graph;
* a toy-scale builder (:class:`ToyPlan`, ``build_combined_toy``) that does
  realise the combined graph for small explicit blocks and checks the value
  it produces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor
from typing import Sequence

from .counting import count_fast
from .errors import HypothesisFailure
from .graph_core import CliqueUnion, Graph, PartialJoinSpec, empty_graph, join_all, realize_partial_join
from .spectra import ShiftedDigitSet, ValueSet, find_partial_join, spectrum_exhaustive, SPECTRUM_CEILING

Interval = tuple[int, int]


def slack(delta) -> Fraction:
    """The lower-bound slack used beside 8/9; a fixed multiple of delta."""
    return 4 * Fraction(delta)


def iroot(x: int, k: int) -> int:
    """Largest r with ``r**k <= x``."""
    if x < 0 or k < 1:
        raise ValueError("need x >= 0 and k >= 1")
    if x < 2:
        return x
    r = 1 << -(-x.bit_length() // k)
    while True:
        s = ((k - 1) * r + x // r ** (k - 1)) // k
        if s >= r:
            break
        r = s
    while r**k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r


def _m_window(d: int, q: int, delta) -> tuple[Fraction, int]:
    e = (d + 2) ** 2 - q
    return (Fraction(8, 9) + slack(delta)) * 2**e, 2**e


def m_conditions(d: int, q: int, m: int, delta) -> dict[str, bool]:
    """Every inequality a block width must satisfy, evaluated exactly."""
    delta = Fraction(delta)
    e = (d + 2) ** 2 - q
    x = 2**e
    lo, hi = _m_window(d, q, delta)
    inner = (Fraction(1, 4) + delta) * 2 ** (d + 1) * m**d
    return {
        "width range": 2 ** (d + 1) <= m <= 2 ** (d + 3),
        "window": lo <= m ** (d + 1) <= hi,
        "fits shift": x >= m ** (d + 1),
        "lower end": inner <= Fraction(x, 3),
        "upper end": m ** (d + 1) - inner >= Fraction(2 * x, 3),
    }


def choose_m(d: int, q: int, delta) -> int:
    """Width ``m`` in ``[2^(d+1), 2^(d+3)]`` with ``m^(d+1)`` inside the window below ``2^((d+2)^2 - q)``.

    Takes the largest admissible width, ``floor(2^(e/(d+1)))``.  Raises
    :class:`HypothesisFailure` if that width misses the window.
    """
    if not 1 <= q <= 2 * d + 3:
        raise ValueError(f"q must lie in [1, {2 * d + 3}]")
    if q == 1:
        m = 2 ** (d + 3)
    elif q == 2 * d + 3:
        m = 2 ** (d + 1)
    else:
        m = iroot(2 ** ((d + 2) ** 2 - q), d + 1)
    failed = [name for name, ok in m_conditions(d, q, m, delta).items() if not ok]
    if failed:
        raise HypothesisFailure(f"no width for d={d}, q={q}: m={m} fails {failed}", (d, q, m))
    return m


def y_interval(d: int, q: int) -> Interval:
    x = 2 ** ((d + 2) ** 2 - q)
    return -(-x // 3), (2 * x) // 3


def block_interval(d: int, m: int, delta) -> Interval:
    """Digit interval certified for ``(d+1) K_m`` against ``m^(d+1)`` isolated vertices at slack 4 delta."""
    base = (Fraction(1, 4) + Fraction(delta)) * 2 ** (d + 1) * m**d
    return ceil(base), floor(m ** (d + 1) - base)


@dataclass(frozen=True)
class Block:
    d: int
    q: int
    m: int
    n: int  # left vertices the block needs, m^(d+1)
    Y: Interval
    Z: Interval
    shift: int


@dataclass
class CombinationPlan:
    D: int
    delta: Fraction
    d0: int
    n0: int
    M: int
    Y0: Interval
    blocks: list[Block]
    J: Interval
    a: int
    failures: list[str] = field(default_factory=list)

    @property
    def k(self) -> int:
        return len(self.blocks)

    @property
    def vertex_count(self) -> int:
        return self.n0 + (self.D + 1) * self.M + 2 * sum((b.d + 1) * b.m for b in self.blocks)

    @property
    def spectrum_log2_lower_bound(self) -> int:
        return self.n0 - 2 * self.a

    @property
    def certified(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "D": self.D,
            "delta": str(self.delta),
            "d0": self.d0,
            "n0": str(self.n0),
            "M": str(self.M),
            "Y0": [str(x) for x in self.Y0],
            "J": [str(x) for x in self.J],
            "a": str(self.a),
            "k": self.k,
            "vertex_count": str(self.vertex_count),
            "spectrum_log2_lower_bound": str(self.spectrum_log2_lower_bound),
            "blocks": [
                {
                    "d": b.d, "q": b.q, "m": str(b.m), "n": str(b.n),
                    "Y": [str(x) for x in b.Y], "Z": [str(x) for x in b.Z], "t": str(b.shift),
                }
                for b in self.blocks
            ],
            "certified": self.certified,
            "failures": self.failures,
        }


def merged_cover(intervals: Sequence[Interval]) -> list[Interval]:
    out: list[list[int]] = []
    for lo, hi in sorted(intervals):
        if lo > hi:
            continue
        if out and lo <= out[-1][1] + 1:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [(lo, hi) for lo, hi in out]


def covers(intervals: Sequence[Interval], target: Interval) -> bool:
    return any(lo <= target[0] and target[1] <= hi for lo, hi in merged_cover(intervals))


def plan_combination(D: int, delta, d0: int = 5) -> CombinationPlan:
    """Exact skeleton of the multi-block construction, with every hypothesis checked.

    Failures are collected in ``plan.failures`` (one line per offending
    block or interval) instead of aborting at the first one.
    """
    delta = Fraction(delta)
    if D <= d0:
        raise ValueError("need D > d0")
    n0 = 2 ** ((D + 1) ** 2)
    M = 2 ** (D + 1)
    y0 = (ceil((Fraction(1, 4) + delta) * n0), floor((Fraction(3, 4) - delta) * n0))
    a = -(-(2 ** ((d0 + 1) ** 2)) // 3)
    plan = CombinationPlan(D, delta, d0, n0, M, y0, [], (a, n0 - a), a)
    fail = plan.failures

    if M ** (D + 1) != n0:
        fail.append("base block does not fill the left class")
    if not covers([block_interval(D, M, delta)], y0):
        fail.append(f"base interval {y0} not certified for (D+1)K_M")

    for d in range(d0, D):
        for q in range(1, 2 * d + 4):
            try:
                m = choose_m(d, q, delta)
            except HypothesisFailure as exc:
                fail.append(str(exc))
                continue
            y = y_interval(d, q)
            z = (n0 - y[1], n0 - y[0])
            n = m ** (d + 1)
            shift = z[0] - y[0]
            b = Block(d, q, m, n, y, z, shift)
            plan.blocks.append(b)
            if not (0 <= y[0] <= y[1] <= n0 and 0 <= z[0] <= z[1] <= n0):
                fail.append(f"block {(d, q)}: interval outside [0, n0]")
            if not 1 <= n <= n0:
                fail.append(f"block {(d, q)}: left size {n} outside [1, n0]")
            if (y[0] + shift, y[1] + shift) != z:
                fail.append(f"block {(d, q)}: reflection is not a shift")
            if not 0 <= shift <= n0 - n:
                fail.append(f"block {(d, q)}: shift {shift} outside [0, {n0 - n}]")
            if not covers([block_interval(d, m, delta)], y):
                fail.append(f"block {(d, q)}: Y={y} not inside certified digits of ({d}+1)K_{m}")
        lo = -(-(2 ** ((d + 1) ** 2)) // 3)
        hi = (2 * 2 ** ((d + 2) ** 2 - 1)) // 3
        own = [b.Y for b in plan.blocks if b.d == d]
        if not covers(own, (lo, hi)):
            fail.append(f"intervals for d={d} leave a gap in [{lo}, {hi}]")

    expected_k = D * D + 2 * D - d0 * d0 - 2 * d0
    if plan.k != expected_k:
        fail.append(f"block count {plan.k} != {expected_k}")
    pieces = [y0] + [b.Y for b in plan.blocks] + [b.Z for b in plan.blocks]
    if not covers(pieces, plan.J):
        fail.append(f"J={plan.J} not covered; cover is {merged_cover(pieces)}")
    return plan


# toy scale ------------------------------------------------------------------

@dataclass(frozen=True)
class ToyBlock:
    """A right graph with a certified digit interval: ``Sp(K̄_n, graph) ⊇ B(Y) + c``."""

    graph: Graph | CliqueUnion
    n: int
    Y: Interval
    c: int

    @property
    def right(self) -> Graph:
        return self.graph.graph if isinstance(self.graph, CliqueUnion) else self.graph

    def digit_set(self) -> ShiftedDigitSet:
        return ShiftedDigitSet.interval(self.Y[0], self.Y[1], self.c)


@dataclass(frozen=True)
class ToyPlan:
    n0: int
    J: Interval
    base: ToyBlock  # uses all n0 left vertices
    blocks: tuple[ToyBlock, ...] = ()

    def shifts(self) -> list[int]:
        return [self.n0 - b.Y[0] - b.Y[1] for b in self.blocks]

    def reflections(self) -> list[Interval]:
        return [(self.n0 - b.Y[1], self.n0 - b.Y[0]) for b in self.blocks]

    def right_parts(self) -> list[Graph]:
        """``A_0, A_1..A_k, B_1..B_k`` with each B_j a copy of A_j."""
        parts = [self.base.right] + [b.right for b in self.blocks]
        return parts + [b.right for b in self.blocks]

    def constant(self) -> int:
        n0 = self.n0
        c = self.base.c
        for b, t in zip(self.blocks, self.shifts()):
            t_join = n0 - b.n - t
            c += (b.c << t) + ((1 << t_join) - 1) * (1 << (b.n + t))  # reflected copy A_j
            c += b.c + ((1 << (n0 - b.n)) - 1) * (1 << b.n)  # plain copy B_j
        return c - 2 * len(self.blocks) * (1 << n0)

    def digit_set(self) -> ShiftedDigitSet:
        return ShiftedDigitSet.interval(self.J[0], self.J[1], self.constant())

    def check(self, ceiling: int = SPECTRUM_CEILING) -> list[str]:
        """Hypotheses of the combination, with block spectra checked exhaustively."""
        fail = []
        n0 = self.n0
        if self.base.n != n0:
            fail.append("base block must use all n0 left vertices")
        for i, (b, t, z) in enumerate(zip(self.blocks, self.shifts(), self.reflections()), 1):
            if not 1 <= b.n <= n0:
                fail.append(f"block {i}: n={b.n} outside [1, {n0}]")
            if not 0 <= t <= n0 - b.n:
                fail.append(f"block {i}: shift {t} outside [0, {n0 - b.n}]")
            if not (0 <= b.Y[0] <= b.Y[1] <= n0 and 0 <= z[0] <= z[1] <= n0):
                fail.append(f"block {i}: interval outside [0, n0]")
        pieces = [self.base.Y] + [b.Y for b in self.blocks] + self.reflections()
        if not covers(pieces, self.J):
            fail.append(f"J={self.J} not covered by {merged_cover(pieces)}")
        for i, b in enumerate((self.base,) + self.blocks):
            spectrum = spectrum_exhaustive(empty_graph(b.n), b.right, ceiling)
            if not b.digit_set().expand().issubset(spectrum):
                fail.append(f"block {i}: B(Y)+c not inside its exhaustive spectrum")
        return fail


def _assign_digits(plan: ToyPlan, target: int) -> list[int]:
    """Split ``target`` (a member of B(J)) across the pieces Y_0, Y_j, Z_j."""
    pieces = [plan.base.Y]
    for b, z in zip(plan.blocks, plan.reflections()):
        pieces += [b.Y, z]
    parts = [0] * len(pieces)
    lo, hi = plan.J
    if target < 0 or target >> (hi + 1) or target & ((1 << lo) - 1):
        raise ValueError(f"{target} is not in B([{lo}, {hi}])")
    pos = 0
    while target >> pos:
        if target >> pos & 1:
            for i, (a, b) in enumerate(pieces):
                if a <= pos <= b:
                    parts[i] |= 1 << pos
                    break
        pos += 1
    return parts


def _block_join(g_r: Graph, n: int, value: int) -> tuple[int, ...]:
    found = find_partial_join(empty_graph(n), g_r, value)
    if found is None:
        raise HypothesisFailure(f"value {value} not realised against {n} isolated vertices", value)
    return found.neighbors


def build_combined_toy(plan: ToyPlan, target: int = 0) -> PartialJoinSpec:
    """Partial join of ``K̄_n0`` with ``A_0 ▽ A_1.. ▽ B_1..`` whose count is ``constant + target``.

    Each block's own partial join is found by exhaustive search; the reflected
    copy pads with ``t`` unjoined then ``t'`` fully joined isolated vertices,
    the plain copy joins all remaining left vertices.
    """
    n0 = plan.n0
    parts = _assign_digits(plan, target)
    full = (1 << n0) - 1
    nbrs: list[int] = list(_block_join(plan.base.right, n0, plan.base.c + parts[0]))
    reflected, plain = [], []
    for i, (b, t) in enumerate(zip(plan.blocks, plan.shifts())):
        y_for_z = parts[2 + 2 * i] >> t
        own = _block_join(b.right, b.n, b.c + y_for_z)
        joined = full & ~((1 << (b.n + t)) - 1)
        reflected.extend(nb | joined for nb in own)
        own = _block_join(b.right, b.n, b.c + parts[1 + 2 * i])
        rest = full & ~((1 << b.n) - 1)
        plain.extend(nb | rest for nb in own)
    nbrs += reflected + plain
    return PartialJoinSpec(empty_graph(n0), join_all(plan.right_parts()), tuple(nbrs))


@dataclass
class ToyCertificate:
    hypotheses: list[str]
    realised: dict[int, int]  # target -> counted i(G)
    expected_offset: int
    spectrum_checked: bool
    spectrum_contains: bool | None

    @property
    def passed(self) -> bool:
        ok = not self.hypotheses and all(v == self.expected_offset + t for t, v in self.realised.items())
        return ok and self.spectrum_contains is not False


def certify_toy(plan: ToyPlan, ceiling: int = SPECTRUM_CEILING) -> ToyCertificate:
    """Realise every target in B(J), count it, and compare against the exhaustive spectrum when small."""
    hyp = plan.check(ceiling)
    c = plan.constant()
    realised = {}
    if not hyp:
        for target in ShiftedDigitSet.interval(*plan.J).expand():
            spec = build_combined_toy(plan, target)
            realised[target] = count_fast(realize_partial_join(spec))
    n_right = sum(p.n for p in plan.right_parts())
    checked = plan.n0 * n_right <= ceiling
    contains = None
    if checked:
        spectrum = spectrum_exhaustive(empty_graph(plan.n0), join_all(plan.right_parts()), ceiling)
        contains = plan.digit_set().expand().issubset(spectrum)
    return ToyCertificate(hyp, realised, c, checked, contains)


def example_toy_plan() -> ToyPlan:
    """Four left vertices, base ``K_3`` carrying digits 0..2, one ``K_1`` block reflected onto digit 3."""
    from .graph_core import complete_graph
    base = ToyBlock(complete_graph(3), 4, (0, 2), 19)
    block = ToyBlock(complete_graph(1), 2, (1, 1), 6)
    return ToyPlan(4, (0, 3), base, (block,))


def spectra_agree_for_join(plan: ToyPlan, ceiling: int = SPECTRUM_CEILING) -> bool:
    """Exhaustive spectrum of the combined right side equals the combined block spectra."""
    from .spectra import combine_spectra
    g_l = empty_graph(plan.n0)
    parts = [spectrum_exhaustive(g_l, p, ceiling) for p in plan.right_parts()]
    combined = combine_spectra(parts, 1 << plan.n0)
    return combined == spectrum_exhaustive(g_l, join_all(plan.right_parts()), ceiling)
