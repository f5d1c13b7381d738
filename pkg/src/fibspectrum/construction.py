"""Hypercube partial-join construction with closed-form digit control.

Everything here mirrors the 1-indexed conventions of the construction:
grid points are tuples in ``[1, 2m]^d``, right blocks are ``W_1..W_{d+1}``
with members ``w_{j,1..m}``, additional sets are ``A_1..A_{d+1}``.  The
graph itself uses 0-indexed vertices; :class:`MainLayout` translates.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor
from typing import Iterable, Mapping, Sequence

import numpy as np

from .graph_core import PartialJoinSpec, disjoint_cliques, empty_graph, mask_of

Point = tuple[int, ...]

ENUMERATION_LIMIT = 10**6


@dataclass(frozen=True)
class HypercubeParams:
    """Dimension ``d`` and width ``m``; the base cube is ``[m]^d``, the extended one ``[2m]^d``.

    Geometry helpers accept any ``m >= 1``; the main construction additionally
    needs ``m > 2^d`` (see :meth:`require_construction`).
    """

    d: int
    m: int

    def __post_init__(self):
        if self.d < 1 or self.m < 1:
            raise ValueError("need d >= 1 and m >= 1")

    def require_construction(self):
        if self.m <= 2**self.d:
            raise ValueError(f"construction needs m > 2^d, got d={self.d}, m={self.m}")

    @property
    def side(self) -> int:
        return 2 * self.m

    def base_points(self) -> Iterable[Point]:
        return itertools.product(range(1, self.m + 1), repeat=self.d)

    def extended_points(self) -> Iterable[Point]:
        return itertools.product(range(1, self.side + 1), repeat=self.d)


def _check_constraints(hp: HypercubeParams, constraints, max_value: int) -> dict[int, int]:
    out: dict[int, int] = {}
    for axis, value in constraints:
        if not 1 <= axis <= hp.d:
            raise ValueError(f"axis {axis} outside [1, {hp.d}]")
        if axis in out:
            raise ValueError(f"axis {axis} constrained twice")
        if not 1 <= value <= max_value:
            raise ValueError(f"value {value} outside [1, {max_value}]")
        out[axis] = value
    return out


def _slice(hp: HypercubeParams, cons: Mapping[int, int]) -> tuple:
    return tuple(cons[a] - 1 if a in cons else slice(None) for a in range(1, hp.d + 1))


def hyperplane_count(hp: HypercubeParams, constraints: Iterable[tuple[int, int]]) -> int:
    """Points of ``[2m]^d`` on the given axis-parallel hyperplanes.

    Returns ``(2m)^(d - l)``; when the extended cube has at most a million
    points the value is also counted directly and the two must agree.
    """
    cons = _check_constraints(hp, constraints, hp.side)
    formula = hp.side ** (hp.d - len(cons))
    if hp.side**hp.d <= ENUMERATION_LIMIT:
        cube = np.ones((hp.side,) * hp.d, dtype=bool)
        counted = int(np.count_nonzero(cube[_slice(hp, cons)]))
        if counted != formula:
            raise RuntimeError(f"hyperplane count mismatch: {counted} != {formula}")
    return formula


def _parity_vectors(d: int):
    for v in itertools.product((0, 1), repeat=d):
        yield v, sum(v) % 2


def checkered_extension(s: Iterable[Point], hp: HypercubeParams) -> frozenset[Point]:
    """Members of S copied to even shifts ``x + m v``, non-members to odd shifts."""
    s = frozenset(s)
    m = hp.m
    out = set()
    for x in hp.base_points():
        member = x in s
        for v, odd in _parity_vectors(hp.d):
            if member != bool(odd):
                out.add(tuple(xi + m * vi for xi, vi in zip(x, v)))
    return frozenset(out)


def checkered_array(s: Iterable[Point], hp: HypercubeParams) -> np.ndarray:
    """Indicator of the checkered extension as a ``(2m,)*d`` boolean array (index = coord - 1)."""
    m, d = hp.m, hp.d
    base = np.zeros((m,) * d, dtype=bool)
    for x in s:
        base[tuple(xi - 1 for xi in x)] = True
    out = np.empty((2 * m,) * d, dtype=bool)
    for v, odd in _parity_vectors(d):
        block = tuple(slice(vi * m, (vi + 1) * m) for vi in v)
        out[block] = ~base if odd else base
    return out


def checkered_hyperplane_count(
    s: Iterable[Point], hp: HypercubeParams, constraints: Iterable[tuple[int, int]]
) -> int:
    """Direct count of ``|S_c ∩ H(j_1,k_1) ∩ ...|``; values restricted to ``[1, m]``, at most d-1 axes."""
    cons = _check_constraints(hp, constraints, hp.m)
    if len(cons) > hp.d - 1:
        raise ValueError("at most d-1 hyperplanes may be imposed")
    return int(np.count_nonzero(checkered_array(s, hp)[_slice(hp, cons)]))


def sigma(kvec: Sequence[int], m: int) -> int:
    """Base-m number whose digits are ``k_j - 1`` (axis 1 least significant)."""
    total = 0
    for j, k in enumerate(kvec):
        if not 1 <= k <= m:
            raise ValueError(f"coordinate {k} outside [1, {m}]")
        total += (k - 1) * m**j
    return total


def t_bounds(d: int, m: int) -> tuple[int, int]:
    return 2 ** (d - 1) * m**d, m ** (d + 1) - (2 ** (d - 1) + 1) * m**d + 1


def t_schedule(d: int, m: int) -> list[int]:
    """Arithmetic progression of step ``m^d`` for the first ``m - 2^d`` rows, then constant."""
    HypercubeParams(d, m).require_construction()
    t1 = 2 ** (d - 1) * m**d
    progression = m - 2**d
    return [t1 + (k - 1) * m**d if k <= progression else t1 for k in range(1, m + 1)]


def half_term(d: int, m: int) -> int:
    twice = (2 * m) ** d - (2 * m - 1) ** d + 1
    assert twice % 2 == 0  # (2m-1)^d is odd
    return twice // 2


# parameters and layout ------------------------------------------------------

@dataclass(frozen=True)
class MainParams:
    hp: HypercubeParams
    S: tuple[frozenset, ...]
    t: tuple[int, ...]
    epsilon: Fraction = Fraction(1, 10)

    def __post_init__(self):
        hp = self.hp
        hp.require_construction()
        object.__setattr__(self, "S", tuple(frozenset(tuple(p) for p in s) for s in self.S))
        object.__setattr__(self, "t", tuple(int(x) for x in self.t))
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if len(self.S) != hp.m or len(self.t) != hp.m:
            raise ValueError(f"need exactly m={hp.m} sets S_k and values t_k")
        lo, hi = t_bounds(hp.d, hp.m)
        for k, tk in enumerate(self.t, 1):
            if not lo <= tk <= hi:
                raise ValueError(f"t_{k} = {tk} outside [{lo}, {hi}]")
        for k, s in enumerate(self.S, 1):
            for p in s:
                if len(p) != hp.d or not all(1 <= c <= hp.m for c in p):
                    raise ValueError(f"S_{k} contains {p}, not a point of [{hp.m}]^{hp.d}")

    @property
    def d(self) -> int:
        return self.hp.d

    @property
    def m(self) -> int:
        return self.hp.m

    def with_sets(self, sets: Sequence[Iterable[Point]]) -> "MainParams":
        return MainParams(self.hp, tuple(frozenset(s) for s in sets), self.t, self.epsilon)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "m": self.m,
            "epsilon": str(self.epsilon),
            "S": [sorted(list(p) for p in s) for s in self.S],
            "t": [str(x) for x in self.t],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "MainParams":
        hp = HypercubeParams(int(data["d"]), int(data["m"]))
        sets = tuple(frozenset(tuple(int(c) for c in p) for p in s) for s in data["S"])
        t = data.get("t") or t_schedule(hp.d, hp.m)
        return cls(hp, sets, tuple(int(x) for x in t), Fraction(data.get("epsilon", "1/10")))


def default_params(d: int, m: int, sets=None, epsilon=Fraction(1, 10)) -> MainParams:
    hp = HypercubeParams(d, m)
    sets = sets if sets is not None else [frozenset()] * m
    return MainParams(hp, tuple(sets), tuple(t_schedule(d, m)), epsilon)


def random_sets(hp: HypercubeParams, rng: random.Random, density: float = 0.5) -> tuple[frozenset, ...]:
    pts = list(hp.base_points())
    return tuple(frozenset(p for p in pts if rng.random() < density) for _ in range(hp.m))


def additional_sizes(d: int, m: int) -> list[int]:
    """``|A_1|, ..., |A_{d+1}|``."""
    sizes = [m ** (j - 1) * (m - 1) for j in range(1, d + 1)]
    sizes.append(m ** (d + 1) - (2**d + 1) * m**d + 1)
    return sizes


@dataclass
class MainLayout:
    """Index bookkeeping for the construction graph.

    Left class: extended-cube points in lexicographic order, then
    ``A_1, ..., A_{d+1}``.  Right class: ``w_{j,k}`` at ``(j-1) m + (k-1)``.
    """

    hp: HypercubeParams
    point_index: dict[Point, int] = field(default_factory=dict)
    a_start: list[int] = field(default_factory=list)
    a_size: list[int] = field(default_factory=list)
    n_left: int = 0

    def __post_init__(self):
        idx = 0
        for y in self.hp.extended_points():
            self.point_index[y] = idx
            idx += 1
        for size in additional_sizes(self.hp.d, self.hp.m):
            self.a_start.append(idx)
            self.a_size.append(size)
            idx += size
        self.n_left = idx

    def a(self, j: int, ell: int) -> int:
        """Left index of ``a_{j, ell}``."""
        if not 1 <= ell <= self.a_size[j - 1]:
            raise IndexError(f"a_{{{j},{ell}}} does not exist")
        return self.a_start[j - 1] + ell - 1

    def a_prefix(self, j: int, count: int) -> int:
        """Mask of ``a_{j,1}, ..., a_{j,count}``."""
        if count == 0:
            return 0
        if count > self.a_size[j - 1]:
            raise IndexError(f"A_{j} has only {self.a_size[j - 1]} vertices")
        return ((1 << count) - 1) << self.a_start[j - 1]

    def w(self, j: int, k: int) -> int:
        """Right index of ``w_{j,k}``."""
        return (j - 1) * self.hp.m + (k - 1)

    def label(self, v: int) -> tuple:
        """Label of global vertex ``v`` (right vertices follow the left class)."""
        if v >= self.n_left:
            r = v - self.n_left
            return ("w", r // self.hp.m + 1, r % self.hp.m + 1)
        for j in range(len(self.a_start), 0, -1):
            if v >= self.a_start[j - 1]:
                return ("a", j, v - self.a_start[j - 1] + 1)
        for y, i in self.point_index.items():
            if i == v:
                return ("y", y)
        raise IndexError(v)

    def points_mask(self, pts: Iterable[Point]) -> int:
        return mask_of(self.point_index[p] for p in pts)

    def hyperplane_mask(self, axis: int, value: int) -> int:
        return mask_of(i for y, i in self.point_index.items() if y[axis - 1] == value)


def s_offset(j: int, k: int, m: int) -> int:
    return (k - 1) * m ** (j - 1)


def build_main_graph(p: MainParams) -> tuple[PartialJoinSpec, MainLayout]:
    d, m = p.d, p.m
    layout = MainLayout(p.hp)
    nbrs = [0] * ((d + 1) * m)
    for j in range(1, d + 1):
        for k in range(1, m + 1):
            nbrs[layout.w(j, k)] = layout.hyperplane_mask(j, k) | layout.a_prefix(j, s_offset(j, k, m))
    half = 2 ** (d - 1) * m**d
    for k in range(1, m + 1):
        extension = checkered_extension(p.S[k - 1], p.hp)
        nbrs[layout.w(d + 1, k)] = layout.points_mask(extension) | layout.a_prefix(d + 1, p.t[k - 1] - half)
    spec = PartialJoinSpec(empty_graph(layout.n_left), disjoint_cliques([m] * (d + 1)), tuple(nbrs))
    return spec, layout


# closed form ----------------------------------------------------------------

def lambda_T(p: MainParams, kvec: Sequence[int], k: int) -> int:
    return p.t[k - 1] + sigma(kvec, p.m) + half_term(p.d, p.m)


def intersection_size(p: MainParams, members: Sequence[tuple[int, int]]) -> int:
    """``|∩ N_L(w)|`` over a nonempty set of right vertices ``(j, k)``, one per block.

    Uses the case analysis of the layout; only the full case (all ``d + 1``
    blocks) looks at the sets ``S_k``.
    """
    d, m = p.d, p.m
    members = sorted(members)
    size = len(members)
    if size == 0:
        raise ValueError("empty intersection is not defined")
    has_last = members[-1][0] == d + 1
    if not has_last:
        if size == 1:
            j, k = members[0]
            return (2 * m) ** (d - 1) + s_offset(j, k, m)
        return (2 * m) ** (d - size)
    k = members[-1][1]
    if size == 1:
        return p.t[k - 1]
    if size <= d:
        return (2 * m) ** (d - size + 1) // 2
    kvec = tuple(kk for _, kk in members[:-1])
    return int(kvec in p.S[k - 1])


def union_size(p: MainParams, members: Sequence[tuple[int, int]]) -> int:
    """``|U_T|`` by inclusion-exclusion over nonempty subsets of the transversal."""
    total = 0
    for r in range(1, len(members) + 1):
        sign = 1 if r % 2 else -1
        for sub in itertools.combinations(members, r):
            total += sign * intersection_size(p, sub)
    return total


def member_polarity(d: int) -> bool:
    """True when the toggling event is membership ``(k_1..k_d) in S_k`` (odd d)."""
    return d % 2 == 1


@dataclass(frozen=True)
class ClosedForm:
    d: int
    m: int
    constant: int
    terms: Mapping[tuple[Point, int], int]  # (k-vector, k) -> exponent
    membership: bool  # polarity of every toggle

    def toggled(self, sets: Sequence[frozenset]) -> list[tuple[Point, int]]:
        return [key for key in self.terms if (key[0] in sets[key[1] - 1]) == self.membership]

    def value(self, sets: Sequence[frozenset]) -> int:
        return self.constant + sum(1 << self.terms[key] for key in self.toggled(sets))

    def exponents(self, k_max: int | None = None) -> list[int]:
        k_max = self.m if k_max is None else k_max
        return sorted(e for (kvec, k), e in self.terms.items() if k <= k_max)


def closed_form(p: MainParams) -> ClosedForm:
    """Constant plus one toggled power of two per full transversal.

    The constant collects every partial transversal of size at most d (their
    unions do not depend on the sets ``S_k``) and the baseline ``2^l(T)`` of
    each full transversal.
    """
    d, m = p.d, p.m
    total_left = m ** (d + 1)
    constant = 0
    blocks = range(1, d + 2)
    for size in range(0, d + 1):
        for chosen in itertools.combinations(blocks, size):
            for ks in itertools.product(range(1, m + 1), repeat=size):
                members = list(zip(chosen, ks))
                covered = union_size(p, members) if members else 0
                constant += 1 << (total_left - covered)
    terms = {}
    for k in range(1, m + 1):
        for kvec in itertools.product(range(1, m + 1), repeat=d):
            e = total_left - lambda_T(p, kvec, k)
            if e < 0:
                raise ValueError("negative exponent; parameters out of range")
            terms[(kvec, k)] = e
            constant += 1 << e
    return ClosedForm(d, m, constant, terms, member_polarity(d))


def closed_form_value(p: MainParams) -> int:
    return closed_form(p).value(p.S)


# digit encoding -------------------------------------------------------------

def variable_rows(d: int, m: int) -> int:
    return m - 2**d


def digit_interval(hp: HypercubeParams) -> tuple[int, int]:
    """Positions controlled by the progression rows of the standard schedule."""
    d, m = hp.d, hp.m
    t = t_schedule(d, m)
    h = half_term(d, m)
    top = m ** (d + 1)
    return top - (t[variable_rows(d, m) - 1] + m**d - 1) - h, top - t[0] - h


def claimed_interval(hp: HypercubeParams, epsilon) -> tuple[int, int]:
    """``[ceil((1+eps) 2^(d-1) m^d), floor(m^(d+1) - (1+eps) 2^(d-1) m^d)]``."""
    eps = Fraction(epsilon)
    base = (1 + eps) * 2 ** (hp.d - 1) * hp.m**hp.d
    return ceil(base), floor(hp.m ** (hp.d + 1) - base)


def digit_owners(hp: HypercubeParams) -> dict[int, tuple[Point, int]]:
    """Map digit position to the unique full transversal ``(k-vector, k)`` toggling it."""
    d, m = hp.d, hp.m
    t = t_schedule(d, m)
    h = half_term(d, m)
    top = m ** (d + 1)
    owners = {}
    for k in range(1, variable_rows(d, m) + 1):
        for kvec in itertools.product(range(1, m + 1), repeat=d):
            pos = top - (t[k - 1] + sigma(kvec, m) + h)
            if pos in owners:
                raise RuntimeError(f"digit {pos} owned twice")
            owners[pos] = (kvec, k)
    return owners


def encode_digits(hp: HypercubeParams, target: Mapping[int, int], epsilon=Fraction(1, 10)) -> MainParams:
    """Choose ``S_1..S_m`` so that ``i(G) - c`` has exactly the prescribed bits.

    ``target`` maps digit positions inside :func:`digit_interval` to 0/1;
    unspecified positions are 0.  Rows beyond the progression are pinned to
    the non-toggling polarity.
    """
    hp.require_construction()
    owners = digit_owners(hp)
    for pos in target:
        if pos not in owners:
            lo, hi = digit_interval(hp)
            raise ValueError(f"digit position {pos} outside the controlled interval [{lo}, {hi}]")
    membership = member_polarity(hp.d)
    everything = frozenset(hp.base_points())
    on: list[set] = [set() for _ in range(hp.m)]
    for pos, bit in target.items():
        if bit:
            kvec, k = owners[pos]
            on[k - 1].add(kvec)
    sets = [frozenset(s) if membership else everything - s for s in on]
    return MainParams(hp, tuple(sets), tuple(t_schedule(hp.d, hp.m)), epsilon)


def bits_to_target(hp: HypercubeParams, bitstring: str) -> dict[int, int]:
    """Read a binary numeral (most significant first) onto the controlled interval.

    A string shorter than the interval fills its lowest positions.
    """
    lo, hi = digit_interval(hp)
    if not bitstring or set(bitstring) - {"0", "1"}:
        raise ValueError("bits must be a nonempty string of 0/1")
    if len(bitstring) > hi - lo + 1:
        raise ValueError(f"at most {hi - lo + 1} bits fit in [{lo}, {hi}]")
    return {lo + i: int(b) for i, b in enumerate(reversed(bitstring))}
