"""Exhaustive lemma suites, run by ``fibspectrum verify-lemmas`` and the acceptance tests.

Each check returns a :class:`CheckRow`; a suite is a list of rows.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .combination import choose_m, plan_combination
from .construction import (
    HypercubeParams, build_main_graph, checkered_array, checkered_hyperplane_count,
    closed_form, default_params, digit_interval, random_sets, sigma, t_bounds, t_schedule,
    variable_rows,
)
from .counting import count_brute, count_fast, count_via_summation_trick, summation_terms
from .graph_core import (
    CliqueUnion, Graph, PartialJoinSpec, all_labeled_graphs, disjoint_cliques, empty_graph,
    realize_partial_join,
)
from .spectra import combine_spectra, full_join_spectrum, pad_left_spectrum, spectrum_exhaustive


@dataclass(frozen=True)
class CheckRow:
    suite: str
    check: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"suite": self.suite, "check": self.check, "passed": self.passed, "detail": self.detail}


def _small_graphs(max_n: int, min_n: int = 1) -> list[Graph]:
    return [g for n in range(min_n, max_n + 1) for g in all_labeled_graphs(n)]


# spectra --------------------------------------------------------------------

def padding_containments(max_left: int = 2, max_pad: int = 2, max_right: int = 2) -> CheckRow:
    """Both padding containments on every small instance."""
    cases = bad = 0
    for g_l in _small_graphs(max_left):
        for g_r in _small_graphs(max_right):
            for t in range(0, max_pad + 1):
                cases += 1
                if not pad_left_spectrum(g_l, g_r, t).certified:
                    bad += 1
    return CheckRow("spectra", "padding containments", bad == 0, f"{cases} instances, {bad} failures")


def join_equality(max_left: int = 2, max_block: int = 2, max_parts: int = 3) -> CheckRow:
    """Spectrum over a full join equals the combined block spectra, on every small instance."""
    cases = bad = 0
    blocks = _small_graphs(max_block)
    for g_l in _small_graphs(max_left):
        i_gl = count_fast(g_l)
        single = {id(b): spectrum_exhaustive(g_l, b) for b in blocks}
        for parts in range(1, max_parts + 1):
            for combo in itertools.combinations_with_replacement(range(len(blocks)), parts):
                chosen = [blocks[i] for i in combo]
                if g_l.n * sum(b.n for b in chosen) > 20:
                    continue
                cases += 1
                combined = combine_spectra([single[id(b)] for b in chosen], i_gl)
                if combined != full_join_spectrum(g_l, chosen):
                    bad += 1
    return CheckRow("spectra", "full-join spectrum equality", bad == 0, f"{cases} instances, {bad} failures")


def summation_agreement(samples: int = 60, seed: int = 0, max_total: int = 14) -> CheckRow:
    rng = random.Random(seed)
    bad = 0
    for _ in range(samples):
        spec = random_partial_join(rng, max_total)
        if count_via_summation_trick(spec) != count_brute(realize_partial_join(spec)):
            bad += 1
    return CheckRow("spectra", "summation trick vs enumeration", bad == 0, f"{samples} random joins, {bad} failures")


def random_partial_join(rng: random.Random, max_total: int = 16, cliques: bool | None = None) -> PartialJoinSpec:
    """Random partial join with ``|V_L| + |V_R| <= max_total``; right side optionally a clique union."""
    n_l = rng.randint(1, max_total - 1)
    n_r = rng.randint(1, max_total - n_l)
    g_l = _random_graph(n_l, rng)
    if cliques is None:
        cliques = rng.random() < 0.5
    if cliques:
        sizes, left = [], n_r
        while left:
            s = rng.randint(1, left)
            sizes.append(s)
            left -= s
        right: Graph | CliqueUnion = disjoint_cliques(sizes)
    else:
        right = _random_graph(n_r, rng)
    nbrs = tuple(rng.getrandbits(n_l) for _ in range(n_r))
    return PartialJoinSpec(g_l, right, nbrs)


def _random_graph(n: int, rng: random.Random) -> Graph:
    p = rng.random()
    return Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p])


def sample_clique_join() -> PartialJoinSpec:
    """15 isolated vertices on a 5 x 3 grid against four triangles.

    Grid point ``(x, y)`` is vertex ``x + 5y``.  Only ``w_{1,1}`` (columns
    0-2), ``w_{3,2}`` (top row, columns 1-4) and ``w_{4,1}`` (columns 2-3 of
    the upper two rows) have left neighbours.
    """
    def cells(xs, ys):
        m = 0
        for x in xs:
            for y in ys:
                m |= 1 << (x + 5 * y)
        return m

    right = disjoint_cliques([3, 3, 3, 3])
    nbrs = [0] * 12
    nbrs[right.vertex(0, 0)] = cells(range(0, 3), range(3))
    nbrs[right.vertex(2, 1)] = cells(range(1, 5), [2])
    nbrs[right.vertex(3, 0)] = cells([2, 3], [1, 2])
    return PartialJoinSpec(empty_graph(15), right, tuple(nbrs))


def transversal_term(spec: PartialJoinSpec, members: tuple[int, ...]) -> int:
    """Summand contributed by one partial transversal (right indices)."""
    for s_r, _, term in summation_terms(spec):
        if tuple(sorted(s_r)) == tuple(sorted(members)):
            return term
    raise KeyError(f"{members} is not an independent right set")


def sample_join_terms() -> CheckRow:
    spec = sample_clique_join()
    cu = spec.right
    three = transversal_term(spec, (cu.vertex(0, 0), cu.vertex(2, 1), cu.vertex(3, 0)))
    full = transversal_term(spec, tuple(cu.vertex(j, 0) for j in range(4)))
    ok = three == 8 and full == 16
    return CheckRow("spectra", "clique-union transversal terms", ok, f"three-vertex term {three}, full term {full}")


# construction ---------------------------------------------------------------

def checkered_uniformity(max_d: int = 3, max_m: int = 6, trials: int = 50, seed: int = 0) -> CheckRow:
    """Checkered hyperplane intersections are ``(2m)^(d-l)/2`` for every S tried."""
    rng = random.Random(seed)
    cases = bad = 0
    for d in range(1, max_d + 1):
        for m in range(1, max_m + 1):
            hp = HypercubeParams(d, m)
            for _ in range(trials):
                s = random_sets(hp, rng, rng.random())[0]
                arr = checkered_array(s, hp)
                if int(arr.sum()) * 2 != (2 * m) ** d:
                    bad += 1
                for ell in range(0, d):
                    for axes in itertools.combinations(range(1, d + 1), ell):
                        vals = [rng.randint(1, m) for _ in axes]
                        cases += 1
                        idx = [slice(None)] * d
                        for a, v in zip(axes, vals):
                            idx[a - 1] = v - 1
                        direct = int(arr[tuple(idx)].sum())
                        want = (2 * m) ** (d - ell) // 2
                        if direct != want or checkered_hyperplane_count(s, hp, list(zip(axes, vals))) != want:
                            bad += 1
    return CheckRow("construction", "checkered hyperplane counts", bad == 0, f"{cases} slices, {bad} failures")


def sigma_bijection(max_d: int = 3, max_m: int = 6) -> CheckRow:
    ok = True
    for d in range(1, max_d + 1):
        for m in range(1, max_m + 1):
            vals = sorted(sigma(k, m) for k in itertools.product(range(1, m + 1), repeat=d))
            ok &= vals == list(range(m**d))
    return CheckRow("construction", "base-m index is a bijection", ok)


def schedule_bounds() -> CheckRow:
    ok = True
    for d in range(1, 4):
        for m in range(2**d + 1, 2**d + 6):
            lo, hi = t_bounds(d, m)
            t = t_schedule(d, m)
            ok &= all(lo <= x <= hi for x in t)
            ok &= t[variable_rows(d, m) - 1] == m ** (d + 1) - (2 ** (d - 1) + 1) * m**d
    return CheckRow("construction", "schedule within bounds", ok)


def closed_form_agreement(settings=((1, 3), (1, 4), (2, 5)), trials: int = 5, seed: int = 0) -> CheckRow:
    rng = random.Random(seed)
    bad = total = 0
    for d, m in settings:
        base = default_params(d, m)
        cf = closed_form(base)
        for _ in range(trials):
            p = base.with_sets(random_sets(base.hp, rng))
            spec, _ = build_main_graph(p)
            total += 1
            if cf.value(p.S) != count_via_summation_trick(spec):
                bad += 1
    return CheckRow("construction", "closed form vs summation trick", bad == 0, f"{total} graphs, {bad} failures")


def digit_interval_cover(settings=((1, 3), (1, 4), (1, 5), (2, 5), (2, 6))) -> CheckRow:
    ok = True
    for d, m in settings:
        cf = closed_form(default_params(d, m))
        lo, hi = digit_interval(HypercubeParams(d, m))
        ok &= cf.exponents(variable_rows(d, m)) == list(range(lo, hi + 1))
    return CheckRow("construction", "controlled exponents form an interval", ok)


def width_choices(d_range=range(5, 21), delta=Fraction(1, 1000)) -> CheckRow:
    failures = []
    for d in d_range:
        for q in range(1, 2 * d + 4):
            try:
                choose_m(d, q, delta)
            except Exception as exc:  # reported, not raised
                failures.append(f"({d},{q}): {exc}")
    return CheckRow("construction", "block widths exist", not failures, "; ".join(failures[:3]))


def combination_plan(D: int = 8, delta=Fraction(1, 1000)) -> CheckRow:
    plan = plan_combination(D, delta)
    detail = "; ".join([f"k={plan.k}"] + plan.failures[:3])
    return CheckRow("construction", f"combination plan D={D}", plan.certified, detail)


SUITES: dict[str, list[Callable[[], CheckRow]]] = {
    "spectra": [padding_containments, join_equality, summation_agreement, sample_join_terms],
    "construction": [
        checkered_uniformity, sigma_bijection, schedule_bounds, closed_form_agreement,
        digit_interval_cover, width_choices, combination_plan,
    ],
}


def run_suites(names=None) -> list[CheckRow]:
    names = list(SUITES) if names is None else names
    return [check() for name in names for check in SUITES[name]]
