import itertools
import random

import pytest
from hypothesis import given, settings

from fibspectrum.counting import (
    SubsetCounter, connected_components, count_brute, count_fast, count_via_summation_trick,
    independence_number, independence_polynomial, matching_number, partial_transversals,
    poly_multiply, summation_terms, vertex_cover_number,
)
from fibspectrum.errors import CeilingExceeded
from fibspectrum.graph_core import (
    Graph, PartialJoinSpec, complete_graph, cycle_graph, disjoint_cliques, disjoint_union,
    empty_graph, path_graph, random_graph, realize_partial_join,
)
from fibspectrum.verify import random_partial_join

from strategies import graphs


def naive_poly(g: Graph) -> list[int]:
    """Pairwise check of every vertex subset; no bitmask tricks."""
    coeffs = [0] * (g.n + 1)
    for size in range(g.n + 1):
        for sub in itertools.combinations(range(g.n), size):
            if all(not g.has_edge(u, v) for u, v in itertools.combinations(sub, 2)):
                coeffs[size] += 1
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def fib(k: int) -> int:
    a, b = 0, 1
    for _ in range(k):
        a, b = b, a + b
    return a


def test_small_known_counts():
    assert count_brute(empty_graph(0)) == 1
    assert count_brute(complete_graph(2)) == 3
    assert count_fast(path_graph(3)) == 5
    assert independence_polynomial(path_graph(3)) == [1, 3, 1]
    assert count_fast(path_graph(10)) == 144
    assert count_fast(complete_graph(7)) == 8
    assert count_fast(empty_graph(9)) == 512
    # Lucas numbers on cycles
    assert [count_fast(cycle_graph(n)) for n in range(3, 8)] == [4, 7, 11, 18, 29]


@pytest.mark.parametrize("n", range(1, 31))
def test_paths_give_fibonacci(n):
    assert count_fast(path_graph(n)) == fib(n + 2)


def test_paths_brute_force_fibonacci():
    for n in range(1, 23):
        assert count_brute(path_graph(n)) == fib(n + 2)


@settings(max_examples=80, deadline=None)
@given(graphs(max_n=11))
def test_engines_match_naive_enumeration(g):
    poly = naive_poly(g)
    assert independence_polynomial(g) == poly
    assert count_brute(g) == sum(poly) == count_fast(g)


def test_blocked_enumeration_above_low_bits():
    rng = random.Random(5)
    for n in (21, 23):
        g = random_graph(n, 0.3, rng)
        assert count_brute(g) == count_fast(g)
        assert sum(independence_polynomial(g)) == count_fast(g)


def test_polynomial_splits_components_above_ceiling():
    g = disjoint_union(path_graph(20), cycle_graph(15))
    poly = independence_polynomial(g, ceiling=20)
    assert poly == poly_multiply(independence_polynomial(path_graph(20)), independence_polynomial(cycle_graph(15)))
    assert sum(poly) == count_fast(g)
    with pytest.raises(CeilingExceeded):
        independence_polynomial(path_graph(25), ceiling=20)


def test_brute_ceiling():
    with pytest.raises(CeilingExceeded):
        count_brute(empty_graph(31))


def test_fast_counter_handles_large_sparse_graphs():
    assert count_fast(path_graph(200)) == fib(202)
    assert count_fast(disjoint_union(complete_graph(50), empty_graph(30))) == 51 * 2**30


def test_subset_counter_on_masks():
    g = path_graph(6)
    c = SubsetCounter(g)
    assert c(0b000111) == 5  # induced P3
    assert c(0b101010) == 8  # three isolated vertices
    assert c(0) == 1


def test_components():
    g = disjoint_union(path_graph(3), complete_graph(2))
    assert connected_components(g) == [0b00111, 0b11000]


def test_partial_transversals_are_independent_sets():
    cu = disjoint_cliques([2, 1, 3])
    pts = list(partial_transversals(cu))
    assert len(pts) == 3 * 2 * 4
    assert all(cu.graph.is_independent(sum(1 << v for v in t)) for t in pts)
    assert len(set(pts)) == len(pts)


def test_summation_terms_for_single_clique():
    # right side a clique: i(G) = i(G_L) + sum_j i(G_L - N_j)
    spec = PartialJoinSpec(empty_graph(4), complete_graph(2), (0b0011, 0b0001))
    terms = {s: term for s, _, term in summation_terms(spec)}
    assert terms == {(): 16, (0,): 4, (1,): 8}
    assert count_via_summation_trick(spec) == 28 == count_brute(realize_partial_join(spec))


def test_summation_trick_random_joins():
    rng = random.Random(11)
    for _ in range(150):
        spec = random_partial_join(rng, 16)
        assert count_via_summation_trick(spec) == count_brute(realize_partial_join(spec))


def test_cover_and_matching_numbers():
    assert matching_number(complete_graph(4)) == 2
    assert vertex_cover_number(complete_graph(4)) == 3
    assert matching_number(path_graph(4)) == 2
    assert vertex_cover_number(path_graph(4)) == 2
    assert independence_number(cycle_graph(7)) == 3
    assert matching_number(empty_graph(5)) == 0


def naive_matching(g: Graph) -> int:
    edges = g.edges()
    for size in range(len(edges), 0, -1):
        for sub in itertools.combinations(edges, size):
            ends = [v for e in sub for v in e]
            if len(set(ends)) == len(ends):
                return size
    return 0


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=8))
def test_matching_and_cover_against_naive(g):
    nu, tau = matching_number(g), vertex_cover_number(g)
    assert nu == naive_matching(g)
    assert nu <= tau <= 2 * nu
    alpha = max(k for k, c in enumerate(naive_poly(g)) if c)
    assert independence_number(g) == alpha
