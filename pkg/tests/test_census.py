import math
from fractions import Fraction

import numpy as np
import pytest

from fibspectrum.census import (
    binary_entropy, census, census_csv, count_tables, entropy_exponent, entropy_power,
    entropy_sandwich_holds, matching_bound, matching_bound_audit, solve_mu0, upper_bound_eval,
)
from fibspectrum.counting import count_brute, matching_number
from fibspectrum.errors import CeilingExceeded
from fibspectrum.graph_core import Graph, all_labeled_graphs, induced_subgraph


def pair_mask(n: int, w: int) -> int:
    """Edge-mask bits (graph6 order) of the pairs inside vertex set w."""
    m = 0
    for j in range(n):
        for i in range(j):
            if w >> i & 1 and w >> j & 1:
                m |= 1 << (j * (j - 1) // 2 + i)
    return m


def oracle_counts(n: int) -> np.ndarray:
    """i(G) for every edge mask: count vertex sets whose internal pairs are all non-edges."""
    edges = np.arange(1 << (n * (n - 1) // 2), dtype=np.int64)
    total = np.zeros_like(edges)
    for w in range(1 << n):
        total += (edges & pair_mask(n, w)) == 0
    return total


@pytest.mark.parametrize("n", range(1, 8))
def test_census_against_independent_oracle(n):
    want = sorted(set(oracle_counts(n).tolist()))
    res = census(n)
    assert list(res.values) == want
    assert res.graphs == 2 ** (n * (n - 1) // 2)


def test_census_small_values_against_brute_force():
    for n in range(1, 5):
        vals = sorted({count_brute(g) for g in all_labeled_graphs(n)})
        assert list(census(n).values) == vals
    assert list(census(1).values) == [2]
    assert list(census(3).values) == [4, 5, 6, 8]
    assert list(census(4).values) == [5, 6, 7, 8, 9, 10, 12, 16]
    assert census(0).count == 1


def test_census_counts_sequence():
    assert [census(n).count for n in range(1, 8)] == [1, 2, 4, 8, 16, 30, 55]


def test_count_tables_match_brute_force():
    table = count_tables(4)
    for mask in range(table.shape[0]):
        g = Graph.from_edge_mask(4, mask)
        assert int(table[mask, 15]) == count_brute(g)
        for w in (0b0101, 0b1110, 0):
            assert int(table[mask, w]) == count_brute(induced_subgraph(g, w))


@pytest.mark.parametrize("n", [5, 6, 7])
def test_census_deterministic_across_parallelism(n):
    base = census(n, witnesses=True)
    for par in (4, 16):
        other = census(n, parallelism=par, witnesses=True)
        assert other.values == base.values
        assert other.witnesses == base.witnesses


def test_census_invariants_and_monotonicity():
    prev = 0
    for n in range(1, 8):
        vals = set(census(n).values)
        assert min(vals) == n + 1 and max(vals) == 2**n
        if n >= 2:
            assert 3 * 2 ** (n - 2) in vals
        assert len(vals) >= prev
        prev = len(vals)


def test_witnesses_realise_their_values():
    res = census(6, witnesses=True)
    assert set(res.witnesses) == set(res.values)
    for value, mask in res.witnesses.items():
        assert count_brute(Graph.from_edge_mask(6, mask)) == value
    # least masks: the empty graph witnesses 2^n
    assert res.witnesses[64] == 0


def test_census_ceiling_and_json():
    with pytest.raises(CeilingExceeded):
        census(9)
    with pytest.raises(ValueError):
        census(-1)
    data = census(3, witnesses=True).to_json()
    assert data["values"] == [4, 5, 6, 8] and data["Ni"] == 4 and data["graphs"] == "8"
    assert set(data["witnesses"]) == {"4", "5", "6", "8"}
    assert census_csv([census(1), census(2)]) == "n,Ni\n1,1\n2,2\n"


# matching bound -------------------------------------------------------------

def test_matching_bound_examples():
    assert matching_bound(5, 0) == 32
    assert matching_bound(6, 3) == 27
    assert count_brute(Graph.from_edges(6, [(0, 1), (2, 3), (4, 5)])) == 27


@pytest.mark.parametrize("n", range(1, 8))
def test_matching_audit(n):
    audit = matching_bound_audit(n)
    assert audit.holds
    assert audit.graphs == 2 ** (n * (n - 1) // 2)
    assert audit.max_ratio == 1  # the empty graph attains the bound
    g = Graph.from_edge_mask(n, audit.witness)
    assert Fraction(count_brute(g), matching_bound(n, matching_number(g))) == audit.max_ratio


def test_matching_audit_tight_counts_by_brute_force():
    for n in range(1, 6):
        tight = sum(1 for g in all_labeled_graphs(n)
                    if count_brute(g) == matching_bound(n, matching_number(g)))
        assert matching_bound_audit(n).tight == tight


def test_matching_audit_ceiling():
    with pytest.raises(CeilingExceeded):
        matching_bound_audit(8)


# entropy --------------------------------------------------------------------

def test_binary_entropy():
    assert binary_entropy(0.5) == 1
    assert binary_entropy(0) == binary_entropy(1) == 0
    assert binary_entropy(0.25) == pytest.approx(0.8112781244591328)
    with pytest.raises(ValueError):
        binary_entropy(1.5)


def test_mu0():
    mu = solve_mu0()
    assert mu == pytest.approx(0.146908, abs=5e-7)
    assert entropy_exponent(mu) == pytest.approx(1, abs=1e-12)


def test_entropy_power_is_exact():
    assert entropy_power(4, 2) == 16
    assert entropy_power(5, 0) == 1
    assert entropy_power(3, 1) == Fraction(27, 4)
    for n in range(1, 12):
        for k in range(n + 1):
            assert float(entropy_power(n, k)) == pytest.approx(2 ** (n * binary_entropy(k / n)))


def test_entropy_sandwich():
    for n in range(0, 31):
        for k in range(n + 1):
            assert entropy_sandwich_holds(n, k)
    # the upper end is attained only at k in {0, n}
    for n in range(2, 31):
        assert entropy_power(n, 0) == 1 == entropy_power(n, n)
        assert all(math.comb(n, k) < entropy_power(n, k) for k in range(1, n))


def test_upper_bound_eval():
    ub = upper_bound_eval(1000)
    assert ub.low_cover_log2 == pytest.approx(999.97)
    assert ub.high_cover_log2 == pytest.approx(1000 + 0.5 * math.log2(0.75) * math.log2(146.9))
    assert max(ub.low_cover_log2, ub.high_cover_log2) <= ub.total_log2 <= max(
        ub.low_cover_log2, ub.high_cover_log2) + 1
    assert ub.envelope_log2 == pytest.approx(1000 - 0.2075 * math.log2(1000))
    with pytest.raises(ValueError):
        upper_bound_eval(5)
