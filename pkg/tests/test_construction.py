import itertools
import json
import random

import numpy as np
import pytest

from fibspectrum.construction import (
    HypercubeParams, MainParams, additional_sizes, bits_to_target, build_main_graph,
    checkered_array, checkered_extension, checkered_hyperplane_count, closed_form,
    default_params, digit_interval, digit_owners, encode_digits, half_term, hyperplane_count,
    lambda_T, member_polarity, random_sets, s_offset, sigma, t_bounds, t_schedule, union_size,
    variable_rows,
)
from fibspectrum.counting import count_brute, count_via_summation_trick
from fibspectrum.graph_core import realize_partial_join


# S and its extra points for d=2, m=4, transcribed from the worked picture
FIG_S = {(1, 2), (1, 4), (2, 2), (2, 3), (3, 4), (4, 1), (4, 2), (4, 4)}
FIG_LIGHT = {
    (1, 5), (1, 7), (2, 5), (2, 8), (3, 5), (3, 6), (3, 7), (4, 7), (5, 1), (5, 3), (5, 6), (5, 8),
    (6, 1), (6, 4), (6, 6), (6, 7), (7, 1), (7, 2), (7, 3), (7, 8), (8, 3), (8, 5), (8, 6), (8, 8),
}


def naive_extension(s, d, m):
    """Straight from the definition: y is in iff (x in S) == (v has even weight)."""
    out = set()
    for y in itertools.product(range(1, 2 * m + 1), repeat=d):
        v = tuple((c - 1) // m for c in y)
        x = tuple(c - m * vi for c, vi in zip(y, v))
        if (x in s) == (sum(v) % 2 == 0):
            out.add(y)
    return out


def test_params_validation():
    with pytest.raises(ValueError):
        HypercubeParams(0, 3)
    with pytest.raises(ValueError):
        default_params(1, 2)  # m must exceed 2^d
    with pytest.raises(ValueError):
        t_schedule(2, 4)
    p = default_params(1, 3)
    with pytest.raises(ValueError, match="outside"):
        MainParams(p.hp, p.S, (2, 3, 3))
    with pytest.raises(ValueError):
        MainParams(p.hp, ({(4,)}, set(), set()), p.t)


def test_hyperplane_counts():
    assert hyperplane_count(HypercubeParams(2, 4), [(1, 3)]) == 8
    assert hyperplane_count(HypercubeParams(2, 4), []) == 64
    assert hyperplane_count(HypercubeParams(1, 3), [(1, 2)]) == 1
    assert hyperplane_count(HypercubeParams(3, 5), [(1, 10), (3, 1)]) == 10
    with pytest.raises(ValueError):
        hyperplane_count(HypercubeParams(2, 4), [(1, 1), (1, 2)])
    with pytest.raises(ValueError):
        hyperplane_count(HypercubeParams(2, 4), [(1, 9)])


def test_checkered_small_examples():
    hp = HypercubeParams(1, 3)
    assert checkered_extension(set(), hp) == {(4,), (5,), (6,)}
    assert checkered_extension({(2,)}, hp) == {(2,), (4,), (6,)}


def test_checkered_matches_picture():
    hp = HypercubeParams(2, 4)
    ext = checkered_extension(FIG_S, hp)
    assert ext == FIG_S | FIG_LIGHT
    assert len(ext) == 32
    assert ext == naive_extension(FIG_S, 2, 4)


def test_checkered_array_agrees_with_set():
    rng = random.Random(4)
    for d, m in [(1, 3), (2, 4), (3, 3)]:
        hp = HypercubeParams(d, m)
        for _ in range(5):
            s = random_sets(hp, rng)[0]
            arr = checkered_array(s, hp)
            pts = {tuple(int(i) + 1 for i in idx) for idx in zip(*np.nonzero(arr))}
            assert pts == checkered_extension(s, hp) == naive_extension(s, d, m)
            assert len(pts) * 2 == (2 * m) ** d


def test_checkered_hyperplane_examples():
    rng = random.Random(9)
    hp = HypercubeParams(2, 4)
    for s in random_sets(hp, rng):
        assert checkered_hyperplane_count(s, hp, [(2, 3)]) == 4
    assert checkered_hyperplane_count(frozenset({(1,)}), HypercubeParams(1, 3), []) == 3
    hp = HypercubeParams(3, 9)
    s = random_sets(hp, rng)[0]
    ext = naive_extension(s, 3, 9)
    assert checkered_hyperplane_count(s, hp, [(1, 4), (3, 7)]) == 9
    assert sum(1 for y in ext if y[0] == 4 and y[2] == 7) == 9
    with pytest.raises(ValueError):
        checkered_hyperplane_count(s, hp, [(1, 10)])  # uniformity needs values within [1, m]
    with pytest.raises(ValueError):
        checkered_hyperplane_count(s, hp, [(1, 1), (2, 1), (3, 1)])


def test_checkered_uniformity_sweep():
    rng = random.Random(0)
    for d in range(1, 4):
        for m in range(1, 7):
            hp = HypercubeParams(d, m)
            for _ in range(50):
                s = random_sets(hp, rng, rng.random())[0]
                arr = checkered_array(s, hp)
                for ell in range(d):
                    for axes in itertools.combinations(range(d), ell):
                        idx = [slice(None)] * d
                        for a in axes:
                            idx[a] = rng.randrange(m)
                        assert int(arr[tuple(idx)].sum()) * 2 == (2 * m) ** (d - ell)


def test_sigma():
    assert sigma((1, 1, 1), 4) == 0
    assert sigma((4, 4, 4), 4) == 63
    assert sigma((3, 2), 5) == 7
    for d, m in [(1, 5), (2, 3), (3, 4)]:
        vals = sorted(sigma(k, m) for k in itertools.product(range(1, m + 1), repeat=d))
        assert vals == list(range(m**d))
    with pytest.raises(ValueError):
        sigma((0, 1), 3)


def test_t_schedule():
    assert t_schedule(1, 3) == [3, 3, 3]
    assert t_schedule(1, 4) == [4, 8, 4, 4]
    for d, m in [(1, 5), (2, 5), (2, 7), (3, 9)]:
        t = t_schedule(d, m)
        lo, hi = t_bounds(d, m)
        assert all(lo <= x <= hi for x in t)
        assert t[m - 2**d - 1] == m ** (d + 1) - (2 ** (d - 1) + 1) * m**d


def test_half_term_and_lambda():
    p = default_params(1, 3)
    assert lambda_T(p, (2,), 1) == 5
    assert half_term(2, 5) == 10
    p = default_params(2, 5)
    assert p.t[0] == 50
    assert lambda_T(p, (3, 2), 1) == 67
    for d in range(2, 6):
        for m in range(2**d + 1, 2**d + 4):
            h = half_term(d, m)
            assert d * (2 * m - 1) ** (d - 1) <= 2 * h <= d * (2 * m) ** (d - 1)


def test_half_term_lower_bound_fails_in_dimension_one():
    # both estimates are 1/2 when d = 1, but the half term is 1
    for m in range(3, 10):
        assert half_term(1, m) == 1


def test_graph_sizes_d1_m3():
    spec, layout = build_main_graph(default_params(1, 3))
    assert spec.left.n == 9 and layout.n_left == 9
    assert additional_sizes(1, 3) == [2, 1]
    assert spec.right_graph.n == 6
    assert realize_partial_join(spec).n == 15
    assert spec.right.sizes == (3, 3)


def test_neighbourhood_sizes():
    rng = random.Random(1)
    for d, m in [(1, 3), (1, 5), (2, 5)]:
        base = default_params(d, m)
        p = base.with_sets(random_sets(base.hp, rng))
        spec, layout = build_main_graph(p)
        assert spec.left.n == m ** (d + 1)
        for j in range(1, d + 1):
            for k in range(1, m + 1):
                size = bin(spec.neighbors[layout.w(j, k)]).count("1")
                assert size == (2 * m) ** (d - 1) + s_offset(j, k, m)
        for k in range(1, m + 1):
            assert bin(spec.neighbors[layout.w(d + 1, k)]).count("1") == p.t[k - 1]


def test_labels():
    _, layout = build_main_graph(default_params(1, 3))
    assert layout.label(0) == ("y", (1,))
    assert layout.label(6) == ("a", 1, 1)
    assert layout.label(8) == ("a", 2, 1)
    assert layout.label(9) == ("w", 1, 1)
    assert layout.label(14) == ("w", 2, 3)


def test_union_size_by_enumeration():
    rng = random.Random(3)
    base = default_params(2, 5)
    p = base.with_sets(random_sets(base.hp, rng))
    spec, layout = build_main_graph(p)
    for _ in range(40):
        blocks = sorted(rng.sample(range(1, 4), rng.randint(1, 3)))
        members = [(j, rng.randint(1, 5)) for j in blocks]
        direct = 0
        for j, k in members:
            direct |= spec.neighbors[layout.w(j, k)]
        assert union_size(p, members) == bin(direct).count("1")


def test_exponents_d1_m3():
    cf = closed_form(default_params(1, 3))
    assert [cf.terms[((k1,), 1)] for k1 in (1, 2, 3)] == [5, 4, 3]
    assert member_polarity(1) and not member_polarity(2)


@pytest.mark.parametrize("d,m", [(1, 3), (1, 4), (2, 5)])
def test_closed_form_matches_summation_trick(d, m):
    rng = random.Random(d * 100 + m)
    base = default_params(d, m)
    cf = closed_form(base)
    for _ in range(20):
        p = base.with_sets(random_sets(base.hp, rng, rng.random()))
        spec, _ = build_main_graph(p)
        assert cf.value(p.S) == count_via_summation_trick(spec)


def test_closed_form_matches_brute_force_d1_m3():
    base = default_params(1, 3)
    cf = closed_form(base)
    values = set()
    for chosen in itertools.product([False, True], repeat=3):
        s1 = frozenset((k,) for k, on in zip((1, 2, 3), chosen) if on)
        # odd d toggles on membership, so empty sets contribute nothing
        p = base.with_sets([s1, frozenset(), frozenset()])
        value = cf.value(p.S)
        assert value == count_brute(realize_partial_join(build_main_graph(p)[0]))
        values.add(value - cf.constant)
    assert values == {a + b + c for a in (0, 8) for b in (0, 16) for c in (0, 32)}


def test_digit_interval_is_the_exponent_range():
    for d, m in [(1, 3), (1, 4), (1, 6), (2, 5), (2, 6)]:
        hp = HypercubeParams(d, m)
        cf = closed_form(default_params(d, m))
        lo, hi = digit_interval(hp)
        assert cf.exponents(variable_rows(d, m)) == list(range(lo, hi + 1))
        assert sorted(digit_owners(hp)) == list(range(lo, hi + 1))
    assert digit_interval(HypercubeParams(1, 3)) == (3, 5)


def test_encode_examples():
    hp = HypercubeParams(1, 3)
    c = closed_form(default_params(1, 3)).constant
    p = encode_digits(hp, {})
    assert closed_form(p).value(p.S) == c
    p = encode_digits(hp, {4: 1})
    spec, _ = build_main_graph(p)
    assert count_brute(realize_partial_join(spec)) == c + 16
    with pytest.raises(ValueError):
        encode_digits(hp, {6: 1})


@pytest.mark.parametrize("d,m", [(1, 5), (2, 5)])
def test_encode_all_ones(d, m):
    hp = HypercubeParams(d, m)
    lo, hi = digit_interval(hp)
    p = encode_digits(hp, {pos: 1 for pos in range(lo, hi + 1)})
    c = closed_form(p).constant
    assert count_via_summation_trick(build_main_graph(p)[0]) == c + (1 << (hi + 1)) - (1 << lo)


def test_encode_random_targets_even_dimension():
    hp = HypercubeParams(2, 5)
    lo, hi = digit_interval(hp)
    rng = random.Random(8)
    for _ in range(3):
        target = {pos: rng.randint(0, 1) for pos in range(lo, hi + 1)}
        p = encode_digits(hp, target)
        cf = closed_form(p)
        want = sum(bit << pos for pos, bit in target.items())
        assert count_via_summation_trick(build_main_graph(p)[0]) - cf.constant == want


def test_bits_to_target():
    hp = HypercubeParams(1, 3)
    assert bits_to_target(hp, "010") == {3: 0, 4: 1, 5: 0}
    assert bits_to_target(hp, "1") == {3: 1}
    for bad in ["", "0120", "1111"]:
        with pytest.raises(ValueError):
            bits_to_target(hp, bad)


def test_params_json_round_trip():
    rng = random.Random(2)
    base = default_params(2, 5)
    p = base.with_sets(random_sets(base.hp, rng))
    text = json.dumps(p.to_json())
    assert MainParams.from_json(json.loads(text)) == p
    data = p.to_json()
    del data["t"]
    assert MainParams.from_json(data).t == p.t
