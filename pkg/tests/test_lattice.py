import itertools
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from toricmorse.divisors import builtin
from toricmorse.lattice import (
    Box,
    Fan,
    FanError,
    HalfSpaceSystem,
    arrangement_box,
    enumerate_points,
    integer_det,
    integer_rank,
    is_complete,
    is_smooth,
    reduced_cohomology_dims,
    reduced_euler_characteristic,
    solve_rational,
    unimodular_completion,
)

from oracles import BUILTINS

P2 = Fan(2, [(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (2, 0)])
P1P1 = Fan(2, [(1, 0), (-1, 0), (0, 1), (0, -1)], [(0, 2), (2, 1), (1, 3), (3, 0)])

small_ints = st.integers(-6, 6)


@given(st.integers(1, 5), st.integers(1, 5), st.data())
@settings(max_examples=60, deadline=None)
def test_integer_rank_matches_sympy(nrows, ncols, data):
    m = [[data.draw(small_ints) for _ in range(ncols)] for _ in range(nrows)]
    assert integer_rank(m) == sympy.Matrix(m).rank()


@given(st.integers(1, 4), st.data())
@settings(max_examples=60, deadline=None)
def test_integer_det_matches_sympy(n, data):
    m = [[data.draw(small_ints) for _ in range(n)] for _ in range(n)]
    assert integer_det(m) == sympy.Matrix(m).det()


def test_solve_rational():
    assert solve_rational([[2, 1], [1, 3]], [3, 5]) == [Fraction(4, 5), Fraction(7, 5)]
    with pytest.raises(ValueError):
        solve_rational([[1, 2], [2, 4]], [1, 1])


@given(st.lists(st.integers(-30, 30), min_size=1, max_size=4))
def test_unimodular_completion(v):
    from math import gcd
    if not any(v) or gcd(*v) != 1:
        return
    b = unimodular_completion(v)
    assert abs(integer_det(b)) == 1
    assert [sum(x * y for x, y in zip(row, v)) for row in b] == [1] + [0] * (len(v) - 1)


def test_is_smooth_examples():
    assert is_smooth(P2)
    assert is_smooth(P1P1)
    assert not is_smooth(Fan(2, [(1, 0), (1, 2)], [(0, 1)]))


def test_is_complete_examples():
    assert is_complete(P2)
    assert not is_complete(Fan(2, P2.rays, P2.max_cones[:2]))
    assert is_complete(builtin("P1xP1xP1").fan)


@pytest.mark.parametrize(
    "rays, cones, message",
    [
        ([(2, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (2, 0)], "not primitive"),
        ([(1, 0), (1, 0), (0, 1)], [(0, 2), (1, 2)], "duplicate"),
        ([(1, 0), (0, 1), (-1, -1)], [(0, 1), (1,)], "expected 2"),
        ([(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 5)], "out of range"),
        ([(1, 0), (-1, 0), (0, 1)], [(0, 1)], "not full-dimensional"),
        ([(1, 0), (0, 1), (-1, -1)], [(0, 1)], "lie in no maximal cone"),
    ],
)
def test_structural_errors(rays, cones, message):
    with pytest.raises(FanError, match=message):
        Fan(2, rays, cones)


def _relabel(fan, seed):
    rng = random.Random(seed)
    perm = list(range(fan.nrays))
    rng.shuffle(perm)
    rays = [None] * fan.nrays
    for old, new in enumerate(perm):
        rays[new] = fan.rays[old]
    cones = [tuple(perm[i] for i in c) for c in fan.max_cones]
    rng.shuffle(cones)
    return Fan(fan.rank, rays, cones)


@pytest.mark.parametrize("name", BUILTINS)
def test_predicates_invariant_under_relabelling(name):
    fan = builtin(name).fan
    for seed in range(5):
        other = _relabel(fan, seed)
        assert is_smooth(other) == is_smooth(fan)
        assert is_complete(other) == is_complete(fan)


def test_enumerate_points_examples():
    triangle = HalfSpaceSystem([(1, 0), (0, 1), (-1, -1)], [0, 0, -2])
    pts = enumerate_points(triangle, Box((-5, -5), (5, 5)))
    assert len(pts) == 6
    assert pts == sorted(pts)
    empty = HalfSpaceSystem([(1,), (-1,)], [1, 0])
    assert enumerate_points(empty, Box((-5,), (5,))) == []
    a, b = 3, 2
    square = HalfSpaceSystem([(1, 0), (-1, 0), (0, 1), (0, -1)], [0, -a, 0, -b])
    assert len(enumerate_points(square, Box((-9, -9), (9, 9)))) == (a + 1) * (b + 1)


@given(st.lists(st.tuples(st.tuples(small_ints, small_ints), st.integers(-5, 5)), min_size=1, max_size=5), st.randoms())
@settings(max_examples=50, deadline=None)
def test_enumerate_points_permutation_stable(halfspaces, rnd):
    halfspaces = [(v, b) for v, b in halfspaces if any(v)]
    if not halfspaces:
        return
    clip = Box((-4, -4), (4, 4))
    shuffled = list(halfspaces)
    rnd.shuffle(shuffled)
    one = HalfSpaceSystem([v for v, _ in halfspaces], [b for _, b in halfspaces])
    two = HalfSpaceSystem([v for v, _ in shuffled], [b for _, b in shuffled])
    assert enumerate_points(one, clip) == enumerate_points(two, clip)


def test_arrangement_box_contains_vertices():
    box = arrangement_box([(1, 0), (0, 1), (-1, -1)], [0, 0, -2])
    assert box == Box((0, 0), (2, 2))
    half = arrangement_box([(1, 0), (0, 1), (-1, -1)], [Fraction(-1, 2)] * 3)
    assert half.lower == (-1, -1) and half.upper == (1, 1)


def test_reduced_cohomology_examples():
    assert reduced_cohomology_dims(P2, []) == [1, 0, 0]
    assert reduced_cohomology_dims(P2, [0, 1, 2]) == [0, 0, 1]
    assert reduced_cohomology_dims(P1P1, [0, 1]) == [0, 1, 0]
    # single vertex and a path are contractible
    assert reduced_cohomology_dims(P2, [0]) == [0, 0, 0]
    assert reduced_cohomology_dims(P2, [0, 1]) == [0, 0, 0]


def _brute_force_reduced_cohomology(fan, subset):
    """Ranks through sympy on the same cochain complex, as an independent check."""
    faces = [()]
    for size in range(1, fan.rank + 1):
        for f in itertools.combinations(sorted(subset), size):
            if any(set(f) <= set(c) for c in fan.max_cones):
                faces.append(f)
    by = [[f for f in faces if len(f) == d] for d in range(fan.rank + 1)]
    ranks = []
    for d in range(fan.rank):
        lo, hi = by[d], by[d + 1]
        if not lo or not hi:
            ranks.append(0)
            continue
        m = sympy.zeros(len(hi), len(lo))
        for r, f in enumerate(hi):
            for pos in range(len(f)):
                m[r, lo.index(f[:pos] + f[pos + 1:])] = (-1) ** pos
        ranks.append(m.rank())
    ranks.append(0)
    return [len(by[d]) - ranks[d] - (ranks[d - 1] if d else 0) for d in range(fan.rank + 1)]


@pytest.mark.parametrize("name", BUILTINS)
def test_reduced_cohomology_all_subsets(name):
    fan = builtin(name).fan
    for mask in range(1 << fan.nrays):
        subset = [r for r in range(fan.nrays) if mask >> r & 1]
        dims = reduced_cohomology_dims(fan, subset)
        assert len(dims) == fan.rank + 1
        assert sum((-1) ** (d - 1) * h for d, h in enumerate(dims)) == reduced_euler_characteristic(fan, subset)
        if fan.nrays <= 5:
            assert dims == _brute_force_reduced_cohomology(fan, subset)


@pytest.mark.parametrize("name", BUILTINS + ["P4"])
def test_full_subcomplex_is_sphere(name):
    fan = builtin(name).fan
    dims = reduced_cohomology_dims(fan, range(fan.nrays))
    assert dims == [0] * fan.rank + [1]
