import itertools

import pytest
from hypothesis import given, strategies as st

from greedypaths import (
    ExplicitField,
    NotAdjacent,
    NotSelfAvoiding,
    ResourceBound,
    enumerate_saws,
    is_self_avoiding_path,
    neighbors,
    path_extend,
    path_weight,
)
from greedypaths.lattice import l1_ball_offsets
from greedypaths.weights import Constant, WeightField

# vertices-of-length-n counts for the square lattice, frozen from exhaustive
# enumeration (equivalently the classic step counts c_0..c_4 = 1,4,12,36,100)
SQUARE_LATTICE_COUNTS = {1: 1, 2: 4, 3: 12, 4: 36, 5: 100}


def test_neighbors_d2_origin():
    assert neighbors((0, 0), 2) == ((-1, 0), (0, -1), (0, 1), (1, 0))


def test_neighbors_d1():
    assert neighbors((0,), 1) == ((-1,), (1,))


def test_neighbors_d3_structure():
    out = neighbors((1, 2, 3), 3)
    assert len(out) == 6
    for w in out:
        diffs = [abs(a - b) for a, b in zip(w, (1, 2, 3))]
        assert sorted(diffs) == [0, 0, 1]
    assert list(out) == sorted(out)


def test_neighbors_dimension_mismatch():
    with pytest.raises(ValueError):
        neighbors((0, 0), 3)


def test_path_extend_valid():
    assert path_extend(((0, 0),), (1, 0)) == ((0, 0), (1, 0))


def test_path_extend_revisit():
    with pytest.raises(NotSelfAvoiding):
        path_extend(((0, 0), (1, 0)), (0, 0))


def test_path_extend_not_adjacent():
    with pytest.raises(NotAdjacent):
        path_extend(((0, 0),), (2, 0))


@pytest.mark.parametrize("n,count", sorted(SQUARE_LATTICE_COUNTS.items()))
def test_enumerate_counts_d2(n, count):
    assert sum(1 for _ in enumerate_saws(n, 2)) == count


def test_enumerate_single_vertex():
    assert list(enumerate_saws(1, 2)) == [((0, 0),)]


@pytest.mark.parametrize("d", [1, 2, 3])
def test_enumerate_structural_and_order(d):
    paths = list(enumerate_saws(4 if d < 3 else 3, d))
    assert all(is_self_avoiding_path(p) for p in paths)
    assert all(p[0] == (0,) * d for p in paths)
    assert all(a < b for a, b in zip(paths, paths[1:]))  # strictly increasing, duplicate-free


@pytest.mark.parametrize("d,n", [(1, 3), (2, 4), (3, 3)])
def test_enumerate_first_step_symmetry(d, n):
    count = sum(1 for _ in enumerate_saws(n, d))
    assert count % (2 * d) == 0


def test_enumerate_resource_bound():
    with pytest.raises(ResourceBound):
        list(enumerate_saws(5, 2, max_paths=50))
    # the cap is a count of yielded paths, not a budget estimate
    assert len(list(enumerate_saws(5, 2, max_paths=100))) == 100


def test_path_weight_single_vertex(worked_field):
    assert path_weight(((0, 0),), worked_field) == 1.0


def test_path_weight_constant_linearity():
    field = WeightField(Constant(2.0), 1, 2)
    path = next(p for p in enumerate_saws(5, 2))
    assert path_weight(path, field) == 10.0


def test_path_weight_truncated():
    field = ExplicitField({(0, 0): 1.0, (1, 0): -5.0}, dimension=2)
    assert path_weight(((0, 0), (1, 0)), field, 2.0) == 1.0 + (-2.0)
    assert path_weight(((0, 0), (1, 0)), field) == -4.0


@pytest.mark.parametrize("r", [0, 1, 3, 7])
def test_ball_offsets_count_d2(r):
    offsets = l1_ball_offsets(2, r)
    assert len(offsets) == 2 * r * r + 2 * r + 1
    assert list(offsets) == sorted(offsets)


@given(st.lists(st.sampled_from([(1, 0), (-1, 0), (0, 1), (0, -1)]), max_size=12))
def test_path_extend_agrees_with_validator(steps):
    path = ((0, 0),)
    for step in steps:
        v = (path[-1][0] + step[0], path[-1][1] + step[1])
        try:
            path = path_extend(path, v)
        except NotSelfAvoiding:
            assert v in path
            break
        assert is_self_avoiding_path(path)


@given(st.integers(-3, 3), st.integers(-3, 3))
def test_neighbors_are_mutual(x, y):
    v = (x, y)
    for w in neighbors(v, 2):
        assert v in neighbors(w, 2)
