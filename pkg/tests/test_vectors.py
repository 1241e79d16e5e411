import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spheremaps.vectors import (
    DENSE_LIMIT,
    DimensionTooLarge,
    DimMismatch,
    PcpVector,
    from_blocks,
    parity_counts,
    same_support,
    sup_distance,
    support,
    support_size,
    to_dense,
)

levels = st.sampled_from([0.0, -0.0, 1.0, -1.0, 0.5, -0.25, 1e-300, 3.0])
dense_vectors = st.lists(levels, min_size=1, max_size=40).map(np.array)


def pairs_of_vectors(draw_len=st.integers(1, 30)):
    return draw_len.flatmap(lambda n: st.tuples(st.lists(levels, min_size=n, max_size=n), st.lists(levels, min_size=n, max_size=n)))


@pytest.mark.parametrize("lo,hi,expected", [(1, 1, (0, 1)), (1, 2, (1, 1)), (2, 7, (3, 3)), (3, 3, (0, 1)), (4, 4, (1, 0)), (5, 4, (0, 0))])
def test_parity_counts(lo, hi, expected):
    assert parity_counts(lo, hi) == expected


def test_alternating_pattern_is_one_segment():
    v = PcpVector.from_dense([1, -1, 1, -1, 1, -1])
    assert v.segments == ((1, 6, -1.0, 1.0),)


def test_from_blocks_fills_gaps_with_zero():
    v = from_blocks(8, [(0, 2, 1.0, 1.0), (5, 6, 2.0, 2.0)])
    assert to_dense(v).tolist() == [1, 1, 0, 0, 0, 2, 0, 0]


def test_singletons_are_stored_with_equal_slots():
    v = PcpVector.from_dense([3.0, 1.0, 2.0])
    for lo, hi, ve, vo in v.segments:
        if lo == hi:
            assert ve == vo


def test_coord_is_one_based():
    v = PcpVector.from_dense([5.0, 6.0, 7.0])
    assert [v.coord(i) for i in (1, 2, 3)] == [5.0, 6.0, 7.0]
    with pytest.raises(IndexError):
        v.coord(0)


def test_huge_dimension_stays_compressed():
    k = 10**15
    v = PcpVector(k, ((1, k, 0.0, 1.0),))
    assert v.coord(k) == 0.0 and v.coord(k - 1) == 1.0
    with pytest.raises(DimensionTooLarge):
        v.materialize()


def test_dense_limit_is_ten_million():
    assert DENSE_LIMIT == 10**7


def test_json_roundtrip_keeps_segments():
    v = from_blocks(10, [(0, 3, 1.0, -1.0), (3, 10, 0.25, 0.25)])
    text = json.dumps(v.to_json())
    assert PcpVector.from_json(text) == v


def test_combine_rejects_mismatched_dimensions():
    with pytest.raises(DimMismatch):
        PcpVector.constant(3, 1.0) + PcpVector.constant(4, 1.0)


@given(dense_vectors)
def test_from_dense_materialize_roundtrip(x):
    v = PcpVector.from_dense(x)
    assert np.array_equal(v.materialize(), x)
    assert PcpVector.from_dense(v.materialize()) == v


@given(pairs_of_vectors())
def test_arithmetic_matches_dense(pair):
    a, b = (np.array(p) for p in pair)
    u, v = PcpVector.from_dense(a), PcpVector.from_dense(b)
    assert np.array_equal((u + v).materialize(), a + b)
    assert np.array_equal((u - v).materialize(), a - b)
    assert sup_distance(u, v) == float(np.max(np.abs(a - b)))


@settings(max_examples=200)
@given(dense_vectors, st.data())
def test_restrict_keeps_only_interval(x, data):
    k = x.size
    lo = data.draw(st.integers(1, k))
    hi = data.draw(st.integers(lo, k))
    expected = np.zeros(k)
    expected[lo - 1 : hi] = x[lo - 1 : hi]
    assert np.array_equal(PcpVector.from_dense(x).restrict(lo, hi).materialize(), expected)


@given(dense_vectors)
def test_support_matches_nonzero(x):
    v = PcpVector.from_dense(x)
    expected = [i + 1 for i in np.flatnonzero(x)]
    assert list(support(v).members) == expected
    assert support_size(v) == len(expected) == support_size(x)
    assert same_support(v, x)


def test_values_on_parity_classes():
    v = PcpVector(6, ((1, 6, 2.0, -2.0),))
    assert v.values_on(1, 6, "even") == {2.0}
    assert v.values_on(1, 6, "odd") == {-2.0}
    assert v.values_on(3, 3) == {-2.0}
