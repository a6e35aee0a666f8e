import numpy as np
import pytest
from hypothesis import given, strategies as st

from gestalt_ph.errors import CapacityError, ParameterError
from gestalt_ph.filtration import build_vr, complex_at, one_skeleton, skeleton_at
from gestalt_ph.geometry import distance_matrix
from oracles import brute_vr


def _cloud(seed, n):
    return np.random.default_rng(seed).random((n, 2))


@given(st.integers(0, 10_000), st.integers(1, 9), st.integers(0, 3), st.floats(0.05, 1.5))
def test_matches_brute_force_enumeration(seed, n, max_dim, max_eps):
    dm = distance_matrix(_cloud(seed, n))
    f = build_vr(dm, max_dim=max_dim, max_eps=max_eps)
    expected = brute_vr(dm, max_dim, max_eps)
    got = dict(f)
    assert got.keys() == expected.keys()
    for s, v in expected.items():
        assert got[s] == v


@given(st.integers(0, 10_000), st.integers(2, 9))
def test_order_and_face_closure(seed, n):
    f = build_vr(distance_matrix(_cloud(seed, n)), max_dim=3)
    seen = set()
    keys = [(v, len(s), s) for s, v in f]
    assert keys == sorted(keys)
    for s, _ in f:
        for k in range(len(s)):
            if len(s) > 1:
                assert s[:k] + s[k + 1:] in seen
        seen.add(s)


def test_default_max_eps_is_diameter():
    dm = distance_matrix(_cloud(1, 6))
    f = build_vr(dm, max_dim=5)
    assert f.max_eps == dm.max()
    assert len(f) == 2 ** 6 - 1


def test_inclusive_threshold():
    dm = np.array([[0, 1.0], [1.0, 0]])
    assert complex_at(build_vr(dm, 1), 1.0) == {(0,), (1,), (0, 1)}
    assert complex_at(build_vr(dm, 1), 0.999) == {(0,), (1,)}


def test_complex_at_range_checked():
    f = build_vr(distance_matrix(_cloud(0, 4)), max_dim=2)
    with pytest.raises(ParameterError):
        complex_at(f, -0.1)
    with pytest.raises(ParameterError):
        complex_at(f, f.max_eps * 2)


def test_capacity_error():
    dm = distance_matrix(_cloud(0, 30))
    with pytest.raises(CapacityError):
        build_vr(dm, max_dim=3, max_simplices=1000)


def test_bad_parameters():
    dm = distance_matrix(_cloud(0, 3))
    with pytest.raises(ParameterError):
        build_vr(dm, max_dim=-1)
    with pytest.raises(ParameterError):
        build_vr(dm, max_eps=0)


def test_index_of_and_text():
    f = build_vr(distance_matrix(_cloud(3, 5)), max_dim=2)
    tris = [s for s, _ in f if len(s) == 3]
    pos = f.index_of(tris, 2)
    assert [f.simplex(p) for p in pos] == tris
    assert f.index_of([(0, 0, 0)], 2)[0] == -1
    lines = f.to_text().splitlines()
    assert len(lines) == len(f)
    assert lines[0].split()[:3] == ["0", "0", "0"]


def test_skeleton():
    xy = np.array([[0, 0], [1, 0], [2, 0], [5, 0]], dtype=float)
    f = build_vr(distance_matrix(xy), max_dim=2)
    sk = skeleton_at(f, 1.0, xy)
    assert sk.edges == ((0, 1), (1, 2))
    assert sk.neighbors(3) == ()
    assert sk.length(0, 2) == 2.0
    assert sk.has_edge(1, 0) and not sk.has_edge(0, 2)
    assert one_skeleton(complex_at(f, 1.0), xy).edges == sk.edges
