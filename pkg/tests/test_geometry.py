import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from gestalt_ph.errors import ConfigError, DegenerateExtentError
from gestalt_ph.geometry import (AttributedCloud, AttributedPoint, EmbeddedCloud, distance_matrix,
                                 embed, normalize_unit_square)

coords = arrays(np.float64, st.tuples(st.integers(1, 12), st.just(2)),
                elements=st.floats(-100, 100, allow_nan=False))


def test_point_rejects_nonfinite():
    with pytest.raises(ConfigError):
        AttributedPoint(float("nan"), 0.0)


def test_cloud_needs_points_and_consistent_attrs():
    with pytest.raises(ConfigError):
        AttributedCloud(())
    with pytest.raises(ConfigError):
        AttributedCloud((AttributedPoint(0, 0, (("c", 1),)), AttributedPoint(1, 0)))


def test_embed_scales_attributes():
    cloud = AttributedCloud.from_arrays([(0, 0), (3, 0)], {"color": [0, 1], "shape": [2, 2]})
    ec = embed(cloud, {"color": 10})
    np.testing.assert_array_equal(ec.points, [[0, 0, 0, 2], [3, 0, 10, 2]])
    assert ec.attr_names == ("color", "shape")
    assert ec.m == 2 and ec.n == 2


def test_embed_rejects_unknown_and_negative_scales():
    cloud = AttributedCloud.from_arrays([(0, 0)], {"color": [1]})
    with pytest.raises(ConfigError):
        embed(cloud, {"hue": 1})
    with pytest.raises(ConfigError):
        embed(cloud, {"color": -1})


def test_two_color_distances():
    cloud = AttributedCloud.from_arrays([(0, 0), (3, 0), (0, 0), (3, 0)], {"color": [0, 0, 1, 1]})
    dm = distance_matrix(embed(cloud, {"color": 10}))
    assert dm[0, 1] == 3 and dm[0, 2] == 10
    assert dm[0, 3] == pytest.approx(np.hypot(3, 10))


@given(coords)
def test_distance_matrix_is_a_metric(xy):
    dm = distance_matrix(EmbeddedCloud.planar(xy))
    assert np.array_equal(dm, dm.T)
    assert np.all(np.diag(dm) == 0)
    n = len(xy)
    for i in range(n):
        assert np.all(dm[i][:, None] <= dm[i][None, :] + dm + 1e-9)


def test_distance_matrix_read_only():
    dm = distance_matrix(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        dm[0, 1] = 1


@given(coords)
def test_normalize_fits_unit_square(xy):
    cloud = AttributedCloud.from_arrays(xy)
    extent = np.ptp(xy, axis=0).max()
    if extent == 0:
        with pytest.raises(DegenerateExtentError):
            normalize_unit_square(cloud)
        return
    out = normalize_unit_square(cloud).xy
    assert out.min() >= 0 and out.max() <= 1
    assert np.ptp(out, axis=0).max() == pytest.approx(1.0)
