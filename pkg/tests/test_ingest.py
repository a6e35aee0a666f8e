import json
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st
from PIL import Image

from gestalt_ph.errors import ConfigError, ParseError
from gestalt_ph.geometry import AttributedCloud, embed
from gestalt_ph.gestalt import group_by_persistence, pragnanz_summary
from gestalt_ph.ingest import (CannyParams, RasterImage, canny_edges, canny_mask, decimate, hue,
                               load_csv, load_json, load_png, quantize_binary_hue, sample_image_uniform,
                               save_csv, save_json)


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_csv_basic(tmp_path):
    c = load_csv(_write(tmp_path, "a.csv", "x,y\n0,0\n1,0\n"))
    assert len(c) == 2 and c.attr_names == ()
    c = load_csv(_write(tmp_path, "b.csv", "x,y,color\n0,0,0\n0,1,1\n"))
    assert c.attr_names == ("color",)
    assert sorted(c.attribute_matrix()[:, 0]) == [0, 1]


@pytest.mark.parametrize("text, where", [
    ("", "line 1"),
    ("a,b\n1,2\n", "line 1"),
    ("x,y\n0,0\n1,zz\n", "line 3"),
    ("x,y,c\n0,0,1\n1,2\n", "line 3"),
    ("x,y\n", "line 2"),
])
def test_csv_errors(tmp_path, text, where):
    with pytest.raises(ParseError) as err:
        load_csv(_write(tmp_path, "bad.csv", text))
    assert err.value.location == where


def test_csv_round_trip_1000_rows(tmp_path):
    rng = np.random.default_rng(0)
    cloud = AttributedCloud.from_arrays(rng.normal(size=(1000, 2)) * 1e3, {"hue": rng.random(1000)})
    save_csv(cloud, tmp_path / "c.csv")
    assert load_csv(tmp_path / "c.csv") == cloud


attr_names = st.lists(st.sampled_from(["hue", "size", "color", "shape"]), max_size=3, unique=True)
finite = st.floats(-1e6, 1e6, allow_nan=False)


@given(attr_names, st.lists(st.tuples(finite, finite, st.lists(finite, min_size=3, max_size=3)),
                            min_size=1, max_size=6))
def test_json_round_trip(tmp_path_factory, names, rows):
    cloud = AttributedCloud.from_arrays([(x, y) for x, y, _ in rows],
                                        {n: [a[k] for _, _, a in rows] for k, n in enumerate(names)})
    path = tmp_path_factory.mktemp("j") / "c.json"
    save_json(cloud, path)
    back = load_json(path)
    assert back == cloud and back.attr_names == tuple(names)


@pytest.mark.parametrize("doc, where", [
    ({"points": []}, "$.points"),
    ({"pts": []}, "$"),
    ({"points": [{"x": 0}]}, "$.points[0]"),
    ({"points": [{"x": 0, "y": "a"}]}, "$.points[0].y"),
    ({"points": [{"x": 0, "y": 0, "attrs": {"c": 1}}, {"x": 1, "y": 0, "attrs": {}}]}, "$.points[1].attrs"),
])
def test_json_errors(tmp_path, doc, where):
    with pytest.raises(ParseError) as err:
        load_json(_write(tmp_path, "bad.json", json.dumps(doc)))
    assert err.value.location == where


def test_json_single_point(tmp_path):
    cloud = AttributedCloud.from_arrays([(0.5, 2.0)])
    save_json(cloud, tmp_path / "p.json")
    assert load_json(tmp_path / "p.json") == cloud


def _flat(rgb, h=20, w=20):
    return RasterImage(np.broadcast_to(np.array(rgb, np.uint8), (h, w, 3)))


def test_blue_hue():
    c = sample_image_uniform(_flat((0, 0, 255)), 4)
    assert np.allclose(c.attribute_matrix(), 2 / 3)
    xy = c.xy
    assert xy.min() >= 0 and xy.max() <= 1


def test_large_stride_single_sample():
    assert len(sample_image_uniform(_flat((9, 9, 9), 5, 7), 8)) == 1


def test_stride_validated():
    with pytest.raises(ConfigError):
        sample_image_uniform(_flat((0, 0, 0)), 0)


@given(st.lists(st.tuples(*[st.integers(0, 255)] * 3), min_size=1, max_size=20))
def test_hue_rotation(rgb):
    rgb = np.array(rgb, dtype=float)
    h = hue(rgb)
    rotated = hue(rgb[:, [2, 0, 1]])
    gray = rgb.max(axis=1) == rgb.min(axis=1)
    shift = (rotated - h - 1 / 3) % 1.0
    assert np.all(np.minimum(shift, 1 - shift)[~gray] < 1e-12)
    assert np.all((h >= 0) & (h < 1))


def _flag():
    px = np.zeros((30, 40, 3), np.uint8)
    px[:, :20] = (255, 255, 0)
    px[:, 20:] = (0, 0, 255)
    return RasterImage(px)


def test_flag_two_groups():
    cloud = sample_image_uniform(_flag(), 4)
    assert sorted(set(np.round(cloud.attribute_matrix()[:, 0], 9))) == [round(1 / 6, 9), round(2 / 3, 9)]
    g = group_by_persistence(embed(quantize_binary_hue(cloud), {"hue": 10}))
    assert g.group_count == 2
    left = cloud.xy[:, 0] < 0.5
    assert len({g.labels[i] for i in np.flatnonzero(left)}) == 1
    assert g.labels[int(np.flatnonzero(left)[0])] != g.labels[int(np.flatnonzero(~left)[0])]


def test_binary_quantization():
    cloud = AttributedCloud.from_arrays([(0, 0), (1, 0), (2, 0)], {"hue": [0.15, 0.7, 0.95]})
    assert quantize_binary_hue(cloud).attribute_matrix()[:, 0].tolist() == [0, 1, 0]


def _square_image():
    px = np.full((40, 40, 3), 255, np.uint8)
    px[10:30, 10:30] = 0
    return RasterImage(px)


def test_canny_square_perimeter():
    mask = canny_mask(_square_image())
    rows, cols = np.nonzero(mask)
    assert len(rows)
    # pixel-boundary perimeter sits between pixels 9|10 and 29|30
    d_row = np.minimum(np.abs(rows - 9.5), np.abs(rows - 29.5))
    d_col = np.minimum(np.abs(cols - 9.5), np.abs(cols - 29.5))
    inside_band = (rows >= 9) & (rows <= 30) & (cols >= 9) & (cols <= 30)
    assert np.all(inside_band)
    assert np.all(np.minimum(d_row, d_col) <= 1.0)


def test_canny_constant_image_is_empty():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        assert canny_edges(_flat((40, 80, 120))) is None
    assert any("no edge pixels" in str(w.message) for w in caught)


@given(st.integers(0, 100), st.integers(0, 1000))
def test_canny_constant_offset_invariance(offset, seed):
    rng = np.random.default_rng(seed)
    px = rng.integers(0, 150, size=(24, 24, 3)).astype(np.uint8)
    a = canny_mask(RasterImage(px))
    b = canny_mask(RasterImage(px + np.uint8(offset)))
    assert np.array_equal(a, b)
    assert np.array_equal(a, canny_mask(RasterImage(px)))


def test_canny_params_validated():
    with pytest.raises(ConfigError):
        CannyParams(low_threshold=0.3, high_threshold=0.2)
    with pytest.raises(ConfigError):
        CannyParams(gaussian_sigma=0)


def test_two_rings_give_two_loops():
    yy, xx = np.mgrid[0:100, 0:140]
    px = np.full((100, 140, 3), 255, np.uint8)
    for cx in (50, 90):
        d = np.hypot(xx - cx, yy - 50)
        px[(d >= 28) & (d <= 31)] = 0
    cloud = canny_edges(RasterImage(px), decimate_radius=0.03)
    xy = cloud.xy
    assert xy.min() >= 0 and xy.max() <= 1
    assert pragnanz_summary(xy).significant_loop_count == 2


def test_decimate_spacing():
    xy = np.random.default_rng(0).random((300, 2))
    keep = decimate(xy, 0.1)
    kept = xy[keep]
    d = np.hypot(*(kept[:, None] - kept[None]).transpose(2, 0, 1))
    assert d[np.triu_indices(len(kept), 1)].min() > 0.1
    assert len(decimate(xy, 0)) == 300


def test_png_io(tmp_path):
    Image.fromarray(_flag().pixels).save(tmp_path / "f.png")
    assert load_png(tmp_path / "f.png").pixels.shape == (30, 40, 3)
    (tmp_path / "bad.png").write_bytes(b"nope")
    with pytest.raises(ParseError):
        load_png(tmp_path / "bad.png")


def test_raster_validation():
    with pytest.raises(ConfigError):
        RasterImage(np.zeros((0, 3, 3), np.uint8))
    with pytest.raises(ConfigError):
        RasterImage(np.zeros((3, 3), np.uint8))
