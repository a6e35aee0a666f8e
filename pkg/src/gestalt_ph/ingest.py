"""Point sets from CSV/JSON files and from raster images."""
from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from .errors import ConfigError, ParseError
from .geometry import AttributedCloud, AttributedPoint

# integer luma weights (x1000) keep grayscale exact, so a constant channel offset cancels
LUMA = (299, 587, 114)
YELLOW_HUE = 1 / 6
BLUE_HUE = 2 / 3


@dataclass(frozen=True, eq=False)
class RasterImage:
    """8-bit RGB pixels, shape (height, width, 3), row 0 at the top."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 3 or px.shape[0] < 1 or px.shape[1] < 1:
            raise ConfigError(f"expected (h, w, 3) pixels, got shape {px.shape}")
        if px.dtype != np.uint8:
            if px.min() < 0 or px.max() > 255:
                raise ConfigError("pixel values must lie in [0, 255]")
            px = px.astype(np.uint8)
        px = px.copy()
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True)
class CannyParams:
    gaussian_sigma: float = 1.4
    low_threshold: float = 0.1
    high_threshold: float = 0.2

    def __post_init__(self):
        if not self.gaussian_sigma > 0:
            raise ConfigError(f"sigma must be > 0, got {self.gaussian_sigma}")
        if not 0 < self.low_threshold < self.high_threshold < 1:
            raise ConfigError(
                f"need 0 < low < high < 1, got low={self.low_threshold}, high={self.high_threshold}")


# -- tabular ---------------------------------------------------------------

def load_csv(path) -> AttributedCloud:
    """Header ``x,y[,attr...]`` then one numeric row per point."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or not any(c.strip() for c in rows[0]):
        raise ParseError("missing header row", "line 1")
    header = [c.strip() for c in rows[0]]
    if header[:2] != ["x", "y"]:
        raise ParseError(f"header must start with x,y; got {','.join(header)}", "line 1")
    names = header[2:]
    if len(set(names)) != len(names) or any(not n for n in names):
        raise ParseError(f"attribute names must be unique and non-empty: {names}", "line 1")
    pts = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", f"line {lineno}")
        try:
            vals = [float(c) for c in row]
        except ValueError:
            raise ParseError(f"non-numeric cell in {row}", f"line {lineno}") from None
        if not all(math.isfinite(v) for v in vals):
            raise ParseError(f"non-finite value in {row}", f"line {lineno}")
        pts.append(AttributedPoint(vals[0], vals[1], tuple(zip(names, vals[2:]))))
    if not pts:
        raise ParseError("no data rows", f"line {len(rows) + 1}")
    return AttributedCloud(tuple(pts))


def save_csv(cloud: AttributedCloud, path) -> None:
    """Shortest round-tripping float text, so load_csv(save_csv(c)) == c bit for bit."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", *cloud.attr_names])
        for p in cloud.points:
            w.writerow([repr(p.x), repr(p.y), *(repr(v) for _, v in p.attrs)])


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ParseError(f"expected a finite number, got {value!r}", where)
    return float(value)


def cloud_from_json(doc) -> AttributedCloud:
    if not isinstance(doc, dict) or "points" not in doc:
        raise ParseError('expected an object with a "points" array', "$")
    items = doc["points"]
    if not isinstance(items, list):
        raise ParseError("expected an array", "$.points")
    if not items:
        raise ParseError("a cloud needs at least one point", "$.points")
    pts = []
    names = None
    for i, item in enumerate(items):
        where = f"$.points[{i}]"
        if not isinstance(item, dict):
            raise ParseError("expected an object", where)
        for key in ("x", "y"):
            if key not in item:
                raise ParseError(f"missing {key!r}", where)
        attrs = item.get("attrs", {})
        if not isinstance(attrs, dict):
            raise ParseError("expected an object", f"{where}.attrs")
        if names is None:
            names = tuple(attrs)
        elif tuple(attrs) != names:
            raise ParseError(f"attributes {list(attrs)} differ from {list(names)}", f"{where}.attrs")
        values = tuple((k, _number(v, f"{where}.attrs.{k}")) for k, v in attrs.items())
        pts.append(AttributedPoint(_number(item["x"], f"{where}.x"), _number(item["y"], f"{where}.y"), values))
    return AttributedCloud(tuple(pts))


def load_json(path) -> AttributedCloud:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}") from None
    return cloud_from_json(doc)


def cloud_to_json(cloud: AttributedCloud) -> dict:
    return {"points": [{"x": p.x, "y": p.y, "attrs": dict(p.attrs)} for p in cloud.points]}


def save_json(cloud: AttributedCloud, path) -> None:
    Path(path).write_text(json.dumps(cloud_to_json(cloud), indent=1) + "\n")


# -- raster ----------------------------------------------------------------

def load_png(path) -> RasterImage:
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(path) as im:
            return RasterImage(np.asarray(im.convert("RGB")))
    except (OSError, UnidentifiedImageError) as exc:
        raise ParseError(f"cannot decode image: {exc}", str(path)) from None


def hue(rgb) -> np.ndarray:
    """HSV hue in [0, 1) for an (..., 3) array; gray pixels get hue 0."""
    c = np.asarray(rgb, dtype=float)
    r, g, b = c[..., 0], c[..., 1], c[..., 2]
    mx, mn = c.max(axis=-1), c.min(axis=-1)
    delta = mx - mn
    safe = np.where(delta > 0, delta, 1.0)
    h = np.where(mx == r, ((g - b) / safe) % 6.0,
                 np.where(mx == g, (b - r) / safe + 2.0, (r - g) / safe + 4.0))
    return np.where(delta > 0, (h / 6.0) % 1.0, 0.0)


def _pixel_xy(rows: np.ndarray, cols: np.ndarray, img: RasterImage) -> np.ndarray:
    """Pixel centers to the unit square: x = column, y grows upward, image frame scaled by its longer side."""
    extent = max(img.width, img.height) - 1 or 1
    return np.column_stack([cols / extent, (img.height - 1 - rows) / extent]).astype(float)


def sample_image_uniform(img: RasterImage, stride: int = 4) -> AttributedCloud:
    """Grid samples every ``stride`` pixels, each carrying its ``hue``."""
    if int(stride) != stride or stride < 1:
        raise ConfigError(f"stride must be a positive integer, got {stride}")
    rows, cols = np.meshgrid(np.arange(0, img.height, stride), np.arange(0, img.width, stride), indexing="ij")
    rows, cols = rows.ravel(), cols.ravel()
    h = hue(img.pixels[rows, cols])
    return AttributedCloud.from_arrays(_pixel_xy(rows, cols, img), {"hue": h})


def quantize_binary_hue(cloud: AttributedCloud, name: str = "hue") -> AttributedCloud:
    """Hue closer (on the color circle) to yellow becomes 0, closer to blue becomes 1."""
    if name not in cloud.attr_names:
        raise ConfigError(f"cloud has no {name!r} attribute")

    def circ(a, b):
        d = abs(a - b) % 1.0
        return min(d, 1.0 - d)

    pts = []
    for p in cloud.points:
        attrs = tuple((k, float(circ(v, BLUE_HUE) < circ(v, YELLOW_HUE)) if k == name else v) for k, v in p.attrs)
        pts.append(AttributedPoint(p.x, p.y, attrs))
    return AttributedCloud(tuple(pts))


def grayscale(img: RasterImage) -> np.ndarray:
    px = img.pixels.astype(np.int64)
    return px[..., 0] * LUMA[0] + px[..., 1] * LUMA[1] + px[..., 2] * LUMA[2]


def canny_mask(img: RasterImage, p: CannyParams = CannyParams()) -> np.ndarray:
    """Boolean edge map: blur, Sobel, non-maximum suppression, double threshold, hysteresis."""
    gray = grayscale(img)
    gray = (gray - gray.min()).astype(float) / (255.0 * sum(LUMA))
    smooth = ndimage.gaussian_filter(gray, p.gaussian_sigma, mode="nearest")
    gx = ndimage.sobel(smooth, axis=1, mode="nearest")
    gy = ndimage.sobel(smooth, axis=0, mode="nearest")
    mag = np.hypot(gx, gy)
    top = mag.max()
    if top <= 0:
        return np.zeros(mag.shape, dtype=bool)

    # quantize the gradient direction into 0, 45, 90, 135 degrees
    angle = np.rad2deg(np.arctan2(gy, gx)) % 180.0
    sector = (np.floor((angle + 22.5) / 45.0).astype(int)) % 4
    offsets = ((0, 1), (1, 1), (1, 0), (1, -1))
    padded = np.pad(mag, 1)
    h, w = mag.shape
    keep = np.zeros_like(mag, dtype=bool)
    for s, (dr, dc) in enumerate(offsets):
        fwd = padded[1 + dr:1 + dr + h, 1 + dc:1 + dc + w]
        back = padded[1 - dr:1 - dr + h, 1 - dc:1 - dc + w]
        keep |= (sector == s) & (mag >= fwd) & (mag >= back)
    thin = np.where(keep, mag, 0.0)

    strong = thin >= p.high_threshold * top
    weak = thin >= p.low_threshold * top
    labels, count = ndimage.label(weak, structure=np.ones((3, 3), dtype=int))
    if count == 0:
        return strong
    connected = np.zeros(count + 1, dtype=bool)
    connected[np.unique(labels[strong])] = True
    connected[0] = False
    return connected[labels]


def decimate(xy: np.ndarray, radius: float) -> np.ndarray:
    """Greedy min-distance thinning in input order; returns the kept indices."""
    if radius <= 0 or len(xy) == 0:
        return np.arange(len(xy))
    tree = cKDTree(xy)
    alive = np.ones(len(xy), dtype=bool)
    kept = []
    for i in range(len(xy)):
        if not alive[i]:
            continue
        kept.append(i)
        alive[tree.query_ball_point(xy[i], radius)] = False
    return np.asarray(kept, dtype=np.int64)


def canny_edges(img: RasterImage, p: CannyParams = CannyParams(),
                decimate_radius: float = 0.0) -> AttributedCloud | None:
    """Edge pixels as a planar cloud in the unit square; None (with a warning) if there are none."""
    rows, cols = np.nonzero(canny_mask(img, p))
    if len(rows) == 0:
        warnings.warn("no edge pixels found", RuntimeWarning, stacklevel=2)
        return None
    xy = _pixel_xy(rows, cols, img)
    if decimate_radius > 0:
        xy = xy[decimate(xy, decimate_radius)]
    return AttributedCloud.from_arrays(xy)
