"""gestalt-ph command line: one subcommand per computation."""
from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from . import export, ingest
from .clustering import GestaltThreshold, InfinityPolicy, split_significant, threshold_0d, threshold_1d
from .errors import (ConfigError, DeadEndError, GestaltError, NoCommonScaleError,
                     NonTerminatingWalkError, ParseError)
from .filtration import build_vr, skeleton_at
from .geometry import AttributedCloud, EmbeddedCloud, distance_matrix, embed
from .gestalt import (close_contours, continuation_skeleton, group, is_tie_sensitive, pragnanz_summary,
                      run_0d, run_1d, trace_continuation)
from .persistence import compute_persistence, fmt


def _scale(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    try:
        return name, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"scale for {name!r} is not a number: {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    io = common.add_argument_group("input")
    io.add_argument("--input", required=True, help="CSV, JSON or PNG file")
    io.add_argument("--format", choices=("csv", "json", "png"), help="default: from the file suffix")
    io.add_argument("--scale", type=_scale, action="append", default=[], metavar="NAME=VALUE",
                    help="attribute salience; repeatable")
    io.add_argument("--stride", type=int, default=4, help="PNG sampling stride in pixels")
    io.add_argument("--canny", action="store_true", help="sample PNG edge pixels instead of a grid")
    io.add_argument("--sigma", type=float, default=1.4)
    io.add_argument("--low", type=float, default=0.1)
    io.add_argument("--high", type=float, default=0.2)
    io.add_argument("--decimate", type=float, default=0.0, help="min spacing for edge pixels (0 = off)")
    io.add_argument("--binary-hue", action="store_true", help="quantize hue to yellow=0 / blue=1")

    pl = common.add_argument_group("pipeline")
    pl.add_argument("--max-dim", type=int, default=2)
    pl.add_argument("--max-eps", type=float)
    pl.add_argument("--eps", type=float, help="override the derived threshold")
    pl.add_argument("--force", action="store_true", help="accept --eps outside the valid interval")
    pl.add_argument("--infinity", choices=("force", "replace"), default="force")
    pl.add_argument("--replace-factor", type=float, default=1.2)

    out = common.add_argument_group("output")
    out.add_argument("--out-json")
    out.add_argument("--out-svg")
    out.add_argument("--out-pd", help="persistence diagram CSV with class labels")

    p = argparse.ArgumentParser(prog="gestalt-ph", description="Gestalt principles from persistent homology.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("pd", parents=[common], help="persistence diagrams and thresholds")
    sub.add_parser("group", parents=[common], help="similarity / proximity grouping")
    cl = sub.add_parser("closure", parents=[common], help="closed contours")
    cl.add_argument("--max-loops", type=int)
    ct = sub.add_parser("continue", parents=[common], help="good-continuation walk")
    ct.add_argument("--start", required=True, help="point index or x,y")
    ct.add_argument("--end", required=True, help="point index or x,y")
    sub.add_parser("pragnanz", parents=[common], help="count significant loops")
    sub.add_parser("conflict", parents=[common], help="grouping under competing attributes")
    pre = sub.add_parser("preprocess", parents=[common], help="PNG to point CSV")
    pre.add_argument("--out", required=True, help="output CSV")
    return p


def _load(args) -> AttributedCloud:
    path = Path(args.input)
    fmt_ = args.format or path.suffix.lower().lstrip(".")
    if not path.is_file():
        raise ParseError("no such file", str(path))
    if fmt_ == "csv":
        return ingest.load_csv(path)
    if fmt_ == "json":
        return ingest.load_json(path)
    if fmt_ == "png":
        img = ingest.load_png(path)
        if args.canny:
            params = ingest.CannyParams(args.sigma, args.low, args.high)
            return ingest.canny_edges(img, params, args.decimate)
        cloud = ingest.sample_image_uniform(img, args.stride)
        return ingest.quantize_binary_hue(cloud) if args.binary_hue else cloud
    raise ConfigError(f"unknown input format {fmt_!r}; use --format csv|json|png")


def _embedded(args, cloud: AttributedCloud) -> EmbeddedCloud:
    return embed(cloud, dict(args.scale))


def _policy(args) -> InfinityPolicy:
    return InfinityPolicy.parse(args.infinity)


def _resolve_eps(args, thr: GestaltThreshold) -> float:
    if args.eps is None:
        return thr.eps_g
    if args.eps < 0:
        raise ConfigError(f"--eps must be >= 0, got {args.eps}")
    if not thr.admits(args.eps) and not args.force:
        lo, hi = thr.valid_interval
        raise ConfigError(f"--eps {fmt(args.eps)} is outside the valid interval [{fmt(lo)}, {fmt(hi)}); "
                          "pass --force to use it anyway")
    return float(args.eps)


def _write(path, text: str) -> None:
    if path:
        Path(path).write_text(text)


def _skeleton_svg(args, ec: EmbeddedCloud, eps: float, title: str, **kw) -> None:
    if not args.out_svg:
        return
    dm = distance_matrix(ec)
    f = build_vr(dm, max_dim=1, max_eps=max(float(dm.max()), eps, 1e-300))
    _write(args.out_svg, export.render_skeleton(skeleton_at(f, eps, ec.xy), title=title, **kw))


def _threshold_doc(thr: GestaltThreshold | None) -> dict | None:
    if thr is None:
        return None
    return {"eps_g": thr.eps_g, "valid_interval": list(thr.valid_interval)}


def cmd_pd(args, cloud) -> int:
    ec = _embedded(args, cloud)
    f = build_vr(distance_matrix(ec), max_dim=args.max_dim, max_eps=args.max_eps)
    res = compute_persistence(f)
    policy = _policy(args)
    csv_rows, doc, splits = ["dim,birth,death,class"], {"kind": "pd", "diagrams": []}, []
    for dim in range(max(args.max_dim, 1)):
        d = res.diagram(dim)
        if len(d) == 0:
            print(f"dim {dim}: empty")
            doc["diagrams"].append({"dim": dim, "points": [], "threshold": None})
            continue
        split = split_significant(d, policy, args.replace_factor)
        splits.append(split)
        csv_rows.extend(split.to_csv().splitlines()[1:])
        thr, where = None, "eps_g=n/a"
        try:
            if dim <= 1:
                thr = threshold_0d(split) if dim == 0 else threshold_1d(split)
                lo, hi = thr.valid_interval
                where = f"eps_g={fmt(thr.eps_g)} valid=[{fmt(lo)}, {fmt(hi)})"
        except NoCommonScaleError as exc:
            where = f"eps_g=none ({exc})"
        print(f"dim {dim}: {len(split.significant_idx)} significant, {len(split.noise_idx)} noise, {where}")
        sig = set(split.significant_idx)
        doc["diagrams"].append({
            "dim": dim,
            "points": [{"birth": b, "death": dd, "class": "significant" if i in sig else "noise"}
                       for i, (b, dd) in enumerate(split.diagram.points)],
            "threshold": _threshold_doc(thr),
        })
    _write(args.out_pd, "\n".join(csv_rows) + "\n")
    _write(args.out_json, export.dumps(doc))
    if args.out_svg and splits:
        _write(args.out_svg, export.render_diagrams(splits))
    return 0


def _grouping(args, cloud, kind: str) -> int:
    ec = _embedded(args, cloud)
    run = run_0d(ec, _policy(args), args.replace_factor, args.max_eps)
    eps = _resolve_eps(args, run.threshold)
    g = group(ec, eps, is_tie_sensitive(run.split), run.split.significant)
    doc = g.to_dict()
    if kind == "conflict":
        doc["scales"] = dict(args.scale)
    doc["threshold"] = _threshold_doc(run.threshold)
    print(f"{g.group_count} groups at eps={fmt(eps)}" + (" (tie-sensitive)" if g.tie_sensitive else ""))
    _write(args.out_json, export.dumps(doc))
    _write(args.out_pd, run.split.to_csv())
    _skeleton_svg(args, ec, eps, f"{g.group_count} groups", labels=g.labels)
    return 0


def cmd_group(args, cloud) -> int:
    return _grouping(args, cloud, "grouping")


def cmd_conflict(args, cloud) -> int:
    if not args.scale:
        raise ConfigError("conflict needs at least one --scale name=value")
    return _grouping(args, cloud, "conflict")


def cmd_closure(args, cloud) -> int:
    ec = _embedded(args, cloud)
    run = run_1d(ec, _policy(args), args.replace_factor, args.max_dim, args.max_eps, strict=False)
    if run.split is not None and run.threshold is None:
        pts = run.split.diagram.points
        t_b = float(max(pts[i, 0] for i in run.split.significant_idx))
        _skeleton_svg(args, ec, t_b, "no common scale")
    loops = close_contours(ec, args.max_loops, run=run)
    _write(args.out_pd, run.split.to_csv())
    eps = _resolve_eps(args, run.threshold)
    doc = {"kind": "loops", "eps_g": eps, "threshold": _threshold_doc(run.threshold),
           "loops": [lp.to_dict() for lp in loops]}
    print(f"{len(loops)} loops at eps={fmt(eps)}")
    _write(args.out_json, export.dumps(doc))
    _skeleton_svg(args, ec, eps, f"{len(loops)} loops", loops=[lp.vertices for lp in loops])
    return 0


def cmd_pragnanz(args, cloud) -> int:
    ec = _embedded(args, cloud)
    s = pragnanz_summary(ec, _policy(args), args.replace_factor, args.max_dim, args.max_eps)
    doc = s.to_dict()
    print(f"{s.significant_loop_count} significant loops" + (" (all noise)" if s.all_noise else ""))
    _write(args.out_json, export.dumps(doc))
    if args.out_svg:
        eps = max((lp.birth for lp in s.loops), default=s.noise_band)
        _skeleton_svg(args, ec, eps, f"{s.significant_loop_count} loops", loops=[lp.vertices for lp in s.loops])
    return 0


def _vertex(token: str, xy: np.ndarray) -> int:
    token = token.strip()
    if "," in token:
        try:
            p = np.array([float(t) for t in token.split(",")])
        except ValueError:
            raise ConfigError(f"bad point {token!r}; use an index or x,y") from None
        if p.shape != (2,):
            raise ConfigError(f"bad point {token!r}; use an index or x,y")
        return int(np.argmin(np.hypot(*(xy - p).T)))
    try:
        i = int(token)
    except ValueError:
        raise ConfigError(f"bad vertex {token!r}; use an index or x,y") from None
    if not 0 <= i < len(xy):
        raise ConfigError(f"vertex {i} out of range 0..{len(xy) - 1}")
    return i


def cmd_continue(args, cloud) -> int:
    ec = _embedded(args, cloud)
    start, end = _vertex(args.start, ec.xy), _vertex(args.end, ec.xy)
    policy = _policy(args)
    run = run_1d(ec, policy, args.replace_factor, args.max_dim, args.max_eps, strict=False)
    if run.threshold is None:
        run = run_0d(ec, policy, args.replace_factor, args.max_eps)
    eps = _resolve_eps(args, run.threshold)
    sk, eps = continuation_skeleton(ec, eps)
    try:
        line = trace_continuation(sk, start, end)
    except (DeadEndError, NonTerminatingWalkError) as exc:
        _write(args.out_svg, export.render_skeleton(sk, paths=[exc.path], title=str(exc)))
        raise
    doc = {"kind": "polyline", "eps_g": eps, "start": start, "end": end, **line.to_dict()}
    print(f"path of {len(line.vertices)} vertices at eps={fmt(eps)}")
    _write(args.out_json, export.dumps(doc))
    _write(args.out_svg, export.render_skeleton(sk, paths=[line.vertices], title="continuation"))
    return 0


def cmd_preprocess(args, cloud) -> int:
    if cloud is None:
        Path(args.out).write_text("x,y\n")
        print("0 points")
        return 0
    ingest.save_csv(cloud, args.out)
    print(f"{len(cloud)} points")
    return 0


COMMANDS = {
    "pd": cmd_pd, "group": cmd_group, "closure": cmd_closure, "continue": cmd_continue,
    "pragnanz": cmd_pragnanz, "conflict": cmd_conflict, "preprocess": cmd_preprocess,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            cloud = _load(args)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        if cloud is None and args.command != "preprocess":
            raise ConfigError("input produced no points")
        return COMMANDS[args.command](args, cloud)
    except GestaltError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ConfigError.exit_code


if __name__ == "__main__":
    sys.exit(main())
