"""Command line entry point: ``ddfkit <subcommand> --scene <json> --out <path> [options]``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from .consistency import Tolerances, run_checks
from .data import DESK_COUNTS, FULL_COUNTS, SamplerConfig, sample_batch, write_binary, write_csv
from .imageio import write_pfm, write_ppm
from .render import QUANTITIES, SphereTraceConfig, bench_queries, preview, render_geometry, sample_point_cloud
from .scene import Scene, bundled_scene_path, load_scene
from .tracer import BounceStats, Iaddf, postprocess, render_trace
from .udf import medial_flags, mdf_optimize

AXES = {"x": 0, "y": 1, "z": 2}


class CliError(Exception):
    pass


def _scene(arg: str) -> Scene:
    path = Path(arg)
    if not path.exists() and not arg.endswith(".json"):
        path = bundled_scene_path(arg)
    if not path.exists():
        raise CliError(f"scene file not found: {arg}")
    return load_scene(path)


def _emit(obj: dict, out: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _summary(obj: dict) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def cmd_render(args, scene: Scene) -> int:
    cam = scene.camera(args.width, args.height)
    r = render_geometry(scene.field, cam, args.quantity, scene.domain)
    write_pfm(args.out, r.image)
    if args.preview:
        write_ppm(args.preview, preview(r.image, args.quantity))
    _summary({"quantity": args.quantity, "pixels": cam.width * cam.height, "queries": r.queries, "out": str(args.out)})
    return 0


def cmd_trace(args, scene: Scene) -> int:
    cam = scene.camera(args.width, args.height)
    cfg = scene.trace_config(args.seed, args.bounces, args.samples)
    iaddf = Iaddf(scene.field, scene.spec.material.build(), scene.spec.lighting.build(), scene.domain)
    stats = BounceStats()
    img, _ = render_trace(iaddf, cam, cfg, stats)
    write_pfm(args.out, img)
    if args.preview:
        write_ppm(args.preview, postprocess(img, cfg.blur_sigma, cfg.gamma))
    _summary({"pixels": cam.width * cam.height, "bounces": cfg.n_bounces, "samples": cfg.mc_samples,
              "gaussian_fallbacks": stats.gaussian_fallbacks, "degenerate_normals": stats.degenerate_normals})
    return 0


def _parse_counts(text: str | None, scene: Scene):
    spec = text if text is not None else scene.spec.sampler.counts
    if isinstance(spec, dict):
        return spec
    if spec == "desk":
        return DESK_COUNTS
    if spec == "full":
        return FULL_COUNTS
    try:
        return {k.strip().upper(): int(v) for k, v in (item.split("=") for item in spec.split(","))}
    except ValueError as exc:
        raise CliError(f"bad --counts {spec!r}: use a preset name or explicit U=...,A=... counts") from exc


def cmd_sample_data(args, scene: Scene) -> int:
    counts = _parse_counts(args.counts, scene)
    s = scene.spec.sampler
    batch = sample_batch(counts, scene.induced, scene.domain, SamplerConfig(s.epsilon_O, s.boundary_bias, args.seed))
    fmt = args.format or ("csv" if str(args.out).endswith(".csv") else "binary")
    (write_csv if fmt == "csv" else write_binary)(batch, args.out)
    _summary({"records": len(batch), "format": fmt, "out": str(args.out)})
    return 0


def slice_grid(scene: Scene, resolution: int, axis: str, offset: float) -> np.ndarray:
    """``resolution^2`` points on an axis-aligned slice of the inner domain, row-major."""
    dom = scene.domain
    a = AXES[axis]
    u, w = [k for k in range(3) if k != a]
    su = np.linspace(dom.inner_min[u], dom.inner_max[u], resolution)
    sw = np.linspace(dom.inner_max[w], dom.inner_min[w], resolution)  # image rows go top-down
    gw, gu = np.meshgrid(sw, su, indexing="ij")
    p = np.zeros((resolution * resolution, 3))
    p[:, u] = gu.ravel()
    p[:, w] = gw.ravel()
    p[:, a] = offset
    return p


def cmd_extract_udf(args, scene: Scene) -> int:
    spec = scene.spec.udf
    res = args.resolution or spec.resolution
    axis = args.axis or spec.axis
    offset = spec.offset if args.offset is None else args.offset
    cfg = scene.udf_config()
    p = slice_grid(scene, res, axis, offset)
    r = mdf_optimize(scene.field, p, cfg, rng=np.random.default_rng(args.seed), strict=False)
    medial = medial_flags(scene.field, p, cfg)
    out = Path(args.out)
    table = np.column_stack([p, r.v_star, r.udf, medial.astype(np.float64)])
    header = "px,py,pz,vx,vy,vz,udf,medial"
    np.savetxt(out, table, delimiter=",", header=header, comments="", fmt=["%.17g"] * 7 + ["%d"])
    write_pfm(out.with_suffix(".udf.pfm"), r.udf.reshape(res, res))
    write_pfm(out.with_suffix(".vstar.pfm"), r.v_star.reshape(res, res, 3))
    _summary({"points": len(p), "medial": int(medial.sum()), "out": str(out)})
    return 0


def cmd_check_consistency(args, scene: Scene) -> int:
    c = scene.spec.consistency
    tol = Tolerances(io_dirs=c.io_dirs, probes_per_check=args.probes or c.probes_per_check)
    report = run_checks(scene.field, scene.domain, tol, seed=args.seed)
    doc = report.to_dict()
    doc["scene"] = scene.spec.name
    _emit(doc, args.out)
    return 0 if report.passed else 1


def cmd_sample_cloud(args, scene: Scene) -> int:
    cfg = scene.cloud_config(args.n_points)
    if args.hops:
        cfg = type(cfg)(cfg.n_v, args.hops, cfg.epsilon_p, cfg.n_points)
    pts = sample_point_cloud(scene.field, scene.domain, cfg, np.random.default_rng(args.seed))
    np.savetxt(args.out, pts, delimiter=",", header="x,y,z", comments="", fmt="%.17g")
    _summary({"points": len(pts), "out": str(args.out)})
    return 0


def cmd_bench_queries(args, scene: Scene) -> int:
    cam = scene.camera(args.width or 128, args.height or 128)
    rep = bench_queries(scene.field, cam, scene.domain, SphereTraceConfig(udf_dirs=args.udf_dirs))
    rep["scene"] = scene.spec.name
    _emit(rep, args.out)
    return 0


COMMANDS = {
    "render": cmd_render,
    "trace": cmd_trace,
    "sample-data": cmd_sample_data,
    "extract-udf": cmd_extract_udf,
    "check-consistency": cmd_check_consistency,
    "sample-cloud": cmd_sample_cloud,
    "bench-queries": cmd_bench_queries,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ddfkit", description="Directed distance field tools.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    def add(name: str, help_text: str, out_required: bool = True):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--scene", required=True, help="scene JSON path or bundled scene name")
        p.add_argument("--out", required=out_required, help="output path")
        p.add_argument("--seed", type=int, default=0, help="RNG seed (u64)")
        return p

    p = add("render", "one-query-per-pixel geometry render to PFM")
    p.add_argument("--quantity", choices=QUANTITIES, default="depth")
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--preview", help="also write a PPM preview here")

    p = add("trace", "Monte-Carlo path trace to HDR PFM")
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--bounces", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--preview", help="also write the post-processed PPM here")

    p = add("sample-data", "labelled training samples (binary records or CSV)")
    p.add_argument("--counts", help="desk, full or U=..,A=..,B=..,S=..,T=..,O=..")
    p.add_argument("--format", choices=("binary", "csv"))

    p = add("extract-udf", "UDF and nearest-surface directions on a slice (CSV plus PFM)")
    p.add_argument("--resolution", type=int)
    p.add_argument("--axis", choices=tuple(AXES))
    p.add_argument("--offset", type=float)

    p = add("check-consistency", "view-consistency report (JSON); exit 1 on any violation", out_required=False)
    p.add_argument("--probes", type=int, help="probes per check")

    p = add("sample-cloud", "surface point cloud (CSV)")
    p.add_argument("--n-points", type=int)
    p.add_argument("--hops", type=int, help="override the number of hops N_H")

    p = add("bench-queries", "query counts: DDF depth render vs sphere tracing a brute-force UDF", out_required=False)
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--udf-dirs", type=int, default=64, help="directions per brute-force UDF evaluation")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        scene = _scene(args.scene)
        return COMMANDS[args.command](args, scene)
    except (CliError, ValidationError, FileNotFoundError, ValueError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"ddfkit {args.command}: error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
