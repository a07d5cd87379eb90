"""Command-line interface.

Subcommands: map, detect, bench, simulate, probe.  Every run is a pure
pipeline: identical inputs, flags and seed produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import _backend as bk
from .asplund_add import AddProbeContext, map_add_direct, map_add_flat, map_add_morpho
from .asplund_mult import (
    MultProbeContext,
    map_mult_direct,
    map_mult_flat,
    map_mult_morpho,
)
from .bench import bench, bench_backends
from .detection import DetectConfig, DetectMethod, detect
from .io import (
    KIND_IMAGE,
    read_image_any,
    write_map,
    write_pgm,
    write_raw,
)
from .lip import GreyImage, RangeMode, complement, lip_neg
from .probes import parse_probe_spec, save_probe
from .synth import gen_noisy_plane, simulate_add_darken, simulate_mul_darken

MAP_FUNCS = {
    ("mult", "direct"): map_mult_direct,
    ("mult", "morpho"): map_mult_morpho,
    ("mult", "flat"): map_mult_flat,
    ("add", "direct"): map_add_direct,
    ("add", "morpho"): map_add_morpho,
    ("add", "flat"): map_add_flat,
}


def _add_common_map_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--image", required=True, help="input image (PGM or raw container)")
    p.add_argument("--probe", required=True, help="probe spec (see `probe --help`)")
    p.add_argument("--metric", choices=["mult", "add"], default="mult")
    p.add_argument("--impl", choices=["direct", "morpho", "flat"], default="morpho")
    p.add_argument("--p", type=float, default=1.0, help="tolerance in ]0, 1]")
    p.add_argument("--complement", action="store_true",
                   help="complement image and probe (bright-target convention)")
    p.add_argument("--M", type=float, default=256.0, help="grey-scale upper bound")
    p.add_argument("--clamp", type=float, default=0.5,
                   help="clamp width for the multiplicative metric")
    p.add_argument("--backend", choices=["auto", "c", "python"], default="auto")


def _compute_map(args):
    bk.set_backend(args.backend)
    img = read_image_any(args.image)
    probe = parse_probe_spec(args.probe, m=args.M)
    values = img.values
    if args.complement:
        if img.range_mode is not RangeMode.IMAGE:
            raise SystemExit("cannot complement an image with negative values")
        values = complement(values, args.M)
        probe = type(probe)(probe.offsets, complement(probe.values, args.M), probe.scale)
    fn = MAP_FUNCS[(args.metric, args.impl)]
    if args.metric == "mult":
        ctx = MultProbeContext(probe, args.p)
        return fn(values, ctx, clamp_eps=args.clamp)
    ctx = AddProbeContext(probe, args.p)
    return fn(values, ctx)


def _cmd_map(args) -> int:
    dist_map = _compute_map(args)
    write_map(dist_map, args.out, args.format)
    print(f"wrote {args.metric}/{args.impl} map ({dist_map.shape[1]}x{dist_map.shape[0]}) to {args.out}")
    return 0


def _cmd_detect(args) -> int:
    dist_map = _compute_map(args)
    if args.map_out:
        write_map(dist_map, args.map_out, "raw")
    cfg = DetectConfig(
        method=DetectMethod(args.method),
        percentile=args.percentile,
        h=args.h,
        min_area=args.min_area,
        max_area=args.max_area,
    )
    found = detect(dist_map, cfg)
    with open(args.out, "w", newline="") as fh:
        fh.write("row,col,distance,area\r\n")
        for d in found:
            fh.write(f"{d.position[0]},{d.position[1]},{d.distance:.9g},{d.area}\r\n")
    print(f"{len(found)} detection(s) written to {args.out}")
    return 0


def _cmd_bench(args) -> int:
    bk.set_backend(args.backend)
    if args.image:
        values = read_image_any(args.image).values
    else:
        from .synth import make_bench_scene

        h, w = (int(t) for t in args.synthetic.split("x"))
        values, _ = make_bench_scene(w, h, seed=args.seed)
    probe = parse_probe_spec(args.probe, m=args.M)
    result = bench(values, probe, args.metric, args.p, args.reps, args.clamp, seed=args.seed)
    if args.compare_backends:
        result.extras["backend comparison (morpho path)"] = bench_backends(
            values, probe, args.metric, args.p, args.reps, args.clamp
        )
    print(result.summary())
    if args.json:
        payload = {
            "metric": result.metric, "p": result.p,
            "image": list(result.image_shape), "probe_size": result.probe_size,
            "repetitions": result.repetitions, "direct_s": result.direct_s,
            "morpho_s": result.morpho_s, "gain_factor": result.gain_factor,
            "max_abs_diff": result.max_abs_diff, "backend": result.backend,
            "seed": result.seed, "extras": result.extras,
        }
        with open(args.json, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def _cmd_simulate(args) -> int:
    if args.noisy_plane:
        w, h, value, rho, sigma = args.noisy_plane.split(",")
        f, g = gen_noisy_plane(int(w), int(h), float(value), float(rho), float(sigma),
                               seed=args.seed, m=args.M)
        write_raw(f, args.out, KIND_IMAGE)
        write_raw(g, args.out + ".plane", KIND_IMAGE)
        print(f"noisy plane (seed={args.seed}) -> {args.out}, plane -> {args.out}.plane")
        return 0
    img = read_image_any(args.image)
    if args.mul_darken is not None:
        out = simulate_mul_darken(img, args.mul_darken, not args.no_complement, m=args.M)
    else:
        k = args.add_darken if args.add_darken is not None else float(lip_neg(args.opposite_of, args.M))
        out = simulate_add_darken(img, k, m=args.M)
    if isinstance(out, GreyImage) and out.range_mode is RangeMode.IMAGE and args.out.endswith(".pgm"):
        write_pgm(out, args.out)
    else:
        write_raw(out.values if isinstance(out, GreyImage) else out, args.out, KIND_IMAGE)
    print(f"simulated image -> {args.out}")
    return 0


def _cmd_probe(args) -> int:
    probe = parse_probe_spec(args.spec, m=args.M)
    save_probe(probe, args.out)
    print(f"{probe.describe()} -> {args.out}")
    if args.render:
        grid, mask, _ = probe.to_dense()
        canvas = np.zeros(grid.shape)
        canvas[mask] = grid[mask]
        write_pgm(canvas, args.render)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="lipmatch",
                                     description="illumination-invariant pattern matching")
    sub = parser.add_subparsers(dest="command", required=True)

    p_map = sub.add_parser("map", help="compute a distance map")
    _add_common_map_args(p_map)
    p_map.add_argument("--out", required=True)
    p_map.add_argument("--format", choices=["raw", "csv", "png"], default="raw")
    p_map.set_defaults(fn=_cmd_map)

    p_det = sub.add_parser("detect", help="compute a map and extract detections")
    _add_common_map_args(p_det)
    p_det.add_argument("--out", required=True, help="detections CSV")
    p_det.add_argument("--map-out", default=None, help="also save the map (raw)")
    p_det.add_argument("--method", choices=[m.value for m in DetectMethod], default="both")
    p_det.add_argument("--percentile", type=float, default=37.0)
    p_det.add_argument("--h", type=float, default=None)
    p_det.add_argument("--min-area", type=int, default=1)
    p_det.add_argument("--max-area", type=int, default=None)
    p_det.set_defaults(fn=_cmd_detect)

    p_bench = sub.add_parser("bench", help="time direct vs morphological paths")
    p_bench.add_argument("--image", default=None)
    p_bench.add_argument("--synthetic", default="918x1224", metavar="HxW",
                         help="generate a random image of this size instead of --image")
    p_bench.add_argument("--probe", default="ring+disk")
    p_bench.add_argument("--metric", choices=["mult", "add"], default="mult")
    p_bench.add_argument("--p", type=float, default=1.0)
    p_bench.add_argument("--M", type=float, default=256.0)
    p_bench.add_argument("--clamp", type=float, default=0.5)
    p_bench.add_argument("--reps", type=int, default=3)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--backend", choices=["auto", "c", "python"], default="auto")
    p_bench.add_argument("--compare-backends", action="store_true",
                         help="also time the numpy fallback against the C kernels")
    p_bench.add_argument("--json", default=None, help="write the report as JSON")
    p_bench.set_defaults(fn=_cmd_bench)

    p_sim = sub.add_parser("simulate", help="simulate lighting changes / generate noisy planes")
    p_sim.add_argument("--image", default=None)
    p_sim.add_argument("--out", required=True)
    p_sim.add_argument("--M", type=float, default=256.0)
    p_sim.add_argument("--seed", type=int, default=0)
    group = p_sim.add_mutually_exclusive_group(required=True)
    group.add_argument("--mul-darken", type=float, default=None, metavar="ALPHA")
    group.add_argument("--add-darken", type=float, default=None, metavar="K")
    group.add_argument("--opposite-of", type=float, default=None, metavar="V",
                       help="LIP-add the opposite of V (strong darkening)")
    group.add_argument("--noisy-plane", default=None, metavar="W,H,VALUE,RHO,SIGMA")
    p_sim.add_argument("--no-complement", action="store_true",
                       help="multiplicative darkening without the complement convention")
    p_sim.set_defaults(fn=_cmd_simulate)

    p_probe = sub.add_parser("probe", help="build or extract a probe")
    p_probe.add_argument("--spec", required=True)
    p_probe.add_argument("--out", required=True, help="probe CSV")
    p_probe.add_argument("--render", default=None, help="optional PGM rendering")
    p_probe.add_argument("--M", type=float, default=256.0)
    p_probe.set_defaults(fn=_cmd_probe)

    args = parser.parse_args(argv)
    if getattr(args, "command", None) == "simulate" and not args.noisy_plane and not args.image:
        parser.error("simulate needs --image unless --noisy-plane is used")
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
