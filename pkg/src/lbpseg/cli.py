"""Command-line entry point: ``lbpseg {segment,evaluate,lbp-stats,bench}``."""

from __future__ import annotations

import argparse
import logging
import sys
import time

import numpy as np

from .errors import LbpSegError, UnsegmentableError
from .harness import (
    apply_exclusions,
    evaluate_dataset,
    format_table,
    load_manifest,
    overlay_contour,
    read_exclusions,
    summarize_records,
    write_report,
)
from .lbp import lbp_map, presence_analysis, write_presence_csv
from .metrics import border_error, fpr, g_perp, tdr
from .pipeline import PipelineConfig, run_pipeline
from .raster import load_mask, load_rgb, save_mask_png, save_rgb_png, to_luminance

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNSEGMENTABLE = 2


def _add_pipeline_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--variant", choices=("ab", "zn"), default="ab", help="feature space (default: ab)")
    p.add_argument("--sigma", type=float, default=8.0, help="Gaussian sigma in pixels for the flatness map (default: 8)")
    p.add_argument("--seed", type=int, default=0, help="K-means RNG seed (default: 0)")
    p.add_argument("--restarts", type=int, default=5, help="K-means restarts (default: 5)")
    p.add_argument("--max-iter", type=int, default=100, help="Lloyd iteration cap (default: 100)")
    p.add_argument("--tol", type=float, default=1e-4, help="relative centroid-shift stop threshold (default: 1e-4)")


def _config(args, postprocess: bool = True) -> PipelineConfig:
    return PipelineConfig(
        sigma=args.sigma,
        variant=args.variant,
        seed=args.seed,
        restarts=args.restarts,
        max_iter=args.max_iter,
        tol=args.tol,
        postprocess=postprocess,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lbpseg", description="LBP-clustering segmentation of dermoscopic images")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress and clustering diagnostics")
    sub = parser.add_subparsers(dest="command", required=True)

    seg = sub.add_parser("segment", help="segment a single image")
    seg.add_argument("image")
    seg.add_argument("--gt", help="ground-truth mask; prints BE/TDR/FPR/G_perp when given")
    seg.add_argument("--out", help="write the mask here (PNG, 0 = skin, 255 = lesion)")
    seg.add_argument("--overlay", help="write the input with a red contour here")
    seg.add_argument("--no-postprocess", action="store_true", help="skip component selection and hole filling")
    _add_pipeline_args(seg)

    ev = sub.add_parser("evaluate", help="segment and score every image in a manifest")
    ev.add_argument("--manifest", required=True, help="CSV with image_id,image_path,mask_path,class")
    ev.add_argument("--exclude", help="file of image ids forming the complement of the filtered subset")
    ev.add_argument("--report", required=True, help="per-image CSV; summaries go to <stem>.summary.csv")
    ev.add_argument("--masks-dir", help="write every predicted mask here")
    ev.add_argument("--jobs", type=int, default=1, help="worker processes (default: 1)")
    _add_pipeline_args(ev)

    st = sub.add_parser("lbp-stats", help="per-class LBP presence inside/outside the lesion")
    st.add_argument("image")
    st.add_argument("--gt", required=True)
    st.add_argument("--out", required=True)

    bench = sub.add_parser("bench", help="time the full pipeline on one image")
    bench.add_argument("image")
    bench.add_argument("--iters", type=int, default=5)
    _add_pipeline_args(bench)
    return parser


def cmd_segment(args) -> int:
    img = load_rgb(args.image)
    try:
        seg = run_pipeline(img, _config(args, postprocess=not args.no_postprocess))
    except UnsegmentableError as exc:
        print(f"unsegmentable: {exc}", file=sys.stderr)
        return EXIT_UNSEGMENTABLE
    c = seg.clusters
    logging.getLogger("lbpseg").info(
        "centroids %s, sse %.6g, iterations %d", np.round(c.centroids, 4).tolist(), c.sse, c.iterations
    )
    if args.out:
        save_mask_png(seg.mask, args.out)
    if args.overlay:
        save_rgb_png(overlay_contour(img, seg.mask), args.overlay)
    if args.gt:
        gt = load_mask(args.gt)
        print(f"be={border_error(seg.mask, gt):.6f}")
        print(f"tdr={tdr(seg.mask, gt):.6f}")
        print(f"fpr={fpr(seg.mask, gt):.6f}")
        print(f"g_perp={g_perp(seg.mask, seg.luminance):.6f}")
        print(f"g_perp_gt={g_perp(gt, seg.luminance):.6f}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    records = load_manifest(args.manifest)
    excluded = read_exclusions(args.exclude) if args.exclude else []
    evaluation = evaluate_dataset(records, _config(args), jobs=args.jobs, masks_dir=args.masks_dir)
    filtered = None
    if args.exclude:
        keep = {r.image_id for r in apply_exclusions(records, excluded)}
        filtered = summarize_records([r for r in evaluation.records if r.image_id in keep])
    report, summary = write_report(evaluation, args.report, filtered, excluded)
    print(format_table(evaluation, filtered))
    print(f"\n{len(evaluation.records)} scored, {len(evaluation.failures)} unsegmentable")
    print(f"report: {report}\nsummary: {summary}")
    return EXIT_OK


def cmd_lbp_stats(args) -> int:
    img = load_rgb(args.image)
    gt = load_mask(args.gt)
    rows = presence_analysis(lbp_map(to_luminance(img)), gt)
    write_presence_csv(rows, args.out)
    print(f"{len(rows)} classes written to {args.out}")
    return EXIT_OK


def cmd_bench(args) -> int:
    img = load_rgb(args.image)
    cfg = _config(args)
    times = []
    for _ in range(max(1, args.iters)):
        t0 = time.perf_counter()
        run_pipeline(img, cfg)
        times.append(time.perf_counter() - t0)
    h, w = img.shape[:2]
    print(f"{w}x{h}: mean {np.mean(times):.3f} s over {len(times)} run(s) (min {min(times):.3f} s)")
    return EXIT_OK


COMMANDS = {
    "segment": cmd_segment,
    "evaluate": cmd_evaluate,
    "lbp-stats": cmd_lbp_stats,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (LbpSegError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
