"""Dataset ingestion, batch evaluation and CSV reports."""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import LbpSegError, ManifestError, RunError
from .metrics import (
    LESION_CLASSES,
    MetricsRecord,
    SummaryStats,
    border_error,
    boundary_pixels,
    fpr,
    g_perp,
    group_by_class,
    summarize_cell,
    tdr,
)
from .pipeline import PipelineConfig, run_pipeline
from .raster import image_size, load_mask, load_rgb, save_mask_png

log = logging.getLogger(__name__)

MANIFEST_COLUMNS = ("image_id", "image_path", "mask_path", "class")
SUMMARY_METRICS = ("be", "tdr", "fpr", "g_perp")


@dataclass(frozen=True)
class DatasetRecord:
    image_id: str
    image_path: Path
    mask_path: Path
    lesion_class: str


def load_manifest(path: str | Path) -> list[DatasetRecord]:
    """Read ``image_id,image_path,mask_path,class`` rows; paths are relative to the manifest."""
    path = Path(path)
    base = path.parent
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise ManifestError(f"cannot open manifest {path}: {exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ManifestError(f"manifest {path} is empty")
        header = [c.strip() for c in reader.fieldnames]
        missing = [c for c in MANIFEST_COLUMNS if c not in header]
        if missing:
            raise ManifestError(f"manifest {path} lacks column(s) {', '.join(missing)}")
        reader.fieldnames = header
        records = []
        seen = set()
        # line 1 is the header
        for lineno, row in enumerate(reader, start=2):
            records.append(_manifest_row(row, lineno, base, seen))
    if not records:
        raise ManifestError(f"manifest {path} has no data rows")
    return records


def _manifest_row(row: dict, lineno: int, base: Path, seen: set) -> DatasetRecord:
    where = f"manifest row {lineno}"
    values = {c: (row.get(c) or "").strip() for c in MANIFEST_COLUMNS}
    for c in MANIFEST_COLUMNS:
        if not values[c]:
            raise ManifestError(f"{where}: empty {c!r}")
    image_id = values["image_id"]
    where += f" ({image_id})"
    if image_id in seen:
        raise ManifestError(f"{where}: duplicate image_id")
    seen.add(image_id)
    cls = values["class"].upper()
    if cls not in LESION_CLASSES:
        raise ManifestError(f"{where}: unknown class {values['class']!r}; expected one of {LESION_CLASSES}")
    image_path = base / values["image_path"]
    mask_path = base / values["mask_path"]
    try:
        img_size = image_size(image_path)
        mask_size = image_size(mask_path)
    except OSError as exc:
        raise ManifestError(f"{where}: unreadable file: {exc}") from exc
    if img_size != mask_size:
        raise ManifestError(f"{where}: image is {img_size} but mask is {mask_size}")
    return DatasetRecord(image_id, image_path, mask_path, cls)


def read_exclusions(path: str | Path) -> list[str]:
    """One image_id per line; blank lines and ``#`` comments ignored."""
    ids = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            ids.append(line)
    return ids


def apply_exclusions(records: Sequence[DatasetRecord], exclusions: str | Path | Iterable[str] | None) -> list[DatasetRecord]:
    """Drop records whose id is listed; ids absent from ``records`` only warn."""
    if exclusions is None:
        return list(records)
    if isinstance(exclusions, (str, Path)):
        exclusions = read_exclusions(exclusions)
    excluded = set(exclusions)
    known = {r.image_id for r in records}
    for unknown in sorted(excluded - known):
        log.warning("exclusion id %s is not in the manifest", unknown)
    return [r for r in records if r.image_id not in excluded]


@dataclass(frozen=True)
class Failure:
    image_id: str
    lesion_class: str
    reason: str


@dataclass
class Evaluation:
    records: list[MetricsRecord]
    failures: list[Failure]
    overall: dict[str, SummaryStats | None] = field(default_factory=dict)
    by_class: dict[str, dict[str, SummaryStats | None]] = field(default_factory=dict)


def _summaries(records: Sequence[MetricsRecord]) -> tuple[dict, dict]:
    overall = {}
    for m in SUMMARY_METRICS:
        overall[m] = summarize_cell([getattr(r, m) for r in records], f"overall {m}")
    return overall, group_by_class(records, SUMMARY_METRICS)


def summarize_records(records: Sequence[MetricsRecord]) -> Evaluation:
    records = sorted(records, key=lambda r: r.image_id)
    overall, by_class = _summaries(records)
    return Evaluation(records, [], overall, by_class)


def evaluate_record(rec: DatasetRecord, cfg: PipelineConfig, masks_dir: str | Path | None = None) -> MetricsRecord | Failure:
    """Segment one image and score it. Any per-image problem becomes a ``Failure``."""
    try:
        img = load_rgb(rec.image_path)
        gt = load_mask(rec.mask_path)
        seg = run_pipeline(img, cfg)
        sm = seg.mask
        if masks_dir is not None:
            save_mask_png(sm, Path(masks_dir) / f"{rec.image_id}.png")
        y = seg.luminance
        return MetricsRecord(
            image_id=rec.image_id,
            lesion_class=rec.lesion_class,
            be=border_error(sm, gt),
            tdr=tdr(sm, gt),
            fpr=fpr(sm, gt),
            g_perp=g_perp(sm, y),
            g_perp_gt=g_perp(gt, y),
        )
    except (LbpSegError, OSError) as exc:
        return Failure(rec.image_id, rec.lesion_class, f"{type(exc).__name__}: {exc}")


def _evaluate_args(args):
    return evaluate_record(*args)


def evaluate_dataset(
    records: Sequence[DatasetRecord],
    cfg: PipelineConfig | None = None,
    jobs: int = 1,
    masks_dir: str | Path | None = None,
) -> Evaluation:
    cfg = cfg or PipelineConfig()
    if not records:
        raise RunError("no records to evaluate")
    if masks_dir is not None:
        Path(masks_dir).mkdir(parents=True, exist_ok=True)
    work = [(r, cfg, masks_dir) for r in sorted(records, key=lambda r: r.image_id)]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_evaluate_args, work))
    else:
        results = [_evaluate_args(w) for w in work]

    ok = [r for r in results if isinstance(r, MetricsRecord)]
    failed = [r for r in results if isinstance(r, Failure)]
    for f in failed:
        log.warning("unsegmentable %s: %s", f.image_id, f.reason)
    if not ok:
        raise RunError(f"all {len(records)} images were unsegmentable")
    overall, by_class = _summaries(ok)
    return Evaluation(ok, failed, overall, by_class)


def _fmt(v: float) -> str:
    return "NA" if v is None or math.isnan(v) else f"{v:.6f}"


def write_report(
    evaluation: Evaluation,
    path: str | Path,
    filtered: Evaluation | None = None,
    excluded: Iterable[str] = (),
) -> tuple[Path, Path]:
    """Per-image CSV at ``path`` plus a summary CSV next to it (``<stem>.summary.csv``).

    Returns both paths.
    """
    path = Path(path)
    excluded = set(excluded)
    rows = [
        (r.image_id, r.lesion_class, "ok", _fmt(r.be), _fmt(r.tdr), _fmt(r.fpr), _fmt(r.g_perp), _fmt(r.g_perp_gt),
         int(r.image_id in excluded), "")
        for r in evaluation.records
    ]
    rows += [
        (f.image_id, f.lesion_class, "unsegmentable", "NA", "NA", "NA", "NA", "NA", int(f.image_id in excluded), f.reason)
        for f in evaluation.failures
    ]
    rows.sort(key=lambda row: row[0])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["image_id", "class", "status", "be", "tdr", "fpr", "g_perp", "g_perp_gt", "excluded", "note"])
        writer.writerows(rows)

    summary_path = path.with_name(path.stem + ".summary.csv")
    subsets = [("complete", evaluation)]
    if filtered is not None:
        subsets.append(("filtered", filtered))
    with open(summary_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["subset", "class", "metric", "statistic", "value"])
        for subset, ev in subsets:
            scopes = [("ALL", ev.overall)] + [(c, ev.by_class[c]) for c in LESION_CLASSES if c in ev.by_class]
            for scope, cells in scopes:
                for metric in SUMMARY_METRICS:
                    stats = cells.get(metric)
                    for stat in ("mean", "std", "cv", "n"):
                        if stats is None:
                            value = "NA"
                        elif stat == "n":
                            value = str(stats.n)
                        else:
                            value = _fmt(getattr(stats, stat))
                        writer.writerow([subset, scope, metric, stat, value])
    return path, summary_path


def format_table(evaluation: Evaluation, filtered: Evaluation | None = None) -> str:
    """Plain-text summary: mean/std/CV for BE, TDR, FPR per subset, then per class."""
    lines = []
    subsets = [("complete", evaluation)] + ([("filtered", filtered)] if filtered is not None else [])
    metrics = ("be", "tdr", "fpr")
    header = "".join(f"{s + ':' + m.upper():>18}" for s, _ in subsets for m in metrics)
    lines.append(f"{'':6}{header}")
    for stat in ("mean", "std", "cv"):
        cells = []
        for _, ev in subsets:
            for m in metrics:
                st = ev.overall.get(m)
                cells.append(f"{_cell(st, stat):>18}")
        lines.append(f"{stat:6}" + "".join(cells))
    last = subsets[-1][1]
    if last.by_class:
        lines.append("")
        classes = [c for c in LESION_CLASSES if c in last.by_class]
        lines.append(f"{'':6}" + "".join(f"{m.upper() + ':' + c:>12}" for m in metrics for c in classes))
        for stat in ("mean", "std", "cv"):
            cells = []
            for m in metrics:
                for c in classes:
                    st = last.by_class[c].get(m)
                    cells.append(f"{_cell(st, stat):>12}")
            lines.append(f"{stat:6}" + "".join(cells))
    return "\n".join(lines)


def _cell(st: SummaryStats | None, stat: str) -> str:
    v = None if st is None else getattr(st, stat)
    return "NA" if v is None or math.isnan(v) else f"{v:.3f}"


def overlay_contour(img: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Copy of ``img`` with the mask's 1-px boundary painted red."""
    out = np.array(img, dtype=np.uint8, copy=True)
    out[boundary_pixels(mask)] = (255, 0, 0)
    return out
