"""
Comparison and ablation tables as CSV and JSON.

Per-run wall times go to a separate timing file; the CSV and JSON tables are
reproducible byte for byte given the seeds.
"""

import csv
import json
import logging
from pathlib import Path

from schemas.models import BenchTable

logger = logging.getLogger(__name__)


def table_json(table: BenchTable) -> str:
    data = table.model_dump(mode="json", exclude={"runs": {"__all__": {"wall_time_s"}}})
    return json.dumps(data, indent=2) + "\n"


def write_table_csv(table: BenchTable, path: Path | str) -> Path:
    """One row per variant: mean/min IoU, mean iterations, then one IoU column per seed."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        handle.write(f"# kind={table.kind} scenario={table.scenario.value}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(
            ["variant", "mean_iou", "min_iou", "mean_iterations"] + [f"seed_{seed}" for seed in table.seeds]
        )
        for row in table.rows:
            writer.writerow(
                [row.variant, repr(row.mean_iou), repr(row.min_iou), repr(row.mean_iterations)]
                + [repr(value) for value in row.per_seed_iou]
            )
    return path


def write_bench_table(table: BenchTable, out_dir: Path | str, stem: str | None = None) -> list[Path]:
    """
    Write `<stem>.csv`, `<stem>.json` and `<stem>_timing.json` into `out_dir`.

    Args:
        table: Comparison or ablation result
        out_dir: Output directory (created if missing)
        stem: File stem, defaults to `<kind>_<scenario>`

    Returns:
        Written paths
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = stem or f"{table.kind}_{table.scenario.value}"
    json_path = out_dir / f"{stem}.json"
    json_path.write_text(table_json(table), encoding="utf-8")
    timing = [
        {"index": run.index, "seed": run.seed, "variant": run.variant, "wall_time_s": run.wall_time_s}
        for run in table.runs
    ]
    timing_path = out_dir / f"{stem}_timing.json"
    timing_path.write_text(json.dumps(timing, indent=2) + "\n", encoding="utf-8")
    written = [write_table_csv(table, out_dir / f"{stem}.csv"), json_path, timing_path]
    logger.info(f"Wrote {table.kind} table to {out_dir}")
    return written
