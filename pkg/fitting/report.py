"""
Fit report files: JSON report, CSV loss curve and a separate timing file.

Wall time lives only in the timing file so identical runs give identical reports.
"""

import csv
import json
from pathlib import Path

from schemas.models import FitReport

REPORT_NAME = "fit_report.json"
CURVE_NAME = "loss_curve.csv"
TIMING_NAME = "timing.json"


def report_json(report: FitReport) -> str:
    data = report.model_dump(mode="json", exclude={"wall_time_s"})
    return json.dumps(data, indent=2) + "\n"


def write_loss_curve(report: FitReport, path: Path | str) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        handle.write(f"# seed={report.seed}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["iteration", "prdl", "lmk", "reg", "total"])
        for record in report.history:
            writer.writerow(
                [record.iteration, repr(record.prdl), repr(record.lmk), repr(record.reg), repr(record.total)]
            )
    return path


def write_fit_report(report: FitReport, out_dir: Path | str) -> list[Path]:
    """Write the report, its loss curve and timing into `out_dir`."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / REPORT_NAME
    report_path.write_text(report_json(report), encoding="utf-8")
    timing_path = out_dir / TIMING_NAME
    timing_path.write_text(
        json.dumps({"seed": report.seed, "wall_time_s": report.wall_time_s}, indent=2) + "\n",
        encoding="utf-8",
    )
    return [report_path, write_loss_curve(report, out_dir / CURVE_NAME), timing_path]
