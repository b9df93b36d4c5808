"""
SVG figures: target-vs-prediction overlays and loss curves.

Figures are built on `matplotlib.figure.Figure` directly (no pyplot state), so
they can be produced from worker threads. Saved SVGs carry no date and use a
fixed id salt, so identical inputs give identical bytes.
"""

import logging
from collections.abc import Mapping
from pathlib import Path

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from bench.overlap import predicted_masks, target_masks
from schemas.models import (
    BenchTable,
    BlendshapeModel,
    Camera,
    FitReport,
    PartMask,
    PartPointSets,
    ProjectionSettings,
)

logger = logging.getLogger(__name__)

OVERLAY_NAME = "overlay.svg"
CURVES_NAME = "loss_curve.svg"

_SVG_RC = {"svg.hashsalt": "prdl", "svg.fonttype": "none"}


def _union(masks: Mapping[object, PartMask], height: int, width: int) -> np.ndarray:
    out = np.zeros((height, width), dtype=bool)
    for mask in masks.values():
        out |= mask.bits
    return out


def overlay_image(target: np.ndarray, pred: np.ndarray) -> np.ndarray:
    """RGB image: target only in red, prediction only in green, overlap in yellow."""
    if target.shape != pred.shape:
        raise ValueError(f"mask shapes differ: {target.shape} vs {pred.shape}")
    image = np.zeros(target.shape + (3,), dtype=np.uint8)
    image[..., 0] = np.where(target, 255, 0)
    image[..., 1] = np.where(pred, 255, 0)
    return image


def _save(fig: Figure, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context(_SVG_RC):
        fig.savefig(path, format="svg", metadata={"Date": None})
    logger.debug(f"Wrote {path}")
    return path


def plot_overlay(target: np.ndarray, pred: np.ndarray, path: Path | str, title: str | None = None) -> Path:
    fig = Figure(figsize=(4, 4))
    ax = fig.add_subplot()
    ax.imshow(overlay_image(target, pred), interpolation="nearest")
    ax.set_axis_off()
    if title:
        ax.set_title(title)
    return _save(fig, Path(path))


def plot_loss_curves(curves: Mapping[str, list[list[float]]], path: Path | str, title: str | None = None) -> Path:
    """
    Plot total loss against iteration on a log scale.

    Args:
        curves: Variant name -> one loss sequence per run
        path: Output SVG path
        title: Optional axes title

    Returns:
        The written path
    """
    fig = Figure(figsize=(6, 4))
    ax = fig.add_subplot()
    cycle = matplotlib.rcParams["axes.prop_cycle"].by_key()["color"]
    for i, (name, runs) in enumerate(curves.items()):
        color = cycle[i % len(cycle)]
        for j, curve in enumerate(runs):
            values = np.maximum(np.asarray(curve, dtype=np.float64), 1e-300)
            ax.plot(np.arange(len(values)), values, color=color, linewidth=0.8, label=name if j == 0 else None)
    ax.set_yscale("log")
    ax.set_xlabel("iteration")
    ax.set_ylabel("total loss")
    if curves:
        ax.legend()
    if title:
        ax.set_title(title)
    return _save(fig, Path(path))


def write_fit_figures(
    model: BlendshapeModel,
    camera: Camera,
    report: FitReport,
    targets: PartPointSets,
    out_dir: Path | str,
    radius: float = 1.0,
    projection: ProjectionSettings | None = None,
) -> list[Path]:
    """Overlay of all target parts against the fitted prediction, plus the fit's loss curve."""
    out_dir = Path(out_dir)
    height, width = targets.height, targets.width
    pred = predicted_masks(model, camera, report.final_params, height, width, radius, projection)
    title = f"seed {report.seed}, mean IoU {report.iou.mean_iou:.3f}"
    return [
        plot_overlay(
            _union(target_masks(targets), height, width), _union(pred, height, width), out_dir / OVERLAY_NAME, title
        ),
        plot_loss_curves(
            {report.loss.value: [[record.total for record in report.history]]}, out_dir / CURVES_NAME
        ),
    ]


def write_bench_figure(table: BenchTable, path: Path | str) -> Path:
    """Loss curves of every run in a battery, one colour per variant."""
    curves: dict[str, list[list[float]]] = {row.variant: [] for row in table.rows}
    for run in table.runs:
        curves.setdefault(run.variant, []).append(run.curve)
    return plot_loss_curves(curves, path, f"{table.kind} on {table.scenario.value}")
