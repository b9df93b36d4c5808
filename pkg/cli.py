"""
Command-line entry point for the PRDL toolkit.

Usage:
    python cli.py [--config run.toml] [--seed N] [--jobs N] COMMAND ...

Exit codes: 0 success, 1 usage or IO failure, 2 numerical abort.
"""

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from bench.experiments import run_distance_ablation, run_loss_comparison
from bench.figures import write_bench_figure
from bench.scenarios import TOY_LEARNING_RATE
from bench.tables import write_bench_table
from config import RunConfig, dump_run_config, load_run_config, settings
from errors import PRDLError
from face_model.annotation import annotate_parts, write_annotation
from face_model.storage import load_model, save_model
from face_model.toy import gen_toy_model, rasterize_toy_labels, toy_camera, toy_landmarks
from fitting.gradcheck import run_grad_checks
from graph import run_fit_pipeline
from ingest.label_maps import load_label_map, load_manifest, write_label_map, write_manifest
from ingest.landmarks import write_landmarks
from nodes.report_writer import EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE
from prdl.anchors import build_anchor_grid
from prdl.descriptor import compute_descriptor, export_descriptor
from schemas.models import (
    BenchTable,
    LabelManifest,
    LossKind,
    LossWeights,
    PartLabel,
    ScenarioKind,
    ShapeParams,
)

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# gen-toy bundles are fitted with this anchor stride
TOY_ANCHOR_STRIDE = 4


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with 1 (2 is reserved for numerical aborts)."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="prdl", description="Part re-projection distance loss toolkit")
    parser.add_argument("--config", type=Path, help="run configuration file (key = value with [sections])")
    parser.add_argument("--seed", type=int, help="override the configured seed")
    parser.add_argument("--jobs", type=int, default=None, help="worker threads for batch commands")
    parser.add_argument("--dump-config", action="store_true", help="print the effective configuration and exit")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument("--weights", choices=["standard", "prdl-only"], help="loss weight preset")
    commands = parser.add_subparsers(dest="command", parser_class=_Parser)

    gen = commands.add_parser("gen-toy", help="generate a toy model and its rendered targets")
    gen.add_argument("--out", type=Path, required=True)

    fit = commands.add_parser("fit", help="fit the model to one label map")
    fit.add_argument("--labels", type=Path, required=True, help="label map (PNG or PGM)")
    fit.add_argument("--model", type=Path, required=True, help="model container (.npz)")
    fit.add_argument("--landmarks", type=Path)
    fit.add_argument("--manifest", type=Path)
    fit.add_argument("--out", type=Path, required=True)
    fit.add_argument("--svg", action="store_true", help="also write overlay and loss-curve SVGs")

    check = commands.add_parser("grad-check", help="finite-difference gradient suite")
    check.add_argument("--instances", type=int, default=100)
    check.add_argument("--inject-fault", choices=["sign-flip"], help=argparse.SUPPRESS)

    for name, text in (("compare", "loss comparison battery"), ("ablate", "distance-function ablation")):
        bench = commands.add_parser(name, help=text)
        bench.add_argument("--out", type=Path, required=True)
        bench.add_argument("--scenario", choices=[kind.value for kind in ScenarioKind])
        bench.add_argument("--svg", action="store_true")
        if name == "compare":
            bench.add_argument("--losses", help="comma-separated loss kinds (default: [scenario] losses)")

    annotate = commands.add_parser("annotate", help="transfer a segmentation onto model vertices")
    annotate.add_argument("--model", type=Path, required=True)
    annotate.add_argument("--labels", type=Path, required=True)
    annotate.add_argument("--manifest", type=Path)
    annotate.add_argument("--params", type=Path, help="JSON shape parameters the labels were rendered at")
    annotate.add_argument("--k", type=int, default=1)
    annotate.add_argument("--out", type=Path, required=True)

    descriptor = commands.add_parser("descriptor", help="export one part's descriptor")
    descriptor.add_argument("--labels", type=Path, required=True)
    descriptor.add_argument("--manifest", type=Path)
    descriptor.add_argument("--part", choices=[part.value for part in PartLabel], required=True)
    descriptor.add_argument("--out", type=Path, required=True, help="output path prefix")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Config file, then `--seed` and `--weights` on top; `--weights` also holds for benchmark fits."""
    overrides = {"seed": args.seed} if args.seed is not None else {}
    config = load_run_config(args.config, **overrides)
    if args.weights:
        config = config.model_copy(
            update={
                "weights": LossWeights.preset(args.weights, config.weights),
                "scenario": config.scenario.model_copy(update={"weights_preset": "config"}),
            }
        )
    return config


def cmd_gen_toy(config: RunConfig, out_dir: Path) -> list[Path]:
    """Write a toy bundle: model, ground truth, label map, landmarks, manifest and a fit config."""
    scenario = config.scenario
    model, truth = gen_toy_model(config.seed, scenario.n_vertices, scenario.k_id, scenario.k_exp)
    size = scenario.resolution
    camera = toy_camera(size)
    out_dir.mkdir(parents=True, exist_ok=True)

    truth_path = out_dir / "ground_truth.json"
    truth_path.write_text(
        json.dumps({"seed": config.seed, "params": truth.model_dump(mode="json")}, indent=2) + "\n",
        encoding="utf-8",
    )
    labels = rasterize_toy_labels(model, camera, truth, size, size, config.metrics.splat_radius)
    bundle_config = config.model_copy(
        update={
            "camera": camera,
            "fit": config.fit.model_copy(update={"learning_rate": TOY_LEARNING_RATE}),
            "anchors": config.anchors.model_copy(update={"stride": TOY_ANCHOR_STRIDE}),
        }
    )
    config_path = out_dir / "config.toml"
    config_path.write_text(dump_run_config(bundle_config), encoding="utf-8")
    written = [
        save_model(model, out_dir / "model.npz"),
        truth_path,
        write_label_map(labels, out_dir / "labels.png"),
        write_landmarks(toy_landmarks(model, camera, truth), out_dir / "landmarks.txt"),
        write_manifest(LabelManifest(width=size, height=size), out_dir / "manifest.txt"),
        config_path,
    ]
    logger.info(f"Wrote toy bundle for seed {config.seed} to {out_dir}")
    return written


def cmd_fit(config: RunConfig, args: argparse.Namespace) -> int:
    state = run_fit_pipeline(
        config,
        label_map_path=args.labels,
        model_path=args.model,
        output_dir=args.out,
        landmarks_path=args.landmarks,
        manifest_path=args.manifest,
        write_svg=args.svg,
    )
    for error in state.get("errors", []):
        print(f"error: {error}", file=sys.stderr)
    report = state.get("report")
    if report is not None:
        print(
            f"{report.termination.value} after {report.iterations} iterations, "
            f"final loss {report.final_loss:.6e}, mean IoU {report.iou.mean_iou:.4f}"
        )
    return state["exit_code"]


def cmd_grad_check(config: RunConfig, instances: int, inject_fault: str | None = None) -> int:
    results = run_grad_checks(config.seed, instances, inject_sign_flip=inject_fault == "sign-flip")
    width = max(len(result.name) for result in results)
    for result in results:
        status = "ok" if result.passed else "FAIL"
        print(f"{result.name:<{width}}  {result.max_rel_error:.3e}  (tol {result.tolerance:g})  {status}")
    return EXIT_OK if all(result.passed for result in results) else EXIT_NUMERICAL


def _write_table(table: BenchTable, out_dir: Path, svg: bool) -> None:
    written = write_bench_table(table, out_dir)
    if svg:
        written.append(write_bench_figure(table, out_dir / f"{table.kind}_{table.scenario.value}.svg"))
    for row in table.rows:
        print(f"{row.variant:<20}  mean IoU {row.mean_iou:.4f}  min IoU {row.min_iou:.4f}")
    logger.info(f"Wrote {len(written)} files to {out_dir}")


def cmd_compare(config: RunConfig, args: argparse.Namespace, jobs: int) -> int:
    scenario = config.scenario
    if args.scenario is not None:
        scenario = scenario.model_copy(update={"kind": ScenarioKind(args.scenario)})
    losses = scenario.losses
    if args.losses:
        losses = [LossKind(name.strip()) for name in args.losses.split(",") if name.strip()]
    _write_table(run_loss_comparison(scenario, losses, config, jobs), args.out, args.svg)
    return EXIT_OK


def cmd_ablate(config: RunConfig, args: argparse.Namespace, jobs: int) -> int:
    scenario = config.scenario
    if args.scenario is not None:
        scenario = scenario.model_copy(update={"kind": ScenarioKind(args.scenario)})
    _write_table(run_distance_ablation(scenario, config, jobs), args.out, args.svg)
    return EXIT_OK


def cmd_annotate(config: RunConfig, args: argparse.Namespace) -> int:
    model = load_model(args.model)
    manifest = load_manifest(args.manifest) if args.manifest else None
    targets = load_label_map(args.labels, manifest)
    if args.params:
        data = json.loads(args.params.read_text(encoding="utf-8"))
        params = ShapeParams.model_validate(data.get("params", data))
    else:
        params = ShapeParams.zeros(model.k_id, model.k_exp)
    annotation = annotate_parts(model, config.camera, params, targets, args.k, config.projection)
    write_annotation(annotation, args.out, seed=config.seed)
    logger.info(f"Wrote annotation to {args.out}")
    return EXIT_OK


def cmd_descriptor(config: RunConfig, args: argparse.Namespace) -> int:
    manifest = load_manifest(args.manifest) if args.manifest else None
    targets = load_label_map(args.labels, manifest)
    grid = build_anchor_grid(config.anchors, targets.height, targets.width)
    descriptor = compute_descriptor(targets.get(PartLabel(args.part)), grid, config.anchors.function_set())
    args.out.parent.mkdir(parents=True, exist_ok=True)
    for path in export_descriptor(descriptor, args.out, seed=config.seed):
        print(path)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=getattr(logging, (args.log_level or settings.log_level).upper(), logging.INFO),
        format=LOG_FORMAT,
    )

    try:
        config = resolve_config(args)
        if args.dump_config:
            print(dump_run_config(config), end="")
            return EXIT_OK
        if args.command is None:
            parser.error("a command is required")
        jobs = args.jobs or settings.jobs

        if args.command == "gen-toy":
            for path in cmd_gen_toy(config, args.out):
                print(path)
            return EXIT_OK
        if args.command == "fit":
            return cmd_fit(config, args)
        if args.command == "grad-check":
            return cmd_grad_check(config, args.instances, args.inject_fault)
        if args.command == "compare":
            return cmd_compare(config, args, jobs)
        if args.command == "ablate":
            return cmd_ablate(config, args, jobs)
        if args.command == "annotate":
            return cmd_annotate(config, args)
        return cmd_descriptor(config, args)
    except FileNotFoundError as e:
        print(f"error: file not found: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (PRDLError, OSError, ValueError) as e:
        logger.error(f"{args.command or 'prdl'} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
