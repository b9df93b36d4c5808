"""
Loss-comparison and distance-function ablation batteries.

Every run is an independent fit; runs execute in a thread pool bounded by
`jobs` and are merged back in submission order, so tables do not depend on
scheduling.
"""

import asyncio
import logging
import time
from collections.abc import Callable, Sequence

import numpy as np

from bench.scenarios import Scenario, build_scenario
from config import RunConfig
from fitting.fit import fit
from fitting.objective import build_objective
from schemas.models import (
    DISTANCE_ORDER,
    AnchorSettings,
    BenchTable,
    DistanceFunction,
    DistanceFunctionSet,
    FitConfig,
    FitReport,
    LossKind,
    LossWeights,
    ProjectionSettings,
    RunResult,
    ScenarioSettings,
    VariantSummary,
    param_groups,
)

logger = logging.getLogger(__name__)

ABLATION_VARIANTS: tuple[tuple[DistanceFunction, ...], ...] = (
    (DistanceFunction.MIN,),
    (DistanceFunction.MAX,),
    (DistanceFunction.AVE,),
    DISTANCE_ORDER,
)

RunTask = Callable[[], RunResult]


def scenario_projection(config: RunConfig) -> ProjectionSettings:
    """`[projection]` without the target-consistency filters; scenario renders have no occluders."""
    return config.projection.model_copy(update={"occlusion_radius": None, "forehead_cut": False})


def scenario_weights(weights: LossWeights, settings: ScenarioSettings) -> LossWeights:
    """`weights` with the scenario's weight preset applied, if it names one."""
    if settings.weights_preset == "config":
        return weights
    return LossWeights.preset(settings.weights_preset, weights)


def scenario_fit_config(config: RunConfig, scenario: Scenario, loss: LossKind) -> FitConfig:
    """The run's fit section with the scenario's step size, frozen groups and loss."""
    return config.fit.model_copy(
        update={
            "loss": loss,
            "seed": scenario.seed,
            "learning_rate": scenario.learning_rate,
            "fixed_groups": sorted(set(config.fit.fixed_groups) | set(scenario.fixed_groups)),
        }
    )


def initial_gradient_norm(
    scenario: Scenario,
    fit_config: FitConfig,
    weights: LossWeights,
    anchor_settings: AnchorSettings,
    config: RunConfig,
) -> float:
    """Norm of the free part of the total-loss gradient at the scenario's starting point."""
    objective = build_objective(
        scenario.model,
        scenario.camera,
        scenario.targets,
        scenario.landmarks,
        weights,
        fit_config,
        anchor_settings=anchor_settings,
        projection=scenario_projection(config),
        silhouette=config.silhouette,
    )
    grad = objective.evaluate(scenario.init_params).grad
    groups = param_groups(scenario.model.k_id, scenario.model.k_exp)
    for group in fit_config.fixed_groups:
        grad[groups[group]] = 0.0
    return float(np.linalg.norm(grad))


def run_scenario_fit(
    index: int,
    scenario: Scenario,
    variant: str,
    config: RunConfig,
    loss: LossKind = LossKind.PRDL,
    anchor_settings: AnchorSettings | None = None,
    weights: LossWeights | None = None,
) -> tuple[RunResult, FitReport]:
    """
    Fit one scenario with one loss variant.

    Args:
        index: Position of the run in its battery
        scenario: Problem to fit
        variant: Row name the run is reported under
        config: Run configuration (weights, optimizer, anchors)
        loss: Geometric term
        anchor_settings: Overrides `config.anchors` (used by the ablation)
        weights: Loss weights (default: `config.weights` under the scenario's weight preset)

    Returns:
        (RunResult summary, full FitReport)
    """
    started = time.perf_counter()
    anchor_settings = anchor_settings or config.anchors
    fit_config = scenario_fit_config(config, scenario, loss)
    weights = weights or scenario_weights(config.weights, config.scenario)
    grad_norm = initial_gradient_norm(scenario, fit_config, weights, anchor_settings, config)
    report = fit(
        scenario.model,
        scenario.camera,
        scenario.targets,
        scenario.landmarks,
        fit_config,
        weights,
        scenario.init_params,
        anchor_settings=anchor_settings,
        projection=scenario_projection(config),
        silhouette=config.silhouette,
        splat_radius=config.metrics.splat_radius,
    )
    result = RunResult(
        index=index,
        seed=scenario.seed,
        variant=variant,
        mean_iou=report.iou.mean_iou,
        final_loss=report.final_loss,
        iterations=report.iterations,
        termination=report.termination,
        curve=[record.total for record in report.history],
        init_grad_norm=grad_norm,
        wall_time_s=time.perf_counter() - started,
    )
    logger.info(f"[{index}] {scenario.kind.value} seed={scenario.seed} {variant}: IoU={result.mean_iou:.4f}")
    return result, report


async def run_tasks_async(tasks: Sequence[RunTask], jobs: int = 1) -> list[RunResult]:
    """Run tasks in worker threads, at most `jobs` at a time; results keep task order."""
    semaphore = asyncio.Semaphore(max(1, jobs))

    async def run_one(task: RunTask) -> RunResult:
        async with semaphore:
            return await asyncio.to_thread(task)

    results = await asyncio.gather(*(run_one(task) for task in tasks))
    return sorted(results, key=lambda result: result.index)


def run_tasks(tasks: Sequence[RunTask], jobs: int = 1) -> list[RunResult]:
    """Sync wrapper for run_tasks_async."""
    return asyncio.run(run_tasks_async(tasks, jobs))


def summarize(runs: list[RunResult], variants: list[str]) -> list[VariantSummary]:
    """One row per variant, in the given order; per-seed values follow run order."""
    rows = []
    for variant in variants:
        selected = [run for run in runs if run.variant == variant]
        ious = [run.mean_iou for run in selected]
        rows.append(
            VariantSummary(
                variant=variant,
                mean_iou=float(np.mean(ious)) if ious else 0.0,
                min_iou=float(np.min(ious)) if ious else 0.0,
                per_seed_iou=ious,
                mean_iterations=float(np.mean([run.iterations for run in selected])) if selected else 0.0,
            )
        )
    return rows


def _task(
    index: int,
    settings: ScenarioSettings,
    seed: int,
    variant: str,
    config: RunConfig,
    loss: LossKind,
    anchor_settings: AnchorSettings | None = None,
) -> RunTask:
    def task() -> RunResult:
        scenario = build_scenario(settings, seed, config.silhouette, config.metrics.splat_radius)
        weights = scenario_weights(config.weights, settings)
        result, _ = run_scenario_fit(index, scenario, variant, config, loss, anchor_settings, weights)
        return result

    return task


def run_loss_comparison(
    scenario: ScenarioSettings,
    losses: Sequence[LossKind],
    config: RunConfig,
    jobs: int = 1,
) -> BenchTable:
    """
    Fit every seed of the scenario once per loss under identical init and config.

    Args:
        scenario: Scenario kind and seed battery
        losses: Geometric terms to compare (one table row each)
        config: Shared run configuration
        jobs: Worker threads

    Returns:
        Comparison BenchTable
    """
    variants = [loss.value for loss in losses]
    tasks = [
        _task(i * len(losses) + j, scenario, seed, loss.value, config, loss)
        for i, seed in enumerate(scenario.seeds)
        for j, loss in enumerate(losses)
    ]
    logger.info(f"Comparing {variants} on {scenario.kind.value} over {len(scenario.seeds)} seeds")
    runs = run_tasks(tasks, jobs)
    return BenchTable(
        kind="comparison",
        scenario=scenario.kind,
        seeds=list(scenario.seeds),
        rows=summarize(runs, variants),
        runs=runs,
    )


def run_distance_ablation(scenario: ScenarioSettings, config: RunConfig, jobs: int = 1) -> BenchTable:
    """Fit every seed with F = {min}, {max}, {ave} and {min, max, ave}; one row per variant."""
    function_sets = [DistanceFunctionSet(functions=functions) for functions in ABLATION_VARIANTS]
    variants = [functions.name for functions in function_sets]
    tasks = []
    for i, seed in enumerate(scenario.seeds):
        for j, functions in enumerate(function_sets):
            anchors = config.anchors.model_copy(update={"functions": list(functions.functions)})
            index = i * len(function_sets) + j
            tasks.append(_task(index, scenario, seed, functions.name, config, LossKind.PRDL, anchors))
    logger.info(f"Ablating {variants} on {scenario.kind.value} over {len(scenario.seeds)} seeds")
    runs = run_tasks(tasks, jobs)
    return BenchTable(
        kind="ablation",
        scenario=scenario.kind,
        seeds=list(scenario.seeds),
        rows=summarize(runs, variants),
        runs=runs,
    )
