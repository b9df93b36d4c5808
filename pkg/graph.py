"""
LangGraph workflow for a single-image fit.
"""

from pathlib import Path

from langgraph.graph import END, StateGraph

from config import RunConfig
from nodes.report_writer import write_report
from nodes.shape_fitter import fit_shape
from nodes.target_loader import load_targets
from nodes.target_preprocessor import preprocess
from schemas.state import FitState


def should_continue_after_loading(state: FitState) -> str:
    """Route based on loading success."""
    if state.get("load_failed", False):
        return "report_writer"  # Skip to report with failure
    return "target_preprocessor"


def should_continue_after_preprocessing(state: FitState) -> str:
    if state.get("nothing_to_fit", False):
        return "report_writer"
    return "shape_fitter"


def build_graph() -> StateGraph:
    """Build and compile the fit workflow."""

    workflow = StateGraph(FitState)

    workflow.add_node("target_loader", load_targets)
    workflow.add_node("target_preprocessor", preprocess)
    workflow.add_node("shape_fitter", fit_shape)
    workflow.add_node("report_writer", write_report)

    workflow.set_entry_point("target_loader")

    workflow.add_conditional_edges(
        "target_loader",
        should_continue_after_loading,
        {
            "target_preprocessor": "target_preprocessor",
            "report_writer": "report_writer",
        },
    )
    workflow.add_conditional_edges(
        "target_preprocessor",
        should_continue_after_preprocessing,
        {
            "shape_fitter": "shape_fitter",
            "report_writer": "report_writer",
        },
    )
    workflow.add_edge("shape_fitter", "report_writer")
    workflow.add_edge("report_writer", END)

    return workflow.compile()


# Singleton graph instance
graph = build_graph()


def run_fit_pipeline(
    config: RunConfig,
    label_map_path: Path | str,
    model_path: Path | str,
    output_dir: Path | str,
    landmarks_path: Path | str | None = None,
    manifest_path: Path | str | None = None,
    write_svg: bool = False,
) -> FitState:
    """Execute the fit pipeline and return the final state (see `exit_code`)."""
    initial_state: FitState = {
        "config": config,
        "label_map_path": Path(label_map_path),
        "manifest_path": Path(manifest_path) if manifest_path else None,
        "landmarks_path": Path(landmarks_path) if landmarks_path else None,
        "model_path": Path(model_path),
        "output_dir": Path(output_dir),
        "write_svg": write_svg,
        "model": None,
        "manifest": None,
        "raw_targets": None,
        "targets": None,
        "landmarks": None,
        "load_failed": False,
        "nothing_to_fit": False,
        "report": None,
        "written": [],
        "exit_code": 0,
        "errors": [],
    }

    result = graph.invoke(initial_state)
    return result
