"""
Report writing node; also decides the exit code.
"""

import logging

from bench.figures import write_fit_figures
from fitting.report import write_fit_report
from schemas.models import TerminationReason
from schemas.state import FitState

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2


def write_report(state: FitState) -> FitState:
    """
    Write the fit report files and map the run's outcome to an exit code.

    0 for convergence or the iteration cap, 1 for load/usage/IO failures or
    nothing to fit, 2 for a non-finite abort.

    Args:
        state: Final graph state

    Returns:
        Updated state with written paths and exit_code
    """
    report = state.get("report")
    if state.get("load_failed") or state.get("nothing_to_fit") or report is None:
        return {**state, "exit_code": EXIT_USAGE}

    config = state["config"]
    try:
        written = write_fit_report(report, state["output_dir"])
        if state.get("write_svg"):
            written += write_fit_figures(
                state["model"],
                config.camera,
                report,
                state["targets"],
                state["output_dir"],
                config.metrics.splat_radius,
                config.projection,
            )
    except OSError as e:
        logger.error(f"Report writing error: {e}")
        return {
            **state,
            "exit_code": EXIT_USAGE,
            "errors": state.get("errors", []) + [f"Report writing: {e}"],
        }

    logger.info(f"Wrote {len(written)} files to {state['output_dir']}")
    exit_code = EXIT_NUMERICAL if report.termination == TerminationReason.NAN_ABORT else EXIT_OK
    return {**state, "written": written, "exit_code": exit_code}
