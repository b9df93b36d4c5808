"""
Per-image shape fitting: loss composition, Adam loop, reports and gradient checks.
"""

from .fit import fit
from .gradcheck import central_difference, relative_error, run_grad_checks
from .objective import (
    Evaluation,
    Objective,
    build_objective,
    landmark_loss,
    regularization_loss,
    total_loss,
)
from .optimizer import Adam
from .report import report_json, write_fit_report, write_loss_curve
from .terms import GeometricTerm, PointLossTerm, SilhouetteTerm, build_geometric_term

__all__ = [
    "Adam",
    "Evaluation",
    "GeometricTerm",
    "Objective",
    "PointLossTerm",
    "SilhouetteTerm",
    "build_geometric_term",
    "build_objective",
    "central_difference",
    "fit",
    "landmark_loss",
    "regularization_loss",
    "relative_error",
    "report_json",
    "run_grad_checks",
    "total_loss",
    "write_fit_report",
    "write_loss_curve",
]
