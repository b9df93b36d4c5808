"""
Pipeline nodes for the fit workflow.
"""

from .report_writer import write_report
from .shape_fitter import fit_shape
from .target_loader import load_targets
from .target_preprocessor import preprocess

__all__ = [
    "fit_shape",
    "load_targets",
    "preprocess",
    "write_report",
]
