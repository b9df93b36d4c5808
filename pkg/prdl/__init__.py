"""
Part Re-projection Distance Loss: anchors, descriptors, loss and gradient.
"""

from .anchors import build_anchor_grid, lattice_anchors, subsample_anchors
from .descriptor import (
    compute_descriptor,
    descriptor_image,
    descriptor_values,
    export_descriptor,
)
from .loss import PRDLTerm, part_value_and_gradient, prdl_gradient, prdl_loss

__all__ = [
    "PRDLTerm",
    "build_anchor_grid",
    "compute_descriptor",
    "descriptor_image",
    "descriptor_values",
    "export_descriptor",
    "lattice_anchors",
    "part_value_and_gradient",
    "prdl_gradient",
    "prdl_loss",
    "subsample_anchors",
]
