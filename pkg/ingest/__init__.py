"""
Target ingestion: label maps, manifests, landmarks and mask preprocessing.
"""

from .label_maps import (
    label_map_from_sets,
    load_label_map,
    load_manifest,
    part_masks,
    read_label_image,
    write_label_map,
    write_manifest,
)
from .landmarks import load_landmarks, write_landmarks
from .masks import (
    exclude_forehead,
    filter_isolated_regions,
    mask_to_points,
    points_to_mask,
    preprocess_targets,
)

__all__ = [
    "exclude_forehead",
    "filter_isolated_regions",
    "label_map_from_sets",
    "load_label_map",
    "load_landmarks",
    "load_manifest",
    "mask_to_points",
    "part_masks",
    "points_to_mask",
    "preprocess_targets",
    "read_label_image",
    "write_label_map",
    "write_landmarks",
    "write_manifest",
]
