"""
Label-map images and their manifests.

A label map is an 8-bit single-channel PNG or binary PGM whose pixel values
are part codes (0 = background). The manifest is a `key=value` sidecar with
`width`, `height` and an optional `codes` remapping such as
`codes=10:left_eye,20:right_eye`.
"""

import logging
from pathlib import Path

import numpy as np
from dotenv import dotenv_values
from PIL import Image, UnidentifiedImageError

from errors import FormatError
from ingest.masks import mask_to_points
from schemas.models import PART_ORDER, LabelManifest, PartLabel, PartMask, PartPointSets

logger = logging.getLogger(__name__)

_MANIFEST_KEYS = {"width", "height", "codes"}


def _parse_codes(text: str, path: Path) -> dict[int, PartLabel]:
    codes: dict[int, PartLabel] = {}
    for entry in text.split(","):
        entry = entry.strip()
        if not entry:
            continue
        code, sep, name = entry.partition(":")
        try:
            if not sep:
                raise ValueError(entry)
            codes[int(code)] = PartLabel(name.strip())
        except ValueError as e:
            raise FormatError(f"{path}: bad codes entry {entry!r}") from e
    return codes


def load_manifest(path: Path | str) -> LabelManifest:
    """Parse a label-map manifest."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"manifest not found: {path}")
    values = dotenv_values(path)
    unknown = set(values) - _MANIFEST_KEYS
    if unknown:
        raise FormatError(f"{path}: unknown manifest keys {sorted(unknown)}")
    try:
        width = int(values["width"] or "")
        height = int(values["height"] or "")
    except (KeyError, ValueError) as e:
        raise FormatError(f"{path}: manifest needs integer width and height") from e
    data: dict = {"width": width, "height": height}
    if values.get("codes"):
        data["codes"] = _parse_codes(values["codes"], path)
    try:
        return LabelManifest(**data)
    except ValueError as e:
        raise FormatError(f"{path}: {e}") from e


def write_manifest(manifest: LabelManifest, path: Path | str) -> Path:
    path = Path(path)
    lines = [f"width={manifest.width}", f"height={manifest.height}"]
    if manifest.codes != LabelManifest(width=1, height=1).codes:
        lines.append("codes=" + ",".join(f"{c}:{p.value}" for c, p in sorted(manifest.codes.items())))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_label_image(path: Path | str) -> np.ndarray:
    """Read an 8-bit single-channel image as an H×W uint8 array."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"label map not found: {path}")
    try:
        with Image.open(path) as image:
            if image.mode != "L":
                raise FormatError(f"{path}: expected an 8-bit single-channel image, got mode {image.mode}")
            return np.array(image, dtype=np.uint8)
    except UnidentifiedImageError as e:
        raise FormatError(f"{path}: not a PNG or PGM image") from e


def part_masks(label_map: np.ndarray, manifest: LabelManifest) -> dict[PartLabel, PartMask]:
    """Split a label image into one mask per part; unknown nonzero codes are a FormatError."""
    present = {int(code) for code in np.unique(label_map)} - {0}
    unknown = sorted(present - set(manifest.codes))
    if unknown:
        raise FormatError(f"label map contains unknown codes {unknown}")
    masks = {part: np.zeros(label_map.shape, dtype=bool) for part in PART_ORDER}
    for code, part in manifest.codes.items():
        masks[part] |= label_map == code
    return {part: PartMask(bits=bits) for part, bits in masks.items()}


def load_label_map(path: Path | str, manifest: LabelManifest | None = None) -> PartPointSets:
    """
    Load a label map into per-part point sets.

    Args:
        path: PNG or PGM label image
        manifest: Expected size and code table; the standard codes at the
            image's own size when omitted

    Returns:
        PartPointSets with empty sets for absent parts
    """
    label_map = read_label_image(path)
    height, width = label_map.shape
    if manifest is None:
        manifest = LabelManifest(width=width, height=height)
    elif (manifest.height, manifest.width) != (height, width):
        raise FormatError(
            f"{path}: image is {width}x{height}, manifest says {manifest.width}x{manifest.height}"
        )
    masks = part_masks(label_map, manifest)
    sets = {part: mask_to_points(mask, part) for part, mask in masks.items()}
    logger.debug(f"Loaded {path}: " + ", ".join(f"{p.value}={len(s)}" for p, s in sets.items()))
    return PartPointSets(sets=sets, height=height, width=width)


def label_map_from_sets(sets: PartPointSets) -> np.ndarray:
    """Paint every part's pixels with its standard code; later parts win on overlap."""
    label_map = np.zeros((sets.height, sets.width), dtype=np.uint8)
    for part in PART_ORDER:
        point_set = sets.get(part)
        if point_set.is_empty:
            continue
        pixels = np.rint(point_set.points).astype(np.int64)
        label_map[pixels[:, 1], pixels[:, 0]] = part.code
    return label_map


def write_label_map(label_map: np.ndarray, path: Path | str) -> Path:
    """Save as PNG or binary PGM, chosen by suffix."""
    path = Path(path)
    if path.suffix.lower() not in {".png", ".pgm"}:
        raise FormatError(f"label maps are written as .png or .pgm, got {path.suffix!r}")
    Image.fromarray(np.ascontiguousarray(label_map, dtype=np.uint8)).save(path)
    return path
