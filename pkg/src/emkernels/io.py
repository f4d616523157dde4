"""Grid dumps, image loading and rendering.

EMK1 layout (all little-endian)::

    b"EMK1" | uint8 rank | uint32 extent * rank | float64 values, row-major
"""

import csv
import hashlib
import json
import logging
import struct
from pathlib import Path

import numpy as np
from PIL import Image

from ._validation import FormatError, InvalidInputError

__all__ = [
    "MAGIC",
    "write_emk1",
    "read_emk1",
    "load_charge_image",
    "minmax_normalize",
    "diverging_normalize",
    "save_grid",
    "save_overlay",
    "write_orientation_csv",
    "round_floats",
    "dump_json",
    "file_sha256",
    "PAD",
]

log = logging.getLogger(__name__)

MAGIC = b"EMK1"
PAD = 2
MODES = ("binary", "signed", "grayscale")
RENDERS = ("raw", "pgm_norm", "png_diverging")


def write_emk1(grid, path):
    grid = np.asarray(grid)
    if np.iscomplexobj(grid):
        raise InvalidInputError("EMK1 stores real grids only")
    if grid.ndim < 1 or grid.ndim > 255:
        raise InvalidInputError(f"unsupported rank {grid.ndim}")
    header = MAGIC + struct.pack("<B", grid.ndim) + struct.pack(f"<{grid.ndim}I", *grid.shape)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(grid, dtype="<f8").tobytes())


def read_emk1(path):
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise FormatError(f"{path}: not an EMK1 file")
    rank = data[4]
    offset = 5 + 4 * rank
    shape = struct.unpack(f"<{rank}I", data[5:offset])
    count = int(np.prod(shape))
    if len(data) - offset != 8 * count:
        raise FormatError(f"{path}: payload size does not match extents {shape}")
    return np.frombuffer(data, dtype="<f8", count=count, offset=offset).reshape(shape).astype(np.float64)


def _read_8bit(path):
    try:
        img = Image.open(path)
        img.load()
    except (OSError, ValueError) as exc:
        raise FormatError(f"{path}: cannot read image ({exc})") from exc
    if img.mode == "1":
        img = img.convert("L")
    if img.mode != "L":
        raise FormatError(f"{path}: expected 8-bit grayscale, got mode {img.mode!r}")
    return np.asarray(img, dtype=np.float64)


def load_charge_image(path, mode="binary", threshold=128.0, pad=PAD):
    """Load a PGM/PNG (2D) or EMK1 dump (any rank) as a charge image.

    ``binary`` maps pixels ``>= threshold`` to +1 and the rest to 0,
    ``signed`` maps [0, 255] linearly onto [-1, 1] and ``grayscale`` onto
    [0, 1].  EMK1 values are taken as charges directly.  The result is
    zero-padded by ``pad`` pixels on every side.
    """
    if mode not in MODES:
        raise InvalidInputError(f"unknown mode {mode!r}; expected one of {MODES}")
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == MAGIC:
        charges = read_emk1(path)
        if charges.size and (charges.min() < -1 or charges.max() > 1):
            raise InvalidInputError(f"{path}: EMK1 charges must lie in [-1, 1]")
    else:
        pixels = _read_8bit(path)
        if mode == "binary":
            charges = (pixels >= threshold).astype(np.float64)
        elif mode == "signed":
            charges = pixels / 127.5 - 1.0
        else:
            charges = pixels / 255.0
    if not np.any(charges):
        log.warning("%s: charge image is all zero", path)
    return np.pad(charges, pad) if pad else charges


def minmax_normalize(grid):
    """Map to [0, 1]; a constant grid maps to 0."""
    grid = np.asarray(grid, dtype=np.float64)
    lo, hi = float(grid.min()), float(grid.max())
    if hi == lo:
        return np.zeros_like(grid)
    return (grid - lo) / (hi - lo)


def diverging_normalize(grid):
    """Map to [-1, 1] by dividing by ``max|grid|`` so that zero stays at zero."""
    grid = np.asarray(grid, dtype=np.float64)
    peak = float(np.max(np.abs(grid))) if grid.size else 0.0
    if peak == 0.0:
        return np.zeros_like(grid)
    return grid / peak


def _to_8bit(unit):
    return np.clip(np.rint(unit * 255.0), 0, 255).astype(np.uint8)


def _diverging_rgb(grid, cmap="PiYG"):
    from matplotlib import colormaps

    unit = 0.5 * (diverging_normalize(grid) + 1.0)
    rgba = colormaps[cmap](unit)
    return _to_8bit(rgba[..., :3])


def _render_2d(grid):
    if grid.ndim == 2:
        return grid
    if grid.ndim == 3:
        # maximum-intensity projection along z keeps 3D dumps viewable
        idx = np.argmax(np.abs(grid), axis=0)
        return np.take_along_axis(grid, idx[None], axis=0)[0]
    raise InvalidInputError(f"cannot render a {grid.ndim}D grid")


def save_grid(grid, path, render="raw"):
    """Write ``grid`` as an EMK1 dump, a min-max PGM, or a diverging-colour PNG."""
    grid = np.asarray(grid, dtype=np.float64)
    if render not in RENDERS:
        raise InvalidInputError(f"unknown render {render!r}; expected one of {RENDERS}")
    if not np.all(np.isfinite(grid)):
        raise InvalidInputError("cannot save a grid with non-finite values")
    path = Path(path)
    if render == "raw":
        write_emk1(grid, path)
    elif render == "pgm_norm":
        Image.fromarray(_to_8bit(minmax_normalize(_render_2d(grid))), mode="L").save(path, format="PPM")
    else:
        Image.fromarray(_diverging_rgb(_render_2d(grid)), mode="RGB").save(path, format="PNG")
    return path


def save_overlay(shape_mask, regions, path, alpha=0.6):
    """Alpha-blend region masks over a grey rendering of the shape."""
    shape_mask = np.asarray(shape_mask, dtype=bool)
    if shape_mask.ndim != 2:
        raise InvalidInputError("overlays are only rendered for 2D shapes")
    from matplotlib import colormaps

    base = np.where(shape_mask, 0.35, 0.0)
    rgb = np.repeat(base[..., None], 3, axis=-1)
    colours = colormaps["tab10"].colors
    for k, (_, mask) in enumerate(regions.items()):
        mask = np.asarray(mask, dtype=bool)
        rgb[mask] = (1 - alpha) * rgb[mask] + alpha * np.asarray(colours[k % len(colours)])
    Image.fromarray(_to_8bit(rgb), mode="RGB").save(path, format="PNG")
    return Path(path)


def write_orientation_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "theta", "substroke_id"])
        for x, y, theta, sid in rows:
            writer.writerow([x, y, f"{theta:.12g}", sid])


def round_floats(obj, digits=12):
    if isinstance(obj, float):
        return float(f"{obj:.{digits}g}")
    if isinstance(obj, dict):
        return {k: round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v, digits) for v in obj]
    if isinstance(obj, np.generic):
        return round_floats(obj.item(), digits)
    return obj


def dump_json(obj, path):
    text = json.dumps(round_floats(obj), indent=2, sort_keys=True)
    Path(path).write_text(text + "\n")


def file_sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
