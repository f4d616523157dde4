"""Contour regions of interest from the potential and field of a filled shape.

A shape filled with unit charges is convolved with a monopole kernel; the
potential ``V`` and field magnitude ``|E|`` are then read on the contour only
and thresholded with percentile bands, one ``(V, |E|)`` band pair per region.
"""

import json
import math
from dataclasses import dataclass, fields

import numpy as np
from scipy import ndimage as ndi

from ._validation import InvalidInputError, check_dimension, check_mask, check_same_shape
from .fields import electric_potential, field_from_potential

__all__ = [
    "REGION_NAMES",
    "ThresholdTable",
    "DEFAULT_THRESHOLDS",
    "RegionSet",
    "extract_contour",
    "on_contour_values",
    "percentile_band",
    "growth_radius",
    "grow_region",
    "contour_fields",
    "classify_regions",
    "detect_regions",
    "region_report",
]

REGION_NAMES = ("concave", "convex", "flat", "near_cm", "far_cm", "inside")


class ThresholdTable(dict):
    """Mapping ``region -> (V_min%, V_max%, E_min%, E_max%)``."""

    def __init__(self, bands=None, **kwargs):
        super().__init__()
        items = dict(bands or {}, **kwargs)
        for name, band in items.items():
            self[name] = band

    def __setitem__(self, name, band):
        if name not in REGION_NAMES:
            raise InvalidInputError(f"unknown region {name!r}; expected one of {REGION_NAMES}")
        band = tuple(float(b) for b in band)
        if len(band) != 4:
            raise InvalidInputError(f"region {name!r} needs 4 percentile bounds, got {len(band)}")
        for lo, hi in (band[:2], band[2:]):
            if not 0.0 <= lo <= hi <= 100.0:
                raise InvalidInputError(f"invalid percentile pair ({lo}, {hi}) for {name!r}")
        super().__setitem__(name, band)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            data = json.load(fh)
        data = data.get("thresholds", data)
        return cls({k: v for k, v in data.items()})

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump({"thresholds": {k: list(v) for k, v in self.items()}}, fh, indent=2)


DEFAULT_THRESHOLDS = ThresholdTable(
    concave=(70, 100, 0, 50),
    convex=(15, 40, 15, 40),
    flat=(40, 60, 80, 95),
    near_cm=(80, 95, 40, 60),
    far_cm=(0, 25, 0, 25),
    inside=(90, 100, 0, 10),
)


@dataclass(frozen=True, eq=False)
class RegionSet:
    concave: np.ndarray
    convex: np.ndarray
    flat: np.ndarray
    near_cm: np.ndarray
    far_cm: np.ndarray
    inside: np.ndarray

    def items(self):
        return [(f.name, getattr(self, f.name)) for f in fields(self)]

    def __getitem__(self, name):
        if name not in REGION_NAMES:
            raise KeyError(name)
        return getattr(self, name)

    def map(self, func):
        return RegionSet(**{name: func(mask) for name, mask in self.items()})


def _full_structure(ndim):
    return np.ones((3,) * ndim, dtype=bool)


def extract_contour(mask):
    """Shape pixels with at least one outside neighbour in 4- (6-) connectivity."""
    mask = check_mask(mask)
    eroded = ndi.binary_erosion(mask, ndi.generate_binary_structure(mask.ndim, 1), border_value=0)
    return mask & ~eroded


def on_contour_values(values, contour, square=False):
    values = np.asarray(values, dtype=np.float64)
    contour = np.asarray(contour, dtype=bool)
    check_same_shape(values, contour, ("values", "contour"))
    out = np.where(contour, values, 0.0)
    return out * out if square else out


def percentile_band(values, mask, lo, hi):
    """Mask pixels whose value lies in the percentile band ``[lo, hi]``.

    Percentiles are taken over the masked values only, by linear
    interpolation, with each bound widened outward to the nearest sample so
    that the boundary samples are included.
    """
    values = np.asarray(values, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    check_same_shape(values, mask, ("values", "mask"))
    if not mask.any():
        raise InvalidInputError("percentile band needs a nonempty mask")
    lo, hi = float(lo), float(hi)
    if lo > hi:
        raise InvalidInputError(f"lower percentile {lo} exceeds upper percentile {hi}")
    if lo < 0 or hi > 100:
        raise InvalidInputError("percentiles must lie in [0, 100]")
    samples = values[mask]
    v_lo = np.percentile(samples, lo, method="lower")
    v_hi = np.percentile(samples, hi, method="higher")
    return mask & (values >= v_lo) & (values <= v_hi)


def growth_radius(pct, shape):
    # half-up rounding, not banker's
    return int(math.floor(float(pct) * max(shape) + 0.5))


def grow_region(region, contour, pct=0.05, radius=None):
    """Grow ``region`` along ``contour`` by a geodesic distance.

    The radius defaults to ``round(pct * max(image extents))`` pixels; steps
    move between 8-connected (26 in 3D) contour pixels.
    """
    region = np.asarray(region, dtype=bool)
    contour = np.asarray(contour, dtype=bool)
    check_same_shape(region, contour, ("region", "contour"))
    if np.any(region & ~contour):
        raise InvalidInputError("region must be a subset of the contour")
    if radius is None:
        if pct < 0:
            raise InvalidInputError("growth percentage must be non-negative")
        radius = growth_radius(pct, region.shape)
    if radius <= 0 or not region.any():
        return region.copy()
    return ndi.binary_dilation(
        region, structure=_full_structure(region.ndim), iterations=int(radius), mask=contour
    )


def _snap(values, contour):
    # FFT round-off breaks exact ties between symmetric pixels; quantize to
    # 1e-10 of the contour's value range so ties survive
    samples = values[contour]
    scale = float(np.max(np.abs(samples))) if samples.size else 0.0
    if scale == 0.0:
        return values
    return np.round(values / scale, 10) * scale


def contour_fields(mask, n=3.0, kernel_size=None, engine="auto"):
    """Contour, potential and field magnitude of a uniformly charged shape."""
    mask = check_mask(mask)
    n = check_dimension(n)
    V = electric_potential(mask.astype(np.float64), n, kernel_size=kernel_size, engine=engine)
    field = field_from_potential(V)
    return extract_contour(mask), V, field.magnitude


def classify_regions(V, E_mag, contour, table=None, growth_pct=0.05):
    table = DEFAULT_THRESHOLDS if table is None else ThresholdTable(table)
    contour = np.asarray(contour, dtype=bool)
    V = _snap(np.asarray(V, dtype=np.float64), contour)
    E_mag = _snap(np.asarray(E_mag, dtype=np.float64), contour)
    regions = {}
    for name in REGION_NAMES:
        if name not in table:
            regions[name] = np.zeros_like(contour)
            continue
        v_lo, v_hi, e_lo, e_hi = table[name]
        band = percentile_band(V, contour, v_lo, v_hi) & percentile_band(E_mag, contour, e_lo, e_hi)
        regions[name] = grow_region(band, contour, growth_pct)
    return RegionSet(**regions)


def detect_regions(mask, n=3.0, table=None, growth_pct=0.05, kernel_size=None, engine="auto"):
    contour, V, E_mag = contour_fields(mask, n, kernel_size, engine)
    return classify_regions(V, E_mag, contour, table, growth_pct)


def region_report(regions, contour):
    """JSON-ready summary: counts, bounding boxes and connected components."""
    contour = np.asarray(contour, dtype=bool)
    total = int(contour.sum())
    structure = _full_structure(contour.ndim)
    report = {}
    for name, mask in regions.items():
        count = int(mask.sum())
        entry = {
            "pixel_count": count,
            "contour_fraction": count / total if total else 0.0,
            "bbox": None,
            "components": [],
        }
        if count:
            idx = np.argwhere(mask)
            entry["bbox"] = {"min": idx.min(axis=0).tolist(), "max": idx.max(axis=0).tolist()}
            labels, n_comp = ndi.label(mask, structure=structure)
            for k in range(1, n_comp + 1):
                comp = np.argwhere(labels == k)
                entry["components"].append(
                    {"pixel_count": int(len(comp)), "centroid": comp.mean(axis=0).tolist()}
                )
        report[name] = entry
    return report
