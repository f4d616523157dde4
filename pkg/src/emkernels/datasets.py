"""Synthetic shapes and strokes used by the tests, the CLI demos and the docs.

Coordinates of returned landmarks are ``(row, col)`` (``(z, row, col)`` in
3D) as floats.
"""

import numpy as np
from scipy import ndimage as ndi
from skimage.draw import polygon as fill_polygon
from skimage.morphology import thin

__all__ = [
    "make_disk",
    "make_square",
    "make_star",
    "make_c_shape",
    "make_mug",
    "sinusoidal_warp",
    "rasterize_polyline",
    "circle_arc_points",
    "make_arc_stroke",
    "make_facing_arcs",
    "make_parallel_lines",
    "digit_two_polyline",
    "make_digit_two",
]


def make_disk(size, radius, center=None):
    size = (size, size) if np.isscalar(size) else tuple(size)
    if center is None:
        center = ((size[0] - 1) / 2, (size[1] - 1) / 2)
    rr, cc = np.indices(size)
    return (rr - center[0]) ** 2 + (cc - center[1]) ** 2 <= radius**2


def make_square(size, side, offset=None):
    mask = np.zeros((size, size), dtype=bool)
    start = (size - side) // 2 if offset is None else offset
    mask[start : start + side, start : start + side] = True
    return mask


def sinusoidal_warp(points, amplitude, wavelength, phase=0.0):
    """Displace ``(row, col)`` points by a smooth sinusoidal field.

    Each coordinate is shifted by ``amplitude * sin`` of the other one, so the
    warp bends straight edges into waves without tearing the shape.
    """
    pts = np.asarray(points, dtype=np.float64)
    r, c = pts[..., 0], pts[..., 1]
    k = 2 * np.pi / wavelength
    out = pts.copy()
    out[..., 0] = r + amplitude * np.sin(k * c + phase)
    out[..., 1] = c + amplitude * np.sin(k * r + 0.7 + phase)
    return out


def _densify(vertices, step=0.25):
    closed = np.vstack([vertices, vertices[:1]])
    pts = []
    for a, b in zip(closed[:-1], closed[1:]):
        count = max(2, int(np.ceil(np.linalg.norm(b - a) / step)))
        t = np.linspace(0.0, 1.0, count, endpoint=False)[:, None]
        pts.append(a + t * (b - a))
    return np.vstack(pts)


def make_star(
    size=256,
    n_points=5,
    outer=0.4,
    inner=0.4 * 0.381966,
    rotation=0.0,
    warp_amplitude=0.0,
    warp_wavelength=None,
):
    """Filled star polygon, optionally warped.

    ``outer`` and ``inner`` are radii as fractions of ``size`` and
    ``warp_amplitude`` is a fraction of the star diameter.  Returns
    ``(mask, tips, notches)`` with landmarks after warping.
    """
    center = np.array([(size - 1) / 2, (size - 1) / 2])
    angles = rotation - np.pi / 2 + np.arange(2 * n_points) * np.pi / n_points
    radii = np.where(np.arange(2 * n_points) % 2 == 0, outer * size, inner * size)
    vertices = center + np.stack([radii * np.sin(angles), radii * np.cos(angles)], axis=1)
    boundary = _densify(vertices)
    if warp_amplitude:
        amp = warp_amplitude * 2 * outer * size
        wavelength = warp_wavelength or 0.5 * size
        boundary = sinusoidal_warp(boundary, amp, wavelength)
        vertices = sinusoidal_warp(vertices, amp, wavelength)
    rr, cc = fill_polygon(boundary[:, 0], boundary[:, 1], shape=(size, size))
    mask = np.zeros((size, size), dtype=bool)
    mask[rr, cc] = True
    return mask, vertices[0::2], vertices[1::2]


def make_c_shape(size=64, outer=0.35, inner=0.2, gap_angle=np.pi / 2):
    """Thick ring with a gap opening to the right; returns ``(mask, tips, back)``."""
    c = (size - 1) / 2
    rr, cc = np.indices((size, size))
    r = np.hypot(rr - c, cc - c)
    ang = np.arctan2(rr - c, cc - c)
    mask = (r <= outer * size) & (r >= inner * size) & (np.abs(ang) >= gap_angle / 2)
    mid = 0.5 * (outer + inner) * size
    tips = np.array(
        [[c + mid * np.sin(s * gap_angle / 2), c + mid * np.cos(gap_angle / 2)] for s in (-1, 1)]
    )
    back = np.array([c, c - outer * size])
    return mask, tips, back


def make_mug(size=64, outer=0.28, inner=0.21, base=0.14, floor=0.08, top=0.84, handle=True):
    """Voxelized mug with its axis along z (axis 0).

    Returns ``(mask, cavity_wall, rim)`` where the last two are boolean voxel
    sets on the mug surface: the wall facing the cavity (sides and floor) and
    the top lip of the wall.
    """
    z, y, x = np.indices((size, size, size), dtype=np.float64)
    c = (size - 1) / 2
    r = np.hypot(y - c, x - c)
    z0, z1, zf = base * size, top * size, (base + floor) * size
    R, Ri = outer * size, inner * size
    body = (r <= R) & (z >= z0) & (z <= z1)
    cavity = (r < Ri) & (z > zf) & (z <= z1 + 1)
    mask = body & ~cavity
    if handle:
        hz, hx = (z0 + z1) / 2, c + R
        major, minor = 0.22 * (z1 - z0), 0.045 * size
        ring = np.hypot(np.hypot(z - hz, x - hx) - major, y - c) <= minor
        mask |= ring & (x > c + R - 1)
    structure = ndi.generate_binary_structure(3, 1)
    surface = mask & ~ndi.binary_erosion(mask, structure, border_value=0)
    near_cavity = ndi.binary_dilation(cavity, structure) & ~cavity
    cavity_wall = surface & near_cavity
    rim = surface & (z >= z1 - 1) & (r >= Ri - 1) & (r <= R + 1)
    return mask, cavity_wall, rim


def rasterize_polyline(points, shape, step=0.1):
    """Rasterize a ``(row, col)`` polyline into a one-pixel-wide stroke."""
    pts = np.asarray(points, dtype=np.float64)
    dense = [pts[:1]]
    for a, b in zip(pts[:-1], pts[1:]):
        count = max(1, int(np.ceil(np.linalg.norm(b - a) / step)))
        t = np.linspace(0.0, 1.0, count + 1)[1:, None]
        dense.append(a + t * (b - a))
    dense = np.rint(np.vstack(dense)).astype(int)
    keep = np.all((dense >= 0) & (dense < np.array(shape)), axis=1)
    mask = np.zeros(shape, dtype=bool)
    mask[dense[keep, 0], dense[keep, 1]] = True
    return thin(mask)


def circle_arc_points(center, radius, start, extent, count=None):
    """Points on a circle arc; angles in radians measured in x/y (row-down)."""
    count = count or max(16, int(abs(extent) * radius * 4))
    t = start + np.linspace(0.0, extent, count)
    return np.stack([center[0] + radius * np.sin(t), center[1] + radius * np.cos(t)], axis=1)


def make_arc_stroke(size, radius, extent, start=None, center=None):
    center = center or ((size - 1) / 2, (size - 1) / 2)
    if start is None:
        start = -extent / 2
    if extent >= 2 * np.pi:
        pts = circle_arc_points(center, radius, 0.0, 2 * np.pi)
    else:
        pts = circle_arc_points(center, radius, start, extent)
    return rasterize_polyline(pts, (size, size))


def make_facing_arcs(size=96, radius=0.3, half_extent=np.pi / 3):
    """Two arcs ``( )`` of a common circle with their concave sides facing."""
    c = ((size - 1) / 2, (size - 1) / 2)
    R = radius * size
    left = circle_arc_points(c, R, np.pi - half_extent, 2 * half_extent)
    right = circle_arc_points(c, R, -half_extent, 2 * half_extent)
    mask = rasterize_polyline(left, (size, size)) | rasterize_polyline(right, (size, size))
    return mask


def make_parallel_lines(size=64, gap=12, length=0.6):
    mask = np.zeros((size, size), dtype=bool)
    mid = size // 2
    half = int(length * size / 2)
    mask[mid - gap // 2, mid - half : mid + half] = True
    mask[mid + gap // 2, mid - half : mid + half] = True
    return mask


def digit_two_polyline(size=128):
    """Polyline of a handwritten-style "2" in ``(row, col)`` pixel coordinates."""
    s = size / 128.0
    arc = circle_arc_points((40 * s, 62 * s), 22 * s, np.radians(200), np.radians(190), count=60)
    tail = np.array([[98 * s, 36 * s], [98 * s, 92 * s]])
    return np.vstack([arc, tail])


def make_digit_two(size=128, warp_amplitude=0.0, warp_wavelength=None):
    pts = digit_two_polyline(size)
    dense = rasterize_dense(pts)
    if warp_amplitude:
        dense = sinusoidal_warp(dense, warp_amplitude, warp_wavelength or size / 2.5)
    return rasterize_polyline(dense, (size, size))


def rasterize_dense(points, step=0.25):
    pts = np.asarray(points, dtype=np.float64)
    out = [pts[:1]]
    for a, b in zip(pts[:-1], pts[1:]):
        count = max(1, int(np.ceil(np.linalg.norm(b - a) / step)))
        t = np.linspace(0.0, 1.0, count + 1)[1:, None]
        out.append(a + t * (b - a))
    return np.vstack(out)
