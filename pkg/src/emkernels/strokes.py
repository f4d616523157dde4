"""Stroke orientation, perpendicular magnetization and stroke interaction.

A stroke is a one-pixel-wide curve.  Strokes are thinned, split at
intersections into simple substrokes, and each substroke pixel receives the
tangent angle of the curve, ``theta = atan2(dy, dx)`` with ``dy`` counted in
rows.  Magnetization places a dipole perpendicular to that tangent on every
pixel, at ``n = 2`` by default.
"""

import itertools
from dataclasses import dataclass

import numpy as np
from scipy import ndimage as ndi
from skimage.morphology import convex_hull_image
from skimage.morphology import thin as _skimage_thin

from ._validation import InvalidInputError, check_mask
from .fields import magnetic_potential

__all__ = [
    "StrokeSet",
    "OrientationMap",
    "thin",
    "neighbour_count",
    "split_substrokes",
    "walk_substroke",
    "stroke_orientation",
    "magnetize_stroke",
    "substroke_potentials",
    "interaction_region",
    "resolve_repulsion",
    "resolve_attraction",
    "stroke_signature",
    "orientation_rows",
]

_RING = np.array([[1, 1, 1], [1, 0, 1], [1, 1, 1]])
_EIGHT = np.ones((3, 3), dtype=bool)
_OFFSETS = [(-1, 0), (0, -1), (0, 1), (1, 0), (-1, -1), (-1, 1), (1, -1), (1, 1)]
EXHAUSTIVE_LIMIT = 12


@dataclass(frozen=True, eq=False)
class StrokeSet:
    """Substrokes of a thin stroke image.

    ``labels`` holds a substroke id (1-based) on every kept pixel and 0
    elsewhere; ``intersections`` marks the removed junction pixels.
    """

    mask: np.ndarray
    labels: np.ndarray
    intersections: np.ndarray

    @property
    def count(self):
        return int(self.labels.max()) if self.labels.size else 0

    def substroke(self, k):
        return self.labels == k


@dataclass(frozen=True, eq=False)
class OrientationMap:
    theta: np.ndarray
    valid: np.ndarray


def thin(mask):
    """Morphological thinning to one-pixel-wide, topology-preserving curves."""
    mask = check_mask(mask)
    if mask.ndim != 2:
        raise InvalidInputError("strokes must be 2D")
    return _skimage_thin(mask)


def neighbour_count(mask):
    mask = np.asarray(mask, dtype=bool)
    return ndi.convolve(mask.astype(np.int64), _RING, mode="constant", cval=0)


def split_substrokes(thin_mask):
    """Remove pixels with three or more neighbours and label what remains."""
    thin_mask = np.asarray(thin_mask, dtype=bool)
    if thin_mask.ndim != 2:
        raise InvalidInputError("strokes must be 2D")
    counts = neighbour_count(thin_mask)
    junctions = thin_mask & (counts >= 3)
    kept = thin_mask & ~junctions
    labels, _ = ndi.label(kept, structure=_EIGHT)
    return StrokeSet(mask=kept, labels=labels, intersections=junctions)


def _neighbours(pixel, pixels):
    r, c = pixel
    return [(r + dr, c + dc) for dr, dc in _OFFSETS if (r + dr, c + dc) in pixels]


def walk_substroke(pixels):
    """Order the pixels of a simple path or cycle.

    Open paths start at their lexicographically smallest endpoint, cycles at
    their lexicographically smallest pixel.  When two unvisited neighbours
    are available the 4-connected one wins, then the smallest.  Returns
    ``(ordered_pixels, closed)``.
    """
    pixels = set(map(tuple, pixels))
    if not pixels:
        raise InvalidInputError("empty substroke")
    degree = {p: len(_neighbours(p, pixels)) for p in pixels}
    if max(degree.values()) > 2:
        raise InvalidInputError("substroke has a branch pixel; split intersections first")
    ends = sorted(p for p, d in degree.items() if d <= 1)
    closed = not ends
    start = min(pixels) if closed else ends[0]
    order = [start]
    seen = {start}
    current = start
    while True:
        options = [p for p in _neighbours(current, pixels) if p not in seen]
        if not options:
            break
        # _OFFSETS lists 4-connected steps first
        current = min(options, key=lambda p: (abs(p[0] - current[0]) + abs(p[1] - current[1]), p))
        order.append(current)
        seen.add(current)
    if len(order) != len(pixels):
        raise InvalidInputError("substroke is not a simple path or cycle")
    if closed and len(order) > 2 and order[0] not in _neighbours(order[-1], pixels):
        raise InvalidInputError("closed substroke does not return to its start")
    return order, closed


def _smooth(seq, radius, passes, closed):
    if radius <= 0 or len(seq) < 2:
        return seq
    mode = "wrap" if closed else "nearest"
    for _ in range(passes):
        seq = ndi.uniform_filter1d(seq, size=2 * radius + 1, mode=mode)
    return seq


def stroke_orientation(strokes, smoothing_radius=1, passes=3):
    """Per-pixel tangent angle of every substroke.

    Per-pixel steps along the walk (central differences, one-sided at the
    ends of open paths) are smoothed by ``passes`` moving averages of
    half-width ``smoothing_radius`` (wrapping on closed substrokes) before
    taking ``atan2(dy, dx)``.
    """
    labels = strokes.labels
    theta = np.full(labels.shape, np.nan)
    valid = np.zeros(labels.shape, dtype=bool)
    objects = ndi.find_objects(labels)
    for k, sl in enumerate(objects, start=1):
        if sl is None:
            continue
        local = np.argwhere(labels[sl] == k) + np.array([sl[0].start, sl[1].start])
        order, closed = walk_substroke(local)
        pts = np.array(order, dtype=np.float64)
        if len(pts) == 1:
            d = np.array([[0.0, 1.0]])
        elif closed:
            d = 0.5 * (np.roll(pts, -1, axis=0) - np.roll(pts, 1, axis=0))
        else:
            # central differences, one-sided at the ends, so the tangent
            # does not depend on which end the walk starts from
            d = np.gradient(pts, axis=0)
        dy = _smooth(d[:, 0], smoothing_radius, passes, closed)
        dx = _smooth(d[:, 1], smoothing_radius, passes, closed)
        rows, cols = pts[:, 0].astype(int), pts[:, 1].astype(int)
        theta[rows, cols] = np.arctan2(dy, dx)
        valid[rows, cols] = True
    return OrientationMap(theta=theta, valid=valid)


def _signed_charge(strokes, flips):
    count = strokes.count
    if flips is None:
        flips = [False] * count
    flips = [bool(f) for f in flips]
    if len(flips) != count:
        raise InvalidInputError(f"expected {count} flips, got {len(flips)}")
    # a pi shift of theta negates exp(i theta); applying it as a sign is exact
    signs = np.concatenate([[0.0], np.where(flips, -1.0, 1.0)])
    return signs[strokes.labels]


def magnetize_stroke(strokes, orient, flips=None, n=2.0, kernel_size=None, engine="auto"):
    """Magnetize every substroke perpendicular to its tangent.

    ``flips[k]`` turns substroke ``k + 1`` by pi, swapping its positive and
    negative sides.
    """
    charge = _signed_charge(strokes, flips)
    return magnetic_potential(charge, orient, n=n, kernel_size=kernel_size, engine=engine)


def substroke_potentials(strokes, orient, n=2.0, kernel_size=None, engine="auto"):
    """``V_perp`` of each substroke on its own, stacked along axis 0."""
    out = []
    for k in range(1, strokes.count + 1):
        charge = (strokes.labels == k).astype(np.float64)
        out.append(magnetic_potential(charge, orient, n, kernel_size, engine).V_perp)
    return np.stack(out) if out else np.zeros((0,) + strokes.labels.shape)


def _greedy(gram, sense):
    k = len(gram)
    signs = np.ones(k)
    improved = True
    while improved:
        improved = False
        for j in range(1, k):
            # change in s^T G s when s_j flips sign
            delta = -4.0 * signs[j] * (gram[j] @ signs - gram[j, j] * signs[j])
            if sense * delta > 1e-12 * abs(signs @ gram @ signs):
                signs[j] = -signs[j]
                improved = True
    return signs


def _best_assignment(gram, sense):
    k = len(gram)
    if k > EXHAUSTIVE_LIMIT:
        return _greedy(gram, sense)
    best, best_score = None, -np.inf
    for tail in itertools.product((1.0, -1.0), repeat=k - 1):
        signs = np.array((1.0,) + tail)
        score = sense * (signs @ gram @ signs)
        if score > best_score:
            best, best_score = signs, score
    return best


def interaction_region(strokes):
    """Convex hull of all stroke pixels, where repulsion is scored."""
    mask = strokes.mask | strokes.intersections
    return convex_hull_image(mask) if mask.sum() >= 3 else mask.copy()


def _interaction_gram(strokes, orient, n, kernel_size, engine, potentials):
    if potentials is None:
        potentials = substroke_potentials(strokes, orient, n, kernel_size, engine)
    flat = potentials[:, interaction_region(strokes)]
    return flat @ flat.T


def resolve_repulsion(strokes, orient, n=2.0, kernel_size=None, engine="auto", potentials=None):
    """Flip pattern maximizing ``||V_perp||_2`` between the strokes.

    The norm is taken over the convex hull of the stroke pixels: repulsion
    raises the potential there, while the far field outside the hull favours
    aligned (attracting) strokes.  The first substroke is never flipped (a
    global sign change leaves the norm unchanged).  Exhaustive up to 12
    substrokes, greedy coordinate ascent beyond.
    """
    if strokes.count == 0:
        return []
    gram = _interaction_gram(strokes, orient, n, kernel_size, engine, potentials)
    return [bool(s < 0) for s in _best_assignment(gram, 1.0)]


def resolve_attraction(strokes, orient, n=2.0, kernel_size=None, engine="auto", potentials=None):
    """Flip pattern minimizing the same norm: facing sides of opposite polarity."""
    if strokes.count == 0:
        return []
    gram = _interaction_gram(strokes, orient, n, kernel_size, engine, potentials)
    return [bool(s < 0) for s in _best_assignment(gram, -1.0)]


def stroke_signature(strokes, orient, flips=None, n=2.0, kernel_size=None, engine="auto"):
    """``|V_perp|**2`` of the magnetized strokes.

    Without explicit ``flips`` the repulsion assignment is used.
    """
    if flips is None:
        flips = resolve_repulsion(strokes, orient, n, kernel_size, engine)
    V = magnetize_stroke(strokes, orient, flips, n, kernel_size, engine).V_perp
    return V * V


def orientation_rows(strokes, orient):
    """``(x, y, theta, substroke_id)`` tuples for every valid pixel."""
    rows = []
    for r, c in np.argwhere(orient.valid):
        rows.append((int(c), int(r), float(orient.theta[r, c]), int(strokes.labels[r, c])))
    return rows
