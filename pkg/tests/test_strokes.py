import itertools

import numpy as np
import pytest

from emkernels import InvalidInputError
from emkernels.datasets import (
    make_arc_stroke,
    make_digit_two,
    make_facing_arcs,
    make_parallel_lines,
    rasterize_polyline,
)
from emkernels.strokes import (
    StrokeSet,
    interaction_region,
    magnetize_stroke,
    neighbour_count,
    resolve_attraction,
    resolve_repulsion,
    split_substrokes,
    stroke_orientation,
    stroke_signature,
    substroke_potentials,
    thin,
    walk_substroke,
)


def prepared(mask, radius=1):
    strokes = split_substrokes(thin(mask))
    return strokes, stroke_orientation(strokes, radius)


def angle_diff_mod_pi(a, b):
    # compare undirected tangents by doubling the angle
    return np.abs(np.angle(np.exp(2j * (a - b)))) / 2


def test_thin_keeps_thin_diagonal():
    m = np.eye(12, dtype=bool)
    assert np.array_equal(thin(m), m)


def test_thin_bar_to_line():
    m = np.zeros((9, 30), dtype=bool)
    m[3:6, 4:26] = True
    t = thin(m)
    assert (neighbour_count(t)[t] <= 2).all()
    cols = np.flatnonzero(t.any(axis=0))
    assert abs(cols.min() - 4) <= 1 and abs(cols.max() - 25) <= 1
    assert np.all(np.argwhere(t)[:, 0] == 4)


def test_thin_square_has_at_most_two_neighbours():
    m = np.zeros((16, 16), dtype=bool)
    m[3:13, 3:13] = True
    t = thin(m)
    assert t.any() and (neighbour_count(t)[t] <= 2).all()


@pytest.mark.parametrize("seed", range(5))
def test_thin_idempotent(seed):
    rng = np.random.default_rng(seed)
    from scipy import ndimage as ndi

    m = ndi.binary_dilation(rng.random((40, 40)) > 0.97, iterations=2)
    once = thin(m)
    assert np.array_equal(thin(once), once)


def test_split_x_gives_four():
    m = np.eye(15, dtype=bool) | np.eye(15, dtype=bool)[::-1]
    s = split_substrokes(thin(m))
    assert s.count == 4
    assert s.intersections[7, 7]


def test_split_t_gives_three():
    m = np.zeros((15, 15), dtype=bool)
    m[3, 2:13] = True
    m[3:13, 7] = True
    s = split_substrokes(m)
    assert s.count == 3


def test_split_arc_gives_one():
    arc = make_arc_stroke(64, 20, np.pi)
    s = split_substrokes(arc)
    assert s.count == 1 and not s.intersections.any()


def test_walk_errors():
    with pytest.raises(InvalidInputError):
        walk_substroke([])
    with pytest.raises(InvalidInputError):
        walk_substroke([(1, 1), (0, 1), (2, 1), (1, 0), (1, 2)])


def test_walk_open_path_starts_at_smallest_endpoint():
    order, closed = walk_substroke([(2, 5), (2, 4), (2, 3)])
    assert order == [(2, 3), (2, 4), (2, 5)] and not closed


def test_walk_cycle():
    ring = [(0, 1), (1, 2), (2, 1), (1, 0)]
    order, closed = walk_substroke(ring)
    assert closed and order[0] == (0, 1) and len(order) == 4


def test_horizontal_line_orientation():
    m = np.zeros((9, 20), dtype=bool)
    m[4, 2:18] = True
    s, o = prepared(m)
    assert np.all(o.theta[o.valid] == 0.0)


def test_diagonal_orientation():
    m = np.eye(15, dtype=bool)
    s = split_substrokes(m)
    for radius in (0, 3):
        o = stroke_orientation(s, radius)
        np.testing.assert_allclose(o.theta[o.valid], np.pi / 4, atol=1e-12)


def test_circle_orientation_against_analytic_tangent():
    size, R = 96, 30
    mask = make_arc_stroke(size, R, 2 * np.pi)
    s, o = prepared(mask, radius=3)
    c = (size - 1) / 2
    rows, cols = np.nonzero(o.valid)
    phi = np.arctan2(rows - c, cols - c)
    tangent = phi + np.pi / 2
    assert np.max(angle_diff_mod_pi(o.theta[rows, cols], tangent)) < 0.15


@pytest.mark.parametrize("k", [1, 2, 3])
def test_orientation_rotation_equivariance(k):
    mask = make_digit_two(96)
    _, o = prepared(mask)
    _, o_rot = prepared(np.rot90(mask, k))
    rotated = np.rot90(o.theta, k)
    valid = np.rot90(o.valid, k)
    assert np.array_equal(valid, o_rot.valid)
    diff = angle_diff_mod_pi(o_rot.theta[valid], rotated[valid] + k * np.pi / 2)
    assert np.max(diff) < 1e-9


def test_arc_concave_side_is_stronger():
    size, R = 96, 25
    c = (size - 1) / 2
    mask = make_arc_stroke(size, R, np.pi / 2, start=-np.pi / 4)
    s, o = prepared(mask)
    V = magnetize_stroke(s, o).V_perp
    # probes on the arc's symmetry axis (+x), 5 px either side
    concave = (int(round(c)), int(round(c + R - 5)))
    convex = (int(round(c)), int(round(c + R + 5)))
    assert abs(V[concave]) > abs(V[convex])


def test_flip_single_stroke_negates():
    mask = make_arc_stroke(64, 20, np.pi)
    s, o = prepared(mask)
    a = magnetize_stroke(s, o, [False]).V_perp
    b = magnetize_stroke(s, o, [True]).V_perp
    assert np.array_equal(b, -a)


def test_flip_all_preserves_magnitude():
    s, o = prepared(make_facing_arcs(64))
    a = magnetize_stroke(s, o, [False, True]).V_perp
    b = magnetize_stroke(s, o, [True, False]).V_perp
    assert np.array_equal(np.abs(a), np.abs(b))


def test_flip_count_checked():
    s, o = prepared(make_facing_arcs(64))
    with pytest.raises(InvalidInputError):
        magnetize_stroke(s, o, [True])


def test_single_stroke_repulsion_is_pinned():
    s, o = prepared(make_arc_stroke(48, 15, np.pi))
    assert resolve_repulsion(s, o) == [False]


def hull_norm(strokes, orient, flips):
    V = magnetize_stroke(strokes, orient, flips).V_perp
    return np.linalg.norm(V[interaction_region(strokes)])


def test_parallel_lines_repel():
    s, o = prepared(make_parallel_lines(64, gap=12))
    assert s.count == 2
    flips = resolve_repulsion(s, o)
    V = magnetize_stroke(s, o, flips).V_perp
    # both lines walk left to right, so repulsion flips one of them
    assert flips == [False, True]
    mid = V[32, 20:44]
    assert np.all(np.abs(mid) > 1.0)
    attract = resolve_attraction(s, o)
    assert attract == [False, False]
    assert hull_norm(s, o, flips) > hull_norm(s, o, attract)


def three_strokes():
    m = np.zeros((48, 48), dtype=bool)
    m[10, 8:40] = True
    m[20, 8:40] = True
    m[28:44, 24] = True
    return prepared(m)


def test_exhaustive_matches_enumeration():
    s, o = three_strokes()
    assert s.count == 3
    best = max(
        ([False] + list(tail) for tail in itertools.product([False, True], repeat=2)),
        key=lambda f: hull_norm(s, o, f),
    )
    assert resolve_repulsion(s, o) == best


def test_greedy_path_for_many_strokes():
    m = np.zeros((80, 80), dtype=bool)
    for r in range(4, 76, 5):
        m[r, 10:70] = True
    s, o = prepared(m)
    assert s.count > 12
    flips = resolve_repulsion(s, o)
    assert flips[0] is False
    best = hull_norm(s, o, flips)
    assert best >= hull_norm(s, o, [False] * s.count)
    # coordinate ascent stops at a local optimum: no single flip improves it
    for k in range(1, s.count):
        trial = list(flips)
        trial[k] = not trial[k]
        assert hull_norm(s, o, trial) <= best * (1 + 1e-12)


def test_repulsion_invariant_to_relabeling():
    s, o = three_strokes()
    base = resolve_repulsion(s, o)
    perm = np.array([0, 3, 1, 2])  # new label of each old label
    relabeled = StrokeSet(s.mask, perm[s.labels], s.intersections)
    got = resolve_repulsion(relabeled, o)
    mapped = [got[perm[k] - 1] for k in range(1, 4)]
    if mapped[0]:
        mapped = [not f for f in mapped]
    assert mapped == base


def test_substroke_potentials_sum_to_total():
    s, o = three_strokes()
    pots = substroke_potentials(s, o)
    np.testing.assert_allclose(pots.sum(axis=0), magnetize_stroke(s, o).V_perp, atol=1e-9)


def test_straight_line_signature_is_symmetric():
    m = np.zeros((33, 33), dtype=bool)
    m[16, 6:27] = True
    s, o = prepared(m)
    sig = stroke_signature(s, o)
    np.testing.assert_allclose(sig, sig[::-1], atol=1e-9)


def test_signature_is_squared_potential():
    s, o = prepared(make_facing_arcs(48))
    flips = resolve_repulsion(s, o)
    V = magnetize_stroke(s, o, flips).V_perp
    np.testing.assert_array_equal(stroke_signature(s, o), V * V)


def test_rasterized_polyline_is_thin():
    pts = np.array([[5.0, 5.0], [20.0, 40.0], [40.0, 10.0]])
    m = rasterize_polyline(pts, (48, 48))
    assert (neighbour_count(m)[m] <= 2).all()
