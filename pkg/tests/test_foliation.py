"""Tests for the developing map, leaves, normalization, Hausdorff distance and the half-ellipse iteration"""
import math

import numpy as np
import pytest

from evaluation.metrics import convex_region_hausdorff, random_convex_polygon, sampled_hausdorff
from leafmap.config import BenzecriConfig
from leafmap.errors import DegenerateFrame, DegenerateTriple, EmptyInput
from leafmap.foliation import (
    benzecri_domains, benzecri_iterate, benzecri_matrix, conic_residual, convexity_report,
    dev_point, extract_leaf, hausdorff_distance, identify_boundary_point, leaf_continuity_scan,
    leaf_diagnostics, leaf_distance_matrix, normalize_leaf, normalized_leaves,
    point_in_convex_polygon, polygon_convexity, sample_boundary, xi1_two_arg, xi_identification
)
from leafmap.frenet import BoundaryPoint, FlagTable, boundary_point_of_word, veronese_flag
from leafmap.group import LETTERS, evaluate, invert_letter, iter_words
from leafmap.projlin import HomPoint

from tests.conftest import SEED

BASE_ANGLES = [0.4, 2.0, 3.6, 5.2]


@pytest.fixture(scope="module")
def veronese_table(rep2):
    angles = set(np.linspace(0.0, 2 * math.pi, 64, endpoint=False).tolist())
    angles.update([1.0] + [1.0 + 0.5 ** k for k in range(1, 9)])
    points = [BoundaryPoint(a) for a in sorted(angles)]
    return FlagTable(entries=tuple((b, veronese_flag(b)) for b in points), base=rep2)


@pytest.fixture(scope="module")
def base3(table3):
    return [table3.nearest(a) for a in BASE_ANGLES]


def circle(radius, n=256):
    t = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
    return radius * np.column_stack([np.cos(t), np.sin(t)])


def test_xi1_two_arg_diagonal(veronese_table):
    t = veronese_table.points[3]
    assert xi1_two_arg(veronese_table, t, t).distance(veronese_table.flag(t).p1) < 1e-15


def test_xi1_two_arg_closed_form(veronese_table):
    # plane x4 = 0 meets the tangent line span{e3, e4} of [0:1] at e3
    t, t_prime = veronese_table.nearest(0.0), veronese_table.nearest(math.pi)
    p = xi1_two_arg(veronese_table, t, t_prime)
    assert p.distance(HomPoint(np.array([0.0, 0.0, 1.0, 0.0]))) < 1e-12


def test_xi1_two_arg_dual_osculation(veronese_table):
    t = veronese_table.nearest(1.0)
    target = veronese_table.flag(t).p1
    distances = [xi1_two_arg(veronese_table, t, veronese_table.nearest(1.0 + 0.5 ** k)).distance(target)
                 for k in range(1, 9)]
    assert all(b < a for a, b in zip(distances, distances[1:]))


def test_dev_point_degenerate(table3):
    a, b = table3.points[0], table3.points[10]
    with pytest.raises(DegenerateTriple):
        dev_point(table3, (a, b, b))


def test_dev_point_lies_in_leaf(table3, base3):
    plus, zero, minus = (table3.nearest(a) for a in (0.5, 2.5, 4.5))
    p = dev_point(table3, (plus, zero, minus))
    assert abs(table3.flag(plus).p3.pairing(p)) < 1e-8
    nl = normalize_leaf(table3, extract_leaf(table3, plus), base3)
    assert point_in_convex_polygon(nl.chart_point(p), nl.chart_polygon)


def test_extract_leaf_incidence_and_conic(rep2, table3, base3):
    x = table3.nearest(boundary_point_of_word(rep2, "a1").angle)
    ys = sample_boundary(table3, 64, include=[x])
    leaf = extract_leaf(table3, x, ys)
    assert len(leaf.boundary) == len(ys)
    assert leaf.incidence_residual() < 1e-8
    assert np.all(np.diff(leaf.angles()) > 0)
    nl = normalize_leaf(table3, leaf, base3)
    assert leaf_diagnostics(nl)["conic_residual"] < 1e-8


def test_conic_residual():
    t = np.linspace(0.0, 2 * math.pi, 20, endpoint=False)
    on_conic = np.column_stack([np.cos(t), np.sin(t), np.ones_like(t)])
    assert conic_residual(on_conic) < 1e-12
    bulge = np.column_stack([1.0 + 0.3 * np.cos(3 * t), np.ones_like(t), np.ones_like(t)])
    off_conic = on_conic * bulge
    assert conic_residual(off_conic) > 1e-4
    with pytest.raises(EmptyInput):
        conic_residual(on_conic[:5])


def test_xi_identification_on_same_leaf(table3):
    x, y = table3.points[7], table3.points[40]
    assert xi_identification(table3, x, x, y).distance(xi1_two_arg(table3, x, y)) < 1e-15


def test_xi_identification_composition(table3):
    x, x1, x2 = (table3.nearest(a) for a in (0.3, 2.3, 4.3))
    for y in table3.points[::60]:
        through = xi_identification(table3, x, x1, y)
        recovered = identify_boundary_point(table3, x1, through)
        assert recovered.angle == y.angle
        composed = xi_identification(table3, x1, x2, recovered)
        assert composed.distance(xi_identification(table3, x, x2, y)) < 1e-8


def test_leaves_are_equivariant_under_every_generator(rep2, rep4, table3):
    for letter in LETTERS:
        M = evaluate(rep4, letter)
        others = [g for g in LETTERS if g not in (letter, invert_letter(letter))]
        x = table3.nearest(boundary_point_of_word(rep2, others[0]).angle)
        gx_angle = table3.act_on_boundary(letter, x)
        assert table3.lookup(gx_angle) is not None
        gx = table3.nearest(gx_angle)
        for other in others[1:]:
            y = table3.nearest(boundary_point_of_word(rep2, other).angle)
            gy_angle = table3.act_on_boundary(letter, y)
            assert table3.lookup(gy_angle) is not None
            gy = table3.nearest(gy_angle)
            moved = HomPoint(M @ xi1_two_arg(table3, x, y).coords)
            assert moved.distance(xi1_two_arg(table3, gx, gy)) < 1e-6, (letter, other)


def test_veronese_leaves_are_equivariant_under_short_words(rep2, rep4):
    xs = [BoundaryPoint(a) for a in (0.7, 2.9, 4.4)]
    acting = FlagTable(entries=(), base=rep2)
    for w in iter_words(2):
        M = evaluate(rep4, w)
        moved = [BoundaryPoint(acting.act_on_boundary(w, b)) for b in xs]
        points = {b.angle: b for b in xs + moved}
        table = FlagTable(entries=tuple((points[a], veronese_flag(points[a])) for a in sorted(points)),
                          base=rep2)
        tol = max(1e-10, 1e-10 * np.linalg.cond(M))
        for i, j in [(0, 1), (1, 2), (2, 0), (1, 0)]:
            image = HomPoint(M @ xi1_two_arg(table, xs[i], xs[j]).coords)
            assert image.distance(xi1_two_arg(table, moved[i], moved[j])) < tol, str(w)


def test_xi_identification_is_continuous_in_y(veronese_table):
    x, x_prime = veronese_table.nearest(4.0), veronese_table.nearest(5.0)
    target = xi_identification(veronese_table, x, x_prime, veronese_table.nearest(1.0))
    distances = [xi_identification(veronese_table, x, x_prime,
                                   veronese_table.nearest(1.0 + 0.5 ** k)).distance(target)
                 for k in range(1, 9)]
    assert all(b < a for a, b in zip(distances, distances[1:]))
    assert distances[-1] < 0.05


def test_normalize_rejects_coincident_base(table3, base3):
    leaf = extract_leaf(table3, table3.points[0])
    with pytest.raises(DegenerateFrame):
        normalize_leaf(table3, leaf, [base3[0], base3[0], base3[1], base3[2]])


def test_fuchsian_normalized_leaves_coincide(table3):
    _, leaves = normalized_leaves(table3, BASE_ANGLES, 4, samples=64)
    assert len(leaves) == 4
    assert leaf_distance_matrix(leaves).max() < 1e-6
    for nl in leaves:
        report = convexity_report(nl)
        assert report.convex
        assert report.min_turn_margin > 1e-10


def test_leaf_continuity_scan(table3, base3):
    grid = [table3.nearest(a) for a in (0.1, 1.1, 2.1)]
    comparisons = leaf_continuity_scan(table3, grid, base3, samples=48)
    assert len(comparisons) == 2
    assert max(c.hausdorff for c in comparisons) < 1e-6
    assert leaf_continuity_scan(table3, grid[:1], base3) == []


def test_bent_continuity_scan_shrinks_with_the_grid(bent_table):
    base = [bent_table.nearest(a) for a in BASE_ANGLES]
    i = bent_table.nearest_index(1.2)
    t0, near = bent_table.points[i], bent_table.points[i + 1]
    far = bent_table.nearest(t0.angle + math.pi)
    close_pair, far_pair = leaf_continuity_scan(bent_table, [near, t0, far], base, samples=48)
    assert np.isfinite(close_pair.hausdorff) and np.isfinite(far_pair.hausdorff)
    assert close_pair.hausdorff <= 0.5 * far_pair.hausdorff + 1e-9


def test_bent_leaves_are_finite(bent_table):
    _, leaves = normalized_leaves(bent_table, BASE_ANGLES, 3, samples=48)
    matrix = leaf_distance_matrix(leaves)
    assert np.all(np.isfinite(matrix))
    assert np.allclose(matrix, matrix.T)


def test_hausdorff_identical_and_circles():
    P = circle(1.0)
    assert hausdorff_distance(P, P) == 0.0
    assert hausdorff_distance(circle(1.0), circle(2.0)) == pytest.approx(1.0, abs=1e-3)
    with pytest.raises(EmptyInput):
        hausdorff_distance(np.zeros((0, 2)), P)


def test_hausdorff_matches_region_loops():
    rng = np.random.default_rng(SEED)
    for _ in range(50):
        P = random_convex_polygon(rng, 200)
        Q = random_convex_polygon(rng, 200)
        assert abs(hausdorff_distance(P, Q) - convex_region_hausdorff(P, Q)) < 1e-9


def test_hausdorff_matches_dense_samples():
    rng = np.random.default_rng(SEED + 1)
    spacing = 2e-3
    for _ in range(20):
        P = random_convex_polygon(rng, 60)
        Q = random_convex_polygon(rng, 60)
        assert abs(hausdorff_distance(P, Q) - sampled_hausdorff(P, Q, spacing)) <= spacing


def test_hausdorff_on_squares():
    square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    # same region, extra vertices at the edge midpoints
    refined = np.array([[0.0, 0.0], [0.5, 0.0], [1.0, 0.0], [1.0, 0.5],
                        [1.0, 1.0], [0.5, 1.0], [0.0, 1.0], [0.0, 0.5]])
    assert hausdorff_distance(square, refined) < 1e-12
    assert sampled_hausdorff(square, refined, 1e-3) <= 1e-3
    shifted = square + np.array([0.3, 0.0])
    assert hausdorff_distance(square, shifted) == pytest.approx(0.3, abs=1e-12)
    assert convex_region_hausdorff(square, shifted) == pytest.approx(0.3, abs=1e-12)
    assert sampled_hausdorff(square, shifted, 1e-3) == pytest.approx(0.3, abs=1e-3)


def test_convexity_regular_polygon():
    report = polygon_convexity(circle(1.0, 64))
    assert report.convex
    assert report.total_turning == pytest.approx(2 * math.pi)
    assert report.max_exterior_angle == pytest.approx(2 * math.pi / 64)


def test_convexity_flags_reflex_vertex():
    dented = np.array([[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [1.0, 1.0], [0.0, 2.0]])
    report = polygon_convexity(dented)
    assert not report.convex
    assert report.reflex_vertices == [3]


def test_point_in_convex_polygon():
    square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    assert point_in_convex_polygon([0.5, 0.5], square)
    assert not point_in_convex_polygon([1.5, 0.5], square)


def test_benzecri_converges():
    cfg = BenzecriConfig()
    domain, target = benzecri_domains(cfg)
    distances = benzecri_iterate(domain, benzecri_matrix(cfg.lam), cfg.steps, target)
    assert len(distances) == cfg.steps + 1
    assert distances[0] > 0
    tail = distances[2:]
    assert all(b <= a + 1e-12 for a, b in zip(tail, tail[1:]))
    assert distances[-1] < 1e-3


def test_benzecri_single_step_and_identity():
    cfg = BenzecriConfig()
    domain, target = benzecri_domains(cfg)
    assert len(benzecri_iterate(domain, benzecri_matrix(cfg.lam), 0, target)) == 1
    constant = benzecri_iterate(domain, np.eye(3), 5, target)
    assert max(constant) - min(constant) < 1e-12
    assert constant[0] > 0


def test_benzecri_grid_must_be_invariant():
    with pytest.raises(ValueError):
        BenzecriConfig(lam=0.3, grid_per_unit=4)
