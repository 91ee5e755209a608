"""
Leaves of the foliated projective structure: the developing map formula,
leaf extraction and normalization, boundary identifications between leaves,
Hausdorff comparison of normalized leaves and the half-ellipse iteration
"""
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from leafmap.config import DEFAULT_TOLERANCES, BenzecriConfig, Tolerances
from leafmap.errors import (
    DegenerateFrame, DegenerateTriple, EmptyInput, LeafMapError, UnboundedInChart
)
from leafmap.frenet import TWO_PI, BoundaryPoint, FlagTable, angle_gap
from leafmap.projlin import (
    Covector, FrameRP2, HomPoint, affine_chart, frame_map, join_points,
    meet_lines, meet_plane_line
)

# z = 1 first, then the two other coordinate charts
CHART_CANDIDATES = (
    Covector(np.array([0.0, 0.0, 1.0])),
    Covector(np.array([1.0, 0.0, 0.0])),
    Covector(np.array([0.0, 1.0, 0.0])),
)
BENZECRI_CHART = Covector(np.array([1.0, 1.0, 1.0]))


@dataclass(frozen=True, eq=False)
class Leaf:
    """Boundary samples of dev(x) inside the plane xi3(x), ordered by the angle of y."""
    x: BoundaryPoint
    plane: Covector
    boundary: Tuple[Tuple[BoundaryPoint, HomPoint], ...]

    def points(self) -> np.ndarray:
        return np.vstack([p.coords for _, p in self.boundary])

    def angles(self) -> np.ndarray:
        return np.array([y.angle for y, _ in self.boundary])

    def incidence_residual(self) -> float:
        return float(np.max(np.abs(self.points() @ self.plane.coeffs)))


@dataclass(frozen=True, eq=False)
class NormalizedLeaf:
    source: Leaf
    base_points: Tuple[BoundaryPoint, ...]
    chart_polygon: np.ndarray
    norm_map: np.ndarray  # 3x4, plane coordinates composed with the frame map
    chart: Covector
    frame_images: np.ndarray  # 4x3 images of the frame points

    def plane_points(self) -> np.ndarray:
        """Leaf-plane homogeneous coordinates of the boundary samples."""
        return self.source.points() @ self.source.plane.basis()

    def chart_point(self, p: HomPoint, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
        return affine_chart(self.norm_map @ p.coords, self.chart, tol)[0]


@dataclass(frozen=True)
class LeafComparison:
    t: BoundaryPoint
    t_prime: BoundaryPoint
    hausdorff: float
    residual_profile: np.ndarray


@dataclass
class ConvexityReport:
    convex: bool
    reflex_vertices: List[int] = field(default_factory=list)
    min_turn_margin: float = 0.0
    max_exterior_angle: float = 0.0
    max_turn_jump: float = 0.0
    total_turning: float = 0.0


# ---------------------------------------------------------------------------
# developing map

def xi1_two_arg(table: FlagTable, t: BoundaryPoint, t_prime: BoundaryPoint,
                tol: Tolerances = DEFAULT_TOLERANCES) -> HomPoint:
    """xi3(t) meet xi2(t'), and xi1(t) on the diagonal."""
    flag_t = table.flag(t)
    if angle_gap(t.angle, t_prime.angle) <= table.dedup:
        return flag_t.p1
    return meet_plane_line(flag_t.p3, table.flag(t_prime).p2, tol)


def dev_point(table: FlagTable, triple: Sequence[BoundaryPoint],
              tol: Tolerances = DEFAULT_TOLERANCES) -> HomPoint:
    """Developing map at (t+, t0, t-): meet of two lines in the plane xi3(t+)."""
    plus, zero, minus = triple
    for a, b in combinations((plus, zero, minus), 2):
        if angle_gap(a.angle, b.angle) <= table.dedup:
            raise DegenerateTriple("developing map needs three distinct boundary points")
    first = join_points(table.flag(plus).p1, xi1_two_arg(table, plus, minus, tol), tol)
    second = join_points(xi1_two_arg(table, minus, plus, tol),
                         xi1_two_arg(table, plus, zero, tol), tol)
    return meet_lines(first, second, tol)


def sample_boundary(table: FlagTable, samples: Optional[int] = None,
                    include: Sequence[BoundaryPoint] = ()) -> List[BoundaryPoint]:
    """
    Boundary sample shared by all leaves of a run: a uniform angle grid
    snapped to tabulated points, plus `include`. None means every entry.
    """
    if samples is None:
        return table.points
    chosen = {table.nearest_index(TWO_PI * i / samples) for i in range(samples)}
    chosen.update(table.nearest_index(b.angle) for b in include)
    return [table.entries[i][0] for i in sorted(chosen)]


def extract_leaf(table: FlagTable, x: BoundaryPoint,
                 ys: Optional[Sequence[BoundaryPoint]] = None,
                 tol: Tolerances = DEFAULT_TOLERANCES) -> Leaf:
    """Boundary of dev(x): xi3(x) meet xi2(y) for y != x, and xi1(x) once at y = x."""
    if len(table) < 9:
        raise LeafMapError("leaf extraction needs at least 8 tabulated points besides x")
    flag_x = table.flag(x)
    ys = table.points if ys is None else list(ys)
    others = [y for y in ys if angle_gap(y.angle, x.angle) > table.dedup]
    boundary = [(y, meet_plane_line(flag_x.p3, table.flag(y).p2, tol)) for y in others]
    boundary.append((x, flag_x.p1))
    boundary.sort(key=lambda item: item[0].angle)
    return Leaf(x=x, plane=flag_x.p3, boundary=tuple(boundary))


def conic_residual(points: np.ndarray) -> float:
    """RMS algebraic residual of the best-fit conic through homogeneous points of RP^2."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if len(pts) < 6:
        raise EmptyInput("a conic fit needs at least 6 points")
    pts = pts / np.linalg.norm(pts, axis=1)[:, None]
    x, y, z = pts.T
    design = np.column_stack([x * x, x * y, y * y, x * z, y * z, z * z])
    return float(np.linalg.svd(design, compute_uv=False)[-1] / math.sqrt(len(pts)))


def xi_identification(table: FlagTable, x: BoundaryPoint, x_prime: BoundaryPoint,
                      y: BoundaryPoint, tol: Tolerances = DEFAULT_TOLERANCES) -> HomPoint:
    """Image under the boundary identification dev(x) -> dev(x') of the point labelled y."""
    return xi1_two_arg(table, x_prime, y, tol)


def identify_boundary_point(table: FlagTable, x: BoundaryPoint, p: HomPoint,
                            tol: Tolerances = DEFAULT_TOLERANCES) -> BoundaryPoint:
    """Tabulated y whose boundary point xi1_x(y) of dev(x) is closest to p."""
    best = min(table.points, key=lambda y: xi1_two_arg(table, x, y, tol).distance(p))
    return best


# ---------------------------------------------------------------------------
# normalization

def reference_frame(base: Sequence[BoundaryPoint]) -> FrameRP2:
    """Points of the unit circle at the base angles."""
    return FrameRP2(tuple(np.array([math.cos(b.angle), math.sin(b.angle), 1.0]) for b in base))


def leaf_frame(table: FlagTable, leaf: Leaf, base: Sequence[BoundaryPoint],
               tol: Tolerances = DEFAULT_TOLERANCES) -> FrameRP2:
    """Frame points xi3(t) meet xi2(x_i) in leaf-plane coordinates."""
    if len(base) != 4:
        raise DegenerateFrame("normalization needs exactly 4 base points")
    for a, b in combinations(base, 2):
        if angle_gap(a.angle, b.angle) <= table.dedup:
            raise DegenerateFrame("base points must be distinct")
    E = leaf.plane.basis()
    return FrameRP2(tuple(HomPoint(E.T @ xi1_two_arg(table, leaf.x, b, tol).coords)
                          for b in base))


def normalize_leaf(table: FlagTable, leaf: Leaf, base: Sequence[BoundaryPoint],
                   reference: Optional[FrameRP2] = None,
                   tol: Tolerances = DEFAULT_TOLERANCES,
                   charts: Sequence[Covector] = CHART_CANDIDATES) -> NormalizedLeaf:
    """
    Send the leaf's frame points to the reference frame and chart the result.

    The first chart in which the image is a closed convex polygon is used.
    """
    base = tuple(base)
    if reference is None:
        reference = reference_frame(base)
    src = leaf_frame(table, leaf, base, tol)
    M = frame_map(src, reference, tol)
    norm_map = M @ leaf.plane.basis().T
    images = leaf.points() @ norm_map.T
    frame_images = (M @ src.matrix()).T
    for chart in charts:
        try:
            polygon = affine_chart(images, chart, tol)
        except UnboundedInChart:
            continue
        report = polygon_convexity(polygon)
        if report.convex and abs(abs(report.total_turning) - TWO_PI) < 1e-6:
            return NormalizedLeaf(source=leaf, base_points=base, chart_polygon=polygon,
                                  norm_map=norm_map, chart=chart, frame_images=frame_images)
    raise UnboundedInChart("normalized leaf is not a bounded convex polygon in any chart")


# ---------------------------------------------------------------------------
# planar geometry

def _segment_distances(points: np.ndarray, polygon: np.ndarray) -> np.ndarray:
    """Distances from each point to each edge of the closed polygon (k x m)."""
    start = polygon
    end = np.roll(polygon, -1, axis=0)
    edge = end - start
    length2 = np.einsum("ij,ij->i", edge, edge)
    rel = points[:, None, :] - start[None, :, :]
    t = np.einsum("kmj,mj->km", rel, edge) / np.where(length2 > 0, length2, 1.0)
    t = np.clip(t, 0.0, 1.0)
    nearest = start[None, :, :] + t[..., None] * edge[None, :, :]
    return np.linalg.norm(points[:, None, :] - nearest, axis=-1)


def directed_hausdorff(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Per-vertex distance from P to the closed polyline Q."""
    return _segment_distances(np.asarray(P, dtype=float), np.asarray(Q, dtype=float)).min(axis=1)


def hausdorff_distance(P, Q) -> float:
    """
    Hausdorff distance between two closed convex polylines.

    Vertices suffice on the source side: the distance to a convex curve
    is maximized at a vertex up to the sag of an edge.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    if P.size == 0 or Q.size == 0:
        raise EmptyInput("hausdorff_distance needs two nonempty polygons")
    return float(max(directed_hausdorff(P, Q).max(), directed_hausdorff(Q, P).max()))


def polygon_convexity(polygon: np.ndarray) -> ConvexityReport:
    poly = np.asarray(polygon, dtype=float)
    edges = np.roll(poly, -1, axis=0) - poly
    prev = np.roll(edges, 1, axis=0)
    cross = prev[:, 0] * edges[:, 1] - prev[:, 1] * edges[:, 0]
    dot = np.einsum("ij,ij->i", prev, edges)
    turns = np.arctan2(cross, dot)
    norms = np.linalg.norm(prev, axis=1) * np.linalg.norm(edges, axis=1)
    sines = cross / np.maximum(norms, 1e-300)
    orientation = 1.0 if turns.sum() >= 0 else -1.0
    reflex = [int(i) for i in np.flatnonzero(sines * orientation <= 0)]
    return ConvexityReport(
        convex=not reflex,
        reflex_vertices=reflex,
        min_turn_margin=float(np.min(np.abs(sines))),
        max_exterior_angle=float(np.max(np.abs(turns))),
        max_turn_jump=float(np.max(np.abs(np.diff(np.append(turns, turns[0]))))),
        total_turning=float(turns.sum()),
    )


def convexity_report(nl) -> ConvexityReport:
    """Convexity margins of a normalized leaf (or of a bare polygon array)."""
    polygon = nl.chart_polygon if isinstance(nl, NormalizedLeaf) else np.asarray(nl, dtype=float)
    if len(polygon) < 5:
        raise LeafMapError("convexity report needs at least 5 vertices")
    return polygon_convexity(polygon)


def point_in_convex_polygon(point, polygon) -> bool:
    poly = np.asarray(polygon, dtype=float)
    edges = np.roll(poly, -1, axis=0) - poly
    rel = np.asarray(point, dtype=float) - poly
    cross = edges[:, 0] * rel[:, 1] - edges[:, 1] * rel[:, 0]
    return bool(np.all(cross > 0) or np.all(cross < 0))


def normalized_leaves(table: FlagTable, base_angles: Sequence[float], leaf_count: int,
                      samples: Optional[int] = None, tol: Tolerances = DEFAULT_TOLERANCES,
                      verbose: bool = False) -> Tuple[List[BoundaryPoint], List[NormalizedLeaf]]:
    """
    Leaves at `leaf_count` evenly spaced tabulated angles, normalized against
    the reference frame of the (snapped) base angles over one shared boundary sample.
    """
    base = [table.nearest(a) for a in base_angles]
    reference = reference_frame(base)
    angles = [table.nearest(TWO_PI * i / leaf_count) for i in range(leaf_count)]
    ys = sample_boundary(table, samples, include=angles + base)
    leaves = []
    for i, t in enumerate(angles):
        if verbose:
            print(f"Normalizing leaf {i + 1}/{len(angles)} at angle {t.angle:.6f}")
        leaves.append(normalize_leaf(table, extract_leaf(table, t, ys, tol), base, reference, tol))
    return angles, leaves


def leaf_diagnostics(nl: NormalizedLeaf) -> Dict[str, Any]:
    convexity = convexity_report(nl)
    return {
        "samples": len(nl.chart_polygon),
        "conic_residual": conic_residual(nl.source.points() @ nl.norm_map.T),
        "incidence_residual": nl.source.incidence_residual(),
        "convex": convexity.convex,
        "min_turn_margin": convexity.min_turn_margin,
        "max_exterior_angle": convexity.max_exterior_angle,
        "chart": " ".join(f"{c:g}" for c in nl.chart.coeffs),
    }


def leaf_distance_matrix(leaves: Sequence[NormalizedLeaf]) -> np.ndarray:
    n = len(leaves)
    matrix = np.zeros((n, n))
    for i, j in combinations(range(n), 2):
        matrix[i, j] = matrix[j, i] = hausdorff_distance(leaves[i].chart_polygon,
                                                         leaves[j].chart_polygon)
    return matrix


def leaf_continuity_scan(table: FlagTable, angles: Sequence[BoundaryPoint],
                         base: Sequence[BoundaryPoint],
                         reference: Optional[FrameRP2] = None,
                         samples: Optional[int] = None,
                         tol: Tolerances = DEFAULT_TOLERANCES) -> List[LeafComparison]:
    """Hausdorff distance between normalized leaves at consecutive grid angles."""
    if len(angles) < 2:
        return []
    ys = sample_boundary(table, samples, include=list(angles) + list(base))
    leaves = [normalize_leaf(table, extract_leaf(table, t, ys, tol), base, reference, tol)
              for t in angles]
    comparisons = []
    for (t, first), (t_prime, second) in zip(zip(angles, leaves), zip(angles[1:], leaves[1:])):
        P, Q = first.chart_polygon, second.chart_polygon
        comparisons.append(LeafComparison(t=t, t_prime=t_prime,
                                          hausdorff=hausdorff_distance(P, Q),
                                          residual_profile=directed_hausdorff(P, Q)))
    return comparisons


# ---------------------------------------------------------------------------
# half-ellipse iteration

def benzecri_matrix(lam: float, eta: float = 0.0) -> np.ndarray:
    return np.diag([math.exp(lam), math.exp(eta), math.exp(-lam - eta)])


def _conic_point(ratio: float) -> np.ndarray:
    """Point (u^2, uv, v^2) of the conic w1^2 = w0 w2 with v/u = ratio."""
    u, v = 1.0, ratio
    norm = math.hypot(u, v)
    u, v = u / norm, v / norm
    return np.array([u * u, u * v, v * v])


def benzecri_domains(cfg: BenzecriConfig) -> Tuple[np.ndarray, np.ndarray]:
    """
    Homogeneous vertices (rows) of the half domain and of the invariant ellipse.

    Samples sit at v/u = +-exp(j / grid_per_unit); the diagonal matrix of
    `benzecri_matrix(cfg.lam)` shifts j by an integer, so every iterate of
    the half domain is a sub-polygon of the target polygon.
    """
    top = int(round(cfg.grid_span * cfg.grid_per_unit))
    e1 = np.array([1.0, 0.0, 0.0])
    e3 = np.array([0.0, 0.0, 1.0])

    def side(sign: float, indices) -> List[np.ndarray]:
        return [_conic_point(sign * math.exp(j / cfg.grid_per_unit)) for j in indices]

    target = ([e3] + side(-1.0, range(top, -top - 1, -1)) + [e1]
              + side(1.0, range(-top, top + 1)))
    cut = max(-top, min(cfg.cut_index, top))
    domain = [e3] + side(-1.0, range(top, cut - 1, -1)) + side(1.0, range(cut, top + 1))
    return np.vstack(domain), np.vstack(target)


def benzecri_orbit(domain: np.ndarray, A: np.ndarray, n: int) -> List[np.ndarray]:
    """Homogeneous vertices of A^k domain for k = 0..n."""
    A = np.asarray(A, dtype=float)
    current = np.asarray(domain, dtype=float)
    orbit = [current]
    for _ in range(n):
        current = current @ A.T
        current = current / np.linalg.norm(current, axis=1)[:, None]
        orbit.append(current)
    return orbit


def benzecri_iterate(domain: np.ndarray, A: np.ndarray, n: int, target: np.ndarray,
                     chart: Covector = BENZECRI_CHART,
                     tol: Tolerances = DEFAULT_TOLERANCES) -> List[float]:
    """d_H(A^k domain, target) for k = 0..n in the affine chart."""
    target_xy = affine_chart(target, chart, tol)
    return [hausdorff_distance(affine_chart(current, chart, tol), target_xy)
            for current in benzecri_orbit(domain, A, n)]
