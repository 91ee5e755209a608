"""
Projective linear algebra kernel: homogeneous points, hyperplanes, lines of RP^3,
projective frames, symmetric powers, real eigen-splittings and cone lifts
"""
from dataclasses import dataclass
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.spatial import ConvexHull

from leafmap.config import DEFAULT_TOLERANCES, Tolerances
from leafmap.errors import (
    DegenerateApex, DegenerateFrame, DegenerateIncidence, LeafMapError,
    NotLoxodromic, UnboundedInChart
)

# entries below this are treated as zero when fixing the sign of a unit vector
_SIGN_EPS = 1e-12


def normalize_projective(v) -> np.ndarray:
    """Unit Euclidean norm, first nonzero entry positive."""
    v = np.asarray(v, dtype=float).reshape(-1)
    norm = np.linalg.norm(v)
    if norm == 0.0 or not np.isfinite(norm):
        raise LeafMapError("homogeneous coordinates must be finite and nonzero")
    v = v / norm
    lead = np.flatnonzero(np.abs(v) > _SIGN_EPS)
    if v[lead[0]] < 0:
        v = -v
    return v


def projective_distance(u, v) -> float:
    """Sine of the angle between two lines through the origin (sign-blind)."""
    u = np.asarray(u, dtype=float) / np.linalg.norm(u)
    v = np.asarray(v, dtype=float) / np.linalg.norm(v)
    return float(np.linalg.norm(u - np.dot(u, v) * v))


def null_vector(m: np.ndarray) -> np.ndarray:
    """Right singular vector of the smallest singular value."""
    _, _, vt = np.linalg.svd(np.atleast_2d(m))
    return vt[-1]


@dataclass(frozen=True, eq=False)
class HomPoint:
    """Point of RP^1, RP^2 or RP^3 in normalized homogeneous coordinates."""
    coords: np.ndarray

    def __post_init__(self):
        coords = normalize_projective(self.coords)
        if coords.size not in (2, 3, 4):
            raise LeafMapError(f"unsupported homogeneous length {coords.size}")
        object.__setattr__(self, "coords", coords)

    @property
    def dim(self) -> int:
        return self.coords.size - 1

    def distance(self, other: "HomPoint") -> float:
        return projective_distance(self.coords, other.coords)


@dataclass(frozen=True, eq=False)
class Covector:
    """Hyperplane given by its annihilating linear form."""
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = normalize_projective(self.coeffs)
        if coeffs.size not in (3, 4):
            raise LeafMapError(f"unsupported covector length {coeffs.size}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def dim(self) -> int:
        return self.coeffs.size - 1

    def pairing(self, p) -> float:
        coords = p.coords if isinstance(p, HomPoint) else normalize_projective(p)
        return float(np.dot(self.coeffs, coords))

    def distance(self, other: "Covector") -> float:
        return projective_distance(self.coeffs, other.coeffs)

    def basis(self) -> np.ndarray:
        """Orthonormal basis (columns) of the hyperplane, deterministic."""
        _, _, vt = np.linalg.svd(self.coeffs[None, :])
        return vt[1:].T


@dataclass(frozen=True, eq=False)
class LineRP3:
    """Projective line of RP^3 stored as an orthonormal 4x2 basis."""
    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float).reshape(4, 2)
        q, r = np.linalg.qr(b)
        if abs(r[1, 1]) <= 1e-12 * max(abs(r[0, 0]), 1e-300):
            raise DegenerateIncidence("line basis has rank below 2")
        object.__setattr__(self, "basis", q)

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def containment_residual(self, p) -> float:
        coords = p.coords if isinstance(p, HomPoint) else normalize_projective(p)
        return float(np.linalg.norm(coords - self.projector() @ coords))

    def distance(self, other: "LineRP3") -> float:
        """Sine of the largest principal angle between the two planes of R^4."""
        return float(np.linalg.norm(self.projector() - other.projector(), 2))


@dataclass(frozen=True, eq=False)
class FrameRP2:
    """Four points of RP^2; general position is tested where it matters (frame_map)."""
    points: Tuple[HomPoint, HomPoint, HomPoint, HomPoint]

    def __post_init__(self):
        pts = tuple(p if isinstance(p, HomPoint) else HomPoint(p) for p in self.points)
        if len(pts) != 4 or any(p.dim != 2 for p in pts):
            raise LeafMapError("a frame of RP^2 needs four points of dimension 2")
        object.__setattr__(self, "points", pts)

    @classmethod
    def standard(cls) -> "FrameRP2":
        return cls((np.array([1.0, 0, 0]), np.array([0, 1.0, 0]),
                    np.array([0, 0, 1.0]), np.array([1.0, 1.0, 1.0])))

    def matrix(self) -> np.ndarray:
        return np.column_stack([p.coords for p in self.points])

    def general_position_margin(self) -> float:
        """Smallest |det| over the four triples of unit representatives."""
        m = self.matrix()
        return min(abs(np.linalg.det(m[:, list(idx)])) for idx in combinations(range(4), 3))


@dataclass(frozen=True)
class EigenSplit:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # unit columns, same order as eigenvalues
    residuals: np.ndarray

    def log_moduli(self) -> np.ndarray:
        return np.log(np.abs(self.eigenvalues))


@dataclass(frozen=True)
class ConeBody:
    """Convex hull of a planar domain and an apex, in affine chart coordinates."""
    vertices: np.ndarray
    equations: np.ndarray
    apex: np.ndarray

    def contains(self, points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        pts = np.atleast_2d(points)
        return np.all(pts @ self.equations[:, :-1].T + self.equations[:, -1] <= tol, axis=1)


# ---------------------------------------------------------------------------
# incidence

def meet_plane_line(plane: Covector, line: LineRP3,
                    tol: Tolerances = DEFAULT_TOLERANCES) -> HomPoint:
    pairing = plane.coeffs @ line.basis
    if np.linalg.norm(pairing) < tol.incidence:
        raise DegenerateIncidence("line is contained in the plane")
    return HomPoint(line.basis @ np.array([-pairing[1], pairing[0]]))


def meet_planes(p1: Covector, p2: Covector,
                tol: Tolerances = DEFAULT_TOLERANCES) -> LineRP3:
    _, s, vt = np.linalg.svd(np.vstack([p1.coeffs, p2.coeffs]))
    if s[1] < tol.incidence:
        raise DegenerateIncidence("planes are proportional")
    return LineRP3(vt[2:].T)


def join_points(a: HomPoint, b: HomPoint,
                tol: Tolerances = DEFAULT_TOLERANCES) -> LineRP3:
    if a.distance(b) < tol.incidence:
        raise DegenerateIncidence("points coincide")
    return LineRP3(np.column_stack([a.coords, b.coords]))


def meet_lines(l1: LineRP3, l2: LineRP3,
               tol: Tolerances = DEFAULT_TOLERANCES) -> HomPoint:
    """Intersection of two coplanar lines of RP^3."""
    _, s, vt = np.linalg.svd(np.hstack([l1.basis, -l2.basis]))
    if s[2] < tol.incidence:
        raise DegenerateIncidence("lines coincide")
    if s[3] > 1e3 * tol.incidence:
        raise DegenerateIncidence("lines are skew")
    return HomPoint(l1.basis @ vt[3, :2])


# ---------------------------------------------------------------------------
# frames

def _frame_columns(frame: FrameRP2, tol: Tolerances) -> np.ndarray:
    if frame.general_position_margin() < tol.general_position:
        raise DegenerateFrame("frame points are not in general position")
    m = frame.matrix()
    weights = np.linalg.solve(m[:, :3], m[:, 3])
    return m[:, :3] * weights


def frame_map(src: FrameRP2, dst: FrameRP2,
              tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """
    The projective map sending src.points[i] to dst.points[i], scaled to det 1.

    With det fixed to 1 there is no remaining sign freedom in 3 dimensions.
    """
    m = _frame_columns(dst, tol) @ np.linalg.inv(_frame_columns(src, tol))
    return m / np.cbrt(np.linalg.det(m))


# ---------------------------------------------------------------------------
# symmetric powers

def sym_power(A, degree: int) -> np.ndarray:
    """Action of A on degree-`degree` binary forms, monomial basis x^d, x^(d-1)y, ..., y^d."""
    (a, b), (c, d) = np.asarray(A, dtype=float)
    out = np.zeros((degree + 1, degree + 1))
    for k in range(degree + 1):
        row = P.polymul(P.polypow([a, b], degree - k), P.polypow([c, d], k))
        out[k, :row.size] = row
    return out


def _check_unimodular(A, tol: Tolerances):
    if abs(np.linalg.det(np.asarray(A, dtype=float)) - 1.0) > tol.det:
        raise LeafMapError("symmetric powers are taken of det 1 matrices only")


def sym_cube(A, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    _check_unimodular(A, tol)
    return sym_power(A, 3)


def sym_square(A, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    _check_unimodular(A, tol)
    return sym_power(A, 2)


def veronese_point(p: HomPoint) -> HomPoint:
    if p.dim != 1:
        raise LeafMapError("veronese_point expects a point of RP^1")
    x, y = p.coords
    return HomPoint(np.array([x ** 3, x * x * y, x * y * y, y ** 3]))


# ---------------------------------------------------------------------------
# real spectra

def _real_spectrum(M: np.ndarray, tol: Tolerances) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of M ordered by decreasing modulus; raises unless all are real."""
    values, vectors = np.linalg.eig(M)
    if np.iscomplexobj(values):
        imag = np.abs(values.imag)
        if np.any(imag > tol.gap * np.abs(values)):
            raise NotLoxodromic("matrix has non-real eigenvalues")
        values, vectors = values.real, vectors.real
    order = np.argsort(-np.abs(values), kind="stable")
    return values[order], vectors[:, order]


def _inverse_iteration(M: np.ndarray, mu: float, v: np.ndarray, steps: int = 2) -> np.ndarray:
    """Polish an approximate eigenvector of M for the eigenvalue mu."""
    shifted = M - mu * np.eye(M.shape[0])
    for _ in range(steps):
        try:
            w = np.linalg.solve(shifted, v)
        except np.linalg.LinAlgError:
            # mu is exact, v already spans the kernel
            break
        norm = np.linalg.norm(w)
        if norm == 0.0 or not np.isfinite(norm):
            break
        v = w / norm
    return v


def eigen_real(A, inverse=None, tol: Tolerances = DEFAULT_TOLERANCES) -> EigenSplit:
    """
    Loxodromic eigen-splitting of a small real matrix.

    Eigenvalues of modulus >= 1 are read off A, the others as reciprocals of
    the dominant eigenvalues of A^-1, so each one is resolved by the matrix in
    which it is large. Pass `inverse` when an exact inverse is known (e.g. the
    product of inverse generators).
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    inverse = np.linalg.inv(A) if inverse is None else np.asarray(inverse, dtype=float)

    fwd_values, fwd_vectors = _real_spectrum(A, tol)
    bwd_values, bwd_vectors = _real_spectrum(inverse, tol)
    eigenvalues = np.empty(n)
    vectors = []
    for i in range(n):
        if abs(fwd_values[i]) >= 1.0:
            lam = fwd_values[i]
            v = _inverse_iteration(A, lam, fwd_vectors[:, i])
        else:
            mu = bwd_values[n - 1 - i]
            lam = 1.0 / mu
            v = _inverse_iteration(inverse, mu, bwd_vectors[:, n - 1 - i])
        eigenvalues[i] = lam
        vectors.append(normalize_projective(v))

    moduli = np.abs(eigenvalues)
    if np.any(moduli[1:] > moduli[:-1]):
        raise NotLoxodromic("eigenvalue moduli are not separated")
    gaps = (moduli[:-1] - moduli[1:]) / moduli[:-1]
    if np.any(gaps < tol.gap):
        raise NotLoxodromic(f"eigenvalue modulus gap {gaps.min():.3e} below tolerance")

    V = np.column_stack(vectors)
    scale = max(np.linalg.norm(A, 2), 1.0)
    residuals = np.linalg.norm(A @ V - V * eigenvalues, axis=0) / scale
    if np.any(residuals > tol.eigen):
        raise NotLoxodromic(f"eigenvector residual {residuals.max():.3e} above tolerance")
    return EigenSplit(eigenvalues=eigenvalues, eigenvectors=V, residuals=residuals)


# ---------------------------------------------------------------------------
# affine charts and cones

def chart_basis(chart: Covector) -> np.ndarray:
    """
    Orthonormal basis of ker(chart) by Gram-Schmidt on the standard vectors.

    For a coordinate chart this keeps the remaining coordinates in order, so
    the chart z = 1 reads off (x/z, y/z).
    """
    phi = chart.coeffs
    basis: List[np.ndarray] = []
    for e in np.eye(phi.size):
        v = e - np.dot(e, phi) * phi
        for b in basis:
            v = v - np.dot(v, b) * b
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            basis.append(v / norm)
        if len(basis) == phi.size - 1:
            break
    return np.column_stack(basis)


def affine_chart(points, chart: Covector,
                 tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Affine coordinates of homogeneous points (rows) in the chart chart(p) = 1."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    pts = pts / np.linalg.norm(pts, axis=1)[:, None]
    values = pts @ chart.coeffs
    if np.any(np.abs(values) < tol.incidence):
        raise UnboundedInChart("a point lies on the line at infinity of the chart")
    return (pts / values[:, None]) @ chart_basis(chart)


def cone_lift(domain: Sequence[HomPoint], apex: HomPoint, chart: Covector,
              tol: Tolerances = DEFAULT_TOLERANCES) -> ConeBody:
    """Convex hull of a planar convex polygon and an apex point, in an affine chart of RP^3."""
    base = affine_chart(np.vstack([p.coords for p in domain]), chart, tol)
    top = affine_chart(apex.coords, chart, tol)[0]
    centroid = base.mean(axis=0)
    _, s, vt = np.linalg.svd(base - centroid)
    extent = max(s[0] / np.sqrt(len(base)), 1e-300)
    if s.size > 2 and s[2] > 1e-6 * s[0]:
        raise LeafMapError("cone base is not planar")
    height = abs(np.dot(top - centroid, vt[2]))
    if height < tol.general_position * max(1.0, extent):
        raise DegenerateApex("apex lies on the carrier plane of the base")
    hull = ConvexHull(np.vstack([base, top]))
    return ConeBody(vertices=hull.points[np.sort(hull.vertices)],
                    equations=hull.equations, apex=top)


def plane_coordinates(plane: Covector, points: np.ndarray) -> np.ndarray:
    """Coordinates of points (rows in R^4) in the orthonormal basis of the plane."""
    return np.atleast_2d(points) @ plane.basis()


def inverse_2x2(A) -> np.ndarray:
    """Inverse of a 2x2 matrix through its adjugate."""
    (a, b), (c, d) = np.asarray(A, dtype=float)
    return np.array([[d, -b], [-c, a]]) / (a * d - b * c)
