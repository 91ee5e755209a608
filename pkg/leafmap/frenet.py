"""
Frenet flags on a finite sample of the boundary of the surface group
"""
import bisect
import math
from dataclasses import dataclass, field
from itertools import combinations
from multiprocessing import Pool
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import comb

from leafmap.config import DEFAULT_TOLERANCES, Tolerances
from leafmap.errors import LeafMapError, NoOverlap, NotLoxodromic, UntabulatedPoint
from leafmap.group import SurfaceRep, Word, WordLike, as_word, evaluate, evaluate_inverse, iter_words
from leafmap.projlin import (
    Covector, HomPoint, LineRP3, eigen_real, join_points, null_vector, projective_distance
)

TWO_PI = 2.0 * math.pi


def angle_of(vec) -> float:
    """Angle in [0, 2pi) of a point of RP^1; [cos(a/2) : sin(a/2)] has angle a."""
    x, y = np.asarray(vec, dtype=float)
    return (2.0 * math.atan2(y, x)) % TWO_PI


def angle_gap(a: float, b: float) -> float:
    """Distance on the circle R / 2piZ."""
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


@dataclass(frozen=True)
class BoundaryPoint:
    angle: float
    word: Optional[Word] = None

    def __post_init__(self):
        object.__setattr__(self, "angle", float(self.angle) % TWO_PI)

    def point(self) -> HomPoint:
        return HomPoint(np.array([math.cos(self.angle / 2), math.sin(self.angle / 2)]))


@dataclass(frozen=True, eq=False)
class FlagRP3:
    """Nested point, line and plane of RP^3."""
    p1: HomPoint
    p2: LineRP3
    p3: Covector

    def incidence_residuals(self) -> Tuple[float, float, float]:
        """(p1 on p2, p2 in p3, p1 in p3)"""
        return (self.p2.containment_residual(self.p1),
                float(np.linalg.norm(self.p3.coeffs @ self.p2.basis)),
                abs(self.p3.pairing(self.p1)))

    def act(self, M: np.ndarray) -> "FlagRP3":
        return FlagRP3(HomPoint(M @ self.p1.coords), LineRP3(M @ self.p2.basis),
                       Covector(np.linalg.solve(M.T, self.p3.coeffs)))

    def distance(self, other: "FlagRP3") -> float:
        return max(self.p1.distance(other.p1), self.p2.distance(other.p2),
                   self.p3.distance(other.p3))


@dataclass(frozen=True, eq=False)
class FlagTable:
    """Flags at attracting fixed points, sorted by boundary angle."""
    entries: Tuple[Tuple[BoundaryPoint, FlagRP3], ...]
    base: SurfaceRep
    skipped: int = 0
    dedup: float = DEFAULT_TOLERANCES.dedup
    _angles: Tuple[float, ...] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        object.__setattr__(self, "_angles", tuple(b.angle for b, _ in self.entries))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Tuple[BoundaryPoint, FlagRP3]]:
        return iter(self.entries)

    @property
    def angles(self) -> np.ndarray:
        return np.array(self._angles)

    @property
    def points(self) -> List[BoundaryPoint]:
        return [b for b, _ in self.entries]

    def nearest_index(self, angle: float) -> int:
        if not self.entries:
            raise UntabulatedPoint("flag table is empty")
        angle = angle % TWO_PI
        i = bisect.bisect_left(self._angles, angle)
        candidates = {i % len(self), (i - 1) % len(self)}
        return min(candidates, key=lambda j: angle_gap(self._angles[j], angle))

    def lookup(self, angle: float) -> Optional[int]:
        """Index of the entry at this angle within the dedup tolerance, else None."""
        if not self.entries:
            return None
        j = self.nearest_index(angle)
        return j if angle_gap(self._angles[j], angle) <= self.dedup else None

    def nearest(self, angle: float) -> BoundaryPoint:
        return self.entries[self.nearest_index(angle)][0]

    def flag(self, b: BoundaryPoint) -> FlagRP3:
        j = self.lookup(b.angle)
        if j is None:
            raise UntabulatedPoint(f"no flag tabulated at angle {b.angle:.12f}")
        return self.entries[j][1]

    def act_on_boundary(self, w: WordLike, b: BoundaryPoint) -> float:
        """Angle of w.b under the base Fuchsian action."""
        return angle_of(evaluate(self.base, w) @ b.point().coords)


# ---------------------------------------------------------------------------
# flags

def boundary_point_of_word(rep2: SurfaceRep, w: WordLike,
                           tol: Tolerances = DEFAULT_TOLERANCES) -> BoundaryPoint:
    """Attracting fixed point of the Moebius action; use the inverse word for the repelling one."""
    w = as_word(w)
    if len(w) == 0:
        raise NotLoxodromic("the identity has no attracting fixed point")
    split = eigen_real(evaluate(rep2, w), inverse=evaluate_inverse(rep2, w), tol=tol)
    return BoundaryPoint(angle_of(split.eigenvectors[:, 0]), word=w)


def veronese_flag(b: BoundaryPoint) -> FlagRP3:
    """
    Osculating flag of the twisted cubic t -> [x^3 : x^2 y : x y^2 : y^3] at b.

    The plane is the binary cubic pairing with p: phi(v(r)) = det(p, r)^3.
    """
    x, y = b.point().coords
    qx, qy = -y, x
    taylor = np.zeros((4, 3))
    for j in range(4):
        series = np.polynomial.polynomial.polymul(
            np.polynomial.polynomial.polypow([x, qx], 3 - j),
            np.polynomial.polynomial.polypow([y, qy], j))
        taylor[j, :min(3, series.size)] = series[:3]
    plane = np.array([comb(3, j, exact=True) * (-y) ** (3 - j) * x ** j for j in range(4)])
    return FlagRP3(HomPoint(taylor[:, 0]), LineRP3(taylor[:, :2]), Covector(plane))


def _flag_from_vectors(v: np.ndarray) -> FlagRP3:
    return FlagRP3(HomPoint(v[:, 0]), LineRP3(v[:, :2]), Covector(null_vector(v[:, :3].T)))


def flag_of_word(rep4: SurfaceRep, w: WordLike,
                 tol: Tolerances = DEFAULT_TOLERANCES) -> FlagRP3:
    """Attracting flag of rho(w): top eigenline, top two, top three."""
    w = as_word(w)
    split = eigen_real(evaluate(rep4, w), inverse=evaluate_inverse(rep4, w), tol=tol)
    return _flag_from_vectors(split.eigenvectors)


def _tabulate_word(task) -> Optional[Tuple[float, str, FlagRP3]]:
    rep4, rep2, letters, tol = task
    w = Word(letters)
    try:
        b = boundary_point_of_word(rep2, w, tol)
        return b.angle, str(w), flag_of_word(rep4, w, tol)
    except NotLoxodromic:
        return None


def _run_tasks(func, tasks: list, workers: int) -> list:
    if workers > 1 and len(tasks) > 1:
        with Pool(workers) as pool:
            return pool.map(func, tasks, chunksize=max(1, len(tasks) // (4 * workers)))
    return [func(task) for task in tasks]


def build_flag_table(rep4: SurfaceRep, rep2_base: SurfaceRep, max_len: int,
                     tol: Tolerances = DEFAULT_TOLERANCES, workers: int = 1,
                     verbose: bool = False) -> FlagTable:
    """
    One flag per distinct attracting fixed point of the words of length <= max_len.

    Angles closer than the dedup tolerance are merged, keeping the shorter word.
    """
    words = list(iter_words(max_len))
    if verbose:
        print(f"Tabulating {len(words)} words (max length {max_len}, {workers} worker(s))")
    tasks = [(rep4, rep2_base, w.letters, tol) for w in words]
    results = _run_tasks(_tabulate_word, tasks, workers)

    found = [(angle, order, name, flag)
             for order, result in enumerate(results) if result is not None
             for angle, name, flag in [result]]
    skipped = len(results) - len(found)
    if skipped and verbose:
        print(f"⚠️  Skipped {skipped} non-loxodromic word(s)")
    found.sort(key=lambda item: (item[0], item[1]))

    clusters: List[list] = []
    for item in found:
        if clusters and item[0] - clusters[-1][-1][0] <= tol.dedup:
            clusters[-1].append(item)
        else:
            clusters.append([item])
    if len(clusters) > 1 and clusters[0][0][0] + TWO_PI - clusters[-1][-1][0] <= tol.dedup:
        clusters[0].extend(clusters.pop())

    entries = []
    for cluster in clusters:
        angle, _, name, flag = min(cluster, key=lambda item: (len(item[2]), item[1]))
        entries.append((BoundaryPoint(angle, Word.parse(name)), flag))
    entries.sort(key=lambda entry: entry[0].angle)
    return FlagTable(entries=tuple(entries), base=rep2_base, skipped=skipped, dedup=tol.dedup)


# ---------------------------------------------------------------------------
# checks

def check_equivariance(rep4: SurfaceRep, table: FlagTable, w: WordLike) -> float:
    """Max distance between rho(w) xi(x) and xi(w x) over tabulated pairs."""
    w = as_word(w)
    if not len(table):
        raise NoOverlap("flag table is empty")
    M = evaluate(rep4, w)
    worst: Optional[float] = None
    for b, flag in table:
        j = table.lookup(table.act_on_boundary(w, b))
        if j is None:
            continue
        residual = flag.act(M).distance(table.entries[j][1])
        worst = residual if worst is None else max(worst, residual)
    if worst is None:
        raise NoOverlap(f"no tabulated point has its {w}-translate tabulated")
    return worst


@dataclass
class GeneralPositionReport:
    trials: int = 0
    plane_margins: List[float] = field(default_factory=list)
    sum_margins: List[float] = field(default_factory=list)
    failures: List[Tuple[float, float, float]] = field(default_factory=list)

    @property
    def min_plane_margin(self) -> Optional[float]:
        return min(self.plane_margins) if self.plane_margins else None

    @property
    def min_sum_margin(self) -> Optional[float]:
        return min(self.sum_margins) if self.sum_margins else None


def check_general_position(table: FlagTable, trials: int, seed: int = 0,
                           threshold: float = 1e-6) -> GeneralPositionReport:
    """
    Smallest singular values of [xi3(x); xi3(y); xi3(z)] and of
    [xi1(x) | xi1(y) | xi2(z)] over distinct triples.

    All triples are used when there are at most `trials` of them, otherwise
    `trials` random ones.
    """
    report = GeneralPositionReport()
    if trials <= 0:
        return report
    n = len(table)
    if n < 4:
        raise LeafMapError("general position check needs at least 4 tabulated flags")
    if comb(n, 3, exact=True) <= trials:
        triples = list(combinations(range(n), 3))
    else:
        rng = np.random.default_rng(seed)
        triples = [tuple(rng.choice(n, size=3, replace=False)) for _ in range(trials)]

    for i, j, k in triples:
        fx, fy, fz = (table.entries[idx][1] for idx in (i, j, k))
        planes = np.vstack([fx.p3.coeffs, fy.p3.coeffs, fz.p3.coeffs])
        spans = np.column_stack([fx.p1.coords, fy.p1.coords, fz.p2.basis])
        plane_margin = float(np.linalg.svd(planes, compute_uv=False)[-1])
        sum_margin = float(np.linalg.svd(spans, compute_uv=False)[-1])
        report.plane_margins.append(plane_margin)
        report.sum_margins.append(sum_margin)
        if min(plane_margin, sum_margin) < threshold:
            report.failures.append(tuple(table.entries[idx][0].angle for idx in (i, j, k)))
    report.trials = len(triples)
    return report


def osculation_profile(rep4: SurfaceRep, table: FlagTable, w: WordLike, steps: int = 6,
                       tol: Tolerances = DEFAULT_TOLERANCES) -> List[float]:
    """
    Distance from rho(w)^n (xi1(x1) + xi1(x2)) to xi2(w+) for n = 1..steps,
    with x1, x2 the two tabulated points farthest from the fixed points of w.
    """
    w = as_word(w)
    limit = flag_of_word(rep4, w, tol).p2
    plus = boundary_point_of_word(table.base, w, tol).angle
    minus = boundary_point_of_word(table.base, w.inverse(), tol).angle
    ranked = sorted(table, key=lambda entry: -min(angle_gap(entry[0].angle, plus),
                                                  angle_gap(entry[0].angle, minus)))
    if len(ranked) < 2:
        raise LeafMapError("osculation profile needs two tabulated points")
    u, v = ranked[0][1].p1.coords, ranked[1][1].p1.coords
    M = evaluate(rep4, w)
    profile = []
    for _ in range(steps):
        u, v = M @ u, M @ v
        u, v = u / np.linalg.norm(u), v / np.linalg.norm(v)
        profile.append(join_points(HomPoint(u), HomPoint(v), tol).distance(limit))
    return profile


def flag_distance_to_veronese(table: FlagTable) -> float:
    """Max distance between tabulated flags and the Veronese flags at their angles."""
    return max((flag.distance(veronese_flag(b)) for b, flag in table), default=0.0)
