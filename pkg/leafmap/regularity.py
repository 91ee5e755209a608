"""
Boundary regularity exponents of leaves at the fixed points of group elements
"""
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np

from leafmap.config import DEFAULT_TOLERANCES, Tolerances
from leafmap.errors import (
    DegenerateGap, InsufficientSamples, NotLoxodromic, OrientationFail, UntabulatedPoint
)
from leafmap.foliation import extract_leaf
from leafmap.frenet import FlagTable, boundary_point_of_word
from leafmap.group import SurfaceRep, WordLike, as_word, evaluate, evaluate_inverse, iter_words
from leafmap.projlin import HomPoint, eigen_real
from leafmap.spectra import jordan_projection

# chart samples closer than this to the axes are at the numerical floor
_X_FLOOR = 1e-9
_Y_FLOOR = 1e-11
# relative size of the first eigen-coordinate below which a sample is at the repelling line
_CHART_FLOOR = 1e-6
_ASYMMETRY_LIMIT = 0.1


@dataclass(frozen=True)
class ModelFit:
    alpha_hat: float
    r_squared: float
    fit_window: Tuple[int, float]  # (samples used, inner radius)
    asymmetry: float = 0.0
    branch_slopes: Tuple[float, ...] = ()
    alpha_exact: Optional[float] = None
    point: Optional[HomPoint] = None
    point_type: str = ""

    @property
    def asymmetric(self) -> bool:
        return self.asymmetry > _ASYMMETRY_LIMIT


@dataclass(frozen=True)
class AdaptedChart:
    coords: np.ndarray  # k x 2
    kept: np.ndarray  # indices of the input samples that survive charting
    eigenvalues: np.ndarray
    fixed_point: np.ndarray  # attracting eigenvector, homogeneous
    flipped: bool


@dataclass(frozen=True)
class ModellingReport:
    word: str
    alpha_plus: float
    alpha_minus: float
    fit_plus: Optional[ModelFit] = None
    fit_minus: Optional[ModelFit] = None

    @property
    def mismatch(self) -> float:
        return self.alpha_plus - self.alpha_minus


def alpha_exact(l1: float, l2: float, l3: float, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """(l1 - l3) / (l1 - l2) for the attracting fixed point of a loxodromic map of RP^2."""
    if l1 - l2 < tol.gap or l2 - l3 < tol.gap:
        raise DegenerateGap(f"log-eigenvalues ({l1}, {l2}, {l3}) are not separated")
    return (l1 - l3) / (l1 - l2)


def adapted_chart(A, samples, inverse=None,
                  tol: Tolerances = DEFAULT_TOLERANCES) -> AdaptedChart:
    """
    Affine coordinates (X, Y) = (c2 / c1, c3 / c1) in the eigenbasis of A.

    The attracting fixed point sits at the origin, the attracting line is
    Y = 0, the repelling line is at infinity. Y is made nonnegative.

    Samples within _CHART_FLOOR of the repelling line are dropped. The side
    of Y = 0 is read off the half of the samples nearest the origin; samples
    farther out on the other side are roundoff and are dropped as well.
    """
    split = eigen_real(A, inverse=inverse, tol=tol)
    V = split.eigenvectors
    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    pts = pts / np.linalg.norm(pts, axis=1)[:, None]
    c = np.linalg.solve(V, pts.T).T
    finite = np.abs(c[:, 0]) > _CHART_FLOOR * np.linalg.norm(c, axis=1)
    kept = np.flatnonzero(finite)
    coords = c[kept, 1:] / c[kept, :1]

    flipped = False
    if len(coords):
        near = np.abs(coords[:, 0]) <= np.median(np.abs(coords[:, 0]))
        above = np.any(coords[near, 1] > tol.incidence)
        below = np.any(coords[near, 1] < -tol.incidence)
        if above and below:
            raise OrientationFail("samples lie on both sides of the attracting line")
        if below:
            coords = coords * np.array([1.0, -1.0])
            flipped = True
        same_side = coords[:, 1] >= -tol.incidence
        coords, kept = coords[same_side], kept[same_side]
    return AdaptedChart(coords=coords, kept=kept, eigenvalues=split.eigenvalues,
                        fixed_point=V[:, 0], flipped=flipped)


def _branch_fit(x: np.ndarray, y: np.ndarray) -> Tuple[float, float, float]:
    """Slope of log y against log x, with residual and total sums of squares."""
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    residual = ly - (slope * lx + intercept)
    return float(slope), float(residual @ residual), float(((ly - ly.mean()) ** 2).sum())


def alpha_fit(chart_samples, window: int = 10) -> ModelFit:
    """
    Regress log d(y, tangent) on log d(y, x) near the origin of an adapted chart.

    Samples with |X| in [r, 10 r] are used, r being the 5th percentile of |X|.
    Each side of the origin is fitted on its own and the slopes are averaged.
    """
    pts = np.atleast_2d(np.asarray(chart_samples, dtype=float))
    X, Y = np.abs(pts[:, 0]), np.abs(pts[:, 1])
    usable = (X > _X_FLOOR) & (Y > _Y_FLOOR)
    if np.count_nonzero(usable) < window:
        raise InsufficientSamples(f"{np.count_nonzero(usable)} usable samples, need {window}")
    r0 = float(np.percentile(X[usable], 5))
    in_window = usable & (X >= r0) & (X <= 10.0 * r0)
    if np.count_nonzero(in_window) < window:
        raise InsufficientSamples(
            f"{np.count_nonzero(in_window)} samples in [{r0:.3e}, {10 * r0:.3e}], need {window}")

    slopes, ss_res, ss_tot = [], 0.0, 0.0
    for side in (pts[:, 0] > 0, pts[:, 0] < 0):
        branch = in_window & side
        if np.count_nonzero(branch) < 3 or np.ptp(np.log(X[branch])) == 0:
            continue
        slope, res, tot = _branch_fit(X[branch], Y[branch])
        slopes.append(slope)
        ss_res += res
        ss_tot += tot
    if not slopes:
        raise InsufficientSamples("no side of the origin has enough distinct samples")

    alpha_hat = float(np.mean(slopes))
    asymmetry = abs(slopes[0] - slopes[1]) / abs(alpha_hat) if len(slopes) == 2 else 0.0
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return ModelFit(alpha_hat=alpha_hat, r_squared=float(r_squared),
                    fit_window=(int(np.count_nonzero(in_window)), r0),
                    asymmetry=float(asymmetry), branch_slopes=tuple(slopes))


@dataclass(frozen=True)
class LeafSamples:
    samples: np.ndarray  # rows, leaf-plane coordinates
    restricted: np.ndarray  # rho(w)^-1 on the leaf plane
    restricted_inverse: np.ndarray
    plane_basis: np.ndarray  # 4x3

    def alpha_exact(self, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
        m = jordan_projection(self.restricted, inverse=self.restricted_inverse, tol=tol)
        return alpha_exact(m[0], m[1], m[2], tol)


def _tabulated(table: FlagTable, w, tol: Tolerances):
    b = boundary_point_of_word(table.base, w, tol)
    j = table.lookup(b.angle)
    if j is None:
        raise UntabulatedPoint(f"fixed point of {w} is not in the flag table; raise max_word_len")
    return table.entries[j][0]


def leaf_model_samples(rep4: SurfaceRep, table: FlagTable, w: WordLike, side: str = "plus",
                       steps: int = 8, tol: Tolerances = DEFAULT_TOLERANCES) -> LeafSamples:
    """
    Samples of the leaf at w+ ("plus") or w- ("minus") accumulating at the
    attracting fixed point of rho(w)^-1 restricted to the leaf plane.

    The leaf is invariant under rho(w), so pushing its boundary samples by
    the restricted inverse keeps them on the boundary.
    """
    w = as_word(w)
    if len(w) == 0:
        raise NotLoxodromic("the identity has no fixed points on the boundary")
    if side not in ("plus", "minus"):
        raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")
    x = _tabulated(table, w if side == "plus" else w.inverse(), tol)
    leaf = extract_leaf(table, x, tol=tol)
    E = leaf.plane.basis()
    A3 = E.T @ evaluate_inverse(rep4, w) @ E

    current = leaf.points() @ E
    layers = [current]
    for _ in range(steps):
        current = current @ A3.T
        current = current / np.linalg.norm(current, axis=1)[:, None]
        layers.append(current)
    return LeafSamples(samples=np.vstack(layers), restricted=A3,
                       restricted_inverse=E.T @ evaluate(rep4, w) @ E, plane_basis=E)


def model_at_fixed_point(rep4: SurfaceRep, table: FlagTable, w: WordLike, side: str = "plus",
                         window: int = 10, steps: int = 8,
                         tol: Tolerances = DEFAULT_TOLERANCES) -> ModelFit:
    leaf = leaf_model_samples(rep4, table, w, side, steps, tol)
    chart = adapted_chart(leaf.restricted, leaf.samples, inverse=leaf.restricted_inverse, tol=tol)
    fit = alpha_fit(chart.coords, window)
    return replace(fit, alpha_exact=leaf.alpha_exact(tol),
                   point=HomPoint(leaf.plane_basis @ chart.fixed_point), point_type=side)


def spectrum_alphas(l, tol: Tolerances = DEFAULT_TOLERANCES) -> Tuple[float, float]:
    """Exact exponents on the two sides of the constraint from a sorted Jordan projection."""
    l = np.asarray(l, dtype=float)
    return alpha_exact(-l[2], -l[1], -l[0], tol), alpha_exact(-l[3], -l[2], -l[1], tol)


def exact_alphas(rep4: SurfaceRep, w: WordLike,
                 tol: Tolerances = DEFAULT_TOLERANCES) -> Tuple[float, float]:
    """
    Exponents at xi2(w-) meet xi3(w+) in the leaf of w+ and at xi1(w-) in the
    leaf of w-, from the spectrum of rho(w) restricted to the invariant 3-spaces.
    """
    w = as_word(w)
    if len(w) == 0:
        raise NotLoxodromic("the identity has no fixed points on the boundary")
    l = jordan_projection(evaluate(rep4, w), inverse=evaluate_inverse(rep4, w), tol=tol)
    return spectrum_alphas(l, tol)


def modelling_constraint_check(rep4: SurfaceRep, table: Optional[FlagTable], w: WordLike,
                               window: int = 10, steps: int = 8,
                               tol: Tolerances = DEFAULT_TOLERANCES) -> ModellingReport:
    """
    Exact exponents on both sides of the constraint, plus fitted ones when a
    flag table is given. Equal exact exponents are equivalent to a vanishing
    eq1 residual of the spectrum.
    """
    w = as_word(w)
    plus, minus = exact_alphas(rep4, w, tol)
    fit_plus = fit_minus = None
    if table is not None:
        fit_plus = model_at_fixed_point(rep4, table, w, "plus", window, steps, tol)
        fit_minus = model_at_fixed_point(rep4, table, w, "minus", window, steps, tol)
    return ModellingReport(word=str(w), alpha_plus=plus, alpha_minus=minus,
                           fit_plus=fit_plus, fit_minus=fit_minus)


def mismatch_scan(rep4: SurfaceRep, max_len: int,
                  tol: Tolerances = DEFAULT_TOLERANCES) -> Tuple[List[ModellingReport], int]:
    """Exact-exponent reports for every loxodromic word of length <= max_len, and the skip count."""
    reports, skipped = [], 0
    for w in iter_words(max_len):
        try:
            reports.append(modelling_constraint_check(rep4, None, w, tol=tol))
        except (NotLoxodromic, DegenerateGap):
            skipped += 1
    return reports, skipped
