"""
Acceptance checks for the leaf map experiments
Each check runs one experiment end to end and compares a figure of merit to its threshold
"""
import math
from functools import lru_cache
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
from scipy.spatial import ConvexHull
from scipy.spatial.distance import directed_hausdorff

from leafmap.config import RunConfig, Tolerances
from leafmap.errors import DegenerateGap
from leafmap.foliation import (
    benzecri_domains, benzecri_iterate, benzecri_matrix, hausdorff_distance,
    leaf_diagnostics, leaf_distance_matrix, normalized_leaves
)
from leafmap.frenet import FlagTable, build_flag_table
from leafmap.group import (
    COMMUTATOR_CURVE, LETTERS, SurfaceRep, Word, bend, evaluate, evaluate_inverse,
    fuchsian_octagon_rep, invert_letter, lift_principal
)
from leafmap.projlin import FrameRP2, frame_map, sym_cube
from leafmap.regularity import alpha_fit, model_at_fixed_point, spectrum_alphas
from leafmap.spectra import (
    cone_dimension, cone_sample_from_scan, fuchsian_witness, jordan_projection, spectra_scan
)

BENDING_DIRECTIONS = ((1.0, 0.0, 0.0, -1.0), (0.0, 1.0, -1.0, 0.0), (1.0, -1.0, 0.0, 0.0))


@lru_cache(maxsize=None)
def fuchsian_reps() -> Tuple[SurfaceRep, SurfaceRep]:
    """(rank 2 octagon rep, its principal lift)"""
    rep2 = fuchsian_octagon_rep()
    return rep2, lift_principal(rep2)


@lru_cache(maxsize=None)
def fuchsian_table(max_len: int, workers: int = 1) -> FlagTable:
    rep2, rep4 = fuchsian_reps()
    return build_flag_table(rep4, rep2, max_len, workers=workers)


def convex_region_hausdorff(P: Sequence[Sequence[float]], Q: Sequence[Sequence[float]]) -> float:
    """
    Hausdorff distance between the convex regions bounded by P and Q, in plain Python loops.

    A vertex inside the other region contributes 0; one outside contributes
    its distance to the nearest edge, by the perpendicular or endpoint case.
    """
    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def inside(p, poly):
        signs = [cross(poly[j], poly[(j + 1) % len(poly)], p) for j in range(len(poly))]
        return all(s >= 0 for s in signs) or all(s <= 0 for s in signs)

    def to_edge(p, a, b):
        if (p[0] - a[0]) * (b[0] - a[0]) + (p[1] - a[1]) * (b[1] - a[1]) <= 0:
            return math.dist(p, a)
        if (p[0] - b[0]) * (a[0] - b[0]) + (p[1] - b[1]) * (a[1] - b[1]) <= 0:
            return math.dist(p, b)
        return abs(cross(a, b, p)) / math.dist(a, b)

    def directed(A, B):
        worst = 0.0
        for p in A:
            if inside(p, B):
                continue
            worst = max(worst, min(to_edge(p, B[j], B[(j + 1) % len(B)]) for j in range(len(B))))
        return worst

    P = [tuple(map(float, p)) for p in P]
    Q = [tuple(map(float, q)) for q in Q]
    return max(directed(P, Q), directed(Q, P))


def densify_boundary(polygon, spacing: float) -> np.ndarray:
    """Points along the closed polyline, consecutive ones at most `spacing` apart."""
    poly = np.asarray(polygon, dtype=float)
    pieces = []
    for a, b in zip(poly, np.roll(poly, -1, axis=0)):
        k = max(1, int(math.ceil(np.linalg.norm(b - a) / spacing)))
        pieces.append(a + (np.arange(k) / k)[:, None] * (b - a))
    return np.vstack(pieces)


def sampled_hausdorff(P, Q, spacing: float = 1e-3) -> float:
    """Max-min distance between densely sampled boundaries, within spacing / 2 of the exact value."""
    A, B = densify_boundary(P, spacing), densify_boundary(Q, spacing)
    return float(max(directed_hausdorff(A, B)[0], directed_hausdorff(B, A)[0]))


def random_convex_polygon(rng: np.random.Generator, max_vertices: int = 200) -> np.ndarray:
    """Hull of random points on a random ellipse, counterclockwise."""
    m = int(rng.integers(3, max_vertices + 1))
    t = rng.uniform(0.0, 2 * math.pi, size=m)
    a, b = rng.uniform(0.5, 2.0, size=2)
    phi = rng.uniform(0.0, math.pi)
    R = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
    pts = np.column_stack([a * np.cos(t), b * np.sin(t)]) @ R.T + rng.normal(size=2)
    hull = ConvexHull(pts)
    return pts[hull.vertices]


def random_reduced_word(rng: np.random.Generator, length: int) -> Word:
    letters: List[str] = []
    while len(letters) < length:
        letter = LETTERS[int(rng.integers(len(LETTERS)))]
        if letters and letter == invert_letter(letters[-1]):
            continue
        letters.append(letter)
    return Word(tuple(letters))


def _random_sl2(rng: np.random.Generator) -> np.ndarray:
    M = rng.normal(size=(2, 2))
    det = np.linalg.det(M)
    if det < 0:
        M = M[:, ::-1]
        det = -det
    return M / math.sqrt(det)


def _random_frame(rng: np.random.Generator, margin: float = 0.05) -> FrameRP2:
    while True:
        frame = FrameRP2(tuple(rng.normal(size=3) for _ in range(4)))
        if frame.general_position_margin() > margin:
            return frame


class BaseCheck:
    """Base class for acceptance checks"""
    def __init__(self, name: str, threshold: float = None):
        self.name = name
        self.threshold = threshold

    def compute(self, cfg: RunConfig, **params) -> Dict[str, Any]:
        """Run the check; returns value, passed and details"""
        raise NotImplementedError


class FuchsianLeavesCheck(BaseCheck):
    """Normalized leaves of the lifted Fuchsian rep all coincide with one ellipse"""
    def __init__(self, name: str = "fuchsian_leaves", threshold: float = 1e-6,
                 conic_threshold: float = 1e-7):
        super().__init__(name, threshold)
        self.conic_threshold = conic_threshold

    def compute(self, cfg: RunConfig, max_len: int = 3, leaf_count: int = 8,
                samples: int = 128, **kwargs) -> Dict[str, Any]:
        table = fuchsian_table(max_len, cfg.workers)
        _, leaves = normalized_leaves(table, cfg.base_angles, leaf_count, samples,
                                      cfg.tolerances)
        conic = max(leaf_diagnostics(nl)["conic_residual"] for nl in leaves)
        distance = float(leaf_distance_matrix(leaves).max())
        return {
            "value": distance,
            "passed": distance < self.threshold and conic < self.conic_threshold,
            "details": {"max_conic_residual": conic, "leaves": len(leaves),
                        "table_size": len(table)},
        }


class EllipseRatiosCheck(BaseCheck):
    """Both ellipse ratios equal 2 and the constraint vanishes for every Fuchsian word"""
    def __init__(self, name: str = "ellipse_ratios", threshold: float = 1e-8):
        super().__init__(name, threshold)

    def compute(self, cfg: RunConfig, max_len: int = 4, **kwargs) -> Dict[str, Any]:
        _, rep4 = fuchsian_reps()
        scan = spectra_scan(rep4, max_len, cfg.tolerances, cfg.workers)
        ratio_error = max((max(abs(r1 - 2.0), abs(r2 - 2.0))
                           for r1, r2 in (r.ellipse_ratios for r in scan.records)), default=math.inf)
        residual = max((abs(r.eq1_residual) for r in scan.records), default=math.inf)
        value = max(ratio_error, residual)
        return {
            "value": value,
            "passed": value < self.threshold,
            "details": {"words": len(scan.records), "skipped": scan.skipped,
                        "max_ratio_error": ratio_error, "max_residual": residual},
        }


class FuchsianWitnessCheck(BaseCheck):
    """The witness polynomial vanishes on Fuchsian spectra only"""
    def __init__(self, name: str = "fuchsian_witness", threshold: float = 1e-12,
                 nonvanishing_floor: float = 1e-6):
        super().__init__(name, threshold)
        self.nonvanishing_floor = nonvanishing_floor

    def compute(self, cfg: RunConfig, generic: Sequence[float] = (3.0, 2.0, 0.5, 1 / 3),
                lam: float = 2.0, **kwargs) -> Dict[str, Any]:
        fuchsian = (lam ** 3, lam, 1 / lam, lam ** -3)
        nonvanishing = abs(fuchsian_witness(generic))
        vanishing = abs(fuchsian_witness(fuchsian))
        return {
            "value": vanishing,
            "passed": vanishing < self.threshold and nonvanishing > self.nonvanishing_floor,
            "details": {"generic": list(generic), "generic_value": nonvanishing,
                        "fuchsian": list(fuchsian)},
        }


class AlphaModelCheck(BaseCheck):
    """Exponent fit on synthetic power curves and on a Fuchsian leaf"""
    def __init__(self, name: str = "alpha_model", threshold: float = 1e-3,
                 leaf_tolerance: float = 0.05):
        super().__init__(name, threshold)
        self.leaf_tolerance = leaf_tolerance

    def compute(self, cfg: RunConfig, alphas: Sequence[float] = (1.25, 1.5, 2.0, 2.5, 3.0),
                word: str = "a1", max_len: int = 3, **kwargs) -> Dict[str, Any]:
        x = np.logspace(-3, 0, 200)
        synthetic = {}
        for alpha in alphas:
            X = np.concatenate([x, -x])
            fit = alpha_fit(np.column_stack([X, np.abs(X) ** alpha]), cfg.model_window)
            synthetic[str(alpha)] = abs(fit.alpha_hat - alpha)
        worst = max(synthetic.values())

        _, rep4 = fuchsian_reps()
        leaf_fit = model_at_fixed_point(rep4, fuchsian_table(max_len, cfg.workers), word, "plus",
                                        cfg.model_window, cfg.densify_steps, cfg.tolerances)
        relative = abs(leaf_fit.alpha_hat - leaf_fit.alpha_exact) / leaf_fit.alpha_exact
        return {
            "value": worst,
            "passed": worst < self.threshold and relative < self.leaf_tolerance,
            "details": {"synthetic_errors": synthetic, "leaf_alpha_hat": leaf_fit.alpha_hat,
                        "leaf_alpha_exact": leaf_fit.alpha_exact, "leaf_relative_error": relative,
                        "leaf_r2": leaf_fit.r_squared},
        }


def _max_mismatch(records, tol: Tolerances) -> float:
    worst = 0.0
    for r in records:
        try:
            plus, minus = spectrum_alphas(r.lambda_vec, tol)
        except DegenerateGap:
            continue
        worst = max(worst, abs(plus - minus))
    return worst


class NonFuchsianDivergenceCheck(BaseCheck):
    """A bent rep violates the constraint, has a thick limit cone and mismatched exponents"""
    def __init__(self, name: str = "non_fuchsian_divergence", threshold: float = 1e-3):
        super().__init__(name, threshold)

    def compute(self, cfg: RunConfig, eps: float = 0.1, lengths: Sequence[int] = (2, 4, 6),
                min_rank: int = 2, **kwargs) -> Dict[str, Any]:
        _, rep4 = fuchsian_reps()
        attempts = []
        for direction in BENDING_DIRECTIONS:
            bent = bend(rep4, COMMUTATOR_CURVE, direction, eps, cfg.tolerances)
            for max_len in lengths:
                scan = spectra_scan(bent, max_len, cfg.tolerances, cfg.workers)
                residual = scan.max_normalized_residual()
                rank = cone_dimension(cone_sample_from_scan(scan)).rank if scan.records else 0
                mismatch = _max_mismatch(scan.records, cfg.tolerances)
                attempt = {"direction": list(direction), "max_len": max_len,
                           "max_normalized_residual": residual, "cone_rank": rank,
                           "max_mismatch": mismatch}
                attempts.append(attempt)
                if residual > self.threshold and rank >= min_rank and mismatch > self.threshold:
                    return {"value": residual, "passed": True, "details": {"attempts": attempts}}
        best = max(a["max_normalized_residual"] for a in attempts)
        return {"value": best, "passed": False, "details": {"attempts": attempts}}


class BenzecriCheck(BaseCheck):
    """Iterates of the half domain converge monotonically to the ellipse"""
    def __init__(self, name: str = "benzecri", threshold: float = 1e-3, slack: float = 1e-12):
        super().__init__(name, threshold)
        self.slack = slack

    def compute(self, cfg: RunConfig, steps: int = 20, monotone_from: int = 2,
                **kwargs) -> Dict[str, Any]:
        bc = cfg.benzecri
        domain, target = benzecri_domains(bc)
        distances = benzecri_iterate(domain, benzecri_matrix(bc.lam), steps, target,
                                     tol=cfg.tolerances)
        tail = distances[monotone_from:]
        monotone = all(b <= a + self.slack for a, b in zip(tail, tail[1:]))
        return {
            "value": distances[-1],
            "passed": monotone and distances[-1] < self.threshold,
            "details": {"distances": distances, "monotone": monotone},
        }


class StructuralInvariantsCheck(BaseCheck):
    """Sampled homomorphism, conjugation, power and frame composition identities"""
    def __init__(self, name: str = "structural_invariants", threshold: float = 1e-7):
        super().__init__(name, threshold)

    def compute(self, cfg: RunConfig, trials: int = 20, max_word_len: int = 2,
                **kwargs) -> Dict[str, Any]:
        rng = np.random.default_rng(cfg.seed)
        _, rep4 = fuchsian_reps()
        errors = {"sym_cube": 0.0, "conjugation": 0.0, "powers": 0.0, "frame_map": 0.0}
        for _ in range(trials):
            A, B = _random_sl2(rng), _random_sl2(rng)
            lhs = sym_cube(A @ B)
            errors["sym_cube"] = max(errors["sym_cube"], float(
                np.linalg.norm(lhs - sym_cube(A) @ sym_cube(B)) / np.linalg.norm(lhs)))

            w = random_reduced_word(rng, int(rng.integers(1, max_word_len + 1)))
            M, M_inv = evaluate(rep4, w), evaluate_inverse(rep4, w)
            l = jordan_projection(M, inverse=M_inv)
            scale = max(1.0, float(np.max(np.abs(l))))
            g = np.eye(4) + 0.1 * rng.normal(size=(4, 4))
            g_inv = np.linalg.inv(g)
            conj = jordan_projection(g @ M @ g_inv, inverse=g @ M_inv @ g_inv)
            errors["conjugation"] = max(errors["conjugation"], float(np.max(np.abs(conj - l))) / scale)
            squared = jordan_projection(evaluate(rep4, w * w), inverse=evaluate_inverse(rep4, w * w))
            errors["powers"] = max(errors["powers"], float(np.max(np.abs(squared - 2 * l))) / scale)

            F1, F2, F3 = _random_frame(rng), _random_frame(rng), _random_frame(rng)
            direct = frame_map(F1, F3)
            composed = frame_map(F2, F3) @ frame_map(F1, F2)
            errors["frame_map"] = max(errors["frame_map"], float(
                np.linalg.norm(direct - composed) / np.linalg.norm(direct)))
        value = max(errors.values())
        return {"value": value, "passed": value < self.threshold,
                "details": {"trials": trials, "errors": errors}}


class HausdorffOracleCheck(BaseCheck):
    """Vectorized Hausdorff distance agrees with the region loops and with dense boundary samples"""
    def __init__(self, name: str = "hausdorff_oracle", threshold: float = 1e-9):
        super().__init__(name, threshold)

    def compute(self, cfg: RunConfig, pairs: int = 50, max_vertices: int = 200,
                spacing: float = 1e-3, **kwargs) -> Dict[str, Any]:
        rng = np.random.default_rng(cfg.seed)
        worst = worst_sampled = 0.0
        for _ in range(pairs):
            P = random_convex_polygon(rng, max_vertices)
            Q = random_convex_polygon(rng, max_vertices)
            d = hausdorff_distance(P, Q)
            worst = max(worst, abs(d - convex_region_hausdorff(P, Q)))
            worst_sampled = max(worst_sampled, abs(d - sampled_hausdorff(P, Q, spacing)))
        return {"value": worst, "passed": worst < self.threshold and worst_sampled <= spacing,
                "details": {"pairs": pairs, "spacing": spacing, "max_sampled_error": worst_sampled}}


CHECKS = {
    check.__name__: check for check in (
        FuchsianLeavesCheck, EllipseRatiosCheck, FuchsianWitnessCheck, AlphaModelCheck,
        NonFuchsianDivergenceCheck, BenzecriCheck, StructuralInvariantsCheck, HausdorffOracleCheck,
    )
}
