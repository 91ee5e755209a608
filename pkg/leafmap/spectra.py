"""
Jordan projections, eigenvalue constraint polynomials, the Fuchsian witness
and limit-cone sampling
"""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from leafmap.config import DEFAULT_TOLERANCES, Tolerances
from leafmap.errors import DegenerateGap, EmptyInput, NotLoxodromic, NotSorted
from leafmap.frenet import _run_tasks
from leafmap.group import SurfaceRep, Word, WordLike, as_word, evaluate, evaluate_inverse, iter_words
from leafmap.projlin import eigen_real


@dataclass(frozen=True)
class SpectrumRecord:
    word: Word
    lambda_vec: np.ndarray
    eq1_residual: float
    eq1_normalized: float
    ellipse_ratios: Tuple[float, float]
    witness: float
    inverse_residual: float


@dataclass
class ScanResult:
    records: List[SpectrumRecord] = field(default_factory=list)
    skipped: int = 0

    def max_normalized_residual(self) -> float:
        return max((abs(r.eq1_normalized) for r in self.records), default=0.0)


@dataclass(frozen=True)
class ConeSampleSet:
    directions: np.ndarray  # k x 4 unit rows
    source_words: Tuple[Word, ...]

    def __len__(self) -> int:
        return len(self.source_words)


@dataclass(frozen=True)
class ConeRank:
    rank: int
    singular_values: np.ndarray


def _check_sorted(l: Sequence[float]) -> np.ndarray:
    l = np.asarray(l, dtype=float)
    if np.any(np.diff(l) > 0):
        raise NotSorted(f"log-eigenvalues {l.tolist()} are not decreasing")
    return l


def jordan_projection(M, inverse=None, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Sorted log-moduli of the eigenvalues."""
    return eigen_real(M, inverse=inverse, tol=tol).log_moduli()


def eq1_residual(l: Sequence[float]) -> float:
    """(l1 - l3)(l3 - l4) - (l2 - l4)(l2 - l3); homogeneous of degree 2."""
    l1, l2, l3, l4 = _check_sorted(l)
    return (l1 - l3) * (l3 - l4) - (l2 - l4) * (l2 - l3)


def eq1_residual_inverse(l: Sequence[float]) -> float:
    """The same constraint written for the inverse element, whose spectrum is -l reversed."""
    l = _check_sorted(l)
    return eq1_residual(-l[::-1])


def ellipse_ratios(l: Sequence[float], tol: Tolerances = DEFAULT_TOLERANCES) -> Tuple[float, float]:
    l1, l2, l3, l4 = _check_sorted(l)
    if l1 - l2 < tol.gap or l3 - l4 < tol.gap:
        raise DegenerateGap("eigenvalue gap too small for the ellipse ratios")
    return (l1 - l3) / (l1 - l2), (l2 - l4) / (l3 - l4)


def diagonal_gaps(l: Sequence[float]) -> Tuple[float, float, float]:
    """Consecutive gaps (l1 - l2, l2 - l3, l3 - l4); the constraint reads beta^2 = alpha gamma."""
    l1, l2, l3, l4 = _check_sorted(l)
    return l1 - l2, l2 - l3, l3 - l4


def diagonal_form_check(l: Sequence[float], tol: float = 1e-8) -> Optional[float]:
    """
    lambda with l = (3, 1, -1, -3) log(lambda) when the spectrum is symplectic
    and satisfies the constraint, otherwise None.
    """
    l = _check_sorted(l)
    if abs(l[0] + l[3]) > tol or abs(l[1] + l[2]) > tol:
        return None
    if abs(eq1_residual(l)) > tol:
        return None
    if np.max(np.abs(l - np.array([3.0, 1.0, -1.0, -3.0]) * l[1])) > tol:
        return None
    return math.exp(l[1])


def fuchsian_witness(eigs: Sequence[float], normalized: bool = False) -> float:
    """
    Product of (a_i - a_j^3) over all ordered pairs, diagonal included.

    With `normalized`, each factor is divided by max(|a_i|, |a_j|^3) so the
    value is comparable across words of different length.
    """
    a = np.asarray(eigs, dtype=float)
    factors = a[:, None] - a[None, :] ** 3
    if normalized:
        factors = factors / np.maximum(np.abs(a)[:, None], np.abs(a)[None, :] ** 3)
    return float(np.prod(factors))


def spectrum_record(rep4: SurfaceRep, w: WordLike,
                    tol: Tolerances = DEFAULT_TOLERANCES) -> SpectrumRecord:
    w = as_word(w)
    split = eigen_real(evaluate(rep4, w), inverse=evaluate_inverse(rep4, w), tol=tol)
    l = split.log_moduli()
    unit = l / np.linalg.norm(l)
    return SpectrumRecord(
        word=w,
        lambda_vec=l,
        eq1_residual=eq1_residual(l),
        eq1_normalized=eq1_residual(unit),
        ellipse_ratios=ellipse_ratios(l, tol),
        witness=fuchsian_witness(split.eigenvalues, normalized=True),
        inverse_residual=eq1_residual_inverse(l),
    )


def _spectrum_task(task) -> Optional[SpectrumRecord]:
    rep4, letters, tol = task
    try:
        return spectrum_record(rep4, Word(letters), tol)
    except (NotLoxodromic, DegenerateGap):
        return None


def spectra_scan(rep4: SurfaceRep, max_len: int, tol: Tolerances = DEFAULT_TOLERANCES,
                 workers: int = 1) -> ScanResult:
    """One record per loxodromic word of length <= max_len, in enumeration order."""
    tasks = [(rep4, w.letters, tol) for w in iter_words(max_len)]
    results = _run_tasks(_spectrum_task, tasks, workers)
    records = [r for r in results if r is not None]
    return ScanResult(records=records, skipped=len(results) - len(records))


def limit_cone_sample(rep4: SurfaceRep, max_len: int, tol: Tolerances = DEFAULT_TOLERANCES,
                      workers: int = 1) -> ConeSampleSet:
    return cone_sample_from_scan(spectra_scan(rep4, max_len, tol, workers))


def cone_sample_from_scan(scan: ScanResult) -> ConeSampleSet:
    if not scan.records:
        return ConeSampleSet(directions=np.zeros((0, 4)), source_words=())
    directions = np.vstack([r.lambda_vec / np.linalg.norm(r.lambda_vec) for r in scan.records])
    return ConeSampleSet(directions=directions, source_words=tuple(r.word for r in scan.records))


def cone_dimension(cs: ConeSampleSet, threshold: float = DEFAULT_TOLERANCES.rank) -> ConeRank:
    """Numerical rank of the direction matrix at a relative singular value threshold."""
    if len(cs) == 0:
        raise EmptyInput("cone sample is empty")
    s = np.linalg.svd(cs.directions, compute_uv=False)
    return ConeRank(rank=int(np.sum(s > threshold * s[0])), singular_values=s)


def cone_projection(cs: ConeSampleSet) -> np.ndarray:
    """
    Planar chart of the Weyl chamber: the gaps (l1 - l2, l2 - l3, l3 - l4),
    normalized to sum 1, placed in an equilateral triangle.
    """
    if len(cs) == 0:
        return np.zeros((0, 2))
    gaps = -np.diff(cs.directions, axis=1)
    bary = gaps / gaps.sum(axis=1)[:, None]
    corners = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3) / 2]])
    return bary @ corners
