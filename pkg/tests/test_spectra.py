"""Tests for Jordan projections, the eigenvalue constraint, the witness and the limit cone"""
import math

import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from leafmap.errors import DegenerateGap, EmptyInput, NotSorted
from leafmap.group import COMMUTATOR_CURVE, Word, bend, evaluate, evaluate_inverse
from leafmap.projlin import sym_cube
from leafmap.spectra import (
    ConeSampleSet, cone_dimension, cone_projection, cone_sample_from_scan, diagonal_form_check,
    diagonal_gaps, ellipse_ratios, eq1_residual, eq1_residual_inverse, fuchsian_witness,
    jordan_projection, limit_cone_sample, spectra_scan, spectrum_record
)

from tests.conftest import SEED

FUCHSIAN_DIRECTION = np.array([3.0, 1.0, -1.0, -3.0]) / math.sqrt(20.0)

gaps = st.floats(min_value=0.01, max_value=10.0)


def test_jordan_projection_diagonal():
    l = jordan_projection(np.diag([0.25, 4.0, 0.5, 2.0]))
    assert l == pytest.approx(np.log([4.0, 2.0, 0.5, 0.25]))


def test_jordan_projection_of_sym_cube():
    l = jordan_projection(sym_cube(np.diag([2.0, 0.5])))
    assert l == pytest.approx(np.array([3.0, 1.0, -1.0, -3.0]) * math.log(2.0))


def test_jordan_projection_is_conjugation_invariant():
    rng = np.random.default_rng(SEED)
    D = np.diag([3.0, 2.0, 0.5, 1 / 3])
    expected = np.log(np.diag(D))
    for _ in range(20):
        M = np.eye(4) + 0.2 * rng.normal(size=(4, 4))
        assert np.max(np.abs(jordan_projection(M @ D @ np.linalg.inv(M)) - expected)) < 1e-9


def test_jordan_projection_of_long_fuchsian_words(rep2, rep4):
    for w in ("B1b2A1b1", "a1a2b1b2", "A2B1a1b2"):
        mu = np.max(np.abs(np.linalg.eigvals(evaluate(rep2, w))))
        expected = np.array([3.0, 1.0, -1.0, -3.0]) * math.log(mu)
        l = jordan_projection(evaluate(rep4, w), inverse=evaluate_inverse(rep4, w))
        assert np.max(np.abs(l - expected)) < 1e-8
        assert abs(eq1_residual(l)) < 1e-8


def test_eq1_residual_values():
    assert eq1_residual([3.0, 1.0, -1.0, -3.0]) == 0.0
    assert eq1_residual(np.log([3.0, 2.0, 0.5, 1 / 3])) == pytest.approx(-1.7575, rel=1e-3)
    with pytest.raises(NotSorted):
        eq1_residual([1.0, 2.0, 0.0, -3.0])


def test_eq1_is_a_gap_relation():
    a, b, c = diagonal_gaps([4.0, 1.0, -1.0, -4.0])
    assert (a, b, c) == (3.0, 2.0, 3.0)
    assert eq1_residual([4.0, 1.0, -1.0, -4.0]) == pytest.approx(a * c - b * b)


@given(gaps, gaps, gaps, st.floats(min_value=-10.0, max_value=10.0))
def test_inverse_constraint_is_the_same(a, b, c, top):
    l = np.array([top, top - a, top - a - b, top - a - b - c])
    scale = (a + b + c) ** 2
    assert abs(eq1_residual_inverse(l) - eq1_residual(l)) <= 1e-10 * max(1.0, scale)


def test_ellipse_ratios():
    assert ellipse_ratios([3.0, 1.0, -1.0, -3.0]) == pytest.approx((2.0, 2.0))
    assert ellipse_ratios([3.0, 0.0, -1.0, -6.0]) == pytest.approx((4 / 3, 6 / 5))
    with pytest.raises(DegenerateGap):
        ellipse_ratios([1.0, 1.0, 0.0, -2.0])


def test_diagonal_form_check():
    assert diagonal_form_check(np.array([3.0, 1.0, -1.0, -3.0]) * math.log(2.0)) == pytest.approx(2.0)
    assert diagonal_form_check([3.0, 2.0, -2.0, -3.0]) is None
    assert diagonal_form_check([3.0, 1.0, 0.0, -4.0]) is None


def test_fuchsian_witness():
    lam = 2.0
    assert fuchsian_witness([lam ** 3, lam, 1 / lam, lam ** -3]) == 0.0
    assert fuchsian_witness([1.0, 5.0, 0.5, 0.4]) == 0.0
    generic = [3.0, 2.0, 0.5, 1 / 3]
    assert abs(fuchsian_witness(generic)) > 1e-6
    assert abs(fuchsian_witness(generic, normalized=True)) > 1e-6


def test_spectrum_record_of_generator(rep4):
    record = spectrum_record(rep4, "a1")
    assert str(record.word) == "a1"
    assert abs(record.eq1_normalized) < 1e-10
    assert abs(record.witness) < 1e-8
    assert record.ellipse_ratios == pytest.approx((2.0, 2.0), abs=1e-8)


def test_fuchsian_scan_satisfies_constraint(rep4):
    scan = spectra_scan(rep4, 3)
    assert len(scan.records) + scan.skipped == 8 + 56 + 392
    assert scan.max_normalized_residual() < 1e-8
    for r in scan.records:
        assert r.ellipse_ratios == pytest.approx((2.0, 2.0), abs=1e-7)


def test_bending_breaks_constraint_beyond_threshold(rep4, bent_rep):
    assert spectra_scan(bent_rep, 3).max_normalized_residual() > 1e-6
    # the divergence criterion searches these directions and lengths in this order
    best = 0.0
    for direction in ((1.0, 0.0, 0.0, -1.0), (0.0, 1.0, -1.0, 0.0), (1.0, -1.0, 0.0, 0.0)):
        bent = bend(rep4, COMMUTATOR_CURVE, direction, 0.1)
        for max_len in (2, 4, 6):
            best = max(best, spectra_scan(bent, max_len).max_normalized_residual())
            if best >= 1e-3:
                return
    pytest.fail(f"largest normalized residual {best:.3e} stays below 1e-3")


def test_empty_scan(rep4):
    scan = spectra_scan(rep4, 0)
    assert scan.records == []
    assert scan.max_normalized_residual() == 0.0
    assert len(cone_sample_from_scan(scan)) == 0


def test_parallel_scan_matches_serial(rep4):
    serial = spectra_scan(rep4, 2)
    parallel = spectra_scan(rep4, 2, workers=2)
    assert [str(r.word) for r in serial.records] == [str(r.word) for r in parallel.records]
    assert np.array_equal(np.vstack([r.lambda_vec for r in serial.records]),
                          np.vstack([r.lambda_vec for r in parallel.records]))


def test_fuchsian_cone_is_a_ray(rep4):
    cone = limit_cone_sample(rep4, 2)
    assert np.max(np.abs(cone.directions - FUCHSIAN_DIRECTION)) < 1e-8
    assert cone_dimension(cone).rank == 1
    projected = cone_projection(cone)
    assert np.allclose(projected, [0.5, math.sqrt(3) / 6], atol=1e-8)


def test_bent_cone_is_thick(bent_rep):
    assert cone_dimension(limit_cone_sample(bent_rep, 2)).rank >= 2


def test_cone_dimension_of_hand_made_samples():
    def sample(rows):
        rows = np.array(rows, dtype=float)
        rows = rows / np.linalg.norm(rows, axis=1)[:, None]
        return ConeSampleSet(directions=rows, source_words=tuple(Word(()) for _ in rows))

    assert cone_dimension(sample([[1, 0, 0, -1]] * 3)).rank == 1
    three = sample([[1, 0, 0, -1], [1, 1, -1, -1], [1, 1, 1, -3]])
    assert cone_dimension(three).rank == 3
    with pytest.raises(EmptyInput):
        cone_dimension(ConeSampleSet(directions=np.zeros((0, 4)), source_words=()))
