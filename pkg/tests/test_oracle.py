import math

import numpy as np
import pytest

from coupledosc.algebra import ModelParams
from coupledosc.errors import NoConvergence, UnstableError
from coupledosc.oracle import (
    classical_normal_modes,
    converged_levels,
    diagonalize_truncated,
    match_levels,
)
from coupledosc.spectrum import SpectrumLine, enumerate_levels


@pytest.mark.parametrize("w1, w2", [(1.0, 1.0), (1.3, 0.7), (0.7, 1.3)])
def test_uncoupled_modes(w1, w2):
    assert classical_normal_modes(ModelParams(w1, w2, 0)) == pytest.approx((max(w1, w2), min(w1, w2)))


def test_coupled_modes():
    assert classical_normal_modes(ModelParams(1, 1, 0.3)) == pytest.approx((math.sqrt(1.6), math.sqrt(0.4)), abs=1e-14)


def test_modes_are_frequency_matrix_eigenvalues():
    p = ModelParams(1.4, 0.6, 0.25)
    off = 2 * p.lam * math.sqrt(p.omega1 * p.omega2)
    vals = np.linalg.eigvalsh([[p.omega1 ** 2, off], [off, p.omega2 ** 2]])
    wp, wm = classical_normal_modes(p)
    np.testing.assert_allclose([wm ** 2, wp ** 2], vals, rtol=1e-13)


@pytest.mark.parametrize("lam", [0.5, 0.8])
def test_unstable(lam):
    with pytest.raises(UnstableError):
        classical_normal_modes(ModelParams(1, 1, lam))


def test_small_uncoupled_eigenvalues():
    np.testing.assert_allclose(diagonalize_truncated(ModelParams(1, 1, 0), 5, 3), [1, 2, 2], atol=1e-14)


def test_ground_state_at_cutoff_40():
    assert diagonalize_truncated(ModelParams(1, 1, 0.3), 40, 1)[0] == pytest.approx(0.9486833, abs=1e-7)


def test_phase_is_a_gauge():
    a = diagonalize_truncated(ModelParams(1.1, 0.9, 0.3, 0.0), 20, 12)
    b = diagonalize_truncated(ModelParams(1.1, 0.9, 0.3, 1.1), 20, 12)
    np.testing.assert_allclose(a, b, atol=1e-10)


def test_count_bounded_by_dimension():
    with pytest.raises(ValueError):
        diagonalize_truncated(ModelParams(1, 1, 0), 1, 5)


def test_variational_monotonicity():
    p = ModelParams(1, 1, 0.45)
    grounds = [diagonalize_truncated(p, c, 1)[0] for c in (10, 20, 30)]
    assert grounds[0] >= grounds[1] >= grounds[2]


def test_uncoupled_converges_immediately():
    res = converged_levels(ModelParams(1, 1, 0), 6, 1e-10)
    assert res.cutoff == 30
    np.testing.assert_array_equal(res.estimates, 0)


def test_converges_by_cutoff_40():
    res = converged_levels(ModelParams(1, 1, 0.3), 15, 1e-8)
    assert res.cutoff <= 40
    assert np.all(np.diff(res.eigenvalues) >= 0)
    assert np.all(res.estimates >= 0)


def test_strong_coupling_needs_larger_cutoff():
    p = ModelParams(1, 1, 0.45)
    res = converged_levels(p, 5, 1e-8, stop=50)
    assert res.cutoff > 30
    np.testing.assert_allclose(res.eigenvalues, [ln.E for ln in enumerate_levels(p, 5)], atol=1e-7)


def test_escalation_limit_reports_honestly():
    with pytest.raises(NoConvergence):
        converged_levels(ModelParams(1, 1, 0.499), 5, 1e-8, stop=40)


def test_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        converged_levels(ModelParams(1, 1, 0), 3, 0)


def test_match_identical():
    lines = [SpectrumLine(0, 0, 1.0), SpectrumLine(1, 1, 2.0)]
    report = match_levels(lines, [1.0, 2.0], 1e-12)
    assert report.max_difference == 0.0
    assert report.ok


def test_match_degenerate_multiset():
    lines = enumerate_levels(ModelParams(1, 1, 0), 6)
    report = match_levels(lines, [3, 2, 1, 3, 2, 3], 1e-12)
    assert [ln.E for ln, *_ in report.pairs] == [1, 2, 2, 3, 3, 3]
    assert report.max_difference == 0.0


def test_match_flags_outliers():
    lines = [SpectrumLine(0, 0, 1.0), SpectrumLine(1, 1, 2.0)]
    report = match_levels(lines, [1.0, 2.5], 1e-6)
    assert report.unmatched == 1
    assert not report.ok
    with pytest.raises(ValueError):
        match_levels(lines, [1.0], 1e-6)


def test_anisotropic_match():
    p = ModelParams(1.2, 0.8, 0.2)
    res = converged_levels(p, 15, 1e-8)
    report = match_levels(enumerate_levels(p, 15), res.eigenvalues, 1e-6)
    assert report.max_difference <= 1e-6
