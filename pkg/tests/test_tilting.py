import dataclasses
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from coupledosc.algebra import ModelParams, build_hamiltonian
from coupledosc.errors import DomainError
from coupledosc.fock import FockBasis, OperatorMatrix
from coupledosc.oracle import classical_minus_squared, converged_levels
from coupledosc.spectrum import energy
from coupledosc.tilting import (
    default_guard,
    offdiag_residual,
    solve_tilt_parameters,
    stage_hamiltonians,
    tilt_arguments,
)


def artanh(x):
    return 0.5 * math.log((1 + x) / (1 - x))


def test_isotropic_parameters():
    t = solve_tilt_parameters(ModelParams(1, 1, 0.3))
    assert t.tau == pytest.approx(artanh(0.3), abs=1e-13)
    assert t.tau == pytest.approx(0.3095196, abs=1e-7)
    assert t.theta == pytest.approx(math.pi / 2)
    assert t.theta_a == pytest.approx(artanh(-0.09 / 1.21), abs=1e-13)
    assert t.theta_a == pytest.approx(-0.0745176, abs=5e-7)
    assert t.theta_b == pytest.approx(artanh(-0.09 / 0.61), abs=1e-13)
    assert t.theta_b == pytest.approx(-0.1486258, abs=1e-7)
    assert (t.phi_xi, t.phi_theta, t.phi_a, t.phi_b) == (0.0, 0.0, 0.0, 0.0)


def test_anisotropic_parameters():
    t = solve_tilt_parameters(ModelParams(1.2, 0.8, 0.2, 0.5))
    s, r = 3.84, 1.12
    assert t.tau == pytest.approx(0.2027326, abs=1e-7)
    assert t.theta == pytest.approx(math.atan(0.8 / (0.4 * math.sqrt(s))), abs=1e-13)
    assert t.theta_a == pytest.approx(artanh(-0.16 / (s + r)), abs=1e-13)
    assert t.theta_a == pytest.approx(-0.0322693, abs=1e-7)
    assert t.theta_b == pytest.approx(artanh(-0.16 / (s - r)), abs=1e-13)
    assert t.theta_b == pytest.approx(-0.0588914, abs=5e-7)
    assert (t.phi_xi, t.phi_theta, t.phi_a, t.phi_b) == (0.5, 0.5, 1.0, 0.0)


def test_uncoupled_parameters():
    t = solve_tilt_parameters(ModelParams(1.3, 0.9, 0.0))
    assert t.tau == t.theta_a == t.theta_b == 0.0


@pytest.mark.parametrize("params", [
    ModelParams(1, 1, 0.3), ModelParams(1.2, 0.8, 0.2), ModelParams(0.8, 1.2, 0.2, 2.0), ModelParams(2, 0.5, 0.45),
])
def test_tanh_round_trip_and_closed_forms(params):
    t = solve_tilt_parameters(params)
    args = tilt_arguments(params)
    assert math.tanh(t.tau) == pytest.approx(args["tau"], abs=1e-13)
    assert math.tanh(t.theta_a) == pytest.approx(args["theta_a"], abs=1e-13)
    assert math.tanh(t.theta_b) == pytest.approx(args["theta_b"], abs=1e-13)
    assert t.cosh_theta_a == pytest.approx(math.cosh(t.theta_a), abs=1e-13)
    assert t.sinh_theta_a == pytest.approx(math.sinh(t.theta_a), abs=1e-13)
    assert t.cosh_theta_b == pytest.approx(math.cosh(t.theta_b), abs=1e-13)
    assert t.sinh_theta_b == pytest.approx(math.sinh(t.theta_b), abs=1e-13)


@pytest.mark.parametrize("lam, argument", [(0.5, "theta_b"), (0.7, "theta_b"), (1.1, "tau")])
def test_domain_error_names_argument(lam, argument):
    with pytest.raises(DomainError) as info:
        solve_tilt_parameters(ModelParams(1, 1, lam))
    assert info.value.argument == argument


@given(st.floats(0.1, 3), st.floats(0.1, 3), st.floats(0, 2))
def test_validity_conditions_agree(w1, w2, lam):
    p = ModelParams(w1, w2, lam)
    minus = classical_minus_squared(p)
    assume(abs(minus) > 1e-9 * (w1 ** 2 + w2 ** 2))
    args = tilt_arguments(p)
    inside = all(-1 < v < 1 for v in args.values())
    assert inside == (minus > 0)


def test_offdiag_residual_examples():
    basis = FockBasis(10)
    assert offdiag_residual(OperatorMatrix(10, np.diag(np.arange(121.0))), basis, 3) == 0.0
    h = build_hamiltonian(ModelParams(1, 1, 0.3), basis)
    res = offdiag_residual(h, basis, 3)
    assert res > 0.01
    h2 = build_hamiltonian(ModelParams(1, 1, 0.3, 0.8), basis)
    assert offdiag_residual(h2.dag(), basis, 3) == pytest.approx(offdiag_residual(h2, basis, 3))
    with pytest.raises(ValueError):
        offdiag_residual(h, basis, 10)


def test_default_guard():
    assert default_guard(30) == 12
    assert default_guard(20) == 8


@pytest.mark.parametrize("params", [
    ModelParams(1, 1, 0.3), ModelParams(1.2, 0.8, 0.2, 0.5), ModelParams(0.8, 1.2, 0.2, 0.5),
])
def test_pipeline_diagonalizes(params):
    basis = FockBasis(20)
    reports = stage_hamiltonians(params, basis)
    assert [r.stage for r in reports] == [0, 1, 2, 3]
    assert reports[0].offdiag_residual > 0.01
    final = reports[-1]
    assert final.offdiag_residual <= 1e-8
    for r in reports[1:]:
        assert r.cancellation <= 1e-7
        assert r.branch == "closed-form"
    assert reports[3].cancelled_terms == ["K+a", "K-a", "K+b", "K-b"]
    mask = basis.guard_mask(default_guard(20))
    diag = np.diag(final.hamiltonian.data)[mask]
    expect = [energy(params, a + b, a - b) for a, b in zip(basis.na[mask], basis.nb[mask])]
    np.testing.assert_allclose(diag, expect, atol=1e-8)


def test_uncoupled_stages_identical():
    basis = FockBasis(12)
    reports = stage_hamiltonians(ModelParams(1, 1, 0.0), basis)
    for r in reports[1:]:
        np.testing.assert_allclose(r.hamiltonian.data, reports[0].hamiltonian.data, atol=1e-13)
        assert r.offdiag_residual == 0.0


def test_final_stage_is_phase_independent():
    basis = FockBasis(16)
    mask = basis.guard_mask(default_guard(16))
    diags = []
    for psi in (0.0, 1.3):
        final = stage_hamiltonians(ModelParams(1.1, 0.9, 0.2, psi), basis)[-1]
        diags.append(np.diag(final.hamiltonian.data)[mask])
    np.testing.assert_allclose(diags[0], diags[1], atol=1e-10)


def test_wrong_phase_is_repaired():
    params = ModelParams(1, 1, 0.3)
    tilt = solve_tilt_parameters(params)
    flipped = dataclasses.replace(tilt, phi_xi=tilt.phi_xi + math.pi)
    reports = stage_hamiltonians(params, FockBasis(16), tilt=flipped)
    assert reports[1].branch == "shifted"
    assert reports[1].cancellation <= 1e-7
    assert reports[-1].offdiag_residual <= 1e-8


def test_spectrum_preserved_by_pipeline():
    params = ModelParams(1, 1, 0.3)
    basis = FockBasis(20)
    final = stage_hamiltonians(params, basis)[-1]
    mask = basis.guard_mask(default_guard(20))
    guarded = np.sort(np.diag(final.hamiltonian.data)[mask].real)[:10]
    numeric = converged_levels(params, 10, 1e-9).eigenvalues
    np.testing.assert_allclose(guarded, numeric, atol=1e-8)
