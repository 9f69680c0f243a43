"""Verification suites behind ``coupledosc verify``.

Each suite returns :class:`Check` records; a check passes when its measured
value is at most its bound.
"""
import math
import time
from dataclasses import asdict, dataclass

import numpy as np
import scipy.sparse as sps
from scipy.sparse.linalg import expm_multiply

from . import displacement as dsp
from .algebra import ModelParams, _hamiltonian_sparse, sparse_generators
from .errors import DomainError, UnstableError
from .fock import FockBasis, sparse_ladder
from .oracle import classical_normal_modes, converged_levels, match_levels
from .spectrum import (
    closed_form_coefficients,
    energy,
    enumerate_levels,
    isotropic_coefficients,
    normal_modes_analytic,
)
from .tilting import (
    default_guard,
    isotropic_tilt_angles,
    solve_tilt_parameters,
    stage_hamiltonians,
    tilt_arguments,
)
from .wavefunctions import eigen_residual, tilted_eigenstate

SUITES = ("algebra", "similarity", "coherent", "spectrum", "eigenstates")


@dataclass
class Check:
    suite: str
    assertion: str
    status: str
    measured: float
    bound: float

    def as_dict(self):
        return asdict(self)


def _check(suite, assertion, measured, bound):
    measured = float(measured)
    ok = math.isfinite(measured) and measured <= bound
    return Check(suite, assertion, "pass" if ok else "fail", measured, float(bound))


def _flag(suite, assertion, ok):
    return Check(suite, assertion, "pass" if ok else "fail", 0.0 if ok else 1.0, 0.0)


# ---------------------------------------------------------------------------
# algebra


def _guarded_relative(lhs, rhs, mask):
    diff = sps.csr_matrix(lhs - rhs)[mask][:, mask]
    ref = sps.csr_matrix(rhs)[mask][:, mask]
    scale = max(sps.linalg.norm(ref), 1.0)
    return sps.linalg.norm(diff) / scale


def algebra_suite(n_max=20, guard=4, bound=1e-12):
    g = sparse_generators(n_max)
    basis = FockBasis(n_max)
    mask = basis.guard_mask(guard)
    comm = lambda x, y: x @ y - y @ x  # noqa: E731
    out = []
    for suffix in ("", "a", "b"):
        k0, kp, km = g["K0" + suffix], g["K+" + suffix], g["K-" + suffix]
        name = f"su11{('(' + suffix + ')') if suffix else ''}"
        out.append(_check("algebra", f"[K0,K+]=K+ {name}", _guarded_relative(comm(k0, kp), kp, mask), bound))
        out.append(_check("algebra", f"[K0,K-]=-K- {name}", _guarded_relative(comm(k0, km), -km, mask), bound))
        out.append(_check("algebra", f"[K-,K+]=2K0 {name}", _guarded_relative(comm(km, kp), 2 * k0, mask), bound))
    j0, jp, jm = g["J0"], g["J+"], g["J-"]
    out.append(_check("algebra", "[J0,J+]=J+", _guarded_relative(comm(j0, jp), jp, mask), bound))
    out.append(_check("algebra", "[J0,J-]=-J-", _guarded_relative(comm(j0, jm), -jm, mask), bound))
    out.append(_check("algebra", "[J+,J-]=2J0", _guarded_relative(comm(jp, jm), 2 * j0, mask), bound))

    total = sps.diags((basis.na + basis.nb).astype(float))
    j2 = j0 @ j0 + 0.5 * (jp @ jm + jm @ jp)
    out.append(_check("algebra", "J^2 = N(N+2)/4", _guarded_relative(j2, 0.25 * total @ (total + 2 * sps.identity(basis.dim)), mask), bound))
    k0, kp, km = g["K0"], g["K+"], g["K-"]
    k2 = k0 @ k0 - 0.5 * (kp @ km + km @ kp)
    out.append(_check("algebra", "K^2 = J0^2 - 1/4", _guarded_relative(k2, j0 @ j0 - 0.25 * sps.identity(basis.dim), mask), bound))
    for mode in ("a", "b"):
        k0, kp, km = g["K0" + mode], g["K+" + mode], g["K-" + mode]
        k2 = k0 @ k0 - 0.5 * (kp @ km + km @ kp)
        out.append(_check("algebra", f"K({mode})^2 = -3/16", _guarded_relative(k2, -3 / 16 * sps.identity(basis.dim), mask), bound))

    a, b = sparse_ladder(n_max, "a"), sparse_ladder(n_max, "b")
    eye = sps.identity(basis.dim)
    out.append(_check("algebra", "[a,a^dag]=1", _guarded_relative(comm(a, a.T), eye, mask), bound))
    out.append(_check("algebra", "[b,b^dag]=1", _guarded_relative(comm(b, b.T), eye, mask), bound))
    out.append(_check("algebra", "[a,b^dag]=0", _guarded_relative(comm(a, b.T), 0 * eye, mask), bound))

    params = ModelParams(1.2, 0.8, 0.2, 0.5)
    phys = _hamiltonian_sparse(params, n_max, "physical")
    alg = _hamiltonian_sparse(params, n_max, "algebraic")
    out.append(_check("algebra", "H physical == H algebraic",
                      abs(phys - alg).max() / abs(phys).max(), 1e-13))
    return out


# ---------------------------------------------------------------------------
# similarity transformations

SIM_MAGNITUDES = (0.1, 0.3, 0.5)
SIM_PHASES = (0.0, math.pi / 3, 3 * math.pi / 2)


def _group_param(group, magnitude, phase):
    if group in ("st1", "st2"):
        return dsp.DisplacementParam("su11", magnitude, phase)
    if group == "st6":
        return (dsp.DisplacementParam("boson_a", magnitude, phase),
                dsp.DisplacementParam("boson_b", 0.7 * magnitude, phase + 1.0))
    return dsp.DisplacementParam("su2", magnitude, phase)


def similarity_suite(n_max=30, guard=12, bound=1e-8):
    basis = FockBasis(n_max)
    mask = basis.guard_mask(guard)
    out = []
    by_kind = {}
    for group, (kind, ops) in dsp.SIMILARITY_IDS.items():
        by_kind.setdefault(kind, []).append(group)
    for mag in SIM_MAGNITUDES:
        for phase in SIM_PHASES:
            for kind, groups in by_kind.items():
                param = _group_param(groups[0], mag, phase)
                cols = dsp.padded_columns(basis, [param], mask)
                g_work = sparse_generators(cols.n_work)
                for group in groups:
                    for op in dsp.SIMILARITY_IDS[group][1]:
                        iid = f"{group}.{op}"
                        lhs = dsp.conjugated_block(g_work[op], cols)
                        rhs = dsp.combine_generators(n_max, dsp.similarity_terms(iid, param))
                        res = np.linalg.norm(lhs - rhs[np.ix_(mask, mask)])
                        out.append(_check("similarity", f"{iid} mag={mag} phase={phase:.4f}", res, bound))
    return out


# ---------------------------------------------------------------------------
# Perelomov coefficients


def coherent_suite(bound=1e-10):
    out = []
    depth = 80
    cutoff = 110
    g = sparse_generators(cutoff)
    basis = FockBasis(cutoff)
    for k in (0.5, 1.0, 1.5):
        m = int(2 * k - 1)
        for n in range(5):
            for zmod in (0.3, 0.6):
                for arg in (0.0, 2.0):
                    zeta = zmod * np.exp(1j * arg)
                    pp = dsp.PerelomovParams.su11(zeta)
                    series = dsp.perelomov_su11_coefficients(dsp.IrrepLabel.su11_label(k, n), pp, depth)
                    # zeta = -tanh(tau/2) e^{-i phi}
                    tau = 2 * math.atanh(zmod)
                    phi = math.pi - arg
                    xi = -0.5 * tau * np.exp(-1j * phi)
                    gen = (xi * g["K+"] - np.conj(xi) * g["K-"]).tocsc()
                    na0, nb0 = n + m, n
                    start = np.zeros(basis.dim, dtype=complex)
                    start[basis.index_of(na0, nb0)] = 1.0
                    ref_vec = expm_multiply(gen, start)
                    ref = np.array([ref_vec[basis.index_of(m + i, i)] for i in range(depth + 1)])
                    tag = f"k={k} n={n} |zeta|={zmod} arg={arg}"
                    out.append(_check("coherent", f"su11 coefficients {tag}", np.max(np.abs(ref - series.values)), bound))
                    out.append(_check("coherent", f"su11 normalization {tag}", abs(series.norm_squared - 1.0), bound))
    for two_j in range(7):
        small = FockBasis(two_j)
        gs = sparse_generators(two_j)
        for two_mu in range(-two_j, two_j + 1, 2):
            for zeta in (0.4 * np.exp(0.5j), 1.7 * np.exp(-2.2j)):
                pp = dsp.PerelomovParams.su2(zeta)
                label = dsp.IrrepLabel.su2_label(two_j / 2, two_mu / 2)
                series = dsp.perelomov_su2_coefficients(label, pp)
                theta = 2 * math.atan(abs(zeta))
                phi = math.pi - np.angle(zeta)
                chi = -0.5 * theta * np.exp(-1j * phi)
                gen = (chi * gs["J+"] - np.conj(chi) * gs["J-"]).tocsc()
                start = np.zeros(small.dim, dtype=complex)
                start[small.index_of((two_j + two_mu) // 2, (two_j - two_mu) // 2)] = 1.0
                ref_vec = expm_multiply(gen, start)
                ref = np.array([ref_vec[small.index_of(i, two_j - i)] for i in range(two_j + 1)])
                tag = f"j={two_j / 2} mu={two_mu / 2} |zeta|={abs(zeta):.1f}"
                out.append(_check("coherent", f"su2 coefficients {tag}", np.max(np.abs(ref - series.values)), bound))
                out.append(_check("coherent", f"su2 normalization {tag}", abs(series.norm_squared - 1.0), bound))
    return out


# ---------------------------------------------------------------------------
# spectrum, limits, pipeline and domain


def _level_checks(out, tag, params, count=15, bound=1e-6, max_cutoff=40):
    lines = enumerate_levels(params, count)
    conv = converged_levels(params, count, tol=0.1 * bound)
    out.append(_check("spectrum", f"levels vs converged oracle (cutoff {conv.cutoff}) {tag}",
                      match_levels(lines, conv.eigenvalues, bound).max_difference, bound))
    if conv.cutoff > max_cutoff:
        out.append(_check("spectrum", f"levels vs cutoff-{max_cutoff} oracle {tag}",
                          match_levels(lines, conv.history[max_cutoff], bound).max_difference, bound))


def spectrum_suite(cutoff=30, tolerance=1e-8):
    out = []
    # exactness, isotropic grid
    for lam in (0.1, 0.2, 0.3, 0.45):
        for psi in (0.0, 0.8):
            p = ModelParams(1.0, 1.0, lam, psi)
            tag = f"omega=1 lambda={lam} psi={psi}"
            wp, wm = normal_modes_analytic(p)
            cp, cm = math.sqrt(1 + 2 * lam), math.sqrt(1 - 2 * lam)
            out.append(_check("spectrum", f"Omega+ closed vs sqrt(w^2+2lw) {tag}", abs(wp - cp), 1e-10))
            out.append(_check("spectrum", f"Omega- closed vs sqrt(w^2-2lw) {tag}", abs(wm - cm), 1e-10))
            _level_checks(out, tag, p)
    # anisotropic
    p = ModelParams(1.2, 0.8, 0.2)
    wp, wm = normal_modes_analytic(p)
    out.append(_check("spectrum", "Omega+ = sqrt(1.6) at (1.2,0.8,0.2)", abs(wp - math.sqrt(1.6)), 1e-10))
    out.append(_check("spectrum", "Omega- = sqrt(0.48) at (1.2,0.8,0.2)", abs(wm - math.sqrt(0.48)), 1e-10))
    _level_checks(out, "(1.2,0.8,0.2)", p)
    for ratio in (0.9, 0.5):
        for frac in (0.2, 0.5):
            lam = frac * 0.5 * math.sqrt(ratio)
            p = ModelParams(1.0, ratio, lam, 0.3)
            tag = f"w2/w1={ratio} lambda={lam:.6f}"
            cp, cm = classical_normal_modes(p)
            wp, wm = normal_modes_analytic(p)
            out.append(_check("spectrum", f"normal modes closed vs classical {tag}", max(abs(wp - cp), abs(wm - cm)), 1e-10))
            _level_checks(out, tag, p)
    # limits
    worst = 0.0
    for omega in (1.0, 1.7):
        p = ModelParams(omega, omega, 0.0)
        for N in range(11):
            for m in range(-N, N + 1, 2):
                worst = max(worst, abs(energy(p, N, m) - omega * (N + 1)))
    out.append(_check("spectrum", "lambda=0: E = omega(N+1), N<=10", worst, 1e-12))
    worst_c = worst_t = 0.0
    for omega in (0.7, 1.0, 2.5):
        for frac in (0.0, 0.3, 0.7, 0.95):
            lam = frac * omega / 2
            general = closed_form_coefficients(ModelParams(omega, omega, lam))
            iso = isotropic_coefficients(omega, lam)
            worst_c = max(worst_c, abs(general.A - iso.A), abs(general.B - iso.B))
            args = tilt_arguments(ModelParams(omega, omega, lam))
            forms = isotropic_tilt_angles(omega, lam)
            worst_t = max(worst_t, *(abs(math.atanh(args[k]) - forms[k]) for k in args))
    out.append(_check("spectrum", "omega1=omega2: general A,B equal isotropic forms", worst_c, 1e-13))
    out.append(_check("spectrum", "omega1=omega2: general tilt angles equal isotropic forms", worst_t, 1e-13))
    # pipeline
    basis = FockBasis(cutoff)
    guard = default_guard(cutoff)
    mask = basis.guard_mask(guard)
    for p in (ModelParams(1.0, 1.0, 0.3, 0.0), ModelParams(1.2, 0.8, 0.2, 0.5)):
        tag = f"({p.omega1},{p.omega2},{p.lam},psi={p.psi}) n_max={cutoff}"
        reports = stage_hamiltonians(p, basis, guard)
        final = reports[-1]
        out.append(_check("spectrum", f"stage-3 off-diagonal residual {tag}", final.offdiag_residual, tolerance))
        diag = np.diag(final.hamiltonian.data)[mask]
        expected = np.array([energy(p, na + nb, na - nb) for na, nb in zip(basis.na[mask], basis.nb[mask])])
        out.append(_check("spectrum", f"stage-3 diagonal vs energy(N,m) {tag}", np.max(np.abs(diag - expected)), tolerance))
        for r in reports[1:]:
            out.append(_check("spectrum", f"stage-{r.stage} cancellation of {'/'.join(r.cancelled_terms)} ({r.branch} branch) {tag}", r.cancellation, 1e-7))
    # domain boundary
    for omega in (1.0, 2.0):
        p = ModelParams(omega, omega, omega / 2)
        try:
            solve_tilt_parameters(p)
            tilt_raised = False
        except DomainError:
            tilt_raised = True
        try:
            classical_normal_modes(p)
            oracle_raised = False
        except UnstableError:
            oracle_raised = True
        out.append(_flag("spectrum", f"lambda=omega/2 (omega={omega}) rejected by tilt solver", tilt_raised))
        out.append(_flag("spectrum", f"lambda=omega/2 (omega={omega}) rejected by classical oracle", oracle_raised))
    return out


# ---------------------------------------------------------------------------
# eigenstates


def eigenstates_suite(n_max=40, n_top=4, residual_bound=1e-6, ortho_bound=1e-8):
    out = []
    basis = FockBasis(n_max)
    for p in (ModelParams(1.0, 1.0, 0.3, 0.0), ModelParams(1.2, 0.8, 0.24, 0.7)):
        tag = f"({p.omega1},{p.omega2},{p.lam},psi={p.psi}) n_max={n_max}"
        h = _hamiltonian_sparse(p, n_max, "physical")
        states = []
        worst_res = worst_leak = 0.0
        for N in range(n_top + 1):
            for m in range(-N, N + 1, 2):
                s = tilted_eigenstate(p, basis, N, m)
                states.append(s.amplitudes)
                worst_res = max(worst_res, eigen_residual(h, s, energy(p, N, m)))
                worst_leak = max(worst_leak, s.leakage)
        v = np.array(states).T
        gram = v.conj().T @ v
        out.append(_check("eigenstates", f"eigen residual N<={n_top} {tag}", worst_res, residual_bound))
        out.append(_check("eigenstates", f"orthonormality N<={n_top} {tag}", np.max(np.abs(gram - np.eye(len(states)))), ortho_bound))
        out.append(_check("eigenstates", f"leakage N<={n_top} {tag}", worst_leak, residual_bound))
    return out


def run_suites(names=("all",), cutoff=30, tolerance=1e-8):
    """Run the named suites and return ``(checks, timings)``."""
    if "all" in names:
        names = SUITES
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite(s): {', '.join(unknown)}")
    runners = {
        "algebra": lambda: algebra_suite(),
        "similarity": lambda: similarity_suite(n_max=cutoff, guard=default_guard(cutoff), bound=tolerance),
        "coherent": lambda: coherent_suite(),
        "spectrum": lambda: spectrum_suite(cutoff=cutoff, tolerance=tolerance),
        "eigenstates": lambda: eigenstates_suite(),
    }
    checks, timings = [], {}
    for name in names:
        start = time.perf_counter()
        checks.extend(runners[name]())
        timings[name] = time.perf_counter() - start
    return checks, timings
