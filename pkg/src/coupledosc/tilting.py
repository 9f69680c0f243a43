"""Closed-form tilt parameters and the three-stage conjugation of the Hamiltonian.

Stage 1 conjugates by an su(1,1) displacement ``D(xi)`` that removes ``K+-``,
stage 2 by an su(2) rotation ``D(chi)`` that removes ``J+-``, and stage 3 by
single-boson squeezes ``D(xi_a) D(xi_b)`` that remove ``K+-^(a)`` and
``K+-^(b)``, leaving a combination of ``K0`` and ``J0``.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import _hamiltonian_sparse, sparse_generators
from .displacement import DisplacementParam, conjugated_block, padded_columns
from .errors import DomainError
from .fock import OperatorMatrix

ISOTROPY_CHECK = 1e-13
CANCELLATION_TOL = 1e-7

STAGE_CANCELS = {
    0: [],
    1: ["K+", "K-"],
    2: ["J+", "J-"],
    3: ["K+a", "K-a", "K+b", "K-b"],
}
FIT_DICTIONARY = ("I", "K0a", "K0b", "K+", "K-", "J+", "J-", "K+a", "K-a", "K+b", "K-b")


def _radicals(params):
    s = (params.omega1 + params.omega2) ** 2 - 4 * params.lam ** 2
    r2 = 4 * params.lam ** 2 * (params.omega1 + params.omega2) ** 2 \
        + (params.omega1 - params.omega2) ** 2 * s
    return s, math.sqrt(r2) if r2 >= 0 else math.nan


def _ratio(num, den):
    if den == 0:
        return math.copysign(math.inf, num) if num else math.nan
    return num / den


def tilt_arguments(params):
    """Arguments of the inverse hyperbolic tangents defining ``tau``, ``theta_a``, ``theta_b``.

    Values outside ``(-1, 1)`` (or non-finite) mean no real tilt exists.
    """
    lam2 = 4 * params.lam ** 2
    s, r = _radicals(params)
    if s <= 0:
        return {"tau": 2 * params.lam / (params.omega1 + params.omega2),
                "theta_a": math.nan, "theta_b": math.nan}
    return {
        "tau": 2 * params.lam / (params.omega1 + params.omega2),
        "theta_a": _ratio(-lam2, s + r),
        "theta_b": _ratio(-lam2, s - r),
    }


def _hyperbolic_pair(den, lam2):
    """``(cosh, sinh)`` of ``atanh(-lam2/den)`` written as algebraic closed forms."""
    root = math.sqrt(den ** 2 - lam2 ** 2)
    return den / root, -lam2 / root


@dataclass(frozen=True)
class TiltParameters:
    tau: float
    phi_xi: float
    theta: float
    phi_theta: float
    theta_a: float
    theta_b: float
    phi_a: float
    phi_b: float
    cosh_theta_a: float
    sinh_theta_a: float
    cosh_theta_b: float
    sinh_theta_b: float

    @property
    def cos_theta(self):
        return math.cos(self.theta)

    @property
    def sin_theta(self):
        return math.sin(self.theta)

    def displacements(self):
        """The three stage displacements, in the order they are applied to ``H``."""
        return [
            DisplacementParam("su11", self.tau, self.phi_xi),
            DisplacementParam("su2", self.theta, self.phi_theta),
            (DisplacementParam("boson_a", self.theta_a, self.phi_a),
             DisplacementParam("boson_b", self.theta_b, self.phi_b)),
        ]


def isotropic_tilt_angles(omega, lam):
    """Tilt magnitudes written directly for equal frequencies."""
    base = omega ** 2 - lam ** 2
    return {
        "tau": math.atanh(lam / omega),
        "theta": math.pi / 2 if lam else 0.0,
        "theta_a": math.atanh(-lam ** 2 / (base + omega * lam)),
        "theta_b": math.atanh(-lam ** 2 / (base - omega * lam)),
    }


def solve_tilt_parameters(params):
    """Tilt magnitudes and phases that diagonalize ``H`` for ``params``.

    Raises :class:`DomainError` naming the first inverse-hyperbolic argument
    that falls outside ``(-1, 1)``.
    """
    from .oracle import classical_minus_squared

    args = tilt_arguments(params)
    for name, value in args.items():
        if not (-1.0 < value < 1.0):
            raise DomainError(
                f"tilt argument for {name} is {value!r}, outside (-1, 1); "
                f"lambda={params.lam} exceeds the stable region (lambda < {params.lam_max:.6g})",
                name,
            )
    if classical_minus_squared(params) <= 0:
        raise DomainError("soft normal-mode frequency squared is not positive", "omega_minus")

    w1, w2, lam = params.omega1, params.omega2, params.lam
    s, r = _radicals(params)
    lam2 = 4 * lam ** 2
    tau = math.atanh(args["tau"])
    theta_a = math.atanh(args["theta_a"])
    theta_b = math.atanh(args["theta_b"])
    if params.is_isotropic:
        iso = isotropic_tilt_angles(w1, lam)
        for name, value in (("tau", tau), ("theta_a", theta_a), ("theta_b", theta_b)):
            if abs(iso[name] - value) > ISOTROPY_CHECK * max(1.0, abs(value)):
                raise AssertionError(f"isotropic and general {name} disagree: {iso[name]} vs {value}")
        tau, theta_a, theta_b, theta = iso["tau"], iso["theta_a"], iso["theta_b"], iso["theta"]
    else:
        theta = math.atan2(2 * lam * (w1 + w2), (w1 - w2) * math.sqrt(s))
    cha, sha = _hyperbolic_pair(s + r, lam2)
    chb, shb = _hyperbolic_pair(s - r, lam2)
    psi = params.psi
    return TiltParameters(
        tau=tau, phi_xi=psi, theta=theta, phi_theta=psi,
        theta_a=theta_a, theta_b=theta_b, phi_a=2 * psi, phi_b=0.0,
        cosh_theta_a=cha, sinh_theta_a=sha, cosh_theta_b=chb, sinh_theta_b=shb,
    )


# ---------------------------------------------------------------------------
# stage diagnostics


def default_guard(n_max):
    return math.ceil(0.4 * n_max)


def offdiag_residual(H, basis, guard):
    """Relative Frobenius weight of the off-diagonal part inside the guard band."""
    if guard >= basis.n_max:
        raise ValueError(f"guard {guard} must be smaller than n_max {basis.n_max}")
    mask = basis.guard_mask(guard)
    data = H.data if isinstance(H, OperatorMatrix) else np.asarray(H)
    block = data[np.ix_(mask, mask)]
    diag = np.diag(block)
    off = np.linalg.norm(block - np.diag(diag))
    return float(off / max(np.linalg.norm(diag), 1e-300))


def _guarded_dictionary(n_max, mask):
    g = sparse_generators(n_max)
    cols = []
    for name in FIT_DICTIONARY:
        if name == "I":
            block = np.eye(int(mask.sum()))
        else:
            block = g[name][mask][:, mask].toarray()
        cols.append(block.ravel())
    return np.array(cols).T


def generator_fit(H, basis, guard):
    """Least-squares coefficients of the guarded block of ``H`` over ``FIT_DICTIONARY``."""
    mask = basis.guard_mask(guard)
    data = H.data if isinstance(H, OperatorMatrix) else np.asarray(H)
    dictionary = _guarded_dictionary(basis.n_max, mask)
    target = data[np.ix_(mask, mask)].ravel()
    coef, *_ = np.linalg.lstsq(dictionary, target, rcond=None)
    return dict(zip(FIT_DICTIONARY, coef)), dictionary, target


def cancellation_residual(H, basis, guard, names):
    """Norm of the fitted component along ``names``, relative to the guarded block norm."""
    if not names:
        return 0.0
    coef, dictionary, target = generator_fit(H, basis, guard)
    idx = [FIT_DICTIONARY.index(n) for n in names]
    part = dictionary[:, idx] @ np.array([coef[n] for n in names])
    return float(np.linalg.norm(part) / max(np.linalg.norm(target), 1e-300))


@dataclass
class StageReport:
    stage: int
    hamiltonian: OperatorMatrix
    offdiag_residual: float
    cancelled_terms: list
    cancellation: float = 0.0
    branch: str = "closed-form"
    n_work: int = field(default=None, repr=False)


def _shift_phase(step):
    if isinstance(step, tuple):
        return tuple(DisplacementParam(p.kind, p.magnitude, p.phase + math.pi) for p in step)
    return DisplacementParam(step.kind, step.magnitude, step.phase + math.pi)


def stage_hamiltonians(params, basis, guard=None, tilt=None):
    """Reports for ``H``, ``H'``, ``H''`` and ``H'''`` on ``basis``.

    Each stage is the compression to ``basis`` of the Hamiltonian conjugated
    in a padded workspace. A stage whose target terms do not cancel is
    retried with its phase shifted by pi; ``branch`` records the outcome.
    """
    guard = default_guard(basis.n_max) if guard is None else guard
    tilt = solve_tilt_parameters(params) if tilt is None else tilt
    steps = tilt.displacements()
    mask_all = np.ones(basis.dim, dtype=bool)
    check = basis.guard_mask(guard)

    h0 = OperatorMatrix(basis.n_max, _hamiltonian_sparse(params, basis.n_max, "physical").toarray())
    reports = [StageReport(0, h0, offdiag_residual(h0, basis, guard), [], 0.0, "closed-form", basis.n_max)]
    chain = []
    for k, step in enumerate(steps, start=1):
        names = STAGE_CANCELS[k]
        best = None
        for branch, candidate in (("closed-form", step), ("shifted", _shift_phase(step))):
            cols = padded_columns(basis, chain + [candidate], mask_all, check=check)
            h_work = _hamiltonian_sparse(params, cols.n_work, "physical")
            hk = OperatorMatrix(basis.n_max, conjugated_block(h_work, cols))
            cancel = cancellation_residual(hk, basis, guard, names)
            report = StageReport(k, hk, offdiag_residual(hk, basis, guard), names, cancel,
                                 branch, cols.n_work)
            if best is None or cancel < best[1].cancellation:
                best = (candidate, report)
            if cancel <= CANCELLATION_TOL:
                break
        chain.append(best[0])
        reports.append(best[1])
    return reports
