"""Displacement unitaries, Perelomov number coherent states and conjugation identities.

A displacement of magnitude ``t`` and phase ``phi`` uses the complex argument
``xi = -t/2 * exp(-i phi)`` and the unitary ``exp(xi X+ - conj(xi) X-)`` for a
raising/lowering pair ``X+-`` of the chosen algebra.

Conjugating generators by a truncated unitary is only exact away from the
cutoff, and the spread of a squeezed state grows with its occupation. The
``*_columns`` helpers therefore act in a padded workspace (cutoff
``n_max + pad``) whose pad is grown until the displaced columns carry
negligible weight next to the outer wall.
"""
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sps
from scipy.sparse.csgraph import connected_components
from scipy.special import gammaln

from .algebra import sparse_generators
from .errors import DomainError, KindMismatch, LeakageError, NotAntiHermitian
from .fock import FockBasis, OperatorMatrix, _lowering_1d

KINDS = ("su11", "su2", "boson_a", "boson_b")
HYPERBOLIC = ("su11", "boson_a", "boson_b")

_RAISE_LOWER = {
    "su11": ("K+", "K-"),
    "su2": ("J+", "J-"),
    "boson_a": ("K+a", "K-a"),
    "boson_b": ("K+b", "K-b"),
}


@dataclass(frozen=True)
class DisplacementCoefficients:
    alpha: float
    beta: float


@dataclass(frozen=True)
class DisplacementParam:
    kind: str
    magnitude: float
    phase: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")

    @property
    def argument(self):
        """The complex parameter ``xi`` (``chi`` for su2)."""
        return -0.5 * self.magnitude * np.exp(-1j * self.phase)

    @property
    def modulus(self):
        return 0.5 * abs(self.magnitude)

    @property
    def unit(self):
        """``xi / |xi|``; at zero magnitude the limit along positive magnitude."""
        sign = -1.0 if self.magnitude >= 0 else 1.0
        return sign * np.exp(-1j * self.phase)

    @property
    def coefficients(self):
        x = 2.0 * self.modulus
        if self.kind == "su2":
            return DisplacementCoefficients(math.sin(x), 0.5 * (math.cos(x) - 1.0))
        return DisplacementCoefficients(math.sinh(x), 0.5 * (math.cosh(x) - 1.0))


@dataclass(frozen=True)
class PerelomovParams:
    """Disentangled coordinates: ``D = exp(zeta X+) exp(eta X0) exp(-conj(zeta) X-)``."""

    kind: str
    zeta: complex
    eta: float

    @classmethod
    def su11(cls, zeta):
        zeta = complex(zeta)
        if abs(zeta) >= 1.0:
            raise DomainError(f"|zeta| = {abs(zeta)} must be < 1 for su(1,1)", "zeta")
        return cls("su11", zeta, math.log1p(-abs(zeta) ** 2))

    @classmethod
    def su2(cls, zeta):
        zeta = complex(zeta)
        return cls("su2", zeta, math.log1p(abs(zeta) ** 2))

    @classmethod
    def from_param(cls, param):
        if param.kind == "su2":
            return cls.su2(-math.tan(0.5 * param.magnitude) * np.exp(-1j * param.phase))
        return cls.su11(-math.tanh(0.5 * param.magnitude) * np.exp(-1j * param.phase))


@dataclass(frozen=True)
class IrrepLabel:
    """Discrete-series label ``(k, n)`` for su(1,1) or weight label ``(j, mu)`` for su(2)."""

    kind: str
    k: float = None
    n: int = None
    j: float = None
    mu: float = None

    def __post_init__(self):
        if self.kind == "su11":
            if self.k is None or self.k <= 0 or self.n is None or self.n < 0:
                raise ValueError("su11 label needs k > 0 and integer n >= 0")
        elif self.kind == "su2":
            if self.j is None or self.mu is None or 2 * self.j != int(2 * self.j) or self.j < 0:
                raise ValueError("su2 label needs half-integer j >= 0")
            if abs(self.mu) > self.j or (self.j - self.mu) != int(self.j - self.mu):
                raise ValueError(f"invalid weight mu={self.mu} for j={self.j}")
        else:
            raise ValueError(f"kind must be 'su11' or 'su2', got {self.kind!r}")

    @classmethod
    def su11_label(cls, k, n):
        return cls("su11", k=k, n=n)

    @classmethod
    def su2_label(cls, j, mu):
        return cls("su2", j=j, mu=mu)

    @classmethod
    def from_fock(cls, kind, N, m):
        """Label carried by ``|N, m>`` in the two-boson realizations."""
        if kind == "su11":
            return cls("su11", k=(abs(m) + 1) / 2, n=(N - abs(m)) // 2)
        return cls("su2", j=N / 2, mu=m / 2)


# ---------------------------------------------------------------------------
# exponentials


def _expm_block(block):
    w, v = np.linalg.eigh(1j * block)
    return (v * np.exp(-1j * w)) @ v.conj().T


def _antihermitian_defect(m):
    if sps.issparse(m):
        return sps.linalg.norm(m + m.conj().T), sps.linalg.norm(m)
    return np.linalg.norm(m + m.conj().T), np.linalg.norm(m)


def unitary_exponential(M):
    """``exp(M)`` for anti-Hermitian ``M`` via eigendecomposition of ``iM``.

    The matrix is split into connected blocks first, so generators that
    conserve a quantum number are exponentiated sector by sector.
    """
    data = M.data if isinstance(M, OperatorMatrix) else np.asarray(M, dtype=complex)
    defect, norm = _antihermitian_defect(data)
    if defect > 1e-12 * norm:
        raise NotAntiHermitian(f"||M + M^dag||_F = {defect:.3e} exceeds 1e-12 ||M||_F")
    n, labels = connected_components(sps.csr_matrix(data != 0), directed=False)
    out = np.zeros_like(data)
    for c in range(n):
        idx = np.flatnonzero(labels == c)
        out[np.ix_(idx, idx)] = _expm_block(data[np.ix_(idx, idx)])
    if isinstance(M, OperatorMatrix):
        return OperatorMatrix(M.n_max, out)
    return out


def displacement_generator(n_max, param):
    """Sparse anti-Hermitian exponent ``xi X+ - conj(xi) X-`` at cutoff ``n_max``."""
    up, down = _RAISE_LOWER[param.kind]
    g = sparse_generators(n_max)
    xi = param.argument
    return (xi * g[up] - np.conj(xi) * g[down]).tocsr()


def single_mode_squeeze(n_max, param):
    """One-mode factor ``exp(xi (a^dag)^2/2 - conj(xi) a^2/2)`` on ``0..n_max``."""
    low = _lowering_1d(n_max)
    k_minus = 0.5 * (low @ low)
    xi = param.argument
    gen = (xi * k_minus.T - np.conj(xi) * k_minus).toarray()
    return unitary_exponential(gen)


def _sector_labels(n_max, kind):
    d = n_max + 1
    na = np.repeat(np.arange(d), d)
    nb = np.tile(np.arange(d), d)
    return na - nb if kind == "su11" else na + nb


def displacement_operator(basis, param):
    """Truncated displacement unitary on ``basis``; exactly unitary on the truncated space."""
    n = basis.n_max
    if param.kind in ("boson_a", "boson_b"):
        one = single_mode_squeeze(n, param)
        eye = np.eye(n + 1)
        data = np.kron(one, eye) if param.kind == "boson_a" else np.kron(eye, one)
        return OperatorMatrix(n, data)
    return unitary_exponential(OperatorMatrix(n, displacement_generator(n, param).toarray()))


def displacement_pair(basis, param_a, param_b):
    """``D(xi_a) D(xi_b)``: independent single-mode squeezes of both bosons."""
    if param_a.kind != "boson_a" or param_b.kind != "boson_b":
        raise KindMismatch("pair displacement needs a boson_a and a boson_b parameter")
    n = basis.n_max
    return OperatorMatrix(n, np.kron(single_mode_squeeze(n, param_a), single_mode_squeeze(n, param_b)))


# ---------------------------------------------------------------------------
# padded workspace


def apply_displacement(n_max, param, vectors):
    """``D @ vectors`` at cutoff ``n_max`` without forming ``D``.

    ``param`` is a :class:`DisplacementParam` or an ``(a, b)`` pair of boson
    parameters. ``vectors`` has shape ``(dim,)`` or ``(dim, c)``.
    """
    v = np.asarray(vectors, dtype=complex)
    flat = v.ndim == 1
    if flat:
        v = v[:, None]
    d = n_max + 1
    if isinstance(param, tuple):
        pa, pb = param
        ua = single_mode_squeeze(n_max, pa)
        ub = single_mode_squeeze(n_max, pb)
        out = np.einsum("ij,kl,jlc->ikc", ua, ub, v.reshape(d, d, -1), optimize=True)
        out = out.reshape(d * d, -1)
    elif param.kind in ("boson_a", "boson_b"):
        one = single_mode_squeeze(n_max, param)
        cube = v.reshape(d, d, -1)
        if param.kind == "boson_a":
            out = np.einsum("ij,jkc->ikc", one, cube)
        else:
            out = np.einsum("kj,ijc->ikc", one, cube)
        out = out.reshape(d * d, -1)
    else:
        out = v.copy()
        if param.magnitude != 0:
            gen = displacement_generator(n_max, param)
            labels = _sector_labels(n_max, param.kind)
            touched = np.unique(labels[np.any(v != 0, axis=1)])
            for lab in touched:
                idx = np.flatnonzero(labels == lab)
                block = gen[idx][:, idx].toarray()
                out[idx] = _expm_block(block) @ v[idx]
    return out[:, 0] if flat else out


def apply_chain(n_max, chain, vectors):
    """Apply ``D_1 D_2 ... D_L`` (rightmost acts first) to ``vectors``."""
    out = vectors
    for param in reversed(chain):
        out = apply_displacement(n_max, param, out)
    return out


def edge_weight(n_max, vectors, shell=4):
    """Largest per-column norm carried by states within ``shell`` of the cutoff."""
    d = n_max + 1
    na = np.repeat(np.arange(d), d)
    nb = np.tile(np.arange(d), d)
    edge = (na > n_max - shell) | (nb > n_max - shell)
    v = vectors if vectors.ndim == 2 else vectors[:, None]
    if not edge.any():
        return 0.0
    return float(np.max(np.linalg.norm(v[edge], axis=0)))


@dataclass
class PaddedColumns:
    """Displaced basis columns living in a workspace of cutoff ``n_work``."""

    n_work: int
    columns: np.ndarray
    leak: float


def padded_columns(basis, chain, mask, check=None, pad=None, tol=1e-13, max_pad=200):
    """Columns ``U e_s`` for the basis states selected by ``mask``.

    ``U`` is the chain product evaluated at cutoff ``basis.n_max + pad``. With
    ``pad=None`` the pad grows in steps of 20 until the columns selected by
    ``check`` (default: all of ``mask``) carry less than ``tol`` near the outer
    wall; :class:`LeakageError` if ``max_pad`` is exceeded.
    """
    mask = np.asarray(mask, dtype=bool)
    check = mask if check is None else np.asarray(check, dtype=bool)
    sel = check[mask]
    pads = [pad] if pad is not None else range(20, max_pad + 1, 20)
    for p in pads:
        work = FockBasis(basis.n_max + p)
        pos = basis.indices_in(work)[mask]
        e = np.zeros((work.dim, pos.size), dtype=complex)
        e[pos, np.arange(pos.size)] = 1.0
        cols = apply_chain(work.n_max, chain, e)
        leak = edge_weight(work.n_max, cols[:, sel]) if sel.any() else 0.0
        if pad is not None or leak < tol:
            return PaddedColumns(work.n_max, cols, leak)
    raise LeakageError(f"edge weight {leak:.2e} still above {tol:.0e} at pad {max_pad}")


def conjugated_block(operator_sparse, padded):
    """``C^dag X C`` for padded columns ``C`` and a sparse operator at the workspace cutoff."""
    c = padded.columns
    return c.conj().T @ (operator_sparse @ c)


# ---------------------------------------------------------------------------
# Perelomov number coherent states


@dataclass(frozen=True)
class CoefficientSeries:
    """Amplitudes over a target label; ``tail_bound`` bounds the discarded norm squared."""

    values: np.ndarray
    tail_bound: float

    @property
    def norm_squared(self):
        return float(np.sum(np.abs(self.values) ** 2))


def _log_zeta(zeta):
    return -np.inf if zeta == 0 else math.log(abs(zeta))


def perelomov_su11_coefficients(label, zeta, depth):
    """Amplitudes of ``D(xi)|k, n>`` on ``|k, n'>`` for ``n' = 0..depth``.

    Sum over ``s >= 0`` and ``j = 0..n`` with target ``n' = n - j + s``;
    gamma-function ratios are combined in log space, so large ``k`` and ``n``
    do not overflow. The ``j`` sum alternates in sign, and for ``n`` of a
    few dozen the cancellation costs several digits of relative accuracy.
    """
    if not isinstance(zeta, PerelomovParams):
        zeta = PerelomovParams.su11(zeta)
    if zeta.kind != "su11":
        raise KindMismatch("su(1,1) coefficients need su11 Perelomov parameters")
    if abs(zeta.zeta) >= 1:
        raise DomainError(f"|zeta| = {abs(zeta.zeta)} must be < 1", "zeta")
    k, n = label.k, label.n
    if depth < n:
        raise ValueError(f"depth {depth} must be at least n = {n}")
    z = zeta.zeta
    lz = _log_zeta(z)
    arg = np.angle(z)
    j = np.arange(n + 1)[:, None]
    target = np.arange(depth + 1)[None, :]
    s = target - n + j
    ok = s >= 0
    s = np.where(ok, s, 0)
    if z == 0:
        ok &= (s == 0) & (j == 0)
    with np.errstate(invalid="ignore"):
        logmag = (
            np.where(s + j > 0, (s + j) * lz, 0.0)
            - gammaln(s + 1) - gammaln(j + 1)
            + zeta.eta * (k + n - j)
            + 0.5 * (gammaln(2 * k + n) + gammaln(2 * k + n - j + s)) - gammaln(2 * k + n - j)
            + 0.5 * (gammaln(n + 1) + gammaln(n - j + s + 1)) - gammaln(n - j + 1)
        )
    phase = np.exp(1j * (s - j) * arg) * np.where(j % 2, -1.0, 1.0)
    terms = np.where(ok, np.exp(np.where(ok, logmag, -np.inf)) * phase, 0.0)
    values = terms.sum(axis=0)
    return CoefficientSeries(values, _geometric_tail(values))


def _geometric_tail(values):
    """Bound on the discarded norm squared assuming the amplitude ratio keeps falling."""
    mags = np.abs(values)
    if mags.size < 2 or mags[-1] == 0:
        return 0.0
    if mags[-2] == 0:
        return math.inf
    r = mags[-1] / mags[-2]
    if r >= 1:
        return math.inf
    return float(mags[-1] ** 2 * r ** 2 / (1 - r ** 2))


def perelomov_su2_coefficients(label, zeta):
    """Amplitudes of ``D(chi)|j, mu>`` on ``|j, mu'>``, ``mu' = -j..j`` (index ``mu' + j``)."""
    if not isinstance(zeta, PerelomovParams):
        zeta = PerelomovParams.su2(zeta)
    if zeta.kind != "su2":
        raise KindMismatch("su(2) coefficients need su2 Perelomov parameters")
    jp = int(round(label.j + label.mu))   # j + mu
    jm = int(round(label.j - label.mu))   # j - mu
    size = jp + jm + 1
    z = zeta.zeta
    lz = _log_zeta(z)
    arg = np.angle(z)
    out = np.zeros(size, dtype=complex)
    for n in range(jp + 1):
        for s in range(jm + n + 1):
            if z == 0 and (s or n):
                continue
            logmag = (
                ((s + n) * lz if s + n else 0.0)
                - gammaln(s + 1) - gammaln(n + 1)
                + zeta.eta * (label.mu - n)
                + gammaln(jm + n + 1) - gammaln(jp - n + 1)
                + 0.5 * (gammaln(jp + 1) + gammaln(jp - n + s + 1)
                         - gammaln(jm + 1) - gammaln(jm + n - s + 1))
            )
            sign = -1.0 if n % 2 else 1.0
            out[jp - n + s] += sign * math.exp(logmag) * np.exp(1j * (s - n) * arg)
    return CoefficientSeries(out, 0.0)


# ---------------------------------------------------------------------------
# similarity transformations D^dag X D as generator combinations

SIMILARITY_IDS = {
    "st1": ("su11", ("K0", "K+", "K-")),
    "st2": ("su11", ("J0", "J+", "J-")),
    "st3": ("su2", ("J0", "J+", "J-")),
    "st4": ("su2", ("K0", "K+", "K-")),
    "st5": ("su2", ("K+a", "K-a", "K+b", "K-b")),
    "st6": ("pair", ("J0", "K0", "K+a", "K-a", "K+b", "K-b")),
}


def similarity_identity_ids():
    return [f"{group}.{op}" for group, (_, ops) in SIMILARITY_IDS.items() for op in ops]


def _split_identity(identity_id):
    try:
        group, op = identity_id.split(".", 1)
        kind, ops = SIMILARITY_IDS[group]
    except (ValueError, KeyError):
        raise ValueError(f"unknown identity {identity_id!r}") from None
    if op not in ops:
        raise ValueError(f"unknown identity {identity_id!r}")
    return group, kind, op


def _check_kind(identity_id, kind, param):
    if kind == "pair":
        ok = (isinstance(param, tuple) and len(param) == 2
              and param[0].kind == "boson_a" and param[1].kind == "boson_b")
    else:
        ok = isinstance(param, DisplacementParam) and param.kind == kind
    if not ok:
        raise KindMismatch(f"{identity_id} needs a {kind} displacement, got {param!r}")


def _squeeze_terms(u, alpha, beta, zero, up, down):
    """Shared su(1,1) form of ``D^dag X+- D`` for one raising/lowering pair."""
    uc = np.conj(u)
    return {
        up: {zero: uc * alpha, up: beta + 1, down: beta * uc / u},
        down: {zero: u * alpha, down: beta + 1, up: beta * u / uc},
    }


def similarity_terms(identity_id, param):
    """Right-hand side of ``D^dag X D`` as ``{generator name: coefficient}``."""
    group, kind, op = _split_identity(identity_id)
    _check_kind(identity_id, kind, param)
    if kind == "pair":
        pa, pb = param
        ua, ub = pa.unit, pb.unit
        ca, cb = pa.coefficients, pb.coefficients
        cha, chb = 2 * ca.beta + 1, 2 * cb.beta + 1
        sa = {"K-a": ca.alpha * np.conj(ua) / 2, "K+a": ca.alpha * ua / 2}
        sb = {"K-b": cb.alpha * np.conj(ub) / 2, "K+b": cb.alpha * ub / 2}
        if op == "J0":
            return {"J0": (cha + chb) / 2, "K0": (cha - chb) / 2,
                    **sa, **{name: -c for name, c in sb.items()}}
        if op == "K0":
            return {"K0": (cha + chb) / 2, "J0": (cha - chb) / 2, **sa, **sb}
        terms = {}
        terms.update(_squeeze_terms(ua, ca.alpha, ca.beta, "K0a", "K+a", "K-a"))
        terms.update(_squeeze_terms(ub, cb.alpha, cb.beta, "K0b", "K+b", "K-b"))
        return terms[op]

    u = param.unit
    uc = np.conj(u)
    c = param.coefficients
    alpha, beta = c.alpha, c.beta
    if group == "st1":
        if op == "K0":
            return {"K0": 2 * beta + 1, "K+": alpha * u / 2, "K-": alpha * uc / 2}
        return _squeeze_terms(u, alpha, beta, "K0", "K+", "K-")[op]
    if group == "st2":
        return {
            "J0": {"J0": 1.0},
            "J+": {"K-b": uc * alpha, "K+a": u * alpha, "J+": 2 * beta + 1},
            "J-": {"K-a": uc * alpha, "K+b": u * alpha, "J-": 2 * beta + 1},
        }[op]
    if group == "st3":
        return {
            "J0": {"J0": 2 * beta + 1, "J+": alpha * u / 2, "J-": alpha * uc / 2},
            "J+": {"J0": -uc * alpha, "J+": beta + 1, "J-": beta * uc / u},
            "J-": {"J0": -u * alpha, "J-": beta + 1, "J+": beta * u / uc},
        }[op]
    if group == "st4":
        return {
            "K0": {"K0": 1.0},
            "K+": {"K+": 2 * beta + 1, "K+a": -u * alpha, "K+b": uc * alpha},
            "K-": {"K-": 2 * beta + 1, "K-a": -uc * alpha, "K-b": u * alpha},
        }[op]
    # st5
    return {
        "K+a": {"K+a": beta + 1, "K+": uc * alpha / 2, "K+b": -(uc / u) * beta},
        "K-a": {"K-a": beta + 1, "K-": u * alpha / 2, "K-b": -(u / uc) * beta},
        "K+b": {"K+b": beta + 1, "K+": -u * alpha / 2, "K+a": -(u / uc) * beta},
        "K-b": {"K-b": beta + 1, "K-": -uc * alpha / 2, "K-a": -(uc / u) * beta},
    }[op]


def combine_generators(n_max, terms, sparse=False):
    g = sparse_generators(n_max)
    dim = (n_max + 1) ** 2
    total = sps.csr_matrix((dim, dim), dtype=complex)
    for name, coef in terms.items():
        total = total + coef * g[name]
    return total if sparse else total.toarray()


def similarity_rhs(identity_id, basis, param):
    """Generator combination equal to ``D^dag X D`` for the selected identity.

    ``identity_id`` is ``"<group>.<operator>"``, e.g. ``"st1.K0"`` or
    ``"st5.K+a"``; see :func:`similarity_identity_ids`. Groups ``st1``/``st2``
    take an su11 parameter, ``st3``-``st5`` an su2 parameter and ``st6`` a
    ``(boson_a, boson_b)`` tuple.
    """
    terms = similarity_terms(identity_id, param)
    return OperatorMatrix(basis.n_max, combine_generators(basis.n_max, terms))


def similarity_lhs_operator(identity_id):
    return _split_identity(identity_id)[2]


def similarity_residual(identity_id, basis, param, guard, pad=None):
    """``||P (D^dag X D - RHS) P||_F`` on the guard band of ``basis``.

    The conjugation is evaluated in a padded workspace so the guarded block
    is free of truncation artifacts.
    """
    terms = similarity_terms(identity_id, param)
    mask = basis.guard_mask(guard)
    cols = padded_columns(basis, [param], mask, pad=pad)
    x = sparse_generators(cols.n_work)[similarity_lhs_operator(identity_id)]
    lhs = conjugated_block(x, cols)
    rhs = combine_generators(basis.n_max, terms)[np.ix_(mask, mask)]
    return float(np.linalg.norm(lhs - rhs))


def truncated_similarity_residual(identity_id, basis, param, guard):
    """Same residual with ``D`` exponentiated directly on the truncated basis."""
    terms = similarity_terms(identity_id, param)
    if isinstance(param, tuple):
        d = displacement_pair(basis, *param).data
    else:
        d = displacement_operator(basis, param).data
    x = sparse_generators(basis.n_max)[similarity_lhs_operator(identity_id)]
    lhs = d.conj().T @ (x @ d)
    rhs = combine_generators(basis.n_max, terms)
    mask = basis.guard_mask(guard)
    return float(np.linalg.norm((lhs - rhs)[np.ix_(mask, mask)]))
