"""Schwinger realizations of su(2) and su(1,1) and the coupled-oscillator Hamiltonian.

Generators (two modes ``a``, ``b``)::

    J+ = a^dag b      J- = b^dag a        J0 = (n_a - n_b)/2
    K+ = a^dag b^dag  K- = b a            K0 = (n_a + n_b + 1)/2
    K+^(a) = (a^dag)^2/2  K-^(a) = a^2/2  K0^(a) = (n_a + 1/2)/2   (same for b)
"""
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sps

from .fock import OperatorMatrix, sparse_ladder

GENERATOR_NAMES = (
    "K0", "K+", "K-", "J0", "J+", "J-",
    "K0a", "K+a", "K-a", "K0b", "K+b", "K-b",
)


@dataclass(frozen=True)
class ModelParams:
    """Frequencies ``omega1``, ``omega2``, coupling ``lam`` and coupling phase ``psi`` (hbar = 1)."""

    omega1: float
    omega2: float
    lam: float
    psi: float = 0.0

    def __post_init__(self):
        for name in ("omega1", "omega2", "lam", "psi"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.omega1 <= 0 or self.omega2 <= 0:
            raise ValueError("omega1 and omega2 must be positive")
        if self.lam < 0:
            raise ValueError(f"lam must be non-negative, got {self.lam}")

    @classmethod
    def isotropic(cls, omega, lam, psi=0.0):
        return cls(omega, omega, lam, psi)

    @property
    def is_isotropic(self):
        return self.omega1 == self.omega2

    @property
    def lam_max(self):
        """Coupling at which the soft normal mode goes to zero frequency."""
        return 0.5 * math.sqrt(self.omega1 * self.omega2)

    @property
    def valid(self):
        """True when the classical soft-mode frequency squared is positive and
        every inverse-hyperbolic argument of the tilting solution lies in (-1, 1)."""
        from .oracle import classical_minus_squared
        from .tilting import tilt_arguments

        if classical_minus_squared(self) <= 0:
            return False
        args = tilt_arguments(self)
        return all(-1.0 < v < 1.0 for v in args.values())


@dataclass(frozen=True)
class PhysicalParams:
    """Position-position coupled pair: mass, free frequency, coupling constant."""

    mass: float
    omega: float
    kappa: float

    def __post_init__(self):
        if self.mass <= 0 or self.omega <= 0:
            raise ValueError("mass and omega must be positive")


def physical_to_algebraic(phys):
    """Map the position-coupled model onto :class:`ModelParams`.

    In boson form the coupling reads ``kappa (a^dag + a)(b^dag + b)``, so the
    mass drops out and the phase is zero.
    """
    return ModelParams(phys.omega, phys.omega, phys.kappa, 0.0)


@dataclass(frozen=True)
class GeneratorSet:
    role: str
    plus: OperatorMatrix
    minus: OperatorMatrix
    zero: OperatorMatrix
    casimir: OperatorMatrix

    def algebraic_casimir(self):
        """Casimir assembled from the generators (exact only away from the cutoff)."""
        z, p, m = self.zero, self.plus, self.minus
        sym = 0.5 * (p @ m + m @ p)
        return z @ z + sym if self.role == "su2" else z @ z - sym


@lru_cache(maxsize=8)
def sparse_generators(n_max):
    """All generators as sparse CSR matrices at cutoff ``n_max`` (cached)."""
    a = sparse_ladder(n_max, "a")
    b = sparse_ladder(n_max, "b")
    ad, bd = a.T.tocsr(), b.T.tocsr()
    d = n_max + 1
    occ = np.arange(d, dtype=float)
    na = np.repeat(occ, d)
    nb = np.tile(occ, d)
    diag = lambda v: sps.diags(v, format="csr")  # noqa: E731
    ops = {
        "K0": diag(0.5 * (na + nb + 1)),
        "K+": (ad @ bd).tocsr(),
        "K-": (b @ a).tocsr(),
        "J0": diag(0.5 * (na - nb)),
        "J+": (ad @ b).tocsr(),
        "J-": (bd @ a).tocsr(),
        "K0a": diag(0.5 * (na + 0.5)),
        "K+a": (0.5 * ad @ ad).tocsr(),
        "K-a": (0.5 * a @ a).tocsr(),
        "K0b": diag(0.5 * (nb + 0.5)),
        "K+b": (0.5 * bd @ bd).tocsr(),
        "K-b": (0.5 * b @ b).tocsr(),
    }
    for m in ops.values():
        m.sort_indices()
    return ops


def generator(n_max, name):
    """Dense :class:`OperatorMatrix` for one generator name from ``GENERATOR_NAMES``."""
    return OperatorMatrix(n_max, sparse_generators(n_max)[name].toarray())


def _diag_op(n_max, values):
    return OperatorMatrix(n_max, np.diag(values))


def schwinger_su2(basis):
    n = basis.n_max
    total = basis.na + basis.nb
    return GeneratorSet(
        "su2",
        generator(n, "J+"),
        generator(n, "J-"),
        generator(n, "J0"),
        _diag_op(n, 0.25 * total * (total + 2)),
    )


def schwinger_su11_two_boson(basis):
    n = basis.n_max
    j0 = 0.5 * (basis.na - basis.nb)
    return GeneratorSet(
        "su11_two_boson",
        generator(n, "K+"),
        generator(n, "K-"),
        generator(n, "K0"),
        _diag_op(n, j0 ** 2 - 0.25),
    )


def schwinger_su11_one_boson(basis, mode):
    if mode not in ("a", "b"):
        raise ValueError(f"mode must be 'a' or 'b', got {mode!r}")
    n = basis.n_max
    return GeneratorSet(
        f"su11_one_boson_{mode}",
        generator(n, f"K+{mode}"),
        generator(n, f"K-{mode}"),
        generator(n, f"K0{mode}"),
        _diag_op(n, np.full(basis.dim, -3.0 / 16.0)),
    )


def _hamiltonian_sparse(params, n_max, form="algebraic"):
    g = sparse_generators(n_max)
    w1, w2, lam = params.omega1, params.omega2, params.lam
    down = lam * np.exp(-1j * params.psi)
    up = lam * np.exp(1j * params.psi)
    if form == "algebraic":
        return ((w1 + w2) * g["K0"] + (w1 - w2) * g["J0"]
                + down * (g["K+"] + g["J+"]) + up * (g["K-"] + g["J-"])).tocsr()
    if form == "physical":
        a = sparse_ladder(n_max, "a")
        b = sparse_ladder(n_max, "b")
        ad, bd = a.T, b.T
        eye = sps.identity((n_max + 1) ** 2, format="csr")
        return (w1 * (ad @ a + 0.5 * eye) + w2 * (bd @ b + 0.5 * eye)
                + down * (ad @ bd + ad @ b) + up * (bd @ a + b @ a)).tocsr()
    raise ValueError(f"form must be 'physical' or 'algebraic', got {form!r}")


def build_hamiltonian(params, basis, form="physical"):
    """Coupled-oscillator Hamiltonian on ``basis``.

    ``physical`` is built from ladder matrices, ``algebraic`` from the su(1,1)
    and su(2) generators; the two agree entrywise.
    """
    return OperatorMatrix(basis.n_max, _hamiltonian_sparse(params, basis.n_max, form).toarray())
