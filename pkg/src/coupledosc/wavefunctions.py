"""Eigenfunctions: untilted polar forms and tilted Fock-space eigenstates."""
import math
from dataclasses import dataclass

import numpy as np

from .displacement import padded_columns
from .errors import CutoffError, LeakageError
from .fock import FockStateLabel, OperatorMatrix
from .tilting import solve_tilt_parameters

LEAKAGE_LIMIT = 1e-6


def laguerre_assoc(n, alpha, x):
    """Associated Laguerre polynomial ``L_n^alpha(x)`` by upward recurrence in ``n``."""
    if n < 0 or alpha < 0:
        raise ValueError("n and alpha must be non-negative")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + alpha - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


@dataclass(frozen=True)
class PolarPoint:
    """Point in the plane in oscillator units; the angle is wrapped into ``[0, 2 pi)``."""

    r: float
    phi: float = 0.0

    def __post_init__(self):
        if not self.r >= 0:
            raise ValueError(f"r must be non-negative, got {self.r}")
        object.__setattr__(self, "phi", math.fmod(self.phi, 2 * math.pi) % (2 * math.pi))


def radial_eigenfunction(n_r, m, r, phi):
    """2D oscillator eigenfunction with radial number ``n_r`` and angular number ``m``.

    Array-friendly in ``r`` and ``phi``. The radial factor uses ``|m|`` and the
    sign of ``m`` only enters the angular phase.
    """
    k = abs(m)
    r = np.asarray(r, dtype=float)
    phi = np.asarray(phi, dtype=float)
    log_norm = 0.5 * (math.lgamma(n_r + 1) - math.lgamma(n_r + k + 1))
    radial = r ** k * laguerre_assoc(n_r, k, r ** 2) * np.exp(-0.5 * r ** 2)
    sign = -1.0 if n_r % 2 else 1.0
    return sign * math.exp(log_norm) / math.sqrt(math.pi) * np.exp(1j * m * phi) * radial


def polar_eigenfunction(N, m, point):
    """Value of the ``|N, m>`` eigenfunction of the 2D oscillator at ``point``."""
    label = FockStateLabel(N, m)
    n_r = (label.N - abs(label.m)) // 2
    return complex(radial_eigenfunction(n_r, label.m, point.r, point.phi))


@dataclass
class StateVector:
    n_max: int
    amplitudes: np.ndarray
    leakage: float = 0.0

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other):
        if other.n_max != self.n_max:
            raise ValueError("states live on different bases")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def tilted_eigenstate(params, basis, N, m, order="literal"):
    """Eigenstate ``D(xi) D(chi) D(xi_a) D(xi_b) |N, m>`` as amplitudes on ``basis``.

    The displacements act in a padded workspace; ``leakage`` is the norm
    deficit after restricting to ``basis`` and before renormalizing.
    ``order="reversed"`` applies the three factors in the opposite order.
    """
    label = FockStateLabel(N, m)
    if 4 * label.N > basis.n_max:
        raise CutoffError(f"N={label.N} exceeds n_max/4 for cutoff {basis.n_max}")
    chain = solve_tilt_parameters(params).displacements()
    if order == "reversed":
        chain = chain[::-1]
    elif order != "literal":
        raise ValueError(f"order must be 'literal' or 'reversed', got {order!r}")
    mask = np.zeros(basis.dim, dtype=bool)
    mask[basis.index_of(label.n_a, label.n_b)] = True
    cols = padded_columns(basis, chain, mask)
    inside = basis.indices_in(type(basis)(cols.n_work))
    amps = cols.columns[inside, 0]
    norm = np.linalg.norm(amps)
    leakage = abs(1.0 - norm)
    if leakage > LEAKAGE_LIMIT:
        raise LeakageError(f"state |{N},{m}> loses {leakage:.2e} of its norm at cutoff {basis.n_max}")
    return StateVector(basis.n_max, amps / norm, leakage)


def eigen_residual(H, state, E):
    """``||H psi - E psi|| / ||psi||``."""
    if isinstance(H, OperatorMatrix) and H.n_max != state.n_max:
        raise ValueError("operator and state live on different bases")
    data = H.data if isinstance(H, OperatorMatrix) else H
    psi = state.amplitudes
    return float(np.linalg.norm(data @ psi - E * psi) / np.linalg.norm(psi))
