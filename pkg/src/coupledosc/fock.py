"""Truncated two-mode Fock space and bosonic ladder matrices.

States are ordered row-major in the occupation pair ``(n_a, n_b)``, each
occupation running over ``0..n_max``.
"""
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sps

from .errors import CutoffError, ParityError

HERMITIAN_RTOL = 1e-14


@dataclass(frozen=True)
class FockBasis:
    n_max: int
    na: np.ndarray = field(init=False, repr=False, compare=False)
    nb: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 0:
            raise ValueError(f"n_max must be a non-negative integer, got {self.n_max!r}")
        d = self.n_max + 1
        na = np.repeat(np.arange(d), d)
        nb = np.tile(np.arange(d), d)
        na.flags.writeable = False
        nb.flags.writeable = False
        object.__setattr__(self, "na", na)
        object.__setattr__(self, "nb", nb)

    @property
    def dim(self):
        return (self.n_max + 1) ** 2

    def index_of(self, n_a, n_b):
        if not (0 <= n_a <= self.n_max and 0 <= n_b <= self.n_max):
            raise CutoffError(f"occupation ({n_a}, {n_b}) outside cutoff {self.n_max}")
        return n_a * (self.n_max + 1) + n_b

    def occupations(self, index):
        return divmod(int(index), self.n_max + 1)

    def guard_mask(self, guard):
        """Boolean mask of states with both occupations at most ``n_max - guard``."""
        top = self.n_max - guard
        return (self.na <= top) & (self.nb <= top)

    def indices_in(self, larger):
        """Positions of this basis' states inside a basis with a larger cutoff."""
        if larger.n_max < self.n_max:
            raise ValueError("target basis is smaller than this one")
        return self.na * (larger.n_max + 1) + self.nb


def build_basis(n_max):
    return FockBasis(int(n_max))


@dataclass(frozen=True)
class FockStateLabel:
    """Two-mode state labelled by total ``N = n_a + n_b`` and difference ``m = n_a - n_b``."""

    N: int
    m: int

    def __post_init__(self):
        if self.N < 0:
            raise ValueError(f"N must be non-negative, got {self.N}")
        if (self.N + self.m) % 2:
            raise ParityError(f"N={self.N} and m={self.m} differ in parity")
        if abs(self.m) > self.N:
            raise ValueError(f"|m| must not exceed N (N={self.N}, m={self.m})")

    @property
    def n_a(self):
        return (self.N + self.m) // 2

    @property
    def n_b(self):
        return (self.N - self.m) // 2

    @classmethod
    def from_occupations(cls, n_a, n_b):
        return cls(n_a + n_b, n_a - n_b)


class OperatorMatrix:
    """Dense complex matrix on a :class:`FockBasis` of cutoff ``n_max``.

    ``hermitian`` is set when ``||M - M^dag||_F <= 1e-14 ||M||_F``.
    Supports ``+``, ``-``, scalar ``*`` and ``@`` between operators on the
    same basis.
    """

    __slots__ = ("n_max", "data", "hermitian")

    def __init__(self, n_max, data):
        data = np.asarray(data, dtype=complex)
        dim = (n_max + 1) ** 2
        if data.shape != (dim, dim):
            raise ValueError(f"matrix shape {data.shape} does not match basis dim {dim}")
        self.n_max = n_max
        self.data = data
        norm = np.linalg.norm(data)
        self.hermitian = bool(np.linalg.norm(data - data.conj().T) <= HERMITIAN_RTOL * norm)

    @property
    def dim(self):
        return self.data.shape[0]

    def dag(self):
        return OperatorMatrix(self.n_max, self.data.conj().T)

    def _check(self, other):
        if not isinstance(other, OperatorMatrix):
            return NotImplemented
        if other.n_max != self.n_max:
            raise ValueError(f"basis mismatch: n_max {self.n_max} vs {other.n_max}")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return OperatorMatrix(self.n_max, self.data + other.data)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return OperatorMatrix(self.n_max, self.data - other.data)

    def __neg__(self):
        return OperatorMatrix(self.n_max, -self.data)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return OperatorMatrix(self.n_max, scalar * self.data)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return OperatorMatrix(self.n_max, self.data / scalar)

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            self._check(other)
            return OperatorMatrix(self.n_max, self.data @ other.data)
        return self.data @ np.asarray(other)

    def __repr__(self):
        return f"OperatorMatrix(n_max={self.n_max}, hermitian={self.hermitian})"


def commutator(x, y):
    return x @ y - y @ x


# ---------------------------------------------------------------------------
# ladder operators

@lru_cache(maxsize=None)
def _lowering_1d(n_max):
    d = n_max + 1
    return sps.diags(np.sqrt(np.arange(1, d, dtype=float)), 1, shape=(d, d), format="csr")


@lru_cache(maxsize=16)
def sparse_ladder(n_max, mode):
    """Sparse two-mode lowering operator for ``mode`` in {'a', 'b'}."""
    low = _lowering_1d(n_max)
    eye = sps.identity(n_max + 1, format="csr")
    if mode == "a":
        return sps.kron(low, eye, format="csr")
    if mode == "b":
        return sps.kron(eye, low, format="csr")
    raise ValueError(f"mode must be 'a' or 'b', got {mode!r}")


def ladder_matrix(basis, mode, kind):
    """Truncated lowering (``kind='lower'``) or raising (``'raise'``) matrix.

    Raising the top occupation ``n_max`` gives zero.
    """
    low = sparse_ladder(basis.n_max, mode).toarray()
    if kind == "lower":
        return OperatorMatrix(basis.n_max, low)
    if kind == "raise":
        return OperatorMatrix(basis.n_max, low.T)
    raise ValueError(f"kind must be 'lower' or 'raise', got {kind!r}")


def fock_vector(basis, label):
    if label.n_a > basis.n_max or label.n_b > basis.n_max:
        raise CutoffError(
            f"state (n_a={label.n_a}, n_b={label.n_b}) exceeds cutoff {basis.n_max}"
        )
    v = np.zeros(basis.dim, dtype=complex)
    v[basis.index_of(label.n_a, label.n_b)] = 1.0
    return v
