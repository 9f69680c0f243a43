"""Closed-form energy spectrum ``E = A (N+1)/2 + B m/2``.

``A`` and ``B`` are assembled from the algebraic cosh/sinh expressions of the
third-stage squeeze angles. Nothing here calls the tilting module, so the two
routes to the diagonal form can check each other.
"""
import math
from dataclasses import dataclass

from .errors import DomainError
from .fock import FockStateLabel


@dataclass(frozen=True)
class DiagonalCoefficients:
    A: float
    B: float

    @property
    def omega_plus(self):
        return 0.5 * (self.A + self.B)

    @property
    def omega_minus(self):
        return 0.5 * (self.A - self.B)


@dataclass(frozen=True)
class SpectrumLine:
    N: int
    m: int
    E: float

    @property
    def n1(self):
        return (self.N + self.m) // 2

    @property
    def n2(self):
        return (self.N - self.m) // 2


def _cosh_sinh(den, lam2, which):
    radicand = den ** 2 - lam2 ** 2
    if den <= 0 or radicand <= 0:
        raise DomainError(f"no real squeeze angle for {which}: stability region exceeded", which)
    root = math.sqrt(radicand)
    return den / root, -lam2 / root


def closed_form_coefficients(params):
    """``A`` and ``B`` of the diagonal Hamiltonian ``A K0 + B J0``."""
    w1, w2, lam = params.omega1, params.omega2, params.lam
    s = (w1 + w2) ** 2 - 4 * lam ** 2
    if s <= 0:
        raise DomainError("(omega1 + omega2)^2 - 4 lambda^2 must be positive", "tau")
    r = math.sqrt(4 * lam ** 2 * (w1 + w2) ** 2 + (w1 - w2) ** 2 * s)
    lam2 = 4 * lam ** 2
    cha, sha = _cosh_sinh(s + r, lam2, "theta_a")
    chb, shb = _cosh_sinh(s - r, lam2, "theta_b")
    root_s = math.sqrt(s)
    ratio = r / root_s
    squeeze = lam2 / root_s
    a = 0.5 * (root_s * (cha + chb) + ratio * (cha - chb) + squeeze * (sha + shb))
    b = 0.5 * (root_s * (cha - chb) + ratio * (cha + chb) + squeeze * (sha - shb))
    return DiagonalCoefficients(a, b)


def energy(params, N, m):
    """Energy of the level labelled ``|N, m>``."""
    label = FockStateLabel(N, m)
    c = closed_form_coefficients(params)
    return c.A * (label.N + 1) / 2 + c.B * label.m / 2


def normal_modes_analytic(params):
    c = closed_form_coefficients(params)
    return c.omega_plus, c.omega_minus


def _levels_up_to(coeffs, n_scan):
    lines = []
    for N in range(n_scan + 1):
        for m in range(-N, N + 1, 2):
            lines.append(SpectrumLine(N, m, coeffs.A * (N + 1) / 2 + coeffs.B * m / 2))
    lines.sort(key=lambda line: (line.E, line.N, line.m))
    return lines


def enumerate_levels(params, count):
    """The ``count`` lowest levels, ascending in energy, ties by ``N`` then ``m``.

    The scanned range of ``N`` doubles until the ``count``-th energy lies
    below the smallest energy any unscanned ``N`` could reach.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    coeffs = closed_form_coefficients(params)
    n_scan = max(4, int(math.isqrt(2 * count)) + 1)
    while True:
        lines = _levels_up_to(coeffs, n_scan)
        if len(lines) >= count:
            # every level with N > n_scan has E >= (n_scan + 2) * Omega_minus
            floor = (n_scan + 2) * coeffs.omega_minus
            if lines[count - 1].E <= floor:
                return lines[:count]
        n_scan *= 2


def isotropic_coefficients(omega, lam):
    """``A`` and ``B`` from the equal-frequency expressions (``omega1 = omega2 = omega``)."""
    base = omega ** 2 - lam ** 2
    if base <= 0:
        raise DomainError("omega^2 - lambda^2 must be positive", "tau")
    cha, sha = _cosh_sinh(base + omega * lam, lam ** 2, "theta_a")
    chb, shb = _cosh_sinh(base - omega * lam, lam ** 2, "theta_b")
    root = math.sqrt(base)
    cross = omega * lam / root
    squeeze = lam ** 2 / root
    a = root * (cha + chb) + cross * (cha - chb) + squeeze * (sha + shb)
    b = root * (cha - chb) + cross * (cha + chb) + squeeze * (sha - shb)
    return DiagonalCoefficients(a, b)
