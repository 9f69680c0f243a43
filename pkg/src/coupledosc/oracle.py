"""Reference values that do not depend on the algebraic construction.

The classical normal modes come from the 2x2 frequency matrix of the
coupled quadratic form; the quantum levels come from dense diagonalization
of the truncated Hamiltonian with a cutoff-convergence loop.
"""
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .algebra import _hamiltonian_sparse
from .errors import NoConvergence, UnstableError


def _classical_split(params):
    w1, w2, lam = params.omega1, params.omega2, params.lam
    mean = 0.5 * (w1 ** 2 + w2 ** 2)
    split = math.hypot(0.5 * (w1 ** 2 - w2 ** 2), 2 * lam * math.sqrt(w1 * w2))
    return mean, split


def classical_minus_squared(params):
    """Smaller eigenvalue of the frequency matrix ``[[w1^2, 2 lam sqrt(w1 w2)], [., w2^2]]``."""
    mean, split = _classical_split(params)
    return mean - split


def classical_normal_modes(params):
    """Normal-mode frequencies ``(Omega_plus, Omega_minus)``; the phase ``psi`` plays no role."""
    mean, split = _classical_split(params)
    if mean - split <= 0:
        raise UnstableError(
            f"soft mode frequency squared {mean - split:.3e} <= 0: "
            f"lambda={params.lam} is not below {params.lam_max:.6g}",
            "omega_minus",
        )
    return math.sqrt(mean + split), math.sqrt(mean - split)


def diagonalize_truncated(params, cutoff, count):
    """Lowest ``count`` eigenvalues of the Hamiltonian on a cutoff-``cutoff`` basis."""
    dim = (cutoff + 1) ** 2
    if count > dim:
        raise ValueError(f"count {count} exceeds basis dimension {dim}")
    h = _hamiltonian_sparse(params, cutoff, "physical").toarray()
    if not np.any(h.imag):
        h = h.real
    return sla.eigvalsh(h, subset_by_index=[0, count - 1], driver="evr")


@dataclass
class ConvergedLevels:
    cutoff: int
    eigenvalues: np.ndarray
    estimates: np.ndarray
    history: dict = field(default_factory=dict, repr=False)


def converged_levels(params, count, tol, start=20, step=10, stop=80):
    """Grow the cutoff until every one of the lowest ``count`` levels moves by less than ``tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    history = {}
    prev = None
    for cutoff in range(start, stop + 1, step):
        vals = diagonalize_truncated(params, cutoff, count)
        history[cutoff] = vals
        if prev is not None:
            est = np.abs(vals - prev)
            if np.all(est < tol):
                return ConvergedLevels(cutoff, vals, est, history)
        prev = vals
    raise NoConvergence(
        f"levels still moving by {np.max(est):.3e} >= {tol:.1e} at cutoff {stop}"
    )


@dataclass
class LevelMatchReport:
    pairs: list
    max_difference: float
    unmatched: int
    tol: float

    @property
    def ok(self):
        return self.unmatched == 0


def match_levels(analytic, numeric, tol):
    """Pair sorted analytic lines with sorted numeric eigenvalues position by position."""
    if len(analytic) != len(numeric):
        raise ValueError(f"length mismatch: {len(analytic)} analytic vs {len(numeric)} numeric")
    lines = sorted(analytic, key=lambda line: line.E)
    values = np.sort(np.asarray(numeric, dtype=float))
    pairs = [(line, float(v), abs(line.E - float(v))) for line, v in zip(lines, values)]
    diffs = [d for *_, d in pairs]
    return LevelMatchReport(
        pairs=pairs,
        max_difference=max(diffs, default=0.0),
        unmatched=sum(d > tol for d in diffs),
        tol=tol,
    )
