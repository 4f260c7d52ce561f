"""Covariance-matrix calculus for two-mode Gaussian(-characterised) states.

Quadratures are ordered (x_A, p_A, x_B, p_B) and the vacuum has unit
variance (shot-noise units).  All logarithms are base 2.

Symplectic eigenvalues are obtained from the closed two-mode formulas after
reducing the matrix to its local standard form, where the discriminant
factorises without catastrophic cancellation.  A generic eigen-solver is
deliberately not used here.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericalConsistencyError

SYMMETRY_TOL = 1e-12
PHYSICAL_TOL = 1e-9
DISCRIMINANT_TOL = 1e-9
ENTROPY_CLAMP = 1e-12

SIGMA_Z = np.diag([1.0, -1.0])


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class OneModeCM:
    """2x2 covariance matrix of a single mode."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.shape != (2, 2):
            raise DomainError(f"one-mode CM must be 2x2, got {m.shape}")
        if not np.allclose(m, m.T, rtol=0, atol=SYMMETRY_TOL):
            raise DomainError("one-mode CM is not symmetric")
        if np.any(np.diag(m) <= 0):
            raise DomainError("one-mode CM needs a positive diagonal")
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class TwoModeCM:
    """4x4 covariance matrix in (x_A, p_A, x_B, p_B) ordering.

    ``physical=True`` additionally checks that both symplectic eigenvalues
    are at least ``1 - 1e-9``.
    """

    matrix: np.ndarray
    physical: bool = field(default=False, compare=False)

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.shape != (4, 4):
            raise DomainError(f"two-mode CM must be 4x4, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise DomainError("two-mode CM has non-finite entries")
        if not np.allclose(m, m.T, rtol=0, atol=SYMMETRY_TOL):
            raise DomainError("two-mode CM is not symmetric")
        if np.any(np.diag(m) <= 0):
            raise DomainError("A and B blocks need strictly positive diagonals")
        object.__setattr__(self, "matrix", m)
        if self.physical and min(symplectic_spectrum(self)) < 1 - PHYSICAL_TOL:
            raise DomainError("CM flagged physical violates the uncertainty principle")

    @classmethod
    def from_blocks(cls, a, b, c, physical: bool = False) -> "TwoModeCM":
        a, b, c = (np.asarray(m, dtype=float) for m in (a, b, c))
        return cls(np.block([[a, c], [c.T, b]]), physical=physical)

    @classmethod
    def standard(cls, x: float, y: float, z: float) -> "TwoModeCM":
        """``A = x I``, ``B = y I``, ``C = z sigma_z``."""
        eye = np.eye(2)
        return cls.from_blocks(x * eye, y * eye, z * SIGMA_Z)

    @property
    def a(self) -> np.ndarray:
        return self.matrix[:2, :2]

    @property
    def b(self) -> np.ndarray:
        return self.matrix[2:, 2:]

    @property
    def c(self) -> np.ndarray:
        return self.matrix[:2, 2:]

    def is_physical(self) -> bool:
        return min(symplectic_spectrum(self)) >= 1 - PHYSICAL_TOL


def g_entropy(x: float) -> float:
    """Bosonic entropy function ``(x+1) log2(x+1) - x log2 x`` with ``G(0) = 0``."""
    if x < -ENTROPY_CLAMP:
        raise DomainError(f"g_entropy needs x >= 0, got {x!r}")
    if x <= 0:
        return 0.0
    return float((x + 1) * np.log2(x + 1) - x * np.log2(x))


def _is_scalar_block(m: np.ndarray) -> bool:
    return m[0, 1] == 0 and m[1, 0] == 0 and m[0, 0] == m[1, 1]


def _rotation_svd(m: np.ndarray) -> np.ndarray:
    """Signed singular values of ``m`` using proper rotations only."""
    u, s, wt = np.linalg.svd(m)
    s = s.copy()
    if np.linalg.det(u) < 0:
        s[1] = -s[1]
    if np.linalg.det(wt) < 0:
        s[1] = -s[1]
    return s


def _inv_sqrt_2x2(m: np.ndarray) -> np.ndarray:
    w, q = np.linalg.eigh(m)
    return (q / np.sqrt(w)) @ q.T


def standard_form(V: TwoModeCM) -> tuple[float, float, float, float]:
    """Local symplectic invariants ``(a, b, c1, c2)`` of ``V``.

    ``V`` is locally equivalent to ``A = a I, B = b I, C = diag(c1, c2)``.
    Matrices already in that shape are read off directly, so no rounding is
    introduced for the states this package produces.
    """
    A, B, C = V.a, V.b, V.c
    if _is_scalar_block(A) and _is_scalar_block(B) and C[0, 1] == 0 and C[1, 0] == 0:
        return float(A[0, 0]), float(B[0, 0]), float(C[0, 0]), float(C[1, 1])
    det_a = np.linalg.det(A)
    det_b = np.linalg.det(B)
    if det_a <= 0 or det_b <= 0:
        raise NumericalConsistencyError("local blocks are not positive definite")
    a, b = np.sqrt(det_a), np.sqrt(det_b)
    sa = np.sqrt(a) * _inv_sqrt_2x2(A)
    sb = np.sqrt(b) * _inv_sqrt_2x2(B)
    c1, c2 = _rotation_svd(sa @ C @ sb.T)
    return float(a), float(b), float(c1), float(c2)


def _spectrum_from_invariants(a, b, c1, c2):
    # Delta^2 - 4 det V == (a^2 - b^2)^2 + 4 (a c1 + b c2)(a c2 + b c1)
    delta = a * a + b * b + 2 * c1 * c2
    det_v = (a * b - c1 * c1) * (a * b - c2 * c2)
    disc = (a * a - b * b) ** 2 + 4 * (a * c1 + b * c2) * (a * c2 + b * c1)
    if disc < 0:
        scale = max(1.0, delta * delta)
        if disc < -DISCRIMINANT_TOL * scale:
            raise NumericalConsistencyError(f"negative symplectic discriminant {disc!r}")
        disc = 0.0
    root = np.sqrt(disc)
    hi = (delta + root) / 2
    if hi <= 0:
        raise NumericalConsistencyError("non-positive symplectic eigenvalue")
    lo = det_v / hi
    if lo <= 0:
        raise NumericalConsistencyError(f"non-positive symplectic eigenvalue, det V = {det_v!r}")
    return float(np.sqrt(hi)), float(np.sqrt(lo))


def symplectic_spectrum(V: TwoModeCM) -> tuple[float, float]:
    """Symplectic eigenvalues ``(nu_plus, nu_minus)`` of a two-mode CM."""
    return _spectrum_from_invariants(*standard_form(V))


def pt_min_symplectic(V: TwoModeCM) -> float:
    """Smallest symplectic eigenvalue of the partially transposed CM."""
    a, b, c1, c2 = standard_form(V)
    # partial transposition flips p_B, i.e. the sign of det C
    return _spectrum_from_invariants(a, b, c1, -c2)[1]


def log_negativity(V: TwoModeCM) -> float:
    """``max(0, -log2 l_min)``; zero exactly when the state is PPT."""
    l_min = pt_min_symplectic(V)
    if l_min >= 1:
        return 0.0
    return float(-np.log2(l_min))


def heterodyne_conditional(V: TwoModeCM) -> OneModeCM:
    """Mode-A CM conditioned on heterodyne detection of mode B.

    ``V_A - V_C (V_B + I)^-1 V_C^T``
    """
    A, B, C = V.a, V.b, V.c
    cond = A - C @ np.linalg.solve(B + np.eye(2), C.T)
    return OneModeCM((cond + cond.T) / 2)


def single_mode_symplectic(V1: OneModeCM) -> float:
    det = float(np.linalg.det(V1.matrix))
    if det < 0:
        raise NumericalConsistencyError(f"one-mode CM has negative determinant {det!r}")
    return float(np.sqrt(det))
