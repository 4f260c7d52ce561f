"""Brute-force Fock-space check of the photon-subtraction closed forms.

The TMSV is written out in a truncated number basis, mode B is mixed with a
vacuum ancilla on a beamsplitter, and the ancilla is projected onto ``|k>``.
Probabilities and second moments of the heralded state are then read off
directly, without any Gaussian formula.

Conventions: ``x = a + a^dag`` and ``p = -i (a - a^dag)`` so the vacuum
variance is 1.  The beamsplitter is the real rotation taking
``|n>_B |0>_anc`` to ``sum_j sqrt(C(n, j) t^(n-j) (1-t)^j) |n-j>_B |j>_anc``.
Phase conventions only flip the sign of the heralded ket and leave every
second moment unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from .errors import DegenerateProjectionError, DomainError, TruncationError
from .gaussian import TwoModeCM

DEFAULT_CUTOFF = 60
MAX_CUTOFF = 256
TAIL_TOL = 1e-10
TRUNCATION_TOL = 1e-12
MIN_PROBABILITY = 1e-14


@dataclass(frozen=True)
class FockState:
    """Unnormalised pure state as a ``(D,) * n_modes`` amplitude array."""

    amplitudes: np.ndarray

    @property
    def cutoff(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def tail(self) -> float:
        """Largest weight sitting on the last basis state of any mode."""
        p = np.abs(self.amplitudes) ** 2
        return max(float(np.sum(np.take(p, -1, axis=ax))) for ax in range(p.ndim))


def _tmsv_amplitudes(tau: float, cutoff: int) -> np.ndarray:
    n = np.arange(cutoff)
    psi = np.zeros((cutoff, cutoff))
    psi[n, n] = np.sqrt(1 - tau * tau) * tau ** n
    return psi


def tmsv_fock(r: float, cutoff: int = DEFAULT_CUTOFF) -> FockState:
    """``sqrt(1 - tau^2) sum_n tau^n |n, n>`` with ``tau = tanh r``.

    The cutoff is doubled (up to 256) until the truncation checks pass.
    """
    if not r >= 0:
        raise DomainError(f"squeezing must be non-negative, got {r!r}")
    tau = float(np.tanh(r))
    d = int(cutoff)
    while True:
        state = FockState(_tmsv_amplitudes(tau, d))
        if tau ** (2 * d) < TRUNCATION_TOL and state.tail() < TAIL_TOL:
            return state
        if d >= MAX_CUTOFF:
            raise TruncationError(
                f"cutoff {MAX_CUTOFF} too small for r={r:g} (tau^2D = {tau ** (2 * d):.3g})"
            )
        d = min(2 * d, MAX_CUTOFF)


def beamsplitter_vacuum_amplitudes(cutoff: int, t_bs: float) -> np.ndarray:
    """``amp[n, j] = <n-j, j| U_BS |n, 0>``; zero where ``j > n``."""
    n = np.arange(cutoff)[:, None]
    j = np.arange(cutoff)[None, :]
    return np.sqrt(binom.pmf(j, n, 1 - t_bs))


def _ladder(d: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, d)), 1)


def second_moments(psi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean vector and CM of a normalised two-mode ket ``psi[n_A, n_B]``."""
    d = psi.shape[0] + 2
    padded = np.zeros((d, d), dtype=complex)
    padded[: d - 2, : d - 2] = psi
    a = _ladder(d)
    ops = [a + a.T, -1j * (a - a.T)]
    eye = np.eye(d)

    def expect(op_a, op_b):
        return np.vdot(padded, op_a @ padded @ op_b.T)

    quads = [(q, eye) for q in ops] + [(eye, q) for q in ops]
    mean = np.array([expect(qa, qb).real for qa, qb in quads])
    cm = np.empty((4, 4))
    for i, (ai, bi) in enumerate(quads):
        for j, (aj, bj) in enumerate(quads):
            cm[i, j] = expect(ai @ aj, bi @ bj).real
    cm = 0.5 * (cm + cm.T) - np.outer(mean, mean)
    return mean, cm


@dataclass(frozen=True)
class Projection:
    prob: float
    cm: TwoModeCM
    mean: np.ndarray


def project_ancilla_full(state: FockState, t_bs: float, k: int) -> Projection:
    if not 0 < t_bs <= 1:
        raise DomainError(f"t_bs must lie in (0, 1], got {t_bs!r}")
    d = state.cutoff
    if int(k) != k or not 0 <= k < d / 2:
        raise DomainError(f"k must be an integer in [0, {d / 2:g}), got {k!r}")
    bs = beamsplitter_vacuum_amplitudes(d, t_bs)
    # <k|_anc U_BS |psi>|0>_anc: mode B drops from n to n - k
    heralded = np.zeros((d, d), dtype=complex)
    n = np.arange(k, d)
    heralded[:, n - k] = state.amplitudes[:, n] * bs[n, k]
    prob = float(np.sum(np.abs(heralded) ** 2))
    if prob < MIN_PROBABILITY:
        raise DegenerateProjectionError(f"projection onto |{k}> has probability {prob:.3g}")
    mean, cm = second_moments(heralded / np.sqrt(prob))
    return Projection(prob, TwoModeCM(cm), mean)


def project_ancilla(state: FockState, t_bs: float, k: int) -> tuple[float, TwoModeCM]:
    """Probability of ``k`` ancilla photons and the heralded state's CM."""
    res = project_ancilla_full(state, t_bs, k)
    return res.prob, res.cm


def ancilla_distribution(state: FockState, t_bs: float) -> np.ndarray:
    """Probability of every ancilla photon number ``0 .. D-1``."""
    d = state.cutoff
    bs = beamsplitter_vacuum_amplitudes(d, t_bs)
    weights = np.sum(np.abs(state.amplitudes) ** 2, axis=0)
    return weights @ (bs ** 2)
