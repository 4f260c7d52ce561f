"""Fiber link and detector noise acting on Bob's mode."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError
from .gaussian import TwoModeCM

DEFAULT_LOSS_COEFF = 0.02
DEFAULT_BETA = 0.95


@dataclass(frozen=True)
class ChannelParams:
    """Link length (km), loss coefficient, detector and reconciliation efficiency.

    Transmittance is ``0.5 * 10**(-loss_coeff * length_km)``.
    """

    length_km: float = 0.0
    loss_coeff: float = DEFAULT_LOSS_COEFF
    eta: float = 1.0
    beta: float = DEFAULT_BETA

    def __post_init__(self):
        if not (self.length_km >= 0 and math.isfinite(self.length_km)):
            raise DomainError(f"length_km must be a finite value >= 0, got {self.length_km!r}")
        if not self.loss_coeff >= 0:
            raise DomainError(f"loss_coeff must be >= 0, got {self.loss_coeff!r}")
        if not 0 < self.eta <= 1:
            raise DomainError(f"eta must lie in (0, 1], got {self.eta!r}")
        if not 0 < self.beta <= 1:
            raise DomainError(f"beta must lie in (0, 1], got {self.beta!r}")

    @property
    def transmittance(self) -> float:
        return transmittance(self.length_km, self.loss_coeff)

    def with_(self, **changes) -> "ChannelParams":
        return replace(self, **changes)


def transmittance(length_km: float, loss_coeff: float = DEFAULT_LOSS_COEFF) -> float:
    if not length_km >= 0:
        raise DomainError(f"length must be non-negative, got {length_km!r}")
    return float(0.5 * 10.0 ** (-loss_coeff * length_km))


def noise_figures(T: float, eta: float) -> tuple[float, float, float]:
    """Return ``(chi_line, chi_homo, chi_tot)`` in shot-noise units."""
    if not T > 0:
        raise DomainError(f"transmittance must be positive, got {T!r}")
    if not eta > 0:
        raise DomainError(f"detector efficiency must be positive, got {eta!r}")
    chi_line = (1 - T) / T
    chi_homo = (1 - eta) / eta
    return chi_line, chi_homo, chi_line + 2 * chi_homo / T


def transmit_with(V: TwoModeCM, T: float, chi_tot: float) -> TwoModeCM:
    """Send mode B through a channel of transmittance ``T`` and total noise ``chi_tot``."""
    if not T > 0:
        raise DomainError(f"transmittance must be positive, got {T!r}")
    if not chi_tot >= 0:
        raise DomainError(f"chi_tot must be non-negative, got {chi_tot!r}")
    A, B, C = V.a, V.b, V.c
    return TwoModeCM.from_blocks(A, T * (B + chi_tot * np.eye(2)), np.sqrt(T) * C)


def transmit(V: TwoModeCM, params: ChannelParams) -> TwoModeCM:
    T = params.transmittance
    _, _, chi_tot = noise_figures(T, params.eta)
    return transmit_with(V, T, chi_tot)
