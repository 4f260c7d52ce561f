"""Asymptotic secret key rate under reverse reconciliation.

Both parties heterodyne (no-switching).  Rates are in bits per pulse and
are *not* weighted by the heralding probability of non-Gaussian resources:
the resource is prepared offline, so each key-generation round already has
it in hand.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import channel as _channel
from .errors import NumericalConsistencyError
from .gaussian import (
    PHYSICAL_TOL,
    OneModeCM,
    TwoModeCM,
    g_entropy,
    heterodyne_conditional,
    single_mode_symplectic,
    symplectic_spectrum,
)
from .resources import MismatchParams, ResourceSpec, delta_from_multimode, noisy_source_cm

HOLEVO_CLAMP = 1e-9


@dataclass(frozen=True)
class RateBreakdown:
    i_ab: float
    chi_be: float
    key_rate: float
    raw_rate: float
    lambda1: float
    lambda2: float
    lambda3: float
    v_shared: TwoModeCM
    v_conditional: OneModeCM
    v_source: TwoModeCM | None = None
    beta: float = 1.0


def mutual_information(V: TwoModeCM) -> float:
    """Alice-Bob mutual information for double heterodyne, base-2 logs."""
    cond = heterodyne_conditional(V).matrix
    total = 0.0
    for q in (0, 1):
        marginal = (V.a[q, q] + 1) / 2
        conditional = (cond[q, q] + 1) / 2
        if marginal <= 0 or conditional <= 0:
            raise NumericalConsistencyError("non-positive measured variance")
        total += 0.5 * np.log2(marginal / conditional)
    if total < 0:
        if total < -HOLEVO_CLAMP:
            raise NumericalConsistencyError(f"negative mutual information {total!r}")
        total = 0.0
    return float(total)


def _entropy_argument(lam: float) -> float:
    if lam < 1 - PHYSICAL_TOL:
        raise NumericalConsistencyError(f"symplectic eigenvalue {lam!r} below vacuum")
    return max(0.0, (lam - 1) / 2)


def _holevo_parts(V: TwoModeCM):
    lam1, lam2 = symplectic_spectrum(V)
    cond = heterodyne_conditional(V)
    lam3 = single_mode_symplectic(cond)
    chi = (
        g_entropy(_entropy_argument(lam1))
        + g_entropy(_entropy_argument(lam2))
        - g_entropy(_entropy_argument(lam3))
    )
    if chi < 0:
        if chi < -HOLEVO_CLAMP:
            raise NumericalConsistencyError(f"negative Holevo bound {chi!r}")
        chi = 0.0
    return float(chi), lam1, lam2, lam3, cond


def holevo_bound(V: TwoModeCM) -> float:
    """Eve's information on Bob's heterodyne data: ``S(AB) - S(A|B)``."""
    return _holevo_parts(V)[0]


def rate_from_shared(V: TwoModeCM, beta: float, v_source: TwoModeCM | None = None) -> RateBreakdown:
    """Devetak-Winter rate ``max(0, beta I_AB - chi_BE)`` of a shared CM."""
    i_ab = mutual_information(V)
    chi, lam1, lam2, lam3, cond = _holevo_parts(V)
    raw = beta * i_ab - chi
    return RateBreakdown(
        i_ab=i_ab,
        chi_be=chi,
        key_rate=max(0.0, raw),
        raw_rate=raw,
        lambda1=lam1,
        lambda2=lam2,
        lambda3=lam3,
        v_shared=V,
        v_conditional=cond,
        v_source=v_source,
        beta=beta,
    )


def secret_key_rate(
    spec: ResourceSpec, mm: MismatchParams, ch: _channel.ChannelParams
) -> RateBreakdown:
    """Full pipeline: source CM, mismatch noise, channel, rates."""
    source = noisy_source_cm(spec, delta_from_multimode(mm))
    shared = _channel.transmit(source, ch)
    return rate_from_shared(shared, ch.beta, v_source=source)
