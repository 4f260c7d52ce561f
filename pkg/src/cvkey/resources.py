"""Source-state covariance matrices and mode-mismatch noise.

Resources are built at the source (Alice's lab) before any channel action:
two-mode squeezed vacuum (TMSV), k-photon-subtracted TMSV (an ancilla
beamsplitter of transmittance ``t_bs`` on mode B followed by detection of
``k`` photons in the ancilla), zero-photon catalysis (the ``k = 0``
outcome), and zero-photon catalysis whose "no click" event is contaminated
by a lost ancilla photon with probability ``p``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .gaussian import TwoModeCM

MAX_K = 20


class ResourceKind(enum.Enum):
    TMSV = "tmsv"
    SUBTRACTED = "subtracted"
    ZPC = "zpc"
    ZPC_LOSS = "zpc-loss"


@dataclass(frozen=True)
class ResourceSpec:
    """Which source state to build.

    ``k`` is only read for ``SUBTRACTED`` and ``p_loss`` only for
    ``ZPC_LOSS``.  ``t_bs`` is ignored for plain TMSV.
    """

    kind: ResourceKind
    r: float
    t_bs: float = 0.9
    k: int = 1
    p_loss: float = 0.0

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", ResourceKind(self.kind))
        if not (self.r > 0 and math.isfinite(self.r)):
            raise DomainError(f"squeezing r must be positive and finite, got {self.r!r}")
        if not 0 < self.t_bs <= 1:
            raise DomainError(f"t_bs must lie in (0, 1], got {self.t_bs!r}")
        if self.kind is ResourceKind.SUBTRACTED:
            _check_k(self.k)
        if not 0 <= self.p_loss <= 1:
            raise DomainError(f"p_loss must lie in [0, 1], got {self.p_loss!r}")

    @classmethod
    def tmsv(cls, r: float) -> "ResourceSpec":
        return cls(ResourceKind.TMSV, r)

    @classmethod
    def subtracted(cls, r: float, t_bs: float, k: int = 1) -> "ResourceSpec":
        return cls(ResourceKind.SUBTRACTED, r, t_bs, k=k)

    @classmethod
    def zpc(cls, r: float, t_bs: float, p_loss: float = 0.0) -> "ResourceSpec":
        if p_loss:
            return cls(ResourceKind.ZPC_LOSS, r, t_bs, p_loss=p_loss)
        return cls(ResourceKind.ZPC, r, t_bs)


@dataclass(frozen=True)
class MismatchParams:
    """Multimode detection parameters that set the mode-mismatch noise.

    ``n_unmatched`` (N) signal modes miss the local oscillators and are
    registered with amplitude ``epsilon``; ``m_matched`` (M) modes are
    matched to oscillators of amplitude ``alpha``; every unmatched mode
    carries ``n_bar`` photons.  ``delta_override`` short-circuits all that.
    """

    n_unmatched: int = 0
    m_matched: int = 1
    epsilon: float = 0.0
    alpha: float = 1.0
    n_bar: float = 0.0
    delta_override: Optional[float] = None

    @classmethod
    def direct(cls, delta: float) -> "MismatchParams":
        if delta < 0:
            raise DomainError(f"delta must be non-negative, got {delta!r}")
        return cls(delta_override=delta)

    @property
    def delta(self) -> float:
        return delta_from_multimode(self)


def squeezing_from_cosh2r(cosh2r: float) -> float:
    if not cosh2r > 1:
        raise DomainError(f"cosh 2r must exceed 1, got {cosh2r!r}")
    return float(np.arccosh(cosh2r) / 2)


def _check_k(k) -> None:
    if int(k) != k or not 0 <= k <= MAX_K:
        raise DomainError(f"k must be an integer in [0, {MAX_K}], got {k!r}")


def _check_r(r: float) -> None:
    if not (r > 0 and math.isfinite(r)):
        raise DomainError(f"squeezing r must be positive and finite, got {r!r}")


def tmsv(r: float) -> TwoModeCM:
    """A = B = cosh(2r) I, C = sinh(2r) sigma_z."""
    _check_r(r)
    return TwoModeCM.standard(np.cosh(2 * r), np.cosh(2 * r), np.sinh(2 * r))


def _one_minus_tau2_t(r: float, t_bs: float) -> float:
    # 1 - tanh^2(r) t == sech^2(r) + tanh^2(r) (1 - t), free of cancellation at large r
    return 1 / np.cosh(r) ** 2 + np.tanh(r) ** 2 * (1 - t_bs)


def subtracted_moments(r: float, t_bs: float, k: int) -> tuple[float, float, float]:
    """``(x, y, z)`` of the k-photon-subtracted TMSV."""
    _check_r(r)
    if not 0 < t_bs <= 1:
        raise DomainError(f"t_bs must lie in (0, 1], got {t_bs!r}")
    _check_k(k)
    tau = np.tanh(r)
    tt = tau * tau * t_bs
    denom = _one_minus_tau2_t(r, t_bs)
    x = 2 * (1 + k) / denom - 1
    y = 2 * (1 + k * tt) / denom - 1
    z = 2 * np.sqrt(t_bs) * tau * (1 + k) / denom
    return float(x), float(y), float(z)


def subtracted_tmsv(r: float, t_bs: float, k: int) -> TwoModeCM:
    """CM of TMSV after detecting ``k`` photons in the ancilla; ``k=0`` is ZPC."""
    return TwoModeCM.standard(*subtracted_moments(r, t_bs, k))


def subtraction_probability(r: float, t_bs: float, k: int) -> float:
    """Probability of registering ``k`` photons in the ancilla."""
    _check_r(r)
    if not 0 < t_bs <= 1:
        raise DomainError(f"t_bs must lie in (0, 1], got {t_bs!r}")
    if int(k) != k or k < 0:
        raise DomainError(f"k must be a non-negative integer, got {k!r}")
    tau2 = np.tanh(r) ** 2
    mu2 = np.cosh(r) ** 2
    denom = _one_minus_tau2_t(r, t_bs)
    return float((tau2 * (1 - t_bs)) ** k / (mu2 * denom ** (k + 1)))


def lost_ancilla_cm(r: float) -> TwoModeCM:
    """Mode A keeps its thermal marginal, mode B is vacuum, no correlations."""
    _check_r(r)
    return TwoModeCM.standard(np.cosh(2 * r), 1.0, 0.0)


def zpc_with_loss(r: float, t_bs: float, p: float) -> TwoModeCM:
    """Mixture ``p V_lost + (1 - p) V_zpc`` of a lost and a true ZPC event."""
    if not 0 <= p <= 1:
        raise DomainError(f"loss probability must lie in [0, 1], got {p!r}")
    mixed = p * lost_ancilla_cm(r).matrix + (1 - p) * subtracted_tmsv(r, t_bs, 0).matrix
    return TwoModeCM(mixed)


def apply_mode_mismatch(V: TwoModeCM, delta: float) -> TwoModeCM:
    """Add ``delta`` to every quadrature variance; correlations untouched."""
    if not delta >= 0:
        raise DomainError(f"delta must be non-negative, got {delta!r}")
    if delta == 0:
        return V
    return TwoModeCM(V.matrix + delta * np.eye(4))


def delta_from_multimode(mm: MismatchParams) -> float:
    """``N eps^2 n_bar / (M alpha^2)``, or the override when one is set."""
    if mm.delta_override is not None:
        if mm.delta_override < 0:
            raise DomainError(f"delta must be non-negative, got {mm.delta_override!r}")
        return float(mm.delta_override)
    if mm.m_matched == 0 or mm.alpha == 0:
        raise DomainError("matched-mode count and oscillator amplitude must be non-zero")
    if mm.n_unmatched < 0 or mm.m_matched < 0 or mm.n_bar < 0 or not 0 <= mm.epsilon <= 1:
        raise DomainError("mismatch parameters out of range")
    return float(mm.n_unmatched * mm.epsilon ** 2 * mm.n_bar / (mm.m_matched * mm.alpha ** 2))


def source_cm(spec: ResourceSpec) -> TwoModeCM:
    """Noise-free source CM for ``spec``."""
    kind = spec.kind
    if kind is ResourceKind.TMSV:
        return tmsv(spec.r)
    if kind is ResourceKind.SUBTRACTED:
        return subtracted_tmsv(spec.r, spec.t_bs, spec.k)
    if kind is ResourceKind.ZPC:
        return subtracted_tmsv(spec.r, spec.t_bs, 0)
    return zpc_with_loss(spec.r, spec.t_bs, spec.p_loss)


def noisy_source_cm(spec: ResourceSpec, delta: float) -> TwoModeCM:
    # mismatch is a detection-stage effect, so it goes on after the loss mixture
    return apply_mode_mismatch(source_cm(spec), delta)


def success_probability(spec: ResourceSpec) -> float:
    """Heralding probability of the resource (1 for TMSV).

    Reported for information only; key rates are not weighted by it.
    """
    if spec.kind is ResourceKind.TMSV:
        return 1.0
    k = spec.k if spec.kind is ResourceKind.SUBTRACTED else 0
    return subtraction_probability(spec.r, spec.t_bs, k)
