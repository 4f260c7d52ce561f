"""Asymptotic CV-QKD key rates for TMSV, photon-subtracted and zero-photon-catalysed
resources under mode-mismatch noise."""
from .analysis import (
    SweepAxis,
    SweepRow,
    SweepSpec,
    max_distance,
    min_efficiency,
    separability_threshold,
    sweep,
)
from .channel import ChannelParams, noise_figures, transmit, transmittance
from .errors import (
    ConfigError,
    CVKeyError,
    DomainError,
    NoKeyError,
    NumericalConsistencyError,
)
from .gaussian import (
    OneModeCM,
    TwoModeCM,
    g_entropy,
    heterodyne_conditional,
    log_negativity,
    pt_min_symplectic,
    single_mode_symplectic,
    symplectic_spectrum,
)
from .keyrate import RateBreakdown, holevo_bound, mutual_information, secret_key_rate
from .resources import (
    MismatchParams,
    ResourceKind,
    ResourceSpec,
    apply_mode_mismatch,
    delta_from_multimode,
    subtracted_tmsv,
    subtraction_probability,
    tmsv,
    zpc_with_loss,
)

__version__ = "0.1.0"
