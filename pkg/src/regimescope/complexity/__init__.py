"""Complexity measures for scalar series."""

from .entropy import (
    EntropyReport,
    entropy_report,
    permutation_entropy_norm,
    sample_entropy,
    shannon_entropy_norm,
    tsallis_entropy_norm,
)
from .hurst import HurstCurve, generalized_hurst
from .lyapunov import LyapunovReport, ks_entropy, ky_dimension, lyapunov_spectrum
from .profile import ComplexityProfile, ProfileEntry, complexity_profile

__all__ = [
    "ComplexityProfile",
    "EntropyReport",
    "HurstCurve",
    "LyapunovReport",
    "ProfileEntry",
    "complexity_profile",
    "entropy_report",
    "generalized_hurst",
    "ks_entropy",
    "ky_dimension",
    "lyapunov_spectrum",
    "permutation_entropy_norm",
    "sample_entropy",
    "shannon_entropy_norm",
    "tsallis_entropy_norm",
]
