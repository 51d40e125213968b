"""Key-rate and Bell-violation numerics for finitely squeezed
grid-encoded states measured by binned homodyne detection."""

from .chsh import TSIRELSON, ChshReport, MeasLabel, chsh_value, outcome_probabilities
from .codes import CodeParams, LogicalLabel, approximate_codeword, logical_bell_state
from .combs import Comb1D, Comb2D, GaussTerm1D, GaussTerm2D, TruncationError
from .homodyne import X_OBSERVABLE, Z_OBSERVABLE, BinnedObservable, bin_and_correct
from .loss import ChannelParams, rate_vs_distance
from .montecarlo import ProtocolConfig, ProtocolResult, estimate_chsh, run_protocol
from .security import (
    SecurityReport,
    binary_entropy,
    devetak_winter,
    error_probability,
    holevo_bound,
    keyrate_curve,
    security_report,
)

__version__ = "0.1.0"

__all__ = [
    "TSIRELSON",
    "ChshReport",
    "MeasLabel",
    "chsh_value",
    "outcome_probabilities",
    "CodeParams",
    "LogicalLabel",
    "approximate_codeword",
    "logical_bell_state",
    "Comb1D",
    "Comb2D",
    "GaussTerm1D",
    "GaussTerm2D",
    "TruncationError",
    "X_OBSERVABLE",
    "Z_OBSERVABLE",
    "BinnedObservable",
    "bin_and_correct",
    "ChannelParams",
    "rate_vs_distance",
    "ProtocolConfig",
    "ProtocolResult",
    "estimate_chsh",
    "run_protocol",
    "SecurityReport",
    "binary_entropy",
    "devetak_winter",
    "error_probability",
    "holevo_bound",
    "keyrate_curve",
    "security_report",
    "__version__",
]
