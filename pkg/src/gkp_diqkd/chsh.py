"""CHSH correlators and the Bell-test value S for the encoded Bell state.

The four test observables are fixed linear combinations of the binned
Z-type (q) and X-type (p) homodyne observables:

    A0 = B1 = Z,  B2 = X,  A1 = (Z + X)/sqrt(2),  A2 = (Z - X)/sqrt(2).

Correlators are exact trace contractions of the 2x2 binned matrices with
the logical coefficient matrix of |Phi+>, Gram-corrected for the
non-orthogonality of approximate codewords.  A channel, when present,
acts on Bob's mode only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .codes import CodeParams, logical_bell_state
from .combs import DEFAULT_TOL
from .homodyne import X_OBSERVABLE, Z_OBSERVABLE, binned_matrix_2x2
from .loss import ChannelParams, lossy_binned_matrix_2x2

TSIRELSON = 2.0 * math.sqrt(2.0)

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


class MeasLabel(Enum):
    A0 = "A0"
    A1 = "A1"
    A2 = "A2"
    B1 = "B1"
    B2 = "B2"


#: (z, x) coefficients of each measurement in the Z/X decomposition
COEFFICIENTS: dict[MeasLabel, tuple[float, float]] = {
    MeasLabel.A0: (1.0, 0.0),
    MeasLabel.B1: (1.0, 0.0),
    MeasLabel.B2: (0.0, 1.0),
    MeasLabel.A1: (_INV_SQRT2, _INV_SQRT2),
    MeasLabel.A2: (_INV_SQRT2, -_INV_SQRT2),
}

#: the four test settings entering S, with their signs
CHSH_SETTINGS = (
    (MeasLabel.A1, MeasLabel.B1, +1.0),
    (MeasLabel.A1, MeasLabel.B2, +1.0),
    (MeasLabel.A2, MeasLabel.B1, +1.0),
    (MeasLabel.A2, MeasLabel.B2, -1.0),
)


@dataclass(frozen=True)
class EffectiveObservable:
    label: MeasLabel
    matrix: np.ndarray  # 2x2 complex Hermitian, logical codeword basis


@dataclass(frozen=True)
class ChshReport:
    correlators: dict[tuple[MeasLabel, MeasLabel], float]
    s_value: float


def _zx_matrices(
    params: CodeParams, channel: ChannelParams | None, tol: float
) -> tuple[np.ndarray, np.ndarray]:
    if channel is None or channel.eta == 1.0:
        return (
            binned_matrix_2x2(params, Z_OBSERVABLE, tol),
            binned_matrix_2x2(params, X_OBSERVABLE, tol),
        )
    return (
        lossy_binned_matrix_2x2(params, Z_OBSERVABLE, channel, tol),
        lossy_binned_matrix_2x2(params, X_OBSERVABLE, channel, tol),
    )


def effective_observable(
    label: MeasLabel,
    params: CodeParams,
    channel: ChannelParams | None = None,
    tol: float = DEFAULT_TOL,
) -> EffectiveObservable:
    mz, mx = _zx_matrices(params, channel, tol)
    u, v = COEFFICIENTS[label]
    return EffectiveObservable(label=label, matrix=u * mz + v * mx)


def _correlator(ma: np.ndarray, mb: np.ndarray, norm_squared: float) -> float:
    """``<Phi| M_A (x) M_B |Phi>`` contracted in the product codeword basis."""
    val = np.sum(ma * mb) / norm_squared
    if abs(val.imag) > 1e-9:
        raise ArithmeticError(f"correlator has spurious imaginary part {val.imag:.3e}")
    return float(val.real)


def chsh_value(
    params_a: CodeParams,
    params_b: CodeParams | None = None,
    channel: ChannelParams | None = None,
    tol: float = DEFAULT_TOL,
) -> ChshReport:
    """Evaluate all four CHSH correlators and S; loss hits Bob's mode only."""
    if params_b is None:
        params_b = params_a
    bell = logical_bell_state(params_a, params_b, tol)
    norm2 = bell.norm_squared
    mza, mxa = _zx_matrices(params_a, None, tol)
    mzb, mxb = _zx_matrices(params_b, channel, tol)

    def observable(label: MeasLabel, side: str) -> np.ndarray:
        u, v = COEFFICIENTS[label]
        return u * (mza if side == "a" else mzb) + v * (mxa if side == "a" else mxb)

    correlators = {}
    s = 0.0
    for la, lb, sign in CHSH_SETTINGS:
        c = _correlator(observable(la, "a"), observable(lb, "b"), norm2)
        correlators[(la, lb)] = c
        s += sign * c
    return ChshReport(correlators=correlators, s_value=s)


def outcome_probabilities(
    label_a: MeasLabel,
    label_b: MeasLabel,
    params_a: CodeParams,
    params_b: CodeParams | None = None,
    channel: ChannelParams | None = None,
    tol: float = DEFAULT_TOL,
) -> dict[tuple[int, int], float]:
    """Joint table ``P(a, b | label_a, label_b)`` over outcomes +-1.

    The per-outcome operators are the indicator-bin POVM combinations
    ``F_+- = (G +- M)/2`` where G plays the role of the identity in the
    non-orthonormal codeword basis.
    """
    if params_b is None:
        params_b = params_a
    if label_a not in (MeasLabel.A0, MeasLabel.A1, MeasLabel.A2):
        raise ValueError(f"{label_a} is not one of Alice's settings")
    if label_b not in (MeasLabel.B1, MeasLabel.B2):
        raise ValueError(f"{label_b} is not one of Bob's settings")
    bell = logical_bell_state(params_a, params_b, tol)
    norm2 = bell.norm_squared

    def side_matrices(label: MeasLabel, params: CodeParams, gram, lossy: bool):
        u, v = COEFFICIENTS[label]
        if lossy:
            mz = lossy_binned_matrix_2x2(params, Z_OBSERVABLE, channel, tol)
            mx = lossy_binned_matrix_2x2(params, X_OBSERVABLE, channel, tol)
        else:
            mz = binned_matrix_2x2(params, Z_OBSERVABLE, tol)
            mx = binned_matrix_2x2(params, X_OBSERVABLE, tol)
        m = u * mz + v * mx
        return {+1: 0.5 * (gram + m), -1: 0.5 * (gram - m)}

    lossy_bob = channel is not None and channel.eta != 1.0
    fa = side_matrices(label_a, params_a, bell.gram_a, lossy=False)
    fb = side_matrices(label_b, params_b, bell.gram_b, lossy=lossy_bob)
    table = {}
    for a in (+1, -1):
        for b in (+1, -1):
            p = np.sum(fa[a] * fb[b]) / norm2
            if abs(p.imag) > 1e-9:
                raise ArithmeticError("outcome probability has imaginary part")
            p = float(p.real)
            if p < -1e-9 or p > 1.0 + 1e-9:
                raise ArithmeticError(f"outcome probability {p} outside [0, 1]")
            table[(a, b)] = min(max(p, 0.0), 1.0)
    total = sum(table.values())
    if abs(total - 1.0) > 1e-9:
        raise ArithmeticError(f"outcome probabilities sum to {total}")
    return table


def chsh_flip_model(p_e: float) -> float:
    """Heuristic alternative to the trace engine: the Tsirelson value with
    each party's outcome flipped independently with probability ``p_e``."""
    if not 0.0 <= p_e <= 1.0:
        raise ValueError("p_e must be a probability")
    return TSIRELSON * (1.0 - 2.0 * p_e) ** 2
