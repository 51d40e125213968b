"""Pure-loss channel on one mode of the encoded Bell state, in phase space.

The "amplitude damping" acting on the transmitted mode is modeled as a
beamsplitter of transmissivity ``eta`` mixing with vacuum: Wigner centers
contract by ``sqrt(eta)`` and every covariance picks up ``(1-eta)/2`` of
vacuum noise per quadrature.  Binned homodyne statistics of the lossy
state come from the closed-form marginal of the lossy Wigner comb.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .codes import CodeParams, LogicalLabel, approximate_codeword
from .combs import (
    DEFAULT_TOL,
    SQRT_PI,
    Comb1D,
    Comb2D,
    GaussTerm2D,
    StepFunction,
    apply_gaussian_channel,
    integrate_comb_against_step,
    marginal,
)
from .homodyne import BinnedObservable, Z_OBSERVABLE


@dataclass(frozen=True)
class ChannelParams:
    """Transmissivity of the fiber between Alice and Bob."""

    eta: float

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"transmissivity must be in (0, 1], got {self.eta}")

    @classmethod
    def from_distance(cls, distance_km: float, loss_db_per_km: float) -> "ChannelParams":
        if distance_km < 0 or loss_db_per_km < 0:
            raise ValueError("distance and loss rate must be non-negative")
        return cls(eta=10.0 ** (-distance_km * loss_db_per_km / 10.0))


@lru_cache(maxsize=512)
def wigner_of_pair(
    m: LogicalLabel,
    n: LogicalLabel,
    params: CodeParams,
    tol: float = DEFAULT_TOL,
) -> Comb2D:
    """Wigner transform of the codeword pair operator ``|m><n|``:
    ``W(q,p) = (1/pi) integral psi_m(q+y) conj(psi_n)(q-y) exp(-2ipy) dy``.

    Each pair of comb peaks (all of one common width ``w``) contributes a
    single 2D Gaussian centered between the peaks, at momentum set by the
    carrier waves, with a linear phase from the peak separation.
    """
    a = approximate_codeword(LogicalLabel(m), params, tol)
    b = approximate_codeword(LogicalLabel(n), params, tol)
    widths = {t.width for t in a.terms} | {t.width for t in b.terms}
    if len(widths) != 1:
        raise ValueError("wigner_of_pair needs a common peak width")
    w = widths.pop()
    quad = ((2.0 / w**2, 0.0), (0.0, 2.0 * w**2))
    terms = []
    for ta in a.terms:
        for tb in b.terms:
            d = ta.center - tb.center
            kbar = 0.5 * (ta.wavevector + tb.wavevector)
            amp = (
                ta.amplitude
                * np.conj(tb.amplitude)
                * (w / SQRT_PI)
                * cmath.exp(1j * d * kbar)
            )
            terms.append(
                GaussTerm2D(
                    amp,
                    (0.5 * (ta.center + tb.center), kbar),
                    quad,
                    (ta.wavevector - tb.wavevector, -d),
                )
            )
    return Comb2D(tuple(terms))


def apply_loss(w: Comb2D, ch: ChannelParams) -> Comb2D:
    """Contract by ``sqrt(eta)`` and add ``(1-eta)/2`` vacuum noise."""
    eta = ch.eta
    scale = math.sqrt(eta) * np.eye(2)
    noise = 0.5 * (1.0 - eta) * np.eye(2)
    return apply_gaussian_channel(w, scale, noise)


def lossy_step_matrix(
    m: LogicalLabel,
    n: LogicalLabel,
    params: CodeParams,
    step: StepFunction,
    quadrature: str,
    ch: ChannelParams,
    tol: float = DEFAULT_TOL,
) -> complex:
    """``Tr[ f(quadrature) . L_eta(|m><n|) ]`` for a piecewise-constant f."""
    lossy = apply_loss(wigner_of_pair(m, n, params, tol), ch)
    dens = marginal(lossy, quadrature)
    return complex(integrate_comb_against_step(dens, step, tol))


@lru_cache(maxsize=2048)
def lossy_binned_matrix(
    m: LogicalLabel,
    n: LogicalLabel,
    params: CodeParams,
    obs: BinnedObservable = Z_OBSERVABLE,
    ch: ChannelParams = ChannelParams(1.0),
    tol: float = DEFAULT_TOL,
    rescaled_bins: bool = False,
) -> complex:
    """Binned +-1 observable on the channel-evolved pair operator.

    ``rescaled_bins`` shrinks the bin lattice by ``sqrt(eta)`` to track
    the contraction of the comb under loss.  This is an exploratory
    variant, not the default binning.
    """
    step = obs.sign_step()
    if rescaled_bins:
        scale = math.sqrt(ch.eta)
        step = StepFunction(step.cell_width * scale, step.offset * scale, step.values)
    return lossy_step_matrix(
        LogicalLabel(m), LogicalLabel(n), params, step, obs.quadrature, ch, tol
    )


@lru_cache(maxsize=2048)
def lossy_outcome_matrix(
    m: LogicalLabel,
    n: LogicalLabel,
    params: CodeParams,
    obs: BinnedObservable,
    outcome: int,
    ch: ChannelParams = ChannelParams(1.0),
    tol: float = DEFAULT_TOL,
) -> complex:
    return lossy_step_matrix(
        LogicalLabel(m),
        LogicalLabel(n),
        params,
        obs.indicator_step(outcome),
        obs.quadrature,
        ch,
        tol,
    )


def lossy_binned_matrix_2x2(
    params: CodeParams,
    obs: BinnedObservable,
    ch: ChannelParams,
    tol: float = DEFAULT_TOL,
) -> np.ndarray:
    out = np.empty((2, 2), dtype=complex)
    for m in LogicalLabel:
        for n in LogicalLabel:
            out[m, n] = lossy_binned_matrix(m, n, params, obs, ch, tol)
    return out


@lru_cache(maxsize=512)
def lossy_error_probability(
    params: CodeParams, ch: ChannelParams, tol: float = DEFAULT_TOL
) -> float:
    """Odd-bin mass of the q-homodyne density of the channel-evolved
    ``|0><0|``: Bob's misidentification probability after loss."""
    from .combs import parity_indicator_bins
    from .security import error_probability

    if ch.eta == 1.0:
        return error_probability(params, tol)
    lossy = apply_loss(wigner_of_pair(LogicalLabel.ZERO, LogicalLabel.ZERO, params, tol), ch)
    dens = marginal(lossy, "q")
    p = float(integrate_comb_against_step(dens, parity_indicator_bins(1), tol).real)
    return min(max(p, 0.0), 1.0)


def rate_vs_distance(
    params: CodeParams,
    loss_db_per_km: float,
    distances_km,
    tol: float = DEFAULT_TOL,
) -> list[dict]:
    """Key-rate scan over fiber length, loss applied to Bob's mode only.

    The QBER is the probability that exactly one party misidentifies the
    codeword: Alice at her lossless error probability, Bob at the lossy
    one.  At distance 0 a row reduces exactly to the lossless key-rate
    row at the same squeezing.
    """
    from .chsh import TSIRELSON, chsh_value
    from .security import S_SLACK, binary_entropy, error_probability, holevo_bound

    rows = []
    for dist in distances_km:
        ch = ChannelParams.from_distance(float(dist), loss_db_per_km)
        s = chsh_value(params, params, ch, tol).s_value
        if TSIRELSON < s <= TSIRELSON + S_SLACK:
            s = TSIRELSON
        p_a = error_probability(params, tol)
        p_b = lossy_error_probability(params, ch, tol)
        qber = p_a + p_b - 2.0 * p_a * p_b
        rate = 1.0 - binary_entropy(qber) - holevo_bound(s)
        rows.append(
            {
                "distance_km": float(dist),
                "eta": ch.eta,
                "s_value": s,
                "p_e_alice": p_a,
                "p_e_bob": p_b,
                "qber": qber,
                "rate": rate,
                "rate_floored": max(rate, 0.0),
            }
        )
    return rows
