"""Homodyne measurement model for encoded states.

Covers the ideal quadrature PVM, the Gaussian-acceptance POVM, the
mod-2*sqrt(pi) measurement used for state preparation, classical
error-correction binning to the nearest ``k sqrt(pi)``, and the binned
+-1 observables whose 2x2 logical matrices feed the CHSH engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .codes import CodeParams, LogicalLabel, approximate_codeword
from .combs import (
    DEFAULT_TOL,
    SQRT_PI,
    Comb1D,
    GaussTerm1D,
    Representation,
    StepFunction,
    fourier,
    gaussian_convolve,
    integrate_comb_against_step,
    parity_indicator_bins,
    product,
    sign_bins,
)


@dataclass(frozen=True)
class BinnedObservable:
    """A +-1 observable: homodyne one quadrature, bin to the nearest
    ``k * bin_spacing``, report ``(-1)^k``."""

    quadrature: str  # "q" or "p"
    bin_spacing: float = SQRT_PI

    def __post_init__(self):
        if self.quadrature not in ("q", "p"):
            raise ValueError("quadrature must be 'q' or 'p'")
        if not self.bin_spacing > 0:
            raise ValueError("bin_spacing must be positive")

    def outcome(self, k: int) -> int:
        return -1 if k % 2 else 1

    def sign_step(self) -> StepFunction:
        return sign_bins(self.bin_spacing)

    def indicator_step(self, outcome: int) -> StepFunction:
        if outcome not in (+1, -1):
            raise ValueError("outcome must be +1 or -1")
        return parity_indicator_bins(0 if outcome == 1 else 1, self.bin_spacing)


#: Z-type measurement: q-homodyne with sqrt(pi) bins
Z_OBSERVABLE = BinnedObservable("q")
#: X-type measurement: p-homodyne, mirror convention
X_OBSERVABLE = BinnedObservable("p")


@dataclass(frozen=True)
class HomodyneSample:
    raw_value: float
    corrected_bin: int
    logical_outcome: int


def bin_and_correct(raw: float, spacing: float = SQRT_PI) -> HomodyneSample:
    """Round to the nearest ``k * spacing``; ties at half-bin boundaries go
    to the even bin (round-half-to-even, a measure-zero determinism rule)."""
    if not math.isfinite(raw):
        raise ValueError("raw homodyne value must be finite")
    k = int(np.round(raw / spacing))
    return HomodyneSample(raw_value=raw, corrected_bin=k, logical_outcome=-1 if k % 2 else 1)


def density_comb(state: Comb1D) -> Comb1D:
    """``|psi(x)|^2`` as a comb, including all cross terms."""
    return product(state.conjugate(), state)


def povm_element_weight(x: float, state: Comb1D, delta_det: float) -> float:
    """Outcome density of the Gaussian-acceptance homodyne POVM:
    ``(2 pi delta^2)^(-1/2) integral exp(-(x-y)^2/(2 delta^2)) |psi(y)|^2 dy``.

    ``delta_det = 0`` falls back to the ideal PVM density ``|psi(x)|^2``.
    """
    dens = density_comb(state)
    if delta_det > 0:
        dens = gaussian_convolve(dens, delta_det)
    return float(np.real(dens(np.asarray(x))))


def mod_measurement_projection(
    state: Comb1D,
    outcome_x: float,
    delta_det: float,
    tol: float = DEFAULT_TOL,
) -> Comb1D:
    """Post-measurement state of the ``q mod 2 sqrt(pi)`` measurement with
    Gaussian acceptance: multiply by the comb of acceptance windows at
    ``outcome_x + 2 s sqrt(pi)`` and renormalize."""
    if not delta_det > 0:
        raise ValueError("the acceptance width must be positive")
    if state.representation is not Representation.POSITION:
        raise ValueError("projection is defined on q-representation states")
    # windows must cover the support of the state
    radius = max(
        abs(t.center) + t.width * math.sqrt(2.0 * math.log(1.0 / tol)) for t in state.terms
    )
    spacing = 2.0 * SQRT_PI
    s_max = int(math.ceil((radius + abs(outcome_x)) / spacing)) + 1
    windows = Comb1D(
        tuple(
            GaussTerm1D(1.0, outcome_x + s * spacing, delta_det)
            for s in range(-s_max, s_max + 1)
        )
    )
    projected = product(state, windows).pruned(tol)
    norm2 = projected.norm_squared()
    if norm2 < tol:
        raise ValueError(
            f"outcome {outcome_x} has probability weight {norm2:.3e}; "
            "conditioning on a null event"
        )
    return projected.normalized()


def _codeword_in_quadrature(
    label: LogicalLabel, params: CodeParams, quadrature: str, tol: float
) -> Comb1D:
    cw = approximate_codeword(label, params, tol)
    return cw if quadrature == "q" else fourier(cw)


@lru_cache(maxsize=2048)
def binned_matrix(
    m: LogicalLabel,
    n: LogicalLabel,
    params: CodeParams,
    obs: BinnedObservable = Z_OBSERVABLE,
    tol: float = DEFAULT_TOL,
) -> complex:
    """``<m| O |n>`` for the binned +-1 observable, via erf sums.

    For the p-quadrature observable the codewords are Fourier transformed
    first; the bin comb is the same +-1 pattern with sqrt(pi) spacing.
    """
    a = _codeword_in_quadrature(LogicalLabel(m), params, obs.quadrature, tol)
    b = _codeword_in_quadrature(LogicalLabel(n), params, obs.quadrature, tol)
    dens = product(a.conjugate(), b)
    return complex(integrate_comb_against_step(dens, obs.sign_step(), tol))


@lru_cache(maxsize=2048)
def outcome_matrix(
    m: LogicalLabel,
    n: LogicalLabel,
    params: CodeParams,
    obs: BinnedObservable,
    outcome: int,
    tol: float = DEFAULT_TOL,
) -> complex:
    """Per-outcome POVM analogue of :func:`binned_matrix`: the bin comb is
    replaced by the indicator of the bins mapping to ``outcome``."""
    a = _codeword_in_quadrature(LogicalLabel(m), params, obs.quadrature, tol)
    b = _codeword_in_quadrature(LogicalLabel(n), params, obs.quadrature, tol)
    dens = product(a.conjugate(), b)
    return complex(integrate_comb_against_step(dens, obs.indicator_step(outcome), tol))


def binned_matrix_2x2(
    params: CodeParams,
    obs: BinnedObservable = Z_OBSERVABLE,
    tol: float = DEFAULT_TOL,
) -> np.ndarray:
    """The full 2x2 logical matrix of the binned observable."""
    out = np.empty((2, 2), dtype=complex)
    for m in LogicalLabel:
        for n in LogicalLabel:
            out[m, n] = binned_matrix(m, n, params, obs, tol)
    return out
