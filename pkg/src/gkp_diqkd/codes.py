"""Approximate GKP codewords, the encoded Bell state, and gate metadata.

A codeword is a comb of Gaussian peaks at ``(2s+j) sqrt(pi)`` with peak
width ``delta_eff`` under a Gaussian envelope of width ``1/kappa``.  The
default construction samples the envelope at the peak centers (scaling
each peak by a constant factor); the exact product form is available
behind ``exact_envelope=True`` for sensitivity checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from functools import lru_cache

import numpy as np

from .combs import (
    DEFAULT_TOL,
    SQRT_PI,
    Comb1D,
    GaussTerm1D,
    Representation,
    inner_product,
)

#: stabilizers are shift operators by this amount in q and p
STABILIZER_SHIFT = 2.0 * SQRT_PI
#: logical Pauli shifts
LOGICAL_SHIFT = SQRT_PI


class LogicalLabel(IntEnum):
    ZERO = 0
    ONE = 1


@dataclass(frozen=True)
class CodeParams:
    """Envelope and peak widths of an approximate codeword.

    ``kappa`` is the inverse envelope width, ``delta_state`` the intrinsic
    peak width of the prepared state and ``delta_det`` the homodyne
    Gaussian acceptance; the two peak widths fold in quadrature into
    ``delta_eff``.
    """

    kappa: float
    delta_state: float
    delta_det: float = 0.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        if not self.delta_state >= 0:
            raise ValueError("delta_state must be non-negative")
        if self.delta_det < 0:
            raise ValueError("delta_det must be non-negative")
        if self.delta_eff <= 0:
            raise ValueError("effective peak width must be positive")

    @property
    def delta_eff(self) -> float:
        return math.hypot(self.delta_state, self.delta_det)

    @property
    def envelope_warning(self) -> bool:
        """The closed-form error bound assumes ``kappa sqrt(pi) << 1``."""
        return self.kappa * SQRT_PI >= 0.5

    @property
    def squeezing_db(self) -> float:
        """Squeezing in dB relative to vacuum; 0 dB is the vacuum."""
        return -20.0 * math.log10(self.kappa)

    @classmethod
    def from_squeezing_db(
        cls, sq_db: float, delta_state: float | None = None, delta_det: float = 0.0
    ) -> "CodeParams":
        """``kappa = 10^(-sq_db/20)``; with ``delta_state=None`` the
        symmetric rule ``delta = kappa`` is applied."""
        kappa = 10.0 ** (-sq_db / 20.0)
        if delta_state is None:
            delta_state = kappa
        return cls(kappa=kappa, delta_state=delta_state, delta_det=delta_det)


def squeezed_vacuum(kappa: float) -> Comb1D:
    """``psi(q) = pi^(-1/4) kappa^(1/2) exp(-q^2 kappa^2 / 2)``."""
    amp = math.pi ** -0.25 * math.sqrt(kappa)
    return Comb1D((GaussTerm1D(amp, 0.0, 1.0 / kappa),))


@lru_cache(maxsize=512)
def approximate_codeword(
    j: LogicalLabel,
    params: CodeParams,
    tol: float = DEFAULT_TOL,
    exact_envelope: bool = False,
) -> Comb1D:
    """Normalized q-representation comb for codeword ``j``.

    Default: peaks of width ``delta_eff`` at ``(2s+j) sqrt(pi)`` with real
    amplitudes ``exp(-kappa^2 center^2 / 2)`` (envelope sampled at the
    peak).  With ``exact_envelope`` the full product of envelope and peak
    Gaussians is kept: peaks narrow to ``delta/sqrt(1+kappa^2 delta^2)``
    and slide toward the origin by the same factor.
    """
    j = LogicalLabel(j)
    kappa = params.kappa
    delta = params.delta_eff
    # envelope weight below tol contributes nothing after normalization
    s_max = int(math.ceil(math.sqrt(2.0 * math.log(1.0 / tol)) / (kappa * STABILIZER_SHIFT))) + 1
    terms = []
    shrink = 1.0 + (kappa * delta) ** 2
    for s in range(-s_max, s_max + 1):
        c = (2 * s + int(j)) * SQRT_PI
        if exact_envelope:
            amp = math.exp(-0.5 * kappa**2 * c**2 / shrink)
            terms.append(GaussTerm1D(amp, c / shrink, delta / math.sqrt(shrink)))
        else:
            amp = math.exp(-0.5 * kappa**2 * c**2)
            terms.append(GaussTerm1D(amp, c, delta))
    comb = Comb1D(tuple(terms)).pruned(tol)
    return comb.normalized()


@lru_cache(maxsize=512)
def gram_matrix(params: CodeParams, tol: float = DEFAULT_TOL) -> np.ndarray:
    """``G[m][n] = <m|n>`` for the normalized approximate codewords."""
    zero = approximate_codeword(LogicalLabel.ZERO, params, tol)
    one = approximate_codeword(LogicalLabel.ONE, params, tol)
    g = inner_product(zero, one).real
    return np.array([[1.0, g], [g, 1.0]])


@dataclass(frozen=True)
class BellDescriptor:
    """The encoded ``|Phi+> = (|00> + |11>)/sqrt(2)`` in the product
    codeword basis, with Gram-matrix bookkeeping for non-orthogonality."""

    params_a: CodeParams
    params_b: CodeParams
    codewords_a: tuple[Comb1D, Comb1D]
    codewords_b: tuple[Comb1D, Comb1D]
    gram_a: np.ndarray
    gram_b: np.ndarray

    @property
    def norm_squared(self) -> float:
        """``<Phi|Phi>`` for the unnormalized ``|00> + |11>``."""
        return float(2.0 + 2.0 * self.gram_a[0, 1] * self.gram_b[0, 1])

    @property
    def coefficient_vector(self) -> np.ndarray:
        """Coefficients of |Phi+> over (|00>, |01>, |10>, |11>), normalized."""
        v = np.array([1.0, 0.0, 0.0, 1.0])
        return v / math.sqrt(self.norm_squared)

    @property
    def coefficient_matrix(self) -> np.ndarray:
        """4x4 logical coefficient matrix of ``|Phi+><Phi+|``."""
        v = self.coefficient_vector
        return np.outer(v, v)

    def density_trace(self) -> float:
        """Trace of the Gram-weighted density matrix; 1 by construction."""
        overlap = np.kron(self.gram_a, self.gram_b)
        return float(np.real(np.sum(self.coefficient_matrix * overlap)))


def logical_bell_state(
    params_a: CodeParams, params_b: CodeParams, tol: float = DEFAULT_TOL
) -> BellDescriptor:
    return BellDescriptor(
        params_a=params_a,
        params_b=params_b,
        codewords_a=(
            approximate_codeword(LogicalLabel.ZERO, params_a, tol),
            approximate_codeword(LogicalLabel.ONE, params_a, tol),
        ),
        codewords_b=(
            approximate_codeword(LogicalLabel.ZERO, params_b, tol),
            approximate_codeword(LogicalLabel.ONE, params_b, tol),
        ),
        gram_a=gram_matrix(params_a, tol),
        gram_b=gram_matrix(params_b, tol),
    )


# --------------------------------------------------------------------------
# gate metadata (gates are perfect logical operations in this model)
# --------------------------------------------------------------------------


class GateName(Enum):
    H = "H"
    P = "P"
    Z = "Z"
    X = "X"
    T = "T"
    CNOT = "CNOT"


@dataclass(frozen=True)
class GateMetadata:
    name: GateName
    clifford: bool
    #: linear symplectic action on (q, p) per mode, None for non-Clifford
    symplectic: tuple[tuple[float, ...], ...] | None
    #: affine displacement in phase space (encoded Pauli shifts)
    displacement: tuple[float, ...] | None
    #: action on the encoded two-level space
    logical: tuple[tuple[complex, ...], ...]

    @property
    def symplectic_matrix(self) -> np.ndarray | None:
        return None if self.symplectic is None else np.asarray(self.symplectic, float)

    @property
    def logical_matrix(self) -> np.ndarray:
        return np.asarray(self.logical, complex)


_INV_SQRT2 = 1.0 / math.sqrt(2.0)

GATES: dict[GateName, GateMetadata] = {
    # H: (q, p) -> (p, -q)
    GateName.H: GateMetadata(
        GateName.H,
        clifford=True,
        symplectic=((0.0, 1.0), (-1.0, 0.0)),
        displacement=(0.0, 0.0),
        logical=((_INV_SQRT2, _INV_SQRT2), (_INV_SQRT2, -_INV_SQRT2)),
    ),
    # P: (q, p) -> (q, p - q)
    GateName.P: GateMetadata(
        GateName.P,
        clifford=True,
        symplectic=((1.0, 0.0), (-1.0, 1.0)),
        displacement=(0.0, 0.0),
        logical=((1.0, 0.0), (0.0, 1.0j)),
    ),
    # Z: momentum shift exp(i q sqrt(pi))
    GateName.Z: GateMetadata(
        GateName.Z,
        clifford=True,
        symplectic=((1.0, 0.0), (0.0, 1.0)),
        displacement=(0.0, LOGICAL_SHIFT),
        logical=((1.0, 0.0), (0.0, -1.0)),
    ),
    # X: position shift exp(-i p sqrt(pi))
    GateName.X: GateMetadata(
        GateName.X,
        clifford=True,
        symplectic=((1.0, 0.0), (0.0, 1.0)),
        displacement=(LOGICAL_SHIFT, 0.0),
        logical=((0.0, 1.0), (1.0, 0.0)),
    ),
    GateName.T: GateMetadata(
        GateName.T,
        clifford=False,
        symplectic=None,
        displacement=None,
        logical=((1.0, 0.0), (0.0, complex(math.cos(math.pi / 4), math.sin(math.pi / 4)))),
    ),
    # CNOT: (q1, p1, q2, p2) -> (q1, p1 - p2, q1 + q2, p2)
    GateName.CNOT: GateMetadata(
        GateName.CNOT,
        clifford=True,
        symplectic=(
            (1.0, 0.0, 0.0, 0.0),
            (0.0, 1.0, 0.0, -1.0),
            (1.0, 0.0, 1.0, 0.0),
            (0.0, 0.0, 0.0, 1.0),
        ),
        displacement=(0.0, 0.0, 0.0, 0.0),
        logical=(
            (1.0, 0.0, 0.0, 0.0),
            (0.0, 1.0, 0.0, 0.0),
            (0.0, 0.0, 0.0, 1.0),
            (0.0, 0.0, 1.0, 0.0),
        ),
    ),
}
