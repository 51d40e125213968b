"""Brute-force number-basis oracle, used only by tests.

Everything here is computed on a dense quadrature grid with truncated
Fock expansions: codewords are projected onto Hermite functions, binned
quadrature observables are built by direct quadrature of the bin
indicator, loss is a Kraus sum, and the Bell value is a dense 4x4
contraction.  None of this shares numerics with the comb engine; the
whole point is an independent cross-check, so slowness is fine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .codes import CodeParams, LogicalLabel, approximate_codeword
from .combs import SQRT_PI
from .loss import ChannelParams

DEFAULT_NMAX = 150
#: preparation fails if more than this norm falls above the cutoff
MAX_DISCARDED_NORM = 1e-8
#: floor on reported error bars (roundoff in the quadrature itself)
ERROR_FLOOR = 1e-10


def hermite_functions(n_max: int, x: np.ndarray) -> np.ndarray:
    """Orthonormal oscillator eigenfunctions ``phi_0 .. phi_n_max`` on a
    grid, by the stable normalized recurrence
    ``phi_{n+1} = sqrt(2/(n+1)) x phi_n - sqrt(n/(n+1)) phi_{n-1}``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros((n_max + 1, x.size))
    out[0] = math.pi ** -0.25 * np.exp(-0.5 * x * x)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for n in range(1, n_max):
        out[n + 1] = (
            math.sqrt(2.0 / (n + 1)) * x * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
        )
    return out


def _grid(n_max: int, points_per_unit: float = 256.0) -> tuple[np.ndarray, float]:
    half = math.sqrt(2.0 * n_max + 1.0) + 8.0
    n_pts = int(2 ** math.ceil(math.log2(2.0 * half * points_per_unit)))
    x = np.linspace(-half, half, n_pts)
    return x, x[1] - x[0]


@dataclass(frozen=True)
class FockVector:
    coefficients: np.ndarray
    discarded_norm: float

    @property
    def n_max(self) -> int:
        return self.coefficients.size - 1

    @property
    def error_bar(self) -> float:
        """Bound on the effect of the truncation on any bounded bilinear
        form: twice the amplitude left above the cutoff."""
        return max(2.0 * math.sqrt(max(self.discarded_norm, 0.0)), ERROR_FLOOR)


@dataclass(frozen=True)
class FockOperator:
    matrix: np.ndarray

    @property
    def n_max(self) -> int:
        return self.matrix.shape[0] - 1


def oracle_codeword(
    j: LogicalLabel, params: CodeParams, n_max: int = DEFAULT_NMAX
) -> FockVector:
    """Project the comb wavefunction onto the number basis by quadrature."""
    cw = approximate_codeword(LogicalLabel(j), params)
    x, dx = _grid(n_max)
    psi = cw(x)
    phi = hermite_functions(n_max, x)
    coeff = phi @ psi * dx
    discarded = 1.0 - float(np.sum(np.abs(coeff) ** 2))
    if discarded > MAX_DISCARDED_NORM:
        raise ValueError(
            f"cutoff n_max={n_max} keeps only {1.0 - discarded:.10f} of the norm "
            f"(discarded {discarded:.3e}); raise the cutoff"
        )
    return FockVector(coefficients=coeff, discarded_norm=discarded)


def sign_pattern(x: np.ndarray, spacing: float = SQRT_PI) -> np.ndarray:
    """(-1)^k on the bin nearest k*spacing, evaluated on a grid."""
    k = np.floor(x / spacing + 0.5).astype(int)
    return np.where(k % 2 == 0, 1.0, -1.0)


def oracle_binned_operator(quadrature: str, n_max: int = DEFAULT_NMAX) -> FockOperator:
    """Number-basis matrix of the binned +-1 quadrature observable.

    For q this is ``integral phi_m(x) sign_pattern(x) phi_n(x) dx``,
    done bin by bin with Gauss-Legendre nodes so the sign discontinuities
    never cross a quadrature panel.  The momentum eigenfunctions pick up
    ``(-i)^n`` relative to the position ones, so the p version is the
    same real integral times ``i^(m-n)``.
    """
    if quadrature not in ("q", "p"):
        raise ValueError("quadrature must be 'q' or 'p'")
    half = math.sqrt(2.0 * n_max + 1.0) + 8.0
    k_half = int(math.ceil(half / SQRT_PI + 0.5))
    # oscillation wavelength of phi_nmax is pi/sqrt(2 n_max)
    nodes_per_bin = 32 + 4 * int(math.sqrt(n_max))
    gl_x, gl_w = np.polynomial.legendre.leggauss(nodes_per_bin)
    xs, ws, signs = [], [], []
    for k in range(-k_half, k_half + 1):
        lo = (k - 0.5) * SQRT_PI
        hi = (k + 0.5) * SQRT_PI
        xs.append(0.5 * (hi - lo) * gl_x + 0.5 * (hi + lo))
        ws.append(0.5 * (hi - lo) * gl_w)
        signs.append(np.full(nodes_per_bin, -1.0 if k % 2 else 1.0))
    x = np.concatenate(xs)
    w = np.concatenate(ws)
    sgn = np.concatenate(signs)
    phi = hermite_functions(n_max, x)
    base = (phi * (w * sgn)) @ phi.T
    if quadrature == "q":
        return FockOperator(matrix=base.astype(complex))
    n = np.arange(n_max + 1)
    phase = 1j ** (n[:, None] - n[None, :])
    return FockOperator(matrix=base * phase)


def loss_kraus_operators(eta: float, n_max: int, k_max: int | None = None) -> list[np.ndarray]:
    """Kraus decomposition of the pure-loss channel on the truncated space:
    ``K_k[n-k, n] = sqrt(C(n, k) eta^(n-k) (1-eta)^k)``."""
    if not 0.0 < eta <= 1.0:
        raise ValueError("eta must be in (0, 1]")
    if k_max is None:
        k_max = n_max
    dim = n_max + 1
    ops = []
    for k in range(k_max + 1):
        mat = np.zeros((dim, dim))
        for n in range(k, dim):
            mat[n - k, n] = math.sqrt(
                special.comb(n, k, exact=True) * eta ** (n - k) * (1.0 - eta) ** k
            )
        ops.append(mat)
        if eta == 1.0:
            break
    return ops


def apply_oracle_loss(rho: np.ndarray, eta: float) -> np.ndarray:
    kraus = loss_kraus_operators(eta, rho.shape[0] - 1)
    out = np.zeros_like(rho, dtype=complex)
    for op in kraus:
        out += op @ rho @ op.conj().T
    return out


def oracle_binned_matrix(
    params: CodeParams,
    quadrature: str,
    channel: ChannelParams | None = None,
    n_max: int = DEFAULT_NMAX,
) -> tuple[np.ndarray, float]:
    """2x2 codeword-basis matrix of the binned observable, with an error
    bar from the cutoff diagnostics of the two codewords."""
    vecs = [oracle_codeword(j, params, n_max) for j in LogicalLabel]
    obs = oracle_binned_operator(quadrature, n_max).matrix
    out = np.empty((2, 2), dtype=complex)
    for m in (0, 1):
        for n in (0, 1):
            vm = vecs[m].coefficients
            vn = vecs[n].coefficients
            if channel is None or channel.eta == 1.0:
                out[m, n] = vm.conj() @ obs @ vn
            else:
                rho = np.outer(vn, vm.conj())
                out[m, n] = np.trace(obs @ apply_oracle_loss(rho, channel.eta))
    err = max(v.error_bar for v in vecs)
    return out, err


def oracle_gram(params: CodeParams, n_max: int = DEFAULT_NMAX) -> float:
    v0 = oracle_codeword(LogicalLabel.ZERO, params, n_max)
    v1 = oracle_codeword(LogicalLabel.ONE, params, n_max)
    return float(np.real(v0.coefficients.conj() @ v1.coefficients))


def oracle_chsh(
    params: CodeParams,
    channel: ChannelParams | None = None,
    n_max: int = DEFAULT_NMAX,
) -> tuple[float, float]:
    """Bell value by dense contraction; returns (S, error bar)."""
    mz_a, err_z = oracle_binned_matrix(params, "q", None, n_max)
    mx_a, err_x = oracle_binned_matrix(params, "p", None, n_max)
    mz_b, _ = oracle_binned_matrix(params, "q", channel, n_max)
    mx_b, _ = oracle_binned_matrix(params, "p", channel, n_max)
    g = oracle_gram(params, n_max)
    norm2 = 2.0 + 2.0 * g * g
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    a1 = inv_sqrt2 * (mz_a + mx_a)
    a2 = inv_sqrt2 * (mz_a - mx_a)
    s = 0.0
    for ma, mb, sign in ((a1, mz_b, 1), (a1, mx_b, 1), (a2, mz_b, 1), (a2, mx_b, -1)):
        s += sign * float(np.real(np.sum(ma * mb))) / norm2
    # each of the four correlators touches 4 matrix elements of each side
    err = 16.0 * (err_z + err_x)
    return s, err
