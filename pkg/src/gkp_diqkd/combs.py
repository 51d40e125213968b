"""Closed-form algebra over finite sums of complex Gaussian terms.

Everything downstream (codewords, binned homodyne statistics, loss
channels) is expressed with two containers:

* ``Comb1D`` -- a wavefunction (or probability density) written as a sum
  of terms ``amplitude * exp(-(x-center)^2/(2 width^2)) * exp(i k x)``.
* ``Comb2D`` -- a phase-space (Wigner-type) function written as a sum of
  terms ``amplitude * exp(-1/2 (v-center)^T A (v-center)) * exp(i b.v)``.

Units: hbar = 1, [q, p] = i, vacuum variance of each quadrature 1/2.

All operations are pure; combs are immutable after construction.
Integrals against piecewise-constant functions are evaluated with erf
sums and carry an explicit truncation-tail bound.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import special

SQRT_PI = math.sqrt(math.pi)
SQRT_2PI = math.sqrt(2.0 * math.pi)

#: Default absolute tolerance for dropped comb terms / erf intervals.
DEFAULT_TOL = 1e-12


class Representation(Enum):
    POSITION = "position"
    MOMENTUM = "momentum"


class TruncationError(RuntimeError):
    """An erf-sum truncation could not meet the requested tolerance."""

    def __init__(self, message: str, tail_bound: float):
        super().__init__(message)
        self.tail_bound = tail_bound


@dataclass(frozen=True)
class GaussTerm1D:
    """One complex-amplitude Gaussian, ``c e^{-(x-mu)^2/(2w^2)} e^{ikx}``."""

    amplitude: complex
    center: float
    width: float
    wavevector: float = 0.0

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError(f"width must be positive, got {self.width}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        u = (x - self.center) / self.width
        return self.amplitude * np.exp(-0.5 * u * u + 1j * self.wavevector * x)

    @property
    def l1_weight(self) -> float:
        """Bound on ``integral |term|``; used for pruning and tail bounds."""
        return abs(self.amplitude) * SQRT_2PI * self.width


@dataclass(frozen=True)
class Comb1D:
    terms: tuple[GaussTerm1D, ...]
    representation: Representation = Representation.POSITION

    def __post_init__(self):
        if len(self.terms) == 0:
            raise ValueError("a comb needs at least one term")

    def __len__(self):
        return len(self.terms)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for t in self.terms:
            out += t(x)
        return out

    def conjugate(self) -> "Comb1D":
        return Comb1D(
            tuple(
                GaussTerm1D(np.conj(t.amplitude), t.center, t.width, -t.wavevector)
                for t in self.terms
            ),
            self.representation,
        )

    def shifted(self, dx: float) -> "Comb1D":
        """Translate by ``dx``: psi(x) -> psi(x - dx)."""
        return Comb1D(
            tuple(
                GaussTerm1D(
                    t.amplitude * cmath.exp(-1j * t.wavevector * dx),
                    t.center + dx,
                    t.width,
                    t.wavevector,
                )
                for t in self.terms
            ),
            self.representation,
        )

    def scaled(self, factor: complex) -> "Comb1D":
        return Comb1D(
            tuple(
                GaussTerm1D(t.amplitude * factor, t.center, t.width, t.wavevector)
                for t in self.terms
            ),
            self.representation,
        )

    def norm_squared(self) -> float:
        return inner_product(self, self).real

    def normalized(self) -> "Comb1D":
        n2 = self.norm_squared()
        if n2 <= 0:
            raise ValueError("cannot normalize a comb with vanishing norm")
        return self.scaled(1.0 / math.sqrt(n2))

    def pruned(self, tol: float = DEFAULT_TOL) -> "Comb1D":
        """Drop terms whose L1 weight is below ``tol`` relative to the total."""
        total = sum(t.l1_weight for t in self.terms)
        kept = tuple(t for t in self.terms if t.l1_weight > tol * total)
        if not kept:
            kept = (max(self.terms, key=lambda t: t.l1_weight),)
        return Comb1D(kept, self.representation)


def product(a: Comb1D, b: Comb1D) -> Comb1D:
    """Pointwise product of two combs (no conjugation), term by term.

    Widths combine as ``1/w^2 = 1/w1^2 + 1/w2^2``; the cross term between
    displaced Gaussians contributes a real attenuation factor
    ``exp(-(mu1-mu2)^2 / (2 (w1^2+w2^2)))``.
    """
    if a.representation is not b.representation:
        raise ValueError("cannot multiply combs in different representations")
    out = []
    for ta in a.terms:
        for tb in b.terms:
            v1, v2 = ta.width**2, tb.width**2
            w = math.sqrt(v1 * v2 / (v1 + v2))
            mu = (ta.center * v2 + tb.center * v1) / (v1 + v2)
            damp = math.exp(-((ta.center - tb.center) ** 2) / (2.0 * (v1 + v2)))
            out.append(
                GaussTerm1D(
                    ta.amplitude * tb.amplitude * damp,
                    mu,
                    w,
                    ta.wavevector + tb.wavevector,
                )
            )
    return Comb1D(tuple(out), a.representation)


def fourier(a: Comb1D) -> Comb1D:
    """Exact Fourier transform, convention
    ``psi~(p) = (2 pi)^(-1/2) integral psi(q) exp(-i p q) dq``.

    Each term maps to one term with width ``w -> 1/w``; center and
    wavevector exchange roles up to a phase.
    """
    out = tuple(
        GaussTerm1D(
            t.amplitude * t.width * cmath.exp(1j * t.wavevector * t.center),
            t.wavevector,
            1.0 / t.width,
            -t.center,
        )
        for t in a.terms
    )
    flipped = (
        Representation.MOMENTUM
        if a.representation is Representation.POSITION
        else Representation.POSITION
    )
    return Comb1D(out, flipped)


def _full_line_integral(term: GaussTerm1D) -> complex:
    """integral of a single term over the whole real line."""
    k, w = term.wavevector, term.width
    return term.amplitude * SQRT_2PI * w * cmath.exp(1j * k * term.center - 0.5 * k * k * w * w)


def inner_product(a: Comb1D, b: Comb1D) -> complex:
    """``<a|b> = integral conj(a(x)) b(x) dx`` in closed form."""
    if a.representation is not b.representation:
        raise ValueError("cannot take inner product across representations")
    return sum(_full_line_integral(t) for t in product(a.conjugate(), b).terms)


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant function with equal cells repeating over all of R.

    Cell ``j`` covers ``[offset + j*cell_width, offset + (j+1)*cell_width)``
    and takes value ``values[j mod len(values)]``.  This represents the
    infinite periodic +-1 bin combs exactly.
    """

    cell_width: float
    offset: float
    values: tuple[float, ...]

    def __post_init__(self):
        if not self.cell_width > 0:
            raise ValueError("cell_width must be positive")
        if len(self.values) == 0:
            raise ValueError("values must be non-empty")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        j = np.floor((x - self.offset) / self.cell_width).astype(int)
        vals = np.asarray(self.values)
        return vals[np.mod(j, len(vals))]

    @property
    def max_abs(self) -> float:
        return max(abs(v) for v in self.values)


def sign_bins(spacing: float = SQRT_PI) -> StepFunction:
    """The +-1 comb: value ``(-1)^k`` on the bin nearest ``k * spacing``."""
    return StepFunction(cell_width=spacing, offset=-spacing / 2.0, values=(1.0, -1.0))


def parity_indicator_bins(parity: int, spacing: float = SQRT_PI) -> StepFunction:
    """Indicator of bins with index of the given parity (0 even, 1 odd)."""
    if parity not in (0, 1):
        raise ValueError("parity must be 0 or 1")
    vals = (1.0, 0.0) if parity == 0 else (0.0, 1.0)
    return StepFunction(cell_width=spacing, offset=-spacing / 2.0, values=vals)


def _scaled_erfc_diff(xl: np.ndarray, tau: float) -> np.ndarray:
    """``exp(-tau^2) * erfc(x - i tau)`` evaluated stably via the Faddeeva
    function: equals ``exp(-x^2 + 2 i x tau) * w(tau + i x)``.

    For x < 0 the Faddeeva argument sits in the lower half plane where
    ``w`` blows up like ``exp(x^2)``, so negative x is reflected through
    ``erfc(z) = 2 - erfc(-z)`` onto the stable branch.
    """
    x = np.asarray(xl, dtype=float)
    ax = np.abs(x)
    core = np.exp(-ax * ax + 2j * ax * tau) * special.wofz(tau + 1j * ax)
    neg = x < 0
    if np.any(neg):
        t2 = tau * tau
        limit = 2.0 * math.exp(-t2) if t2 < 700.0 else 0.0
        core = np.where(neg, limit - np.conj(core), core)
    return core


def _term_against_step(
    term: GaussTerm1D, f: StepFunction, tol: float
) -> tuple[complex, float]:
    """integral term(x) f(x) dx with truncation; returns (value, tail bound)."""
    c, mu, w, k = term.amplitude, term.center, term.width, term.wavevector
    weight = term.l1_weight * f.max_abs
    if weight <= tol:
        # whole term below tolerance (covers underflowed amplitudes too)
        return 0.0 + 0.0j, weight
    arg = tol / weight
    if arg >= 1.0:
        # whole term below tolerance
        return 0.0 + 0.0j, weight
    radius = math.sqrt(2.0) * w * special.erfcinv(arg)
    j0 = math.floor((mu - radius - f.offset) / f.cell_width)
    j1 = math.floor((mu + radius - f.offset) / f.cell_width)
    edges = f.offset + f.cell_width * np.arange(j0, j1 + 2)
    vals = np.asarray(f.values)[np.mod(np.arange(j0, j1 + 1), len(f.values))]
    x = (edges - mu) / (math.sqrt(2.0) * w)
    tau = k * w / math.sqrt(2.0)
    g = _scaled_erfc_diff(x, tau)
    pieces = g[:-1] - g[1:]
    prefac = math.sqrt(math.pi / 2.0) * w * c * cmath.exp(1j * k * mu)
    value = prefac * np.dot(vals, pieces)
    # mass left outside [edges[0], edges[-1]]
    dist = min(mu - edges[0], edges[-1] - mu)
    tail = weight * special.erfc(dist / (math.sqrt(2.0) * w))
    return complex(value), float(tail)


def integrate_comb_against_step(
    comb: Comb1D,
    f: StepFunction,
    tol: float = DEFAULT_TOL,
    return_tail: bool = False,
):
    """``integral comb(x) f(x) dx`` as an erf sum, term by term.

    Raises :class:`TruncationError` if the accumulated tail bound exceeds
    ``max(tol * n_terms, sqrt(tol))`` -- the per-term budget is ``tol``.
    """
    total = 0.0 + 0.0j
    tail = 0.0
    per_term = tol / max(len(comb.terms), 1)
    for t in comb.terms:
        v, tb = _term_against_step(t, f, per_term)
        total += v
        tail += tb
    if tail > max(10.0 * tol, 1e-9):
        raise TruncationError(
            f"erf-sum truncation tail {tail:.3e} exceeds budget for tol={tol:.1e}",
            tail,
        )
    if return_tail:
        return total, tail
    return total


def integrate_against_step(
    a: Comb1D, b: Comb1D, f: StepFunction, tol: float = DEFAULT_TOL
) -> complex:
    """``integral conj(a(x)) b(x) f(x) dx``."""
    return integrate_comb_against_step(product(a.conjugate(), b), f, tol)


def gaussian_convolve(comb: Comb1D, sigma: float) -> Comb1D:
    """Convolve with the normalized kernel ``N(0, sigma^2)`` in closed form.

    Maps ``w -> sqrt(w^2 + sigma^2)`` and damps/slows the carrier wave; the
    exact one-dimensional specialization of the Gaussian-channel formula.
    """
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if sigma == 0.0:
        return comb
    out = []
    s2 = sigma * sigma
    for t in comb.terms:
        v = t.width**2
        new_w = math.sqrt(v + s2)
        k_new = t.wavevector * v / (v + s2)
        damp = (t.width / new_w) * math.exp(-0.5 * t.wavevector**2 * (s2 * v) / (s2 + v))
        phase = cmath.exp(1j * (t.wavevector - k_new) * t.center)
        out.append(GaussTerm1D(t.amplitude * damp * phase, t.center, new_w, k_new))
    return Comb1D(tuple(out), comb.representation)


# --------------------------------------------------------------------------
# two-dimensional (phase-space) combs
# --------------------------------------------------------------------------


def _check_spd(a: np.ndarray, tol: float = 1e-14):
    if not np.allclose(a, a.T, atol=tol):
        raise ValueError("quadratic matrix must be symmetric")
    if np.linalg.eigvalsh(a).min() <= 0:
        raise ValueError("quadratic matrix must be positive definite")


@dataclass(frozen=True)
class GaussTerm2D:
    """``c exp(-1/2 (v-mu)^T A (v-mu)) exp(i b.v)`` with v = (q, p)."""

    amplitude: complex
    center: tuple[float, float]
    quadratic: tuple[tuple[float, float], tuple[float, float]]
    phase_vector: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        _check_spd(self.matrix)

    @property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.quadratic, dtype=float)

    def __call__(self, q, p):
        q = np.asarray(q, dtype=float)
        p = np.asarray(p, dtype=float)
        a = self.matrix
        uq = q - self.center[0]
        up = p - self.center[1]
        quad = a[0, 0] * uq * uq + 2.0 * a[0, 1] * uq * up + a[1, 1] * up * up
        phase = self.phase_vector[0] * q + self.phase_vector[1] * p
        return self.amplitude * np.exp(-0.5 * quad + 1j * phase)

    def integral(self) -> complex:
        """integral over the (q, p) plane in closed form."""
        a = self.matrix
        b = np.asarray(self.phase_vector)
        mu = np.asarray(self.center)
        det = np.linalg.det(a)
        quad = float(b @ np.linalg.solve(a, b))
        return (
            self.amplitude
            * (2.0 * math.pi / math.sqrt(det))
            * cmath.exp(1j * float(b @ mu) - 0.5 * quad)
        )


@dataclass(frozen=True)
class Comb2D:
    terms: tuple[GaussTerm2D, ...]

    def __len__(self):
        return len(self.terms)

    def __call__(self, q, p):
        q = np.asarray(q, dtype=float)
        out = np.zeros(np.broadcast(q, np.asarray(p)).shape, dtype=complex)
        for t in self.terms:
            out += t(q, p)
        return out

    def integral(self) -> complex:
        return sum(t.integral() for t in self.terms)

    def scaled(self, factor: complex) -> "Comb2D":
        return Comb2D(
            tuple(
                GaussTerm2D(t.amplitude * factor, t.center, t.quadratic, t.phase_vector)
                for t in self.terms
            )
        )


def apply_gaussian_channel(
    w: Comb2D, scale: np.ndarray, noise: np.ndarray
) -> Comb2D:
    """General Gaussian channel: centers map through ``scale``, then each
    term is convolved with the (possibly zero) Gaussian ``noise`` kernel.

    The scaling step is the measure-preserving pullback
    ``W(v) -> W(scale^-1 v) / |det scale|`` so the phase-space integral
    (operator trace) is unchanged.
    """
    scale = np.asarray(scale, dtype=float)
    noise = np.asarray(noise, dtype=float)
    det_s = np.linalg.det(scale)
    if abs(det_s) < 1e-300:
        raise ValueError("scale matrix is singular")
    if not np.allclose(noise, noise.T, atol=1e-14):
        raise ValueError("noise matrix must be symmetric")
    if np.linalg.eigvalsh(noise).min() < -1e-14:
        raise ValueError("noise matrix must be positive semi-definite")
    s_inv = np.linalg.inv(scale)
    eye = np.eye(2)
    out = []
    for t in w.terms:
        a = s_inv.T @ t.matrix @ s_inv
        mu = scale @ np.asarray(t.center)
        b = s_inv.T @ np.asarray(t.phase_vector)
        amp = t.amplitude / abs(det_s)
        # convolution by the noise kernel, in closed form
        m = eye + a @ noise
        a2 = np.linalg.solve(m.T, a.T).T  # (I + A N)^-1 A ... = (A^-1+N)^-1
        a2 = 0.5 * (a2 + a2.T)
        b2 = np.linalg.solve(m, b)
        cov_corr = np.linalg.solve(m.T, noise @ b)  # (N^-1 + A)^-1 b = (I+NA)^-1 N b
        amp = (
            amp
            / math.sqrt(np.linalg.det(eye + noise @ a))
            * cmath.exp(-0.5 * float(b @ cov_corr))
            * cmath.exp(1j * float((b - b2) @ mu))
        )
        out.append(
            GaussTerm2D(
                amp,
                (float(mu[0]), float(mu[1])),
                ((a2[0, 0], a2[0, 1]), (a2[1, 0], a2[1, 1])),
                (float(b2[0]), float(b2[1])),
            )
        )
    return Comb2D(tuple(out))


def marginal(w: Comb2D, axis: str) -> Comb1D:
    """Integrate out one quadrature; returns the 1D density comb.

    ``axis='q'`` keeps q (integrates over p) and vice versa.
    """
    if axis not in ("q", "p"):
        raise ValueError("axis must be 'q' or 'p'")
    keep, drop = (0, 1) if axis == "q" else (1, 0)
    out = []
    for t in w.terms:
        a = t.matrix
        akk, add, akd = a[keep, keep], a[drop, drop], a[keep, drop]
        bk = t.phase_vector[keep]
        bd = t.phase_vector[drop]
        muk = t.center[keep]
        mud = t.center[drop]
        inv_w2 = akk - akd * akd / add
        if inv_w2 <= 0:
            raise ValueError("marginal of a non-normalizable term")
        width = 1.0 / math.sqrt(inv_w2)
        wavevector = bk - akd * bd / add
        amp = (
            t.amplitude
            * math.sqrt(2.0 * math.pi / add)
            * math.exp(-0.5 * bd * bd / add)
            * cmath.exp(1j * (bd * mud + (akd * bd / add) * muk))
        )
        out.append(GaussTerm1D(amp, muk, width, wavevector))
    rep = Representation.POSITION if axis == "q" else Representation.MOMENTUM
    return Comb1D(tuple(out), rep)
