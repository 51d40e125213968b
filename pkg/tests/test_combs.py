"""The Gaussian-term algebra against brute-force grid quadrature."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gkp_diqkd.combs import (
    Comb1D,
    Comb2D,
    GaussTerm1D,
    GaussTerm2D,
    Representation,
    StepFunction,
    TruncationError,
    apply_gaussian_channel,
    fourier,
    gaussian_convolve,
    inner_product,
    integrate_comb_against_step,
    marginal,
    parity_indicator_bins,
    product,
    sign_bins,
)

from conftest import dense_grid


def random_comb(rng, n_terms=3, rep=Representation.POSITION):
    terms = tuple(
        GaussTerm1D(
            complex(rng.normal(), rng.normal()),
            rng.uniform(-3, 3),
            rng.uniform(0.3, 2.0),
            rng.uniform(-3, 3),
        )
        for _ in range(n_terms)
    )
    return Comb1D(terms, rep)


# ---------------------------------------------------------------- 1D algebra


def test_product_matches_pointwise():
    rng = np.random.default_rng(1)
    a = random_comb(rng)
    b = random_comb(rng)
    x = np.linspace(-8, 8, 1001)
    assert np.allclose(product(a, b)(x), a(x) * b(x), atol=1e-12)


def test_product_rejects_mixed_representations():
    rng = np.random.default_rng(2)
    a = random_comb(rng)
    b = random_comb(rng, rep=Representation.MOMENTUM)
    with pytest.raises(ValueError):
        product(a, b)


def test_fourier_matches_fft():
    rng = np.random.default_rng(3)
    a = random_comb(rng)
    n = 1 << 16
    x = np.linspace(-60, 60, n, endpoint=False)
    dx = x[1] - x[0]
    psi = a(x)
    p = 2 * math.pi * np.fft.fftfreq(n, dx)
    ft = np.fft.fft(psi) * dx / math.sqrt(2 * math.pi)
    ft *= np.exp(-1j * p * x[0])
    order = np.argsort(p)
    p, ft = p[order], ft[order]
    sel = np.abs(p) < 8
    assert np.allclose(fourier(a)(p[sel]), ft[sel], atol=1e-9)


def test_fourier_parseval():
    rng = np.random.default_rng(4)
    a = random_comb(rng)
    assert inner_product(a, a).real == pytest.approx(
        inner_product(fourier(a), fourier(a)).real, abs=1e-10
    )


def test_inner_product_matches_quadrature():
    rng = np.random.default_rng(5)
    a = random_comb(rng)
    b = random_comb(rng)
    x, dx = dense_grid(40.0)
    ref = np.sum(np.conj(a(x)) * b(x)) * dx
    assert inner_product(a, b) == pytest.approx(ref, abs=1e-10)


def test_conjugate_shift_scale():
    rng = np.random.default_rng(6)
    a = random_comb(rng)
    x = np.linspace(-5, 5, 301)
    assert np.allclose(a.conjugate()(x), np.conj(a(x)))
    assert np.allclose(a.shifted(1.3)(x), a(x - 1.3))
    assert np.allclose(a.scaled(2j)(x), 2j * a(x))


def test_normalized():
    rng = np.random.default_rng(7)
    a = random_comb(rng).normalized()
    assert a.norm_squared() == pytest.approx(1.0, abs=1e-12)


def test_gaussian_convolve_matches_direct():
    rng = np.random.default_rng(8)
    a = random_comb(rng)
    sigma = 0.7
    x, dx = dense_grid(40.0)
    half = int(6 * sigma / dx)
    kernel_x = np.arange(-half, half + 1) * dx  # exactly centered on 0
    kernel = np.exp(-0.5 * (kernel_x / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
    direct = np.convolve(a(x), kernel, mode="same") * dx
    conv = gaussian_convolve(a, sigma)(x)
    sel = np.abs(x) < 10
    assert np.allclose(conv[sel], direct[sel], atol=1e-8)


def test_gaussian_convolve_zero_sigma_is_identity():
    rng = np.random.default_rng(9)
    a = random_comb(rng)
    assert gaussian_convolve(a, 0.0) is a


# ------------------------------------------------------------ step integrals


def bin_quadrature_reference(dens, spacing, half=40.0, nodes=64):
    """Independent oracle: Gauss-Legendre panel per +-1 bin, so the sign
    jumps never sit inside a quadrature panel."""
    gl_x, gl_w = np.polynomial.legendre.leggauss(nodes)
    k_half = int(math.ceil(half / spacing))
    total = 0.0 + 0.0j
    for k in range(-k_half, k_half + 1):
        lo, hi = (k - 0.5) * spacing, (k + 0.5) * spacing
        xs = 0.5 * (hi - lo) * gl_x + 0.5 * (hi + lo)
        ws = 0.5 * (hi - lo) * gl_w
        total += (1 if k % 2 == 0 else -1) * np.sum(dens(xs) * ws)
    return total


def test_step_integral_matches_quadrature():
    rng = np.random.default_rng(10)
    a = random_comb(rng)
    dens = product(a.conjugate(), a)
    ref = bin_quadrature_reference(dens, math.sqrt(math.pi))
    val = integrate_comb_against_step(dens, sign_bins())
    assert val == pytest.approx(ref, abs=1e-10)


def test_step_integral_parity_split():
    """even mass + odd mass = total mass."""
    rng = np.random.default_rng(11)
    a = random_comb(rng).normalized()
    dens = product(a.conjugate(), a)
    even = integrate_comb_against_step(dens, parity_indicator_bins(0))
    odd = integrate_comb_against_step(dens, parity_indicator_bins(1))
    assert (even + odd).real == pytest.approx(1.0, abs=1e-10)
    assert abs((even + odd).imag) < 1e-10


def test_step_integral_tail_reporting():
    term = GaussTerm1D(1.0, 0.0, 1.0)
    comb = Comb1D((term,))
    val, tail = integrate_comb_against_step(comb, sign_bins(), tol=1e-12, return_tail=True)
    assert tail < 1e-11
    assert abs(val.imag) < 1e-14


def test_tail_budget_holds_by_construction():
    """Per-term truncation radii adapt to the tolerance, so the summed
    tail always lands inside the budget; the TruncationError escape
    hatch stays unexercised on well-formed input."""
    terms = tuple(GaussTerm1D(1e-6, 0.1 * i, 1.0) for i in range(2000))
    for tol in (1e-6, 1e-9, 1e-12):
        _, tail = integrate_comb_against_step(
            Comb1D(terms), sign_bins(), tol=tol, return_tail=True
        )
        assert tail <= max(10.0 * tol, 1e-9)
    assert issubclass(TruncationError, RuntimeError)


def test_extreme_narrow_peaks_stay_finite():
    """Very narrow peaks far from bin edges must not produce NaN."""
    comb = Comb1D((GaussTerm1D(1e-15, -184.34, 0.0224),))
    val = integrate_comb_against_step(comb, sign_bins())
    assert np.isfinite(val.real) and np.isfinite(val.imag)


@given(
    mu=st.floats(-5, 5),
    w=st.floats(0.1, 3.0),
    k=st.floats(-4, 4),
)
@settings(max_examples=40, deadline=None)
def test_step_integral_bounded_by_l1(mu, w, k):
    term = GaussTerm1D(1.0, mu, w, k)
    comb = Comb1D((term,))
    val = integrate_comb_against_step(comb, sign_bins())
    assert abs(val) <= term.l1_weight * (1 + 1e-9)


@given(spacing=st.floats(0.5, 3.0), x=st.floats(-10, 10))
@settings(max_examples=60, deadline=None)
def test_sign_bins_values(spacing, x):
    f = sign_bins(spacing)
    k = math.floor(x / spacing + 0.5)
    assert f(x) == (1.0 if k % 2 == 0 else -1.0)


# ---------------------------------------------------------------- 2D algebra


def random_term2d(rng):
    m = rng.normal(size=(2, 2))
    a = m @ m.T + 0.3 * np.eye(2)
    return GaussTerm2D(
        complex(rng.normal(), rng.normal()),
        (rng.uniform(-2, 2), rng.uniform(-2, 2)),
        ((a[0, 0], a[0, 1]), (a[1, 0], a[1, 1])),
        (rng.uniform(-2, 2), rng.uniform(-2, 2)),
    )


def quad2d(f, half=12.0, n=1200):
    q = np.linspace(-half, half, n)
    p = np.linspace(-half, half, n)
    dq = q[1] - q[0]
    vals = f(q[:, None], p[None, :])
    return np.sum(vals) * dq * dq


def test_term2d_integral_matches_quadrature():
    rng = np.random.default_rng(20)
    t = random_term2d(rng)
    assert t.integral() == pytest.approx(quad2d(t), abs=1e-6)


def test_gaussian_channel_pointwise():
    rng = np.random.default_rng(21)
    w = Comb2D(tuple(random_term2d(rng) for _ in range(3)))
    scale = math.sqrt(0.8) * np.eye(2)
    noise = 0.1 * np.eye(2)
    out = apply_gaussian_channel(w, scale, noise)

    # direct check: the channel is pullback-by-scale then noise convolution
    q = np.linspace(-6, 6, 41)
    p = np.linspace(-6, 6, 41)
    u = np.linspace(-8, 8, 601)
    du = u[1] - u[0]
    kern = np.exp(-0.5 * (u[:, None] ** 2 + u[None, :] ** 2) / 0.1) / (2 * math.pi * 0.1)
    for qi in q[::8]:
        for pi in p[::8]:
            pulled = w((qi - u[:, None]) / scale[0, 0], (pi - u[None, :]) / scale[1, 1])
            ref = np.sum(pulled * kern) * du * du / abs(np.linalg.det(scale))
            assert out(qi, pi) == pytest.approx(ref, abs=1e-6)


def test_gaussian_channel_zero_noise_preserves_integral():
    rng = np.random.default_rng(22)
    w = Comb2D(tuple(random_term2d(rng) for _ in range(3)))
    out = apply_gaussian_channel(w, 0.7 * np.eye(2), np.zeros((2, 2)))
    assert out.integral() == pytest.approx(w.integral(), abs=1e-12)


def test_marginal_matches_quadrature():
    rng = np.random.default_rng(23)
    w = Comb2D(tuple(random_term2d(rng) for _ in range(2)))
    q = np.linspace(-4, 4, 17)
    p = np.linspace(-30, 30, 1 << 14)
    dp = p[1] - p[0]
    mq = marginal(w, "q")
    assert mq.representation is Representation.POSITION
    for qi in q:
        ref = np.sum(w(qi, p)) * dp
        assert mq(qi) == pytest.approx(ref, abs=1e-8)
    mp = marginal(w, "p")
    assert mp.representation is Representation.MOMENTUM
    for pi in q:
        ref = np.sum(w(p, pi)) * dp
        assert mp(pi) == pytest.approx(ref, abs=1e-8)


def test_term_width_must_be_positive():
    with pytest.raises(ValueError):
        GaussTerm1D(1.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        GaussTerm1D(1.0, 0.0, -1.0)


def test_empty_comb_rejected():
    with pytest.raises(ValueError):
        Comb1D(())
