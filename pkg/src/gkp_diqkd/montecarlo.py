"""Seeded Monte Carlo run of the full protocol.

Each round Alice draws a setting from {A0, A1, A2} and Bob from {B1, B2};
outcomes are sampled from the exact engine probability tables.  (A0, B1)
rounds outside the test set become raw key, the four {A1, A2} x {B1, B2}
combinations feed the CHSH estimate, and (A0, B2) rounds carry no
correlation and are discarded.  All sampling comes from a counter-based
generator keyed by the seed, so a config reproduces bit-identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chsh import CHSH_SETTINGS, TSIRELSON, MeasLabel, outcome_probabilities
from .codes import CodeParams
from .combs import DEFAULT_TOL
from .loss import ChannelParams
from .security import devetak_winter

ALICE_SETTINGS = (MeasLabel.A0, MeasLabel.A1, MeasLabel.A2)
BOB_SETTINGS = (MeasLabel.B1, MeasLabel.B2)
TEST_PAIRS = tuple((la, lb) for la, lb, _ in CHSH_SETTINGS)


def _derived_probabilities(rule, n_pairs: int):
    """Per-party setting distributions for a given test-fraction rule.

    ``"sqrt_n"`` skews toward the key setting while keeping roughly
    sqrt(N) rounds in each of the sparsest test settings: the non-key
    weight t solves t^2 N = sqrt(N), i.e. t = N^(-1/4).  ``"uniform"``
    gives every setting equal weight.  A float is the total test-round
    fraction 2t.
    """
    if rule == "uniform":
        pa = {MeasLabel.A0: 1 / 3, MeasLabel.A1: 1 / 3, MeasLabel.A2: 1 / 3}
        pb = {MeasLabel.B1: 0.5, MeasLabel.B2: 0.5}
        return pa, pb
    if rule == "sqrt_n":
        t = float(n_pairs) ** -0.25
    else:
        t = 0.5 * float(rule)
    if not 0.0 < t < 0.5:
        raise ValueError(f"test fraction rule {rule!r} gives weight {t} outside (0, 1/2)")
    pa = {MeasLabel.A0: 1.0 - 2.0 * t, MeasLabel.A1: t, MeasLabel.A2: t}
    pb = {MeasLabel.B1: 1.0 - t, MeasLabel.B2: t}
    return pa, pb


@dataclass(frozen=True)
class ProtocolConfig:
    n_pairs: int
    params_a: CodeParams
    params_b: CodeParams | None = None
    channel: ChannelParams | None = None
    seed: int = 0
    #: "sqrt_n", "uniform", or a float total test fraction
    test_fraction_rule: str | float = "sqrt_n"
    #: explicit overrides; None derives from the rule
    alice_probabilities: dict | None = None
    bob_probabilities: dict | None = None
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if not (isinstance(self.n_pairs, int) and self.n_pairs > 0):
            raise ValueError("n_pairs must be a positive integer")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        pa, pb = self.setting_probabilities()
        for dist, labels in ((pa, ALICE_SETTINGS), (pb, BOB_SETTINGS)):
            if set(dist) != set(labels):
                raise ValueError(f"distribution keys must be exactly {labels}")
            if any(p < 0 for p in dist.values()):
                raise ValueError("setting probabilities must be non-negative")
            if abs(sum(dist.values()) - 1.0) > 1e-12:
                raise ValueError("setting probabilities must sum to 1 within 1e-12")

    def setting_probabilities(self):
        pa = self.alice_probabilities
        pb = self.bob_probabilities
        if pa is None or pb is None:
            da, db = _derived_probabilities(self.test_fraction_rule, self.n_pairs)
            pa = da if pa is None else pa
            pb = db if pb is None else pb
        return pa, pb

    @property
    def resolved_params_b(self) -> CodeParams:
        return self.params_a if self.params_b is None else self.params_b


@dataclass(frozen=True)
class ProtocolResult:
    s_hat: float
    s_standard_error: float
    q_hat: float
    q_standard_error: float
    sifted_count: int
    test_count: int
    discarded_count: int
    rate_estimate: float
    setting_counts: dict
    seed: int

    def as_dict(self) -> dict:
        return {
            "s_hat": self.s_hat,
            "s_standard_error": self.s_standard_error,
            "q_hat": self.q_hat,
            "q_standard_error": self.q_standard_error,
            "sifted_count": self.sifted_count,
            "test_count": self.test_count,
            "discarded_count": self.discarded_count,
            "rate_estimate": self.rate_estimate,
            "setting_counts": {
                f"{la.value},{lb.value}": int(c) for (la, lb), c in self.setting_counts.items()
            },
            "seed": self.seed,
        }


def estimate_chsh(test_rounds) -> tuple[float, float]:
    """Plug-in CHSH estimator over (label_a, label_b, a, b) rounds.

    Per-setting standard errors (binomial, from the empirical correlator)
    combine in quadrature.  The estimate is not clamped: values above
    2*sqrt(2) are statistically legitimate and flag themselves.
    """
    by_setting: dict[tuple[MeasLabel, MeasLabel], list[int]] = {p: [] for p in TEST_PAIRS}
    for la, lb, a, b in test_rounds:
        key = (MeasLabel(la), MeasLabel(lb))
        if key in by_setting:
            by_setting[key].append(int(a) * int(b))
    s_hat = 0.0
    var = 0.0
    for la, lb, sign in CHSH_SETTINGS:
        products = by_setting[(la, lb)]
        if not products:
            raise ValueError(
                f"no test rounds for setting ({la.value}, {lb.value}); "
                "increase N or rebalance the setting probabilities"
            )
        n = len(products)
        c = sum(products) / n
        s_hat += sign * c
        var += max(1.0 - c * c, 0.0) / n
    return s_hat, math.sqrt(var)


def _sample_settings(rng: np.random.Generator, dist: dict, labels, n: int) -> np.ndarray:
    p = np.array([dist[l] for l in labels])
    return rng.choice(len(labels), size=n, p=p / p.sum())


def run_protocol(cfg: ProtocolConfig) -> ProtocolResult:
    """One full seeded run; identical configs give identical results."""
    n = cfg.n_pairs
    rng = np.random.Generator(np.random.Philox(key=int(cfg.seed)))
    pa, pb = cfg.setting_probabilities()
    ia = _sample_settings(rng, pa, ALICE_SETTINGS, n)
    ib = _sample_settings(rng, pb, BOB_SETTINGS, n)
    u_outcome = rng.random(n)
    flip = rng.integers(0, 2, size=n)

    params_b = cfg.resolved_params_b
    # joint outcome tables, one per setting pair, in the fixed outcome
    # order (+1,+1), (+1,-1), (-1,+1), (-1,-1)
    outcome_order = ((1, 1), (1, -1), (-1, 1), (-1, -1))
    cum = {}
    for ja, la in enumerate(ALICE_SETTINGS):
        for jb, lb in enumerate(BOB_SETTINGS):
            table = outcome_probabilities(
                la, lb, cfg.params_a, params_b, cfg.channel, cfg.tol
            )
            cum[(ja, jb)] = np.cumsum([table[o] for o in outcome_order])

    a_out = np.empty(n, dtype=np.int64)
    b_out = np.empty(n, dtype=np.int64)
    setting_counts = {}
    for (ja, jb), c in cum.items():
        mask = (ia == ja) & (ib == jb)
        setting_counts[(ALICE_SETTINGS[ja], BOB_SETTINGS[jb])] = int(mask.sum())
        idx = np.searchsorted(c, u_outcome[mask], side="right").clip(max=3)
        a_out[mask] = np.array([o[0] for o in outcome_order])[idx]
        b_out[mask] = np.array([o[1] for o in outcome_order])[idx]

    is_key = (ia == 0) & (ib == 0)
    is_test = ia != 0
    is_discard = (ia == 0) & (ib == 1)
    sifted = int(is_key.sum())
    tested = int(is_test.sum())
    discarded = int(is_discard.sum())
    assert sifted + tested + discarded == n

    # marginal symmetrization: a shared random bit flips both key bits
    sign_flip = 1 - 2 * flip[is_key]
    key_a = a_out[is_key] * sign_flip
    key_b = b_out[is_key] * sign_flip
    if sifted == 0:
        raise ValueError("no key rounds; rebalance the setting probabilities")
    q_hat = float(np.mean(key_a != key_b))
    q_se = math.sqrt(max(q_hat * (1.0 - q_hat), 0.25 / sifted) / sifted)

    test_rounds = [
        (ALICE_SETTINGS[ja], BOB_SETTINGS[jb], a, b)
        for ja, jb, a, b in zip(ia[is_test], ib[is_test], a_out[is_test], b_out[is_test])
    ]
    s_hat, s_se = estimate_chsh(test_rounds)

    rate = devetak_winter(min(s_hat, TSIRELSON), min(max(q_hat, 0.0), 0.5))
    return ProtocolResult(
        s_hat=s_hat,
        s_standard_error=s_se,
        q_hat=q_hat,
        q_standard_error=q_se,
        sifted_count=sifted,
        test_count=tested,
        discarded_count=discarded,
        rate_estimate=max(rate, 0.0),
        setting_counts=setting_counts,
        seed=int(cfg.seed),
    )
