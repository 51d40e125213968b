"""The scalar security chain: error probability, QBER, Holevo bound and
the Devetak-Winter secret-key rate, plus key-rate curve generation."""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from functools import lru_cache

from .chsh import TSIRELSON, chsh_value
from .codes import CodeParams, LogicalLabel, approximate_codeword
from .combs import DEFAULT_TOL, integrate_comb_against_step, parity_indicator_bins
from .homodyne import density_comb
from .loss import ChannelParams

#: numerical slack above the Tsirelson bound tolerated before erroring
S_SLACK = 1e-9


def binary_entropy(p: float) -> float:
    """``h(p) = -p log2 p - (1-p) log2 (1-p)``, with h(0) = h(1) = 0."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"binary_entropy needs p in [0, 1], got {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return float(-p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p))


def holevo_bound(s: float) -> float:
    """Upper bound on Eve's information given CHSH value ``s``:
    ``h((1 + sqrt((s/2)^2 - 1)) / 2)`` for s >= 2, saturating at 1 below."""
    if s < 0.0 or s > TSIRELSON + S_SLACK:
        raise ValueError(f"CHSH value {s} outside [0, 2*sqrt(2)]")
    if s <= 2.0:
        return 1.0
    arg = min((s / 2.0) ** 2 - 1.0, 1.0)
    return binary_entropy(0.5 * (1.0 + math.sqrt(arg)))


def devetak_winter(s: float, qber: float) -> float:
    """``r_DW = 1 - h(Q) - chi(S)``; may be negative, caller floors."""
    return 1.0 - binary_entropy(qber) - holevo_bound(s)


@lru_cache(maxsize=512)
def error_probability(params: CodeParams, tol: float = DEFAULT_TOL) -> float:
    """Exact misidentification probability: the odd-bin mass of the
    q-homodyne density of the approximate ``|0>`` codeword, by erf sums."""
    dens = density_comb(approximate_codeword(LogicalLabel.ZERO, params, tol))
    val = integrate_comb_against_step(dens, parity_indicator_bins(1), tol)
    p = float(val.real)
    return min(max(p, 0.0), 1.0)


def error_probability_bound(params: CodeParams) -> float:
    """The closed-form companion bound ``2 delta^2/(kappa pi)
    exp(-pi/(4 delta^2))``, valid in the ``kappa sqrt(pi) << 1`` regime."""
    d2 = params.delta_eff**2
    return 2.0 * d2 / (params.kappa * math.pi) * math.exp(-math.pi / (4.0 * d2))


def qber_from_error_probability(p_e: float) -> float:
    """Key-round QBER when exactly one party misidentifies the state."""
    return 2.0 * p_e * (1.0 - p_e)


@dataclass(frozen=True)
class SecurityReport:
    s_value: float
    p_e: float
    qber: float
    chi: float
    mutual_information: float
    rate: float

    @property
    def rate_floored(self) -> float:
        return max(self.rate, 0.0)


def security_report(s: float, p_e: float) -> SecurityReport:
    qber = qber_from_error_probability(p_e)
    chi = holevo_bound(s)
    i_ab = 1.0 - binary_entropy(qber)
    return SecurityReport(
        s_value=s,
        p_e=p_e,
        qber=qber,
        chi=chi,
        mutual_information=i_ab,
        rate=i_ab - chi,
    )


@dataclass(frozen=True)
class KeyrateRow:
    sq_db: float
    kappa: float
    delta_eff: float
    s_value: float
    p_e: float
    qber: float
    chi: float
    rate: float
    rate_floored: float

    def as_dict(self) -> dict:
        return asdict(self)


def _params_for(sq_db: float, delta_rule: str | float, delta_det: float) -> CodeParams:
    if delta_rule == "kappa":
        return CodeParams.from_squeezing_db(sq_db, delta_state=None, delta_det=delta_det)
    return CodeParams.from_squeezing_db(sq_db, delta_state=float(delta_rule), delta_det=delta_det)


def keyrate_curve(
    sq_db_values,
    delta_rule: str | float = "kappa",
    channel: ChannelParams | None = None,
    delta_det: float = 0.0,
    tol: float = DEFAULT_TOL,
) -> list[KeyrateRow]:
    """One :class:`SecurityReport`-style row per squeezing value.

    ``delta_rule`` is either the symmetric rule ``"kappa"`` (peak width
    equal to the inverse envelope width) or a fixed numeric peak width.
    """
    rows = []
    for sq_db in sq_db_values:
        params = _params_for(float(sq_db), delta_rule, delta_det)
        s = chsh_value(params, params, channel, tol).s_value
        if TSIRELSON < s <= TSIRELSON + S_SLACK:
            s = TSIRELSON
        rep = security_report(s, error_probability(params, tol))
        rows.append(
            KeyrateRow(
                sq_db=float(sq_db),
                kappa=params.kappa,
                delta_eff=params.delta_eff,
                s_value=rep.s_value,
                p_e=rep.p_e,
                qber=rep.qber,
                chi=rep.chi,
                rate=rep.rate,
                rate_floored=rep.rate_floored,
            )
        )
    return rows


def pe_bound_audit(
    kappa_values, delta_values, tol: float = DEFAULT_TOL
) -> list[dict]:
    """Compare the exact tail-integral error probability against the
    closed-form bound on a parameter grid.  This is an audit: each row
    records whether the bound actually upper-bounds the exact value."""
    rows = []
    for kappa in kappa_values:
        for delta in delta_values:
            params = CodeParams(kappa=float(kappa), delta_state=float(delta))
            exact = error_probability(params, tol)
            bound = error_probability_bound(params)
            rows.append(
                {
                    "kappa": float(kappa),
                    "delta": float(delta),
                    "kappa_sqrt_pi": float(kappa) * math.sqrt(math.pi),
                    "p_e_exact": exact,
                    "p_e_bound": bound,
                    "bound_holds": bool(bound >= exact),
                }
            )
    return rows
