"""
Spectral Gap Lab — Constants
============================

Every named constant of the Poincaré-constant argument, in natural-log
space (most of them overflow a double by hundreds of orders of
magnitude).  "log" in the source formulas is read as the natural log and
every table records that choice under ``log_base``.

    Gamma(d, p)   = exp(10^12 2^p ln^2 d)
    Gamma1(eps)   = 18/eps
    Gamma2        = exp(3632 ln^2 d) / (alpha eps^2)
    alpha(d)      = exp(-10^11 ln^2 d)
    l*(d)         = floor(log_{1 + 1/3000}(5(d-1)/4))
    alpha~        = (5 alpha/4) (d-1)^(-l*)
    alpha1        = ((1 + 1/3000)/(d-1))^(l*)
    eta           = alpha~ eps / (2^8 3^2 10^3)
    m2(eps, m)    = ceil((4 + 2 log2 m)^(1/eps))
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import ROUND_FLOOR, Decimal, localcontext
from typing import Any

from config import DEFAULT_CAPS, Caps
from errors import ParameterError


MAX_LOG = 709.78
GROWTH = 1.0 + 1.0 / 3000.0
ETA_DENOMINATOR = 2**8 * 3**2 * 10**3
R_EPS_NUMERATOR = 216.0
SPECIALISED_NUMERATOR = 10746.0
SPECIALISED_NUMERATOR_ORDERED = 21492.0


def _linear(ln_value: float) -> float | None:
    return math.exp(ln_value) if ln_value < MAX_LOG else None


def log_base(x: float, base: float) -> float:
    if base <= 1:
        raise ParameterError(f"logarithm base must exceed 1, got {base}")
    return math.log(x) / math.log(base)


# ---------------------------------------------------------------------------
#  Individual constants
# ---------------------------------------------------------------------------

def ln_gamma(d: int, p: float = 1.0) -> float:
    """ln Gamma(d, p) = 10^12 2^p (ln d)^2."""
    return 1e12 * 2.0 ** p * math.log(d) ** 2


def ln_gamma_decimal(d: int, p: float = 1.0, digits: int = 50) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = digits
        return Decimal(10) ** 12 * Decimal(2) ** Decimal(repr(float(p))) * Decimal(d).ln() ** 2


def ln_alpha_default(d: int) -> float:
    return -1e11 * math.log(d) ** 2


def ell_star(d: int, digits: int = 50) -> int:
    """floor(ln(5(d-1)/4) / ln(1 + 1/3000)) at ``digits`` significant digits."""
    if d < 3:
        raise ParameterError(f"d must be >= 3, got {d}")
    with localcontext() as ctx:
        ctx.prec = digits
        num = (Decimal(5) * (d - 1) / 4).ln()
        den = (1 + Decimal(1) / 3000).ln()
        return int((num / den).to_integral_value(rounding=ROUND_FLOOR))


def ell_star_float(d: int) -> int:
    """Double-precision evaluation of :func:`ell_star` (independent path)."""
    return int(math.floor(math.log(1.25 * (d - 1)) / math.log1p(1.0 / 3000.0)))


def ln_alpha_tilde(alpha: float, d: int) -> float:
    return math.log(1.25 * alpha) - ell_star(d) * math.log(d - 1)


def ln_alpha_tilde_from_ln(ln_alpha: float, d: int) -> float:
    return math.log(1.25) + ln_alpha - ell_star(d) * math.log(d - 1)


def ln_eta(ln_alpha_t: float, eps: float) -> float:
    return ln_alpha_t + math.log(eps) - math.log(ETA_DENOMINATOR)


def ln_m2(eps: float, m: int) -> float:
    """ln m2(eps, m) before the ceiling; m >= m2 iff ln m >= this value."""
    return math.log(4.0 + 2.0 * math.log2(m)) / eps


def m2_satisfied(eps: float, m: int) -> bool:
    ln_threshold = ln_m2(eps, m)
    if ln_threshold >= MAX_LOG:
        return False
    return m >= math.ceil(math.exp(ln_threshold))


def embedding_bound_intermediate(eps: float, m: int, delta: int) -> float:
    """4e/(e-1) (1 + (7/(eps log_Delta m)) 3 log_{Delta-1} m)."""
    if delta < 3 or m < 2:
        raise ParameterError(f"need Delta >= 3 and m >= 2, got Delta={delta}, m={m}")
    e = math.e
    return 4 * e / (e - 1) * (1 + 7.0 / (eps * log_base(m, delta)) * 3 * log_base(m, delta - 1))


# ---------------------------------------------------------------------------
#  Table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstantsTable:
    d: int
    eps: float
    p: float
    ln_alpha: float
    ln_gamma: float
    gamma1: float
    ln_gamma1: float
    ln_gamma2: float
    ell_star: int
    ln_alpha1: float
    ln_alpha_tilde: float
    ln_eta: float
    ln_approximator_factor: float
    r_eps_bound: float
    specialised_constant: float
    specialised_constant_ordered: float
    proof_regime: bool
    m: int | None = None
    delta: int | None = None
    ln_m2: float | None = None
    m2_met: bool | None = None
    embedding_bound: float | None = None
    log_base: str = "e"
    notes: tuple[str, ...] = field(default_factory=tuple)

    def linear(self) -> dict[str, float | None]:
        """Linear-scale values where they fit in a double, else None."""
        return {
            "Gamma": _linear(self.ln_gamma),
            "Gamma1": self.gamma1,
            "Gamma2": _linear(self.ln_gamma2),
            "alpha": _linear(self.ln_alpha),
            "alpha1": _linear(self.ln_alpha1),
            "alpha_tilde": _linear(self.ln_alpha_tilde),
            "eta": _linear(self.ln_eta),
            "m2": _linear(self.ln_m2) if self.ln_m2 is not None else None,
        }

    def to_dict(self) -> dict[str, Any]:
        return {
            "d": self.d, "eps": self.eps, "p": self.p,
            "m": self.m, "delta": self.delta,
            "log_base": self.log_base,
            "proof_regime": self.proof_regime,
            "ln": {
                "Gamma": self.ln_gamma,
                "Gamma1": self.ln_gamma1,
                "Gamma2": self.ln_gamma2,
                "alpha": self.ln_alpha,
                "alpha1": self.ln_alpha1,
                "alpha_tilde": self.ln_alpha_tilde,
                "eta": self.ln_eta,
                "approximator_factor": self.ln_approximator_factor,
                "m2": self.ln_m2,
            },
            "linear": self.linear(),
            "ell_star": self.ell_star,
            "r_eps_bound": self.r_eps_bound,
            "specialised_constant": self.specialised_constant,
            "specialised_constant_ordered": self.specialised_constant_ordered,
            "m2_met": self.m2_met,
            "embedding_bound": self.embedding_bound,
            "notes": list(self.notes),
        }


def constants_table(d: int, eps: float, alpha: float | None = None, p: float = 1.0,
                    m: int | None = None, delta: int | None = None,
                    caps: Caps = DEFAULT_CAPS) -> ConstantsTable:
    if int(d) != d or d < 3:
        raise ParameterError(f"d must be an integer >= 3, got {d}")
    if not 0 < eps < caps.max_eps:
        raise ParameterError(f"eps must lie in (0, {caps.max_eps}), got {eps}")
    if not p >= 1:
        raise ParameterError(f"p must be >= 1, got {p}")
    notes: list[str] = []
    if alpha is None:
        ln_a = ln_alpha_default(d)
        notes.append("alpha defaults to alpha(d)")
    else:
        if not 0 < alpha <= 1:
            raise ParameterError(f"alpha must lie in (0, 1], got {alpha}")
        ln_a = math.log(alpha)
    proof_regime = eps <= caps.proof_eps
    if not proof_regime:
        notes.append(f"eps = {eps} is above {caps.proof_eps}: exploration values only")

    ls = ell_star(d)
    ln_at = ln_alpha_tilde_from_ln(ln_a, d)
    ln_m2_value = m2_met = bound = None
    if m is not None:
        if m < 2:
            raise ParameterError(f"m must be >= 2, got {m}")
        ln_m2_value = ln_m2(eps, m)
        m2_met = m2_satisfied(eps, m)
        if delta is not None:
            bound = embedding_bound_intermediate(eps, m, delta)

    return ConstantsTable(
        d=int(d), eps=eps, p=p,
        ln_alpha=ln_a,
        ln_gamma=ln_gamma(d, p),
        gamma1=18.0 / eps,
        ln_gamma1=math.log(18.0 / eps),
        ln_gamma2=-ln_a - 2.0 * math.log(eps) + 3632.0 * math.log(d) ** 2,
        ell_star=ls,
        ln_alpha1=ls * (math.log1p(1.0 / 3000.0) - math.log(d - 1)),
        ln_alpha_tilde=ln_at,
        ln_eta=ln_eta(ln_at, eps),
        ln_approximator_factor=p * math.log(2.0) + ln_gamma(3, p),
        r_eps_bound=R_EPS_NUMERATOR / eps,
        specialised_constant=SPECIALISED_NUMERATOR / eps,
        specialised_constant_ordered=SPECIALISED_NUMERATOR_ORDERED / eps,
        proof_regime=proof_regime,
        m=m, delta=delta,
        ln_m2=ln_m2_value, m2_met=m2_met,
        embedding_bound=bound,
        notes=tuple(notes),
    )
