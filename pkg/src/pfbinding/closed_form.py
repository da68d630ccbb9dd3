"""Closed-form expressions: vacuum integrals, the leading self-energy, a-priori
bounds, the self-energy error budget, coupling thresholds, the logarithmic
radiative correction and mass renormalization."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .core import DEFAULT_A_SPLIT, ValidationError, require_nonnegative, require_positive

PI = math.pi


def _check_split(a_split):
    if not 0 < a_split < 1:
        raise ValidationError("a_split", f"must lie in (0, 1), got {a_split}")


def _log1p_tail(x, start):
    """ln(1+x) minus its Taylor polynomial of degree start-1, i.e.
    sum_{n>=start} (-1)^(n+1) x^n / n, without cancellation for small x."""
    if abs(x) >= 0.1:
        poly = sum((-1) ** (n + 1) * x**n / n for n in range(1, start))
        return math.log1p(x) - poly
    total, n, term = 0.0, start, x**start
    while True:
        piece = (-1) ** (n + 1) * term / n
        total += piece
        if abs(piece) <= 1e-18 * abs(total):
            return total
        n += 1
        term *= x


def _lambda_minus_log(lambda_cut):
    # Lambda - ln(1 + Lambda)
    return -_log1p_tail(lambda_cut, 2)


def vacuum_resolvent_integral(lambda_cut) -> float:
    """<0| E (p^2 + H_f)^-1 E* |0> = 8 pi int_0^L k^2/(k+1) dk
    = 4 pi [L^2 - 2 (L - ln(1+L))]."""
    require_positive(lambda_cut, "lambda_cut")
    # L^2/2 - L + ln(1+L) is the cubic-and-higher tail of ln(1+L)
    return 8 * PI * _log1p_tail(lambda_cut, 3)


def resolvent_norm_sq(lambda_cut) -> float:
    """||(p^2 + H_f)^-1 E* |0>||^2 = 8 pi int_0^L k/(k+1)^2 dk
    = 8 pi [ln(1+L) - L/(1+L)]."""
    require_positive(lambda_cut, "lambda_cut")
    x = lambda_cut
    # ln(1+x) - x/(1+x) = [ln(1+x) - x] + x^2/(1+x)
    return 8 * PI * (_log1p_tail(x, 2) + x * x / (1 + x))


@dataclass(frozen=True)
class SelfEnergyEstimate:
    leading: float
    error_coeff: float
    error_bound: float


def self_energy_leading(alpha, lambda_cut) -> SelfEnergyEstimate:
    """Leading self-energy 8 pi alpha [L - ln(1+L)] with the O(alpha^2)
    coefficient C = <0|E A^-1 E*|0> * ||A^-1 E*|0>||^2 of the trial state."""
    require_nonnegative(alpha, "alpha")
    require_positive(lambda_cut, "lambda_cut")
    coeff = vacuum_resolvent_integral(lambda_cut) * resolvent_norm_sq(lambda_cut)
    return SelfEnergyEstimate(
        leading=8 * PI * alpha * _lambda_minus_log(lambda_cut),
        error_coeff=coeff,
        error_bound=coeff * alpha**2,
    )


def apriori_field_bound(alpha, lambda_cut) -> float:
    """Bound 8 pi alpha L on (Psi, H_f Psi) for near-ground states of T."""
    require_nonnegative(alpha, "alpha")
    require_positive(lambda_cut, "lambda_cut")
    return 8 * PI * alpha * lambda_cut


def apriori_kinetic_bound(alpha, lambda_cut, a_split=DEFAULT_A_SPLIT) -> float:
    """Bound 8 pi alpha L (1 + L^2)/(1 - a) on ||p Psi||^2."""
    require_nonnegative(alpha, "alpha")
    require_positive(lambda_cut, "lambda_cut")
    _check_split(a_split)
    return 8 * PI * alpha * lambda_cut * (1 + lambda_cut**2) / (1 - a_split)


def schwarz_condition(lambda_cut, a_split=DEFAULT_A_SPLIT) -> float:
    """Largest alpha, a / (16 pi L), keeping the field-energy coefficient
    nonnegative in the kinetic a-priori estimate."""
    require_positive(lambda_cut, "lambda_cut")
    _check_split(a_split)
    return a_split / (16 * PI * lambda_cut)


def _budget_coeff(lambda_cut, a_split):
    lam2 = lambda_cut**2
    return (16 * PI) ** 2 * lam2 * (1 + lam2) / (1 - a_split) + 14 * 16 * PI**2 * lam2


class ErrorBudget(NamedTuple):
    value: float
    guaranteed: bool  # alpha satisfies the Schwarz condition


def self_energy_error_budget(alpha, lambda_cut, a_split=DEFAULT_A_SPLIT) -> ErrorBudget:
    """alpha^2 [(16 pi)^2 L^2 (1+L^2)/(1-a) + 224 pi^2 L^2].

    Only a valid bound when alpha <= a/(16 pi L); outside that regime the
    value is still returned, with ``guaranteed=False``.
    """
    require_nonnegative(alpha, "alpha")
    require_positive(lambda_cut, "lambda_cut")
    _check_split(a_split)
    ok = alpha <= schwarz_condition(lambda_cut, a_split)
    return ErrorBudget(alpha**2 * _budget_coeff(lambda_cut, a_split), ok)


def radiative_correction_log_approx(alpha, e0, lambda_cut) -> float:
    """R_C = alpha e0 (32 pi / 3) ln(1 + L)."""
    require_nonnegative(alpha, "alpha")
    require_positive(e0, "e0")
    require_positive(lambda_cut, "lambda_cut")
    return alpha * e0 * (32 * PI / 3) * math.log1p(lambda_cut)


def radiative_correction_upper_bound(p_norm_sq, lambda_cut) -> float:
    """||p phi||^2 (32 pi / 3) ln(1 + L), an upper bound on E(V, L)."""
    require_nonnegative(p_norm_sq, "p_norm_sq")
    require_positive(lambda_cut, "lambda_cut")
    return p_norm_sq * (32 * PI / 3) * math.log1p(lambda_cut)


@dataclass(frozen=True)
class ThresholdReport:
    """Couplings below which the self-energy error budget is dominated by the
    radiative correction.

    rc_term        -- alpha at which the error budget equals R_C
    schwarz_term   -- a / (16 pi L)
    alpha_max      -- min of the two
    budget_dominated -- err_budget(alpha_max) <= R_C(alpha_max) (up to rounding)
    rc_equality_residual -- |err - R_C| / R_C evaluated at rc_term
    binding_guaranteed_at -- optional coupling tested against alpha_max
    """

    e0: float
    lambda_cut: float
    a_split: float
    rc_term: float
    schwarz_term: float
    alpha_max: float
    budget_dominated: bool
    rc_equality_residual: float
    binding_guaranteed_at: Optional[float] = None

    @property
    def binding_branch(self) -> str:
        return "rc" if self.rc_term <= self.schwarz_term else "schwarz"

    @property
    def guaranteed(self) -> Optional[bool]:
        if self.binding_guaranteed_at is None:
            return None
        return self.binding_guaranteed_at <= self.alpha_max


def alpha_threshold(e0, lambda_cut, a_split=DEFAULT_A_SPLIT, alpha=None) -> ThresholdReport:
    require_positive(e0, "e0")
    require_positive(lambda_cut, "lambda_cut")
    _check_split(a_split)
    lam2 = lambda_cut**2
    denom = 16 * PI * lam2 * (1 + lam2) / (1 - a_split) + 14 * PI * lam2
    rc = (2.0 / 3.0) * e0 * math.log1p(lambda_cut) / denom
    sw = schwarz_condition(lambda_cut, a_split)
    amax = min(rc, sw)

    err_rc = self_energy_error_budget(rc, lambda_cut, a_split).value
    rc_rc = radiative_correction_log_approx(rc, e0, lambda_cut)
    residual = abs(err_rc - rc_rc) / rc_rc

    err = self_energy_error_budget(amax, lambda_cut, a_split).value
    dominated = err <= radiative_correction_log_approx(amax, e0, lambda_cut) * (1 + 1e-12)
    return ThresholdReport(e0, lambda_cut, a_split, rc, sw, amax, dominated, residual, alpha)


def hydrogen_ground_energy(beta, z_charge) -> float:
    """e0 = (beta Z)^2 / 4, the binding energy of p^2 - beta Z / r."""
    require_positive(beta, "beta")
    require_positive(z_charge, "z_charge")
    return (beta * z_charge) ** 2 / 4


class MassRatios(NamedTuple):
    spectral: float      # 1 + 4 alpha F(L/m)
    logarithmic: float   # 1 + alpha (32 pi/3) ln(1 + L/m)

    @property
    def relative_difference(self) -> float:
        return abs(self.spectral - self.logarithmic) / self.logarithmic


def mass_renormalization(alpha, lambda_over_m, f_value) -> MassRatios:
    """Both renormalized-mass ratios m_phys/m: from the spectral function
    F(L/m) and from its logarithmic approximant."""
    require_nonnegative(alpha, "alpha")
    require_positive(lambda_over_m, "lambda_over_m")
    require_nonnegative(f_value, "f_value")
    return MassRatios(
        1 + 4 * alpha * f_value,
        1 + alpha * (32 * PI / 3) * math.log1p(lambda_over_m),
    )
