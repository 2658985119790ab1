"""Odds-ratio study records and their conversion to z-scores and p-values.

A study estimate is an odds ratio with a two-sided confidence interval. Two
conversion conventions are supported and must never be merged:

* NATURAL treats the interval as symmetric around the odds ratio itself:
  SE = (ci_high - ci_low) / (2q) and z = (OR - 1) / SE.
* LOG treats the interval as symmetric on the log scale, the usual
  assumption for ratio measures: SE = (ln ci_high - ln ci_low) / (2q) and
  z = ln(OR) / SE.

Here q is the standard normal multiplier for the interval's level,
q = Phi^-1(1 - (1 - ci_level)/2), e.g. 1.95996 for a 95% interval. The
two-sided p-value is p = 2 * (1 - Phi(|z|)) in both conventions.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

from .errors import (
    DegenerateIntervalError,
    DomainError,
    InvalidIntervalError,
    SERecoveryError,
)
from .normal import std_normal_cdf, std_normal_quantile


class ConversionMethod(Enum):
    """How an (OR, CI) record is mapped to a z-score."""

    NATURAL = "natural"
    LOG = "log"


@dataclass(frozen=True)
class EffectEstimate:
    """One study (or subgroup) estimate: odds ratio plus confidence interval.

    The odds ratio is allowed to sit outside its own interval; several
    published tables contain such rows, so this raises a warning rather
    than an error.
    """

    study_label: str
    odds_ratio: float
    ci_low: float
    ci_high: float
    subgroup_label: str | None = None
    ci_level: float = 0.95

    def __post_init__(self) -> None:
        if not self.study_label or not self.study_label.strip():
            raise DomainError("study_label must be a non-empty string")
        for name in ("odds_ratio", "ci_low", "ci_high", "ci_level"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise DomainError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        if self.odds_ratio <= 0.0:
            raise DomainError(f"odds_ratio must be positive, got {self.odds_ratio}")
        if self.ci_low <= 0.0:
            raise InvalidIntervalError(
                f"ci_low must be positive, got {self.ci_low}"
            )
        if self.ci_high <= self.ci_low:
            raise InvalidIntervalError(
                f"interval is inverted or empty: ({self.ci_low}, {self.ci_high})"
            )
        if not 0.0 < self.ci_level < 1.0:
            raise DomainError(f"ci_level must be inside (0, 1), got {self.ci_level}")
        if not self.ci_low <= self.odds_ratio <= self.ci_high:
            warnings.warn(
                f"{self.display_label()}: odds ratio {self.odds_ratio} lies "
                f"outside its interval ({self.ci_low}, {self.ci_high})",
                stacklevel=2,
            )

    def display_label(self) -> str:
        if self.subgroup_label:
            return f"{self.study_label} ({self.subgroup_label})"
        return self.study_label


def interval_multiplier(ci_level: float) -> float:
    """Two-sided standard normal multiplier q for a confidence level."""
    if not 0.0 < ci_level < 1.0:
        raise DomainError(f"ci_level must be inside (0, 1), got {ci_level!r}")
    return std_normal_quantile(1.0 - (1.0 - ci_level) / 2.0)


def standard_error(estimate: EffectEstimate, method: ConversionMethod) -> float:
    """Standard error implied by the interval under the given convention.

    Raises:
        DegenerateIntervalError: if the interval width collapses to zero
            at float precision, leaving no information about the SE.
    """
    q2 = 2.0 * interval_multiplier(estimate.ci_level)
    if method is ConversionMethod.NATURAL:
        width = estimate.ci_high - estimate.ci_low
    elif method is ConversionMethod.LOG:
        width = math.log(estimate.ci_high) - math.log(estimate.ci_low)
    else:
        raise DomainError(f"unknown conversion method: {method!r}")
    se = width / q2
    if se <= 0.0:
        raise DegenerateIntervalError(
            f"{estimate.display_label()}: interval width is zero, SE undefined"
        )
    return se


def z_score(estimate: EffectEstimate, method: ConversionMethod) -> float:
    """Signed z-score of the estimate under the given convention."""
    se = standard_error(estimate, method)
    if method is ConversionMethod.NATURAL:
        return (estimate.odds_ratio - 1.0) / se
    return math.log(estimate.odds_ratio) / se


def p_from_effect(estimate: EffectEstimate, method: ConversionMethod) -> float:
    """Two-sided p-value, p = 2 * (1 - Phi(|z|)).

    Computed as 2 * Phi(-|z|), which is the same quantity evaluated without
    the intermediate 1 - x cancellation. Returns exactly 1.0 at z = 0 and
    exactly 0.0 once |z| reaches the CDF saturation point.
    """
    z = z_score(estimate, method)
    return min(1.0, 2.0 * std_normal_cdf(-abs(z)))


def ci_from_p(
    estimate_log_or: float, p: float, ci_level: float = 0.95
) -> tuple[float, float]:
    """Reconstruct a confidence interval from a log odds ratio and p-value.

    Inverts the LOG conversion: z = Phi^-1(1 - p/2), SE = |log OR| / z, and
    the bounds are exp(log OR -/+ q * SE) with q the multiplier for
    ci_level. Exact recovery is only possible when the original interval
    was symmetric on the log scale.

    Raises:
        SERecoveryError: if p = 1 (z would be 0) or estimate_log_or = 0,
            both of which leave the SE undetermined.
        DomainError: if p is outside (0, 1] or any input is not finite.
    """
    if not isinstance(estimate_log_or, (int, float)) or isinstance(estimate_log_or, bool):
        raise DomainError(f"estimate_log_or must be a real number, got {estimate_log_or!r}")
    if not math.isfinite(estimate_log_or):
        raise DomainError(f"estimate_log_or must be finite, got {estimate_log_or!r}")
    if not isinstance(p, (int, float)) or isinstance(p, bool) or not math.isfinite(p):
        raise DomainError(f"p must be a finite real number, got {p!r}")
    if p == 1.0:
        raise SERecoveryError("p = 1 gives z = 0, standard error is undetermined")
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must be inside (0, 1), got {p!r}")
    if estimate_log_or == 0.0:
        raise SERecoveryError("a null estimate carries no scale, SE is undetermined")

    z = std_normal_quantile(1.0 - p / 2.0)
    se = abs(estimate_log_or) / z
    q = interval_multiplier(ci_level)
    return (
        math.exp(estimate_log_or - q * se),
        math.exp(estimate_log_or + q * se),
    )
