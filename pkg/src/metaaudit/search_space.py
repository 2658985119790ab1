"""Multiple-testing search spaces for observational studies.

A study that examines O outcomes and P predictors while choosing freely
among C candidate covariates can form N = O * P * 2^C distinct analyses.
Everything here is exact integer arithmetic; C is capped at 128 to keep the
numbers auditable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError, EmptyInputError, OverflowGuardError

MAX_COVARIATES = 128


def _check_count(name: str, value: int, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {value}")
    return value


def block_search_space(outcomes: int, predictors: int, covariates: int) -> int:
    """Exact O * P * 2^C for one model block."""
    _check_count("outcomes", outcomes, 1)
    _check_count("predictors", predictors, 1)
    _check_count("covariates", covariates, 0)
    if covariates > MAX_COVARIATES:
        raise OverflowGuardError(
            f"covariates = {covariates} exceeds the guarded maximum of {MAX_COVARIATES}"
        )
    return outcomes * predictors * (1 << covariates)


@dataclass(frozen=True)
class CountBlock:
    """One block of models sharing outcome/predictor/covariate counts.

    Papers sometimes report several model families; each becomes a block
    and the per-paper search space is the sum over blocks. The outcomes
    count is the final multiplied-out figure when a paper crosses factors
    (e.g. 7 outcomes each at 3 cutoffs is stored as outcomes = 21).
    """

    block_label: str
    outcomes: int
    predictors: int
    covariates: int

    def __post_init__(self) -> None:
        block_search_space(self.outcomes, self.predictors, self.covariates)

    def search_space(self) -> int:
        return block_search_space(self.outcomes, self.predictors, self.covariates)


@dataclass(frozen=True)
class StudyCounts:
    """All counted model blocks of one paper."""

    paper_label: str
    region: str
    blocks: tuple[CountBlock, ...]

    def __post_init__(self) -> None:
        if not self.paper_label or not self.paper_label.strip():
            raise DomainError("paper_label must be a non-empty string")
        if not self.blocks:
            raise EmptyInputError(f"{self.paper_label}: a study needs at least one block")

    def search_space(self) -> int:
        return sum(block.search_space() for block in self.blocks)


def study_search_space(study: StudyCounts) -> int:
    """Exact per-paper search space, summed over blocks."""
    return study.search_space()


def expected_false_positives(n_space: int, alpha: float) -> float:
    """Expected count of false-positive analyses, alpha * N."""
    _check_count("n_space", n_space, 0)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be inside (0, 1), got {alpha!r}")
    return alpha * n_space


def cohort_false_positives(
    n_publications: int, median_space: int, alpha: float
) -> float:
    """Expected false positives across a cohort of publications.

    Scales a typical per-publication search space (its median) by the
    number of publications: alpha * n_publications * median_space.
    """
    _check_count("n_publications", n_publications, 1)
    _check_count("median_space", median_space, 0)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be inside (0, 1), got {alpha!r}")
    return alpha * n_publications * median_space


@dataclass(frozen=True)
class LedgerSummary:
    """Distribution summary of per-paper search spaces."""

    n: int
    minimum: int
    lower_quartile: float
    median: float
    upper_quartile: float
    maximum: int
    mean: float

    def mean_rounded(self) -> int:
        return round(self.mean)


def _interpolated_quantile(sorted_values: Sequence[int], q: float) -> float:
    """Linear interpolation at 1-based position 1 + (n-1) * q."""
    n = len(sorted_values)
    if n == 1:
        return float(sorted_values[0])
    position = 1.0 + (n - 1) * q
    index = int(position)
    fraction = position - index
    lower = sorted_values[index - 1]
    if fraction == 0.0:
        return float(lower)
    return lower + fraction * (sorted_values[index] - lower)


def summarize_ledger(studies: Sequence[StudyCounts]) -> LedgerSummary:
    """Five-number-plus-mean summary of per-paper search spaces."""
    if not studies:
        raise EmptyInputError("ledger summary requires at least one study")
    values = sorted(study.search_space() for study in studies)
    n = len(values)
    return LedgerSummary(
        n=n,
        minimum=values[0],
        lower_quartile=_interpolated_quantile(values, 0.25),
        median=_interpolated_quantile(values, 0.5),
        upper_quartile=_interpolated_quantile(values, 0.75),
        maximum=values[-1],
        mean=sum(values) / n,
    )
