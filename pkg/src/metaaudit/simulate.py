"""Seeded Monte Carlo study sets for calibrating the plot classifier.

Each trial draws k synthetic studies, converts them to two-sided p-values
and classifies the resulting p-value plot. Three scenarios are supported:

* NULL: every study's true log odds ratio is 0.
* FIXED_EFFECT: every study's true log odds ratio is log_or (log_or = 0 is
  bit-identical to NULL by construction).
* MIXTURE: each study independently carries log_or with probability
  effect_fraction, otherwise 0.

Determinism contract: trial t of a run seeded with s uses the PCG64 stream
seeded by SeedSequence([s, t]), so trials are independent of each other and
of how many trials run. Per study the draw order is fixed: (1) a uniform
for the standard error, (2) for MIXTURE only, a uniform for the effect
indicator, (3) a 53-bit uniform u in (0, 1) mapped through the package's
own normal quantile to give the z draw. Reports are therefore reproducible
bit for bit from (config, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .normal import std_normal_cdf, std_normal_quantile
from .pvplot import PlotConfig, PlotVerdict, build_plot, classify_plot, ks_pvalue, ks_statistic

_U53 = float(1 << 53)


class Scenario(Enum):
    NULL = "null"
    FIXED_EFFECT = "fixed_effect"
    MIXTURE = "mixture"


@dataclass(frozen=True)
class SimulationConfig:
    """Parameters of one simulation run.

    se_low/se_high bound the uniform draw of per-study standard errors.
    log_or is ignored for NULL; effect_fraction is used only by MIXTURE.
    """

    scenario: Scenario
    k: int
    trials: int
    seed: int
    se_low: float = 0.1
    se_high: float = 0.3
    log_or: float = 0.0
    effect_fraction: float = 1.0
    plot_config: PlotConfig = field(default_factory=PlotConfig)

    def __post_init__(self) -> None:
        if not isinstance(self.scenario, Scenario):
            raise ConfigError(f"scenario must be a Scenario, got {self.scenario!r}")
        if not isinstance(self.k, int) or isinstance(self.k, bool) or self.k < 1:
            raise ConfigError(f"k must be an integer >= 1, got {self.k!r}")
        if not isinstance(self.trials, int) or isinstance(self.trials, bool) or self.trials < 1:
            raise ConfigError(f"trials must be an integer >= 1, got {self.trials!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed!r}")
        for name in ("se_low", "se_high", "log_or", "effect_fraction"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool) \
                    or not math.isfinite(value):
                raise ConfigError(f"{name} must be a finite number, got {value!r}")
        if not 0.0 < self.se_low <= self.se_high:
            raise ConfigError(
                f"need 0 < se_low <= se_high, got ({self.se_low!r}, {self.se_high!r})"
            )
        if not 0.0 <= self.effect_fraction <= 1.0:
            raise ConfigError(
                f"effect_fraction must be inside [0, 1], got {self.effect_fraction!r}"
            )


@dataclass(frozen=True)
class SimulationReport:
    """Aggregated classification results of a simulation run."""

    config: SimulationConfig
    verdict_counts: tuple[tuple[str, int], ...]
    mean_fraction_below_alpha: float
    mean_ks_statistic: float
    mean_ks_p: float
    fraction_ks_pass: float

    def verdict_fraction(self, verdict: PlotVerdict) -> float:
        counts = dict(self.verdict_counts)
        return counts.get(verdict.value, 0) / self.config.trials


def _open_uniform(rng: np.random.Generator) -> float:
    # integers(1, 2^53) / 2^53 lies strictly inside (0, 1), keeping the
    # normal quantile in-domain.
    return int(rng.integers(1, 1 << 53)) / _U53


def simulate_trial(config: SimulationConfig, trial_index: int) -> tuple[float, ...]:
    """P-values of one trial's k synthetic studies.

    The trial's RNG stream depends only on (config.seed, trial_index), so
    a trial's output is the same whether or not other trials ran.
    """
    if not isinstance(trial_index, int) or isinstance(trial_index, bool) or trial_index < 0:
        raise ConfigError(f"trial_index must be a non-negative integer, got {trial_index!r}")
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, trial_index]))
    span = config.se_high - config.se_low
    ps = []
    for _ in range(config.k):
        se = config.se_low + span * float(rng.random())
        true_log_or = 0.0
        if config.scenario is Scenario.FIXED_EFFECT:
            true_log_or = config.log_or
        elif config.scenario is Scenario.MIXTURE:
            if float(rng.random()) < config.effect_fraction:
                true_log_or = config.log_or
        z = std_normal_quantile(_open_uniform(rng))
        estimate = true_log_or + se * z
        ps.append(min(1.0, 2.0 * std_normal_cdf(-abs(estimate / se))))
    return tuple(ps)


def run_simulation(config: SimulationConfig) -> SimulationReport:
    """Run all trials, classify each plot and aggregate.

    The verdict histogram always sums to config.trials. KS aggregates are
    the per-trial mean statistic, mean asymptotic p and the fraction of
    trials whose KS p clears the uniform threshold.
    """
    counts: dict[str, int] = {v.value: 0 for v in PlotVerdict}
    fractions = []
    stats = []
    ks_ps = []
    alpha = config.plot_config.alpha
    threshold = config.plot_config.uniform_ks_threshold
    for trial in range(config.trials):
        ps = simulate_trial(config, trial)
        labeled = [(f"study-{i + 1:03d}", p) for i, p in enumerate(ps)]
        plot = build_plot(labeled, alpha=alpha)
        verdict = classify_plot(plot, config.plot_config).verdict
        counts[verdict.value] += 1
        fractions.append(plot.n_below_alpha / plot.n)
        stat = ks_statistic(ps)
        stats.append(stat)
        ks_ps.append(ks_pvalue(stat, len(ps)))
    return SimulationReport(
        config=config,
        verdict_counts=tuple(sorted(counts.items())),
        mean_fraction_below_alpha=math.fsum(fractions) / config.trials,
        mean_ks_statistic=math.fsum(stats) / config.trials,
        mean_ks_p=math.fsum(ks_ps) / config.trials,
        fraction_ks_pass=sum(1 for p in ks_ps if p >= threshold) / config.trials,
    )


def null_draws(config: SimulationConfig, n_trials: int) -> list[float]:
    """Flat list of all p-values from the first n_trials trials."""
    if not isinstance(n_trials, int) or n_trials < 1:
        raise ConfigError(f"n_trials must be an integer >= 1, got {n_trials!r}")
    draws: list[float] = []
    for trial in range(n_trials):
        draws.extend(simulate_trial(config, trial))
    return draws
