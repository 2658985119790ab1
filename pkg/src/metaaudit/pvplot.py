"""P-value plots: construction, shape classification and rendering.

A p-value plot ranks a study set's two-sided p-values in ascending order
and plots them against rank. Under a shared null with independent tests the
points hug the 45-degree line through the origin; a real common effect
drags the bulk of the points under the significance threshold; a mixture
shows up as two slopes.

The classifier operationalizes those visual readings with explicit
thresholds (see PlotConfig) and checks them in a fixed order:

1. EFFECT_LINE if more than effect_majority_fraction of the p-values fall
   below alpha.
2. UNIFORM45 if a one-sample Kolmogorov-Smirnov test against Uniform(0, 1)
   does not reject (p >= uniform_ks_threshold) and the count below alpha is
   consistent with uniformity (exact binomial upper-tail test at
   uniform_count_level).
3. BILINEAR if a two-segment least-squares fit of sorted p against rank
   (each segment at least bilinear_min_segment points, breakpoint chosen to
   minimize total squared error) removes at least bilinear_rss_reduction of
   the single-line residual sum of squares and the first segment's mean p
   is below alpha.
4. AMBIGUOUS otherwise, and always when fewer than min_points p-values are
   available.

The two-segment rule is this toolkit's own operationalization of the
"bilinear" reading; its thresholds are configuration, not statistical
doctrine.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Sequence

from .effects import ConversionMethod, EffectEstimate, p_from_effect
from .errors import ConfigError, DomainError, EmptyInputError


class PlotVerdict(Enum):
    UNIFORM45 = "uniform45"
    EFFECT_LINE = "effect_line"
    BILINEAR = "bilinear"
    AMBIGUOUS = "ambiguous"


@dataclass(frozen=True)
class PlotConfig:
    """Thresholds and rendering parameters for p-value plots."""

    alpha: float = 0.05
    uniform_ks_threshold: float = 0.05
    uniform_count_level: float = 0.05
    effect_majority_fraction: float = 0.5
    bilinear_min_segment: int = 3
    bilinear_rss_reduction: float = 0.5
    min_points: int = 5
    width: int = 640
    height: int = 480
    margin: int = 64
    point_radius: float = 4.0
    title: str = ""

    def __post_init__(self) -> None:
        for name in ("alpha", "uniform_ks_threshold", "uniform_count_level",
                     "effect_majority_fraction", "bilinear_rss_reduction"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool) \
                    or not 0.0 < float(value) < 1.0:
                raise ConfigError(f"{name} must be inside (0, 1), got {value!r}")
        if not isinstance(self.bilinear_min_segment, int) or self.bilinear_min_segment < 2:
            raise ConfigError(
                f"bilinear_min_segment must be an integer >= 2, got {self.bilinear_min_segment!r}"
            )
        if not isinstance(self.min_points, int) or self.min_points < 1:
            raise ConfigError(f"min_points must be an integer >= 1, got {self.min_points!r}")
        for name in ("width", "height"):
            value = getattr(self, name)
            if not isinstance(value, int) or value <= 0:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if not isinstance(self.margin, int) or self.margin < 0:
            raise ConfigError(f"margin must be a non-negative integer, got {self.margin!r}")
        if self.point_radius <= 0:
            raise ConfigError(f"point_radius must be positive, got {self.point_radius!r}")


@dataclass(frozen=True)
class PValuePlot:
    """Ranked p-values with their provenance labels.

    points holds (rank, p) pairs sorted ascending by p (ties broken by
    label); source_labels and negative run parallel to points. negative
    marks points whose source odds ratio was below 1, which rendering
    draws with a distinct marker.
    """

    points: tuple[tuple[int, float], ...]
    n: int
    n_below_alpha: int
    alpha: float
    source_labels: tuple[str, ...]
    negative: tuple[bool, ...]


@dataclass(frozen=True)
class PlotDiagnostics:
    ks_statistic: float
    ks_p: float
    fraction_below_alpha: float
    changepoint_index: int | None
    segment_slopes: tuple[float, float] | None


@dataclass(frozen=True)
class PlotClassification:
    verdict: PlotVerdict
    diagnostics: PlotDiagnostics


def build_plot(
    pvalues: Sequence[tuple[str, float]],
    alpha: float = 0.05,
    negative: Sequence[bool] | None = None,
) -> PValuePlot:
    """Sort labeled p-values into a plot.

    Args:
        pvalues: (label, p) pairs; every p must lie in [0, 1].
        alpha: significance threshold used for the below-alpha count.
        negative: optional parallel flags marking negative-direction
            sources (odds ratio < 1); defaults to all False.

    Raises:
        EmptyInputError: if pvalues is empty.
        DomainError: on out-of-range p, alpha, or mismatched flag length.
    """
    if not pvalues:
        raise EmptyInputError("a p-value plot needs at least one p-value")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be inside (0, 1), got {alpha!r}")
    if negative is None:
        negative = [False] * len(pvalues)
    if len(negative) != len(pvalues):
        raise DomainError(
            f"negative flags ({len(negative)}) do not match p-values ({len(pvalues)})"
        )
    for label, p in pvalues:
        if not isinstance(p, (int, float)) or isinstance(p, bool) or not math.isfinite(p):
            raise DomainError(f"{label}: p must be a finite number, got {p!r}")
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"{label}: p = {p!r} is outside [0, 1]")
    order = sorted(
        range(len(pvalues)), key=lambda i: (pvalues[i][1], pvalues[i][0])
    )
    points = tuple((rank, float(pvalues[i][1])) for rank, i in enumerate(order, 1))
    labels = tuple(pvalues[i][0] for i in order)
    flags = tuple(bool(negative[i]) for i in order)
    below = sum(1 for _, p in points if p < alpha)
    return PValuePlot(
        points=points,
        n=len(points),
        n_below_alpha=below,
        alpha=alpha,
        source_labels=labels,
        negative=flags,
    )


def plot_from_effects(
    effects: Sequence[EffectEstimate],
    method: ConversionMethod,
    alpha: float = 0.05,
) -> PValuePlot:
    """Convert a study set and build its plot in one step."""
    pairs = [(e.display_label(), p_from_effect(e, method)) for e in effects]
    flags = [e.odds_ratio < 1.0 for e in effects]
    return build_plot(pairs, alpha=alpha, negative=flags)


def ks_statistic(pvalues: Sequence[float]) -> float:
    """One-sample KS distance of pvalues from Uniform(0, 1).

    D = max over i of max(i/n - p_(i), p_(i) - (i-1)/n) on the sorted
    sample, the exact supremum of |empirical CDF - uniform CDF|.
    """
    if not pvalues:
        raise EmptyInputError("KS statistic needs at least one value")
    ordered = sorted(pvalues)
    n = len(ordered)
    d = 0.0
    for i, p in enumerate(ordered, 1):
        d = max(d, i / n - p, p - (i - 1) / n)
    return d


def ks_pvalue(statistic: float, n: int) -> float:
    """Asymptotic Kolmogorov p-value P(D > statistic) for sample size n.

    Evaluates the Kolmogorov series Q(x) = 2 * sum_j (-1)^(j-1) e^(-2 j^2 x^2)
    at x = sqrt(n) * statistic. Alternating terms bound the truncation
    error by the first omitted term.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    if not 0.0 <= statistic <= 1.0:
        raise DomainError(f"KS statistic must be in [0, 1], got {statistic!r}")
    x = math.sqrt(n) * statistic
    if x == 0.0:
        return 1.0
    total = 0.0
    sign = 1.0
    for j in range(1, 1001):
        term = sign * math.exp(-2.0 * (j * x) * (j * x))
        total += term
        if abs(term) < 1e-16:
            break
        sign = -sign
    return min(1.0, max(0.0, 2.0 * total))


@lru_cache(maxsize=256)
def _admissible_below_alpha(n: int, alpha: float, level: float) -> int:
    """Largest count c with P(Binomial(n, alpha) > c) >= level.

    A below-alpha count up to c is consistent with uniformity at the given
    test level; larger counts reject it.
    """
    pmf = (1.0 - alpha) ** n
    tail = 1.0
    ratio = alpha / (1.0 - alpha)
    for c in range(n + 1):
        tail -= pmf
        if tail < level:
            return c
        pmf *= ratio * (n - c) / (c + 1)
    return n


def _ols(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    n = len(xs)
    xbar = math.fsum(xs) / n
    ybar = math.fsum(ys) / n
    sxx = math.fsum((x - xbar) ** 2 for x in xs)
    sxy = math.fsum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    slope = sxy / sxx if sxx > 0.0 else 0.0
    return slope, ybar - slope * xbar


def _rss(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    slope, intercept = _ols(xs, ys)
    rss = math.fsum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys))
    return rss, slope


def _two_segment_fit(
    sorted_ps: Sequence[float], min_segment: int
) -> tuple[int, float, float, float, float] | None:
    """Best split of sorted p against rank into two independent least-squares lines.

    Returns (changepoint, total_rss, slope1, slope2, single_rss) where
    changepoint is the rank of the last point in the first segment, or
    None when no split leaves both segments at min_segment points.
    """
    n = len(sorted_ps)
    if n < 2 * min_segment:
        return None
    xs = [float(i) for i in range(1, n + 1)]
    ys = [float(p) for p in sorted_ps]
    single_rss, _ = _rss(xs, ys)
    best: tuple[int, float, float, float] | None = None
    for split in range(min_segment, n - min_segment + 1):
        rss1, slope1 = _rss(xs[:split], ys[:split])
        rss2, slope2 = _rss(xs[split:], ys[split:])
        total = rss1 + rss2
        if best is None or total < best[1]:
            best = (split, total, slope1, slope2)
    split, total, slope1, slope2 = best
    return split, total, slope1, slope2, single_rss


def classify_plot(
    plot: PValuePlot, config: PlotConfig = PlotConfig()
) -> PlotClassification:
    """Classify a plot's shape; see the module docstring for the rules."""
    ps = [p for _, p in plot.points]
    n = plot.n
    below = sum(1 for p in ps if p < config.alpha)
    fraction = below / n
    stat = ks_statistic(ps)
    ks_p = ks_pvalue(stat, n)
    fit = _two_segment_fit(ps, config.bilinear_min_segment)
    changepoint = fit[0] if fit is not None else None
    slopes = (fit[2], fit[3]) if fit is not None else None
    diagnostics = PlotDiagnostics(
        ks_statistic=stat,
        ks_p=ks_p,
        fraction_below_alpha=fraction,
        changepoint_index=changepoint,
        segment_slopes=slopes,
    )

    if n < config.min_points:
        return PlotClassification(PlotVerdict.AMBIGUOUS, diagnostics)
    if fraction > config.effect_majority_fraction:
        return PlotClassification(PlotVerdict.EFFECT_LINE, diagnostics)
    admissible = _admissible_below_alpha(
        n, config.alpha, config.uniform_count_level
    )
    if ks_p >= config.uniform_ks_threshold and below <= admissible:
        return PlotClassification(PlotVerdict.UNIFORM45, diagnostics)
    if fit is not None:
        split, total, slope1, slope2, single_rss = fit
        first_mean = math.fsum(ps[:split]) / split
        if (
            single_rss > 0.0
            and total <= (1.0 - config.bilinear_rss_reduction) * single_rss
            and first_mean < config.alpha
        ):
            return PlotClassification(PlotVerdict.BILINEAR, diagnostics)
    return PlotClassification(PlotVerdict.AMBIGUOUS, diagnostics)


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _svg_escape(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _render_svg(
    plot: PValuePlot,
    classification: PlotClassification | None,
    config: PlotConfig,
) -> str:
    left = float(config.margin)
    right = float(config.width - 24)
    top = 40.0
    bottom = float(config.height - config.margin)
    if right <= left or bottom <= top:
        raise ConfigError(
            f"render area is empty for width={config.width}, height={config.height}, "
            f"margin={config.margin}"
        )
    n = plot.n

    def x(rank: float) -> float:
        return left + (right - left) * rank / n

    def y(p: float) -> float:
        return bottom - (bottom - top) * p

    parts: list[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{config.width}" '
        f'height="{config.height}" viewBox="0 0 {config.width} {config.height}">'
    )
    parts.append(
        f'<rect x="0" y="0" width="{config.width}" height="{config.height}" fill="#ffffff"/>'
    )
    if config.title:
        parts.append(
            f'<text x="{_fmt((left + right) / 2)}" y="22" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14" fill="#000000">'
            f"{_svg_escape(config.title)}</text>"
        )
    parts.append(
        f'<path d="M {_fmt(left)} {_fmt(top)} L {_fmt(left)} {_fmt(bottom)} '
        f'L {_fmt(right)} {_fmt(bottom)}" fill="none" stroke="#000000" stroke-width="1"/>'
    )
    for tick in range(0, 11, 2):
        p = tick / 10.0
        yy = y(p)
        parts.append(
            f'<line x1="{_fmt(left - 4)}" y1="{_fmt(yy)}" x2="{_fmt(left)}" '
            f'y2="{_fmt(yy)}" stroke="#000000" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(left - 8)}" y="{_fmt(yy + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11" fill="#000000">{p:.1f}</text>'
        )
    step = max(1, math.ceil(n / 8))
    ticks = list(range(0, n + 1, step))
    if ticks[-1] != n:
        ticks.append(n)
    for tick in ticks:
        xx = x(tick)
        parts.append(
            f'<line x1="{_fmt(xx)}" y1="{_fmt(bottom)}" x2="{_fmt(xx)}" '
            f'y2="{_fmt(bottom + 4)}" stroke="#000000" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(xx)}" y="{_fmt(bottom + 16)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11" fill="#000000">{tick}</text>'
        )
    parts.append(
        f'<line x1="{_fmt(x(0))}" y1="{_fmt(y(0.0))}" x2="{_fmt(x(n))}" '
        f'y2="{_fmt(y(1.0))}" stroke="#999999" stroke-width="1"/>'
    )
    yy = y(plot.alpha)
    parts.append(
        f'<line x1="{_fmt(left)}" y1="{_fmt(yy)}" x2="{_fmt(right)}" y2="{_fmt(yy)}" '
        f'stroke="#aa2222" stroke-width="1" stroke-dasharray="5 4"/>'
    )
    parts.append(
        f'<text x="{_fmt(right)}" y="{_fmt(yy - 4)}" text-anchor="end" '
        f'font-family="sans-serif" font-size="11" fill="#aa2222">alpha = {plot.alpha:g}</text>'
    )
    radius = config.point_radius
    for (rank, p), is_negative in zip(plot.points, plot.negative):
        cx, cy = x(rank), y(p)
        if is_negative:
            r = radius + 1.0
            parts.append(
                f'<path d="M {_fmt(cx)} {_fmt(cy - r)} L {_fmt(cx + r)} {_fmt(cy)} '
                f'L {_fmt(cx)} {_fmt(cy + r)} L {_fmt(cx - r)} {_fmt(cy)} Z" '
                f'fill="#b83232"/>'
            )
        else:
            parts.append(
                f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(radius)}" fill="#2b6cb0"/>'
            )
    if any(plot.negative):
        ly = top + 8
        parts.append(
            f'<circle cx="{_fmt(left + 12)}" cy="{_fmt(ly)}" r="{_fmt(radius)}" fill="#2b6cb0"/>'
        )
        parts.append(
            f'<text x="{_fmt(left + 20)}" y="{_fmt(ly + 4)}" font-family="sans-serif" '
            f'font-size="11" fill="#000000">OR &gt;= 1</text>'
        )
        r = radius + 1.0
        lx = left + 84
        parts.append(
            f'<path d="M {_fmt(lx)} {_fmt(ly - r)} L {_fmt(lx + r)} {_fmt(ly)} '
            f'L {_fmt(lx)} {_fmt(ly + r)} L {_fmt(lx - r)} {_fmt(ly)} Z" fill="#b83232"/>'
        )
        parts.append(
            f'<text x="{_fmt(lx + 8)}" y="{_fmt(ly + 4)}" font-family="sans-serif" '
            f'font-size="11" fill="#000000">OR &lt; 1</text>'
        )
    parts.append(
        f'<text x="{_fmt((left + right) / 2)}" y="{_fmt(bottom + 34)}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="12" '
        f'fill="#000000">rank of p-value (ascending)</text>'
    )
    parts.append(
        f'<text x="16" y="{_fmt((top + bottom) / 2)}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" fill="#000000" '
        f'transform="rotate(-90 16 {_fmt((top + bottom) / 2)})">p-value</text>'
    )
    if classification is not None:
        d = classification.diagnostics
        note = (
            f"verdict: {classification.verdict.value} | KS p = {d.ks_p:.4f} | "
            f"{plot.n_below_alpha}/{n} below alpha"
        )
        parts.append(
            f'<text x="{_fmt(right)}" y="{_fmt(bottom - 8)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11" fill="#555555">'
            f"{_svg_escape(note)}</text>"
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _render_csv(plot: PValuePlot) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["rank", "label", "p_value", "below_alpha", "negative_effect"])
    for (rank, p), label, is_negative in zip(
        plot.points, plot.source_labels, plot.negative
    ):
        writer.writerow(
            [rank, label, repr(p), int(p < plot.alpha), int(is_negative)]
        )
    return buffer.getvalue()


def render_plot(
    plot: PValuePlot,
    classification: PlotClassification | None = None,
    config: PlotConfig = PlotConfig(),
    format: str = "svg",
) -> str:
    """Render a plot as an SVG document or a CSV table.

    Output depends only on the inputs, so repeated calls are byte
    identical. The SVG marks negative-direction sources with diamonds and
    draws the 45-degree uniform reference plus a dashed rule at alpha.
    """
    if format == "svg":
        return _render_svg(plot, classification, config)
    if format == "csv":
        return _render_csv(plot)
    raise DomainError(f"unknown render format: {format!r}")
