"""Canonical JSON serialization and report assembly.

All JSON artifacts are emitted with sorted keys and floats rounded to six
significant digits, so a report's bytes depend only on its content. Ints
(including exact search-space counts) pass through untouched.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .effects import ConversionMethod, EffectEstimate, p_from_effect
from .errors import DomainError
from .pooling import PooledResult
from .pvplot import PlotClassification, PlotConfig, PValuePlot


def _canonical_value(value: Any) -> Any:
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise DomainError(f"cannot serialize non-finite float {value!r}")
        return float(f"{value:.6g}")
    if isinstance(value, dict):
        return {str(k): _canonical_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_canonical_value(v) for v in value]
    raise DomainError(f"cannot serialize {type(value).__name__} to canonical JSON")


def canonical_json(payload: Any) -> str:
    """Deterministic JSON text: sorted keys, 6 significant digit floats."""
    return json.dumps(_canonical_value(payload), sort_keys=True, indent=2) + "\n"


def file_digest(path: str | Path, rows: int) -> dict[str, Any]:
    """Input provenance: file name, data-row count, content hash."""
    path = Path(path)
    digest = hashlib.sha256(path.read_bytes()).hexdigest()
    return {"file": path.name, "rows": rows, "sha256": digest}


def conversion_rows(effects: Sequence[EffectEstimate]) -> list[dict[str, Any]]:
    """Per-row conversions under both conventions."""
    return [
        {
            "study_label": e.study_label,
            "subgroup_label": e.subgroup_label,
            "odds_ratio": e.odds_ratio,
            "ci_low": e.ci_low,
            "ci_high": e.ci_high,
            "ci_level": e.ci_level,
            "p_natural": p_from_effect(e, ConversionMethod.NATURAL),
            "p_log": p_from_effect(e, ConversionMethod.LOG),
        }
        for e in effects
    ]


def pooled_dict(result: PooledResult) -> dict[str, Any]:
    return {
        "k": result.k,
        "pooled_log_or": result.pooled_log_or,
        "pooled_se": result.pooled_se,
        "pooled_or": result.pooled_or,
        "ci_low": result.ci_low,
        "ci_high": result.ci_high,
        "ci_level": result.ci_level,
        "p_value": result.p_value,
        "q_statistic": result.q_statistic,
        "tau_squared": result.tau_squared,
        "i_squared": result.i_squared,
        "method": result.method.value,
    }


def classification_dict(classification: PlotClassification) -> dict[str, Any]:
    d = classification.diagnostics
    return {
        "verdict": classification.verdict.value,
        "diagnostics": {
            "ks_statistic": d.ks_statistic,
            "ks_p": d.ks_p,
            "fraction_below_alpha": d.fraction_below_alpha,
            "changepoint_index": d.changepoint_index,
            "segment_slopes": list(d.segment_slopes) if d.segment_slopes else None,
        },
    }


def plot_dict(plot: PValuePlot) -> dict[str, Any]:
    return {
        "n": plot.n,
        "n_below_alpha": plot.n_below_alpha,
        "alpha": plot.alpha,
        "points": [
            {"rank": rank, "label": label, "p_value": p, "negative_effect": neg}
            for (rank, p), label, neg in zip(
                plot.points, plot.source_labels, plot.negative
            )
        ],
    }


def config_dict(config: PlotConfig) -> dict[str, Any]:
    return {
        "alpha": config.alpha,
        "uniform_ks_threshold": config.uniform_ks_threshold,
        "uniform_count_level": config.uniform_count_level,
        "effect_majority_fraction": config.effect_majority_fraction,
        "bilinear_min_segment": config.bilinear_min_segment,
        "bilinear_rss_reduction": config.bilinear_rss_reduction,
        "min_points": config.min_points,
    }


def audit_report(
    digest: dict[str, Any],
    effects: Sequence[EffectEstimate],
    pooled: dict[str, dict[str, Any]],
    plot: PValuePlot,
    classification: PlotClassification,
    config: PlotConfig,
    method: ConversionMethod,
) -> dict[str, Any]:
    """Full audit of one study set, every number regenerable from inputs."""
    return {
        "version": __version__,
        "input": digest,
        "method": method.value,
        "config": config_dict(config),
        "conversions": conversion_rows(effects),
        "pooled": pooled,
        "plot": plot_dict(plot),
        "classification": classification_dict(classification),
    }
