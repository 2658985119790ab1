"""Command line interface.

Usage examples:

    metaaudit convert studies.csv --method natural
    metaaudit pool studies.csv --model fixed --output pooled.json
    metaaudit plot studies.csv --method natural --outdir out
    metaaudit count ledger.csv --alpha 0.05
    metaaudit cohort --publications 107 --median-nh 13824
    metaaudit simulate --config sim.json --output report.json
    metaaudit reproduce --outdir out

Exit codes: 0 success, 1 unexpected failure or reproduction mismatch,
2 bad input (CSV format problems, domain errors, usage errors).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path
from typing import Any

from . import __version__
from .effects import ConversionMethod, p_from_effect
from .errors import AuditError, ConfigError
from .ingest import ingest_counts, ingest_effects
from .pooling import pool_dersimonian_laird, pool_fixed
from .pvplot import PlotConfig, classify_plot, plot_from_effects, render_plot
from .report import audit_report, canonical_json, file_digest, pooled_dict
from .reproduce import run_reproduction
from .search_space import expected_false_positives, cohort_false_positives, summarize_ledger
from .simulate import Scenario, SimulationConfig, run_simulation

_SIM_KEYS = frozenset(
    {"scenario", "k", "trials", "seed", "se_range", "log_or", "effect_fraction"}
)
_SIM_REQUIRED = ("scenario", "k", "trials", "seed")


def _print_error(message: str) -> None:
    prefix = "error:"
    if not os.environ.get("NO_COLOR") and sys.stderr.isatty():
        prefix = "\x1b[31merror:\x1b[0m"
    print(f"{prefix} {message}", file=sys.stderr)


def _write_text(output: str | None, text: str) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _cmd_convert(args: argparse.Namespace) -> int:
    effects = ingest_effects(args.input)
    method = ConversionMethod(args.method)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        [
            "study_label",
            "subgroup_label",
            "odds_ratio",
            "ci_low",
            "ci_high",
            "ci_level",
            "p_value",
        ]
    )
    for effect in effects:
        writer.writerow(
            [
                effect.study_label,
                effect.subgroup_label or "",
                repr(effect.odds_ratio),
                repr(effect.ci_low),
                repr(effect.ci_high),
                repr(effect.ci_level),
                repr(p_from_effect(effect, method)),
            ]
        )
    _write_text(args.output, buffer.getvalue())
    return 0


def _cmd_pool(args: argparse.Namespace) -> int:
    effects = ingest_effects(args.input)
    if args.model == "fixed":
        result = pool_fixed(effects, ci_level=args.level)
    else:
        result = pool_dersimonian_laird(effects, ci_level=args.level)
    payload = {
        "version": __version__,
        "input": file_digest(args.input, len(effects)),
        "result": pooled_dict(result),
    }
    _write_text(args.output, canonical_json(payload))
    return 0


def _cmd_plot(args: argparse.Namespace) -> int:
    path = Path(args.input)
    effects = ingest_effects(path)
    method = ConversionMethod(args.method)
    config = PlotConfig(alpha=args.alpha, title=path.stem)
    plot = plot_from_effects(effects, method, alpha=args.alpha)
    classification = classify_plot(plot, config)
    pooled = {
        "fixed": pooled_dict(pool_fixed(effects)),
        "dersimonian_laird": pooled_dict(pool_dersimonian_laird(effects)),
    }
    report = audit_report(
        file_digest(path, len(effects)),
        effects,
        pooled,
        plot,
        classification,
        config,
        method,
    )
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = {
        f"{path.stem}_plot.svg": render_plot(plot, classification, config, "svg"),
        f"{path.stem}_plot.csv": render_plot(plot, classification, config, "csv"),
        f"{path.stem}_audit.json": canonical_json(report),
    }
    for name, text in written.items():
        (outdir / name).write_text(text, encoding="utf-8")
    print(
        f"{path.stem}: {plot.n} p-values, {plot.n_below_alpha} below alpha, "
        f"verdict {classification.verdict.value}"
    )
    for name in written:
        print(f"wrote {outdir / name}")
    return 0


def _cmd_count(args: argparse.Namespace) -> int:
    studies = ingest_counts(args.input)
    summary = summarize_ledger(studies)
    payload = {
        "version": __version__,
        "input": file_digest(args.input, len(studies)),
        "alpha": args.alpha,
        "studies": [
            {
                "paper_label": study.paper_label,
                "region": study.region,
                "blocks": [
                    {
                        "block_label": block.block_label,
                        "outcomes": block.outcomes,
                        "predictors": block.predictors,
                        "covariates": block.covariates,
                        "search_space": block.search_space(),
                    }
                    for block in study.blocks
                ],
                "search_space": study.search_space(),
                "expected_false_positives": expected_false_positives(
                    study.search_space(), args.alpha
                ),
            }
            for study in studies
        ],
        "summary": {
            "n": summary.n,
            "minimum": summary.minimum,
            "lower_quartile": summary.lower_quartile,
            "median": summary.median,
            "upper_quartile": summary.upper_quartile,
            "maximum": summary.maximum,
            "mean": summary.mean,
            "mean_rounded": summary.mean_rounded(),
            "median_expected_false_positives": args.alpha * summary.median,
        },
    }
    _write_text(args.output, canonical_json(payload))
    return 0


def _cmd_cohort(args: argparse.Namespace) -> int:
    value = cohort_false_positives(args.publications, args.median_nh, args.alpha)
    payload = {
        "version": __version__,
        "publications": args.publications,
        "median_search_space": args.median_nh,
        "alpha": args.alpha,
        "expected_false_positives": value,
        "expected_false_positives_rounded": round(value),
    }
    _write_text(args.output, canonical_json(payload))
    return 0


def _load_sim_config(path: str) -> SimulationConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: simulation config must be a JSON object")
    unknown = sorted(set(raw) - _SIM_KEYS)
    if unknown:
        raise ConfigError(f"{path}: unknown config keys: {', '.join(unknown)}")
    missing = sorted(key for key in _SIM_REQUIRED if key not in raw)
    if missing:
        raise ConfigError(f"{path}: missing config keys: {', '.join(missing)}")
    try:
        scenario = Scenario(raw["scenario"])
    except ValueError:
        valid = ", ".join(s.value for s in Scenario)
        raise ConfigError(f"{path}: scenario must be one of: {valid}") from None
    kwargs: dict[str, Any] = {}
    if "se_range" in raw:
        se_range = raw["se_range"]
        if not isinstance(se_range, (list, tuple)) or len(se_range) != 2:
            raise ConfigError(f"{path}: se_range must be a [low, high] pair")
        kwargs["se_low"] = float(se_range[0])
        kwargs["se_high"] = float(se_range[1])
    if "log_or" in raw:
        kwargs["log_or"] = float(raw["log_or"])
    if "effect_fraction" in raw:
        kwargs["effect_fraction"] = float(raw["effect_fraction"])
    return SimulationConfig(
        scenario=scenario,
        k=raw["k"],
        trials=raw["trials"],
        seed=raw["seed"],
        **kwargs,
    )


def _cmd_simulate(args: argparse.Namespace) -> int:
    config = _load_sim_config(args.config)
    report = run_simulation(config)
    payload = {
        "version": __version__,
        "config": {
            "scenario": config.scenario.value,
            "k": config.k,
            "trials": config.trials,
            "seed": config.seed,
            "se_range": [config.se_low, config.se_high],
            "log_or": config.log_or,
            "effect_fraction": config.effect_fraction,
        },
        "verdict_counts": dict(report.verdict_counts),
        "mean_fraction_below_alpha": report.mean_fraction_below_alpha,
        "mean_ks_statistic": report.mean_ks_statistic,
        "mean_ks_p": report.mean_ks_p,
        "fraction_ks_pass": report.fraction_ks_pass,
    }
    _write_text(args.output, canonical_json(payload))
    return 0


def _cmd_reproduce(args: argparse.Namespace) -> int:
    diff = run_reproduction(args.outdir)
    summary = diff["summary"]
    outdir = Path(args.outdir)
    print(f"wrote {outdir / 'reproduction.json'} and 2 figure SVGs")
    print(
        f"gated checks: {summary['gated_passed']}/{summary['gated']} passed, "
        f"{summary['informational']} informational"
    )
    if not summary["all_gated_pass"]:
        for check in diff["checks"]:
            if check["gated"] and not check["pass"]:
                print(
                    f"  FAIL {check['name']}: computed {check['computed']!r}, "
                    f"expected {check['expected']!r} "
                    f"(|delta| {check['abs_delta']:.6g} > {check['tolerance']:.6g})"
                )
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metaaudit",
        description="Reliability audit toolkit for odds-ratio meta-analyses.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    convert = subparsers.add_parser(
        "convert", help="convert OR/CI rows to two-sided p-values (CSV out)"
    )
    convert.add_argument("input", help="effect CSV path")
    convert.add_argument(
        "--method",
        choices=[m.value for m in ConversionMethod],
        default=ConversionMethod.LOG.value,
        help="interval reading used to recover the standard error",
    )
    convert.add_argument("--output", default=None, help="output path (default stdout)")
    convert.set_defaults(func=_cmd_convert)

    pool = subparsers.add_parser(
        "pool", help="pool a study set with inverse-variance weights (JSON out)"
    )
    pool.add_argument("input", help="effect CSV path")
    pool.add_argument(
        "--model",
        choices=["fixed", "dl"],
        required=True,
        help="fixed effect or DerSimonian-Laird random effects",
    )
    pool.add_argument(
        "--level", type=float, default=0.95, help="confidence level (default 0.95)"
    )
    pool.add_argument("--output", default=None, help="output path (default stdout)")
    pool.set_defaults(func=_cmd_pool)

    plot = subparsers.add_parser(
        "plot", help="build, classify and render a p-value plot (SVG + CSV + JSON)"
    )
    plot.add_argument("input", help="effect CSV path")
    plot.add_argument(
        "--method",
        choices=[m.value for m in ConversionMethod],
        default=ConversionMethod.LOG.value,
        help="interval reading used to recover the standard error",
    )
    plot.add_argument(
        "--alpha", type=float, default=0.05, help="significance threshold"
    )
    plot.add_argument("--outdir", default=".", help="directory for the artifacts")
    plot.set_defaults(func=_cmd_plot)

    count = subparsers.add_parser(
        "count", help="per-paper multiple-testing search spaces (JSON out)"
    )
    count.add_argument("input", help="model-count CSV path")
    count.add_argument(
        "--alpha", type=float, default=0.05, help="false-positive rate per test"
    )
    count.add_argument("--output", default=None, help="output path (default stdout)")
    count.set_defaults(func=_cmd_count)

    cohort = subparsers.add_parser(
        "cohort", help="expected false positives across a publication cohort"
    )
    cohort.add_argument("--publications", type=int, required=True)
    cohort.add_argument(
        "--median-nh",
        type=int,
        required=True,
        help="median per-publication search space",
    )
    cohort.add_argument("--alpha", type=float, default=0.05)
    cohort.add_argument("--output", default=None, help="output path (default stdout)")
    cohort.set_defaults(func=_cmd_cohort)

    simulate = subparsers.add_parser(
        "simulate", help="seeded Monte Carlo calibration of the plot classifier"
    )
    simulate.add_argument(
        "--config",
        required=True,
        help="JSON config: scenario, k, trials, seed, se_range, log_or, effect_fraction",
    )
    simulate.add_argument("--output", default=None, help="output path (default stdout)")
    simulate.set_defaults(func=_cmd_simulate)

    reproduce = subparsers.add_parser(
        "reproduce",
        help="recompute the bundled datasets' reference numbers and diff them",
    )
    reproduce.add_argument(
        "--outdir", default=".", help="directory for reproduction.json and figures"
    )
    reproduce.set_defaults(func=_cmd_reproduce)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AuditError as exc:
        _print_error(str(exc))
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        _print_error(f"{type(exc).__name__}: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
