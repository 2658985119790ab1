"""CSV ingestion for study effects and model-count ledgers.

Effect files require the columns

    study_label,subgroup_label,odds_ratio,ci_low,ci_high

plus an optional ci_level column (blank cells default to 0.95). Count
files require

    paper_label,region,block_label,outcomes,predictors,covariates

where rows sharing a paper_label form that paper's blocks. Column order
does not matter and unknown extra columns are ignored, which lets emitted
CSVs (input columns plus derived ones) round-trip through ingestion.

Validation rejects whole files: every offending cell is reported as
file:line:column before a CsvFormatError is raised. A file with a valid
header but no data rows raises EmptyInputError.
"""

from __future__ import annotations

import csv
from pathlib import Path

from .effects import EffectEstimate
from .errors import AuditError, CsvFormatError, EmptyInputError
from .search_space import CountBlock, StudyCounts, block_search_space

EFFECT_COLUMNS = ("study_label", "subgroup_label", "odds_ratio", "ci_low", "ci_high")
COUNT_COLUMNS = (
    "paper_label",
    "region",
    "block_label",
    "outcomes",
    "predictors",
    "covariates",
)


def _open_rows(path: Path, required: tuple[str, ...]) -> tuple[list[dict[str, str]], list[int]]:
    """Parse a CSV into dict rows, checking the header. Returns rows and
    the csv-reader line number of each row."""
    name = path.name
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyInputError(f"{name}: file is empty") from None
        header = [column.strip() for column in header]
        missing = [column for column in required if column not in header]
        if missing:
            raise CsvFormatError(
                name, [(1, column, "required column is missing") for column in missing]
            )
        rows = []
        lines = []
        for record in reader:
            if not record or all(not cell.strip() for cell in record):
                continue
            row = {
                column: (record[i].strip() if i < len(record) else "")
                for i, column in enumerate(header)
            }
            rows.append(row)
            lines.append(reader.line_num)
    if not rows:
        raise EmptyInputError(f"{name}: no data rows after the header")
    return rows, lines


def _parse_float(row: dict[str, str], column: str) -> float:
    text = row.get(column, "")
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"{text!r} is not a number") from None


def _parse_int(row: dict[str, str], column: str) -> int:
    text = row.get(column, "")
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"{text!r} is not an integer") from None


def ingest_effects(path: str | Path) -> list[EffectEstimate]:
    """Load study effect records, preserving file order."""
    path = Path(path)
    rows, lines = _open_rows(path, EFFECT_COLUMNS)
    effects = []
    diagnostics: list[tuple[int, str, str]] = []
    for row, line in zip(rows, lines):
        fields: dict[str, object] = {}
        bad = False
        if not row.get("study_label", ""):
            diagnostics.append((line, "study_label", "must not be empty"))
            bad = True
        for column in ("odds_ratio", "ci_low", "ci_high"):
            try:
                fields[column] = _parse_float(row, column)
            except ValueError as exc:
                diagnostics.append((line, column, str(exc)))
                bad = True
        level_text = row.get("ci_level", "")
        if level_text:
            try:
                fields["ci_level"] = _parse_float(row, "ci_level")
            except ValueError as exc:
                diagnostics.append((line, "ci_level", str(exc)))
                bad = True
        if bad:
            continue
        try:
            effects.append(
                EffectEstimate(
                    study_label=row["study_label"],
                    odds_ratio=fields["odds_ratio"],
                    ci_low=fields["ci_low"],
                    ci_high=fields["ci_high"],
                    subgroup_label=row.get("subgroup_label") or None,
                    ci_level=fields.get("ci_level", 0.95),
                )
            )
        except AuditError as exc:
            diagnostics.append((line, "odds_ratio", str(exc)))
    if diagnostics:
        raise CsvFormatError(path.name, diagnostics)
    return effects


def ingest_counts(path: str | Path) -> list[StudyCounts]:
    """Load model-count records, grouping rows by paper_label.

    Papers keep their first-appearance order; a paper's region must agree
    across its rows.
    """
    path = Path(path)
    rows, lines = _open_rows(path, COUNT_COLUMNS)
    diagnostics: list[tuple[int, str, str]] = []
    order: list[str] = []
    regions: dict[str, str] = {}
    blocks: dict[str, list[CountBlock]] = {}
    for row, line in zip(rows, lines):
        label = row.get("paper_label", "")
        if not label:
            diagnostics.append((line, "paper_label", "must not be empty"))
            continue
        counts: dict[str, int] = {}
        bad = False
        for column in ("outcomes", "predictors", "covariates"):
            try:
                counts[column] = _parse_int(row, column)
            except ValueError as exc:
                diagnostics.append((line, column, str(exc)))
                bad = True
        if bad:
            continue
        try:
            block_search_space(**counts)
        except AuditError as exc:
            diagnostics.append((line, "covariates", str(exc)))
            continue
        region = row.get("region", "")
        if label not in regions:
            order.append(label)
            regions[label] = region
            blocks[label] = []
        elif regions[label] != region:
            diagnostics.append(
                (line, "region", f"conflicts with earlier region {regions[label]!r}")
            )
            continue
        blocks[label].append(
            CountBlock(
                block_label=row.get("block_label", ""),
                outcomes=counts["outcomes"],
                predictors=counts["predictors"],
                covariates=counts["covariates"],
            )
        )
    if diagnostics:
        raise CsvFormatError(path.name, diagnostics)
    return [
        StudyCounts(paper_label=label, region=regions[label], blocks=tuple(blocks[label]))
        for label in order
    ]
