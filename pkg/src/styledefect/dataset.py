"""Per-release datasets: labels joined with feature vectors, CSV persistence and summaries."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Iterable, Sequence

from .errors import JoinError, SchemaError
from .repo import Release
from .style.metrics import METRIC_IDS, FeatureVector
from .szz import LABELS, FileLabel

SIGNIFICANT_DIGITS = 6


@dataclass(frozen=True)
class DatasetRow:
    path: str
    features: FeatureVector
    label: str


@dataclass(frozen=True)
class ReleaseDataset:
    release: Release
    rows: tuple[DatasetRow, ...]

    def __post_init__(self):
        paths = [r.path for r in self.rows]
        if len(set(paths)) != len(paths):
            raise ValueError(f"duplicate paths in dataset {self.release.label}")
        for r in self.rows:
            if r.label not in LABELS:
                raise ValueError(f"bad label {r.label!r} for {r.path}")

    @property
    def buggy_count(self) -> int:
        return sum(r.label == "buggy" for r in self.rows)

    def matrix(self) -> list[list[float]]:
        return [list(r.features.values) for r in self.rows]

    def labels(self) -> list[str]:
        return [r.label for r in self.rows]


@dataclass(frozen=True)
class DatasetSummary:
    release_label: str
    total_files: int
    buggy_files: int
    pct_buggy: Decimal

    def to_json(self) -> dict:
        return {"release": self.release_label, "total_files": self.total_files,
                "buggy_files": self.buggy_files, "pct_buggy": float(self.pct_buggy)}


def assemble(release: Release, labels: Iterable[FileLabel],
             features: Iterable[tuple[str, FeatureVector]]) -> ReleaseDataset:
    """Inner join on path; every label needs a vector and vice versa."""
    by_label = {lab.path: lab.label for lab in labels}
    by_feature = dict(features)
    missing_features = sorted(set(by_label) - set(by_feature))
    missing_labels = sorted(set(by_feature) - set(by_label))
    if missing_features or missing_labels:
        parts = []
        if missing_features:
            parts.append("no features for " + ", ".join(missing_features))
        if missing_labels:
            parts.append("no label for " + ", ".join(missing_labels))
        raise JoinError(f"{release.label}: " + "; ".join(parts), missing_features, missing_labels)
    rows = tuple(DatasetRow(p, by_feature[p], by_label[p]) for p in sorted(by_label))
    return ReleaseDataset(release, rows)


def percent_half_up(part: int, whole: int) -> Decimal:
    if whole == 0:
        return Decimal("0.00")
    return (Decimal(100) * part / Decimal(whole)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)


def summarize_counts(release_label: str, total: int, buggy: int) -> DatasetSummary:
    if not 0 <= buggy <= total:
        raise ValueError("need 0 <= buggy <= total")
    return DatasetSummary(release_label, total, buggy, percent_half_up(buggy, total))


def summarize(dataset: ReleaseDataset) -> DatasetSummary:
    return summarize_counts(dataset.release.label, len(dataset.rows), dataset.buggy_count)


def write_summaries(summaries: Sequence[DatasetSummary], path: str | Path):
    payload = [s.to_json() for s in summaries]
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


# -- CSV ---------------------------------------------------------------------

def format_value(x: float) -> str:
    """Decimal text with 6 significant digits, no exponent for ordinary magnitudes."""
    if not math.isfinite(x):
        raise ValueError(f"non-finite metric value {x}")
    if x == 0:
        return "0"
    text = f"{x:.{SIGNIFICANT_DIGITS}g}"
    if "e" in text:
        digits = max(0, SIGNIFICANT_DIGITS - 1 - math.floor(math.log10(abs(x))))
        text = f"{float(text):.{digits}f}"
        if "." in text:
            text = text.rstrip("0").rstrip(".")
    return text


def _feature_header() -> list[str]:
    return ["release", "path", *METRIC_IDS]


def _check_header(header: list[str] | None, expected: list[str], path) -> None:
    if header is None:
        raise SchemaError(f"{path}: empty file, expected header", line=1)
    for i, want in enumerate(expected):
        got = header[i] if i < len(header) else None
        if got != want:
            raise SchemaError(f"{path}: header column {i + 1} is {got!r}, expected {want!r}",
                              column=want if got is None else got, line=1)
    if len(header) > len(expected):
        raise SchemaError(f"{path}: unexpected extra column {header[len(expected)]!r}",
                          column=header[len(expected)], line=1)


def _parse_values(row: list[str], start: int, lineno: int, path) -> FeatureVector:
    values = []
    for col, text in zip(METRIC_IDS, row[start:start + len(METRIC_IDS)]):
        try:
            v = float(text)
        except ValueError:
            raise SchemaError(f"{path}:{lineno}: column {col} is not a number: {text!r}",
                              column=col, line=lineno) from None
        if not math.isfinite(v):
            raise SchemaError(f"{path}:{lineno}: column {col} is not finite", column=col, line=lineno)
        values.append(v)
    return FeatureVector(tuple(values))


def write_features(release_label: str, features: Iterable[tuple[str, FeatureVector]], path: str | Path):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_feature_header())
        for p, vec in sorted(features, key=lambda pv: pv[0]):
            w.writerow([release_label, p, *(format_value(x) for x in vec.values)])


def read_features(path: str | Path) -> tuple[str | None, list[tuple[str, FeatureVector]]]:
    """Returns the release label (None for an empty table) and the (path, vector) rows."""
    expected = _feature_header()
    release = None
    out = []
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        _check_header(next(reader, None), expected, path)
        for lineno, row in enumerate(reader, 2):
            if len(row) != len(expected):
                raise SchemaError(f"{path}:{lineno}: expected {len(expected)} fields, got {len(row)}",
                                  line=lineno)
            release = row[0]
            out.append((row[1], _parse_values(row, 2, lineno, path)))
    return release, out


def _dataset_header() -> list[str]:
    return [*_feature_header(), "label"]


def write_dataset(dataset: ReleaseDataset, path: str | Path):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_dataset_header())
        for r in dataset.rows:
            w.writerow([dataset.release.label, r.path, *(format_value(x) for x in r.features.values), r.label])


def read_dataset(path: str | Path, release: Release | None = None) -> ReleaseDataset:
    """Read a dataset CSV.  Without ``release`` a placeholder is built from the release column."""
    expected = _dataset_header()
    rows = []
    label_seen = None
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        _check_header(next(reader, None), expected, path)
        for lineno, row in enumerate(reader, 2):
            if len(row) != len(expected):
                raise SchemaError(f"{path}:{lineno}: expected {len(expected)} fields, got {len(row)}",
                                  line=lineno)
            label = row[-1].strip().lower()
            if label not in LABELS:
                raise SchemaError(f"{path}:{lineno}: label must be buggy or clean, got {row[-1]!r}",
                                  column="label", line=lineno)
            label_seen = row[0]
            rows.append(DatasetRow(row[1], _parse_values(row, 2, lineno, path), label))
    if release is None:
        name = label_seen if label_seen is not None else Path(path).stem
        release = Release(timestamp=0, project=name.rsplit("-", 1)[0], label=name, commit_id="")
    paths = [r.path for r in rows]
    if len(set(paths)) != len(paths):
        raise SchemaError(f"{path}: duplicate path rows")
    return ReleaseDataset(release, tuple(sorted(rows, key=lambda r: r.path)))
