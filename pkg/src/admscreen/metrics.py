"""Confusion matrices and the evaluation metric suite.

Matrices are 3x3 with rows = predicted class and columns = actual class,
both in the canonical (negative, neutral, positive) order. Binary metric
formulas apply per class one-vs-rest: for class c, TP is the diagonal cell,
FP the rest of its row, FN the rest of its column.

Zero-denominator metrics are carried as None (an explicit undefined flag),
never as 0 or NaN; weighted averages count an undefined class's support in
the denominator while contributing 0, and the report says so.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .corpus import CLASS_ORDER, SentimentLabel

Cell = tuple[int, int, int]


@dataclass(frozen=True)
class ConfusionMatrix3:
    """3x3 count matrix, predicted rows x actual columns, canonical order."""

    counts: tuple[Cell, Cell, Cell]

    def __post_init__(self):
        if len(self.counts) != 3 or any(len(row) != 3 for row in self.counts):
            raise ValueError("confusion matrix must be 3x3")
        if any(cell < 0 for row in self.counts for cell in row):
            raise ValueError("confusion matrix cells must be non-negative")

    @property
    def total(self) -> int:
        return sum(cell for row in self.counts for cell in row)

    @property
    def trace(self) -> int:
        return sum(self.counts[i][i] for i in range(3))

    def row_sum(self, index: int) -> int:
        return sum(self.counts[index])

    def column_sum(self, index: int) -> int:
        return sum(self.counts[row][index] for row in range(3))

    def supports(self) -> tuple[int, int, int]:
        """Actual-class supports (column sums)."""
        return tuple(self.column_sum(i) for i in range(3))  # type: ignore[return-value]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "ConfusionMatrix3":
        return cls(tuple(tuple(int(cell) for cell in row) for row in rows))  # type: ignore[arg-type]


@dataclass(frozen=True)
class PerClassMetrics:
    label: SentimentLabel
    precision: float | None
    recall: float | None
    f1: float | None
    support: int


@dataclass(frozen=True)
class WeightedMetrics:
    weighted_precision: float | None
    weighted_recall: float | None
    weighted_f1: float | None
    accuracy: float | None


@dataclass(frozen=True)
class CrossRates:
    """P(predicted positive | actual negative) and the reverse direction."""

    pred_positive_given_actual_negative: float | None
    pred_negative_given_actual_positive: float | None


@dataclass(frozen=True)
class RunMetadata:
    classifier_id: str
    dataset_id: str
    timestamp: str
    seed: int | None = None
    fraction: float | None = None


@dataclass(frozen=True)
class EvalReport:
    matrix: ConfusionMatrix3
    per_class: tuple[PerClassMetrics, PerClassMetrics, PerClassMetrics]
    weighted: WeightedMetrics
    cross_rates: CrossRates
    metadata: RunMetadata
    has_undefined: bool = field(default=False)


def build_confusion_matrix(
    pairs: Iterable[tuple[SentimentLabel, SentimentLabel]],
) -> ConfusionMatrix3:
    """Count (predicted, actual) pairs into a matrix."""
    index = {label: i for i, label in enumerate(CLASS_ORDER)}
    counts = [[0, 0, 0], [0, 0, 0], [0, 0, 0]]
    for predicted, actual in pairs:
        counts[index[predicted]][index[actual]] += 1
    return ConfusionMatrix3.from_rows(counts)


def _ratio(numerator: int, denominator: int) -> float | None:
    if denominator == 0:
        return None
    return numerator / denominator


def per_class_metrics(
    matrix: ConfusionMatrix3,
) -> tuple[PerClassMetrics, PerClassMetrics, PerClassMetrics]:
    """One-vs-rest precision/recall/F1 per class.

    precision = TP/(TP+FP), recall = TP/(TP+FN),
    f1 = 2*precision*recall/(precision+recall); any zero denominator
    makes the value undefined (None).
    """
    results = []
    for i, label in enumerate(CLASS_ORDER):
        tp = matrix.counts[i][i]
        precision = _ratio(tp, matrix.row_sum(i))
        recall = _ratio(tp, matrix.column_sum(i))
        if precision is None or recall is None or precision + recall == 0:
            f1 = None
        else:
            f1 = 2 * precision * recall / (precision + recall)
        results.append(
            PerClassMetrics(
                label=label,
                precision=precision,
                recall=recall,
                f1=f1,
                support=matrix.column_sum(i),
            )
        )
    return tuple(results)  # type: ignore[return-value]


def overall_accuracy(matrix: ConfusionMatrix3) -> float | None:
    """Trace over total; None for an empty matrix."""
    return _ratio(matrix.trace, matrix.total)


def weighted_metrics(matrix: ConfusionMatrix3) -> WeightedMetrics:
    """Support-weighted averages of the per-class metrics.

    Undefined per-class values contribute 0 while their support stays in the
    denominator. Weighted recall is computed as trace/total, which the
    support-weighted average reduces to algebraically; doing it that way
    keeps the recall==accuracy identity exact in floating point.
    """
    total = matrix.total
    if total == 0:
        return WeightedMetrics(None, None, None, None)
    per_class = per_class_metrics(matrix)
    supports = matrix.supports()

    def weighted(values: Sequence[float | None]) -> float:
        return sum(
            (value or 0.0) * support for value, support in zip(values, supports)
        ) / total

    accuracy = matrix.trace / total
    return WeightedMetrics(
        weighted_precision=weighted([m.precision for m in per_class]),
        weighted_recall=accuracy,
        weighted_f1=weighted([m.f1 for m in per_class]),
        accuracy=accuracy,
    )


def cross_misclassification_rates(matrix: ConfusionMatrix3) -> CrossRates:
    """Rates of the two polar confusions (positive<->negative)."""
    neg, pos = 0, 2
    return CrossRates(
        pred_positive_given_actual_negative=_ratio(
            matrix.counts[pos][neg], matrix.column_sum(neg)
        ),
        pred_negative_given_actual_positive=_ratio(
            matrix.counts[neg][pos], matrix.column_sum(pos)
        ),
    )


def build_eval_report(
    pairs: Iterable[tuple[SentimentLabel, SentimentLabel]],
    metadata: RunMetadata,
) -> EvalReport:
    """Full report from (predicted, actual) pairs; every number derives from
    the matrix and can be recomputed from it."""
    matrix = build_confusion_matrix(pairs)
    return report_from_matrix(matrix, metadata)


def report_from_matrix(matrix: ConfusionMatrix3, metadata: RunMetadata) -> EvalReport:
    per_class = per_class_metrics(matrix)
    weighted = weighted_metrics(matrix)
    cross = cross_misclassification_rates(matrix)
    undefined = any(
        value is None
        for m in per_class
        for value in (m.precision, m.recall, m.f1)
    ) or weighted.accuracy is None or None in (
        cross.pred_positive_given_actual_negative,
        cross.pred_negative_given_actual_positive,
    )
    return EvalReport(
        matrix=matrix,
        per_class=per_class,
        weighted=weighted,
        cross_rates=cross,
        metadata=metadata,
        has_undefined=undefined,
    )


def format4(value: float | None) -> str:
    """Display formatting: 4 decimals, round-half-even; undefined as n/a."""
    return "n/a" if value is None else f"{value:.4f}"


def report_to_dict(report: EvalReport) -> dict:
    """JSON-ready nested dict; `display` holds the 4-decimal strings so
    consumers can show figures without re-rounding them."""
    labels = [label.value for label in CLASS_ORDER]
    weighted = report.weighted
    cross = report.cross_rates
    return {
        "schema_version": 1,
        "metadata": {
            "classifier_id": report.metadata.classifier_id,
            "dataset_id": report.metadata.dataset_id,
            "timestamp": report.metadata.timestamp,
            "seed": report.metadata.seed,
            "fraction": report.metadata.fraction,
        },
        "matrix": {
            "order": "rows=predicted, columns=actual",
            "labels": labels,
            "counts": [list(row) for row in report.matrix.counts],
            "total": report.matrix.total,
        },
        "per_class": [
            {
                "label": m.label.value,
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
                "support": m.support,
            }
            for m in report.per_class
        ],
        "weighted": {
            "precision": weighted.weighted_precision,
            "recall": weighted.weighted_recall,
            "f1": weighted.weighted_f1,
        },
        "accuracy": weighted.accuracy,
        "cross_rates": {
            "pred_positive_given_actual_negative": cross.pred_positive_given_actual_negative,
            "pred_negative_given_actual_positive": cross.pred_negative_given_actual_positive,
        },
        "has_undefined": report.has_undefined,
        "display": {
            "accuracy": format4(weighted.accuracy),
            "weighted_precision": format4(weighted.weighted_precision),
            "weighted_recall": format4(weighted.weighted_recall),
            "weighted_f1": format4(weighted.weighted_f1),
            "per_class": {
                m.label.value: {
                    "precision": format4(m.precision),
                    "recall": format4(m.recall),
                    "f1": format4(m.f1),
                }
                for m in report.per_class
            },
            "cross_rates": [
                format4(cross.pred_positive_given_actual_negative),
                format4(cross.pred_negative_given_actual_positive),
            ],
        },
    }


REPORT_FORMATS = ("json", "csv", "text-table")


def render_report(report: EvalReport, fmt: str) -> bytes:
    """Serialize a report deterministically as json, csv, or text-table."""
    if fmt == "json":
        return (json.dumps(report_to_dict(report), ensure_ascii=False, indent=2) + "\n").encode(
            "utf-8"
        )
    if fmt == "csv":
        return _render_csv(report)
    if fmt == "text-table":
        return _render_text_table(report)
    raise ValueError(f"unknown report format {fmt!r} (expected one of {REPORT_FORMATS})")


def _render_csv(report: EvalReport) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["row", "label", "precision", "recall", "f1", "support"])
    for m in report.per_class:
        writer.writerow(
            ["class", m.label.value, format4(m.precision), format4(m.recall), format4(m.f1), m.support]
        )
    weighted = report.weighted
    writer.writerow(
        [
            "weighted",
            "all",
            format4(weighted.weighted_precision),
            format4(weighted.weighted_recall),
            format4(weighted.weighted_f1),
            report.matrix.total,
        ]
    )
    writer.writerow(["accuracy", "all", format4(weighted.accuracy), "", "", report.matrix.total])
    return buffer.getvalue().encode("utf-8")


def _render_text_table(report: EvalReport) -> bytes:
    labels = [label.value for label in CLASS_ORDER]
    width = max(len(name) for name in labels + ["predicted\\actual"]) + 2
    lines = ["Confusion matrix (rows = predicted, columns = actual)"]
    header = "predicted\\actual".ljust(width) + "".join(name.rjust(10) for name in labels)
    lines.append(header)
    for i, name in enumerate(labels):
        row = name.ljust(width) + "".join(str(cell).rjust(10) for cell in report.matrix.counts[i])
        lines.append(row)
    lines.append("")
    lines.append("Per-class metrics")
    lines.append(
        "class".ljust(width)
        + "precision".rjust(10)
        + "recall".rjust(10)
        + "f1".rjust(10)
        + "support".rjust(10)
    )
    for m in report.per_class:
        lines.append(
            m.label.value.ljust(width)
            + format4(m.precision).rjust(10)
            + format4(m.recall).rjust(10)
            + format4(m.f1).rjust(10)
            + str(m.support).rjust(10)
        )
    weighted = report.weighted
    lines.append("")
    lines.append(
        "accuracy {}  weighted precision {}  weighted recall {}  weighted f1 {}".format(
            format4(weighted.accuracy),
            format4(weighted.weighted_precision),
            format4(weighted.weighted_recall),
            format4(weighted.weighted_f1),
        )
    )
    cross = report.cross_rates
    lines.append(
        "P(pred positive | actual negative) {}  P(pred negative | actual positive) {}".format(
            format4(cross.pred_positive_given_actual_negative),
            format4(cross.pred_negative_given_actual_positive),
        )
    )
    return ("\n".join(lines) + "\n").encode("utf-8")
