"""Token accuracy and exact-match span precision/recall/F1.

Span extraction follows the conlleval conventions for IOB data: B-x always
opens a span; an I-x that follows O, the sentence start, or a span of a
different type is repaired to open a new span; spans close before O, before
any B-, and at type changes. A predicted span counts as correct only when
start, end and type all match a gold span of the same sentence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal

from .data import LabelScheme, LabelSchemeError


@dataclass(frozen=True)
class Span:
    start: int   # token index, inclusive
    end: int     # token index, inclusive
    label: str   # base label (no B-/I- prefix)


@dataclass
class MetricCounts:
    gold: int = 0
    predicted: int = 0
    correct: int = 0

    @property
    def precision(self) -> float:
        return 100.0 * self.correct / self.predicted if self.predicted else 0.0

    @property
    def recall(self) -> float:
        return 100.0 * self.correct / self.gold if self.gold else 0.0

    @property
    def f1(self) -> float:
        return f1_score(self.precision, self.recall)


@dataclass
class EvalReport:
    overall: MetricCounts
    per_label: dict[str, MetricCounts] = field(default_factory=dict)
    accuracy: float | None = None  # token accuracy, when label sequences known
    token_count: int = 0


def f1_score(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall (percentages); 0 when both 0."""
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def accuracy(gold_seqs, pred_seqs) -> float:
    """Percentage of correctly labeled tokens across all sentences."""
    if len(gold_seqs) != len(pred_seqs):
        raise ValueError(
            f"got {len(gold_seqs)} gold but {len(pred_seqs)} predicted sentences"
        )
    correct = total = 0
    for i, (gold, pred) in enumerate(zip(gold_seqs, pred_seqs)):
        if len(gold) != len(pred):
            raise ValueError(f"sentence {i}: length mismatch {len(gold)} vs {len(pred)}")
        total += len(gold)
        correct += sum(1 for g, p in zip(gold, pred) if g == p)
    return 100.0 * correct / total if total else 0.0


def extract_spans(labels, scheme: LabelScheme) -> list[Span]:
    """Maximal IOB spans of one sentence, with conlleval repair applied."""
    spans: list[Span] = []
    open_start: int | None = None
    open_label: str | None = None

    def close(end):
        nonlocal open_start, open_label
        if open_start is not None:
            spans.append(Span(open_start, end, open_label))
            open_start = open_label = None

    for i, lab in enumerate(labels):
        if lab not in scheme:
            raise LabelSchemeError(
                f"label {lab!r} is not in the {scheme.task} label scheme"
            )
        if lab == "O":
            close(i - 1)
        elif lab.startswith("B-"):
            close(i - 1)
            open_start, open_label = i, lab[2:]
        else:  # I-x: continues a same-type span, otherwise repaired to a start
            kind = lab[2:]
            if open_label != kind:
                close(i - 1)
                open_start, open_label = i, kind
    close(len(labels) - 1)
    return spans


def _count_matches(gold_spans, pred_spans, counts_by_label):
    gold_set = set(gold_spans)
    for s in gold_spans:
        counts_by_label.setdefault(s.label, MetricCounts()).gold += 1
    for s in pred_spans:
        c = counts_by_label.setdefault(s.label, MetricCounts())
        c.predicted += 1
        if s in gold_set:
            c.correct += 1


def prf1(gold_spans, pred_spans) -> EvalReport:
    """Exact-match precision/recall/F1 over two span collections."""
    per_label: dict[str, MetricCounts] = {}
    _count_matches(list(gold_spans), list(pred_spans), per_label)
    overall = MetricCounts(
        gold=sum(c.gold for c in per_label.values()),
        predicted=sum(c.predicted for c in per_label.values()),
        correct=sum(c.correct for c in per_label.values()),
    )
    return EvalReport(overall=overall, per_label=dict(sorted(per_label.items())))


def evaluate_spans(gold_seqs, pred_seqs, scheme: LabelScheme) -> EvalReport:
    """Corpus-level span evaluation over aligned label sequences."""
    if len(gold_seqs) != len(pred_seqs):
        raise ValueError(
            f"got {len(gold_seqs)} gold but {len(pred_seqs)} predicted sentences"
        )
    per_label: dict[str, MetricCounts] = {}
    total = correct_tokens = 0
    for i, (gold, pred) in enumerate(zip(gold_seqs, pred_seqs)):
        if len(gold) != len(pred):
            raise ValueError(f"sentence {i}: length mismatch {len(gold)} vs {len(pred)}")
        _count_matches(extract_spans(gold, scheme), extract_spans(pred, scheme), per_label)
        total += len(gold)
        correct_tokens += sum(1 for g, p in zip(gold, pred) if g == p)
    overall = MetricCounts(
        gold=sum(c.gold for c in per_label.values()),
        predicted=sum(c.predicted for c in per_label.values()),
        correct=sum(c.correct for c in per_label.values()),
    )
    report = EvalReport(overall=overall, per_label=dict(sorted(per_label.items())))
    report.token_count = total
    report.accuracy = 100.0 * correct_tokens / total if total else 0.0
    return report


def spans_to_labels(spans, length: int) -> list[str]:
    """Inverse of extract_spans for non-overlapping spans (IOB2 output)."""
    labels = ["O"] * length
    for span in spans:
        labels[span.start] = f"B-{span.label}"
        for i in range(span.start + 1, span.end + 1):
            labels[i] = f"I-{span.label}"
    return labels


def round2(value: float) -> float:
    """Half-up rounding to two decimals, as printed in reports."""
    return float(Decimal(repr(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def format_report(report: EvalReport) -> str:
    """conlleval-style text rendering."""
    lines = []
    o = report.overall
    head = (
        f"processed {report.token_count} tokens with {o.gold} phrases; "
        f"found: {o.predicted} phrases; correct: {o.correct}."
    )
    lines.append(head)
    acc = f"accuracy: {round2(report.accuracy):6.2f}%; " if report.accuracy is not None else ""
    lines.append(
        f"{acc}precision: {round2(o.precision):6.2f}%; "
        f"recall: {round2(o.recall):6.2f}%; FB1: {round2(o.f1):6.2f}"
    )
    for label, c in report.per_label.items():
        lines.append(
            f"{label:>17}: precision: {round2(c.precision):6.2f}%; "
            f"recall: {round2(c.recall):6.2f}%; FB1: {round2(c.f1):6.2f}  {c.predicted}"
        )
    return "\n".join(lines)
