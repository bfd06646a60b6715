"""Classification metrics (confusion counts, P/R/F1) and ROUGE-N scoring."""

from collections import Counter
from dataclasses import dataclass

from .errors import DataError
from .text import tokenize


@dataclass
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def add(self, other: "ConfusionCounts") -> None:
        self.tp += other.tp
        self.fp += other.fp
        self.fn += other.fn
        self.tn += other.tn

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def as_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn}


@dataclass
class PrfScores:
    precision: float
    recall: float
    f1: float

    def as_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


@dataclass
class RougeScore:
    n: int
    recall: float
    precision: float
    f1: float

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "recall": self.recall,
            "precision": self.precision,
            "f1": self.f1,
        }


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def prf(counts: ConfusionCounts) -> PrfScores:
    """Precision, recall, F1 with the zero-denominator convention of 0."""
    precision = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else 0.0
    recall = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 0.0
    return PrfScores(precision=precision, recall=recall, f1=_f1(precision, recall))


def confusion_from_labels(predicted, gold) -> ConfusionCounts:
    if len(predicted) != len(gold):
        raise DataError(
            f"prediction/gold length mismatch: {len(predicted)} vs {len(gold)}"
        )
    counts = ConfusionCounts()
    for p, g in zip(predicted, gold):
        if g == 1:
            if p == 1:
                counts.tp += 1
            else:
                counts.fn += 1
        else:
            if p == 1:
                counts.fp += 1
            else:
                counts.tn += 1
    return counts


def _ngram_counts(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(system: str, reference: str, n: int) -> RougeScore:
    """Clipped n-gram overlap between a system summary and its reference.

    Matched count per n-gram is min(system count, reference count); recall
    divides by the reference total, precision by the system total.  If
    either side has fewer than n tokens the score is all zeros.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    sys_tokens = tokenize(system)
    ref_tokens = tokenize(reference)
    if len(sys_tokens) < n or len(ref_tokens) < n:
        return RougeScore(n=n, recall=0.0, precision=0.0, f1=0.0)
    sys_counts = _ngram_counts(sys_tokens, n)
    ref_counts = _ngram_counts(ref_tokens, n)
    matched = sum(min(count, ref_counts[gram]) for gram, count in sys_counts.items())
    recall = matched / sum(ref_counts.values())
    precision = matched / sum(sys_counts.values())
    return RougeScore(n=n, recall=recall, precision=precision, f1=_f1(precision, recall))


@dataclass
class EvalReport:
    """Micro-aggregated classification scores and macro-averaged ROUGE."""

    counts: ConfusionCounts
    classification: PrfScores
    rouge1: RougeScore
    rouge2: RougeScore
    n_docs: int

    def as_dict(self) -> dict:
        return {
            "counts": self.counts.as_dict(),
            "classification": self.classification.as_dict(),
            "rouge1": self.rouge1.as_dict(),
            "rouge2": self.rouge2.as_dict(),
            "n_docs": self.n_docs,
        }


def evaluate_corpus(
    predictions: dict[str, list[int]],
    gold: dict[str, list[int]],
    summaries: dict[str, str],
    references: dict[str, str],
) -> EvalReport:
    """Score sentence classification and summary overlap over a corpus.

    Confusion counts are summed across documents before computing P/R/F1
    (micro); ROUGE-1/2 components are unweighted means over documents
    (macro).  All four mappings must cover exactly the same doc_ids.
    """
    keys = set(predictions)
    for name, mapping in (
        ("gold labels", gold),
        ("summaries", summaries),
        ("references", references),
    ):
        other = set(mapping)
        if other != keys:
            mismatched = sorted(keys ^ other)
            raise DataError(f"doc_id mismatch against {name}: {mismatched}")
    counts = ConfusionCounts()
    rouge_totals = {1: [0.0, 0.0, 0.0], 2: [0.0, 0.0, 0.0]}
    doc_ids = sorted(keys)
    for doc_id in doc_ids:
        counts.add(confusion_from_labels(predictions[doc_id], gold[doc_id]))
        for n in (1, 2):
            score = rouge_n(summaries[doc_id], references[doc_id], n)
            rouge_totals[n][0] += score.recall
            rouge_totals[n][1] += score.precision
            rouge_totals[n][2] += score.f1
    n_docs = len(doc_ids)
    if n_docs == 0:
        raise DataError("nothing to evaluate: no documents")
    rouge = {
        n: RougeScore(
            n=n,
            recall=totals[0] / n_docs,
            precision=totals[1] / n_docs,
            f1=totals[2] / n_docs,
        )
        for n, totals in rouge_totals.items()
    }
    return EvalReport(
        counts=counts,
        classification=prf(counts),
        rouge1=rouge[1],
        rouge2=rouge[2],
        n_docs=n_docs,
    )


@dataclass
class ReportRow:
    """One model's scores for the comparison tables."""

    model: str
    report: EvalReport


def format_table(rows: list[ReportRow]) -> str:
    """Aligned plain-text tables: Model / F1 / Recall / Precision per family."""
    blocks = []
    for title, pick in (
        ("Sentence classification", lambda r: r.report.classification),
        ("ROUGE-1 (summary vs reference)", lambda r: r.report.rouge1),
        ("ROUGE-2 (summary vs reference)", lambda r: r.report.rouge2),
    ):
        width = max([len("Model")] + [len(r.model) for r in rows])
        lines = [title, f"{'Model':<{width}}  {'F1':>6}  {'Recall':>6}  {'Precision':>9}"]
        for row in rows:
            scores = pick(row)
            lines.append(
                f"{row.model:<{width}}  {scores.f1:>6.3f}  {scores.recall:>6.3f}  "
                f"{scores.precision:>9.3f}"
            )
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


TSV_COLUMNS = (
    "model",
    "class_f1",
    "class_recall",
    "class_precision",
    "rouge1_f1",
    "rouge1_recall",
    "rouge1_precision",
    "rouge2_f1",
    "rouge2_recall",
    "rouge2_precision",
)


def format_tsv(rows: list[ReportRow]) -> str:
    lines = ["\t".join(TSV_COLUMNS)]
    for row in rows:
        c = row.report.classification
        r1 = row.report.rouge1
        r2 = row.report.rouge2
        values = [
            row.model,
            *(f"{v:.6f}" for v in (c.f1, c.recall, c.precision)),
            *(f"{v:.6f}" for v in (r1.f1, r1.recall, r1.precision)),
            *(f"{v:.6f}" for v in (r2.f1, r2.recall, r2.precision)),
        ]
        lines.append("\t".join(values))
    return "\n".join(lines) + "\n"
