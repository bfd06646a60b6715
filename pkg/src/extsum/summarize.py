"""Turning per-sentence scores into summaries, plus the Lede-3 baseline."""

from dataclasses import dataclass, field

from .corpus import SegmentedDoc

LEDE_COUNT = 3
DEFAULT_K = 3


@dataclass
class SummaryResult:
    """Selected sentence indices (document order) and the scores behind them."""

    doc_id: str
    selected: list[int]
    scores: list[float] = field(default_factory=list)
    method: str = "lede3"


def lede3(doc: SegmentedDoc) -> SummaryResult:
    """First three sentences, clipped to the document length; score-free."""
    count = min(LEDE_COUNT, len(doc.sentences))
    return SummaryResult(doc_id=doc.doc_id, selected=list(range(count)), method="lede3")


def select(scores, k: int = DEFAULT_K, mode: str = "topk", tau: float | None = None) -> list[int]:
    """Pick sentence indices from scores, always emitted in document order.

    topk: the k highest scores, ties broken toward the earlier sentence.
    threshold: every index with score >= tau; may come back empty, in which
    case the caller decides the fallback.
    """
    scores = list(scores)
    if not scores:
        raise ValueError("scores must be nonempty")
    if mode == "topk":
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        ranked = sorted(range(len(scores)), key=lambda i: (-scores[i], i))[:k]
        return sorted(ranked)
    if mode == "threshold":
        if tau is None or not 0.0 < tau < 1.0:
            raise ValueError(f"threshold mode needs tau in (0, 1), got {tau}")
        return [i for i, s in enumerate(scores) if s >= tau]
    raise ValueError(f"unknown selection mode {mode!r}")


def summarize_scores(
    doc: SegmentedDoc,
    scores,
    method: str,
    k: int = DEFAULT_K,
    mode: str = "topk",
    tau: float | None = None,
) -> SummaryResult:
    """Build a SummaryResult from model scores.

    An empty threshold selection falls back to the single best sentence so
    the summary is never empty.
    """
    chosen = select(scores, k=k, mode=mode, tau=tau)
    if not chosen:
        chosen = select(scores, k=1, mode="topk")
    return SummaryResult(
        doc_id=doc.doc_id,
        selected=chosen,
        scores=[float(s) for s in scores],
        method=method,
    )


def render_summary(doc: SegmentedDoc, selected: list[int]) -> str:
    """Join the selected sentences, in document order, with single spaces."""
    return " ".join(doc.sentences[i] for i in selected)
