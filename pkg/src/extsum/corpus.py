"""News corpus ingestion and rule-based sentence segmentation.

The corpus arrives as JSON-Lines, one article/summary pair per line.
Records are filtered by their extractive-density bin, then split into
sentences with a deterministic rule-based segmenter so that downstream
labeling and evaluation are exactly reproducible.
"""

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional

from .errors import DataError

DENSITY_BINS = ("extractive", "mixed", "abstractive", "unknown")

# Tokens that end with a period without ending a sentence.  Kept small and
# fixed: determinism matters more here than coverage.
ABBREVIATIONS = frozenset(
    {
        "Dr.", "Mr.", "Mrs.", "Ms.", "St.", "U.S.",
        "Jan.", "Feb.", "Mar.", "Apr.", "Jun.", "Jul.", "Aug.",
        "Sep.", "Sept.", "Oct.", "Nov.", "Dec.",
    }
)

_SINGLE_INITIAL = re.compile(r"^[A-Z]\.$")
_WORD_BEFORE_DOT = re.compile(r"[\w.]*\w\.$")
# Terminator, then whitespace, then something that can open a sentence.
_BOUNDARY = re.compile(r"[.!?](?=\s+[A-Z0-9\"'“‘])")


@dataclass
class NewsRecord:
    """One article/summary pair admitted from the corpus file."""

    doc_id: str
    text: str
    summary: str
    density_bin: str = "unknown"


@dataclass
class SegmentedDoc:
    """Article and summary of one record, split into sentences."""

    doc_id: str
    sentences: list[str]
    summary_sentences: list[str]


@dataclass
class LoadReport:
    """Per-file ingestion counters; total always equals the line count."""

    total: int = 0
    yielded: int = 0
    filtered: int = 0
    malformed: int = 0

    def as_dict(self) -> dict:
        return {
            "total": self.total,
            "yielded": self.yielded,
            "filtered": self.filtered,
            "malformed": self.malformed,
        }


def load_corpus(
    path: str | Path,
    density_filter: Optional[str] = "extractive",
    report: Optional[LoadReport] = None,
) -> Iterator[NewsRecord]:
    """Yield admissible records from a JSON-Lines corpus file, in file order.

    A record needs non-empty "text" and "summary" strings; "density_bin" is
    optional and defaults to "unknown".  Records whose bin does not match
    ``density_filter`` are skipped and counted.  Passing ``None`` or
    ``"unknown"`` disables filtering.  Malformed lines (bad JSON, missing or
    empty required fields, duplicate doc_id) are skipped and counted in the
    report; an unreadable file raises :class:`DataError`.
    """
    if density_filter is not None and density_filter not in DENSITY_BINS:
        raise DataError(f"unknown density filter {density_filter!r}")
    if density_filter == "unknown":
        density_filter = None
    if report is None:
        report = LoadReport()
    path = Path(path)
    try:
        fh = path.open("r", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read corpus file {path}: {exc}") from exc
    seen_ids: set[str] = set()
    with fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            report.total += 1
            record = _parse_line(line, lineno, seen_ids)
            if record is None:
                report.malformed += 1
                continue
            seen_ids.add(record.doc_id)
            if density_filter is not None and record.density_bin != density_filter:
                report.filtered += 1
                continue
            report.yielded += 1
            yield record


def _parse_line(line: str, lineno: int, seen_ids: set[str]) -> Optional[NewsRecord]:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError:
        return None
    if not isinstance(obj, dict):
        return None
    text = obj.get("text")
    summary = obj.get("summary")
    if not isinstance(text, str) or not text.strip():
        return None
    if not isinstance(summary, str) or not summary.strip():
        return None
    doc_id = obj.get("doc_id")
    if doc_id is None:
        doc_id = f"doc-{lineno:06d}"
    elif not isinstance(doc_id, str) or not doc_id or doc_id in seen_ids:
        return None
    bin_value = obj.get("density_bin", "unknown")
    if bin_value not in DENSITY_BINS:
        bin_value = "unknown"
    return NewsRecord(doc_id=doc_id, text=text, summary=summary, density_bin=bin_value)


def split_sentences(text: str) -> list[str]:
    """Split text into sentences at {. ! ?} + whitespace + sentence opener.

    A period does not end a sentence when the token before it is a known
    abbreviation or a single capital initial.  Text without terminal
    punctuation comes back as a single sentence.  Joining the result with
    single spaces preserves every non-whitespace character of the input.
    """
    sentences = []
    start = 0
    for match in _BOUNDARY.finditer(text):
        end = match.end()
        if text[end - 1] == "." and _is_abbreviation(text, end):
            continue
        chunk = text[start:end].strip()
        if chunk:
            sentences.append(chunk)
        start = end
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def _is_abbreviation(text: str, dot_end: int) -> bool:
    word = _WORD_BEFORE_DOT.search(text, 0, dot_end)
    if word is None:
        return False
    token = word.group()
    # Match against the tail so "U.S." is caught inside "the U.S."
    for abbr in ABBREVIATIONS:
        if token == abbr or token.endswith("." + abbr):
            return True
    return bool(_SINGLE_INITIAL.match(token))


def segment(record: NewsRecord) -> SegmentedDoc:
    """Segment both sides of a record into sentence lists."""
    return SegmentedDoc(
        doc_id=record.doc_id,
        sentences=split_sentences(record.text),
        summary_sentences=split_sentences(record.summary),
    )


def write_segmented(docs: list[SegmentedDoc], path: str | Path) -> None:
    """Write one SegmentedDoc per line as JSON-Lines."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(
                json.dumps(
                    {
                        "doc_id": doc.doc_id,
                        "sentences": doc.sentences,
                        "summary_sentences": doc.summary_sentences,
                    },
                    ensure_ascii=False,
                )
            )
            fh.write("\n")


def read_segmented(path: str | Path) -> list[SegmentedDoc]:
    """Read a segmented corpus file written by :func:`write_segmented`."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"segmented corpus file not found: {path}")
    docs = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                docs.append(
                    SegmentedDoc(
                        doc_id=obj["doc_id"],
                        sentences=list(obj["sentences"]),
                        summary_sentences=list(obj["summary_sentences"]),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise DataError(f"{path}:{lineno}: bad segmented record: {exc}") from exc
    return docs
