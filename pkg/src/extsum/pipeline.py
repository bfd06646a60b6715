"""End-to-end plumbing between the corpus files and the library modules.

A "prepared" directory is the unit of work every downstream command reads:

    segmented.jsonl   one SegmentedDoc per line
    sentences.xsem    article sentence embeddings (binary)
    labels.jsonl      doc_id, sentence_index, label, max_similarity, vector ref
    splits.json       doc_id -> "train" | "test"
    idf.json          training-split document frequencies
    stats.json        load/label statistics and the config echo
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .corpus import (
    LoadReport,
    SegmentedDoc,
    load_corpus,
    read_segmented,
    segment,
    write_segmented,
)
from .embed import (
    EmbeddingTable,
    IdfTable,
    PositionStats,
    build_builtin_table,
    embed_sentences,
    feature_matrix,
    featurize,
    load_embeddings,
    save_embeddings,
)
from .errors import ConfigError, DataError
from .labeling import label_document
from .models.checkpoint import Checkpoint
from .models.train import DocSample, predict_probs
from .summarize import SummaryResult, lede3, render_summary, summarize_scores

LABEL_MODES = ("embedding", "tfidf")

SEGMENTED_FILE = "segmented.jsonl"
SENTENCES_FILE = "sentences.xsem"
LABELS_FILE = "labels.jsonl"
SPLITS_FILE = "splits.json"
IDF_FILE = "idf.json"
STATS_FILE = "stats.json"


def run_prepare(
    corpus_path: str | Path,
    out_dir: str | Path,
    density_filter: Optional[str] = "extractive",
    dim: int = 256,
    theta: float = 0.7,
    split_ratio: float = 0.8,
    seed: int = 0,
    embeddings_path: Optional[str | Path] = None,
    summary_embeddings_path: Optional[str | Path] = None,
    label_mode: str = "embedding",
) -> dict:
    """Segment, embed, and label a corpus; write the prepared directory.

    Everything is computed before anything is written, so a failing corpus
    leaves no partial outputs behind.
    """
    if label_mode not in LABEL_MODES:
        raise ConfigError(f"unknown label mode {label_mode!r}; choose from {LABEL_MODES}")
    if not -1.0 <= theta <= 1.0:
        raise ConfigError(f"theta must lie in [-1, 1], got {theta}")
    if not 0.0 < split_ratio <= 1.0:
        raise ConfigError(f"split ratio must lie in (0, 1], got {split_ratio}")

    report = LoadReport()
    records = list(load_corpus(corpus_path, density_filter, report))
    dropped_empty = 0
    pairs = []
    for record in records:
        doc = segment(record)
        if not doc.sentences or not doc.summary_sentences:
            dropped_empty += 1
            continue
        pairs.append((record, doc))
    if not pairs:
        raise DataError(
            f"corpus {corpus_path} produced no usable documents "
            f"(yielded={report.yielded}, filtered={report.filtered}, "
            f"malformed={report.malformed}, dropped_empty={dropped_empty})"
        )

    rng = np.random.default_rng(seed)
    splits = {
        record.doc_id: "train" if rng.random() < split_ratio else "test"
        for record, _ in pairs
    }
    train_texts = [r.text for r, _ in pairs if splits[r.doc_id] == "train"]
    if not train_texts:
        raise DataError("split produced no training documents; raise --split-ratio")
    idf = IdfTable.build(train_texts)

    docs = [doc for _, doc in pairs]
    summary_table = None
    if embeddings_path is not None:
        table = load_embeddings(embeddings_path)
        if dim != table.dim:
            dim = table.dim
        if summary_embeddings_path is not None:
            summary_table = load_embeddings(summary_embeddings_path)
        for doc in docs:
            rows = table.vectors.get(doc.doc_id)
            if rows is None or len(rows) != len(doc.sentences):
                have = 0 if rows is None else len(rows)
                raise DataError(
                    f"external embeddings missing rows for {doc.doc_id!r}: "
                    f"expected {len(doc.sentences)}, found {have}"
                )
    else:
        table = build_builtin_table(docs, dim, idf)

    labels_rows = []
    positives = 0
    for doc in docs:
        article_vecs = table.vectors[doc.doc_id].astype(np.float64)
        summary_vecs = _summary_vectors(
            doc, label_mode, table.source, summary_table, dim, idf
        )
        labeled = label_document(article_vecs, summary_vecs, theta, doc_id=doc.doc_id)
        for item in labeled:
            positives += item.label
            labels_rows.append(
                {
                    "doc_id": item.doc_id,
                    "sentence_index": item.index,
                    "label": item.label,
                    "max_similarity": item.max_similarity,
                    "vector_ref": {
                        "file": SENTENCES_FILE,
                        "doc_id": item.doc_id,
                        "index": item.index,
                    },
                }
            )

    sentence_counts = [len(doc.sentences) for doc in docs]
    total_sentences = sum(sentence_counts)
    stats = {
        "load": report.as_dict(),
        "dropped_empty": dropped_empty,
        "n_docs": len(docs),
        "sentences": {
            "total": total_sentences,
            "per_doc_min": min(sentence_counts),
            "per_doc_max": max(sentence_counts),
            "per_doc_mean": total_sentences / len(docs),
        },
        "labels": {
            "positives": positives,
            "total": total_sentences,
            "positive_rate": positives / total_sentences,
        },
        "split": {
            "train_docs": sum(1 for s in splits.values() if s == "train"),
            "test_docs": sum(1 for s in splits.values() if s == "test"),
        },
        "config": {
            "corpus": str(corpus_path),
            "density_filter": density_filter,
            "dim": dim,
            "theta": theta,
            "split_ratio": split_ratio,
            "seed": seed,
            "label_mode": label_mode,
            "embedding_source": table.source,
        },
        "idf_sha256": idf.sha256(),
    }

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_segmented(docs, out / SEGMENTED_FILE)
    save_embeddings(table, out / SENTENCES_FILE)
    with (out / LABELS_FILE).open("w", encoding="utf-8") as fh:
        for row in labels_rows:
            fh.write(json.dumps(row, sort_keys=True, separators=(",", ":")))
            fh.write("\n")
    (out / SPLITS_FILE).write_text(
        json.dumps(splits, sort_keys=True, separators=(",", ":")), encoding="utf-8"
    )
    idf.save(out / IDF_FILE)
    (out / STATS_FILE).write_text(
        json.dumps(stats, sort_keys=True, indent=2), encoding="utf-8"
    )
    return stats


def _summary_vectors(
    doc: SegmentedDoc,
    label_mode: str,
    source: str,
    summary_table: Optional[EmbeddingTable],
    dim: int,
    idf: IdfTable,
) -> np.ndarray:
    """Vectors the labeler compares article sentences against."""
    if label_mode == "tfidf":
        return embed_sentences(doc.summary_sentences, dim, idf).astype(np.float32).astype(np.float64)
    if source == "builtin_tfidf":
        return (
            embed_sentences(doc.summary_sentences, dim, idf)
            .astype(np.float32)
            .astype(np.float64)
        )
    if summary_table is None:
        raise DataError(
            "embedding-mode labeling with external embeddings needs "
            "--summary-embeddings (or use --label-mode tfidf)"
        )
    rows = summary_table.vectors.get(doc.doc_id)
    if rows is None or len(rows) != len(doc.summary_sentences):
        have = 0 if rows is None else len(rows)
        raise DataError(
            f"summary embeddings missing rows for {doc.doc_id!r}: "
            f"expected {len(doc.summary_sentences)}, found {have}"
        )
    return rows.astype(np.float64)


@dataclass
class PreparedCorpus:
    root: Path
    docs: list[SegmentedDoc]
    table: EmbeddingTable
    labels: dict[str, np.ndarray]
    max_sims: dict[str, np.ndarray]
    splits: dict[str, str]
    stats: dict

    @property
    def dim(self) -> int:
        return self.table.dim

    @property
    def idf_sha256(self) -> str:
        return self.stats["idf_sha256"]

    def doc_ids(self, split: Optional[str] = None) -> list[str]:
        return [
            d.doc_id
            for d in self.docs
            if split is None or self.splits[d.doc_id] == split
        ]

    def select_docs(self, split: Optional[str] = None) -> list[SegmentedDoc]:
        return [
            d for d in self.docs if split is None or self.splits[d.doc_id] == split
        ]


def load_prepared(prepared_dir: str | Path) -> PreparedCorpus:
    root = Path(prepared_dir)
    if not root.is_dir():
        raise DataError(
            f"prepared directory not found: {root} (create one with `extsum prepare`)"
        )
    for name in (SEGMENTED_FILE, SENTENCES_FILE, LABELS_FILE, SPLITS_FILE, STATS_FILE):
        if not (root / name).exists():
            raise DataError(
                f"prepared directory {root} is missing {name}; rerun `extsum prepare`"
            )
    docs = read_segmented(root / SEGMENTED_FILE)
    table = load_embeddings(root / SENTENCES_FILE)
    stats = json.loads((root / STATS_FILE).read_text(encoding="utf-8"))
    splits = json.loads((root / SPLITS_FILE).read_text(encoding="utf-8"))

    labels: dict[str, list] = {}
    sims: dict[str, list] = {}
    with (root / LABELS_FILE).open("r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            row = json.loads(line)
            labels.setdefault(row["doc_id"], []).append(
                (row["sentence_index"], row["label"])
            )
            sims.setdefault(row["doc_id"], []).append(
                (row["sentence_index"], row["max_similarity"])
            )
    label_arrays = {}
    sim_arrays = {}
    for doc in docs:
        rows = labels.get(doc.doc_id)
        if rows is None or len(rows) != len(doc.sentences):
            raise DataError(f"labels missing or misaligned for doc {doc.doc_id!r}")
        rows.sort()
        label_arrays[doc.doc_id] = np.array([l for _, l in rows], dtype=np.float64)
        srows = sorted(sims[doc.doc_id])
        sim_arrays[doc.doc_id] = np.array([s for _, s in srows])
        if doc.doc_id not in splits:
            raise DataError(f"split assignment missing for doc {doc.doc_id!r}")
    return PreparedCorpus(
        root=root,
        docs=docs,
        table=table,
        labels=label_arrays,
        max_sims=sim_arrays,
        splits=splits,
        stats=stats,
    )


def fit_position_stats(prepared: PreparedCorpus) -> PositionStats:
    return PositionStats.fit(
        len(d.sentences) for d in prepared.select_docs("train")
    )


def build_doc_samples(
    prepared: PreparedCorpus,
    pos: PositionStats,
    feature_mode: str = "full",
    split: Optional[str] = None,
) -> list[DocSample]:
    samples = []
    for doc in prepared.select_docs(split):
        features = featurize(doc, prepared.table)
        samples.append(
            DocSample(
                doc_id=doc.doc_id,
                X=feature_matrix(features, pos, feature_mode),
                y=prepared.labels[doc.doc_id],
            )
        )
    return samples


def checkpoint_position_stats(ckpt: Checkpoint) -> PositionStats:
    return PositionStats(
        mean=float(ckpt.features["pos_mean"]), std=float(ckpt.features["pos_std"])
    )


def validate_checkpoint(ckpt: Checkpoint, prepared: PreparedCorpus) -> None:
    if ckpt.features["dim"] != prepared.dim:
        raise DataError(
            f"checkpoint embedding dim {ckpt.features['dim']} != prepared {prepared.dim}"
        )
    if ckpt.idf_sha256 != prepared.idf_sha256:
        raise DataError(
            "checkpoint idf hash does not match this prepared corpus; "
            "it was trained on a different preparation"
        )


def model_doc_scores(ckpt: Checkpoint, prepared: PreparedCorpus, doc: SegmentedDoc) -> np.ndarray:
    features = featurize(doc, prepared.table)
    X = feature_matrix(features, checkpoint_position_stats(ckpt), ckpt.features["mode"])
    return predict_probs(ckpt.spec, ckpt.params, X)


def lede3_summaries(prepared: PreparedCorpus, split: Optional[str]) -> list[SummaryResult]:
    return [lede3(doc) for doc in prepared.select_docs(split)]


def model_summaries(
    ckpt: Checkpoint,
    prepared: PreparedCorpus,
    split: Optional[str],
    k: int = 3,
    mode: str = "topk",
    tau: Optional[float] = None,
) -> list[SummaryResult]:
    results = []
    for doc in prepared.select_docs(split):
        scores = model_doc_scores(ckpt, prepared, doc)
        results.append(
            summarize_scores(
                doc, scores, method=f"model:{ckpt.spec.kind}", k=k, mode=mode, tau=tau
            )
        )
    return results


def selection_predictions(
    results: list[SummaryResult], prepared: PreparedCorpus
) -> dict[str, list[int]]:
    """Sentence-level predictions implied by a selection (1 iff selected)."""
    by_id = {d.doc_id: d for d in prepared.docs}
    out = {}
    for res in results:
        n = len(by_id[res.doc_id].sentences)
        chosen = set(res.selected)
        out[res.doc_id] = [1 if i in chosen else 0 for i in range(n)]
    return out


def probability_predictions(
    ckpt: Checkpoint, prepared: PreparedCorpus, split: Optional[str], cutoff: float = 0.5
) -> dict[str, list[int]]:
    """Sentence-level predictions at a probability cutoff."""
    out = {}
    for doc in prepared.select_docs(split):
        scores = model_doc_scores(ckpt, prepared, doc)
        out[doc.doc_id] = [1 if s >= cutoff else 0 for s in scores]
    return out


def gold_labels(prepared: PreparedCorpus, split: Optional[str]) -> dict[str, list[int]]:
    return {
        doc.doc_id: [int(v) for v in prepared.labels[doc.doc_id]]
        for doc in prepared.select_docs(split)
    }


def reference_summaries(prepared: PreparedCorpus, split: Optional[str]) -> dict[str, str]:
    return {
        doc.doc_id: " ".join(doc.summary_sentences)
        for doc in prepared.select_docs(split)
    }


def rendered_summaries(
    results: list[SummaryResult], prepared: PreparedCorpus
) -> dict[str, str]:
    by_id = {d.doc_id: d for d in prepared.docs}
    return {res.doc_id: render_summary(by_id[res.doc_id], res.selected) for res in results}
