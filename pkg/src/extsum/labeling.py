"""Gold labels: an article sentence is summary-worthy when it is close
enough (cosine similarity >= theta) to some reference-summary sentence."""

from dataclasses import dataclass

import numpy as np

from .errors import DataError


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity; 0.0 by convention when either vector is zero."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v)) / (nu * nv)


@dataclass
class LabeledSentence:
    """Binary gold label for one article sentence (label 1 iff max_sim >= theta)."""

    doc_id: str
    index: int
    label: int
    max_similarity: float


def label_document(
    sentence_embeddings,
    summary_embeddings,
    theta: float,
    doc_id: str = "",
) -> list[LabeledSentence]:
    """Label each article sentence by its best match among summary sentences.

    max_similarity for sentence i is max_j cosine(e_i, s_j); the label is 1
    when that maximum reaches theta (ties at exactly theta count as
    positive).  Both embedding lists must be nonempty; an empty summary side
    means the record should have been dropped upstream.
    """
    if not -1.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [-1, 1], got {theta}")
    sentence_embeddings = list(sentence_embeddings)
    summary_embeddings = list(summary_embeddings)
    if not summary_embeddings:
        raise DataError(f"doc {doc_id!r}: no summary sentence embeddings to label against")
    if not sentence_embeddings:
        raise DataError(f"doc {doc_id!r}: no article sentence embeddings to label")
    labeled = []
    for i, emb in enumerate(sentence_embeddings):
        best = max(cosine(emb, s) for s in summary_embeddings)
        labeled.append(
            LabeledSentence(
                doc_id=doc_id,
                index=i,
                label=1 if best >= theta else 0,
                max_similarity=best,
            )
        )
    return labeled
