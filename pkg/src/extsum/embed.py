"""Sentence vectors and per-sentence features.

Two embedding sources feed the classifiers: a built-in hashed TF-IDF
embedder (deterministic, vocabulary-free) and precomputed vectors loaded
from a binary embedding file, typically produced by an external encoder
export tool.  Either way, every sentence also gets positional features and
a document-context vector (the mean of the document's sentence embeddings).

Embedding file format (bit-exact, little-endian):
  magic "XSEM" | u8 version=1 | u32 dim D | u32 record count
  per record: u16 doc_id byte length | doc_id UTF-8 | u32 sentence index
              | D float32 values
Records are sorted by (doc_id UTF-8 bytes, sentence index).
"""

import hashlib
import json
import math
import struct
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable

import numpy as np

from .corpus import SegmentedDoc
from .errors import DataError
from .text import tokenize

XSEM_MAGIC = b"XSEM"
XSEM_VERSION = 1
DEFAULT_DIM = 256
MIN_DIM = 8


@lru_cache(maxsize=1 << 16)
def _token_hashes(token: str) -> tuple[int, int]:
    """Two independent stable hashes per token: bucket source and sign."""
    raw = token.encode("utf-8")
    bucket = int.from_bytes(
        hashlib.blake2b(raw, digest_size=8, person=b"xsem-bkt").digest(), "little"
    )
    sign_bit = hashlib.blake2b(raw, digest_size=1, person=b"xsem-sgn").digest()[0] & 1
    return bucket, 1 if sign_bit else -1


class IdfTable:
    """Inverse document frequencies computed on the training split only."""

    def __init__(self, n_docs: int, df: dict[str, int]):
        self.n_docs = n_docs
        self.df = df

    def idf(self, token: str) -> float:
        # Smoothed so unseen tokens stay defined and nothing divides by zero.
        return math.log((1 + self.n_docs) / (1 + self.df.get(token, 0))) + 1.0

    @classmethod
    def build(cls, documents: Iterable[str]) -> "IdfTable":
        """Count document frequency over full article texts."""
        df: Counter[str] = Counter()
        n = 0
        for text in documents:
            n += 1
            df.update(set(tokenize(text)))
        return cls(n_docs=n, df=dict(df))

    def to_json(self) -> str:
        payload = {"n_docs": self.n_docs, "df": self.df}
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "IdfTable":
        path = Path(path)
        if not path.exists():
            raise DataError(f"idf table not found: {path}")
        obj = json.loads(path.read_text(encoding="utf-8"))
        return cls(n_docs=int(obj["n_docs"]), df={k: int(v) for k, v in obj["df"].items()})

    def sha256(self) -> str:
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()


def embed_builtin(sentence: str, dim: int, idf: IdfTable) -> np.ndarray:
    """Hashed TF-IDF sentence vector, L2-normalized (zero vector if tokenless).

    Each token lands in bucket h(token) mod dim with an independent sign
    hash; the bucket accumulates tf * idf.
    """
    if dim < MIN_DIM:
        raise ValueError(f"embedding dim must be >= {MIN_DIM}, got {dim}")
    vec = np.zeros(dim, dtype=np.float64)
    for token, tf in Counter(tokenize(sentence)).items():
        bucket, sign = _token_hashes(token)
        vec[bucket % dim] += sign * tf * idf.idf(token)
    norm = float(np.linalg.norm(vec))
    if norm > 0.0:
        vec /= norm
    return vec


def embed_sentences(sentences: list[str], dim: int, idf: IdfTable) -> np.ndarray:
    """Stack built-in embeddings for a sentence list into an (n, dim) array."""
    if not sentences:
        return np.zeros((0, dim), dtype=np.float64)
    return np.stack([embed_builtin(s, dim, idf) for s in sentences])


@dataclass
class EmbeddingTable:
    """doc_id -> (n_sentences, dim) float32 rows, one corpus-wide dimension."""

    dim: int
    source: str  # "builtin_tfidf" | "external_file"
    vectors: dict[str, np.ndarray]

    def doc_vectors(self, doc_id: str) -> np.ndarray:
        rows = self.vectors.get(doc_id)
        if rows is None:
            raise DataError(f"no embeddings for document {doc_id!r}")
        return rows


def build_builtin_table(
    docs: list[SegmentedDoc], dim: int, idf: IdfTable
) -> EmbeddingTable:
    """Embed every article sentence; rows rounded to float32 like a saved file."""
    vectors = {
        doc.doc_id: embed_sentences(doc.sentences, dim, idf).astype(np.float32)
        for doc in docs
    }
    return EmbeddingTable(dim=dim, source="builtin_tfidf", vectors=vectors)


def save_embeddings(table: EmbeddingTable, path: str | Path) -> None:
    """Write the binary embedding file; records sorted by (doc_id bytes, index)."""
    entries = []
    for doc_id, rows in table.vectors.items():
        encoded = doc_id.encode("utf-8")
        if len(encoded) > 0xFFFF:
            raise DataError(f"doc_id too long for format: {doc_id[:32]!r}...")
        for index in range(len(rows)):
            entries.append((encoded, index))
    entries.sort(key=lambda e: (e[0], e[1]))
    with Path(path).open("wb") as fh:
        fh.write(XSEM_MAGIC)
        fh.write(struct.pack("<BII", XSEM_VERSION, table.dim, len(entries)))
        for encoded, index in entries:
            doc_id = encoded.decode("utf-8")
            row = np.ascontiguousarray(table.vectors[doc_id][index], dtype="<f4")
            fh.write(struct.pack("<H", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<I", index))
            fh.write(row.tobytes())


def load_embeddings(path: str | Path) -> EmbeddingTable:
    """Load a binary embedding file, validating structure and finiteness.

    Fatal conditions: missing file, bad magic or version, row count
    disagreeing with the header, unsorted or non-contiguous records, and
    non-finite values.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"embedding file not found: {path}")
    data = path.read_bytes()
    if len(data) < 13 or data[:4] != XSEM_MAGIC:
        raise DataError(f"{path}: magic mismatch, not an embedding file")
    version, dim, count = struct.unpack_from("<BII", data, 4)
    if version != XSEM_VERSION:
        raise DataError(f"{path}: version mismatch (got {version}, want {XSEM_VERSION})")
    offset = 13
    vectors: dict[str, list[np.ndarray]] = {}
    prev_key: tuple[bytes, int] | None = None
    row_bytes = 4 * dim
    for _ in range(count):
        if offset + 2 > len(data):
            raise DataError(f"{path}: row count mismatch (file truncated)")
        (id_len,) = struct.unpack_from("<H", data, offset)
        offset += 2
        if offset + id_len + 4 + row_bytes > len(data):
            raise DataError(f"{path}: row count mismatch (file truncated)")
        encoded = data[offset : offset + id_len]
        offset += id_len
        (index,) = struct.unpack_from("<I", data, offset)
        offset += 4
        row = np.frombuffer(data, dtype="<f4", count=dim, offset=offset).copy()
        offset += row_bytes
        key = (encoded, index)
        if prev_key is not None and key <= prev_key:
            raise DataError(f"{path}: records not sorted by (doc_id, index)")
        prev_key = key
        if not np.isfinite(row).all():
            raise DataError(f"{path}: non-finite value in record {encoded!r}:{index}")
        doc_id = encoded.decode("utf-8")
        rows = vectors.setdefault(doc_id, [])
        if index != len(rows):
            raise DataError(
                f"{path}: sentence indices for {doc_id!r} not contiguous from 0"
            )
        rows.append(row)
    if offset != len(data):
        raise DataError(f"{path}: row count mismatch (trailing bytes)")
    return EmbeddingTable(
        dim=dim,
        source="external_file",
        vectors={doc_id: np.stack(rows) for doc_id, rows in vectors.items()},
    )


@dataclass
class FeatureVector:
    """One sentence's classifier input before concatenation."""

    embedding: np.ndarray
    abs_position: int
    rel_position: float
    doc_context: np.ndarray


def featurize(doc: SegmentedDoc, table: EmbeddingTable) -> list[FeatureVector]:
    """Attach positional and document-context features to each sentence.

    rel_position is abs_position / max(1, n-1), so a single-sentence document
    gets 0; doc_context is the arithmetic mean of the document's sentence
    embeddings and is shared by all of its sentences.
    """
    rows = table.vectors.get(doc.doc_id)
    n = len(doc.sentences)
    if rows is None or len(rows) != n:
        have = 0 if rows is None else len(rows)
        raise DataError(
            f"missing embedding rows for doc {doc.doc_id!r}: "
            f"expected {n} sentences, found {have}"
        )
    rows64 = rows.astype(np.float64)
    context = rows64.mean(axis=0)
    denom = max(1, n - 1)
    return [
        FeatureVector(
            embedding=rows64[i],
            abs_position=i,
            rel_position=i / denom,
            doc_context=context,
        )
        for i in range(n)
    ]


@dataclass
class PositionStats:
    """Training-split mean/std used to standardize abs_position."""

    mean: float
    std: float

    @classmethod
    def fit(cls, sentence_counts: Iterable[int]) -> "PositionStats":
        positions = np.concatenate(
            [np.arange(c, dtype=np.float64) for c in sentence_counts if c > 0]
        )
        std = float(positions.std())
        return cls(mean=float(positions.mean()), std=std if std > 0.0 else 1.0)


FEATURE_MODES = ("full", "embedding-only")


def feature_matrix(
    features: list[FeatureVector], pos: PositionStats, mode: str = "full"
) -> np.ndarray:
    """Concatenate [embedding | abs_position | rel_position | doc_context].

    "embedding-only" keeps just the raw sentence embedding (dim D).
    """
    if mode not in FEATURE_MODES:
        raise ValueError(f"unknown feature mode {mode!r}")
    if mode == "embedding-only":
        return np.stack([f.embedding for f in features])
    rows = [
        np.concatenate(
            (
                f.embedding,
                [(f.abs_position - pos.mean) / pos.std, f.rel_position],
                f.doc_context,
            )
        )
        for f in features
    ]
    return np.stack(rows)


def feature_dim(embedding_dim: int, mode: str = "full") -> int:
    return embedding_dim if mode == "embedding-only" else 2 * embedding_dim + 2
