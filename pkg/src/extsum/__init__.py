"""Extractive news summarization toolkit.

Sentence segmentation, hashed TF-IDF embeddings, cosine-similarity gold
labeling, from-scratch classifiers (logistic regression, feed-forward
network, uni/bi LSTM), the Lede-3 baseline, and P/R/F1 + ROUGE evaluation.
"""

from .corpus import LoadReport, NewsRecord, SegmentedDoc, load_corpus, segment, split_sentences
from .embed import (
    EmbeddingTable,
    FeatureVector,
    IdfTable,
    PositionStats,
    embed_builtin,
    feature_matrix,
    featurize,
    load_embeddings,
    save_embeddings,
)
from .errors import ConfigError, DataError, ExtsumError, NumericError
from .evaluation import (
    ConfusionCounts,
    EvalReport,
    PrfScores,
    RougeScore,
    evaluate_corpus,
    prf,
    rouge_n,
)
from .labeling import LabeledSentence, cosine, label_document
from .models import (
    DocSample,
    ModelSpec,
    TrainConfig,
    TrainReport,
    bce_loss,
    ffnn_forward,
    grad_check,
    load_checkpoint,
    lr_forward,
    lstm_cell,
    lstm_forward,
    save_checkpoint,
    sigmoid,
    train,
)
from .summarize import SummaryResult, lede3, render_summary, select
from .synthetic import generate_corpus

__version__ = "0.1.0"
