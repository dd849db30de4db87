"""Corpus-aware document embeddings over pre-trained word vectors."""

from .common_component import (
    PrincipalComponent,
    first_principal_component,
    remove_common_component,
)
from .corpus import (
    CorpusStats,
    DocTermStats,
    TokenizerConfig,
    build_corpus_stats,
    doc_term_stats,
    tokenize,
)
from .embedder import (
    CorpusCenter,
    DocEmbedding,
    EmbeddingForm,
    EmptyDocumentError,
    ZeroNormEmbeddingError,
    build_corpus_center,
    embed_batch,
    embed_center,
    embed_delta,
    embed_sum,
    renormalize,
)
from .evaluation import EvalPair, EvalResult, cosine_similarity, roc_auc, sample_pairs, score_pairs
from .kernels import BACKEND
from .vectors import VectorStore, load_vectors, normalize_store
from .weighting import WeightScheme, weight

__version__ = "0.1.0"
