"""ideatopic - Topic mining for brainstorming transcripts."""

from ideatopic._cluster import (
    ClusterAssignment,
    CondensedTree,
    HdbscanConfig,
    build_mst,
    condense_and_extract,
    hdbscan,
    mutual_reachability,
)
from ideatopic._coherence import (
    CoherenceConfig,
    CoherenceReport,
    MissingWordError,
    UndefinedScoreError,
    WindowCounts,
    c_npmi_score,
    c_v_score,
    count_windows,
    merge_window_counts,
    npmi,
    score_topic_set,
)
from ideatopic._config import PipelineConfig, build_config
from ideatopic._corpus import (
    CorpusParseError,
    IdeaRecord,
    PreprocessConfig,
    TokenizedIdea,
    ingest,
    tokenize_and_filter,
)
from ideatopic._dimred import (
    FuzzyGraph,
    KnnGraph,
    UmapConfig,
    build_knn_graph,
    find_ab_params,
    fuzzy_graph,
    smooth_knn_calibration,
    umap_reduce,
)
from ideatopic._embed import (
    EmbeddingFormatError,
    EmbeddingLookupError,
    EmbeddingMatrix,
    EmbeddingProtocolError,
    EmbeddingProvider,
    EmbeddingTransportError,
    deterministic_hash_embed,
    embed_texts,
    fetch_remote_embeddings,
    load_embedding_file,
)
from ideatopic._pipeline import RunArtifacts, run_pipeline
from ideatopic._svg import emit_scatter_svg
from ideatopic._sweep import SweepReport, sweep_topics
from ideatopic._topics import (
    ClusterVocabulary,
    DegenerateClusterError,
    MergeStep,
    Topic,
    TopicSet,
    UndefinedSimilarityError,
    average_cosine_similarity,
    build_cluster_vocabulary,
    extract_topics,
    refine_topics,
    topic_similarity,
)
from ideatopic._version import __version__
from ideatopic.utils import ConfigError, IdeaTopicError, StageError

__all__ = [
    "ClusterAssignment",
    "ClusterVocabulary",
    "CoherenceConfig",
    "CoherenceReport",
    "CondensedTree",
    "ConfigError",
    "CorpusParseError",
    "DegenerateClusterError",
    "EmbeddingFormatError",
    "EmbeddingLookupError",
    "EmbeddingMatrix",
    "EmbeddingProtocolError",
    "EmbeddingProvider",
    "EmbeddingTransportError",
    "FuzzyGraph",
    "HdbscanConfig",
    "IdeaRecord",
    "IdeaTopicError",
    "KnnGraph",
    "MergeStep",
    "MissingWordError",
    "PipelineConfig",
    "PreprocessConfig",
    "RunArtifacts",
    "StageError",
    "SweepReport",
    "TokenizedIdea",
    "Topic",
    "TopicSet",
    "UmapConfig",
    "UndefinedScoreError",
    "UndefinedSimilarityError",
    "WindowCounts",
    "__version__",
    "average_cosine_similarity",
    "build_cluster_vocabulary",
    "build_config",
    "build_knn_graph",
    "build_mst",
    "c_npmi_score",
    "c_v_score",
    "condense_and_extract",
    "count_windows",
    "deterministic_hash_embed",
    "embed_texts",
    "emit_scatter_svg",
    "extract_topics",
    "fetch_remote_embeddings",
    "find_ab_params",
    "fuzzy_graph",
    "hdbscan",
    "ingest",
    "load_embedding_file",
    "merge_window_counts",
    "mutual_reachability",
    "npmi",
    "refine_topics",
    "run_pipeline",
    "score_topic_set",
    "smooth_knn_calibration",
    "sweep_topics",
    "tokenize_and_filter",
    "topic_similarity",
    "umap_reduce",
]
