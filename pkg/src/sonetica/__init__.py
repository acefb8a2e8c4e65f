"""Affective and lexico-semantic modelling of Spanish sonnets, with
semi-supervised inference of psychological and affective categories.
"""

from .corpus import (
    ALL_CATEGORIES,
    PSYCHOLOGICAL_CATEGORIES,
    SCALED_CATEGORIES,
    AnnotationSet,
    Corpus,
    Sonnet,
    corpus_stats,
    filter_single_part,
    load_corpus,
    save_corpus,
)
from .learners import GradientBoostingClassifier
from .lexicon import (
    GAM_FEATURE_NAMES,
    GamFeatureVector,
    MergedLexicon,
    coverage,
    extract_features,
    load_lexicon_csv,
    merge_lexicons,
    spearman,
)
from .embeddings import (
    DesignMatrix,
    SentenceEmbeddingStore,
    TokenEmbeddingStore,
    affective_weighted_pool,
    assemble_design_matrix,
    normalize_lexicon,
    read_embeddings,
    write_embeddings,
)
from .metrics import (
    auc_binary,
    auc_multiclass,
    cohens_kappa,
    f1_weighted,
    min_sample_size,
    wilcoxon_signed_rank,
)
from .ssl import (
    LabelSpreading,
    SelfTrainingClassifier,
    SpreadPretrainClassifier,
    SslProblem,
    UNLABELED,
    label_spreading,
    ls_pretrain_pipeline,
    self_train,
    smote,
)
from .benchmark import (
    BenchmarkConfig,
    BenchmarkReport,
    CvSplit,
    MetricsRecord,
    ModelParams,
    cv_sample,
    run_benchmark,
)
from .textproc import (
    ProcessedSonnet,
    SpanishStemmer,
    default_stopwords,
    preprocess,
    remove_stopwords,
    stem,
    tokenize,
)

__version__ = "0.1.0"
