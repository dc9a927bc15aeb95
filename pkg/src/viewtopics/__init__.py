"""Topics, aspects, and viewpoints from bimodal text corpora.

The package splits an annotated corpus into topical and opinion words,
fits either a plain LDA model or a bimodal topic-aspect model by
collapsed Gibbs sampling, and evaluates how well the inferred structure
separates document viewpoints through linear SVM feature weights.
"""

__version__ = "0.1.0"

from .corpus import (
    AnnotatedToken,
    BimodalCorpus,
    BimodalDocument,
    Modality,
    NeClass,
    ParseError,
    PartitionScheme,
    Pos,
    RawDocument,
    UnimodalCorpus,
    UnimodalDocument,
    Viewpoint,
    Vocabulary,
    apply_partition,
    build_unimodal,
    corpus_stats,
    load_annotated_corpus,
    write_annotated_corpus,
)
from .corrlda2 import CorrLda2Sampler
from .features import FeatureMatrix, FeatureMode, build_feature_matrix
from .lda import Hyperparams, LdaSampler, chain_seed, make_rng
from .svm import CvReport, SvmModel, cross_validate, feature_weights, predict, train
from .viewpoints import (
    GroupReport,
    SweepReport,
    TopicAspectGroups,
    classify_and_score,
    consistency_sweep,
    extract_association_weights,
    form_groups,
)

__all__ = [
    "AnnotatedToken",
    "BimodalCorpus",
    "BimodalDocument",
    "CorrLda2Sampler",
    "CvReport",
    "FeatureMatrix",
    "FeatureMode",
    "GroupReport",
    "Hyperparams",
    "LdaSampler",
    "Modality",
    "NeClass",
    "ParseError",
    "PartitionScheme",
    "Pos",
    "RawDocument",
    "SvmModel",
    "SweepReport",
    "TopicAspectGroups",
    "UnimodalCorpus",
    "UnimodalDocument",
    "Viewpoint",
    "Vocabulary",
    "apply_partition",
    "build_feature_matrix",
    "build_unimodal",
    "chain_seed",
    "classify_and_score",
    "consistency_sweep",
    "corpus_stats",
    "cross_validate",
    "extract_association_weights",
    "feature_weights",
    "form_groups",
    "load_annotated_corpus",
    "make_rng",
    "predict",
    "train",
    "write_annotated_corpus",
    "__version__",
]
