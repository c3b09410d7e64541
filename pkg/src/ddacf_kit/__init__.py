"""ddacf-kit: depression detection from content and activity features.

A from-scratch text-classification toolkit: corpus handling, Porter
stemming and normalization, document-term matrices with tf-idf / synonym
collapsing / sparsity pruning, information-gain term selection, sentiment
and account-activity features, four classifiers (naive Bayes, entropy
decision tree, linear and RBF SVM via SMO), stratified cross-validation
with ROC/AUC, a synthetic corpus generator, and an experiment-grid CLI.
"""

from .corpus import Corpus, Label, Tweet, UserRecord, control_screen, filter_users, load_corpus
from .errors import (
    DegenerateQuartiles,
    DuplicateUser,
    EmptyCorpus,
    EmptyVocab,
    InvalidDistribution,
    InvalidParams,
    LengthMismatch,
    MalformedRecord,
    NonConvergence,
    OneClassOnly,
    SchemaMismatch,
    SingleClass,
    TooFewExamples,
    ToolkitError,
)
from .evaluation import (
    ConfusionMatrix,
    MetricsReport,
    ModelSpec,
    confusion,
    cross_validate,
    metrics,
    model_spec,
    roc_auc,
    run_cv,
    run_holdout,
    stratified_folds,
)
from .features import (
    AccountMeasures,
    AccountMode,
    FeatureConfig,
    FeatureSet,
    FeatureVector,
    Selector,
    SentimentLexicon,
    SentimentMode,
    UseWords,
    build_dept_sent_vocab,
    compute_account_measures,
    entropy,
    info_gain,
    select_terms,
    transform_measures,
    tweet_sentiment,
    user_sentiment,
)
from .learners import (
    DecisionTreeModel,
    NaiveBayesModel,
    SvmModel,
    load_model,
    predict,
    predict_set,
    save_model,
    train_dt,
    train_nb,
    train_svm,
)
from .matrix import TermMatrix, Thesaurus, apply_tfidf, build_dtm, collapse_synonyms, prune_sparse
from .pipeline import FeaturePipeline, PreparedCorpus
from .resources import Resources, default_resources, load_resources
from .synth import SynthParams, generate
from .textprep import StopwordPolicy, TokenDoc, build_user_doc, normalize, stem, tokenize

__version__ = "0.1.0"
