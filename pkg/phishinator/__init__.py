'''Bring functions up to the correct level.'''

# Data
from .schema import FeatureSchema, canonical_schema, FEATURE_NAMES
from .dataset import (
    Dataset, LabeledSample, FoldPlan, load_csv, load_feature_csv, save_csv,
    summarize, stratified_kfold, stratified_mask, holdout_split)

# Feature extraction
from .urls import UrlParts, parse_url
from .features import (
    RawWebsiteObservation, ExternalEvidence, EvidenceTable, load_evidence,
    extract_lexical, extract_content, extract_reputation, extract_all,
    LEXICAL_FEATURES, CONTENT_FEATURES, REPUTATION_FEATURES)
from .thresholds import default_thresholds, load_thresholds
from .ingest import ingest_phishtank_dump

# Classifiers
from .classifiers import (
    ClassifierSpec, KernelSpec, DEFAULT_HYPERPARAMS, fit, predict,
    predict_many, decision_function, kernel_eval, knn_predict,
    train_logistic, train_svm_smo, train_tree, train_forest, train_adaboost,
    train_gboost, train_xgboost_like, train_mlp, save_model, load_model)

# Evaluation
from .metrics import ConfusionCounts, MetricsReport, confusion, metrics
from .evaluation import (
    CrossValReport, SweepResult, cross_validate, sweep, correlation_matrix,
    COMPARISON_BATTERY)
from .report import emit_report, parse_report
