"""Random forest and linear SVM over handcrafted feature vectors."""

from .forest import (
    RandomForestConfig,
    RandomForestModel,
    balanced_class_weights,
    compute_oob_score,
    load_rf,
    rf_predict_proba,
    save_rf,
    train_random_forest,
)
from .svm import (
    PlattScaler,
    SvmConfig,
    SvmModel,
    load_svm,
    platt_fit,
    save_svm,
    svm_objective,
    svm_predict_proba,
    train_svm,
)
from .tree import DecisionTree, TreeNode, best_split, entropy

__all__ = [
    "DecisionTree",
    "PlattScaler",
    "RandomForestConfig",
    "RandomForestModel",
    "SvmConfig",
    "SvmModel",
    "TreeNode",
    "balanced_class_weights",
    "best_split",
    "compute_oob_score",
    "entropy",
    "load_rf",
    "load_svm",
    "platt_fit",
    "rf_predict_proba",
    "save_rf",
    "save_svm",
    "svm_objective",
    "svm_predict_proba",
    "train_random_forest",
    "train_svm",
]
