'''Bring classifier functions up to the package level.'''

from .base import ClassifierSpec, DEFAULT_HYPERPARAMS, sign_with_tie
from .kernels import KernelSpec, kernel_eval, kernel_matrix
from .logistic import LinearModel, train_logistic, logistic_loss_and_grad
from .knn import KnnModel, train_knn, knn_predict
from .svm import KernelMachineModel, train_svm_smo
from .tree import TreeModel, train_tree, gini, leaf_weight
from .ensemble import EnsembleModel
from .forest import train_forest
from .adaboost import train_adaboost
from .gboost import train_gboost
from .xgboost_like import train_xgboost_like
from .mlp import MlpModel, train_mlp, mlp_loss_and_grads
from .dispatch import fit, predict, predict_many, decision_function
from .serialize import save_model, load_model, model_to_dict, model_from_dict
