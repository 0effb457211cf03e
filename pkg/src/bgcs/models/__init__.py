from .evaluation import MODELS, EvalSummary, ModelParams, multi_run_eval, quartiles
from .forest import Forest, predict_forest, train_forest
from .logreg import LogisticModel, predict_logreg, train_logreg
from .metrics import ConfusionMatrix, accuracy, confusion, precision, recall
from .tree import (TrainedTree, TreeConfig, TreeNode, gini_impurity, predict_tree,
                   train_tree)
