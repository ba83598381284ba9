from paretomine.mining.cart import (
    CartConfig,
    DecisionTree,
    LabeledSample,
    accuracy,
    balance_by_replication,
    cart_classify,
    cart_train,
    class_weights,
    leaf_rules,
    rules_text,
    to_dot,
)
from paretomine.mining.clustering import ClusterAssignment, kmeans
from paretomine.mining.front import (
    order_by_objective,
    parameter_autocorrelation,
    select_compromise,
    select_neighborhood,
)

__all__ = [
    "CartConfig", "ClusterAssignment", "DecisionTree", "LabeledSample", "accuracy",
    "balance_by_replication", "cart_classify", "cart_train", "class_weights", "kmeans",
    "leaf_rules", "order_by_objective", "parameter_autocorrelation", "rules_text",
    "select_compromise", "select_neighborhood", "to_dot",
]
