"""Cost-sensitive PEGASOS SVMs for imbalanced binary classification."""
from ._accel import backend_name
from .data import ClassWeights, Dataset, LabeledPoint, class_weight, load_csv, split_holdout
from .errors import DegenerateDataError, InputError
from .kernel import KernelModel, KernelSpec, kernel_decision, kernel_eval, train_kernel
from .linear import LinearModel, TrainingTrace, decision_scores, hinge_objective, pegasos_step, project, train_linear
from .metrics import auc_pairwise, auc_trapezoid, roc_auc, roc_curve
from .sampler import BalancedSampler
from .selection import (
    CVResult,
    GridSpec,
    cross_validate,
    evaluate_holdout,
    grid_search,
    learning_curve,
    stratified_kfold,
    validation_curve,
)
from .solvers import fit
from .stopping import (
    StopStatistics,
    WaitingTimes,
    bias_corrected_p,
    collect_waiting_times,
    confidence_interval,
    mle_p,
    mleb_variance,
    select_stop_parameter,
)

__version__ = "0.1.0"
