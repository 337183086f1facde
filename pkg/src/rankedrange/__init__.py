"""Ranked-range loss aggregation for robust learning.

Aggregate individual losses through the sum (or average) of a consecutive
range of their sorted values, trim-robust variants of the average / max /
median / top-k aggregates, plus difference-of-convex trainers for linear
models, a top-k multi-label loss, and the matching risk-measure view.
"""

from .core import (
    RankedRange,
    ValueSet,
    bilevel_corner_oracle,
    bottom_sum_variational,
    ranked_range_average,
    ranked_range_sum,
    sort_descending,
    top_k_sum,
    topk_variational_objective,
)
from .data import (
    DataParseError,
    Dataset,
    NoiseSpec,
    SyntheticSpec,
    flip_count,
    gen_multiclass_blobs,
    gen_multilabel_synthetic,
    gen_synthetic,
    inject_noise,
    load_dataset,
    monk_dataset,
    split_dataset,
    standardize,
    write_csv,
)
from .losses import (
    LabelSet,
    MarginLossKind,
    conventional_multilabel_loss,
    margin_loss,
    margin_loss_vec,
    per_label_hinges,
    softmax_loss_grad,
    tkml_aorr_objective,
    tkml_loss_subgrad,
    tkml_saddle_point,
)
from .metrics import (
    average_precision,
    error_rate,
    topk_accuracy,
    topk_multilabel_accuracy,
)
from .model import (
    LinearModel,
    ModelParseError,
    load_model,
    predict_matrix,
    predict_scores,
    regularized_objective_grad,
    save_model,
)
from .optim import (
    BinaryMarginLoss,
    LambdaPair,
    SoftmaxLoss,
    TKMLDataLoss,
    TKMLSampleLoss,
    TrainConfig,
    TrainReport,
    TrainingDiverged,
    adaptive_k,
    auto_train,
    dca_train,
    estimate_noise_count,
    lambda_pair_from_validation,
    make_loss_spec,
    multilabel_lr_train,
    phi_subgradient,
    sgd_average_train,
    sorr_objective,
    tkml_aorr_train,
)
from .riskmeasure import (
    RiskLevelPair,
    cvar_bound_check,
    empirical_cvar,
    empirical_icvar,
    deviation_bound_radii,
)

__version__ = "0.1.0"
