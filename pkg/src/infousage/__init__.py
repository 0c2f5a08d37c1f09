"""Monte Carlo toolkit for measuring and bounding selection bias.

The package simulates adaptive data analysis: ensembles of candidate
statistics (:mod:`infousage.ensemble`), selection rules applied to them
(:mod:`infousage.selection`), entropy/mutual-information estimates of the
selection process (:mod:`infousage.infotheory`), closed-form bias and
error bounds driven by those estimates (:mod:`infousage.bounds`), a
multi-step noisy-query protocol with budget accounting
(:mod:`infousage.multistep`), and two worked studies: least angle
regression (:mod:`infousage.lars`) and ERM overfitting
(:mod:`infousage.classify`).  ``infousage.cli`` exposes the experiment
runner installed as the ``infousage`` command.
"""

from .bounds import (
    BoundReport,
    abs_error_bound,
    bias_bound,
    bias_bound_hetero,
    bias_bound_subexp,
    fourth_root_schedule,
    multistep_error_bound,
    overfit_bound,
    pvalue_bound,
    regret_bound,
    sq_error_bound,
    sq_error_lower_bound,
    sq_error_upper_bound_entropy,
    topk_bound,
    vc_info_bound,
)
from .classify import ClassificationSetup, erm_train, overfitting_audit
from .ensemble import (
    ReplicationBatch,
    StatisticEnsemble,
    empirical_bias,
    sample_batch,
)
from .errors import BudgetExhaustedError, ConfigurationError, InputError
from .infotheory import (
    InfoEstimate,
    binned_mutual_information,
    estimate_information_usage,
    kl_selection_decomposition,
    max_information_rank,
    plugin_entropy,
    pvalue_information,
)
from .lars import (
    LarsExperimentConfig,
    generate_lars_data,
    lars_information_curve,
    lars_path,
    univariate_coefficients,
)
from .multistep import (
    FixedSequence,
    GreedyMaxResponse,
    LinearReconstructor,
    QuerySession,
    composition_audit,
    greedy_error_curve,
    linear_reconstruction_demo,
    run_analyst,
)
from .selection import (
    ArgmaxRule,
    ArgminRule,
    GibbsRule,
    GroupedMaxRule,
    RawDataEnsembleView,
    SelectionRule,
    ThresholdRule,
    TopKUniformRule,
    VarianceFilterRule,
    argmax_select,
    argmin_select,
    gibbs_select,
    grouped_max_select,
    rule_from_dict,
    solve_gibbs_beta,
    threshold_select,
    top_k_uniform_select,
    variance_filter_select,
)

__version__ = "0.1.0"
