"""Relative prediction-accuracy toolkit built on the log accuracy ratio.

Core modules:

- ``metrics``: accuracy ratio, log-ratio and percentage-error measures
- ``estimators``: constant/line/power fits under four criteria
- ``simulator``: Monte Carlo model-selection experiments
- ``reference``: published benchmark rates and comparison helpers
- ``dataio``: CSV readers/writers and the residual bar chart

An HTTP service (``logq.service``) wraps the library, and the ``logq``
command line talks to that service (in-process by default).
"""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    LogqError,
    ParseError,
    RankDeficiencyError,
    SchemaError,
    ValidationError,
)
from .metrics import (
    MetricReport,
    PairedObservations,
    accuracy_ratio,
    evaluate_all,
    log_accuracy_ratio,
    lsd,
    mape,
    mer,
    relative_change_measures,
    smape,
    sum_sq_ln_q,
)
from .models import Constant, Linear, ModelForm, Power, predict
from .estimators import (
    Diagnostics,
    FitCriterion,
    FitResult,
    XYDataset,
    diagnostics,
    fit_constant,
    fit_linear,
    fit_power,
    weighted_median,
)
from .simulator import (
    ConstantAdditive,
    ConstantMultiplicative,
    PowerMultiplicative,
    SelectionMetric,
    SelectionTally,
    SimulationScenario,
    generate_replication,
    run_experiment,
    run_replication_range,
    run_table_suite,
    select_best_model,
)
from .dataio import (
    TableDocument,
    load_paired_csv,
    load_xy_csv,
    write_residual_svg,
    write_table_csv,
)
from .reference import ReferenceComparison, compare_with_reference

__all__ = [
    "__version__",
    "LogqError",
    "DomainError",
    "RankDeficiencyError",
    "SchemaError",
    "ParseError",
    "ValidationError",
    "PairedObservations",
    "MetricReport",
    "accuracy_ratio",
    "log_accuracy_ratio",
    "mape",
    "mer",
    "smape",
    "sum_sq_ln_q",
    "lsd",
    "relative_change_measures",
    "evaluate_all",
    "Constant",
    "Linear",
    "Power",
    "ModelForm",
    "predict",
    "FitCriterion",
    "XYDataset",
    "Diagnostics",
    "FitResult",
    "weighted_median",
    "fit_constant",
    "fit_linear",
    "fit_power",
    "diagnostics",
    "SelectionMetric",
    "PowerMultiplicative",
    "ConstantMultiplicative",
    "ConstantAdditive",
    "SimulationScenario",
    "SelectionTally",
    "generate_replication",
    "select_best_model",
    "run_experiment",
    "run_replication_range",
    "run_table_suite",
    "TableDocument",
    "load_xy_csv",
    "load_paired_csv",
    "write_table_csv",
    "write_residual_svg",
    "ReferenceComparison",
    "compare_with_reference",
]
