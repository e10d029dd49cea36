from vemsolver.special.functions import digamma, gamma, log_gamma, rgamma
from vemsolver.special.mittag_leffler import (
    MLParams,
    MittagLefflerTable,
    asymptotic_threshold,
    mittag_leffler,
    ml_kernel_weighted,
    ml_table,
    regime_for,
)

__all__ = [
    "MLParams",
    "MittagLefflerTable",
    "asymptotic_threshold",
    "digamma",
    "gamma",
    "log_gamma",
    "mittag_leffler",
    "ml_kernel_weighted",
    "ml_table",
    "regime_for",
    "rgamma",
]
