"""Bulk-ensemble oracle simulation and input-error certification.

Thin re-export of the compiled core. Everything returns plain dicts and
lists; errors surface as ValueError (domain/guard violations) or
RuntimeError (internal invariant breaches).
"""

from bulkq._core import (
    __version__,
    affine_table,
    balanced_count,
    certify_oracle_circuit,
    classify,
    commutation_residual,
    constant_table,
    dj_spectrum,
    enumerate_balanced,
    epsilon_exact,
    epsilon_sampled,
    estimate_repetitions,
    inner_product_table,
    run_dj,
    run_parity,
    run_qudit_parity,
    sample_balanced,
    selftest,
    sum_rule_check,
    verify_fact2,
)

__all__ = [
    "__version__",
    "affine_table",
    "balanced_count",
    "certify_oracle_circuit",
    "classify",
    "commutation_residual",
    "constant_table",
    "dj_spectrum",
    "enumerate_balanced",
    "epsilon_exact",
    "epsilon_sampled",
    "estimate_repetitions",
    "inner_product_table",
    "run_dj",
    "run_parity",
    "run_qudit_parity",
    "sample_balanced",
    "selftest",
    "sum_rule_check",
    "verify_fact2",
]
