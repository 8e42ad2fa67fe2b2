"""Spin squeezing of a twisted spin ensemble under protected decoherence channels.

The package models an N-spin register prepared by one-axis twisting and sent
through a per-spin sandwich "weak measurement + decoherence channel +
measurement reversal" with post-selection on the reversal outcome.  Closed-form
correlation transport and squeezing reports live next to an exact brute-force
oracle that validates them.
"""

from .initial_state import (
    CorrelationSet,
    DickeState,
    SystemConfig,
    closed_initial_correlations,
    correlations_from_rho12,
    oracle_initial_correlations,
    rho12_from_correlations,
    twisted_state_dicke,
)
from .channels import (
    ChannelKind,
    ConstraintError,
    DualMapCoefficients,
    ProtectedChannel,
    bypass_channel,
    dual_map,
    evolve_correlations,
    kraus_operators,
    p_from_time,
    solve_strengths,
    weak_operators,
)
from .metrics import (
    SqueezingReport,
    asymptotic_report,
    block_concurrence,
    closed_form_report,
    report_from_correlations,
    varsigma_sq,
    xi1_sq,
    xi2_sq,
    xi3_sq,
)
from .oracle import (
    PostSelectionError,
    block_form_check,
    collective_squeezing,
    post_selected_correlations,
    post_selected_rho12,
    post_selected_rho_full,
    wootters_concurrence,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelKind",
    "ConstraintError",
    "CorrelationSet",
    "DickeState",
    "DualMapCoefficients",
    "PostSelectionError",
    "ProtectedChannel",
    "SqueezingReport",
    "SystemConfig",
    "asymptotic_report",
    "block_concurrence",
    "block_form_check",
    "bypass_channel",
    "closed_form_report",
    "closed_initial_correlations",
    "collective_squeezing",
    "correlations_from_rho12",
    "dual_map",
    "evolve_correlations",
    "kraus_operators",
    "oracle_initial_correlations",
    "p_from_time",
    "post_selected_correlations",
    "post_selected_rho12",
    "post_selected_rho_full",
    "report_from_correlations",
    "rho12_from_correlations",
    "solve_strengths",
    "twisted_state_dicke",
    "varsigma_sq",
    "weak_operators",
    "wootters_concurrence",
    "xi1_sq",
    "xi2_sq",
    "xi3_sq",
]
