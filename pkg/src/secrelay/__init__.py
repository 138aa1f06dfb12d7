"""Max-min secrecy-rate beamforming for two-way AF relay networks.

The library computes relay beamforming coefficients that maximize the minimum
achievable secrecy rate of a two-way amplify-and-forward relay network under
eavesdropper nulling, via semidefinite relaxation of three geometric
sub-problems, and ships a brute-force oracle plus a Monte Carlo experiment
harness for validation.
"""

from .channel import (
    ChannelRealization,
    DegenerateChannelError,
    SystemConfig,
    dbw_to_watts,
    power_split_from_total,
    sample_channel,
    watts_to_dbw,
)
from .nullspace import (
    NullSpaceBasis,
    ZeroConstraintError,
    beamformer_from_coeffs,
    build_constraint_matrix,
    null_basis,
    nulling_residuals,
)
from .quadforms import ProblemMatrices, build_problem_matrices, quad_form, relay_power
from .rates import AsrBounds, asr_bounds, minimax_value

__version__ = "0.1.0"

__all__ = [
    "SystemConfig",
    "ChannelRealization",
    "DegenerateChannelError",
    "sample_channel",
    "power_split_from_total",
    "dbw_to_watts",
    "watts_to_dbw",
    "NullSpaceBasis",
    "ZeroConstraintError",
    "build_constraint_matrix",
    "null_basis",
    "beamformer_from_coeffs",
    "nulling_residuals",
    "ProblemMatrices",
    "build_problem_matrices",
    "quad_form",
    "relay_power",
    "AsrBounds",
    "asr_bounds",
    "minimax_value",
    "__version__",
]
