"""Analytic continuation of Bethe-ansatz energies of the non-compact SL(2) chain.

Large-twist series from filling moments, continuation around the m = -1
pseudo-vacuum, trajectories in moment space, first-level excitations and a
finite-size Bethe-equation solver to check them.
"""

from .excitations import (
    PairedExcitation,
    eta_derivative_along_trajectory,
    eta_derivative_largephi,
    eta_derivative_pseudovacuum_phi0,
    gap_scan,
    pair_real,
)
from .largephi import (
    LargePhiSeries,
    dual_expansion_crosscheck,
    estimate_radius,
    evaluate,
    expand_coefficients,
)
from .moments import (
    Block,
    Filling,
    bethe_numbers_for,
    edge_split,
    finite_size_moments,
    ground_state,
    moments_piecewise,
    standard,
    three_block,
)
from .pseudovacuum import (
    PHI_CRIT,
    X_CRIT,
    EnergySeries,
    delta_kernel,
    delta_mirror,
    derivatives_at_pseudovacuum,
    first_derivative_closed_form,
    mirror_derivatives_at_m1,
    mirror_first_derivative,
)
from .solver import BetheState, energy, residual_exp, residual_log, solve_twisted, solve_untwisted
from .trajectory import (
    TRAJ1,
    TRAJ2,
    TrajectorySpec,
    assemble_sl2c,
    extrapolate,
    get_trajectory,
    trajectory_energy,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
