"""Exact simulation of two-stroke ergotropic Otto engines on two qudits.

Work is extracted by a permutation of the product energy basis and both
qudits are then fully rethermalized.  The package finds the work-optimal
permutation, computes the exact joint statistics of work and heat, checks
fluctuation theorems and thermodynamic uncertainty relations, and samples
cycles by Monte Carlo.
"""
from .ergotropy import (ErgotropyResult, RegimeLabel, RegimePoint, classify_unitary,
                        closed_form_work, ergotropic_unitary, exhaustive_max_work, mean_work,
                        regime_map, sort_permutations, unitary_for)
from .kernels import BACKEND
from .model import (BasisPermutation, DiagonalState, EnergyTable, EngineParams, ParameterError,
                    UNITARY_NAMES, apply_permutation, conserved_number_combination,
                    cycle_notation, energy_table, gibbs_state, log_gibbs_weights, named_unitary,
                    parse_cycles)
from .statistics import (CycleStatistics, JointWorkHeat, WorkAtom, backward_joint,
                         characteristic_function, characteristic_function_trace,
                         closed_form_entropy, closed_form_relative_fluctuations,
                         cycle_statistics, detailed_ft_check, entropy_production,
                         integral_ft_residual, joint_distribution, moments, work_marginal)
from .trajectory import (EmpiricalSummary, Estimate, MeanIdentityReport, Trajectory,
                         mean_identities_check, merge_summaries, sample_cycles,
                         sample_trajectories, summarize_trajectories)
from .tur import (BoundCheck, SweepRow, TurReport, evaluate_bounds, inverse_x_tanh_x,
                  snr_sweep, tur_report)

__version__ = "0.1.0"


__all__ = [
    "ErgotropyResult", "RegimeLabel", "RegimePoint", "classify_unitary", "closed_form_work",
    "ergotropic_unitary", "exhaustive_max_work", "mean_work", "regime_map",
    "sort_permutations", "unitary_for", "BACKEND", "BasisPermutation", "DiagonalState",
    "EnergyTable", "EngineParams", "ParameterError", "UNITARY_NAMES", "apply_permutation",
    "conserved_number_combination", "cycle_notation", "energy_table", "gibbs_state",
    "log_gibbs_weights", "named_unitary", "parse_cycles", "CycleStatistics", "JointWorkHeat",
    "WorkAtom", "backward_joint", "characteristic_function", "characteristic_function_trace",
    "closed_form_entropy", "closed_form_relative_fluctuations", "cycle_statistics",
    "detailed_ft_check", "entropy_production", "integral_ft_residual", "joint_distribution",
    "moments", "work_marginal", "EmpiricalSummary", "Estimate", "MeanIdentityReport",
    "Trajectory", "mean_identities_check", "merge_summaries", "sample_cycles",
    "sample_trajectories", "summarize_trajectories", "BoundCheck", "SweepRow", "TurReport",
    "evaluate_bounds", "inverse_x_tanh_x", "snr_sweep", "tur_report", "__version__"
]
