//! Hard distributions over indifferent trees and the experiment measuring
//! how often, and how badly, every learner is fooled at `n = n_κ`.

mod experiment;
mod hard;

pub use experiment::{
    branch_seed, run_lower_bound_experiment, run_lower_bound_suite, trial_seed, BranchMode,
    KappaCell, LowerBoundConfig, LowerBoundReport, Subject, CSV_HEADER,
};
pub use hard::{
    event_g_kappa, mass_audit, n_kappa, n_kappa_guard, node_mass, tail_mass,
    truncated_branch_distribution, Draw, HardDistribution, LevelWeights, Trace, Witness,
};
