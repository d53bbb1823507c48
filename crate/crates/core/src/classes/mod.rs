//! Concrete hypothesis classes: explicit finite tables, thresholds on (0,1),
//! homogeneous half-spaces and the synthetic tree class `TreeClass(d)`.

mod finite;
mod halfspace;
mod threshold;
mod tree_class;

pub use finite::FiniteClass;
pub use halfspace::{halfspace_fractal_tree, FractalCell, FractalTree, HalfspaceClass, SIGN_BAND};
pub use threshold::{
    threshold_bisection_tree, BisectionTree, ThresholdClass, ThresholdInterval, ThresholdStrategy,
};
pub use tree_class::{
    tree_class_consistent, treeclass_branch_eval, IdentityTree, TreeClass, TreeClassStrategy,
};
