//! Exact arithmetic on topographs of integer binary quadratic forms.
//!
//! A form `a m^2 + b mn + c n^2` induces a labeling of the trivalent tree
//! of lattice superbases; walking that tree turns many two-variable lattice
//! sums into telescoping series with closed forms. This crate builds the
//! tree exactly over big integers, telescopes vertex sums of the shapes
//! `1/(rst)` and `1/(efg)`, evaluates their arcsin/arcsinh closed forms in
//! arbitrary-precision floats, and cross-checks a catalog of classical
//! identities (class numbers, fundamental units, Euler's constant) built
//! from them.

pub mod bqf;
pub mod classnumber;
pub mod closed_forms;
pub mod error;
pub mod indefinite;
pub mod num;
pub mod real;
pub mod series;
pub mod topograph;
pub mod verify;

pub use bqf::{check_algebraic, AlgebraicIdentity, OrientedEdge, QuadraticForm, VertexStar};
pub use classnumber::{full_topograph_check, hurwitz_check, reduced_forms, ReducedFormSet};
pub use closed_forms::{
    arcsin_branched, bernoulli, check_split, check_triple, closed_efg, closed_rst, digamma,
    tanh_sinh, w1, w1_identity_residual, w1_sum_check, ClosedFormInput, SplitIdentity,
    TripleIdentity,
};
pub use error::{Error, Result};
pub use indefinite::{
    canonical_period, find_river, fundamental_unit, river_arctanh_sum, river_period,
    river_vertex_sum, seed_form, square_class_identity, square_class_identity_with,
    square_river_sum, z_reduced_default, PellSolution, RiverPeriod,
};
pub use num::{divisors, euler_phi, moebius, trial_factor, Int, Rat};
pub use real::{Real, DEFAULT_PREC};
pub use series::{
    cone_sum_direct, hurwitz_quarter_direct, mediant_children, mordell_tornheim_direct,
    named_series, sum_efg, sum_rst, SeriesResult, SternBrocotConstraint, SumKind, SumMethod,
};
pub use topograph::{
    direct_efg_partial, direct_rst_partial, export_dot, export_json, frontier, is_admissible,
    telescoped_efg_partial, telescoped_rst_partial, telescoped_rst_partial_real,
    zero_disc_efg_partial, zero_disc_rst_partial, AdmissibilityCriterion, AdmissibilityReport,
    BoundedPartial, Frontier, DEFAULT_NODE_BUDGET,
};
pub use verify::{run_all, run_one, CriterionResult};
