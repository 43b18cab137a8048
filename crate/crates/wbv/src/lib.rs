//! Numerical laboratory for weighted bounded-variation calculus: weighted
//! total variation and perimeter, A1-weight machinery built on an uncentered
//! maximal operator, smooth approximation by mollification, the coarea
//! identity, the subgraph embedding of weighted 1-D variation, and weighted
//! Sobolev/isoperimetric inequality checks.

pub mod analysis;
pub mod bv1d;
pub mod domain;
pub mod error;
pub mod fixtures;
pub mod mollify;
pub mod measure;
pub mod quad;
pub mod shape;
pub mod suite;
pub mod util;
pub mod variation;
pub mod weight;
pub mod weights;

pub use analysis::{
    coarea_check, empirical_c1, gns_check, isometry_check, isoperimetric_check, subgraph_embed,
    weighted_volume, CoareaReport, CoareaTarget, EmbedObject, GnsInput, GnsMember, GnsReport,
    IsometryReport, IsoperimetricReport, SubgraphScene,
};
pub use bv1d::{
    approximability_probe_1d, mollified_indicator_tv, perimeter_1d, variation_1d, Expr,
    PiecewiseFunction1D,
};
pub use domain::{make_grid, BoxDomain, Grid, GridFunction};
pub use mollify::{
    approximability_probe, build_cover, check_coverage, choose_epsilons, mollifier_weight_bound,
    mollify_grid, smooth_approximate, standard_mollifier, ApproxVerdict, ApproximabilityReport,
    CoverPartition, EpsilonSchedule, Mollifier, MollifierBoundReport, PieceSchedule, ProbeTarget,
    SmoothApproxDiagnostics,
};
pub use error::{Result, WbvError};
pub use measure::Measure;
pub use shape::ShapeSet;
pub use suite::{run_suite, thread_cap, CriterionResult, SuiteReport};
pub use variation::{
    dual_lower_bound, lsc_probe, weighted_perimeter, weighted_tv, weighted_tv_refined, LscReport,
    TestField, VariationMethod, VariationReport,
};
pub use weight::{parse_weight, RadialProfile, Weight, WeightKind};
pub use weights::{
    check_pointwise_a1, classify_mf, coifman_rochberg, default_radii_schedule, delta_weight,
    estimate_a1_constant, maximal_function, probe_points, BallFamily, MaximalSource, MfReport,
    PointwiseA1Report,
};
