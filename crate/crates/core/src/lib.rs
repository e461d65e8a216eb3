//! Complete, Lipschitz-continuous isometry invariants of finite unlabelled
//! point clouds in `R^n`, with computable metrics on those invariants and
//! fast moment-vector lower bounds.
//!
//! The pipeline: [`geometry`] supplies cloud primitives, [`strength`] the
//! continuous simplex strength, [`invariants`] the OSD/SCD distributions,
//! [`metrics`] bottleneck/assignment/flow distances on them, [`moments`]
//! flattened moment vectors with `L_inf` lower bounds, [`oracle`] a
//! brute-force ground truth for small clouds, and [`io`] file formats plus
//! canonical serialization.

pub mod error;
pub mod geometry;
pub mod invariants;
pub mod io;
pub mod metrics;
pub mod moments;
pub mod oracle;
pub mod strength;

pub use error::{Error, Result};
pub use geometry::{
    affine_dimension, apply_isometry, centre_cloud, centre_of_mass, distance, orientation_sign,
    random_isometry, DistanceMatrix, Isometry, OrientationKind, PointCloud, Tolerance,
};
pub use invariants::{
    build_distance_matrix, build_ocd, build_ord, build_osd, build_scd, mirror, Anchor,
    CentredDist, Column, Invariant, RelativeDist, WeightedDist,
};
pub use metrics::{
    bottleneck, emd, lac, linf, m_inf_ocd, m_inf_ord, osd_distance, scd_distance, CostMatrix,
    Flow, Method, Mode,
};
pub use moments::{cdm, moment, odm, sorted_distance_vector, MomentKind, MomentVector};
pub use oracle::{
    brute_force_isometric, reconstruct_from_distances, reconstruct_from_ord, AlignmentResult,
};
pub use strength::{
    cayley_menger_volume_sq, half_sum_distances, lipschitz_constant, normalized_signed_strength,
    rencontre, strength, SimplexDistances, StrengthConstants,
};
