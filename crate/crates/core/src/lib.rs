//! Volume types of point configurations.
//!
//! The volume type of `x = (x^1, .., x^k)` in `(R^d)^k` is the vector of signed
//! volumes `det(x^{j_1}, .., x^{j_d})` over all `d`-subsets, listed in
//! lexicographic subset order. Two non-degenerate configurations share a volume
//! type exactly when a unimodular map carries one onto the other.
//!
//! * [`geometry`]: volume types, degeneracy, group-element recovery, chains.
//! * [`canonical`]: the `(t, z)` chart of the volume-type manifold and its embedding.
//! * [`sets`]: half-cube lattices, the spherical map, control sets, sampling.
//! * [`measure`]: distinct counting, box counting, pair statistics, spectral scaling.

pub mod canonical;
pub mod error;
pub mod format;
pub mod geometry;
pub mod linalg;
pub mod measure;
pub mod rng;
pub mod sets;
pub mod subsets;

pub use canonical::{
    canonical_form, embed_phi, manifold_dim, phi_jacobian, CanonicalCoordinates, JacobianReport,
};
pub use error::{Error, NotEquivalentReason, Result};
pub use geometry::{
    chain_volume_type, fit_linear_map, is_degenerate, recover_group_element, same_volume_type,
    volume_type, ChainVolumes, Configuration, LinearFit, UnimodularMap, VolumeType,
};
pub use sets::{
    build_sharpness_set, control_set, lattice_points, sample_points, spherical_map, ControlKind,
    LatticeSpec, SetLabel, ThickenedSet,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
