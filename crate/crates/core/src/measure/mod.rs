//! Quantitative experiments on volume-type sets.

pub mod boxcount;
pub mod counting;
pub mod fit;
mod keys;
pub mod pairstat;
pub mod spectral;

pub use boxcount::{
    box_count_volume_types, box_count_volume_types_multi, box_dimension_estimate,
    chain_measure_estimate, chain_measure_estimate_multi, BoxCountReport, DimensionFit,
};
pub use counting::{
    count_distinct_volume_types, sharpness_scaling, CountOptions, CountReport, ScalingReport,
    TupleMode,
};
pub use fit::{least_squares, LineFit};
pub use pairstat::{pair_count_statistic, PairCountOptions, PairCountReport, PairMap};
pub use spectral::{lp_scaling_check, SpectralMeasure, SpectralOptions, SpectralReport};
