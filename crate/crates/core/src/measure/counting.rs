//! Distinct volume types over ordered k-tuples of a finite center set.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::least_squares;
use super::keys::{KeySet, Packer};
use crate::canonical::manifold_dim;
use crate::error::{Error, Result};
use crate::geometry::VolumeEvaluator;
use crate::linalg::norm2;
use crate::rng::{IndexPermutation, CHUNK};
use crate::sets::{build_sharpness_set, LatticeSpec, SetLabel, ThickenedSet};

pub const DEFAULT_ROUNDING_DELTA: f64 = 1e-9;
pub const DEFAULT_TUPLE_BUDGET: u64 = 200_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TupleMode {
    Exhaustive,
    /// `n` ordered tuples drawn without replacement; distinct counts are lower bounds.
    Sampled {
        n: u64,
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountOptions {
    pub delta: f64,
    pub mode: TupleMode,
    /// Largest number of tuples exhaustive mode may enumerate.
    pub budget: u64,
}

impl Default for CountOptions {
    fn default() -> Self {
        Self {
            delta: DEFAULT_ROUNDING_DELTA,
            mode: TupleMode::Exhaustive,
            budget: DEFAULT_TUPLE_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountReport {
    pub q: Option<u32>,
    pub s: Option<f64>,
    pub d: usize,
    pub k: usize,
    pub num_centers: usize,
    pub num_tuples_evaluated: u64,
    /// False when tuples were sampled; `distinct_count` is then a lower bound.
    pub exhaustive: bool,
    pub distinct_count: u64,
    pub rounding_delta: f64,
    /// Thickening radius of the set (`q^{-d/s}` for sharpness sets).
    pub epsilon: f64,
    /// `distinct_count * epsilon^{d(k-d)+1}`.
    pub measure_upper_estimate: f64,
}

/// Counts distinct volume types over ordered `k`-tuples of the centers of `set`,
/// after rounding every entry to the nearest multiple of `opts.delta`.
pub fn count_distinct_volume_types(
    set: &ThickenedSet,
    k: usize,
    opts: &CountOptions,
) -> Result<CountReport> {
    let d = set.d();
    if d < 2 || k < d {
        return Err(Error::InvalidParams(format!(
            "need k >= d >= 2, got d={d}, k={k}"
        )));
    }
    if !(opts.delta > 0.0 && opts.delta.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "rounding delta {} must be > 0",
            opts.delta
        )));
    }
    let n = set.len();
    let total = (n as u128)
        .checked_pow(k as u32)
        .ok_or(Error::InvalidParams("tuple count overflows".into()))?;

    let (evaluated, exhaustive, perm) = match opts.mode {
        TupleMode::Exhaustive => {
            if total > opts.budget as u128 {
                return Err(Error::BudgetExceeded {
                    tuples: total,
                    budget: opts.budget,
                });
            }
            (total as u64, true, None)
        }
        TupleMode::Sampled { n: want, seed } => {
            if want == 0 {
                return Err(Error::InvalidParams("sampled mode needs n >= 1".into()));
            }
            if want as u128 >= total {
                (total as u64, true, None)
            } else {
                let size = u64::try_from(total)
                    .map_err(|_| Error::InvalidParams("tuple space exceeds 2^64".into()))?;
                (want, false, Some(IndexPermutation::new(size, seed)))
            }
        }
    };

    let width = crate::subsets::binomial(k, d);
    // Hadamard: |det| <= R^d, so rounded keys stay within R^d / delta + 1.
    let max_norm = set.centers().chunks_exact(d).map(norm2).fold(0.0, f64::max);
    let bound = max_norm.powi(d as i32) / opts.delta + 1.0;
    if !(bound < 4.0e18) {
        return Err(Error::InvalidParams(format!(
            "rounding delta {} too small for volumes of size {}",
            opts.delta,
            max_norm.powi(d as i32)
        )));
    }
    let packer = Packer::new(width, bound.ceil() as u64);

    let num_chunks = evaluated.div_ceil(CHUNK as u64);
    let keys = (0..num_chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK as u64;
            let end = (start + CHUNK as u64).min(evaluated);
            let mut eval = VolumeEvaluator::new(k, d);
            let mut coords = vec![0.0; k * d];
            let mut vols = vec![0.0; width];
            let mut rows = Vec::with_capacity((end - start) as usize * width);
            for i in start..end {
                let mut idx = perm.as_ref().map_or(i, |p| p.permute(i));
                // last tuple slot varies fastest
                for slot in (0..k).rev() {
                    let center = (idx % n as u64) as usize;
                    idx /= n as u64;
                    coords[slot * d..(slot + 1) * d].copy_from_slice(set.center(center));
                }
                eval.eval(&coords, &mut vols);
                rows.extend(vols.iter().map(|v| (v / opts.delta).round() as i64));
            }
            KeySet::from_rows(&rows, width, packer)
        })
        .reduce(|| KeySet::empty(packer.is_some()), KeySet::union);

    let distinct_count = keys.len() as u64;
    let (q, s) = match set.label() {
        SetLabel::Sharpness { q, s, .. } => (Some(*q), Some(*s)),
        _ => (None, None),
    };
    let epsilon = set.radius();
    Ok(CountReport {
        q,
        s,
        d,
        k,
        num_centers: n,
        num_tuples_evaluated: evaluated,
        exhaustive,
        distinct_count,
        rounding_delta: opts.delta,
        epsilon,
        measure_upper_estimate: distinct_count as f64 * epsilon.powi(manifold_dim(k, d) as i32),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub reports: Vec<CountReport>,
    /// Least-squares slope of `ln distinct_count` against `ln q` (needs three or more `q`).
    pub slope: Option<f64>,
    /// The counting exponent `d(k-1)+1`.
    pub reference_exponent: usize,
    pub warnings: Vec<String>,
}

/// Runs [`count_distinct_volume_types`] on the sharpness set for each `q`.
pub fn sharpness_scaling(
    qs: &[u32],
    s: f64,
    d: usize,
    k: usize,
    opts: &CountOptions,
) -> Result<ScalingReport> {
    if qs.is_empty() {
        return Err(Error::EmptyInput("q list"));
    }
    let mut reports = Vec::with_capacity(qs.len());
    for &q in qs {
        let set = build_sharpness_set(&LatticeSpec::new(q, s, d)?);
        reports.push(count_distinct_volume_types(&set, k, opts)?);
    }
    let mut warnings = Vec::new();
    let slope = if qs.len() >= 3 {
        let xs: Vec<f64> = reports.iter().map(|r| (r.q.unwrap() as f64).ln()).collect();
        let ys: Vec<f64> = reports
            .iter()
            .map(|r| (r.distinct_count as f64).ln())
            .collect();
        least_squares(&xs, &ys).map(|f| f.slope)
    } else {
        warnings.push(format!(
            "slope needs at least 3 values of q, got {}",
            qs.len()
        ));
        None
    };
    if reports.iter().any(|r| !r.exhaustive) {
        warnings.push("sampled counts are lower bounds".into());
    }
    Ok(ScalingReport {
        reports,
        slope,
        reference_exponent: d * (k - 1) + 1,
        warnings,
    })
}
