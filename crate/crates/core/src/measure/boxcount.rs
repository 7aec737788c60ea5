//! Box-counting estimates in chart coordinates, chain coordinates, and for raw center sets.

use rayon::prelude::*;
use serde::Serialize;

use super::fit::least_squares;
use super::keys::count_distinct_rows;
use crate::canonical::{canonical_form, manifold_dim};
use crate::error::{Error, Result};
use crate::geometry::{self, Configuration, DEFAULT_DEGENERACY_TOL};
use crate::linalg;
use crate::sets::ThickenedSet;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxCountReport {
    pub epsilon: f64,
    /// Target dimension the boxes live in.
    pub n: usize,
    pub num_samples: usize,
    pub occupied_boxes: u64,
    /// Boxes holding only samples outside the chart (binned by their raw volume type).
    pub degenerate_boxes: u64,
    /// `occupied_boxes * epsilon^n`.
    pub measure_estimate: f64,
    pub skipped_degenerate_fraction: f64,
}

fn bin(rows: &[f64], epsilon: f64) -> Vec<i64> {
    rows.iter().map(|v| (v / epsilon).floor() as i64).collect()
}

/// `|v| <= tol * prod |x^j|` over the points behind `v` counts as an exact zero, so
/// round-off on either side of zero does not split a box.
fn snap(v: f64, norms: impl Iterator<Item = f64>) -> f64 {
    let scale: f64 = norms.map(|n| n.max(DEFAULT_DEGENERACY_TOL)).product();
    if v.abs() <= DEFAULT_DEGENERACY_TOL * scale {
        0.0
    } else {
        v
    }
}

fn point_norms(x: &Configuration) -> Vec<f64> {
    x.points().map(linalg::norm2).collect()
}

fn snapped_volume_type(x: &Configuration, subsets: &[Vec<usize>]) -> Vec<f64> {
    let norms = point_norms(x);
    geometry::volume_type(x)
        .values
        .into_iter()
        .zip(subsets)
        .map(|(v, s)| snap(v, s.iter().map(|&j| norms[j])))
        .collect()
}

fn snapped_chain(x: &Configuration) -> Vec<f64> {
    let norms = point_norms(x);
    let d = x.d();
    geometry::chain_volume_type(x)
        .values
        .into_iter()
        .enumerate()
        .map(|(j, v)| snap(v, norms[j..j + d].iter().copied()))
        .collect()
}

fn check_eps(epsilons: &[f64]) -> Result<()> {
    if epsilons.is_empty() {
        return Err(Error::EmptyInput("epsilon list"));
    }
    if let Some(e) = epsilons.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidParams(format!(
            "epsilon {e} must be positive"
        )));
    }
    Ok(())
}

fn check_shape(samples: &[Configuration]) -> Result<(usize, usize)> {
    let first = samples.first().ok_or(Error::EmptyInput("samples"))?;
    let (d, k) = (first.d(), first.k());
    if let Some(bad) = samples.iter().find(|c| c.d() != d || c.k() != k) {
        return Err(Error::DimensionMismatch {
            expected: k * d,
            found: bad.k() * bad.d(),
        });
    }
    Ok((d, k))
}

/// Box counts of the volume types of `samples` in chart coordinates, one report per epsilon.
///
/// Non-degenerate samples are mapped through [`canonical_form`] and binned on an
/// `epsilon` grid in `R^{d(k-d)+1}`. Samples outside the chart are counted in
/// `skipped_degenerate_fraction` and binned separately by their volume type
/// (`degenerate_boxes`), so a set whose tuples are all degenerate still reports the
/// boxes its volume types occupy.
pub fn box_count_volume_types_multi(
    samples: &[Configuration],
    epsilons: &[f64],
) -> Result<Vec<BoxCountReport>> {
    check_eps(epsilons)?;
    let (d, k) = check_shape(samples)?;
    let n = manifold_dim(k, d);
    let width = crate::subsets::binomial(k, d);
    let subsets = crate::subsets::subsets(k, d);

    let mapped: Vec<std::result::Result<Vec<f64>, Vec<f64>>> = samples
        .par_iter()
        .map(|x| match canonical_form(x, DEFAULT_DEGENERACY_TOL) {
            Ok(c) => Ok(c.to_vector()),
            Err(_) => Err(snapped_volume_type(x, &subsets)),
        })
        .collect();
    let chart: Vec<f64> = mapped
        .iter()
        .filter_map(|m| m.as_ref().ok())
        .flatten()
        .copied()
        .collect();
    let degenerate: Vec<f64> = mapped
        .iter()
        .filter_map(|m| m.as_ref().err())
        .flatten()
        .copied()
        .collect();
    let skipped = degenerate.len() / width;

    Ok(epsilons
        .iter()
        .map(|&eps| {
            let chart_boxes = count_distinct_rows(&bin(&chart, eps), n) as u64;
            let degenerate_boxes = count_distinct_rows(&bin(&degenerate, eps), width) as u64;
            let occupied = chart_boxes + degenerate_boxes;
            BoxCountReport {
                epsilon: eps,
                n,
                num_samples: samples.len(),
                occupied_boxes: occupied,
                degenerate_boxes,
                measure_estimate: occupied as f64 * eps.powi(n as i32),
                skipped_degenerate_fraction: skipped as f64 / samples.len() as f64,
            }
        })
        .collect())
}

pub fn box_count_volume_types(samples: &[Configuration], epsilon: f64) -> Result<BoxCountReport> {
    Ok(box_count_volume_types_multi(samples, &[epsilon])?.remove(0))
}

/// Box counts of chain-volume vectors in `R^{k+1-d}`, one report per epsilon.
pub fn chain_measure_estimate_multi(
    samples: &[Configuration],
    epsilons: &[f64],
) -> Result<Vec<BoxCountReport>> {
    check_eps(epsilons)?;
    let (d, k) = check_shape(samples)?;
    let n = k + 1 - d;
    let values: Vec<f64> = samples.par_iter().flat_map_iter(snapped_chain).collect();
    Ok(epsilons
        .iter()
        .map(|&eps| {
            let occupied = count_distinct_rows(&bin(&values, eps), n) as u64;
            BoxCountReport {
                epsilon: eps,
                n,
                num_samples: samples.len(),
                occupied_boxes: occupied,
                degenerate_boxes: 0,
                measure_estimate: occupied as f64 * eps.powi(n as i32),
                skipped_degenerate_fraction: 0.0,
            }
        })
        .collect())
}

pub fn chain_measure_estimate(samples: &[Configuration], epsilon: f64) -> Result<BoxCountReport> {
    Ok(chain_measure_estimate_multi(samples, &[epsilon])?.remove(0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionFit {
    pub epsilons: Vec<f64>,
    pub box_counts: Vec<u64>,
    /// Slope of `ln N(eps)` against `ln(1/eps)`.
    pub dimension: f64,
    pub intercept: f64,
}

/// Box-counting dimension of the center set of `set` over the given scales.
pub fn box_dimension_estimate(set: &ThickenedSet, epsilons: &[f64]) -> Result<DimensionFit> {
    check_eps(epsilons)?;
    if epsilons.len() < 4 {
        return Err(Error::InvalidParams(format!(
            "box dimension needs at least 4 scales, got {}",
            epsilons.len()
        )));
    }
    if let Some(e) = epsilons.iter().find(|&&e| e < set.radius()) {
        return Err(Error::InvalidParams(format!(
            "scale {e} is below the thickening radius {}",
            set.radius()
        )));
    }
    let box_counts: Vec<u64> = epsilons
        .iter()
        .map(|&eps| count_distinct_rows(&bin(set.centers(), eps), set.d()) as u64)
        .collect();
    let xs: Vec<f64> = epsilons.iter().map(|e| -e.ln()).collect();
    let ys: Vec<f64> = box_counts.iter().map(|&c| (c as f64).ln()).collect();
    let fit = least_squares(&xs, &ys)
        .ok_or_else(|| Error::InvalidParams("scales must be distinct".into()))?;
    Ok(DimensionFit {
        epsilons: epsilons.to_vec(),
        box_counts,
        dimension: fit.slope,
        intercept: fit.intercept,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_samples_fill_one_box() {
        let x = Configuration::new(2, &[vec![1.0, 0.2], vec![0.1, 0.9], vec![0.4, 0.4]]).unwrap();
        let samples = vec![x; 10];
        let r = box_count_volume_types(&samples, 0.01).unwrap();
        assert_eq!(r.occupied_boxes, 1);
        assert_eq!(r.n, 3);
        assert_eq!(r.skipped_degenerate_fraction, 0.0);
    }

    #[test]
    fn degenerate_samples_land_in_their_own_stratum() {
        let bad = Configuration::new(2, &[vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        let r = box_count_volume_types(&[bad.clone(), bad], 0.1).unwrap();
        assert_eq!(r.occupied_boxes, 1);
        assert_eq!(r.degenerate_boxes, 1);
        assert_eq!(r.skipped_degenerate_fraction, 1.0);
    }

    #[test]
    fn square_chain_is_one_dimensional_box_count() {
        let samples: Vec<Configuration> = [0.05, 0.12, 0.13, 0.31]
            .iter()
            .map(|&t| Configuration::new(2, &[vec![1.0, 0.0], vec![0.0, t]]).unwrap())
            .collect();
        let r = chain_measure_estimate(&samples, 0.1).unwrap();
        assert_eq!(r.n, 1);
        // dets 0.05, 0.12, 0.13, 0.31 -> boxes 0, 1, 1, 3
        assert_eq!(r.occupied_boxes, 3);
    }

    #[test]
    fn input_validation() {
        assert!(box_count_volume_types(&[], 0.1).is_err());
        let x = Configuration::new(2, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(box_count_volume_types(&[x], 0.0).is_err());
        let set = ThickenedSet::from_points(&[vec![0.0, 0.0]], 0.1, "p").unwrap();
        assert!(box_dimension_estimate(&set, &[0.5, 0.25, 0.125]).is_err());
        assert!(box_dimension_estimate(&set, &[0.5, 0.25, 0.125, 0.05]).is_err());
    }
}
