//! Littlewood–Paley pieces of a discretised measure on a periodic grid.
//!
//! The measure is binned onto `N^d` cells of a torus of side `period`, Fourier
//! transformed, multiplied by the dyadic bump `psi(2^{-j} |xi|)`, and transformed
//! back. Sup and L2 norms of each piece are fitted against `j` on a log2 scale.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::fit::least_squares;
use crate::error::{Error, Result};
use crate::sets::{cantor_midpoints, SetLabel, ThickenedSet};

#[derive(Debug, Clone, PartialEq)]
pub enum SpectralMeasure {
    /// Normalised Lebesgue measure on `[start, end]` (d = 1).
    Uniform { start: f64, end: f64 },
    /// Natural measure of the depth-`depth` Cantor construction on `[0, 1]`:
    /// mass `2^-depth` spread evenly over each remaining interval (d = 1).
    Cantor { depth: u32, ratio: f64 },
    /// The sampling measure of a thickened set, each ball replaced by the cube
    /// of the same half-width.
    Set(ThickenedSet),
}

impl SpectralMeasure {
    pub fn dim(&self) -> usize {
        match self {
            SpectralMeasure::Set(s) => s.d(),
            _ => 1,
        }
    }

    /// The Frostman exponent the construction is designed to have, when known.
    pub fn natural_exponent(&self) -> Option<f64> {
        match self {
            SpectralMeasure::Uniform { .. } => Some(1.0),
            SpectralMeasure::Cantor { ratio, .. } => Some(2f64.ln() / (1.0 / ratio).ln()),
            SpectralMeasure::Set(s) => match s.label() {
                SetLabel::Sharpness { s, .. } => Some(*s),
                SetLabel::CantorProduct { d, ratio, .. } => {
                    Some(*d as f64 * 2f64.ln() / (1.0 / ratio).ln())
                }
                _ => None,
            },
        }
    }

    /// Mass elements: axis-aligned boxes `[lo, hi]` (per axis) with their masses.
    fn elements(&self) -> Result<(Vec<(Vec<(f64, f64)>, f64)>, usize)> {
        match self {
            SpectralMeasure::Uniform { start, end } => {
                if !(end > start) {
                    return Err(Error::InvalidParams(
                        "uniform measure needs start < end".into(),
                    ));
                }
                Ok((vec![(vec![(*start, *end)], 1.0)], 1))
            }
            SpectralMeasure::Cantor { depth, ratio } => {
                if !(*ratio > 0.0 && *ratio < 0.5) || *depth > 24 {
                    return Err(Error::InvalidParams(
                        "cantor needs ratio in (0, 1/2), depth <= 24".into(),
                    ));
                }
                let half = ratio.powi(*depth as i32) / 2.0;
                let mass = 0.5f64.powi(*depth as i32);
                let els = cantor_midpoints(*depth, *ratio)
                    .into_iter()
                    .map(|m| (vec![(m - half, m + half)], mass))
                    .collect();
                Ok((els, 1))
            }
            SpectralMeasure::Set(set) => {
                let d = set.d();
                let r = set.radius();
                let mass = 1.0 / set.len() as f64;
                let els = set
                    .centers()
                    .chunks_exact(d)
                    .map(|c| (c.iter().map(|&x| (x - r, x + r)).collect(), mass))
                    .collect();
                Ok((els, d))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralOptions {
    /// Cells per axis; a power of two, at least `2^12` (`2^8` per axis in two dimensions).
    pub grid_size: usize,
    pub j_min: u32,
    pub j_max: u32,
    /// Side of the periodic domain `[0, period)^d`.
    pub period: f64,
    /// Frostman exponent; defaults to the measure's natural exponent.
    pub s: Option<f64>,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            grid_size: 1 << 16,
            j_min: 4,
            j_max: 12,
            period: 2.0,
            s: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub grid_size: usize,
    pub d: usize,
    pub period: f64,
    pub s: f64,
    /// `d - s`: the growth exponent of the sup norms.
    pub target_exponent: f64,
    pub total_mass: f64,
    pub scales: Vec<u32>,
    pub sup_norms: Vec<f64>,
    pub l2_norms: Vec<f64>,
    pub fitted_slope_sup: Option<f64>,
    pub fitted_slope_l2: Option<f64>,
}

impl SpectralReport {
    /// `fitted_slope_sup <= (d - s) + tol` and `fitted_slope_l2 <= (d - s)/2 + tol`.
    pub fn within_bounds(&self, tol: f64) -> bool {
        match (self.fitted_slope_sup, self.fitted_slope_l2) {
            (Some(sup), Some(l2)) => {
                sup <= self.target_exponent + tol && l2 <= self.target_exponent / 2.0 + tol
            }
            _ => false,
        }
    }
}

fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / u).exp();
        let b = (-1.0 / (1.0 - u)).exp();
        a / (a + b)
    }
}

/// Smooth bump supported in `[1/2, 4]`, equal to one on `[1, 2]`.
pub fn dyadic_bump(r: f64) -> f64 {
    if r <= 0.5 || r >= 4.0 {
        0.0
    } else if r < 1.0 {
        smooth_step((r - 0.5) / 0.5)
    } else if r <= 2.0 {
        1.0
    } else {
        smooth_step((4.0 - r) / 2.0)
    }
}

/// Adds `mass * |[lo, hi] ∩ cell| / (hi - lo)` to each cell of a periodic axis.
fn spread_axis(lo: f64, hi: f64, n: usize, h: f64, period: f64) -> Vec<(usize, f64)> {
    let wrap = |i: i64| i.rem_euclid(n as i64) as usize;
    if hi <= lo {
        let x = lo.rem_euclid(period);
        return vec![(wrap((x / h).floor() as i64), 1.0)];
    }
    let len = hi - lo;
    let first = (lo / h).floor() as i64;
    let last = (hi / h).floor() as i64;
    if first == last {
        return vec![(wrap(first), 1.0)];
    }
    let mut out = Vec::with_capacity((last - first + 1) as usize);
    for i in first..=last {
        let a = (i as f64 * h).max(lo);
        let b = ((i + 1) as f64 * h).min(hi);
        if b > a {
            out.push((wrap(i), (b - a) / len));
        }
    }
    out
}

/// Bins the measure onto the grid; returns cell masses (row-major for d = 2).
pub fn discretize(measure: &SpectralMeasure, grid_size: usize, period: f64) -> Result<Vec<f64>> {
    let (elements, d) = measure.elements()?;
    let h = period / grid_size as f64;
    let mut grid = vec![0.0; grid_size.pow(d as u32)];
    for (bounds, mass) in elements {
        let axes: Vec<Vec<(usize, f64)>> = bounds
            .iter()
            .map(|&(lo, hi)| spread_axis(lo, hi, grid_size, h, period))
            .collect();
        match d {
            1 => {
                for &(i, w) in &axes[0] {
                    grid[i] += mass * w;
                }
            }
            2 => {
                for &(i, wi) in &axes[0] {
                    for &(j, wj) in &axes[1] {
                        grid[i * grid_size + j] += mass * wi * wj;
                    }
                }
            }
            _ => unreachable!(),
        }
    }
    Ok(grid)
}

fn fft_in_place(data: &mut [Complex64], n: usize, d: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    match d {
        1 => fft.process(data),
        _ => {
            // rows, then columns through a transpose
            fft.process(data);
            let mut t = vec![Complex64::new(0.0, 0.0); n * n];
            transpose(data, &mut t, n);
            fft.process(&mut t);
            transpose(&t, data, n);
        }
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    for r in 0..n {
        for c in 0..n {
            dst[c * n + r] = src[r * n + c];
        }
    }
}

/// Computes sup and L2 norms of the Littlewood–Paley pieces `mu_j`, `j_min <= j <= j_max`.
pub fn lp_scaling_check(
    measure: &SpectralMeasure,
    opts: &SpectralOptions,
) -> Result<SpectralReport> {
    let d = measure.dim();
    if d > 2 {
        return Err(Error::InvalidParams(format!(
            "spectral check supports d <= 2, got {d}"
        )));
    }
    let n = opts.grid_size;
    let min_n = if d == 1 { 1 << 12 } else { 1 << 8 };
    if !n.is_power_of_two() || n < min_n {
        return Err(Error::InvalidParams(format!(
            "grid size {n} must be a power of two >= {min_n}"
        )));
    }
    if !(opts.period > 0.0 && opts.period.is_finite()) {
        return Err(Error::InvalidParams("period must be positive".into()));
    }
    if opts.j_max < opts.j_min {
        return Err(Error::InvalidParams("j_max < j_min".into()));
    }
    // highest resolved frequency |xi| = (N/2) / period
    let nyquist = (n / 2) as f64 / opts.period;
    if 2f64.powi(opts.j_max as i32 + 2) > nyquist {
        return Err(Error::NyquistViolation {
            j: opts.j_max,
            nyquist,
        });
    }
    let s = opts
        .s
        .or_else(|| measure.natural_exponent())
        .ok_or_else(|| {
            Error::InvalidParams("Frostman exponent s must be given for this measure".into())
        })?;

    let grid = discretize(measure, n, opts.period)?;
    let total_mass: f64 = grid.iter().sum();
    let mut spectrum: Vec<Complex64> = grid.iter().map(|&m| Complex64::new(m, 0.0)).collect();
    fft_in_place(&mut spectrum, n, d, false);

    let freq = |i: usize| -> f64 {
        let m = if i < n / 2 {
            i as f64
        } else {
            i as f64 - n as f64
        };
        m / opts.period
    };
    let radius = |idx: usize| -> f64 {
        match d {
            1 => freq(idx).abs(),
            _ => freq(idx / n).hypot(freq(idx % n)),
        }
    };
    let vol = opts.period.powi(d as i32);

    let scales: Vec<u32> = (opts.j_min..=opts.j_max).collect();
    let mut sup_norms = Vec::with_capacity(scales.len());
    let mut l2_norms = Vec::with_capacity(scales.len());
    for &j in &scales {
        let dyadic = 2f64.powi(j as i32);
        let mut piece: Vec<Complex64> = spectrum
            .iter()
            .enumerate()
            .map(|(i, c)| c * dyadic_bump(radius(i) / dyadic))
            .collect();
        let l2_sq: f64 = piece.iter().map(|c| c.norm_sqr()).sum::<f64>() / vol;
        fft_in_place(&mut piece, n, d, true);
        let sup = piece.iter().map(|c| c.re.abs()).fold(0.0, f64::max) / vol;
        sup_norms.push(sup);
        l2_norms.push(l2_sq.sqrt());
    }

    let js: Vec<f64> = scales.iter().map(|&j| j as f64).collect();
    let fit = |norms: &[f64]| {
        let ys: Vec<f64> = norms.iter().map(|v| v.log2()).collect();
        least_squares(&js, &ys).map(|f| f.slope)
    };
    Ok(SpectralReport {
        grid_size: n,
        d,
        period: opts.period,
        s,
        target_exponent: d as f64 - s,
        total_mass,
        fitted_slope_sup: fit(&sup_norms),
        fitted_slope_l2: fit(&l2_norms),
        scales,
        sup_norms,
        l2_norms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_profile() {
        assert_eq!(dyadic_bump(0.5), 0.0);
        assert_eq!(dyadic_bump(1.0), 1.0);
        assert_eq!(dyadic_bump(1.7), 1.0);
        assert_eq!(dyadic_bump(2.0), 1.0);
        assert_eq!(dyadic_bump(4.0), 0.0);
        assert!(dyadic_bump(0.75) > 0.0 && dyadic_bump(0.75) < 1.0);
        assert!(dyadic_bump(3.0) > 0.0 && dyadic_bump(3.0) < 1.0);
    }

    #[test]
    fn binning_conserves_mass() {
        let m = SpectralMeasure::Cantor {
            depth: 10,
            ratio: 1.0 / 3.0,
        };
        let grid = discretize(&m, 1 << 12, 2.0).unwrap();
        assert!((grid.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let u = discretize(
            &SpectralMeasure::Uniform {
                start: 0.1,
                end: 0.7,
            },
            1 << 12,
            1.0,
        )
        .unwrap();
        assert!((u.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nyquist_is_enforced() {
        let m = SpectralMeasure::Uniform {
            start: 0.0,
            end: 1.0,
        };
        let opts = SpectralOptions {
            grid_size: 1 << 12,
            j_max: 10,
            ..Default::default()
        };
        assert!(matches!(
            lp_scaling_check(&m, &opts),
            Err(Error::NyquistViolation { .. })
        ));
        let opts = SpectralOptions {
            grid_size: 1000,
            ..Default::default()
        };
        assert!(matches!(
            lp_scaling_check(&m, &opts),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn wrapping_point_mass() {
        let set = ThickenedSet::from_points(&[vec![1.0]], 0.0, "p").unwrap();
        let grid = discretize(&SpectralMeasure::Set(set), 1 << 12, 1.0).unwrap();
        assert_eq!(grid[0], 1.0);
    }
}
