//! The chart `(t, z^{d+1}, .., z^k)` of the volume-type manifold.
//!
//! Every non-degenerate configuration has exactly one representative of the form
//! `(e^1, .., e^{d-1}, t e^d, z^{d+1}, .., z^k)` in its unimodular orbit; the chart
//! coordinates of that representative are what this module computes and embeds.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{self, Configuration, VolumeType};
use crate::linalg::Lu;

/// Default lower bound on `|t|` for a point to lie in the chart.
pub const DEFAULT_CHART_FLOOR: f64 = 1e-10;
/// Singular values below this fraction of the largest count as zero.
pub const DEFAULT_RANK_RTOL: f64 = 1e-6;

/// Dimension `d(k - d) + 1` of the volume-type manifold.
pub fn manifold_dim(k: usize, d: usize) -> usize {
    d * (k - d) + 1
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CanonicalCoordinates {
    d: usize,
    k: usize,
    t: f64,
    /// `z^{d+1}, .., z^k`, point-major.
    z: Vec<f64>,
}

impl CanonicalCoordinates {
    pub fn new(d: usize, k: usize, t: f64, z: Vec<f64>) -> Result<Self> {
        Self::with_floor(d, k, t, z, DEFAULT_CHART_FLOOR)
    }

    pub fn with_floor(d: usize, k: usize, t: f64, z: Vec<f64>, floor: f64) -> Result<Self> {
        if d < 2 || k < d {
            return Err(Error::InvalidConfiguration(format!(
                "need k >= d >= 2, got d={d}, k={k}"
            )));
        }
        if z.len() != d * (k - d) {
            return Err(Error::DimensionMismatch {
                expected: d * (k - d),
                found: z.len(),
            });
        }
        if !t.is_finite() || z.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfiguration(
                "non-finite chart coordinate".into(),
            ));
        }
        if t.abs() <= floor {
            return Err(Error::ChartBoundary { t, floor });
        }
        Ok(Self { d, k, t, z })
    }

    /// Reads the flat vector `(t, z^{d+1}, .., z^k)`.
    pub fn from_vector(d: usize, k: usize, v: &[f64]) -> Result<Self> {
        if v.len() != manifold_dim(k, d) {
            return Err(Error::DimensionMismatch {
                expected: manifold_dim(k, d),
                found: v.len(),
            });
        }
        Self::new(d, k, v[0], v[1..].to_vec())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    /// `z^i` for `i` in `d..k` (0-based point index).
    pub fn z_point(&self, i: usize) -> &[f64] {
        let off = (i - self.d) * self.d;
        &self.z[off..off + self.d]
    }

    pub fn dim(&self) -> usize {
        manifold_dim(self.k, self.d)
    }

    pub fn to_vector(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.dim());
        v.push(self.t);
        v.extend_from_slice(&self.z);
        v
    }

    /// The representative `(e^1, .., e^{d-1}, t e^d, z^{d+1}, .., z^k)`.
    pub fn configuration(&self) -> Configuration {
        let d = self.d;
        let mut coords = vec![0.0; d * d];
        for i in 0..d {
            coords[i * d + i] = 1.0;
        }
        coords[d * d - 1] = self.t;
        coords.extend_from_slice(&self.z);
        Configuration::from_flat(d, coords).expect("chart point is a valid configuration")
    }
}

/// Reduces a non-degenerate configuration to its chart coordinates.
///
/// With `A = (x^1 .. x^d)` and `B = (e^1 .. e^{d-1}, t e^d)`, `g = B A^{-1}` and
/// `z^i = g x^i`. Solving `A a = x^i` gives `z^i = (a_1, .., a_{d-1}, t a_d)` directly.
pub fn canonical_form(x: &Configuration, tol: f64) -> Result<CanonicalCoordinates> {
    canonical_form_with_floor(x, tol, DEFAULT_CHART_FLOOR)
}

pub fn canonical_form_with_floor(
    x: &Configuration,
    tol: f64,
    floor: f64,
) -> Result<CanonicalCoordinates> {
    if geometry::is_degenerate(x, tol) {
        return Err(Error::DegenerateInput);
    }
    let d = x.d();
    let lead = &x.coords()[..d * d];
    let t = x.leading_volume();
    // `lead` stores A^T (points as rows); transpose so A has the points as columns.
    let mut a = vec![0.0; d * d];
    for r in 0..d {
        for c in 0..d {
            a[r * d + c] = lead[c * d + r];
        }
    }
    let lu = Lu::new(&a, d).ok_or(Error::DegenerateInput)?;
    let mut z = Vec::with_capacity(d * (x.k() - d));
    for p in x.points().skip(d) {
        let mut coeffs = lu.solve(p);
        coeffs[d - 1] *= t;
        z.extend(coeffs);
    }
    CanonicalCoordinates::with_floor(d, x.k(), t, z, floor)
}

/// `Phi(t, z)`: the volume type of the chart representative.
pub fn embed_phi(c: &CanonicalCoordinates) -> VolumeType {
    geometry::volume_type(&c.configuration())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobianReport {
    pub point: CanonicalCoordinates,
    /// Descending, `min(n, C(k, d))` values.
    pub singular_values: Vec<f64>,
    pub rank: usize,
    pub full_rank: bool,
}

/// Central-difference Jacobian of [`embed_phi`] at `c`, with its numerical rank.
///
/// `step` is a relative step: coordinate `i` moves by `step * max(1, |c_i|)`
/// (default `1e-6`).
pub fn phi_jacobian(c: &CanonicalCoordinates, step: Option<f64>) -> Result<JacobianReport> {
    phi_jacobian_with(c, step, DEFAULT_CHART_FLOOR, DEFAULT_RANK_RTOL)
}

pub fn phi_jacobian_with(
    c: &CanonicalCoordinates,
    step: Option<f64>,
    floor: f64,
    rank_rtol: f64,
) -> Result<JacobianReport> {
    if c.t.abs() <= floor {
        return Err(Error::ChartBoundary { t: c.t, floor });
    }
    let step = step.unwrap_or(1e-6);
    if !(step > 0.0) {
        return Err(Error::InvalidParams(format!(
            "step must be positive, got {step}"
        )));
    }
    let base = c.to_vector();
    let n = base.len();
    let rows = embed_phi(c).values.len();
    let mut jac = DMatrix::<f64>::zeros(rows, n);
    let eval = |v: &[f64]| -> Vec<f64> {
        let mut coords = Vec::with_capacity(c.d * c.k);
        let d = c.d;
        for i in 0..d {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            coords.extend(e);
        }
        coords[d * d - 1] = v[0];
        coords.extend_from_slice(&v[1..]);
        // Phi is a polynomial, so perturbed points skip the chart check
        geometry::volume_type(&Configuration::from_flat(d, coords).unwrap()).values
    };
    for col in 0..n {
        let h = step * base[col].abs().max(1.0);
        let mut plus = base.clone();
        let mut minus = base.clone();
        plus[col] += h;
        minus[col] -= h;
        let fp = eval(&plus);
        let fm = eval(&minus);
        for r in 0..rows {
            jac[(r, col)] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    let mut singular_values: Vec<f64> = jac.singular_values().iter().copied().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let largest = singular_values.first().copied().unwrap_or(0.0);
    let rank = singular_values
        .iter()
        .filter(|&&s| s > rank_rtol * largest)
        .count();
    Ok(JacobianReport {
        point: c.clone(),
        singular_values,
        rank,
        full_rank: rank == n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_example() {
        let x = Configuration::new(2, &[vec![2.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let c = canonical_form(&x, 1e-10).unwrap();
        assert_eq!(c.t(), 2.0);
        assert!((c.z()[0] - 0.5).abs() < 1e-15);
        assert!((c.z()[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn already_canonical_is_unchanged() {
        let c = CanonicalCoordinates::new(3, 4, -1.5, vec![0.2, -0.7, 1.1]).unwrap();
        let back = canonical_form(&c.configuration(), 1e-10).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn embed_small_cases() {
        let c = CanonicalCoordinates::new(2, 2, 3.0, vec![]).unwrap();
        assert_eq!(embed_phi(&c).values, vec![3.0]);
        let (a, b) = (0.3, -0.8);
        let c = CanonicalCoordinates::new(2, 3, 1.0, vec![a, b]).unwrap();
        assert_eq!(embed_phi(&c).values, vec![1.0, b, -a]);
    }

    #[test]
    fn chart_rejects_small_t() {
        assert!(matches!(
            CanonicalCoordinates::new(2, 2, 1e-12, vec![]),
            Err(Error::ChartBoundary { .. })
        ));
        let degenerate = Configuration::new(2, &[vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        assert_eq!(
            canonical_form(&degenerate, 1e-10),
            Err(Error::DegenerateInput)
        );
    }

    #[test]
    fn jacobian_of_one_dimensional_chart() {
        let c = CanonicalCoordinates::new(2, 2, 0.7, vec![]).unwrap();
        let j = phi_jacobian(&c, None).unwrap();
        assert_eq!(j.rank, 1);
        assert!((j.singular_values[0] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn jacobian_rank_three_for_plane_triples() {
        let c = CanonicalCoordinates::new(2, 3, 1.0, vec![0.3, 0.7]).unwrap();
        let j = phi_jacobian(&c, None).unwrap();
        assert_eq!(j.singular_values.len(), 3);
        assert_eq!(j.rank, 3);
        assert!(j.full_rank);
    }

    #[test]
    fn jacobian_bad_step() {
        let c = CanonicalCoordinates::new(2, 2, 0.7, vec![]).unwrap();
        assert!(phi_jacobian(&c, Some(0.0)).is_err());
    }
}
