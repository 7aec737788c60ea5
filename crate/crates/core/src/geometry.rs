//! Configurations, volume types, and the unimodular group action on them.

use serde::Serialize;

use crate::error::{Error, NotEquivalentReason, Result};
use crate::linalg::{self, Lu};
use crate::subsets;

/// Default relative tolerance of the degeneracy test.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-10;
/// Default tolerance for orbit-equivalence and volume-type comparisons.
pub const DEFAULT_EQUIVALENCE_TOL: f64 = 1e-9;
/// Absolute floor applied to every relative comparison.
pub const ABS_FLOOR: f64 = 1e-12;

/// `|a - b| <= max(rel * max(|a|, |b|), ABS_FLOOR)`.
pub fn approx_eq(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= (rel * a.abs().max(b.abs())).max(ABS_FLOOR)
}

/// An ordered list of `k` points in `R^d`, stored point-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Configuration {
    d: usize,
    k: usize,
    coords: Vec<f64>,
}

impl Configuration {
    pub fn new(d: usize, points: &[Vec<f64>]) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * d);
        for (j, p) in points.iter().enumerate() {
            if p.len() != d {
                return Err(Error::InvalidConfiguration(format!(
                    "point {j} has {} components, expected {d}",
                    p.len()
                )));
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(d, coords)
    }

    /// Builds from `k * d` coordinates laid out point after point.
    pub fn from_flat(d: usize, coords: Vec<f64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidConfiguration(format!(
                "ambient dimension {d} < 2"
            )));
        }
        if !coords.len().is_multiple_of(d) {
            return Err(Error::InvalidConfiguration(format!(
                "{} coordinates do not split into points of dimension {d}",
                coords.len()
            )));
        }
        let k = coords.len() / d;
        if k < d {
            return Err(Error::InvalidConfiguration(format!(
                "{k} points < dimension {d}"
            )));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidConfiguration(format!(
                "non-finite component in point {}",
                i / d
            )));
        }
        Ok(Self { d, k, coords })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn point(&self, j: usize) -> &[f64] {
        &self.coords[j * self.d..(j + 1) * self.d]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.d)
    }

    /// Applies the linear map with row-major matrix `g` to every point.
    pub fn transformed(&self, g: &[f64]) -> Self {
        let coords = self
            .points()
            .flat_map(|p| linalg::mat_vec(g, p, self.d))
            .collect();
        Self { coords, ..*self }
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            coords: self.coords.iter().map(|c| c * lambda).collect(),
            ..*self
        }
    }

    /// Determinant of the matrix whose columns are the first `d` points.
    pub fn leading_volume(&self) -> f64 {
        linalg::det(&self.coords[..self.d * self.d], self.d)
    }
}

/// Signed volumes of every `d`-subset of a configuration, in lexicographic subset order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeType {
    pub k: usize,
    pub d: usize,
    pub values: Vec<f64>,
}

impl VolumeType {
    /// Componentwise comparison with [`approx_eq`].
    pub fn approx_eq(&self, other: &VolumeType, rel: f64) -> bool {
        self.k == other.k
            && self.d == other.d
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| approx_eq(*a, *b, rel))
    }

    pub fn labels(&self) -> Vec<String> {
        subsets::subsets(self.k, self.d)
            .iter()
            .map(|s| subsets::subset_label(s))
            .collect()
    }
}

/// Volumes over the consecutive windows `(x^j, .., x^{j+d-1})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainVolumes {
    pub k: usize,
    pub d: usize,
    pub values: Vec<f64>,
}

/// A `d x d` matrix of determinant one (within a tolerance).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnimodularMap {
    d: usize,
    matrix: Vec<f64>,
}

impl UnimodularMap {
    pub fn new(d: usize, matrix: Vec<f64>, tol: f64) -> Result<Self> {
        if matrix.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                found: matrix.len(),
            });
        }
        let det = linalg::det(&matrix, d);
        if (det - 1.0).abs() > tol {
            return Err(Error::InvalidParams(format!(
                "matrix has determinant {det}, not 1"
            )));
        }
        Ok(Self { d, matrix })
    }

    pub fn identity(d: usize) -> Self {
        let mut matrix = vec![0.0; d * d];
        for i in 0..d {
            matrix[i * d + i] = 1.0;
        }
        Self { d, matrix }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Row-major entries.
    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn det(&self) -> f64 {
        linalg::det(&self.matrix, self.d)
    }

    pub fn apply(&self, x: &Configuration) -> Configuration {
        x.transformed(&self.matrix)
    }
}

/// Evaluates volume types of many tuples without reallocating.
#[derive(Debug, Clone)]
pub struct VolumeEvaluator {
    d: usize,
    subsets: Vec<Vec<usize>>,
    scratch: Vec<f64>,
}

impl VolumeEvaluator {
    pub fn new(k: usize, d: usize) -> Self {
        Self {
            d,
            subsets: subsets::subsets(k, d),
            scratch: vec![0.0; d * d],
        }
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    /// `coords` holds `k` points of dimension `d`; writes `C(k, d)` volumes into `out`.
    pub fn eval(&mut self, coords: &[f64], out: &mut [f64]) {
        let d = self.d;
        for (slot, subset) in out.iter_mut().zip(&self.subsets) {
            // rows of the scratch matrix are the points; det(A) = det(A^T)
            for (r, &j) in subset.iter().enumerate() {
                self.scratch[r * d..(r + 1) * d].copy_from_slice(&coords[j * d..(j + 1) * d]);
            }
            *slot = if d <= 3 {
                linalg::det(&self.scratch, d)
            } else {
                linalg::det_in_place(&mut self.scratch, d)
            };
        }
    }
}

pub fn volume_type(x: &Configuration) -> VolumeType {
    let mut eval = VolumeEvaluator::new(x.k, x.d);
    let mut values = vec![0.0; eval.len()];
    eval.eval(&x.coords, &mut values);
    VolumeType {
        k: x.k,
        d: x.d,
        values,
    }
}

/// Hadamard-normalised test on the first `d` points:
/// `|det| <= tol * prod_i max(|x^i|, tol)`.
pub fn is_degenerate(x: &Configuration, tol: f64) -> bool {
    let scale: f64 = x
        .points()
        .take(x.d)
        .map(|p| linalg::norm2(p).max(tol))
        .product();
    x.leading_volume().abs() <= tol * scale
}

pub fn chain_volume_type(x: &Configuration) -> ChainVolumes {
    let d = x.d;
    let values = (0..=x.k - d)
        .map(|j| linalg::det(&x.coords[j * d..(j + d) * d], d))
        .collect();
    ChainVolumes { k: x.k, d, values }
}

fn check_same_shape(x: &Configuration, y: &Configuration) -> Result<()> {
    if x.d != y.d {
        return Err(Error::DimensionMismatch {
            expected: x.d,
            found: y.d,
        });
    }
    if x.k != y.k {
        return Err(Error::DimensionMismatch {
            expected: x.k,
            found: y.k,
        });
    }
    Ok(())
}

/// The linear map carrying the leading points of `x` onto those of `y`, with how
/// well it fits the remaining points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearFit {
    pub d: usize,
    /// Row-major `g = (y^1 .. y^d)(x^1 .. x^d)^{-1}`.
    pub matrix: Vec<f64>,
    pub det: f64,
    /// `|g x^j - y^j|` for every `j`.
    pub residuals: Vec<f64>,
}

pub fn fit_linear_map(x: &Configuration, y: &Configuration) -> Result<LinearFit> {
    check_same_shape(x, y)?;
    if is_degenerate(x, DEFAULT_DEGENERACY_TOL) || is_degenerate(y, DEFAULT_DEGENERACY_TOL) {
        return Err(Error::DegenerateInput);
    }
    let d = x.d;
    // Rows of x's leading block are the points, i.e. it stores A^T. From g A = B we get
    // A^T g^T = B^T, so row i of g solves A^T r = (y^1_i, .., y^d_i).
    let lu = Lu::new(&x.coords[..d * d], d).ok_or(Error::DegenerateInput)?;
    let mut matrix = Vec::with_capacity(d * d);
    for i in 0..d {
        let rhs: Vec<f64> = (0..d).map(|j| y.point(j)[i]).collect();
        matrix.extend(lu.solve(&rhs));
    }
    let residuals = x
        .points()
        .zip(y.points())
        .map(|(xp, yp)| {
            let gx = linalg::mat_vec(&matrix, xp, d);
            gx.iter()
                .zip(yp)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let det = linalg::det(&matrix, d);
    Ok(LinearFit {
        d,
        matrix,
        det,
        residuals,
    })
}

/// Recovers the unique `g` in `SL_d` with `g x^j = y^j` for every `j`.
///
/// `g` is [`fit_linear_map`]'s matrix, accepted when `|det g - 1| <= tol` and
/// `|g x^j - y^j| <= tol (1 + |y^j|)` for all `k` points.
pub fn recover_group_element(
    x: &Configuration,
    y: &Configuration,
    tol: f64,
) -> Result<UnimodularMap> {
    let fit = fit_linear_map(x, y)?;
    if (fit.det - 1.0).abs() > tol {
        return Err(Error::NotEquivalent(
            NotEquivalentReason::DeterminantMismatch { det: fit.det },
        ));
    }
    for (j, (&residual, yp)) in fit.residuals.iter().zip(y.points()).enumerate() {
        let allowed = tol * (1.0 + linalg::norm2(yp));
        if residual > allowed {
            return Err(Error::NotEquivalent(NotEquivalentReason::Residual {
                index: j,
                residual,
                allowed,
            }));
        }
    }
    Ok(UnimodularMap {
        d: fit.d,
        matrix: fit.matrix,
    })
}

/// Orbit test: true iff [`recover_group_element`] succeeds.
///
/// Degenerate inputs are reported as [`Error::DegenerateInput`]; compare
/// [`volume_type`] vectors directly for those.
pub fn same_volume_type(x: &Configuration, y: &Configuration, tol: f64) -> Result<bool> {
    match recover_group_element(x, y, tol) {
        Ok(_) => Ok(true),
        Err(Error::NotEquivalent(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(d: usize, pts: &[&[f64]]) -> Configuration {
        Configuration::new(d, &pts.iter().map(|p| p.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Configuration::from_flat(1, vec![1.0]).is_err());
        assert!(Configuration::from_flat(2, vec![1.0, 0.0]).is_err());
        assert!(Configuration::from_flat(2, vec![1.0, 0.0, f64::NAN, 1.0]).is_err());
        assert!(Configuration::new(2, &[vec![1.0, 0.0], vec![1.0]]).is_err());
    }

    #[test]
    fn identity_pair() {
        let x = cfg(2, &[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(volume_type(&x).values, vec![1.0]);
    }

    #[test]
    fn three_points_in_plane() {
        let x = cfg(2, &[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]);
        assert_eq!(volume_type(&x).values, vec![1.0, 1.0, -1.0]);
        assert_eq!(chain_volume_type(&x).values, vec![1.0, -1.0]);
    }

    #[test]
    fn degeneracy_examples() {
        let collinear = cfg(2, &[&[1.0, 0.0], &[2.0, 0.0], &[0.3, 0.1]]);
        assert!(is_degenerate(&collinear, DEFAULT_DEGENERACY_TOL));
        let basis = cfg(
            3,
            &[&[1., 0., 0.], &[0., 1., 0.], &[0., 0., 1.], &[1., 1., 1.]],
        );
        assert!(!is_degenerate(&basis, DEFAULT_DEGENERACY_TOL));
        let nearly = cfg(2, &[&[1.0, 0.0], &[1.0, 1e-15], &[0.0, 1.0]]);
        assert!(is_degenerate(&nearly, 1e-10));
    }

    #[test]
    fn recover_diagonal_map() {
        let x = cfg(2, &[&[1.0, 0.0], &[0.0, 1.0]]);
        let y = cfg(2, &[&[2.0, 0.0], &[0.0, 0.5]]);
        let g = recover_group_element(&x, &y, 1e-9).unwrap();
        assert_eq!(g.matrix(), &[2.0, 0.0, 0.0, 0.5]);
        let id = recover_group_element(&x, &x, 1e-9).unwrap();
        assert_eq!(id, UnimodularMap::identity(2));
    }

    #[test]
    fn doubling_is_a_determinant_mismatch() {
        let x = cfg(2, &[&[1.0, 0.2], &[0.3, 1.0]]);
        let err = recover_group_element(&x, &x.scaled(2.0), 1e-9).unwrap_err();
        assert!(matches!(
            err,
            Error::NotEquivalent(NotEquivalentReason::DeterminantMismatch { .. })
        ));
        assert_eq!(same_volume_type(&x, &x.scaled(2.0), 1e-9), Ok(false));
    }

    #[test]
    fn trailing_point_mismatch_is_a_residual_failure() {
        let x = cfg(2, &[&[1.0, 0.0], &[0.0, 1.0], &[0.5, 0.5]]);
        let y = cfg(2, &[&[1.0, 0.0], &[0.0, 1.0], &[0.5, 0.6]]);
        match recover_group_element(&x, &y, 1e-9) {
            Err(Error::NotEquivalent(NotEquivalentReason::Residual { index, .. })) => {
                assert_eq!(index, 2)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn degenerate_and_mismatched_inputs() {
        let x = cfg(2, &[&[1.0, 0.0], &[2.0, 0.0]]);
        let y = cfg(2, &[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(
            recover_group_element(&x, &y, 1e-9),
            Err(Error::DegenerateInput)
        );
        assert_eq!(same_volume_type(&y, &x, 1e-9), Err(Error::DegenerateInput));
        let z = cfg(2, &[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]);
        assert!(matches!(
            recover_group_element(&y, &z, 1e-9),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn unimodular_map_validation() {
        assert!(UnimodularMap::new(2, vec![2.0, 0.0, 0.0, 0.5], 1e-9).is_ok());
        assert!(UnimodularMap::new(2, vec![2.0, 0.0, 0.0, 1.0], 1e-9).is_err());
    }

    #[test]
    fn chain_of_square_configuration_is_single_volume() {
        let x = cfg(3, &[&[1., 2., 0.], &[0., 1., 3.], &[2., 0., 1.]]);
        assert_eq!(chain_volume_type(&x).values, volume_type(&x).values);
    }
}
