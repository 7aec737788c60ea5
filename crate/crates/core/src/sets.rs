//! Point-set generators: the half-cube lattice and its spherical image, control
//! sets, and sampling from thickened sets.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Configuration;
use crate::rng::{self, Domain, CHUNK};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeSpec {
    pub q: u32,
    pub s: f64,
    pub d: usize,
}

impl LatticeSpec {
    pub fn new(q: u32, s: f64, d: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidParams(format!(
                "lattice parameter q = {q} < 2"
            )));
        }
        if d < 1 {
            return Err(Error::InvalidParams("dimension must be at least 1".into()));
        }
        if !(s > 0.0 && s <= d as f64) {
            return Err(Error::InvalidParams(format!(
                "target dimension s = {s} not in (0, {d}]"
            )));
        }
        Ok(Self { q, s, d })
    }

    /// Thickening radius `q^{-d/s}`.
    pub fn radius(&self) -> f64 {
        (self.q as f64).powf(-(self.d as f64) / self.s)
    }

    /// First-axis range starts at `ceil(q/2)`.
    pub fn first_axis_start(&self) -> u32 {
        self.q.div_ceil(2)
    }

    pub fn count(&self) -> usize {
        let q = self.q as usize;
        (q - self.first_axis_start() as usize + 1) * (q + 1).pow(self.d as u32 - 1)
    }
}

/// `(1/q) (Z^d ∩ ([q/2, q] x [0, q]^{d-1}))`, lexicographic in the integer coordinates.
pub fn lattice_points(spec: &LatticeSpec) -> Vec<Vec<f64>> {
    let q = spec.q;
    let start = spec.first_axis_start();
    let mut out = Vec::with_capacity(spec.count());
    let mut m = vec![0u32; spec.d];
    m[0] = start;
    loop {
        out.push(m.iter().map(|&v| v as f64 / q as f64).collect());
        // odometer, last axis fastest
        let mut axis = spec.d;
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            if m[axis] < q {
                m[axis] += 1;
                break;
            }
            m[axis] = if axis == 0 { start } else { 0 };
        }
    }
}

/// Spherical coordinates with radius `x_1` and angles `pi x_i / 2`.
pub fn spherical_map(x: &[f64]) -> Vec<f64> {
    let d = x.len();
    let r = x[0];
    if d == 1 {
        return vec![r];
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut out = Vec::with_capacity(d);
    let mut sin_prod = 1.0;
    for i in 1..d {
        let (s, c) = (half_pi * x[i]).sin_cos();
        out.push(r * sin_prod * c);
        sin_prod *= s;
    }
    out.push(r * sin_prod);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetLabel {
    Sharpness {
        q: u32,
        s: f64,
        d: usize,
    },
    CantorProduct {
        d: usize,
        depth: u32,
        ratio: f64,
    },
    AnnulusUniform {
        d: usize,
        n: usize,
        seed: u64,
    },
    Hyperplane {
        normal: Vec<f64>,
        n: usize,
        seed: u64,
    },
    Explicit {
        name: String,
    },
}

/// Finitely many centers thickened by a common radius.
///
/// The attached sampling measure picks a center uniformly, then a uniform point of
/// the ball around it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThickenedSet {
    d: usize,
    centers: Vec<f64>,
    radius: f64,
    label: SetLabel,
}

impl ThickenedSet {
    pub fn new(d: usize, centers: Vec<f64>, radius: f64, label: SetLabel) -> Result<Self> {
        if d == 0 || centers.is_empty() || !centers.len().is_multiple_of(d) {
            return Err(Error::InvalidParams(format!(
                "need a nonempty list of {d}-dimensional centers, got {} coordinates",
                centers.len()
            )));
        }
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "radius {radius} must be finite and >= 0"
            )));
        }
        if centers.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParams("non-finite center coordinate".into()));
        }
        Ok(Self {
            d,
            centers,
            radius,
            label,
        })
    }

    pub fn from_points(points: &[Vec<f64>], radius: f64, name: &str) -> Result<Self> {
        let d = points.first().map_or(0, Vec::len);
        if points.iter().any(|p| p.len() != d) {
            return Err(Error::InvalidParams(
                "centers have inconsistent dimensions".into(),
            ));
        }
        let centers = points.iter().flatten().copied().collect();
        Self::new(
            d,
            centers,
            radius,
            SetLabel::Explicit {
                name: name.to_string(),
            },
        )
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.centers.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn label(&self) -> &SetLabel {
        &self.label
    }

    /// Point-major center coordinates.
    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn center(&self, i: usize) -> &[f64] {
        &self.centers[i * self.d..(i + 1) * self.d]
    }

    /// Draws one point of the sampling measure into `out`.
    pub fn draw(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        let i = rng.random_range(0..self.len());
        out.copy_from_slice(self.center(i));
        if self.radius > 0.0 {
            let offset = uniform_in_ball(rng, self.d);
            for (o, u) in out.iter_mut().zip(offset) {
                *o += self.radius * u;
            }
        }
    }
}

fn uniform_in_ball(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..=1.0)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return v;
        }
    }
}

pub fn build_sharpness_set(spec: &LatticeSpec) -> ThickenedSet {
    let centers = lattice_points(spec)
        .iter()
        .flat_map(|p| spherical_map(p))
        .collect();
    ThickenedSet::new(
        spec.d,
        centers,
        spec.radius(),
        SetLabel::Sharpness {
            q: spec.q,
            s: spec.s,
            d: spec.d,
        },
    )
    .expect("lattice is nonempty")
}

/// `n` draws from the sampling measure of `set`, point-major (`n * d` values).
///
/// Deterministic in `seed`; chunk `i` of [`CHUNK`] points uses stream `i`.
pub fn sample_points(set: &ThickenedSet, n: usize, seed: u64) -> Vec<f64> {
    sample_points_in(set, n, seed, Domain::SamplePoints)
}

fn sample_points_in(set: &ThickenedSet, n: usize, seed: u64, domain: Domain) -> Vec<f64> {
    let d = set.d;
    let mut out = vec![0.0; n * d];
    out.par_chunks_mut(CHUNK * d)
        .enumerate()
        .for_each(|(i, chunk)| {
            let mut rng = rng::stream(seed, domain, i as u64);
            for p in chunk.chunks_exact_mut(d) {
                set.draw(&mut rng, p);
            }
        });
    out
}

/// `count` configurations of `k` independent draws each.
pub fn sample_configurations(
    set: &ThickenedSet,
    k: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<Configuration>> {
    let d = set.d;
    let flat = sample_points_in(set, count * k, seed, Domain::Configurations);
    flat.chunks_exact(k * d)
        .map(|c| Configuration::from_flat(d, c.to_vec()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ControlKind {
    /// Product of `d` copies of the `depth`-step Cantor construction keeping two
    /// intervals of relative length `ratio` at each step.
    CantorProduct { d: usize, depth: u32, ratio: f64 },
    /// `n` uniform centers in `{1/2 <= |p| <= 1}`.
    AnnulusUniform { d: usize, n: usize, seed: u64 },
    /// `n` centers in the hyperplane through the origin orthogonal to `normal`.
    Hyperplane {
        normal: Vec<f64>,
        n: usize,
        seed: u64,
    },
}

pub fn control_set(kind: &ControlKind) -> Result<ThickenedSet> {
    match kind {
        ControlKind::CantorProduct { d, depth, ratio } => cantor_product(*d, *depth, *ratio),
        ControlKind::AnnulusUniform { d, n, seed } => annulus_uniform(*d, *n, *seed),
        ControlKind::Hyperplane { normal, n, seed } => hyperplane(normal, *n, *seed),
    }
}

/// Midpoints of the `2^depth` level-`depth` intervals of the Cantor construction on `[0, 1]`.
pub fn cantor_midpoints(depth: u32, ratio: f64) -> Vec<f64> {
    let width = ratio.powi(depth as i32);
    (0..1u64 << depth)
        .map(|bits| {
            let mut left = 0.0;
            let mut scale = 1.0;
            for level in 0..depth {
                if bits >> (depth - 1 - level) & 1 == 1 {
                    left += scale * (1.0 - ratio);
                }
                scale *= ratio;
            }
            left + width / 2.0
        })
        .collect()
}

fn cantor_product(d: usize, depth: u32, ratio: f64) -> Result<ThickenedSet> {
    if d == 0 || depth == 0 {
        return Err(Error::InvalidParams(
            "cantor product needs d >= 1 and depth >= 1".into(),
        ));
    }
    if !(ratio > 0.0 && ratio < 0.5) {
        return Err(Error::InvalidParams(format!(
            "cantor ratio {ratio} not in (0, 1/2)"
        )));
    }
    if depth as usize * d > 24 {
        return Err(Error::InvalidParams(format!(
            "cantor product with 2^{} centers is too large",
            depth as usize * d
        )));
    }
    let axis = cantor_midpoints(depth, ratio);
    let per_axis = axis.len();
    let total = per_axis.pow(d as u32);
    let mut centers = Vec::with_capacity(total * d);
    for mut idx in 0..total {
        let mut p = vec![0.0; d];
        for slot in p.iter_mut().rev() {
            *slot = axis[idx % per_axis];
            idx /= per_axis;
        }
        centers.extend(p);
    }
    ThickenedSet::new(
        d,
        centers,
        ratio.powi(depth as i32),
        SetLabel::CantorProduct { d, depth, ratio },
    )
}

fn annulus_uniform(d: usize, n: usize, seed: u64) -> Result<ThickenedSet> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidParams(
            "annulus needs d >= 1 and n >= 1".into(),
        ));
    }
    let mut centers = vec![0.0; n * d];
    centers
        .par_chunks_mut(CHUNK * d)
        .enumerate()
        .for_each(|(i, chunk)| {
            let mut rng = rng::stream(seed, Domain::ControlSet, i as u64);
            for p in chunk.chunks_exact_mut(d) {
                loop {
                    for c in p.iter_mut() {
                        *c = rng.random_range(-1.0..=1.0);
                    }
                    let r2: f64 = p.iter().map(|c| c * c).sum();
                    if (0.25..=1.0).contains(&r2) {
                        break;
                    }
                }
            }
        });
    ThickenedSet::new(d, centers, 0.0, SetLabel::AnnulusUniform { d, n, seed })
}

fn hyperplane(normal: &[f64], n: usize, seed: u64) -> Result<ThickenedSet> {
    let d = normal.len();
    let norm2: f64 = normal.iter().map(|c| c * c).sum();
    if d < 2 || n == 0 || !(norm2 > 0.0) || !norm2.is_finite() {
        return Err(Error::InvalidParams(
            "hyperplane needs a finite nonzero normal of dimension >= 2 and n >= 1".into(),
        ));
    }
    let unit: Vec<f64> = normal.iter().map(|c| c / norm2.sqrt()).collect();
    let mut centers = vec![0.0; n * d];
    centers
        .par_chunks_mut(CHUNK * d)
        .enumerate()
        .for_each(|(i, chunk)| {
            let mut rng = rng::stream(seed, Domain::ControlSet, i as u64);
            for p in chunk.chunks_exact_mut(d) {
                for c in p.iter_mut() {
                    *c = rng.random_range(-1.0..=1.0);
                }
                let dot: f64 = p.iter().zip(&unit).map(|(a, b)| a * b).sum();
                for (c, u) in p.iter_mut().zip(&unit) {
                    *c -= dot * u;
                }
            }
        });
    ThickenedSet::new(
        d,
        centers,
        0.0,
        SetLabel::Hyperplane {
            normal: normal.to_vec(),
            n,
            seed,
        },
    )
}

/// For each radius, the largest fraction of `samples` in a closed ball of that
/// radius around any of the `probes` (both point-major in dimension `d`).
pub fn max_ball_mass(samples: &[f64], probes: &[f64], radii: &[f64], d: usize) -> Vec<f64> {
    let n = (samples.len() / d).max(1) as f64;
    let r2: Vec<f64> = radii.iter().map(|r| r * r).collect();
    let counts = probes
        .par_chunks_exact(d)
        .map(|probe| {
            let mut counts = vec![0usize; radii.len()];
            for s in samples.chunks_exact(d) {
                let dist2: f64 = s.iter().zip(probe).map(|(a, b)| (a - b) * (a - b)).sum();
                for (c, lim) in counts.iter_mut().zip(&r2) {
                    if dist2 <= *lim {
                        *c += 1;
                    }
                }
            }
            counts
        })
        .reduce(
            || vec![0usize; radii.len()],
            |a, b| a.iter().zip(&b).map(|(x, y)| *x.max(y)).collect(),
        );
    counts.into_iter().map(|c| c as f64 / n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_counts() {
        let two = lattice_points(&LatticeSpec::new(2, 1.0, 2).unwrap());
        assert_eq!(
            two,
            vec![
                vec![0.5, 0.0],
                vec![0.5, 0.5],
                vec![0.5, 1.0],
                vec![1.0, 0.0],
                vec![1.0, 0.5],
                vec![1.0, 1.0]
            ]
        );
        assert_eq!(
            lattice_points(&LatticeSpec::new(10, 1.0, 2).unwrap()).len(),
            66
        );
        assert_eq!(
            lattice_points(&LatticeSpec::new(4, 1.0, 3).unwrap()).len(),
            75
        );
    }

    #[test]
    fn lattice_spec_validation() {
        assert!(LatticeSpec::new(1, 1.0, 2).is_err());
        assert!(LatticeSpec::new(4, 0.0, 2).is_err());
        assert!(LatticeSpec::new(4, 2.5, 2).is_err());
        assert!(LatticeSpec::new(4, 2.0, 2).is_ok());
    }

    #[test]
    fn spherical_map_corners() {
        assert_eq!(spherical_map(&[1.0, 0.0, 0.0]), vec![1.0, 0.0, 0.0]);
        let p = spherical_map(&[1.0, 1.0]);
        assert!(p[0].abs() < 1e-15 && (p[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sharpness_radius() {
        let set = build_sharpness_set(&LatticeSpec::new(2, 1.0, 2).unwrap());
        assert_eq!(set.len(), 6);
        assert_eq!(set.radius(), 0.25);
        let set = build_sharpness_set(&LatticeSpec::new(10, 2.0 / 3.0, 2).unwrap());
        assert!((set.radius() - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn cantor_product_arithmetic() {
        let set = control_set(&ControlKind::CantorProduct {
            d: 2,
            depth: 3,
            ratio: 1.0 / 3.0,
        })
        .unwrap();
        assert_eq!(set.len(), 64);
        assert!((set.radius() - 1.0 / 27.0).abs() < 1e-15);
        let axis = cantor_midpoints(1, 1.0 / 3.0);
        assert!((axis[0] - 1.0 / 6.0).abs() < 1e-15);
        assert!((axis[1] - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn control_validation() {
        let bad = [
            ControlKind::CantorProduct {
                d: 2,
                depth: 0,
                ratio: 0.3,
            },
            ControlKind::CantorProduct {
                d: 2,
                depth: 3,
                ratio: 0.5,
            },
            ControlKind::AnnulusUniform {
                d: 2,
                n: 0,
                seed: 1,
            },
            ControlKind::Hyperplane {
                normal: vec![0.0, 0.0],
                n: 10,
                seed: 1,
            },
            ControlKind::Hyperplane {
                normal: vec![1.0],
                n: 10,
                seed: 1,
            },
        ];
        for k in &bad {
            assert!(
                matches!(control_set(k), Err(Error::InvalidParams(_))),
                "{k:?}"
            );
        }
    }

    #[test]
    fn annulus_is_deterministic_and_in_range() {
        let kind = ControlKind::AnnulusUniform {
            d: 2,
            n: 100,
            seed: 7,
        };
        let a = control_set(&kind).unwrap();
        assert_eq!(a, control_set(&kind).unwrap());
        for i in 0..a.len() {
            let r = a.center(i).iter().map(|c| c * c).sum::<f64>().sqrt();
            assert!((0.5..=1.0).contains(&r));
        }
    }

    #[test]
    fn hyperplane_centers_are_orthogonal_to_normal() {
        let set = control_set(&ControlKind::Hyperplane {
            normal: vec![1.0, 2.0, -1.0],
            n: 50,
            seed: 3,
        })
        .unwrap();
        for i in 0..set.len() {
            let p = set.center(i);
            assert!((p[0] + 2.0 * p[1] - p[2]).abs() < 1e-14);
        }
    }

    #[test]
    fn point_set_sampling_returns_the_center() {
        let set = ThickenedSet::from_points(&[vec![0.3, -0.2]], 0.0, "one").unwrap();
        let s = sample_points(&set, 50, 9);
        assert!(s.chunks(2).all(|p| p == [0.3, -0.2]));
    }

    #[test]
    fn samples_stay_within_radius_of_a_center() {
        let set = build_sharpness_set(&LatticeSpec::new(4, 1.0, 2).unwrap());
        let s = sample_points(&set, 3 * CHUNK + 17, 5);
        assert_eq!(s.len(), 2 * (3 * CHUNK + 17));
        for p in s.chunks(2) {
            let near = (0..set.len()).any(|i| {
                let c = set.center(i);
                ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt() <= set.radius() + 1e-15
            });
            assert!(near);
        }
    }
}
