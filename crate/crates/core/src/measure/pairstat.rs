//! Monte Carlo estimate of `eps^{-n} P(|Phi(x) - Phi(y)| <= eps)` for independent
//! k-tuples `x, y` drawn from a set's sampling measure.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canonical::{canonical_form, manifold_dim};
use crate::error::{Error, Result};
use crate::geometry::{self, Configuration, DEFAULT_DEGENERACY_TOL};
use crate::rng::{self, Domain, CHUNK};
use crate::sets::ThickenedSet;

pub const MIN_PAIRS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairMap {
    /// Chart coordinates `(t, z)` of the volume type. For `k = d` the chart is
    /// the single volume itself, which is defined at `t = 0` as well.
    VolumeChart,
    /// The chain volumes `det(x^j, .., x^{j+d-1})`.
    Chain,
}

impl PairMap {
    pub fn target_dim(self, k: usize, d: usize) -> usize {
        match self {
            PairMap::VolumeChart => manifold_dim(k, d),
            PairMap::Chain => k + 1 - d,
        }
    }

    /// `None` when the tuple lies outside the chart.
    fn apply(self, x: &Configuration) -> Option<Vec<f64>> {
        match self {
            PairMap::VolumeChart if x.k() == x.d() => Some(vec![x.leading_volume()]),
            PairMap::VolumeChart => canonical_form(x, DEFAULT_DEGENERACY_TOL)
                .ok()
                .map(|c| c.to_vector()),
            PairMap::Chain => Some(geometry::chain_volume_type(x).values),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairCountOptions {
    pub k: usize,
    pub map: PairMap,
    /// Positive and strictly decreasing.
    pub epsilons: Vec<f64>,
    pub num_pairs: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairCountReport {
    pub epsilon: f64,
    pub n: usize,
    /// Pairs with both tuples inside the chart.
    pub num_pairs: u64,
    pub skipped_pairs: u64,
    pub hits: u64,
    pub statistic: f64,
    pub standard_error: f64,
}

pub fn pair_count_statistic(
    set: &ThickenedSet,
    opts: &PairCountOptions,
) -> Result<Vec<PairCountReport>> {
    let d = set.d();
    let k = opts.k;
    if d < 2 || k < d {
        return Err(Error::InvalidParams(format!(
            "need k >= d >= 2, got d={d}, k={k}"
        )));
    }
    if opts.num_pairs < MIN_PAIRS {
        return Err(Error::InvalidParams(format!(
            "need at least {MIN_PAIRS} pairs, got {}",
            opts.num_pairs
        )));
    }
    if opts.epsilons.is_empty() {
        return Err(Error::EmptyInput("epsilon list"));
    }
    if opts.epsilons.iter().any(|e| !(*e > 0.0 && e.is_finite()))
        || opts.epsilons.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::InvalidParams(
            "epsilons must be positive and strictly decreasing".into(),
        ));
    }
    let n = opts.map.target_dim(k, d);
    let m = opts.epsilons.len();

    let chunks = opts.num_pairs.div_ceil(CHUNK as u64);
    let (hits, skipped) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng::stream(opts.seed, Domain::PairStatistic, c);
            let count = (opts.num_pairs - c * CHUNK as u64).min(CHUNK as u64);
            let mut hits = vec![0u64; m];
            let mut skipped = 0u64;
            let mut buf = vec![0.0; k * d];
            let mut draw = |rng: &mut _| -> Option<Vec<f64>> {
                for p in buf.chunks_exact_mut(d) {
                    set.draw(rng, p);
                }
                opts.map
                    .apply(&Configuration::from_flat(d, buf.clone()).unwrap())
            };
            for _ in 0..count {
                let fx = draw(&mut rng);
                let fy = draw(&mut rng);
                let (Some(fx), Some(fy)) = (fx, fy) else {
                    skipped += 1;
                    continue;
                };
                let dist = fx
                    .iter()
                    .zip(&fy)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                // epsilons decrease, so the hits form a prefix
                for (h, eps) in hits.iter_mut().zip(&opts.epsilons) {
                    if dist > *eps {
                        break;
                    }
                    *h += 1;
                }
            }
            (hits, skipped)
        })
        .reduce(
            || (vec![0u64; m], 0u64),
            |(a, sa), (b, sb)| (a.iter().zip(&b).map(|(x, y)| x + y).collect(), sa + sb),
        );

    let used = opts.num_pairs - skipped;
    Ok(opts
        .epsilons
        .iter()
        .zip(hits)
        .map(|(&eps, h)| {
            let scale = eps.powi(-(n as i32));
            let (p, se) = if used > 0 {
                let p = h as f64 / used as f64;
                (p, (p * (1.0 - p) / used as f64).sqrt())
            } else {
                (0.0, 0.0)
            };
            PairCountReport {
                epsilon: eps,
                n,
                num_pairs: used,
                skipped_pairs: skipped,
                hits: h,
                statistic: scale * p,
                standard_error: scale * se,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(map: PairMap, k: usize, epsilons: Vec<f64>) -> PairCountOptions {
        PairCountOptions {
            k,
            map,
            epsilons,
            num_pairs: 20_000,
            seed: 1,
        }
    }

    #[test]
    fn point_mass_statistic_is_eps_to_minus_n() {
        let set = ThickenedSet::from_points(&[vec![0.6, 0.8]], 0.0, "atom").unwrap();
        let r =
            pair_count_statistic(&set, &opts(PairMap::VolumeChart, 2, vec![0.1, 0.01])).unwrap();
        assert_eq!(r[0].statistic, 10.0);
        assert!((r[1].statistic - 100.0).abs() < 1e-9);
        assert_eq!(r[1].standard_error, 0.0);
    }

    #[test]
    fn degenerate_tuples_are_skipped_off_the_square_chart() {
        let set = ThickenedSet::from_points(&[vec![1.0, 1.0]], 0.0, "atom").unwrap();
        let r = pair_count_statistic(&set, &opts(PairMap::VolumeChart, 3, vec![0.1])).unwrap();
        assert_eq!(r[0].num_pairs, 0);
        assert_eq!(r[0].skipped_pairs, 20_000);
        let r = pair_count_statistic(&set, &opts(PairMap::Chain, 3, vec![0.1])).unwrap();
        assert_eq!(r[0].hits, 20_000);
        assert_eq!(r[0].n, 2);
    }

    #[test]
    fn validation() {
        let set = ThickenedSet::from_points(&[vec![1.0, 0.0]], 0.0, "atom").unwrap();
        assert!(pair_count_statistic(&set, &opts(PairMap::Chain, 2, vec![0.1, 0.2])).is_err());
        assert!(pair_count_statistic(&set, &opts(PairMap::Chain, 1, vec![0.1])).is_err());
        let mut few = opts(PairMap::Chain, 2, vec![0.1]);
        few.num_pairs = 10;
        assert!(pair_count_statistic(&set, &few).is_err());
    }
}
