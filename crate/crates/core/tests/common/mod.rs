//! Test-only oracles and generators, kept independent of the library's algebra.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use voltype_core::Configuration;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Determinant by Laplace expansion along the first row (rows are points).
pub fn laplace_det(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    if n == 1 {
        return rows[0][0];
    }
    let mut acc = 0.0;
    for col in 0..n {
        let minor: Vec<Vec<f64>> = rows[1..]
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != col)
                    .map(|(_, v)| *v)
                    .collect()
            })
            .collect();
        let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * rows[0][col] * laplace_det(&minor);
    }
    acc
}

/// Volume type via Laplace expansion and a recursive subset enumeration.
pub fn oracle_volume_type(points: &[Vec<f64>], d: usize) -> Vec<f64> {
    fn rec(start: usize, k: usize, d: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            cur.push(i);
            rec(i + 1, k, d, cur, out);
            cur.pop();
        }
    }
    let mut subs = Vec::new();
    rec(0, points.len(), d, &mut Vec::new(), &mut subs);
    subs.iter()
        .map(|s| laplace_det(&s.iter().map(|&i| points[i].clone()).collect::<Vec<_>>()))
        .collect()
}

pub fn random_points(rng: &mut ChaCha8Rng, d: usize, k: usize) -> Vec<Vec<f64>> {
    (0..k)
        .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect()
}

fn hadamard_ratio(points: &[Vec<f64>], d: usize) -> f64 {
    let det = laplace_det(&points[..d]);
    let norms: f64 = points[..d]
        .iter()
        .map(|p| p.iter().map(|v| v * v).sum::<f64>().sqrt())
        .product();
    det.abs() / norms
}

/// A random configuration whose leading `d` points are well conditioned.
pub fn random_nondegenerate(rng: &mut ChaCha8Rng, d: usize, k: usize) -> Configuration {
    loop {
        let pts = random_points(rng, d, k);
        if hadamard_ratio(&pts, d) > 1e-2 {
            return Configuration::new(d, &pts).unwrap();
        }
    }
}

/// A random matrix rescaled to determinant one (row-major).
pub fn random_unimodular(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let rows = random_points(rng, d, d);
        let det = laplace_det(&rows);
        if hadamard_ratio(&rows, d) < 0.05 {
            continue;
        }
        let scale = det.abs().powf(-1.0 / d as f64);
        let mut m: Vec<f64> = rows.iter().flatten().map(|v| v * scale).collect();
        if det < 0.0 {
            for v in &mut m[..d] {
                *v = -*v;
            }
        }
        return m;
    }
}

pub fn apply(g: &[f64], x: &Configuration) -> Configuration {
    let d = x.d();
    let pts: Vec<Vec<f64>> = x
        .points()
        .map(|p| {
            (0..d)
                .map(|r| (0..d).map(|c| g[r * d + c] * p[c]).sum())
                .collect()
        })
        .collect();
    Configuration::new(d, &pts).unwrap()
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= (rel * a.abs().max(b.abs())).max(1e-12)
}
