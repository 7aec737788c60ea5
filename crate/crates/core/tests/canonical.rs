mod common;

use common::*;
use rand::Rng;
use voltype_core::canonical::canonical_form_with_floor;
use voltype_core::*;

const SHAPES: [(usize, usize); 6] = [(2, 2), (2, 3), (2, 4), (3, 3), (3, 4), (3, 5)];

#[test]
fn embedding_inverts_the_chart() {
    let mut rng = rng(200);
    for i in 0..1000 {
        let (d, k) = SHAPES[i % SHAPES.len()];
        let x = random_nondegenerate(&mut rng, d, k);
        let c = canonical_form(&x, 1e-10).unwrap();
        assert_eq!(c.dim(), manifold_dim(k, d));
        let back = embed_phi(&c);
        let want = volume_type(&x);
        for (a, b) in back.values.iter().zip(&want.values) {
            assert!(close(*a, *b, 1e-9), "d={d} k={k}: {a} vs {b}");
        }
    }
}

#[test]
fn chart_is_constant_on_orbits() {
    let mut rng = rng(201);
    for i in 0..600 {
        let (d, k) = SHAPES[i % SHAPES.len()];
        let x = random_nondegenerate(&mut rng, d, k);
        let y = apply(&random_unimodular(&mut rng, d), &x);
        let a = canonical_form(&x, 1e-10).unwrap().to_vector();
        let b = canonical_form(&y, 1e-10).unwrap().to_vector();
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() <= 1e-8 * (1.0 + u.abs()), "{u} vs {v}");
        }
    }
}

#[test]
fn chart_representative_has_the_same_volume_type() {
    let mut rng = rng(202);
    for (d, k) in SHAPES {
        let x = random_nondegenerate(&mut rng, d, k);
        let rep = canonical_form(&x, 1e-10).unwrap().configuration();
        assert!(same_volume_type(&x, &rep, 1e-9).unwrap());
    }
}

#[test]
fn jacobian_has_full_rank_away_from_the_boundary() {
    let mut rng = rng(203);
    for (d, k) in SHAPES {
        let n = manifold_dim(k, d);
        for _ in 0..100 {
            let t = rng.random_range(0.1..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let z: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-1.0..1.0)).collect();
            let c = CanonicalCoordinates::new(d, k, t, z).unwrap();
            let j = phi_jacobian(&c, None).unwrap();
            assert_eq!(j.rank, n, "d={d} k={k} sv={:?}", j.singular_values);
            assert!(j.full_rank);
        }
    }
}

#[test]
fn chart_floor_is_respected() {
    let x = Configuration::new(2, &[vec![1.0, 0.0], vec![0.0, 1e-4], vec![1.0, 1.0]]).unwrap();
    assert!(canonical_form(&x, 1e-10).is_ok());
    assert!(matches!(
        canonical_form_with_floor(&x, 1e-10, 1e-3),
        Err(Error::ChartBoundary { .. })
    ));
    assert!(matches!(
        CanonicalCoordinates::new(2, 3, 0.0, vec![1.0, 1.0]),
        Err(Error::ChartBoundary { .. })
    ));
}
