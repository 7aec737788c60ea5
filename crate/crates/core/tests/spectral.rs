mod common;

use voltype_core::measure::spectral::{discretize, dyadic_bump};
use voltype_core::measure::{lp_scaling_check, SpectralMeasure, SpectralOptions};
use voltype_core::*;

#[test]
fn cantor_measure_grows_at_the_codimension_rate() {
    let m = SpectralMeasure::Cantor {
        depth: 10,
        ratio: 1.0 / 3.0,
    };
    let r = lp_scaling_check(&m, &SpectralOptions::default()).unwrap();
    let s = 2f64.ln() / 3f64.ln();
    let sup = r.fitted_slope_sup.unwrap();
    let l2 = r.fitted_slope_l2.unwrap();
    println!("sup {sup} l2 {l2} {:?}", r.sup_norms);
    assert!((sup - (1.0 - s)).abs() <= 0.1, "sup slope {sup}");
    assert!(l2 <= (1.0 - s) / 2.0 + 0.1, "l2 slope {l2}");
    assert!(r.within_bounds(0.1));
}

#[test]
fn uniform_measure_has_flat_pieces() {
    let m = SpectralMeasure::Uniform {
        start: 0.0,
        end: 1.0,
    };
    let r = lp_scaling_check(&m, &SpectralOptions::default()).unwrap();
    let sup = r.fitted_slope_sup.unwrap();
    println!("sup {sup} {:?}", r.sup_norms);
    assert!(sup.abs() <= 0.05, "sup slope {sup}");
    assert_eq!(r.target_exponent, 0.0);
}

#[test]
fn binning_conserves_mass() {
    let measures = [
        SpectralMeasure::Uniform {
            start: 0.2,
            end: 0.9,
        },
        SpectralMeasure::Cantor {
            depth: 10,
            ratio: 1.0 / 3.0,
        },
        SpectralMeasure::Set(build_sharpness_set(&LatticeSpec::new(32, 1.0, 1).unwrap())),
        SpectralMeasure::Set(build_sharpness_set(&LatticeSpec::new(8, 1.5, 2).unwrap())),
    ];
    for m in &measures {
        let n = if m.dim() == 1 { 1 << 14 } else { 1 << 9 };
        let grid = discretize(m, n, 2.0).unwrap();
        assert_eq!(grid.len(), n.pow(m.dim() as u32));
        let total: f64 = grid.iter().sum();
        assert!((total - 1.0).abs() <= 1e-9, "{total}");
        let r = lp_scaling_check(
            m,
            &SpectralOptions {
                grid_size: n,
                j_min: 2,
                j_max: 5,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((r.total_mass - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn bump_profile() {
    for (r, want) in [
        (0.4, 0.0),
        (0.5, 0.0),
        (1.0, 1.0),
        (1.5, 1.0),
        (2.0, 1.0),
        (4.0, 0.0),
        (5.0, 0.0),
    ] {
        assert_eq!(dyadic_bump(r), want, "r={r}");
    }
    let mid = dyadic_bump(3.0);
    assert!(mid > 0.0 && mid < 1.0);
}

#[test]
fn lattice_measure_has_two_scales() {
    // spacing 1/32 lattice on [1/2, 1] thickened by 32^{-2}: the pieces grow like a point
    // mass between the lattice spacing and the thickening radius, and are flat on either side
    let set = build_sharpness_set(&LatticeSpec::new(32, 0.5, 1).unwrap());
    let opts = SpectralOptions {
        j_min: 1,
        j_max: 12,
        ..Default::default()
    };
    let r = lp_scaling_check(&SpectralMeasure::Set(set), &opts).unwrap();
    let lg: Vec<f64> = r.sup_norms.iter().map(|v| v.log2()).collect();
    let slope = |a: usize, b: usize| (lg[b - 1] - lg[a - 1]) / (b - a) as f64;
    let (coarse, lattice, fine) = (slope(1, 3), slope(3, 7), slope(8, 12));
    assert!(coarse < 0.5, "{lg:?}");
    assert!((lattice - 1.0).abs() < 0.25, "{lg:?}");
    assert!(fine.abs() < 0.25, "{lg:?}");
}

#[test]
fn nyquist_is_enforced() {
    let m = SpectralMeasure::Uniform {
        start: 0.0,
        end: 1.0,
    };
    let opts = SpectralOptions {
        grid_size: 1 << 12,
        j_max: 12,
        ..Default::default()
    };
    assert!(matches!(
        lp_scaling_check(&m, &opts),
        Err(Error::NyquistViolation { .. })
    ));
}
