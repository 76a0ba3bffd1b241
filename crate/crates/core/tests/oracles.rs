//! Reference values computed independently of the library and frozen here.

use std::f64::consts::PI;

use kahlerglue::covers::{discriminant_value, CoverSpec};
use kahlerglue::geometry::{curve_mass, sample_grid, Atlas, Curve, CurvePatch, ParamRegion};
use kahlerglue::psh::{levi_form, min_levi_eigenvalue, reg_max_fields, reg_max_scalar, RegMaxKernel};
use kahlerglue::smoothing::{validate_params, CocycleChart, KahlerCocycle, SmoothingParams};
use kahlerglue::{ComplexPoint, Domain, ScalarField};
use num_complex::Complex64;

/// `E[max(A, B)]` for independent `A, B` with the normalized bump density,
/// from adaptive double quadrature.
const REG_MAX_AT_ZERO: f64 = 0.228_735_979_9;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn regularized_max_at_the_diagonal() {
    let k = RegMaxKernel::standard();
    let c0 = reg_max_scalar(0.0, 0.0, 1.0, &k).unwrap();
    assert!((c0 - REG_MAX_AT_ZERO).abs() < 1e-8, "{c0}");
    let scaled = reg_max_scalar(3.0, 3.0, 0.5, &k).unwrap();
    assert!((scaled - 3.0 - 0.5 * REG_MAX_AT_ZERO).abs() < 1e-8);
}

#[test]
fn regularized_max_keeps_the_smaller_margin() {
    let domain = Domain::centered_polydisk(2, 1.5);
    let u = ScalarField::new("|z|^2", domain.clone(), |p| p.coord(0).norm_sqr() + p.coord(1).norm_sqr())
        .with_smooth_on(domain.clone());
    let v = ScalarField::new("2|z1|^2+1.5|z2|^2-0.3", domain.clone(), |p| {
        2.0 * p.coord(0).norm_sqr() + 1.5 * p.coord(1).norm_sqr() - 0.3
    })
    .with_smooth_on(domain);
    let merged = reg_max_fields(&u, &v, 0.1).unwrap();
    let grid = sample_grid(&Domain::centered_polydisk(2, 0.8), 0.2).unwrap();
    let margin = min_levi_eigenvalue(&merged, &grid, 0.01).unwrap().min_eigenvalue;
    assert!(margin >= 0.9, "{margin}");
}

#[test]
fn quartic_margin_sits_at_the_inner_circle() {
    let annulus = Domain::annulus(c(0.0, 0.0), 0.5, 1.0);
    let f = ScalarField::new("|w|^4", Domain::centered_disk(2.0), |p| p.coord(0).norm_sqr().powi(2));
    let grid = sample_grid(&annulus, 0.01).unwrap();
    let margin = min_levi_eigenvalue(&f, &grid, 0.001).unwrap().min_eigenvalue;
    assert!((margin - 1.0).abs() < 0.02, "{margin}");
}

#[test]
fn cone_levi_value() {
    let f = ScalarField::new("2|w|", Domain::centered_disk(2.0), |p| 2.0 * p.coord(0).norm());
    let l = levi_form(&f, &ComplexPoint::one(c(1.0, 0.0)), 1e-3).unwrap();
    assert!((l.min_eigenvalue() - 0.5).abs() < 1e-3);
}

#[test]
fn discriminant_of_the_symmetric_square() {
    let cover = CoverSpec::vieta(2, Domain::centered_polydisk(2, 2.0)).unwrap();
    let b = ComplexPoint::two(c(0.0, 0.0), c(-1.0, 0.0));
    assert!((discriminant_value(&cover, 0, &b) - 4.0).abs() < 1e-12);
}

#[test]
fn diagonal_curve_in_the_product_has_mass_eight_pi() {
    let up = Domain::centered_polydisk(2, 1.2);
    let charts = (0..4)
        .map(|mask| {
            let fs = ScalarField::new("fs x fs", up.clone(), |p| {
                (1.0 + p.coord(0).norm_sqr()).ln() + (1.0 + p.coord(1).norm_sqr()).ln()
            });
            CocycleChart::new(mask, up.clone(), fs)
        })
        .collect();
    let cocycle = KahlerCocycle::new(Atlas::ProjectiveProduct { factors: 2 }, charts).unwrap();
    let shift = c(0.5, 0.0);
    let radius = 1.0;
    let near = ParamRegion::Disk {
        center: c(0.0, 0.0),
        radius,
    };
    let far = ParamRegion::Disk {
        center: c(0.0, 0.0),
        radius: 1.0 / radius,
    };
    // z2 = shift - z1, near z1 = 0 and near z1 = ∞.
    let curve = Curve::new(vec![
        CurvePatch::new(0, near, move |t| Some(ComplexPoint::two(t, shift - t))),
        CurvePatch::new(3, far, move |s| Some(ComplexPoint::two(s, s / (shift * s - 1.0)))),
    ])
    .with_panels(16);
    let mass = curve_mass(&cocycle, &curve, 8).unwrap();
    assert!((mass - 8.0 * PI).abs() < 0.01 * 8.0 * PI, "{mass}");
}

#[test]
fn feasible_parameter_example() {
    let params = SmoothingParams::new(0.01, 0.1, 0.2).with_tau_bound(0.01);
    assert!(validate_params(1.0, &params).is_ok());
}
