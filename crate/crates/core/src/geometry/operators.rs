//! Discrete dd^c operators on scalar fields.
//!
//! Convention: d^c = i(∂̄ − ∂), so for one complex variable dd^c u = Δu dx∧dy
//! and the mass of dd^c u over a region is the integral of the Laplacian.

use num_complex::Complex64;

use super::domain::Domain;
use super::field::ScalarField;
use super::point::ComplexPoint;
use crate::error::{Error, Result};

/// Central second-difference Laplacian over all 2n real directions.
pub fn discrete_laplacian(f: &ScalarField, p: &ComplexPoint, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("stencil spacing must be positive, got {h}")));
    }
    f.valid_on().check_dim(p)?;
    let radius = h * (2.0 * p.dim() as f64).sqrt();
    if f.valid_on().margin(p) <= radius.min(h) {
        return Err(stencil_error(f, p));
    }
    let center = f.eval(p).map_err(|e| remap_stencil(e, f, p))?;
    let mut acc = 0.0;
    for k in 0..2 * p.dim() {
        let plus = f.eval(&p.shifted(k, h)).map_err(|e| remap_stencil(e, f, p))?;
        let minus = f.eval(&p.shifted(k, -h)).map_err(|e| remap_stencil(e, f, p))?;
        acc += plus - 2.0 * center + minus;
    }
    Ok(acc / (h * h))
}

pub(crate) fn stencil_error(f: &ScalarField, p: &ComplexPoint) -> Error {
    Error::StencilOutOfDomain {
        field: f.label().to_string(),
        point: p.to_reals(),
    }
}

pub(crate) fn remap_stencil(e: Error, f: &ScalarField, p: &ComplexPoint) -> Error {
    match e {
        Error::OutOfDomain { .. } => stencil_error(f, p),
        other => other,
    }
}

/// ∫_disk Δf dx dy by the midpoint rule on the cells of the lattice anchored at
/// the disk center, each cell weighted by its exact overlap area with the disk.
pub fn mass_integral(f: &ScalarField, disk: &Domain, h: f64) -> Result<f64> {
    if f.dim() != 1 {
        return Err(Error::UnsupportedDimension {
            op: "mass_integral",
            dim: f.dim(),
        });
    }
    let Domain::Disk { center, radius } = disk else {
        return Err(Error::InvalidParameter(format!("mass_integral needs a disk, got {disk:?}")));
    };
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("spacing must be positive, got {h}")));
    }
    if *radius < 2.0 * h {
        return Err(Error::DomainTooSmall {
            domain: disk.describe(),
            what: format!("mass quadrature with spacing {h}"),
        });
    }
    let cells = (radius / h).ceil() as i64;
    let mut total = 0.0;
    for i in -cells..cells {
        for j in -cells..cells {
            let (x0, y0) = (i as f64 * h, j as f64 * h);
            let area = rect_disk_area(x0, x0 + h, y0, y0 + h, *radius);
            if area <= 0.0 {
                continue;
            }
            let mid = center + Complex64::new(x0 + 0.5 * h, y0 + 0.5 * h);
            total += area * discrete_laplacian(f, &ComplexPoint::one(mid), h)?;
        }
    }
    Ok(total)
}

/// Area of `[x0,x1]×[y0,y1] ∩ {x²+y² < r²}`.
pub fn rect_disk_area(x0: f64, x1: f64, y0: f64, y1: f64, r: f64) -> f64 {
    let g = |x: f64, y: f64| x.signum() * y.signum() * quadrant_area(x.abs(), y.abs(), r);
    (g(x1, y1) - g(x0, y1) - g(x1, y0) + g(x0, y0)).max(0.0)
}

/// Area of `[0,x]×[0,y] ∩ disk(r)` for x, y ≥ 0.
fn quadrant_area(x: f64, y: f64, r: f64) -> f64 {
    if x == 0.0 || y == 0.0 {
        return 0.0;
    }
    let x = x.min(r);
    let y = y.min(r);
    let antiderivative = |t: f64| 0.5 * (t * (r * r - t * t).max(0.0).sqrt() + r * r * (t / r).clamp(-1.0, 1.0).asin());
    // Up to `xc` the circle lies above height y.
    let xc = (r * r - y * y).max(0.0).sqrt().min(x);
    y * xc + antiderivative(x) - antiderivative(xc)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn big_disk() -> Domain {
        Domain::centered_disk(3.0)
    }

    #[test]
    fn laplacian_of_modulus_squared_is_four() {
        let f = ScalarField::new("|w|^2", big_disk(), |p| p.coord(0).norm_sqr());
        for p in [c(0.0, 0.0), c(0.3, -1.1), c(1.5, 0.2)] {
            let l = discrete_laplacian(&f, &ComplexPoint::one(p), 0.1).unwrap();
            assert!((l - 4.0).abs() < 1e-9, "{l}");
        }
    }

    #[test]
    fn laplacian_of_harmonic_cubic_vanishes() {
        let f = ScalarField::new("Re w^3", big_disk(), |p| p.coord(0).powu(3).re);
        let l = discrete_laplacian(&f, &ComplexPoint::one(c(1.0, 0.0)), 0.01).unwrap();
        assert!(l.abs() < 1e-6, "{l}");
    }

    #[test]
    fn laplacian_of_twice_modulus_matches_radial_formula() {
        // Δ(2r) = u'' + u'/r = 2/r = 4 at r = 0.5.
        let f = ScalarField::new("2|w|", big_disk(), |p| 2.0 * p.coord(0).norm());
        let l = discrete_laplacian(&f, &ComplexPoint::one(c(0.5, 0.0)), 0.01).unwrap();
        assert!((l - 4.0).abs() < 1e-3, "{l}");
    }

    #[test]
    fn stencil_leaving_domain_is_reported() {
        let f = ScalarField::new("|w|^2", Domain::centered_disk(1.0), |p| p.coord(0).norm_sqr());
        let err = discrete_laplacian(&f, &ComplexPoint::one(c(0.995, 0.0)), 0.01).unwrap_err();
        assert!(matches!(err, Error::StencilOutOfDomain { .. }));
    }

    #[test]
    fn overlap_areas_partition_the_disk() {
        let r: f64 = 1.0;
        let h: f64 = 0.13;
        let n = (r / h).ceil() as i64;
        let mut total = 0.0;
        for i in -n..n {
            for j in -n..n {
                total += rect_disk_area(i as f64 * h, (i + 1) as f64 * h, j as f64 * h, (j + 1) as f64 * h, r);
            }
        }
        assert!((total - PI).abs() < 1e-12, "{total}");
        assert!((rect_disk_area(-0.1, 0.1, -0.1, 0.1, 1.0) - 0.04).abs() < 1e-15);
        assert_eq!(rect_disk_area(2.0, 3.0, 2.0, 3.0, 1.0), 0.0);
    }

    #[test]
    fn mass_of_modulus_squared_is_four_pi() {
        let f = ScalarField::new("|w|^2", big_disk(), |p| p.coord(0).norm_sqr());
        let m = mass_integral(&f, &Domain::centered_disk(1.0), 0.05).unwrap();
        assert!((m - 4.0 * PI).abs() < 1e-9 * 4.0 * PI, "{m}");
    }

    #[test]
    fn mass_of_harmonic_field_vanishes() {
        let f = ScalarField::new("Re w^2", big_disk(), |p| p.coord(0).powu(2).re);
        let m = mass_integral(&f, &Domain::centered_disk(1.0), 0.05).unwrap();
        assert!(m.abs() < 1e-3, "{m}");
    }

    #[test]
    fn mass_of_kink_matches_radial_flux() {
        // Flux of 2r through the unit circle: 2πR·u'(R) = 4π.
        let f = ScalarField::new("2|w|", big_disk(), |p| 2.0 * p.coord(0).norm());
        let m = mass_integral(&f, &Domain::centered_disk(1.0), 0.02).unwrap();
        assert!((m - 4.0 * PI).abs() < 0.01 * 4.0 * PI, "{m}");
    }

    #[test]
    fn mass_rejects_higher_dimensions_and_tiny_disks() {
        let f2 = ScalarField::new("0", Domain::centered_polydisk(2, 1.0), |_| 0.0);
        assert!(matches!(
            mass_integral(&f2, &Domain::centered_disk(0.5), 0.1),
            Err(Error::UnsupportedDimension { .. })
        ));
        let f = ScalarField::new("0", big_disk(), |_| 0.0);
        assert!(matches!(
            mass_integral(&f, &Domain::centered_disk(0.1), 0.1),
            Err(Error::DomainTooSmall { .. })
        ));
    }
}
