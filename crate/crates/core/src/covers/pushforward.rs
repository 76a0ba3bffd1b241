use num_complex::Complex64;

use super::discriminant::discriminant_value;
use super::spec::{binary_form_coefficients, CoverKind, CoverSpec};
use crate::error::{Error, Result};
use crate::geometry::{halton, ComplexPoint, Domain, LevelFn, ScalarField};
use crate::smoothing::KahlerCocycle;

/// `π_* f` on downstairs chart 0.
pub fn pushforward(cover: &CoverSpec, f: &ScalarField) -> Result<ScalarField> {
    pushforward_chart(cover, f, 0)
}

/// `(π_* f)(b) = Σ m · f(x)` over the fiber above `b` in downstairs chart `chart`.
///
/// `f` lives on fiber coordinates. A fiber point where `f` cannot be evaluated
/// is reported as a fiber-containment error.
pub fn pushforward_chart(cover: &CoverSpec, f: &ScalarField, chart: usize) -> Result<ScalarField> {
    if f.dim() != cover.fiber_dim() {
        return Err(Error::DimensionMismatch {
            expected: cover.fiber_dim(),
            got: f.dim(),
        });
    }
    let domain = cover.downstairs_domain(chart).clone();
    let dim = domain.dim();
    let disc_cover = cover.clone();
    let disc: LevelFn = std::sync::Arc::new(move |b| discriminant_value(&disc_cover, chart, b));
    let smooth = domain.clone().intersect(Domain::superlevel("off branch locus", dim, disc, 0.0));
    let (cover, f) = (cover.clone(), f.clone());
    let label = format!("pushforward({})", f.label());
    Ok(ScalarField::try_new(label, domain, move |b| {
        let fiber = cover.fiber_in_chart(chart, b)?;
        let mut acc = 0.0;
        for x in &fiber.points {
            let value = f.eval(&x.point).map_err(|e| match e {
                Error::OutOfDomain { .. } => Error::FiberContainment(format!(
                    "fiber point {:?} over {:?} (chart {chart}) lies outside {}",
                    x.point.to_reals(),
                    b.to_reals(),
                    f.label()
                )),
                other => other,
            })?;
            acc += x.multiplicity as f64 * value;
        }
        Ok(acc)
    })
    .with_smooth_on(smooth))
}

/// Evaluates `f` on the fibers over `samples` Halton points of the downstairs
/// domain of `chart` and fails on the first point outside `f`'s domain.
pub fn check_fiber_containment(cover: &CoverSpec, f: &ScalarField, chart: usize, samples: u64) -> Result<()> {
    let domain = cover.downstairs_domain(chart);
    let bbox = domain
        .bounding_box()
        .ok_or_else(|| Error::Unbounded(domain.describe()))?;
    let dims = bbox.center.len();
    for k in 0..samples {
        let u = halton(k, dims, 11);
        let reals: Vec<f64> = (0..dims)
            .map(|d| bbox.center[d] + bbox.half_widths[d] * (2.0 * u[d] - 1.0))
            .collect();
        let b = ComplexPoint::from_reals(&reals)?;
        if !domain.contains(&b) {
            continue;
        }
        for x in cover.fiber_in_chart(chart, &b)?.points {
            if !f.valid_on().contains(&x.point) {
                return Err(Error::FiberContainment(format!(
                    "fiber point {:?} over {:?} (chart {chart}) lies outside {}",
                    x.point.to_reals(),
                    b.to_reals(),
                    f.label()
                )));
            }
        }
    }
    Ok(())
}

/// The upstairs potential expressed on fiber coordinates, ready to be pushed
/// forward to downstairs chart `chart`.
///
/// For the projective Vieta map the fiber point is moved into the product
/// chart selected by its normalized coordinates and corrected by
/// `-log|a_chart(T, S)|²`, which makes the sum over the fiber a potential
/// on the downstairs chart.
pub fn lift_potential(cover: &CoverSpec, upstairs: &KahlerCocycle, chart: usize) -> Result<ScalarField> {
    if upstairs.atlas() != cover.upstairs_atlas() {
        return Err(Error::InvalidParameter(format!(
            "upstairs cocycle atlas {:?} does not match cover atlas {:?}",
            upstairs.atlas(),
            cover.upstairs_atlas()
        )));
    }
    match cover.kind() {
        CoverKind::Power { .. } | CoverKind::Vieta { .. } => Ok(upstairs.chart(0).potential.clone()),
        CoverKind::Identity { .. } => {
            let entry = (0..upstairs.len())
                .find(|&i| upstairs.chart(i).chart == chart)
                .ok_or_else(|| Error::Coverage(format!("no upstairs entry on chart {chart}")))?;
            Ok(upstairs.chart(entry).potential.clone())
        }
        CoverKind::ProjectiveVieta { n } => {
            let upstairs = upstairs.clone();
            let domain = Domain::centered_polydisk(2 * n, 1.5);
            Ok(ScalarField::try_new(format!("lift{chart}"), domain, move |x| {
                let pairs: Vec<[Complex64; 2]> = (0..n).map(|i| [x.coord(2 * i), x.coord(2 * i + 1)]).collect();
                let mut mask = 0usize;
                let mut coords = Vec::with_capacity(n);
                for (i, [t, s]) in pairs.iter().enumerate() {
                    if t.norm() <= s.norm() {
                        coords.push(t / s);
                    } else {
                        mask |= 1 << i;
                        coords.push(s / t);
                    }
                }
                let local = ComplexPoint::new(coords)?;
                let a = binary_form_coefficients(&pairs)[chart];
                if a.norm() == 0.0 {
                    return Err(Error::OutOfDomain {
                        field: format!("lift{chart}"),
                        point: x.to_reals(),
                    });
                }
                let entry = (0..upstairs.len())
                    .filter(|&i| upstairs.chart(i).chart == mask)
                    .max_by(|&i, &j| {
                        let mi = upstairs.chart(i).domain.margin(&local);
                        let mj = upstairs.chart(j).domain.margin(&local);
                        mi.total_cmp(&mj).then(j.cmp(&i))
                    })
                    .ok_or_else(|| Error::OutOfDomain {
                        field: format!("upstairs chart {mask}"),
                        point: local.to_reals(),
                    })?;
                Ok(upstairs.eval(entry, &local)? - a.norm_sqr().ln())
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Atlas;
    use crate::smoothing::CocycleChart;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn power_map_pushforward_examples() {
        let cover = CoverSpec::power(2, Domain::centered_disk(2.0)).unwrap();
        let f = ScalarField::new("|z|^2", Domain::centered_disk(2.0), |p| p.coord(0).norm_sqr());
        let g = pushforward(&cover, &f).unwrap();
        assert!((g.eval(&ComplexPoint::one(c(1.0, 0.0))).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(g.eval(&ComplexPoint::one(c(0.0, 0.0))).unwrap(), 0.0);
        let w = ComplexPoint::one(c(0.3, -0.4));
        assert!((g.eval(&w).unwrap() - 1.0).abs() < 1e-15);
        assert!(!g.smooth_on().unwrap().contains(&ComplexPoint::one(c(0.0, 0.0))));
        assert!(g.smooth_on().unwrap().contains(&w));
    }

    #[test]
    fn vieta_pushforward_at_double_root() {
        let cover = CoverSpec::vieta(2, Domain::centered_polydisk(2, 3.0)).unwrap();
        let f = ScalarField::new("|z|^2", Domain::centered_polydisk(2, 4.0), |p| p.norm().powi(2));
        let g = pushforward(&cover, &f).unwrap();
        assert!((g.eval(&ComplexPoint::two(c(2.0, 0.0), c(1.0, 0.0))).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn fiber_outside_upstairs_domain_is_reported() {
        let cover = CoverSpec::power(2, Domain::centered_disk(4.0)).unwrap();
        let f = ScalarField::new("|z|^2", Domain::centered_disk(1.0), |p| p.coord(0).norm_sqr());
        let g = pushforward(&cover, &f).unwrap();
        assert!(matches!(g.eval(&ComplexPoint::one(c(3.0, 0.0))), Err(Error::FiberContainment(_))));
        assert!(matches!(check_fiber_containment(&cover, &f, 0, 64), Err(Error::FiberContainment(_))));
    }

    fn product_fs() -> KahlerCocycle {
        let charts = (0..4)
            .map(|mask| {
                let d = Domain::centered_polydisk(2, 1.2);
                let f = ScalarField::new(format!("fs{mask}"), Domain::centered_polydisk(2, 1.5), |p| {
                    (1.0 + p.coord(0).norm_sqr()).ln() + (1.0 + p.coord(1).norm_sqr()).ln()
                });
                CocycleChart::new(mask, d, f)
            })
            .collect();
        KahlerCocycle::new(Atlas::ProjectiveProduct { factors: 2 }, charts).unwrap()
    }

    #[test]
    fn projective_lift_differs_between_charts_by_log_modulus() {
        let cover = CoverSpec::new(
            CoverKind::ProjectiveVieta { n: 2 },
            vec![Domain::centered_polydisk(2, 3.0); 3],
        )
        .unwrap();
        let up = product_fs();
        let g0 = pushforward_chart(&cover, &lift_potential(&cover, &up, 0).unwrap(), 0).unwrap();
        let g2 = pushforward_chart(&cover, &lift_potential(&cover, &up, 2).unwrap(), 2).unwrap();
        // [a0:a1:a2] = [1 : 0.5+0.2i : 2], chart 2 coordinates (a0/a2, a1/a2)
        let b0 = ComplexPoint::two(c(0.5, 0.2), c(2.0, 0.0));
        let b2 = ComplexPoint::two(c(0.5, 0.0), c(0.25, 0.1));
        let diff = g0.eval(&b0).unwrap() - g2.eval(&b2).unwrap();
        assert!((diff - 2.0 * 4f64.ln()).abs() < 1e-9, "{diff}");
        // on roots 0 and ∞ the fiber straddles two product charts
        let b = ComplexPoint::two(c(0.0, 0.0), c(0.0, 0.0));
        assert!(g0.eval(&b).is_ok());
    }
}
