//! Integrals of dd^c over holomorphic curves in a chart-glued base.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::point::ComplexPoint;
use super::quadrature::GaussLegendre;
use crate::error::{Error, Result};
use crate::smoothing::KahlerCocycle;

pub type CurveMap = Arc<dyn Fn(Complex64) -> Option<ComplexPoint> + Send + Sync>;

/// Parameter region of one curve patch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParamRegion {
    Rectangle { re: (f64, f64), im: (f64, f64) },
    Disk { center: Complex64, radius: f64 },
}

impl ParamRegion {
    pub fn area(&self) -> f64 {
        match *self {
            ParamRegion::Rectangle { re, im } => (re.1 - re.0).abs() * (im.1 - im.0).abs(),
            ParamRegion::Disk { radius, .. } => PI * radius * radius,
        }
    }
}

/// A holomorphic map from a parameter region into atlas chart `chart`.
#[derive(Clone)]
pub struct CurvePatch {
    pub chart: usize,
    pub region: ParamRegion,
    pub map: CurveMap,
}

impl CurvePatch {
    pub fn new<F>(chart: usize, region: ParamRegion, map: F) -> Self
    where
        F: Fn(Complex64) -> Option<ComplexPoint> + Send + Sync + 'static,
    {
        Self {
            chart,
            region,
            map: Arc::new(map),
        }
    }
}

impl fmt::Debug for CurvePatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CurvePatch")
            .field("chart", &self.chart)
            .field("region", &self.region)
            .finish()
    }
}

/// A curve assembled from patches whose images cover it up to measure zero.
#[derive(Clone, Debug)]
pub struct Curve {
    pub patches: Vec<CurvePatch>,
    /// Composite panels per unit of parameter length.
    pub panels: usize,
    /// Step of the parameter-space Laplacian stencil.
    pub fd_step: f64,
}

impl Curve {
    pub fn new(patches: Vec<CurvePatch>) -> Self {
        Self {
            patches,
            panels: 8,
            fd_step: 1e-3,
        }
    }

    pub fn with_panels(mut self, panels: usize) -> Self {
        self.panels = panels.max(1);
        self
    }

    pub fn with_fd_step(mut self, h: f64) -> Self {
        self.fd_step = h;
        self
    }

    /// The identity of P¹ split along the unit circle.
    pub fn projective_line() -> Self {
        let unit = ParamRegion::Disk {
            center: Complex64::new(0.0, 0.0),
            radius: 1.0,
        };
        Self::new(vec![
            CurvePatch::new(0, unit, |t| Some(ComplexPoint::one(t))),
            CurvePatch::new(1, unit, |t| Some(ComplexPoint::one(t))),
        ])
    }
}

/// `∫_curve dd^c u`, with `u` read from whichever cocycle chart contains the
/// stencil, preferring charts on the patch's own atlas chart.
pub fn curve_mass(potentials: &KahlerCocycle, curve: &Curve, quad_order: usize) -> Result<f64> {
    if quad_order == 0 {
        return Err(Error::InvalidParameter("quadrature order must be positive".into()));
    }
    let gl = GaussLegendre::new(quad_order);
    let mut total = 0.0;
    for patch in &curve.patches {
        if patch.region.area() == 0.0 {
            continue;
        }
        let mut order: Vec<usize> = (0..potentials.len()).collect();
        order.sort_by_key(|&i| (potentials.chart(i).chart != patch.chart, i));
        let density = |t: Complex64| parameter_laplacian(potentials, patch, &order, t, curve.fd_step);
        total += integrate_region(&gl, patch.region, curve.panels, density)?;
    }
    Ok(total)
}

fn integrate_region(
    gl: &GaussLegendre,
    region: ParamRegion,
    panels: usize,
    mut f: impl FnMut(Complex64) -> Result<f64>,
) -> Result<f64> {
    let count = |len: f64| ((len * panels as f64).ceil() as usize).max(1);
    let mut acc = 0.0;
    let mut err = None;
    match region {
        ParamRegion::Rectangle { re, im } => {
            let (nx, ny) = (count((re.1 - re.0).abs()), count((im.1 - im.0).abs()));
            acc = gl.integrate_composite(re.0, re.1, nx, |x| {
                gl.integrate_composite(im.0, im.1, ny, |y| {
                    f(Complex64::new(x, y)).unwrap_or_else(|e| {
                        err.get_or_insert(e);
                        0.0
                    })
                })
            });
        }
        ParamRegion::Disk { center, radius } => {
            let nr = count(radius);
            let nt = count(2.0 * PI * radius).max(4);
            acc += gl.integrate_composite(0.0, radius, nr, |r| {
                r * gl.integrate_composite(0.0, 2.0 * PI, nt, |t| {
                    f(center + Complex64::from_polar(r, t)).unwrap_or_else(|e| {
                        err.get_or_insert(e);
                        0.0
                    })
                })
            });
        }
    }
    match err {
        Some(e) => Err(e),
        None => Ok(acc),
    }
}

fn parameter_laplacian(
    potentials: &KahlerCocycle,
    patch: &CurvePatch,
    order: &[usize],
    t: Complex64,
    h: f64,
) -> Result<f64> {
    let offsets = [
        Complex64::new(0.0, 0.0),
        Complex64::new(h, 0.0),
        Complex64::new(-h, 0.0),
        Complex64::new(0.0, h),
        Complex64::new(0.0, -h),
    ];
    let mut points = Vec::with_capacity(5);
    for o in offsets {
        let p = (patch.map)(t + o).ok_or_else(|| coverage(patch, t))?;
        points.push(p);
    }
    let atlas = potentials.atlas();
    'charts: for &i in order {
        let entry = potentials.chart(i);
        let mut values = [0.0; 5];
        for (slot, p) in values.iter_mut().zip(&points) {
            let Some(q) = atlas.transition(patch.chart, entry.chart, p) else {
                continue 'charts;
            };
            if !entry.domain.contains(&q) {
                continue 'charts;
            }
            match entry.potential.eval(&q) {
                Ok(v) => *slot = v,
                Err(Error::OutOfDomain { .. }) => continue 'charts,
                Err(e) => return Err(e),
            }
        }
        return Ok((values[1] + values[2] + values[3] + values[4] - 4.0 * values[0]) / (h * h));
    }
    Err(coverage(patch, t))
}

fn coverage(patch: &CurvePatch, t: Complex64) -> Error {
    Error::Coverage(format!(
        "curve patch in chart {} leaves every cocycle chart at parameter {t}",
        patch.chart
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Atlas, Domain, ScalarField};
    use crate::smoothing::{CocycleChart, KahlerCocycle};

    fn fs_p1() -> KahlerCocycle {
        let fs = ScalarField::new("fs", Domain::centered_disk(3.0), |p| (1.0 + p.coord(0).norm_sqr()).ln());
        KahlerCocycle::new(
            Atlas::Projective { dim: 1 },
            vec![
                CocycleChart::new(0, Domain::centered_disk(2.0), fs.clone()),
                CocycleChart::new(1, Domain::centered_disk(2.0), fs),
            ],
        )
        .unwrap()
    }

    #[test]
    fn fubini_study_line_has_mass_four_pi() {
        let m = curve_mass(&fs_p1(), &Curve::projective_line(), 8).unwrap();
        assert!((m - 4.0 * PI).abs() < 0.01 * 4.0 * PI, "{m}");
    }

    #[test]
    fn degenerate_patch_has_zero_mass() {
        let curve = Curve::new(vec![CurvePatch::new(
            0,
            ParamRegion::Rectangle {
                re: (0.3, 0.3),
                im: (0.0, 1.0),
            },
            |_| Some(ComplexPoint::one(Complex64::new(0.5, 0.0))),
        )]);
        assert_eq!(curve_mass(&fs_p1(), &curve, 8).unwrap(), 0.0);
    }

    #[test]
    fn chart_choice_does_not_change_the_integral() {
        let k = fs_p1();
        let region = ParamRegion::Rectangle {
            re: (0.8, 1.3),
            im: (-0.2, 0.3),
        };
        let in0 = Curve::new(vec![CurvePatch::new(0, region, |t| Some(ComplexPoint::one(t)))]);
        let in1 = Curve::new(vec![CurvePatch::new(1, region, |t| Some(ComplexPoint::one(t.inv())))]);
        let (a, b) = (curve_mass(&k, &in0, 8).unwrap(), curve_mass(&k, &in1, 8).unwrap());
        assert!((a - b).abs() < 1e-5, "{a} vs {b}");
    }

    #[test]
    fn leaving_all_charts_is_a_coverage_error() {
        let fs = ScalarField::new("fs", Domain::centered_disk(3.0), |p| (1.0 + p.coord(0).norm_sqr()).ln());
        let k = KahlerCocycle::single(Domain::centered_disk(2.0), fs).unwrap();
        let curve = Curve::new(vec![CurvePatch::new(
            0,
            ParamRegion::Disk {
                center: Complex64::new(0.0, 0.0),
                radius: 1.0,
            },
            |t| Some(ComplexPoint::one(t * 10.0)),
        )]);
        assert!(matches!(curve_mass(&k, &curve, 4), Err(Error::Coverage(_))));
    }
}
