use super::report::{Check, Comparison};
use crate::error::{Error, Result};
use crate::geometry::{halton, mass_integral, sample_grid, ComplexPoint, Domain, ScalarField};
use crate::smoothing::stencil_grid;
use crate::psh::min_levi_eigenvalue;

/// Halton seed shared by every sampled check.
pub const SAMPLE_SEED: u64 = 409;

/// The first `count` low-discrepancy points of the bounding box of `region`
/// that fall inside it.
pub fn region_samples(region: &Domain, count: u64) -> Result<Vec<ComplexPoint>> {
    let bbox = region
        .bounding_box()
        .ok_or_else(|| Error::Unbounded(region.describe()))?;
    let dims = bbox.center.len();
    let mut out = Vec::with_capacity(count as usize);
    let mut k = 0;
    while (out.len() as u64) < count && k < 64 * count {
        let t = halton(k, dims, SAMPLE_SEED);
        let reals: Vec<f64> = (0..dims)
            .map(|d| bbox.center[d] + bbox.half_widths[d] * (2.0 * t[d] - 1.0))
            .collect();
        let p = ComplexPoint::from_reals(&reals)?;
        if region.contains(&p) {
            out.push(p);
        }
        k += 1;
    }
    if out.is_empty() {
        return Err(Error::EmptyGrid {
            domain: region.describe(),
            spacing: 0.0,
        });
    }
    Ok(out)
}

/// `sup |psi - reference|` over `sample_count` points of `region`; passes only
/// when the two agree bit for bit.
///
/// The check is not applicable when a sample falls in `excluded` (the set
/// where the two are allowed to differ).
pub fn verify_agreement(
    psi: &ScalarField,
    reference: &ScalarField,
    region: &Domain,
    excluded: &Domain,
    sample_count: u64,
) -> Result<Check> {
    let name = "agreement_outside_N";
    let samples = region_samples(region, sample_count)?;
    if let Some(p) = samples.iter().find(|p| excluded.contains(p)) {
        return Ok(Check::not_applicable(
            name,
            format!("region meets the smoothing zone at {:?}", p.to_reals()),
        ));
    }
    let mut sup: f64 = 0.0;
    for p in &samples {
        let d = (psi.eval(p)? - reference.eval(p)?).abs();
        if d.is_nan() {
            sup = f64::NAN;
            break;
        }
        sup = sup.max(d);
    }
    Ok(Check::new(name, sup, Comparison::Le, 0.0).with_detail(format!("{} samples", samples.len())))
}

/// Smallest Levi eigenvalue over the lattice of `region` at spacing `node_h`,
/// with FD step `fd_h`.
pub fn positivity(name: &str, f: &ScalarField, region: &Domain, node_h: f64, fd_h: f64) -> Result<Check> {
    let grid = stencil_grid(region, f.valid_on(), node_h, 2.0 * fd_h)?;
    let report = min_levi_eigenvalue(f, &grid, fd_h)?;
    Ok(Check::new(name, report.min_eigenvalue, Comparison::Gt, 0.0)
        .with_detail(format!("argmin {:?}, {} nodes", report.argmin_location.to_reals(), grid.len())))
}

/// `sup |Δ_h f|` over the lattice of `region` with spacing `h`.
pub fn sup_laplacian(f: &ScalarField, region: &Domain, h: f64) -> Result<f64> {
    let grid = sample_grid(region, h)?;
    let mut sup: f64 = 0.0;
    for p in grid.nodes() {
        let mut acc = 0.0;
        let center = f.eval(p)?;
        for k in 0..2 * p.dim() {
            acc += f.eval(&p.shifted(k, h))? + f.eval(&p.shifted(k, -h))? - 2.0 * center;
        }
        sup = sup.max((acc / (h * h)).abs());
    }
    Ok(sup)
}

/// Ratio of the sup discrete Laplacian at `h/2` to that at `h`. A bounded
/// second derivative keeps it near 1; a kink doubles it.
pub fn refinement_ratio(f: &ScalarField, region: &Domain, h: f64) -> Result<f64> {
    let coarse = sup_laplacian(f, region, h)?;
    let fine = sup_laplacian(f, region, h / 2.0)?;
    Ok(fine / coarse)
}

/// `|after - before| / |before|` for disk masses at spacing `h`.
pub fn mass_change(before: &ScalarField, after: &ScalarField, disk: &Domain, h: f64) -> Result<(f64, f64, f64)> {
    let a = mass_integral(before, disk, h)?;
    let b = mass_integral(after, disk, h)?;
    Ok((a, b, (b - a).abs() / a.abs()))
}
