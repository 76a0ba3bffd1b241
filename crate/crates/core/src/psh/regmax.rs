use super::kernel::RegMaxKernel;
use crate::error::{Error, Result};
use crate::geometry::{Domain, ScalarField};

/// Regularized maximum `M_η(t1, t2) = ∬ max(t1 + h1, t2 + h2) θ(h1/η) θ(h2/η) / η²`.
///
/// Returns `max(t1, t2)` exactly when `|t1 - t2| ≥ 2η`.
pub fn reg_max_scalar(t1: f64, t2: f64, eta: f64, kernel: &RegMaxKernel) -> Result<f64> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::InvalidParameter(format!("regularized max width must be positive, got {eta}")));
    }
    Ok(reg_max_unchecked(t1, t2, eta, kernel))
}

pub(crate) fn reg_max_unchecked(t1: f64, t2: f64, eta: f64, kernel: &RegMaxKernel) -> f64 {
    let gap = (t1 - t2).abs();
    let top = t1.max(t2);
    if gap >= 2.0 * eta {
        return top;
    }
    top + eta * kernel.excess(-gap / eta)
}

/// Pointwise `M_η(u, v)` on the intersection of the domains.
pub fn reg_max_fields(u: &ScalarField, v: &ScalarField, eta: f64) -> Result<ScalarField> {
    reg_max_fields_with(u, v, eta, &RegMaxKernel::standard())
}

pub fn reg_max_fields_with(u: &ScalarField, v: &ScalarField, eta: f64, kernel: &RegMaxKernel) -> Result<ScalarField> {
    reg_max_scalar(0.0, 0.0, eta, kernel)?;
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: v.dim(),
        });
    }
    let domain = u.valid_on().clone().intersect(v.valid_on().clone());
    if let (Some(a), Some(b)) = (u.valid_on().bounding_box(), v.valid_on().bounding_box()) {
        let disjoint = a
            .center
            .iter()
            .zip(&a.half_widths)
            .zip(b.center.iter().zip(&b.half_widths))
            .any(|((ca, wa), (cb, wb))| (ca - cb).abs() >= wa + wb);
        if disjoint {
            return Err(Error::DisjointDomains(u.valid_on().describe(), v.valid_on().describe()));
        }
    }

    let smooth = match (u.smooth_on(), v.smooth_on()) {
        (Some(a), Some(b)) => Some(a.clone().intersect(b.clone())),
        _ => None,
    };
    let dominated = dominance_region(u, v, eta).union(dominance_region(v, u, eta));
    let smooth_on = match smooth {
        Some(s) => s.union(dominated),
        None => dominated,
    };

    let (f, g, k) = (u.clone(), v.clone(), kernel.clone());
    let field = ScalarField::try_new(format!("M[{}, {}]", u.label(), v.label()), domain, move |p| {
        Ok(reg_max_unchecked(f.eval(p)?, g.eval(p)?, eta, &k))
    });
    Ok(field.with_smooth_on(smooth_on))
}

/// Where `a ≥ b + 2η` and `a` is smooth.
fn dominance_region(a: &ScalarField, b: &ScalarField, eta: f64) -> Domain {
    let Some(smooth) = a.smooth_on() else {
        return Domain::Empty { dim: a.dim() };
    };
    let (fa, fb) = (a.clone(), b.clone());
    let gap = Domain::superlevel(
        format!("{} - {}", a.label(), b.label()),
        a.dim(),
        std::sync::Arc::new(move |p| match (fa.eval(p), fb.eval(p)) {
            (Ok(x), Ok(y)) => x - y,
            _ => f64::NAN,
        }),
        2.0 * eta,
    );
    smooth.clone().intersect(gap)
}
