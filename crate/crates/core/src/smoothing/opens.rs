use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{halton, ComplexPoint, Domain, ScalarField};
use crate::psh::{smoothstep, RegMaxKernel};

const NESTING_SAMPLES: u64 = 4096;

/// `U ⋐ V ⋐ W` together with the region `Ω ⊂ W` where the input is already smooth.
#[derive(Clone, Debug)]
pub struct NestedOpens {
    pub u: Domain,
    pub v: Domain,
    pub w: Domain,
    pub omega: Domain,
    /// Where `m`, `τ` and `K_σ` are measured; all of `V` when `None`.
    pub core: Option<Domain>,
}

impl NestedOpens {
    /// Checks the nesting structurally when the domains allow it and by
    /// low-discrepancy sampling otherwise.
    pub fn new(u: Domain, v: Domain, w: Domain, omega: Domain) -> Result<Self> {
        let dim = w.dim();
        if u.dim() != dim || v.dim() != dim || omega.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: u.dim() });
        }
        if w.bounding_box().is_none() {
            return Err(Error::Unbounded(w.describe()));
        }
        check_nested(&u, &v, "U ⋐ V")?;
        check_nested(&v, &w, "V ⋐ W")?;
        Ok(Self {
            u,
            v,
            w,
            omega,
            core: None,
        })
    }

    pub fn with_core(mut self, core: Option<Domain>) -> Self {
        self.core = core;
        self
    }

    pub fn dim(&self) -> usize {
        self.w.dim()
    }

    /// The shift profile: 1 on `U`, -1 off `V`, and `1 - 2S(s)` in between with
    /// `s = d_U / (d_U + d_V)` built from the two boundary margins.
    pub fn shift_profile(&self) -> ScalarField {
        let (u, v) = (self.u.clone(), self.v.clone());
        let kernel = RegMaxKernel::standard();
        ScalarField::new("sigma", Domain::Whole { dim: self.dim() }, move |p| {
            shift_value(&u, &v, &kernel, p)
        })
    }
}

pub(crate) fn shift_value(u: &Domain, v: &Domain, kernel: &RegMaxKernel, p: &ComplexPoint) -> f64 {
    let mu = u.margin(p);
    if mu > 0.0 {
        return 1.0;
    }
    let mv = v.margin(p);
    if !(mv > 0.0) {
        return -1.0;
    }
    let s = -mu / (mv - mu);
    1.0 - 2.0 * smoothstep(kernel, s)
}

fn check_nested(inner: &Domain, outer: &Domain, what: &str) -> Result<()> {
    if let Some(m) = outer.structural_nesting_margin(inner) {
        if m > 0.0 {
            return Ok(());
        }
        return Err(Error::Infeasible {
            condition: what.into(),
            detail: format!("nesting margin {m} between {} and {}", inner.describe(), outer.describe()),
            step: None,
        });
    }
    let Some(bbox) = inner.bounding_box() else {
        return Err(Error::Unbounded(inner.describe()));
    };
    let dims = bbox.center.len();
    for k in 0..NESTING_SAMPLES {
        let t = halton(k, dims, 3);
        let reals: Vec<f64> = (0..dims)
            .map(|d| bbox.center[d] + bbox.half_widths[d] * (2.0 * t[d] - 1.0))
            .collect();
        let p = ComplexPoint::from_reals(&reals)?;
        if inner.contains(&p) && !outer.contains(&p) {
            return Err(Error::Infeasible {
                condition: what.into(),
                detail: format!("sample {reals:?} of {} lies outside {}", inner.describe(), outer.describe()),
                step: None,
            });
        }
    }
    Ok(())
}

/// `{ p : f(p) < level }` sharing one level function, for building triples.
pub fn sublevel_family(name: &str, dim: usize, f: impl Fn(&ComplexPoint) -> f64 + Send + Sync + 'static) -> impl Fn(f64) -> Domain {
    let func: crate::geometry::LevelFn = Arc::new(f);
    let name = name.to_string();
    move |level| Domain::sublevel(name.clone(), dim, func.clone(), level)
}
