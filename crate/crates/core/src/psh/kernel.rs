use crate::geometry::GaussLegendre;

/// `1 / ∫_{-1}^{1} exp(-1/(1-t²)) dt`.
pub const BUMP_NORMALIZATION: f64 = 2.252_283_621_043_58;

/// Unnormalized bump `exp(-1/(1-t²))` on (-1, 1), zero elsewhere.
pub fn bump(t: f64) -> f64 {
    let s = 1.0 - t * t;
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

/// Even smooth kernel with unit integral used by the regularized maximum.
#[derive(Clone, Debug, PartialEq)]
pub struct RegMaxKernel {
    normalization: f64,
    rule: GaussLegendre,
}

impl Default for RegMaxKernel {
    fn default() -> Self {
        Self::standard()
    }
}

impl RegMaxKernel {
    pub fn standard() -> Self {
        Self {
            normalization: BUMP_NORMALIZATION,
            rule: GaussLegendre::new(32),
        }
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn theta(&self, t: f64) -> f64 {
        self.normalization * bump(t)
    }

    /// `∫_a^b θ` by composite Gauss-Legendre.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let (a, b) = (a.max(-1.0), b.min(1.0));
        if b <= a {
            return 0.0;
        }
        self.rule.integrate_composite(a, b, 4, |t| self.theta(t))
    }

    /// `F(x) = E[(x + A - B)^+]` for independent `A, B ~ θ`.
    ///
    /// `F = 0` for `x ≤ -2` and `F(x) = x + F(-x)`.
    pub fn excess(&self, x: f64) -> f64 {
        if x > 0.0 {
            return x + self.excess(-x);
        }
        if x <= -2.0 {
            return 0.0;
        }
        let upper = (x + 1.0).min(1.0);
        self.rule
            .integrate_composite(-1.0, upper, 2, |b| self.theta(b) * self.partial_mean(x - b))
    }

    /// `G(c) = E[(c + A)^+]`.
    fn partial_mean(&self, c: f64) -> f64 {
        if c <= -1.0 {
            return 0.0;
        }
        let lower = (-c).max(-1.0);
        self.rule
            .integrate_composite(lower, 1.0, 2, |a| (c + a) * self.theta(a))
    }
}

/// Smooth monotone step on [0, 1]: `S(s) = ∫_{-1}^{2s-1} θ`, flat to all
/// orders at both ends.
pub fn smoothstep(kernel: &RegMaxKernel, s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else if s <= 0.5 {
        kernel.integral(-1.0, 2.0 * s - 1.0)
    } else {
        1.0 - kernel.integral(2.0 * s - 1.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_has_unit_mass_and_is_even() {
        let k = RegMaxKernel::standard();
        assert!((k.integral(-1.0, 1.0) - 1.0).abs() < 1e-10);
        for t in [0.0, 0.3, 0.77, 0.999] {
            assert_eq!(k.theta(t), k.theta(-t));
        }
        assert_eq!(k.theta(1.0), 0.0);
        assert_eq!(k.theta(-1.5), 0.0);
    }

    #[test]
    fn excess_symmetry_relation() {
        let k = RegMaxKernel::standard();
        assert_eq!(k.excess(-2.5), 0.0);
        assert!((k.excess(0.7) - 0.7 - k.excess(-0.7)).abs() < 1e-15);
        assert!(k.excess(-1.0) > 0.0 && k.excess(-1.0) < k.excess(0.0));
    }

    #[test]
    fn smoothstep_is_monotone_and_flat() {
        let k = RegMaxKernel::standard();
        assert_eq!(smoothstep(&k, -0.1), 0.0);
        assert_eq!(smoothstep(&k, 1.1), 1.0);
        assert!((smoothstep(&k, 0.5) - 0.5).abs() < 1e-10);
        let mut prev = 0.0;
        for i in 1..200 {
            let s = smoothstep(&k, i as f64 / 200.0);
            assert!(s >= prev);
            prev = s;
        }
        assert!(smoothstep(&k, 0.01) < 1e-12);
    }
}
