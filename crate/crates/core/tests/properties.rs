use kahlerglue::covers::{pushforward, CoverSpec};
use kahlerglue::psh::{levi_form, mollify, reg_max_scalar, MollifierRule, RegMaxKernel};
use kahlerglue::scenarios::{Check, Comparison, Overrides, VerificationReport};
use kahlerglue::smoothing::{validate_params, SmoothingParams};
use kahlerglue::{ComplexPoint, Domain, Error, ScalarField};
use num_complex::Complex64;
use proptest::prelude::*;

fn point1() -> impl Strategy<Value = ComplexPoint> {
    (0.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| ComplexPoint::one(Complex64::from_polar(r, t)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn reg_max_is_symmetric_and_bounded(t1 in -10.0..10.0f64, gap in -3.0..3.0f64, eta in 0.01..2.0f64) {
        let k = RegMaxKernel::standard();
        let t2 = t1 + gap * eta;
        let m = reg_max_scalar(t1, t2, eta, &k).unwrap();
        prop_assert_eq!(m.to_bits(), reg_max_scalar(t2, t1, eta, &k).unwrap().to_bits());
        let top = t1.max(t2);
        prop_assert!(m >= top - 1e-12 && m <= top + eta);
        if gap.abs() >= 2.0 {
            prop_assert_eq!(m, top);
        }
    }

    #[test]
    fn reg_max_commutes_with_shifts(t1 in -5.0..5.0f64, gap in -2.5..2.5f64, eta in 0.05..1.0f64, a in -3.0..3.0f64) {
        let k = RegMaxKernel::standard();
        let t2 = t1 + gap * eta;
        let m = reg_max_scalar(t1, t2, eta, &k).unwrap();
        let shifted = reg_max_scalar(t1 + a, t2 + a, eta, &k).unwrap();
        prop_assert!((shifted - m - a).abs() < 1e-11);
    }

    #[test]
    fn mollifier_reproduces_affine_functions(p in point1(), a in -2.0..2.0f64, b in -2.0..2.0f64, eps in 0.01..0.5f64) {
        let f = ScalarField::new("affine", Domain::centered_disk(2.0), move |q| a * q.coord(0).re + b * q.coord(0).im + 1.0);
        let g = mollify(&f, eps, 6).unwrap();
        prop_assert!((g.eval(&p).unwrap() - f.eval(&p).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn quadratic_levi_form_is_exact(p in point1(), scale in 0.1..10.0f64) {
        let f = ScalarField::new("s|w|^2", Domain::centered_disk(2.0), move |q| scale * q.coord(0).norm_sqr());
        let l = levi_form(&f, &p, 1e-2).unwrap();
        prop_assert!((l.min_eigenvalue() - scale).abs() < 1e-8 * scale.max(1.0));
    }

    #[test]
    fn vieta_pushforward_forgets_the_ordering(s in (-1.4..1.4f64, -1.4..1.4f64), q in (-1.4..1.4f64, -1.4..1.4f64)) {
        let cover = CoverSpec::vieta(2, Domain::centered_polydisk(2, 2.0)).unwrap();
        let up = Domain::centered_polydisk(2, 5.0);
        let first = ScalarField::new("|z1|^2", up.clone(), |x| x.coord(0).norm_sqr() + 0.3 * x.coord(0).re);
        let second = ScalarField::new("|z2|^2", up, |x| x.coord(1).norm_sqr() + 0.3 * x.coord(1).re);
        let b = ComplexPoint::two(Complex64::new(s.0, s.1), Complex64::new(q.0, q.1));
        let (u, v) = (pushforward(&cover, &first).unwrap(), pushforward(&cover, &second).unwrap());
        prop_assert!((u.eval(&b).unwrap() - v.eval(&b).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn power_pushforward_counts_the_degree(degree in 1usize..6, w in point1()) {
        let cover = CoverSpec::power(degree, Domain::centered_disk(1.0)).unwrap();
        let up = Domain::centered_disk(1.5);
        let one = pushforward(&cover, &ScalarField::constant(1.0, up.clone())).unwrap();
        prop_assert_eq!(one.eval(&w).unwrap(), degree as f64);
        if degree >= 2 {
            let odd = pushforward(&cover, &ScalarField::new("Re z", up, |x| x.coord(0).re)).unwrap();
            prop_assert!(odd.eval(&w).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn overrides_accept_positive_values_by_either_spelling(value in 1e-6..10.0f64, idx in 0usize..6) {
        let name = Overrides::NAMES[idx];
        let (mut a, mut b) = (Overrides::default(), Overrides::default());
        a.set(name, value).unwrap();
        b.set(&name.replace('_', "-"), value).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.set(name, -value).is_err());
        prop_assert!(a.set(name, 0.0).is_err());
    }

    #[test]
    fn eta_above_half_delta_is_rejected(delta in 1e-4..1.0f64, excess in 1.0001..10.0f64) {
        let params = SmoothingParams::new(0.01, excess * delta / 2.0, delta);
        match validate_params(1.0, &params) {
            Err(Error::Infeasible { condition, .. }) => prop_assert_eq!(condition, "eta ≤ delta/2"),
            other => prop_assert!(false, "{other:?}"),
        }
    }

    #[test]
    fn reports_round_trip_consistently(values in prop::collection::vec((-1e3..1e3f64, -1e3..1e3f64, 0usize..4), 0..8)) {
        let mut report = VerificationReport::new("P");
        for (i, (value, tol, cmp)) in values.into_iter().enumerate() {
            let cmp = [Comparison::Le, Comparison::Lt, Comparison::Ge, Comparison::Gt][cmp];
            report.push(Check::new(format!("c{i}"), value, cmp, tol));
        }
        let back = VerificationReport::from_json(&report.to_json()).unwrap();
        prop_assert!(back.inconsistencies().is_empty());
        prop_assert_eq!(back.to_json(), report.to_json());
    }
}

#[test]
fn mollifier_rules_are_normalized_inside_the_ball() {
    for (dim, order) in [(1, 4), (1, 12), (2, 4), (2, 8)] {
        let rule = MollifierRule::new(dim, order).unwrap();
        let mut sum = 0.0;
        for (t, w) in rule.offsets().zip(rule.weights()) {
            assert!(t.iter().map(|x| x * x).sum::<f64>() < 1.0);
            assert!(*w > 0.0);
            sum += w;
        }
        assert!((sum - 1.0).abs() < 1e-12);
    }
}
