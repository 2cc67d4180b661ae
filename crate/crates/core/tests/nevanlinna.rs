use std::f64::consts::{E, PI};

use fermatlab_core::expr::Expr;
use fermatlab_core::nevanlinna::*;
use fermatlab_core::quadrature::{integrate, GkConfig};
use fermatlab_core::solutions::holo_equal;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn z() -> Expr {
    Expr::var()
}

fn shift(a: f64) -> Expr {
    z().add(&Expr::real(-a))
}

fn cfg() -> QuadConfig {
    QuadConfig::default()
}

const ZERO: Target = Target::Finite(Complex64 { re: 0.0, im: 0.0 });

fn single(at: Complex64, multiplicity: u32) -> ZeroPoleList {
    ZeroPoleList::user(vec![APoint { z: at, multiplicity }]).unwrap()
}

#[test]
fn plane_green_closed_form() {
    let g = green(BaseSurface::PLANE, 2.0, c(1.0, 0.0)).unwrap();
    assert!((g - 2f64.ln() / PI).abs() < 1e-15);
    assert!((g - 0.2206).abs() < 1e-4);
}

#[test]
fn disc_green_vanishes_on_boundary() {
    for r in [0.5, 1.0, 3.0] {
        let big_r = (0.5f64 * r).tanh();
        let g = green(BaseSurface::DISC, r, Complex64::from_polar(big_r, 0.7)).unwrap();
        assert!(g.abs() < 1e-15);
        assert!(green(BaseSurface::DISC, r, c(0.5 * big_r, 0.0)).unwrap() > 0.0);
        assert!(matches!(
            green(BaseSurface::DISC, r, c(1.01 * big_r, 0.0)),
            Err(NevanlinnaError::OutsideDisc { .. })
        ));
    }
}

/// Radial bump `(1 − (ρ/a)²)⁴` and its Euclidean Laplacian `φ'' + φ'/ρ`.
fn bump_laplacian(a: f64, w: Complex64) -> f64 {
    let s = w.norm() / a;
    if s >= 1.0 {
        return 0.0;
    }
    let u = 1.0 - s * s;
    // φ = u⁴, dφ/ds = −8 s u³, d²φ/ds² = −8u³ + 48 s² u².
    let d1 = -8.0 * s * u.powi(3);
    let d2 = -8.0 * u.powi(3) + 48.0 * s * s * u * u;
    (d2 + if s > 0.0 { d1 / s } else { -8.0 }) / (a * a)
}

#[test]
fn green_kernel_reproduces_centre_value() {
    // Δ_S φ dV = Δ φ dA on the disc, so the Euclidean Laplacian serves both.
    for (surface, r) in [(BaseSurface::PLANE, 2.0), (BaseSurface::DISC, 1.5)] {
        let a = 0.8 * surface.euclidean_radius(r).unwrap();
        let v = green_integral(surface, r, |w| Ok(bump_laplacian(a, w)), &cfg()).unwrap();
        assert!((-0.5 * v - 1.0).abs() < 1e-6, "{surface:?}: {v}");
    }
}

#[test]
fn characteristic_of_identity() {
    for r in [1.0, 2.0, 3.0, 4.0] {
        let t = char_t(&z(), BaseSurface::PLANE, r, &cfg()).unwrap();
        let oracle = 0.5 * (1.0 + r * r).ln();
        assert!((t - oracle).abs() < 1e-8 * oracle, "r={r}: {t} vs {oracle}");
    }
}

#[test]
fn characteristic_of_identity_against_one_dimensional_quadrature() {
    // T(r) = ∫₀^r A(t)/t dt with A(t) = t²/(1+t²) the normalized area of the
    // spherical image of the disc of radius t.
    let r = 3.0;
    let oracle = integrate(|t| t / (1.0 + t * t), 0.0, r, &GkConfig::default()).unwrap().value;
    let t = char_t(&z(), BaseSurface::PLANE, r, &cfg()).unwrap();
    assert!((t - oracle).abs() < 1e-8);
    assert!((t - 0.5 * 10f64.ln()).abs() < 0.01 * t);
}

#[test]
fn characteristic_of_constant_vanishes() {
    let t = char_t(&Expr::constant(c(2.0, 1.0)), BaseSurface::PLANE, 3.0, &cfg()).unwrap();
    assert_eq!(t, 0.0);
}

#[test]
fn reciprocal_has_same_characteristic() {
    let a = char_t(&z(), BaseSurface::PLANE, 2.0, &cfg()).unwrap();
    let b = char_t(&z().recip(), BaseSurface::PLANE, 2.0, &cfg()).unwrap();
    assert!((a - b).abs() < 1e-8);
}

#[test]
fn disc_characteristic_uses_euclidean_radius() {
    let r = 2.0;
    let big_r = (0.5f64 * r).tanh();
    let t = char_t(&z(), BaseSurface::DISC, r, &cfg()).unwrap();
    assert!((t - 0.5 * (1.0 + big_r * big_r).ln()).abs() < 1e-9);
}

#[test]
fn tuple_characteristic_reduces_to_single() {
    let f = z().powi(2).add(&Expr::real(1.0));
    let a = char_multi(std::slice::from_ref(&f), BaseSurface::PLANE, 2.0, &cfg()).unwrap();
    let b = char_t(&f, BaseSurface::PLANE, 2.0, &cfg()).unwrap();
    assert!((a - b).abs() < 1e-8 * b);
}

#[test]
fn tuple_characteristic_of_rotated_pair() {
    let pair = [z(), z().mul(&Expr::constant(c(0.0, 1.0)))];
    let a = char_multi(&pair, BaseSurface::PLANE, 3.0, &cfg()).unwrap();
    let b = char_t(&z().mul(&Expr::real(2f64.sqrt())), BaseSurface::PLANE, 3.0, &cfg()).unwrap();
    assert!((a - b).abs() < 1e-8 * b);
    // Closed form ½ log(1 + 2r²).
    assert!((a - 0.5 * 19f64.ln()).abs() < 1e-8);
}

#[test]
fn tuple_characteristic_is_bounded_by_projective_lift() {
    // f = 1/(z−½), g = z/(z−½) lifts to [z − ½ : 1 : z]; the pointwise
    // density of 1 + |f|² + |g|² is the Fubini–Study density of the lift.
    for r in [1.0, 2.0, 4.0] {
        let pair = [shift(0.5).recip(), z().mul(&shift(0.5).recip())];
        let t_multi = char_multi(&pair, BaseSurface::PLANE, r, &cfg()).unwrap();
        let lift = [Expr::real(1.0), z(), shift(0.5)];
        let t_fs = char_projective(&lift, BaseSurface::PLANE, r, &cfg()).unwrap();
        assert!(t_multi <= t_fs + 1e-9 * t_fs);
        assert!((t_fs - t_multi).abs() < 1e-8, "r={r}");
    }
}

#[test]
fn laplacian_density_is_metric_independent() {
    let f = z().exp().add(&z().powi(2));
    for k in 0..12 {
        let w = Complex64::from_polar(0.07 * k as f64, 0.9 * k as f64);
        let (lc, mc) = laplacian_density(BaseSurface::PLANE, std::slice::from_ref(&f), w).unwrap();
        let (ld, md) = laplacian_density(BaseSurface::DISC, std::slice::from_ref(&f), w).unwrap();
        assert!((lc * mc - ld * md).abs() <= 1e-12 * (lc * mc).abs().max(1e-300));
        assert!(md >= 4.0);
    }
}

#[test]
fn simple_zero_is_located() {
    let list = locate_a_points(&shift(0.5), ZERO, BaseSurface::PLANE, 2.0).unwrap();
    assert_eq!(list.provenance, Provenance::ArgumentPrinciple);
    assert_eq!(list.points.len(), 1);
    assert_eq!(list.points[0].multiplicity, 1);
    assert!((list.points[0].z - c(0.5, 0.0)).norm() < 1e-8);
}

#[test]
fn double_zero_has_multiplicity_two() {
    let list = locate_a_points(&shift(0.3).powi(2), ZERO, BaseSurface::PLANE, 2.0).unwrap();
    assert_eq!(list.points.len(), 1);
    assert_eq!(list.points[0].multiplicity, 2);
    assert!((list.points[0].z - c(0.3, 0.0)).norm() < 1e-8);
}

#[test]
fn exponential_has_no_zeros() {
    let list = locate_a_points(&z().exp(), ZERO, BaseSurface::PLANE, 5.0).unwrap();
    assert!(list.points.is_empty());
}

#[test]
fn a_points_and_poles_are_located() {
    // (z² − ¼)/(z − 0.7i) takes the value 0 at ±½ and ∞ at 0.7i.
    let f = z().powi(2).add(&Expr::real(-0.25)).mul(&z().add(&Expr::constant(c(0.0, -0.7))).recip());
    let zeros = locate_a_points(&f, ZERO, BaseSurface::PLANE, 1.5).unwrap();
    assert_eq!(zeros.total_multiplicity(), 2);
    let poles = locate_a_points(&f, Target::Infinity, BaseSurface::PLANE, 1.5).unwrap();
    assert_eq!(poles.points.len(), 1);
    assert!((poles.points[0].z - c(0.0, 0.7)).norm() < 1e-8);
}

#[test]
fn boundary_a_point_is_refused() {
    let err = locate_a_points(&shift(1.0), ZERO, BaseSurface::PLANE, 1.0).unwrap_err();
    assert!(matches!(err, NevanlinnaError::BoundaryZero { .. }));
}

#[test]
fn counting_function_examples() {
    let n = counting_n(&single(c(0.5, 0.0), 1), BaseSurface::PLANE, 2.0, None).unwrap();
    assert!((n - 4f64.ln()).abs() < 1e-15);
    let triple = single(c(0.5, 0.0), 3);
    let n3 = counting_n(&triple, BaseSurface::PLANE, 2.0, None).unwrap();
    let n2 = counting_n(&triple, BaseSurface::PLANE, 2.0, Some(2)).unwrap();
    assert!((n3 - 3.0 * 4f64.ln()).abs() < 1e-14);
    assert!((n2 - 2.0 * 4f64.ln()).abs() < 1e-14);
    assert_eq!(counting_n(&ZeroPoleList::empty(), BaseSurface::PLANE, 2.0, None).unwrap(), 0.0);
    assert_eq!(
        counting_n(&single(c(0.0, 0.0), 1), BaseSurface::PLANE, 2.0, None).unwrap_err(),
        NevanlinnaError::APointAtOrigin
    );
    // Points outside the disc do not count.
    assert_eq!(counting_n(&single(c(3.0, 0.0), 1), BaseSurface::PLANE, 2.0, None).unwrap(), 0.0);
}

#[test]
fn counting_identity_shift() {
    // N(r, 1/(z − ½)) = log(2r).
    for r in [1.0, 2.0, 4.0, 8.0] {
        let list = locate_a_points(&shift(0.5), ZERO, BaseSurface::PLANE, r).unwrap();
        let n = counting_n(&list, BaseSurface::PLANE, r, None).unwrap();
        assert!((n - (2.0 * r).ln()).abs() < 1e-6);
    }
}

#[test]
fn proximity_examples() {
    let m = proximity_m(&z(), Target::Infinity, BaseSurface::PLANE, E, &cfg()).unwrap();
    assert!((m - 1.0).abs() < 1e-12);
    assert_eq!(proximity_m(&z(), Target::Infinity, BaseSurface::PLANE, 0.5, &cfg()).unwrap(), 0.0);
    let m = proximity_m(&z().exp(), Target::Infinity, BaseSurface::PLANE, 6.0, &cfg()).unwrap();
    assert!((m - 6.0 / PI).abs() < 0.02 * 6.0 / PI);
    assert!((m - 6.0 / PI).abs() < 1e-8);
}

#[test]
fn pole_on_boundary_is_refused() {
    for off in [0.0, 4e-4] {
        let f = z().add(&Expr::constant(c(-(1.0 + off), 0.1 * off))).recip();
        let err = proximity_m(&f, Target::Infinity, BaseSurface::PLANE, 1.0, &cfg()).unwrap_err();
        assert!(matches!(err, NevanlinnaError::PoleOnBoundary { .. }));
    }
    // Same for an a-point on the circle with finite target.
    let err = proximity_m(&z(), Target::Finite(c(0.0, 2.0)), BaseSurface::PLANE, 2.0, &cfg()).unwrap_err();
    assert!(matches!(err, NevanlinnaError::PoleOnBoundary { .. }));
    // A pole well inside is fine.
    assert!(proximity_m(&shift(0.5).recip(), Target::Infinity, BaseSurface::PLANE, 1.0, &cfg()).is_ok());
    let err = proximity_m(&shift(1.0).recip(), Target::Infinity, BaseSurface::PLANE, 1.0, &cfg()).unwrap_err();
    assert!(matches!(err, NevanlinnaError::PoleOnBoundary { .. }));
}

#[test]
fn first_main_theorem_for_identity() {
    let a = Target::Finite(c(0.5, 0.0));
    let list = single(c(0.5, 0.0), 1);
    let series = fmt_series(&z(), a, BaseSurface::PLANE, &[2.0, 4.0, 8.0], &list, 0.25, &cfg()).unwrap();
    assert!(!series.growth_flag);
    for row in &series.rows {
        assert!(row.residual <= 0.8);
        assert_eq!(row.m, 0.0);
        let oracle = (2.0 * row.r).ln() - 0.5 * (1.0 + row.r * row.r).ln();
        assert!((row.residual - oracle).abs() < 1e-6);
    }
}

#[test]
fn first_main_theorem_for_constant() {
    let row = fmt_residual(&Expr::real(2.0), ZERO, BaseSurface::PLANE, 3.0, &ZeroPoleList::empty(), &cfg()).unwrap();
    assert_eq!((row.t, row.n), (0.0, 0.0));
    assert!(row.residual < 1.0);
}

#[test]
fn growth_flag_detects_unbalanced_counts() {
    // A deliberately wrong a-point list makes N grow without T.
    let bogus = ZeroPoleList::user((1..=6).map(|k| APoint { z: c(0.1 * k as f64, 0.05), multiplicity: 1 }).collect())
        .unwrap();
    let series = fmt_series(&z().exp(), ZERO, BaseSurface::PLANE, &[1.0, 4.0, 16.0], &bogus, 0.25, &cfg()).unwrap();
    assert!(series.growth_flag);
}

#[test]
fn defect_of_zero_free_function_is_one() {
    let d = defect_estimate(&z().exp(), ZERO, None, BaseSurface::PLANE, &[2.0, 4.0, 6.0, 8.0], &ZeroPoleList::empty(), &cfg())
        .unwrap();
    assert_eq!(d.value, 1.0);
    assert!(!d.clamped);
}

#[test]
fn defect_of_identity_is_small_and_clamped() {
    let a = Target::Finite(c(0.5, 0.0));
    let d = defect_estimate(&z(), a, None, BaseSurface::PLANE, &[8.0, 16.0, 32.0, 64.0], &single(c(0.5, 0.0), 1), &cfg())
        .unwrap();
    // N − T → log 2 > 0, so the raw surrogate dips below zero; the largest
    // ratio log 16 / ½log 65 sits at the first radius.
    let oracle = 1.0 - 16f64.ln() / (0.5 * 65f64.ln());
    assert!((d.raw - oracle).abs() < 1e-6, "{}", d.raw);
    assert_eq!(d.value, 0.0);
    assert!(d.clamped);
}

#[test]
fn defect_needs_four_radii() {
    let err = defect_estimate(&z(), ZERO, None, BaseSurface::PLANE, &[1.0, 2.0, 3.0], &ZeroPoleList::empty(), &cfg())
        .unwrap_err();
    assert!(matches!(err, NevanlinnaError::InvalidSchedule(_)));
}

fn power_rule_function() -> Expr {
    z().exp().mul(&shift(0.3))
}

#[test]
fn truncated_defects_of_powers() {
    let schedule = [8.0, 12.0, 16.0, 20.0];
    for m in [3u32, 5] {
        let fm = power_rule_function().powi(m as i32);
        let list = single(c(0.3, 0.0), m);
        let mf = m as f64;
        let d1 = defect_estimate(&fm, ZERO, Some(1), BaseSurface::PLANE, &schedule, &list, &cfg()).unwrap();
        let d2 = defect_estimate(&fm, ZERO, Some(2), BaseSurface::PLANE, &schedule, &list, &cfg()).unwrap();
        let d = defect_estimate(&fm, ZERO, None, BaseSurface::PLANE, &schedule, &list, &cfg()).unwrap();
        assert!(d1.value >= 1.0 - 1.0 / mf - 0.05, "m={m}: {}", d1.value);
        assert!(d2.value >= 1.0 - 2.0 / mf - 0.05, "m={m}: {}", d2.value);
        assert!(0.0 <= d.value && d.value <= d2.value && d2.value <= d1.value && d1.value <= 1.0);
    }
}

#[test]
fn growth_ratio_on_plane_is_zero() {
    let t = holo_equal(3, 2, &[c(0.5, 0.0)]).unwrap();
    for r in [1.0, 2.0, 3.0] {
        assert_eq!(growth_ratio(&t.exprs, BaseSurface::PLANE, r, &cfg()).unwrap(), 0.0);
    }
}

#[test]
fn growth_ratio_on_disc_is_negative_and_decreasing() {
    let t = holo_equal(3, 2, &[c(0.5, 0.0)]).unwrap();
    let ratios: Vec<f64> = [1.0, 2.0, 3.0]
        .iter()
        .map(|&r| growth_ratio(&t.exprs, BaseSurface::DISC, r, &cfg()).unwrap())
        .collect();
    assert!(ratios.iter().all(|v| *v <= 0.0));
    assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{ratios:?}");
}

#[test]
fn wronskian_examples() {
    let exps = [z().exp(), z().mul(&Expr::real(2.0)).exp()];
    assert!((wronskian_value(&exps, c(0.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
    let dep = [z().exp(), z().exp().mul(&Expr::real(2.0))];
    assert!(wronskian_value(&dep, c(0.3, 0.2)).unwrap().norm() < 1e-13);
    let monomials = [z(), z().powi(2), z().powi(3)];
    assert!((wronskian_value(&monomials, c(1.0, 0.0)).unwrap() - c(2.0, 0.0)).norm() < 1e-13);
    let err = wronskian_value(&[z().recip(), z()], c(0.0, 0.0)).unwrap_err();
    assert!(matches!(err, NevanlinnaError::PoleAtBasePoint { .. }));
}

fn exp_syzygy() -> Vec<Expr> {
    // e^z + z − ½, −e^z, ½ − z: sums to zero with no zero at the origin.
    vec![z().exp().add(&shift(0.5)), z().exp().neg(), shift(0.5).neg()]
}

#[test]
fn lemma_check_on_exponential_syzygy() {
    let rep = lemma_defect_check(&exp_syzygy(), BaseSurface::PLANE, &[8.0, 12.0, 16.0, 20.0], None, 3, 0.05, &cfg())
        .unwrap();
    assert_eq!(rep.n, 2);
    assert!(rep.pass);
    assert!(rep.sum <= 2.05);
    match rep.case {
        LemmaCase::Independent { cramer_residual } => assert!(cramer_residual <= 1e-8),
        other => panic!("{other:?}"),
    }
    // −e^z omits 0 entirely.
    assert_eq!(rep.defects[1].value, 1.0);
}

#[test]
fn lemma_check_routes_dependent_family() {
    let fam = [z(), z().mul(&Expr::real(2.0)), z().mul(&Expr::real(-3.0))];
    let lists = vec![ZeroPoleList::empty(); 3];
    let rep = lemma_defect_check(&fam, BaseSurface::PLANE, &[2.0, 3.0, 4.0, 5.0], Some(&lists), 1, 0.05, &cfg()).unwrap();
    assert_eq!(rep.case, LemmaCase::Dependent { independent: vec![0] });
}

#[test]
fn lemma_check_rejects_non_syzygy() {
    let fam = [z().exp(), z()];
    let err = lemma_defect_check(&fam, BaseSurface::PLANE, &[2.0, 3.0, 4.0, 5.0], None, 1, 0.05, &cfg()).unwrap_err();
    assert!(matches!(err, NevanlinnaError::NotASyzygy { .. }));
}

#[test]
fn logarithmic_derivative_examples() {
    let q = z().powi(2).exp();
    let rows = logderiv_check(&q, 1, BaseSurface::PLANE, &[2.0, 4.0, 8.0], 2.0, &cfg()).unwrap();
    for row in &rows {
        assert!(!row.violation, "{row:?}");
        assert!((row.m - (2.0 * row.r).ln()).abs() < 1e-8);
    }
    let rows = logderiv_check(&z().exp(), 1, BaseSurface::PLANE, &[2.0, 4.0], 2.0, &cfg()).unwrap();
    assert!(rows.iter().all(|r| r.m < 1e-12));
    let rows = logderiv_check(&z(), 1, BaseSurface::PLANE, &[1.0, 2.0, 5.0], 2.0, &cfg()).unwrap();
    assert!(rows.iter().all(|r| r.m < 1e-12));
}

#[test]
fn small_coefficients_keep_full_defect_at_infinity() {
    let alphas = [z().powi(2).add(&Expr::real(0.5)), Expr::real(1.5)];
    let fs = [z().exp(), z().mul(&Expr::real(2.0)).exp()];
    let rep = small_function_check(&alphas, &fs, BaseSurface::PLANE, &[4.0, 6.0, 8.0, 10.0], 0.05, &cfg()).unwrap();
    assert!(rep.pass);
    assert!(rep.defects.iter().all(|d| (d.value - 1.0).abs() <= 0.05));
}

#[test]
fn report_rows_are_consistent() {
    let a = Target::Finite(c(0.5, 0.0));
    let rep = report(&z(), a, Some(1), BaseSurface::DISC, &[0.5, 1.0, 2.0, 3.0], &single(c(0.2, 0.0), 1), &cfg()).unwrap();
    assert_eq!(rep.rows.len(), 4);
    for row in &rep.rows {
        assert!((row.fmt_residual - (row.t - row.m - row.n).abs()).abs() < 1e-12);
        assert!(row.growth_ratio <= 0.0);
        assert!(row.n_k <= row.n);
    }
    assert!(rep.defect.is_some());
}

fn poly(a: (f64, f64), b: (f64, f64), k: (f64, f64)) -> Expr {
    z().powi(2).mul(&Expr::constant(c(a.0, a.1))).add(&z().mul(&Expr::constant(c(b.0, b.1)))).add(&Expr::constant(c(k.0, k.1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn characteristic_is_nonnegative_and_nondecreasing(
        a in (0.2f64..2.0, -1.0f64..1.0), b in (-1.0f64..1.0, -1.0f64..1.0), k in (-1.0f64..1.0, -1.0f64..1.0),
        disc in any::<bool>(),
    ) {
        let f = poly(a, b, k);
        let surface = if disc { BaseSurface::DISC } else { BaseSurface::PLANE };
        let mut prev = 0.0;
        for r in [0.5, 1.0, 2.0, 3.0] {
            let t = char_t(&f, surface, r, &cfg()).unwrap();
            prop_assert!(t >= prev - 1e-12);
            prev = t;
            let m = proximity_m(&f, Target::Infinity, surface, r, &cfg()).unwrap();
            prop_assert!(m >= 0.0);
        }
    }

    #[test]
    fn defect_sandwich(m in 2u32..6, shift_re in 0.2f64..0.9, k in 1u32..4) {
        let f = z().exp().mul(&shift(shift_re)).powi(m as i32);
        let list = single(c(shift_re, 0.0), m);
        let schedule = [4.0, 6.0, 8.0, 10.0];
        let d = defect_estimate(&f, ZERO, None, BaseSurface::PLANE, &schedule, &list, &cfg()).unwrap();
        let dk = defect_estimate(&f, ZERO, Some(k), BaseSurface::PLANE, &schedule, &list, &cfg()).unwrap();
        let d1 = defect_estimate(&f, ZERO, Some(1), BaseSurface::PLANE, &schedule, &list, &cfg()).unwrap();
        prop_assert!(0.0 <= d.value && d.value <= dk.value && dk.value <= d1.value && d1.value <= 1.0);
        for n in &dk.counting {
            prop_assert!(*n >= 0.0);
        }
    }
}
