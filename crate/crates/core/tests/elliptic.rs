use std::f64::consts::PI;

use fermatlab_core::elliptic::{e1, equianharmonic_periods, laurent_coefficients, EquianharmonicWeierstrass};
use fermatlab_core::expr::{residual, EvalResult, Expr};
use num_complex::Complex64;
use statrs::function::gamma::gamma;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Independent quadrature of `∫_{e1}^{∞} dt/√(4t³−1)` via `t = e1 + s²`,
/// `s = x/(1−x)`, composite Simpson on `[0, 1]`.
fn half_period_oracle() -> f64 {
    let e = e1();
    let f = |x: f64| {
        if x >= 1.0 {
            return 1.0;
        }
        let s = x / (1.0 - x);
        let t = e + s * s;
        let q = 4.0 * (t * t + t * e + e * e);
        2.0 / q.sqrt() / ((1.0 - x) * (1.0 - x))
    };
    let n = 20_000;
    let h = 1.0 / n as f64;
    let mut acc = f(0.0) + f(1.0);
    for i in 1..n {
        acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

#[test]
fn real_half_period_matches_oracles() {
    let (w1, w2) = equianharmonic_periods();
    let quad = half_period_oracle();
    assert!((w1.re - quad).abs() < 1e-8, "{} vs {quad}", w1.re);
    let closed = gamma(1.0 / 3.0).powi(3) / (4.0 * PI);
    assert!((w1.re - closed).abs() < 1e-12, "{} vs {closed}", w1.re);
    assert!((w1.re - 1.529_954_037_057_193).abs() < 1e-12);
    assert_eq!(w1.im, 0.0);
    assert!((w2 - w1 * Complex64::from_polar(1.0, PI / 3.0)).norm() < 1e-15);
}

#[test]
fn lattice_sum_gives_g3_equal_one() {
    // g3 = 140 Σ' w⁻⁶ over the lattice 2ω₁ℤ + 2ω₂ℤ.
    let (w1, w2) = equianharmonic_periods();
    let mut g6 = c(0.0, 0.0);
    let m = 150i32;
    for a in -m..=m {
        for b in -m..=m {
            if a == 0 && b == 0 {
                continue;
            }
            let w = 2.0 * w1 * a as f64 + 2.0 * w2 * b as f64;
            g6 += w.powi(-6);
        }
    }
    let g3 = 140.0 * g6;
    assert!((g3 - 1.0).norm() < 1e-9, "{g3}");
    // g2 = 60 Σ' w⁻⁴ vanishes by symmetry.
}

#[test]
fn laurent_coefficients_match_independent_recursion() {
    // From ℘'' = 6℘²: (2k(2k−1) − 12) c_k = 6 Σ_{i+j=k−1} c_i c_j, c₂ = g₃/28.
    let count = 40;
    let mut oracle = vec![0.0f64; count + 1];
    oracle[2] = 1.0 / 28.0;
    for k in 3..=count {
        let s: f64 = (1..k - 1).map(|i| oracle[i] * oracle[k - 1 - i]).sum();
        oracle[k] = 6.0 * s / ((2 * k * (2 * k - 1) - 12) as f64);
    }
    let got = laurent_coefficients(count);
    for k in 1..=count {
        let (g, o) = (got[k - 1], oracle[k]);
        assert!((g - o).abs() <= 1e-14 * o.abs().max(1e-300), "k={k}: {g} vs {o}");
    }
    assert!((got[4] - 1.0 / 10192.0).abs() < 1e-18);
}

#[test]
fn wp_near_origin_matches_leading_laurent() {
    let ctx = EquianharmonicWeierstrass::default();
    let z = c(0.1, 0.0);
    let EvalResult::Finite(p) = ctx.wp(z) else { panic!() };
    let diff = p - z.powi(-2);
    assert!((diff - z.powi(4) / 28.0).norm() < 1e-12, "{diff}");
    assert!((diff.re - 3.57e-6).abs() < 1e-8);
}

fn grid_away_from_lattice(ctx: &EquianharmonicWeierstrass, count: usize) -> Vec<Complex64> {
    let mut pts = Vec::new();
    let mut i = 0u32;
    while pts.len() < count {
        // deterministic quasi-random points in |Re|,|Im| < 4
        let a = ((i as f64) * 0.618_033_988_75).fract();
        let b = ((i as f64) * 0.754_877_666_25).fract();
        let z = c(8.0 * a - 4.0, 8.0 * b - 4.0);
        let (_, u) = ctx.reduce(z);
        if u.norm() >= 0.3 {
            pts.push(z);
        }
        i += 1;
    }
    pts
}

#[test]
fn ode_residual_on_grid() {
    let ctx = EquianharmonicWeierstrass::default();
    let mut worst = 0.0f64;
    for z in grid_away_from_lattice(&ctx, 100) {
        let (p, dp) = ctx.wp_pair(z).unwrap();
        worst = worst.max((dp * dp - 4.0 * p * p * p + 1.0).norm());
    }
    assert!(worst <= 1e-9, "{worst}");
    let (p, dp) = ctx.wp_pair(c(0.7, 0.2)).unwrap();
    assert!((dp * dp - 4.0 * p * p * p + 1.0).norm() <= 1e-9);
}

#[test]
fn periodicity_parity_and_rotation() {
    let ctx = EquianharmonicWeierstrass::default();
    let (w1, w2) = ctx.half_periods();
    let rho = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    for z in grid_away_from_lattice(&ctx, 40) {
        let (p, dp) = ctx.wp_pair(z).unwrap();
        let (p1, _) = ctx.wp_pair(z + 2.0 * w1).unwrap();
        let (p2, _) = ctx.wp_pair(z + 2.0 * w2).unwrap();
        assert!((p1 - p).norm() <= 1e-8 && (p2 - p).norm() <= 1e-8);
        let (pm, dpm) = ctx.wp_pair(-z).unwrap();
        assert!((pm - p).norm() <= 1e-10 * p.norm().max(1.0));
        assert!((dpm + dp).norm() <= 1e-10 * dp.norm().max(1.0));
        let (pr, _) = ctx.wp_pair(rho * z).unwrap();
        assert!((pr - rho * p).norm() <= 1e-9 * p.norm().max(1.0));
    }
    let z = c(0.3, 0.0);
    let d = ctx.wp_pair(rho * z).unwrap().0 - rho * ctx.wp_pair(z).unwrap().0;
    assert!(d.norm() <= 1e-9);
}

#[test]
fn reduction_agrees_with_direct_laurent_sum() {
    // Points beyond the reduction boundary but inside the Laurent disc.
    let ctx = EquianharmonicWeierstrass::default();
    let coeffs = laurent_coefficients(200);
    for z in [c(1.6, 0.0), c(0.9, 1.2), c(-1.1, -1.0), c(0.2, 1.7)] {
        let w = z * z;
        let direct = z.powi(-2)
            + coeffs
                .iter()
                .enumerate()
                .map(|(i, ck)| ck * w.powu(i as u32 + 1))
                .sum::<Complex64>();
        let (p, _) = ctx.wp_pair(z).unwrap();
        assert!((p - direct).norm() < 1e-10 * direct.norm(), "{z}: {p} vs {direct}");
    }
}

#[test]
fn half_period_values() {
    let ctx = EquianharmonicWeierstrass::default();
    let (w1, _) = ctx.half_periods();
    let (p, dp) = ctx.wp_pair(w1).unwrap();
    assert!(dp.norm() < 1e-10);
    assert!((p.re - 4f64.powf(-1.0 / 3.0)).abs() < 1e-12);
}

#[test]
fn baker_pair_identity() {
    let ctx = EquianharmonicWeierstrass::default();
    let b = ctx.baker_pair(c(0.4, 0.1)).unwrap();
    assert!((b.p.powu(3) + b.q.powu(3) - 1.0).norm() <= 1e-9);
    for z in grid_away_from_lattice(&ctx, 50) {
        if let Ok(b) = ctx.baker_pair(z) {
            let r = (b.p.powu(3) + b.q.powu(3) - 1.0).norm();
            assert!(r <= 1e-9, "{z}: {r}");
        }
    }
    assert!(ctx.baker_pair(c(1e-15, 0.0)).is_err());
}

#[test]
fn baker_composed_with_square() {
    let (g1, g2) = fermatlab_core::solutions::baker_gammas();
    let alpha = Expr::var().powi(2);
    let f = [g1.compose(&alpha), g2.compose(&alpha)];
    let r = residual(&f, &[3, 3], None, c(0.5, 0.0)).unwrap();
    assert!(r <= 1e-9, "{r}");
}
