use nalgebra::{Vector2, Vector3};
use proptest::prelude::*;

use super::*;
use crate::example_maps::{Example1, Example2, FatouH};
use crate::linalg::singular_values;
use crate::test_support::global_map;
use crate::zorich::f_jacobian;

fn axis_recurrence(t0: f64, l_prime: f64, n: usize) -> Vec<f64> {
    let mut t = vec![t0];
    for _ in 0..n {
        let last = *t.last().unwrap();
        t.push(last + last.exp() - l_prime);
    }
    t
}

#[test]
fn translation_law_in_identity_region() {
    let f = global_map();
    let x0 = Vector3::new(0.0, 0.0, -5.0);
    let rec = iterate(f, &x0, &IterateConfig::new(1000).through_entry());
    assert_eq!(rec.entered, Some(0));
    assert_eq!(rec.points.len(), 1001);
    for (k, p) in rec.points.iter().enumerate() {
        let expect = x0 - Vector3::new(0.0, 0.0, k as f64 * f.l_prime);
        assert!((p - expect).norm() <= 1e-12 * expect.norm());
    }
    let stopped = iterate(f, &x0, &IterateConfig::new(10));
    assert_eq!(stopped.termination, Termination::Entered(0));
}

#[test]
fn axis_orbit_follows_tower() {
    let f = global_map();
    let t0 = f.level + 1.0;
    let rec = iterate(f, &Vector3::new(0.0, 0.0, t0), &IterateConfig::new(10));
    let oracle = axis_recurrence(t0, f.l_prime, 2);
    assert_eq!(rec.points.len(), 3);
    for (p, t) in rec.points.iter().zip(&oracle) {
        assert_eq!((p.x, p.y), (0.0, 0.0));
        assert!((p.z - t).abs() <= 1e-9 * t);
    }
    // The third step no longer fits in a float; its logarithm does.
    assert_eq!(rec.log_from, Some(3));
    assert!((rec.rho[3] - oracle[2]).abs() <= 1e-9 * oracle[2]);
    assert_eq!(rec.rho[4], f64::INFINITY);
    assert!(matches!(rec.termination, Termination::ExceededRadius(4)));
}

#[test]
fn classification_examples() {
    let f = global_map();
    let l = f.level;
    assert_eq!(classify_escape(f, &Vector3::new(0.0, 0.0, -1.0), 50), EscapeClass::QuasiFatouProxy(0));
    assert_eq!(classify_escape(f, &Vector3::new(0.0, 0.0, l + 1.0), 50), EscapeClass::RadialEscape);
    assert_eq!(classify_escape(f, &Vector3::new(2.0, 2.0, l + 3.0), 50), EscapeClass::RadialEscape);
    // On x₁ = 2 the fold flips the pyramid, so F pushes straight down.
    assert_eq!(classify_escape(f, &Vector3::new(2.0, 0.0, l + 1.0), 50), EscapeClass::QuasiFatouProxy(1));
    assert_eq!(classify_escape(&|x: &Vector3<f64>| *x, &Vector3::new(1.0, 1.0, 1.0), 7), EscapeClass::Undecided(7));
}

#[test]
fn fatou_rates_tend_to_zero() {
    let rec = iterate(&FatouH, &Vector2::new(5.0, 0.0), &IterateConfig::new(1000));
    let a = escape_rate_series(&rec, 1);
    assert_eq!(a.len(), 1000);
    assert!(a[999] < 0.01, "{}", a[999]);
    assert_eq!(rates_from_rho(&rec.rho, 10).len(), 100);
}

#[test]
fn translation_orbit_rates_vanish() {
    let f = global_map();
    let rec = iterate(f, &Vector3::new(1.0, 1.0, -1.0), &IterateConfig::new(400).through_entry());
    let a = escape_rate_series(&rec, 1);
    assert!(a[399] < 0.01);
}

#[test]
fn log_domain_matches_direct_example_two() {
    let f = global_map();
    let g = Example2::new(f);
    let x0 = Vector3::new(0.3, -0.4, -2.0);
    let direct = iterate(&g, &x0, &IterateConfig::new(8));
    let kind = g.log_kind(&x0).unwrap();
    let logs = log_domain_series(&kind, LogState::from_point(&x0), 8).unwrap();
    assert!(direct.log_from.is_none_or(|k| k > 8));
    for (d, l) in direct.rho.iter().zip(&logs) {
        assert!((d - l).abs() <= 1e-9 * d.abs().max(1.0), "{d} vs {l}");
    }
}

#[test]
fn log_domain_matches_direct_example_one() {
    let z0 = Vector2::new(1f64.exp(), 0.0);
    let direct = iterate(&Example1, &z0, &IterateConfig::new(8));
    let kind = Example1.log_kind(&z0).unwrap();
    // e^{−|z|z} is not negligible at the start point
    assert!(kind.check(&LogState::from_point(&z0)).is_err());
    let start = 2;
    let logs = log_domain_series(&kind, LogState::from_point(&direct.points[start]), 8 - start).unwrap();
    for (d, l) in direct.rho[start..].iter().zip(&logs) {
        assert!((d - l).abs() <= 1e-9 * d.abs(), "{d} vs {l}");
    }
}

#[test]
fn example_two_log_series_converges() {
    let f = global_map();
    let g = Example2::new(f);
    let x0 = Vector3::new(0.0, 0.0, -3f64.exp());
    let kind = g.log_kind(&x0).unwrap();
    let rho = log_domain_series(&kind, LogState::from_point(&x0), 30).unwrap();
    let limit = rho[30] / 2f64.powi(30);
    for k in 10..=30 {
        assert!((rho[k] / 2f64.powi(k as i32) / limit - 1.0).abs() <= 1e-12);
    }
    let corrections = square_corrections(&rho);
    assert!(corrections[0] > 0.0 && corrections[12] == 0.0);
    assert!(limit > 3.0);
}

#[test]
fn modulus_estimates() {
    let f = global_map();
    for r in [10.0, 20.0] {
        let m = max_modulus_estimate(f, r, 1000, 3);
        assert!(m >= r + r.exp() - f.l_prime);
    }
    let table = modulus_table(f, &[10.0, 20.0, 40.0], 1000, 3);
    let ratios: Vec<f64> = table.radii.iter().zip(&table.estimates).map(|(r, m)| m.ln() / r.ln()).collect();
    assert!(ratios.windows(2).all(|w| w[1] > w[0]), "{ratios:?}");

    let shift = |x: &Vector3<f64>| x - Vector3::new(0.0, 0.0, f.l_prime);
    for r in [1.0, 50.0] {
        assert!(max_modulus_estimate(&shift, r, 1000, 3) <= r + f.l_prime);
    }
    let coarse = max_modulus_estimate(f, 12.0, 1000, 5);
    let fine = max_modulus_estimate(f, 12.0, 3000, 5);
    assert!(fine >= coarse);
}

#[test]
fn fast_escape_examples() {
    let f = global_map();
    let r = f.level + 1.0;
    let axis = fast_escape_test(f, &Vector3::new(0.0, 0.0, f.level + 1.0), r, 3, 5, 1000, 0).unwrap();
    assert!(matches!(axis, FastEscape::Fast { ell, .. } if ell <= 2), "{axis:?}");
    let julia = fast_escape_test(f, &Vector3::new(2.0, 2.0, f.level + 3.0), r, 3, 5, 1000, 0).unwrap();
    assert!(matches!(julia, FastEscape::Fast { .. }));
    let slow = fast_escape_test(f, &Vector3::new(0.0, 0.0, -1.0), r, 3, 5, 1000, 0).unwrap();
    assert!(matches!(slow, FastEscape::NotObservedFast { .. }));
}

#[test]
fn ball_growth() {
    let f = global_map();
    let xi = Vector3::new(0.2, 0.1, f.level + 2.0);
    assert!(ball_growth_check(f, &xi, 0.1, 2000, 1).unwrap() >= 32.0);
    let ell = singular_values(&f_jacobian(&xi).matrix)[2];
    let small = ball_growth_check(f, &xi, 1e-4, 5000, 1).unwrap();
    assert!(small / ell - 1.0 > -1e-3 && small / ell - 1.0 < 0.05, "{small} vs {ell}");
    assert!(ball_growth_check(f, &Vector3::new(0.2, 0.1, -3.0), 0.1, 10, 1).is_err());
    assert!(ball_growth_check(f, &Vector3::new(0.95, 0.1, f.level + 2.0), 0.1, 10, 1).is_err());
}

#[test]
fn orbit_csv() {
    let f = global_map();
    let rec = iterate(f, &Vector3::new(0.0, 0.0, -1.0), &IterateConfig::new(10).through_entry());
    let mut out = Vec::new();
    write_orbit_csv(&mut out, &rec, "quasi-fatou(0)").unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,x1,x2,x3,rho,a_k,class");
    assert_eq!(lines.len(), 12);
    for (k, line) in lines[1..].iter().enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        let x3: f64 = cols[3].parse().unwrap();
        assert!((x3 - (-1.0 - k as f64 * f.l_prime)).abs() <= 1e-12 * x3.abs());
    }
    let mut out = Vec::new();
    write_rates_csv(&mut out, &rec.rho, 2).unwrap();
    assert_eq!(String::from_utf8(out).unwrap().lines().count(), 7);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entry_is_permanent(x in -6.0..6.0f64, y in -6.0..6.0f64, t in 0.0..1.2f64) {
        let f = global_map();
        let p = Vector3::new(x, y, t * (f.level + 2.0));
        if let EscapeClass::QuasiFatouProxy(n) = classify_escape(f, &p, 20) {
            let rec = iterate(f, &p, &IterateConfig::new(n + 10).through_entry());
            prop_assert!(rec.points[n..].iter().all(|q| q.z < 0.0));
        }
    }
}
