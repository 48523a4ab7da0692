//! Worked examples: Fatou's function `h(z) = z + e^{−z} + 1`, the radial
//! square `φ(x) = |x|x`, and the three compositions built from them.

use nalgebra::{Matrix2, SVector, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::construction::{GlobalMap, Mode};
use crate::dynamics::{LogKind, OrbitMap, SquareRegime};
use crate::error::{Error, Result};
use crate::linalg::{central_jacobian, dilatation};

/// `h(z) = z + e^{−z} + 1` on `z = x₁ + i x₂`.
pub fn fatou_h_eval(x: &Vector2<f64>) -> Vector2<f64> {
    let e = (-x.x).exp();
    Vector2::new(x.x + e * x.y.cos() + 1.0, x.y - e * x.y.sin())
}

pub fn radial_square_eval<const D: usize>(x: &SVector<f64, D>) -> SVector<f64, D> {
    x * x.norm()
}

#[derive(Clone, Copy, Debug, Default)]
pub struct FatouH;

impl OrbitMap<2> for FatouH {
    fn eval(&self, x: &Vector2<f64>) -> Vector2<f64> {
        fatou_h_eval(x)
    }
}

/// `h ∘ φ` in the plane.
#[derive(Clone, Copy, Debug, Default)]
pub struct Example1;

impl OrbitMap<2> for Example1 {
    fn eval(&self, x: &Vector2<f64>) -> Vector2<f64> {
        fatou_h_eval(&radial_square_eval(x))
    }

    fn log_kind(&self, _x: &Vector2<f64>) -> Option<LogKind<2>> {
        Some(LogKind::RadialSquareTranslate { shift: Vector2::new(1.0, 0.0), regime: SquareRegime::RightHalfPlane })
    }
}

/// `G = f ∘ φ` in space.
#[derive(Clone, Debug)]
pub struct Example2 {
    pub f: GlobalMap<f64>,
}

impl Example2 {
    pub fn new(f: &GlobalMap<f64>) -> Self {
        Self { f: f.with_mode(Mode::F) }
    }
}

impl OrbitMap<3> for Example2 {
    fn eval(&self, x: &Vector3<f64>) -> Vector3<f64> {
        self.f.eval(&radial_square_eval(x))
    }

    fn log_kind(&self, _x: &Vector3<f64>) -> Option<LogKind<3>> {
        Some(LogKind::RadialSquareTranslate {
            shift: Vector3::new(0.0, 0.0, -self.f.l_prime),
            regime: SquareRegime::LowerHalfSpace,
        })
    }
}

/// A ball in `{x₃ < 0}` and its radial recentering.
///
/// The recentering is the radial extension of the identity on the sphere
/// `∂f(C)`, from the star centre `f(x₀)` to the star centre `x₀`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PatchMap {
    pub c_centre: Vector3<f64>,
    pub radius: f64,
    /// Centre of the translated ball `f(C)`.
    pub image_centre: Vector3<f64>,
    pub x0: Vector3<f64>,
    /// `f(x₀)`, the domain star centre.
    pub a: Vector3<f64>,
}

/// Exit point of the ray from `a` through `x` on the sphere `|y − c| = r`.
/// `a` must lie inside the ball.
fn sphere_hit(c: &Vector3<f64>, r: f64, a: &Vector3<f64>, x: &Vector3<f64>) -> Vector3<f64> {
    let d = (x - a).normalize();
    let w = a - c;
    let b = w.dot(&d);
    let s = -b + (b * b - w.norm_squared() + r * r).sqrt();
    a + d * s
}

impl PatchMap {
    pub fn contains(&self, x: &Vector3<f64>) -> bool {
        (x - self.image_centre).norm() < self.radius
    }

    pub fn eval(&self, x: &Vector3<f64>) -> Vector3<f64> {
        if !self.contains(x) {
            return *x;
        }
        let d = (x - self.a).norm();
        if d == 0.0 {
            return self.x0;
        }
        let hit = sphere_hit(&self.image_centre, self.radius, &self.a, x);
        let t = d / (hit - self.a).norm();
        self.x0 + (hit - self.x0) * t
    }

    pub fn inverse(&self, y: &Vector3<f64>) -> Vector3<f64> {
        if !self.contains(y) {
            return *y;
        }
        let d = (y - self.x0).norm();
        if d == 0.0 {
            return self.a;
        }
        let hit = sphere_hit(&self.image_centre, self.radius, &self.x0, y);
        let t = d / (hit - self.x0).norm();
        self.a + (hit - self.a) * t
    }
}

/// `C = B((0, 0, −1.1 L′), L′)`, `x₀ = (0, 0, −1.6 L′)`.
pub fn build_patch(f: &GlobalMap<f64>) -> Result<PatchMap> {
    let lp = f.l_prime;
    let c_centre = Vector3::new(0.0, 0.0, -1.1 * lp);
    let radius = lp;
    let image_centre = c_centre - Vector3::new(0.0, 0.0, lp);
    let x0 = Vector3::new(0.0, 0.0, -1.6 * lp);
    if c_centre.z + radius >= 0.0 {
        return Err(Error::Construction("C is not contained in {x₃ < 0}".into()));
    }
    if !((x0 - c_centre).norm() < radius && (x0 - image_centre).norm() < radius) {
        return Err(Error::Construction("x₀ is not in C ∩ f(C)".into()));
    }
    let a = x0 - Vector3::new(0.0, 0.0, lp);
    Ok(PatchMap { c_centre, radius, image_centre, x0, a })
}

/// `φ_patch ∘ f`.
#[derive(Clone, Debug)]
pub struct Example3 {
    pub f: GlobalMap<f64>,
    pub patch: PatchMap,
}

impl Example3 {
    pub fn new(f: &GlobalMap<f64>) -> Result<Self> {
        let f = f.with_mode(Mode::F);
        let patch = build_patch(&f)?;
        Ok(Self { f, patch })
    }
}

impl OrbitMap<3> for Example3 {
    fn eval(&self, x: &Vector3<f64>) -> Vector3<f64> {
        self.patch.eval(&self.f.eval(x))
    }

    fn absorbing(&self, x: &Vector3<f64>) -> bool {
        x.z < 0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DilatationOracle {
    pub k_i: f64,
    pub k_o: f64,
    /// Largest deviation of the finite-difference values from the analytic ones.
    pub max_deviation: f64,
    pub samples: usize,
}

/// Dilatation of `φ(x) = |x|x`. Its singular values are `|x|` (tangential)
/// and `2|x|` (radial), so `K_I = 2` and `K_O = 2^{d−1}`.
pub fn radial_power_dilatation_oracle(dim: usize, samples: usize, seed: u64) -> Result<DilatationOracle> {
    let (k_i, k_o) = match dim {
        2 => (2.0, 2.0),
        3 => (2.0, 4.0),
        _ => return Err(Error::Precondition(format!("dimension {dim} not in {{2, 3}}"))),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dev = 0.0f64;
    for _ in 0..samples {
        let r = rng.random_range(0.1..10.0);
        let (ki, ko) = if dim == 2 {
            let t = rng.random_range(0.0..std::f64::consts::TAU);
            let x = Vector2::new(t.cos(), t.sin()) * r;
            let h = 1e-6 * r;
            let col = |e: Vector2<f64>| (radial_square_eval(&(x + e)) - radial_square_eval(&(x - e))) / (2.0 * h);
            let j = Matrix2::from_columns(&[col(Vector2::new(h, 0.0)), col(Vector2::new(0.0, h))]);
            let s = j.singular_values();
            let (hi, lo) = (s.max(), s.min());
            let det = j.determinant();
            (det / (lo * lo), hi * hi / det)
        } else {
            let v = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let x = v.normalize() * r;
            let (ko, ki) = dilatation(&central_jacobian(radial_square_eval, &x, 1e-6 * r));
            (ki, ko)
        };
        dev = dev.max((ki - k_i).abs()).max((ko - k_o).abs());
    }
    Ok(DilatationOracle { k_i, k_o, max_deviation: dev, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{classify_escape, escape_rate_series, iterate, EscapeClass, IterateConfig};
    use crate::test_support::global_map;
    use proptest::{prop_assert, proptest};
    use std::f64::consts::PI;

    #[test]
    fn fatou_h_values() {
        assert_eq!(fatou_h_eval(&Vector2::new(0.0, 0.0)), Vector2::new(2.0, 0.0));
        let y = fatou_h_eval(&Vector2::new(20.0, 0.0));
        assert!((y - Vector2::new(21.0, 0.0)).norm() < 1e-8);
        let y = fatou_h_eval(&Vector2::new(0.0, PI));
        assert!((y - Vector2::new(0.0, PI)).norm() < 1e-15);
        for i in 0..=100 {
            let z = Vector2::new(5.0 + 0.25 * i as f64, 0.7 * i as f64);
            assert!((fatou_h_eval(&z) - z - Vector2::new(1.0, 0.0)).norm() <= (-5f64).exp() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn radial_square_values() {
        assert_eq!(radial_square_eval(&Vector3::new(0.0, 0.0, 2.0)), Vector3::new(0.0, 0.0, 4.0));
        assert_eq!(radial_square_eval(&Vector3::<f64>::zeros()), Vector3::zeros());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let x = Vector3::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            if x.norm() < 1e-3 {
                continue;
            }
            let j = central_jacobian(radial_square_eval, &x, 1e-6);
            assert!(j.determinant() > 0.0);
        }
    }

    #[test]
    fn dilatation_oracle() {
        let d2 = radial_power_dilatation_oracle(2, 1000, 1).unwrap();
        let d3 = radial_power_dilatation_oracle(3, 1000, 1).unwrap();
        assert_eq!((d2.k_i, d3.k_i, d3.k_o), (2.0, 2.0, 4.0));
        assert!(d2.max_deviation < 1e-5 && d3.max_deviation < 1e-5, "{d2:?} {d3:?}");
        assert!(radial_power_dilatation_oracle(4, 1, 1).is_err());
    }

    #[test]
    fn patch_geometry() {
        let f = global_map();
        let p = build_patch(f).unwrap();
        let lp = f.l_prime;
        assert!((p.c_centre.z + p.radius - (-0.1 * lp)).abs() < 1e-12 * lp);
        assert!((p.c_centre.z - p.radius - (-2.1 * lp)).abs() < 1e-12 * lp);
        assert_eq!(p.eval(&p.a), p.x0);
        let far = p.image_centre + Vector3::new(1.0001 * p.radius, 0.0, 0.0);
        assert_eq!(p.eval(&far), far);
    }

    #[test]
    fn patch_is_continuous_and_invertible() {
        let f = global_map();
        let p = build_patch(f).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut worst_seam = 0.0f64;
        let mut worst_round = 0.0f64;
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for _ in 0..2000 {
            let d = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let d = d.normalize();
            let inside = p.image_centre + d * p.radius * (1.0 - 1e-12);
            worst_seam = worst_seam.max((p.eval(&inside) - inside).norm());

            let x = p.image_centre + d * p.radius * rng.random_range(0.0..1.0f64).cbrt();
            worst_round = worst_round.max((p.inverse(&p.eval(&x)) - x).norm());
            let y = x + Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            if p.contains(&y) {
                let ratio = (p.eval(&x) - p.eval(&y)).norm() / (x - y).norm();
                lo = lo.min(ratio);
                hi = hi.max(ratio);
            }
        }
        assert!(worst_seam < 1e-6, "{worst_seam}");
        assert!(worst_round < 1e-9 * p.radius, "{worst_round}");
        assert!(lo > 0.2 && hi < 5.0, "{lo} {hi}");
    }

    #[test]
    fn example_three_fixes_x0() {
        let f = global_map();
        let g = Example3::new(f).unwrap();
        assert!((g.eval(&g.patch.x0) - g.patch.x0).norm() <= 1e-9 * f.l_prime);
        let control = Vector3::new(2.0 * f.l_prime, 0.0, -0.05 * f.l_prime);
        assert_eq!(classify_escape(&g, &control, 50), EscapeClass::QuasiFatouProxy(0));
        let rec = iterate(&g, &control, &IterateConfig::new(200).through_entry());
        assert!(rec.last_point().norm() > 150.0 * f.l_prime);
    }

    #[test]
    fn example_rates_approach_log_two() {
        let f = global_map();
        let g = Example2::new(f);
        let rec = iterate(&g, &Vector3::new(0.0, 0.0, f.level.sqrt()), &IterateConfig::new(30));
        let a = escape_rate_series(&rec, 1);
        assert!((a[19] - 2f64.ln()).abs() <= 0.05);
        let rec = iterate(&Example1, &Vector2::new(1f64.exp(), 0.0), &IterateConfig::new(30));
        let a = escape_rate_series(&rec, 1);
        assert!((a[19] - 2f64.ln()).abs() <= 0.05);
    }

    proptest! {
        #[test]
        fn h_commutes_with_conjugation(x in -20.0..20.0f64, y in -20.0..20.0f64) {
            let a = fatou_h_eval(&Vector2::new(x, -y));
            let b = fatou_h_eval(&Vector2::new(x, y));
            prop_assert!((a - Vector2::new(b.x, -b.y)).norm() <= 1e-12 * (1.0 + b.norm()));
        }

        #[test]
        fn radial_square_modulus(x in -1e3..1e3f64, y in -1e3..1e3f64, z in -1e3..1e3f64) {
            let v = Vector3::new(x, y, z);
            let n2 = v.norm_squared();
            prop_assert!((radial_square_eval(&v).norm() - n2).abs() <= 1e-12 * n2.max(1.0));
        }
    }
}
