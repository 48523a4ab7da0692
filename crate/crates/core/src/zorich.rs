//! The modified Zorich map `Z(x) = e^{x₃} h(x₁, x₂)` built on the square
//! pyramid, the map `F = Id + Z`, and the constants that make `F` expanding
//! and quasiregular on the fundamental half-beams above level `L`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{dilatation, singular_values};
use crate::scalar::{from_usize, lit, to_f64, Real, M3, V2, V3};

/// Tolerance for declaring a point to lie on a crease or fold seam.
const CREASE_TOL: f64 = 1e-9;
const LEVEL_MARGIN: f64 = 0.1;
const LEVEL_RETRY_STEP: f64 = 0.5;
const MAX_LEVEL_RETRIES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FoldResult<T> {
    pub u: V2<T>,
    pub sigma: T,
    pub flags: [bool; 2],
}

/// Fundamental half-beam `{|x₁ − 2n| < 1, |x₂ − 2m| < 1, x₃ > L}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BeamId {
    pub n: i64,
    pub m: i64,
}

impl BeamId {
    pub const fn new(n: i64, m: i64) -> Self {
        Self { n, m }
    }

    pub fn centre<T: Real>(&self) -> V2<T> {
        V2::new(lit((2 * self.n) as f64), lit((2 * self.m) as f64))
    }
}

fn fold1<T: Real>(x: T) -> (T, bool) {
    let four = lit::<T>(4.0);
    let t = x - four * (x / four).round();
    if t.abs() <= T::one() {
        (t, false)
    } else {
        (t.signum() * (lit::<T>(2.0) - t.abs()), true)
    }
}

/// Reduces `(x₁, x₂)` to the base square by period-4 translation and
/// reflection in the lines `xᵢ = ±1`.
pub fn fold_square<T: Real>(x1: T, x2: T) -> FoldResult<T> {
    let (u1, f1) = fold1(x1);
    let (u2, f2) = fold1(x2);
    let sigma = if f1 != f2 { -T::one() } else { T::one() };
    FoldResult { u: V2::new(u1, u2), sigma, flags: [f1, f2] }
}

/// Upper faces of the square pyramid over `[−1, 1]²` with apex `(0, 0, 1)`.
pub fn h_pyramid<T: Real>(x1: T, x2: T) -> Result<V3<T>> {
    if x1.abs() > T::one() || x2.abs() > T::one() {
        return Err(Error::OutsideSquare(to_f64(x1), to_f64(x2)));
    }
    Ok(V3::new(x1, x2, T::one() - x1.abs().max(x2.abs())))
}

/// `e^{-x₃} Z(x)`: the folded pyramid profile with the reflection sign applied.
pub fn zorich_profile<T: Real>(x1: T, x2: T) -> V3<T> {
    let f = fold_square(x1, x2);
    let m = f.u.x.abs().max(f.u.y.abs());
    V3::new(f.u.x, f.u.y, f.sigma * (T::one() - m))
}

pub fn zorich_eval<T: Real>(x: &V3<T>) -> V3<T> {
    zorich_profile(x.x, x.y) * x.z.exp()
}

pub fn f_eval<T: Real>(x: &V3<T>) -> V3<T> {
    x + zorich_eval(x)
}

/// Analytic derivative with a flag set when `x` sits on a crease `|u₁| = |u₂|`
/// or a fold seam, where the value returned is one-sided.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jacobian<T> {
    pub matrix: M3<T>,
    pub crease: bool,
}

/// `N(u)` with `DZ = e^{x₃} N`, on the base square, for the piece where
/// `u₁` (`dominant = 0`) or `u₂` (`dominant = 1`) attains the max.
pub fn n_matrix<T: Real>(u: &V2<T>, dominant: usize) -> M3<T> {
    let m = u.x.abs().max(u.y.abs());
    let mut dm = [T::zero(); 2];
    dm[dominant] = u[dominant].signum();
    M3::new(
        T::one(), T::zero(), u.x,
        T::zero(), T::one(), u.y,
        -dm[0], -dm[1], T::one() - m,
    )
}

fn dominant<T: Real>(u: &V2<T>) -> usize {
    if u.x.abs() >= u.y.abs() {
        0
    } else {
        1
    }
}

fn on_crease<T: Real>(x: &V3<T>, f: &FoldResult<T>) -> bool {
    let eps = lit::<T>(CREASE_TOL);
    let seam = |c: T| {
        let four = lit::<T>(4.0);
        let t = (c - four * (c / four).round()).abs();
        (t - T::one()).abs() <= eps
    };
    (f.u.x.abs() - f.u.y.abs()).abs() <= eps || seam(x.x) || seam(x.y)
}

pub fn z_jacobian<T: Real>(x: &V3<T>) -> Jacobian<T> {
    let f = fold_square(x.x, x.y);
    let mut n = n_matrix(&f.u, dominant(&f.u));
    for (j, flag) in f.flags.iter().enumerate() {
        if *flag {
            let c = -n.column(j);
            n.set_column(j, &c);
        }
    }
    if f.sigma < T::zero() {
        let r = -n.row(2);
        n.set_row(2, &r);
    }
    Jacobian { matrix: n * x.z.exp(), crease: on_crease(x, &f) }
}

pub fn f_jacobian<T: Real>(x: &V3<T>) -> Jacobian<T> {
    let z = z_jacobian(x);
    Jacobian { matrix: z.matrix + M3::identity(), crease: z.crease }
}

/// Constants certifying that `F` is expanding and quasiregular above level `L`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantsReport<T> {
    /// `inf σ_min(N(u))` over the base square.
    pub c0: T,
    /// Where the infimum was found.
    pub c0_at: V2<T>,
    pub level: T,
    /// `e^L c₀`, which must exceed 33.
    pub expansion_floor: T,
    /// Sampled `sup max(K_O, K_I)` of `DF` for `x₃ ∈ [L, L + 5]`.
    pub k_f: T,
    /// `min J_F / (½ e^{3x₃})` over the verification grid.
    pub jacobian_margin: T,
    /// `max |DF| / (7 e^{x₃})` over the verification grid.
    pub norm_margin: T,
    pub resolution: usize,
    pub samples: usize,
    pub retries: usize,
}

/// Beams on which the Jacobian bounds are verified; period 4 carries them to all others.
pub const VERIFIED_BEAMS: [BeamId; 4] = [BeamId::new(0, 0), BeamId::new(1, 0), BeamId::new(0, 1), BeamId::new(1, 1)];

pub fn min_singular_value_of_n<T: Real>(resolution: usize) -> (T, V2<T>) {
    let r = from_usize::<T>(resolution);
    let mut best = (T::max_value().unwrap(), V2::zeros());
    for i in 0..=resolution {
        for j in 0..=resolution {
            let u = V2::new(
                lit::<T>(-1.0) + lit::<T>(2.0) * from_usize::<T>(i) / r,
                lit::<T>(-1.0) + lit::<T>(2.0) * from_usize::<T>(j) / r,
            );
            // both one-sided pieces on the crease
            let crease = u.x.abs() == u.y.abs();
            for d in 0..2 {
                if !crease && d != dominant(&u) {
                    continue;
                }
                let s = singular_values(&n_matrix(&u, d))[2];
                if s < best.0 {
                    best = (s, u);
                }
            }
        }
    }
    best
}

struct GridCheck<T> {
    jacobian_margin: T,
    norm_margin: T,
    k_f: T,
    samples: usize,
}

fn check_level<T: Real>(level: T, resolution: usize) -> GridCheck<T> {
    let half = lit::<T>(0.5);
    let mut out = GridCheck { jacobian_margin: T::max_value().unwrap(), norm_margin: T::zero(), k_f: T::one(), samples: 0 };
    for beam in VERIFIED_BEAMS {
        let c = beam.centre::<T>();
        // full resolution on the base beam, a coarser pass on the others
        let res = if beam == VERIFIED_BEAMS[0] { resolution } else { (resolution / 4).max(8) };
        let rr = from_usize::<T>(res);
        for i in 0..res {
            for j in 0..res {
                for k in 0..res {
                    let p = |n: usize| (from_usize::<T>(n) + half) / rr;
                    let x = V3::new(
                        c.x - T::one() + p(i) * lit(2.0),
                        c.y - T::one() + p(j) * lit(2.0),
                        level + p(k) * lit(5.0),
                    );
                    let df = f_jacobian(&x).matrix;
                    let e = x.z.exp();
                    let jm = df.determinant() / (e.powi(3) * half);
                    let nm = singular_values(&df)[0] / (e * lit(7.0));
                    let (ko, ki) = dilatation(&df);
                    out.jacobian_margin = out.jacobian_margin.min(jm);
                    out.norm_margin = out.norm_margin.max(nm);
                    out.k_f = out.k_f.max(ko.max(ki));
                    out.samples += 1;
                }
            }
        }
    }
    out
}

/// Derives `c₀`, the level `L = max(1, ln(33/c₀)) + 0.1`, and verifies the
/// Jacobian and norm bounds above `L`, raising `L` if they fail.
pub fn derive_beam_constants<T: Real>(resolution: usize) -> Result<ConstantsReport<T>> {
    if resolution < 64 {
        return Err(Error::Precondition(format!("resolution {resolution} is below 64")));
    }
    let (c0, c0_at) = min_singular_value_of_n::<T>(resolution);
    if !(c0 > T::zero()) {
        return Err(Error::Construction("N(u) is singular on the base square".into()));
    }
    let base = (lit::<T>(33.0) / c0).ln().max(T::one()) + lit(LEVEL_MARGIN);
    for retries in 0..=MAX_LEVEL_RETRIES {
        let level = base + lit::<T>(LEVEL_RETRY_STEP) * from_usize::<T>(retries);
        let g = check_level(level, resolution);
        if g.jacobian_margin >= T::one() && g.norm_margin <= T::one() && level.exp() * c0 > lit(33.0) {
            return Ok(ConstantsReport {
                c0,
                c0_at,
                level,
                expansion_floor: level.exp() * c0,
                k_f: g.k_f,
                jacobian_margin: g.jacobian_margin,
                norm_margin: g.norm_margin,
                resolution,
                samples: g.samples,
                retries,
            });
        }
    }
    Err(Error::Construction("beam bounds fail at every retried level".into()))
}

/// Minimum of `|F(x) − F(y)| / |x − y|` over random pairs in `beam` with
/// `x₃ ∈ (L, L + 3)`. A third of the pairs are close pairs and a third
/// straddle the crease `|u₁| = |u₂|`.
pub fn expansion_min_ratio<T: Real>(level: T, beam: BeamId, pairs: usize, seed: u64) -> T {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((beam.n as u64) << 32) ^ (beam.m as u64 & 0xffff_ffff));
    let c = beam.centre::<f64>();
    let lv = to_f64(level);
    let point = |rng: &mut ChaCha8Rng| {
        V3::new(
            c.x + rng.random_range(-1.0..1.0),
            c.y + rng.random_range(-1.0..1.0),
            lv + rng.random_range(0.0..3.0),
        )
    };
    let mut best = T::max_value().unwrap();
    for i in 0..pairs {
        let x = point(&mut rng);
        let y = match i % 3 {
            0 => point(&mut rng),
            1 => {
                let d = V3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                let y = x + d * 1e-3;
                if (y.x - c.x).abs() >= 1.0 || (y.y - c.y).abs() >= 1.0 || y.z <= lv || y.z >= lv + 3.0 {
                    continue;
                }
                y
            }
            _ => {
                // mirror across the diagonal so the pair straddles the crease
                let z = (x.z + rng.random_range(-0.1..0.1)).clamp(lv + 1e-9, lv + 3.0 - 1e-9);
                V3::new(c.x + (x.y - c.y), c.y + (x.x - c.x), z)
            }
        };
        let x = x.map(|v| lit::<T>(v));
        let y = y.map(|v| lit::<T>(v));
        let d = (x - y).norm();
        if d <= T::zero() {
            continue;
        }
        best = best.min((f_eval(&x) - f_eval(&y)).norm() / d);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{central_jacobian, default_step};
    use proptest::prelude::*;

    const L: f64 = 4.406094;

    #[test]
    fn pyramid_values() {
        assert_eq!(h_pyramid(0.0, 0.0).unwrap(), V3::new(0.0, 0.0, 1.0));
        assert_eq!(h_pyramid(1.0, 1.0).unwrap(), V3::new(1.0, 1.0, 0.0));
        assert_eq!(h_pyramid(0.5, 0.0).unwrap(), V3::new(0.5, 0.0, 0.5));
        assert!(matches!(h_pyramid(1.5, 0.0), Err(Error::OutsideSquare(..))));
    }

    #[test]
    fn fold_examples() {
        let f = fold_square(0.5, -0.3);
        assert_eq!((f.u, f.sigma), (V2::new(0.5, -0.3), 1.0));
        let f = fold_square(1.5, 0.0);
        assert_eq!((f.u, f.sigma, f.flags), (V2::new(0.5, 0.0), -1.0, [true, false]));
        let f = fold_square(4.5, 0.2);
        assert_eq!(f.sigma, 1.0);
        assert!((f.u - V2::new(0.5, 0.2)).norm() < 1e-15);
        let f = fold_square(1.5, 1.5);
        assert_eq!(f.sigma, 1.0);
    }

    #[test]
    fn zorich_examples() {
        assert!((zorich_eval(&V3::new(0.0, 0.0, 2.0)) - V3::new(0.0, 0.0, 2f64.exp())).norm() < 1e-14);
        assert_eq!(zorich_eval(&V3::new(1.0, 1.0, 0.0)), V3::new(1.0, 1.0, 0.0));
        assert!((zorich_eval(&V3::new(2.0, 0.0, 0.0)) - V3::new(0.0, 0.0, -1.0)).norm() < 1e-15);
        for x in [1.0, 2.0, 3.0, -1.0] {
            for y in [0.3, -0.7, 1.0] {
                let l = zorich_eval(&V3::new(x - 1e-13, y, 0.5));
                let r = zorich_eval(&V3::new(x + 1e-13, y, 0.5));
                assert!((l - r).norm() < 1e-12, "fold seam x₁ = {x}");
            }
        }
    }

    #[test]
    fn f_examples() {
        let e = L.exp();
        assert!((f_eval(&V3::new(0.0, 0.0, L)) - V3::new(0.0, 0.0, L + e)).norm() < 1e-12);
        assert!((f_eval(&V3::new(1.0, 1.0, L)) - V3::new(1.0 + e, 1.0 + e, L)).norm() < 1e-12);
    }

    #[test]
    fn determinant_of_n_is_one() {
        for i in 0..=40 {
            for j in 0..=40 {
                let u = V2::new(-1.0 + i as f64 / 20.0, -1.0 + j as f64 / 20.0);
                let m = u.x.abs().max(u.y.abs());
                for d in (0..2).filter(|&d| u[d].abs() == m) {
                    assert!((n_matrix(&u, d).determinant() - 1.0).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn c0_matches_closed_form() {
        // at the corner (1, −1) the singular values of N are 2cos(kπ/7), k = 1, 2, 3
        let (c0, at) = min_singular_value_of_n::<f64>(64);
        let oracle = 2.0 * (3.0 * std::f64::consts::PI / 7.0).cos();
        assert!((c0 - oracle).abs() < 1e-12, "c0 = {c0}");
        assert_eq!(at.x.abs(), 1.0);
        assert_eq!(at.y.abs(), 1.0);
        let s = singular_values(&n_matrix(&V2::new(1.0, -1.0), 0));
        let pi7 = std::f64::consts::PI / 7.0;
        assert!((s[0] - 2.0 * pi7.cos()).abs() < 1e-12);
        assert!((s[1] - 2.0 * (2.0 * pi7).cos()).abs() < 1e-12);
    }

    #[test]
    fn beam_constants() {
        let r = derive_beam_constants::<f64>(64).unwrap();
        assert!(r.expansion_floor > 33.0);
        assert!(r.level > 1.0);
        assert!((r.level - (33.0 / r.c0).ln().max(1.0) - 0.1).abs() < 1e-12);
        assert!(r.k_f >= 1.0);
        assert_eq!(r.retries, 0);
        // independent re-check one unit above L
        let z = r.level + 1.0;
        for i in 0..=64 {
            for j in 0..=64 {
                let u = V2::new(-1.0 + i as f64 / 32.0, -1.0 + j as f64 / 32.0);
                let s = singular_values(&n_matrix(&u, dominant(&u)))[2];
                assert!(z.exp() * s > 33.0);
            }
        }
        assert!(derive_beam_constants::<f64>(32).is_err());
    }

    #[test]
    fn expansion_in_beams() {
        let r = derive_beam_constants::<f64>(64).unwrap();
        for b in [BeamId::new(0, 0), BeamId::new(1, 0), BeamId::new(1, 1)] {
            let m = expansion_min_ratio(r.level, b, 3000, 5);
            assert!(m >= 32.0, "beam {b:?}: {m}");
        }
    }

    #[test]
    fn directional_derivatives_exceed_32() {
        let x = V3::new(0.3, -0.2, L + 0.5);
        let j = f_jacobian(&x).matrix;
        assert!(singular_values(&j)[2] >= 32.0);
    }

    #[test]
    fn f32_instantiation() {
        let x = V3::new(0.25f32, -0.5, 1.0);
        let d = (f_eval(&x) - f_eval(&x.map(|v| v as f64)).map(|v| v as f32)).norm();
        assert!(d < 1e-5);
    }

    proptest! {
        #[test]
        fn periodic_and_reflection_equivariant(x in -8.0f64..8.0, y in -8.0f64..8.0, z in -3.0f64..6.0) {
            let p = V3::new(x, y, z);
            let f = f_eval(&p);
            let sx = f_eval(&(p + V3::new(4.0, 0.0, 0.0))) - f - V3::new(4.0, 0.0, 0.0);
            let sy = f_eval(&(p + V3::new(0.0, 4.0, 0.0))) - f - V3::new(0.0, 4.0, 0.0);
            let tol = 1e-12 * f.norm().max(1.0);
            prop_assert!(sx.norm() <= tol && sy.norm() <= tol);
            let r1 = |v: V3<f64>| V3::new(4.0 - v.x, v.y, v.z);
            let r2 = |v: V3<f64>| V3::new(v.x, 4.0 - v.y, v.z);
            prop_assert!((f_eval(&r1(p)) - r1(f)).norm() <= tol);
            prop_assert!((f_eval(&r2(p)) - r2(f)).norm() <= tol);
        }

        #[test]
        fn zorich_modulus_band(x in -50.0f64..50.0, y in -50.0f64..50.0, z in -5.0f64..5.0) {
            let r = zorich_eval(&V3::new(x, y, z)).norm() * (-z).exp();
            prop_assert!(r >= 0.5f64.sqrt() - 1e-12 && r <= 2f64.sqrt() + 1e-12);
        }

        #[test]
        fn analytic_jacobian_matches_differences(x in -6.0f64..6.0, y in -6.0f64..6.0, z in -2.0f64..3.0) {
            let p = V3::new(x, y, z);
            let j = f_jacobian(&p);
            let f = fold_square(x, y);
            let h = default_step(&p);
            let collar = 10.0 * h;
            prop_assume!((f.u.x.abs() - f.u.y.abs()).abs() > collar);
            prop_assume!((f.u.x.abs() - 1.0).abs() > collar && (f.u.y.abs() - 1.0).abs() > collar);
            prop_assume!(f.u.x.abs() > collar && f.u.y.abs() > collar);
            let fd = central_jacobian(f_eval, &p, h);
            prop_assert!((fd - j.matrix).norm() <= 1e-4 * j.matrix.norm());
        }
    }
}
