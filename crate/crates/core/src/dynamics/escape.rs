use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::log_domain::tower_log_step;
use super::orbit::{iterate, IterateConfig, OrbitMap, OrbitRecord, Termination};
use crate::construction::GlobalMap;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EscapeClass {
    /// First entry into `H₀` at this step.
    QuasiFatouProxy(usize),
    RadialEscape,
    Undecided(usize),
}

impl std::fmt::Display for EscapeClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EscapeClass::QuasiFatouProxy(n) => write!(f, "quasi-fatou({n})"),
            EscapeClass::RadialEscape => write!(f, "radial-escape"),
            EscapeClass::Undecided(n) => write!(f, "undecided({n})"),
        }
    }
}

/// Reads the class off a finished orbit. A non-finite step counts as escape:
/// the only source of overflow in `f` is `e^{x₃}` times a profile of modulus
/// at least `c₀ > 0`.
pub fn escape_class<const D: usize>(rec: &OrbitRecord<D>, budget: usize) -> EscapeClass {
    if let Some(n) = rec.entered {
        return EscapeClass::QuasiFatouProxy(n);
    }
    match rec.termination {
        Termination::ExceededRadius(_) | Termination::NonFinite(_) => EscapeClass::RadialEscape,
        Termination::Entered(n) => EscapeClass::QuasiFatouProxy(n),
        Termination::Budget => EscapeClass::Undecided(budget),
    }
}

pub fn classify_escape<M: OrbitMap<3> + ?Sized>(f: &M, x: &Vector3<f64>, n_max: usize) -> EscapeClass {
    let rec = iterate(f, x, &IterateConfig::new(n_max));
    escape_class(&rec, n_max)
}

/// `n` quasi-uniform points on the sphere of radius `r`. The first `n` points
/// for a seed are a prefix of the first `n + 1`.
pub fn sphere_samples(r: f64, n: usize, seed: u64) -> Vec<Vector3<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let z: f64 = rng.random_range(-1.0..=1.0);
            let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let s = (1.0 - z * z).max(0.0).sqrt();
            Vector3::new(s * phi.cos(), s * phi.sin(), z) * r
        })
        .collect()
}

/// Points on the sphere where `|f|` is largest: the poles and the tower lines
/// `(2n, 2m, x₃)` with `n + m` even.
fn axis_points(r: f64) -> Vec<Vector3<f64>> {
    let mut out = vec![Vector3::new(0.0, 0.0, r), Vector3::new(0.0, 0.0, -r)];
    for n in -2i32..=2 {
        for m in -2i32..=2 {
            if (n + m) % 2 != 0 || (n == 0 && m == 0) {
                continue;
            }
            let (a, b) = (2.0 * n as f64, 2.0 * m as f64);
            let h2 = r * r - a * a - b * b;
            if h2 > 0.0 {
                out.push(Vector3::new(a, b, h2.sqrt()));
            }
        }
    }
    out
}

pub fn max_modulus_estimate<M: OrbitMap<3> + ?Sized>(map: &M, r: f64, samples: usize, seed: u64) -> f64 {
    axis_points(r)
        .iter()
        .chain(sphere_samples(r, samples, seed).iter())
        .map(|x| map.eval(x).norm())
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModulusTable {
    pub radii: Vec<f64>,
    pub estimates: Vec<f64>,
    pub samples: usize,
}

pub fn modulus_table<M: OrbitMap<3> + ?Sized>(map: &M, radii: &[f64], samples: usize, seed: u64) -> ModulusTable {
    ModulusTable {
        radii: radii.to_vec(),
        estimates: radii.iter().map(|&r| max_modulus_estimate(map, r, samples, seed)).collect(),
        samples,
    }
}

/// Radii above this are not sampled: `e^{x₃}` would overflow on the upper cap.
pub const MODULUS_SAMPLE_LIMIT: f64 = 700.0;

/// `log M̂^k(R)` for `k = 0..=k_max`. Beyond the sampling limit the pole value
/// `r + e^r − L′` is used, which is still a lower bound for `M(r)`.
pub fn iterated_log_modulus(f: &GlobalMap<f64>, r: f64, k_max: usize, samples: usize, seed: u64) -> Vec<f64> {
    let mut out = vec![r.ln()];
    for _ in 0..k_max {
        let r = out.last().unwrap().exp();
        let next = if r <= MODULUS_SAMPLE_LIMIT {
            max_modulus_estimate(f, r, samples, seed).ln()
        } else {
            tower_log_step(r, f.l_prime)
        };
        out.push(next);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FastEscape {
    /// `|f^{k+ℓ}(x)| ≥ M̂^k(R)` held for every compared `k`.
    Fast { ell: usize, compared: usize },
    NotObservedFast { compared: usize },
}

pub fn fast_escape_test(
    f: &GlobalMap<f64>,
    x: &Vector3<f64>,
    r: f64,
    ell_max: usize,
    k_max: usize,
    samples: usize,
    seed: u64,
) -> Result<FastEscape> {
    let m = max_modulus_estimate(f, r, samples, seed);
    if !(m > r) {
        return Err(Error::Precondition(format!("M̂({r}) = {m} does not exceed R")));
    }
    let lm = iterated_log_modulus(f, r, k_max, samples, seed);
    let rec = iterate(f, x, &IterateConfig::new(k_max + ell_max).through_entry());
    let overflowed = rec.rho.last().is_some_and(|v| *v == f64::INFINITY);
    let rho_at = |i: usize| -> Option<f64> {
        match rec.rho.get(i) {
            Some(v) => Some(*v),
            None if overflowed => Some(f64::INFINITY),
            None => None,
        }
    };
    let mut best_compared = 0;
    for ell in 0..=ell_max {
        let mut compared = 0;
        let mut ok = true;
        for (k, target) in lm.iter().enumerate() {
            let Some(rho) = rho_at(k + ell) else { break };
            if rho == f64::INFINITY && *target == f64::INFINITY {
                break;
            }
            compared += 1;
            if rho < *target {
                ok = false;
                break;
            }
        }
        if ok && compared >= 2 {
            return Ok(FastEscape::Fast { ell, compared });
        }
        best_compared = best_compared.max(compared);
    }
    Ok(FastEscape::NotObservedFast { compared: best_compared })
}

/// `min |f(x) − f(ξ)| / δ` over sampled `x` with `|x − ξ| = δ`.
pub fn ball_growth_check(f: &GlobalMap<f64>, xi: &Vector3<f64>, delta: f64, samples: usize, seed: u64) -> Result<f64> {
    let in_beam = |v: f64| (v - 2.0 * (v / 2.0).round()).abs() + delta < 1.0;
    if !(delta > 0.0) || xi.z - delta <= f.level || !in_beam(xi.x) || !in_beam(xi.y) {
        return Err(Error::Precondition(format!(
            "B({:?}, {delta}) is not inside a half-beam above level {}",
            xi.as_slice(),
            f.level
        )));
    }
    let fxi = f.eval(xi);
    if fxi.z <= f.level {
        return Err(Error::Precondition(format!("f(ξ) has height {} not above level {}", fxi.z, f.level)));
    }
    Ok(sphere_samples(delta, samples, seed)
        .iter()
        .map(|d| (f.eval(&(xi + d)) - fxi).norm() / delta)
        .fold(f64::INFINITY, f64::min))
}
