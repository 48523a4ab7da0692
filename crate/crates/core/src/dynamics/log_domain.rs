//! Overflow-safe continuation of orbits whose modulus outgrows `f64`.
//!
//! A point is carried as `(ρ, u)` with `x = e^ρ u` and `|u| = 1`.

use nalgebra::SVector;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SquareRegime {
    /// Last coordinate negative: `|x|x` stays in the identity half-space.
    LowerHalfSpace,
    /// `Re(|x|x)` large enough that `e^{−w}` vanishes next to the shift.
    RightHalfPlane,
}

/// Below this real part of `|x|x` the exponential term in `h` is kept and
/// the surrogate refuses to step.
pub const RIGHT_HALF_PLANE_FLOOR: f64 = 40.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LogKind<const D: usize> {
    /// `x ↦ |x|x + shift`.
    RadialSquareTranslate { shift: SVector<f64, D>, regime: SquareRegime },
    /// `t ↦ t + e^t − L′` along a line on which `F` is `x₃ ↦ x₃ + e^{x₃}`.
    /// The state's `ρ` is `log x₃`; `offset2 = x₁² + x₂²` is fixed.
    AxisTower { l_prime: f64, level: f64, offset2: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogState<const D: usize> {
    pub rho: f64,
    pub dir: SVector<f64, D>,
}

impl<const D: usize> LogState<D> {
    pub fn from_point(x: &SVector<f64, D>) -> Self {
        let r = scaled_norm(x);
        Self { rho: r.ln(), dir: x / r }
    }
}

impl<const D: usize> LogKind<D> {
    pub fn state_at(&self, x: &SVector<f64, D>) -> LogState<D> {
        match self {
            LogKind::RadialSquareTranslate { .. } => LogState::from_point(x),
            LogKind::AxisTower { .. } => {
                let mut dir = SVector::zeros();
                dir[D - 1] = 1.0;
                LogState { rho: x[D - 1].ln(), dir }
            }
        }
    }

    /// `log|x|` of the point a state represents.
    pub fn modulus_log(&self, s: &LogState<D>) -> f64 {
        match *self {
            LogKind::RadialSquareTranslate { .. } => s.rho,
            LogKind::AxisTower { offset2, .. } => s.rho + 0.5 * (offset2 * (-2.0 * s.rho).exp()).ln_1p(),
        }
    }

    pub fn check(&self, s: &LogState<D>) -> Result<()> {
        match *self {
            LogKind::RadialSquareTranslate { regime: SquareRegime::LowerHalfSpace, .. } => {
                if s.dir[D - 1] < 0.0 {
                    Ok(())
                } else {
                    Err(Error::Regime(format!("direction has last coordinate {} ≥ 0; iterate directly", s.dir[D - 1])))
                }
            }
            LogKind::RadialSquareTranslate { regime: SquareRegime::RightHalfPlane, .. } => {
                // Re(|x|x) = e^{2ρ} u₁
                let re = if s.dir[0] > 0.0 { 2.0 * s.rho + s.dir[0].ln() } else { f64::NEG_INFINITY };
                if re >= RIGHT_HALF_PLANE_FLOOR.ln() {
                    Ok(())
                } else {
                    Err(Error::Regime(format!("Re(|x|x) below {RIGHT_HALF_PLANE_FLOOR}; iterate directly")))
                }
            }
            LogKind::AxisTower { level, .. } => {
                if s.rho.exp() > level {
                    Ok(())
                } else {
                    Err(Error::Regime(format!("height e^ρ = {} not above level {level}", s.rho.exp())))
                }
            }
        }
    }

    pub fn step(&self, s: &LogState<D>) -> Result<LogState<D>> {
        self.check(s)?;
        Ok(match *self {
            LogKind::RadialSquareTranslate { shift, .. } => {
                // |x|x + t = e^{2ρ}(u + t e^{−2ρ})
                let v = s.dir + shift * (-2.0 * s.rho).exp();
                let n = v.norm();
                LogState { rho: 2.0 * s.rho + n.ln(), dir: v / n }
            }
            LogKind::AxisTower { l_prime, .. } => {
                let t = s.rho.exp();
                LogState { rho: tower_log_step(t, l_prime), dir: s.dir }
            }
        })
    }
}

/// `log(t + e^t − L′)` without forming `e^t`.
pub fn tower_log_step(t: f64, l_prime: f64) -> f64 {
    if t == f64::INFINITY {
        return t;
    }
    t + ((t - l_prime) * (-t).exp()).ln_1p()
}

/// Euclidean norm that survives components near `f64::MAX`.
pub fn scaled_norm<const D: usize>(x: &SVector<f64, D>) -> f64 {
    let m = x.amax();
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    m * (x / m).norm()
}

/// `ρ_0 … ρ_{k_max}` from a state already in the surrogate's regime.
pub fn log_domain_series<const D: usize>(kind: &LogKind<D>, start: LogState<D>, k_max: usize) -> Result<Vec<f64>> {
    kind.check(&start)?;
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(start.rho);
    let mut s = start;
    for _ in 0..k_max {
        if !s.rho.is_finite() {
            break;
        }
        s = kind.step(&s)?;
        out.push(s.rho);
    }
    Ok(out)
}

/// The correction `ρ_{k+1} − 2ρ_k` of a pure radial-square orbit.
pub fn square_corrections(rho: &[f64]) -> Vec<f64> {
    rho.windows(2).map(|w| w[1] - 2.0 * w[0]).collect()
}
