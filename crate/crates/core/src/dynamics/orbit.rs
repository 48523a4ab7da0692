use nalgebra::SVector;

use super::log_domain::{scaled_norm, LogKind, LogState};

/// A self-map of `R^D` that the orbit engine can iterate.
pub trait OrbitMap<const D: usize>: Sync {
    fn eval(&self, x: &SVector<f64, D>) -> SVector<f64, D>;

    /// Membership in the absorbing region (`H₀ = {x₃ < 0}` for `f`).
    fn absorbing(&self, _x: &SVector<f64, D>) -> bool {
        false
    }

    /// A log-domain surrogate valid from `x` on, if the map has one.
    fn log_kind(&self, _x: &SVector<f64, D>) -> Option<LogKind<D>> {
        None
    }
}

impl<const D: usize, F> OrbitMap<D> for F
where
    F: Fn(&SVector<f64, D>) -> SVector<f64, D> + Sync,
{
    fn eval(&self, x: &SVector<f64, D>) -> SVector<f64, D> {
        self(x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterateConfig {
    pub k_max: usize,
    /// Direct iteration stops once `|x|` exceeds this and no surrogate applies.
    pub radius_cap: f64,
    /// Above this modulus the engine hands over to the map's surrogate.
    pub log_switch: f64,
    pub stop_on_entry: bool,
}

pub const DEFAULT_RADIUS_CAP: f64 = 1e300;
pub const DEFAULT_LOG_SWITCH: f64 = 1e150;

impl IterateConfig {
    pub fn new(k_max: usize) -> Self {
        Self { k_max, radius_cap: DEFAULT_RADIUS_CAP, log_switch: DEFAULT_LOG_SWITCH, stop_on_entry: true }
    }

    pub fn through_entry(mut self) -> Self {
        self.stop_on_entry = false;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// Entered the absorbing region at this step.
    Entered(usize),
    /// `|x|` passed the radius cap, or `ρ` overflowed in the log domain.
    ExceededRadius(usize),
    Budget,
    /// A direct evaluation returned a non-finite value at this step.
    NonFinite(usize),
}

#[derive(Clone, Debug)]
pub struct OrbitRecord<const D: usize> {
    pub initial: SVector<f64, D>,
    /// Directly computed iterates; `points[k] = map^k(x₀)` while representable.
    pub points: Vec<SVector<f64, D>>,
    /// `ρ_k = log|x_k|` for every completed step, including log-domain steps.
    pub rho: Vec<f64>,
    /// First step computed by the surrogate.
    pub log_from: Option<usize>,
    pub entered: Option<usize>,
    pub termination: Termination,
}

impl<const D: usize> OrbitRecord<D> {
    pub fn steps(&self) -> usize {
        self.rho.len() - 1
    }

    pub fn last_point(&self) -> &SVector<f64, D> {
        self.points.last().expect("orbit holds its initial point")
    }
}

pub fn iterate<const D: usize, M: OrbitMap<D> + ?Sized>(
    map: &M,
    x0: &SVector<f64, D>,
    cfg: &IterateConfig,
) -> OrbitRecord<D> {
    let mut rec = OrbitRecord {
        initial: *x0,
        points: vec![*x0],
        rho: vec![scaled_norm(x0).ln()],
        log_from: None,
        entered: None,
        termination: Termination::Budget,
    };
    if map.absorbing(x0) {
        rec.entered = Some(0);
        if cfg.stop_on_entry {
            rec.termination = Termination::Entered(0);
            return rec;
        }
    }
    let mut x = *x0;
    let mut log: Option<(LogKind<D>, LogState<D>)> = None;
    for k in 1..=cfg.k_max {
        if let Some((kind, state)) = &mut log {
            match kind.step(state) {
                Ok(next) => *state = next,
                Err(_) => {
                    rec.termination = Termination::ExceededRadius(k);
                    return rec;
                }
            }
            rec.rho.push(kind.modulus_log(state));
            if !state.rho.is_finite() {
                rec.termination = Termination::ExceededRadius(k);
                return rec;
            }
            continue;
        }

        let y = map.eval(&x);
        if !y.iter().all(|v| v.is_finite()) {
            // Overflow of the direct formula: the surrogate takes this step
            // if one is valid at x.
            if let Some(kind) = map.log_kind(&x) {
                let state = kind.state_at(&x);
                if let Ok(next) = kind.step(&state) {
                    rec.rho.push(kind.modulus_log(&next));
                    rec.log_from = Some(k);
                    if !next.rho.is_finite() {
                        rec.termination = Termination::ExceededRadius(k);
                        return rec;
                    }
                    log = Some((kind, next));
                    continue;
                }
            }
            rec.termination = Termination::NonFinite(k);
            return rec;
        }
        let r = scaled_norm(&y);
        rec.points.push(y);
        rec.rho.push(r.ln());
        if rec.entered.is_none() && map.absorbing(&y) {
            rec.entered = Some(k);
            if cfg.stop_on_entry {
                rec.termination = Termination::Entered(k);
                return rec;
            }
        }
        if r > cfg.log_switch {
            if let Some(kind) = map.log_kind(&y) {
                let state = kind.state_at(&y);
                if kind.check(&state).is_ok() {
                    rec.log_from = Some(k + 1);
                    log = Some((kind, state));
                    x = y;
                    continue;
                }
            }
        }
        if r > cfg.radius_cap {
            rec.termination = Termination::ExceededRadius(k);
            return rec;
        }
        x = y;
    }
    rec
}

/// `a_k = log⁺(ρ_{kp}) / k` for `k = 1, 2, …` while `ρ_{kp}` is recorded.
pub fn escape_rate_series<const D: usize>(rec: &OrbitRecord<D>, period: usize) -> Vec<f64> {
    rates_from_rho(&rec.rho, period)
}

pub fn rates_from_rho(rho: &[f64], period: usize) -> Vec<f64> {
    assert!(period >= 1, "period must be positive");
    (1..)
        .map(|k| k * period)
        .take_while(|&i| i < rho.len())
        .enumerate()
        .map(|(j, i)| log_plus(rho[i]) / (j + 1) as f64)
        .collect()
}

pub fn log_plus(v: f64) -> f64 {
    if v > 1.0 {
        v.ln()
    } else {
        0.0
    }
}
