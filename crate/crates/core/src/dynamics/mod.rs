//! Orbits, escape classification, escape rates and growth estimates.

mod escape;
mod log_domain;
mod orbit;
mod report;

pub use escape::{
    ball_growth_check, classify_escape, escape_class, fast_escape_test, iterated_log_modulus, max_modulus_estimate,
    modulus_table, sphere_samples, EscapeClass, FastEscape, ModulusTable, MODULUS_SAMPLE_LIMIT,
};
pub use log_domain::{
    log_domain_series, scaled_norm, square_corrections, tower_log_step, LogKind, LogState, SquareRegime, RIGHT_HALF_PLANE_FLOOR,
};
pub use orbit::{
    escape_rate_series, iterate, log_plus, rates_from_rho, IterateConfig, OrbitMap, OrbitRecord, Termination,
    DEFAULT_LOG_SWITCH, DEFAULT_RADIUS_CAP,
};
pub use report::{write_orbit_csv, write_rates_csv};

use nalgebra::Vector3;

use crate::construction::{GlobalMap, Mode};
use crate::zorich::{f_eval, zorich_eval, zorich_profile};

/// On lines where the folded profile is the apex `(0, 0, 1)`, `F` acts on the
/// height alone.
fn on_tower_line(x: &Vector3<f64>) -> bool {
    zorich_profile(x.x, x.y) == Vector3::new(0.0, 0.0, 1.0)
}

impl OrbitMap<3> for GlobalMap<f64> {
    fn eval(&self, x: &Vector3<f64>) -> Vector3<f64> {
        GlobalMap::eval(self, x)
    }

    fn absorbing(&self, x: &Vector3<f64>) -> bool {
        self.mode == Mode::F && x.z < 0.0
    }

    fn log_kind(&self, x: &Vector3<f64>) -> Option<LogKind<3>> {
        let l_prime = match self.mode {
            Mode::F => self.l_prime,
            Mode::G => 0.0,
        };
        (x.z > self.level && on_tower_line(x))
            .then(|| LogKind::AxisTower { l_prime, level: self.level, offset2: x.x * x.x + x.y * x.y })
    }
}

/// The modified Zorich map `Z` as an orbit map.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZorichZ;

/// `F = Id + Z`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZorichF;

impl OrbitMap<3> for ZorichZ {
    fn eval(&self, x: &Vector3<f64>) -> Vector3<f64> {
        zorich_eval(x)
    }
}

impl OrbitMap<3> for ZorichF {
    fn eval(&self, x: &Vector3<f64>) -> Vector3<f64> {
        f_eval(x)
    }

    fn log_kind(&self, x: &Vector3<f64>) -> Option<LogKind<3>> {
        (x.z > 0.0 && on_tower_line(x)).then(|| LogKind::AxisTower { l_prime: 0.0, level: 0.0, offset2: x.x * x.x + x.y * x.y })
    }
}

#[cfg(test)]
mod tests;
