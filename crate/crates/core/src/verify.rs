//! Verification suites shared by the command line and the acceptance tests.

use nalgebra::{Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::construction::{audit, AuditKind, GlobalMap};
use crate::dynamics::{escape_rate_series, iterate, log_domain_series, IterateConfig, OrbitMap, OrbitRecord};
use crate::example_maps::{Example1, Example2};
use crate::zorich::{expansion_min_ratio, f_eval, BeamId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Symmetry,
    Seams,
    Orientation,
    Expansion,
    ExtensionRoundtrip,
    EscapeRates,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::Symmetry, Suite::Seams, Suite::Orientation, Suite::Expansion, Suite::ExtensionRoundtrip, Suite::EscapeRates];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Symmetry => "symmetry",
            Suite::Seams => "seams",
            Suite::Orientation => "orientation",
            Suite::Expansion => "expansion",
            Suite::ExtensionRoundtrip => "extension-roundtrip",
            Suite::EscapeRates => "escape-rates",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Points per check (symmetry, round trip) or per seam interface.
    pub samples: usize,
    /// Pairs per beam in the expansion suite.
    pub pairs: usize,
    pub tol_seam: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { seed: 0, samples: 1000, pairs: 10_000, tol_seam: crate::construction::DEFAULT_SEAM_TOLERANCE }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub suite: Suite,
    pub pass: bool,
    /// `(metric, value, limit)`; a metric passes when `value ≤ limit`
    /// unless the name ends in `_min`, where it must be `≥ limit`.
    pub metrics: Vec<(String, f64, f64)>,
}

impl SuiteResult {
    fn from_metrics(suite: Suite, metrics: Vec<(String, f64, f64)>) -> Self {
        let pass = metrics.iter().all(|(k, v, lim)| if k.ends_with("_min") { v >= lim } else { v <= lim });
        Self { suite, pass, metrics }
    }

    /// One line per metric: `suite metric value limit PASS|FAIL`.
    pub fn lines(&self) -> Vec<String> {
        self.metrics
            .iter()
            .map(|(k, v, lim)| {
                let ok = if k.ends_with("_min") { v >= lim } else { v <= lim };
                format!("{} {k} {v:e} {lim:e} {}", self.suite.name(), if ok { "PASS" } else { "FAIL" })
            })
            .collect()
    }
}

pub fn run_suite(gm: &GlobalMap<f64>, suite: Suite, cfg: &VerifyConfig) -> SuiteResult {
    let metrics = match suite {
        Suite::Symmetry => symmetry(gm, cfg),
        Suite::Seams => {
            let r = crate::construction::seams(gm, cfg.samples, cfg.seed, cfg.tol_seam);
            r.details.into_iter().map(|(k, v)| (k.replace(' ', "_"), v, cfg.tol_seam)).collect()
        }
        Suite::Orientation => {
            let r = audit(gm, AuditKind::Orientation, cfg.samples, cfg.seed);
            r.details.into_iter().map(|(k, v)| (format!("det_{k}_min"), v, f64::MIN_POSITIVE)).collect()
        }
        Suite::Expansion => [BeamId::new(0, 0), BeamId::new(1, 0), BeamId::new(1, 1)]
            .iter()
            .map(|b| {
                let r = expansion_min_ratio(gm.level, *b, cfg.pairs, cfg.seed);
                (format!("ratio_B{}{}_min", b.n, b.m), r, 32.0 * (1.0 - 1e-9))
            })
            .collect(),
        Suite::ExtensionRoundtrip => roundtrip(gm, cfg),
        Suite::EscapeRates => escape_rates(gm),
    };
    SuiteResult::from_metrics(suite, metrics)
}

fn max_rel(a: Vector3<f64>, b: Vector3<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

fn symmetry(gm: &GlobalMap<f64>, cfg: &VerifyConfig) -> Vec<(String, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let shift = Vector3::new(4.0, 0.0, 0.0);
    let r1 = |p: Vector3<f64>| Vector3::new(4.0 - p.x, p.y, p.z);
    let r2 = |p: Vector3<f64>| Vector3::new(p.x, 4.0 - p.y, p.z);
    let mut worst = [0.0f64; 6];
    for _ in 0..cfg.samples {
        let (a, b) = (rng.random_range(-6.0..6.0), rng.random_range(-6.0..6.0));
        let x = Vector3::new(a, b, gm.level + rng.random_range(0.0..5.0));
        let fx = f_eval(&x);
        worst[0] = worst[0].max(max_rel(f_eval(&(x + shift)), fx + shift));
        worst[1] = worst[1].max(max_rel(f_eval(&r1(x)), r1(fx)));
        worst[2] = worst[2].max(max_rel(f_eval(&r2(x)), r2(fx)));
        let x = Vector3::new(a, b, rng.random_range(0.0..gm.level));
        let gx = gm.g(&x);
        worst[3] = worst[3].max(max_rel(gm.g(&(x + shift)), gx + shift));
        worst[4] = worst[4].max(max_rel(gm.g(&r1(x)), r1(gx)));
        worst[5] = worst[5].max(max_rel(gm.g(&r2(x)), r2(gx)));
    }
    ["F_translate", "F_reflect_1", "F_reflect_2", "g_translate", "g_reflect_1", "g_reflect_2"]
        .iter()
        .zip(worst)
        .map(|(k, v)| (k.to_string(), v, 1e-10))
        .collect()
}

fn roundtrip(gm: &GlobalMap<f64>, cfg: &VerifyConfig) -> Vec<(String, f64, f64)> {
    let chart = &gm.charts()[0];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst = 0.0f64;
    for _ in 0..cfg.samples {
        let x = chart.map.domain().sample_interior(&mut rng);
        let back = chart.map.eval(&x).and_then(|y| chart.map.inverse(&y)).map(|b| (b - x).norm()).unwrap_or(f64::INFINITY);
        worst = worst.max(back);
    }
    vec![("aprime_roundtrip".into(), worst, 1e-8)]
}

/// Start points whose first iterates are `(0, 0, −1)` for `G` and real for
/// `h ∘ φ`.
pub fn example2_start(gm: &GlobalMap<f64>) -> Vector3<f64> {
    Vector3::new(0.0, 0.0, gm.level.sqrt())
}

pub fn example1_start() -> Vector2<f64> {
    Vector2::new(1f64.exp(), 0.0)
}

/// Largest relative gap between the direct `ρ_k` and a pure log-domain
/// series started from the first iterate inside the surrogate's regime.
pub fn cross_validate<const D: usize, M: OrbitMap<D>>(map: &M, direct: &OrbitRecord<D>, k_max: usize) -> f64 {
    let Some((start, kind)) = direct
        .points
        .iter()
        .enumerate()
        .take(k_max)
        .find_map(|(k, p)| map.log_kind(p).filter(|kd| kd.check(&kd.state_at(p)).is_ok()).map(|kd| (k, kd)))
    else {
        return f64::INFINITY;
    };
    let logs = match log_domain_series(&kind, kind.state_at(&direct.points[start]), k_max - start) {
        Ok(l) => l,
        Err(_) => return f64::INFINITY,
    };
    direct.rho[start..=k_max].iter().zip(&logs).map(|(d, l)| (d - l).abs() / d.abs().max(1.0)).fold(0.0, f64::max)
}

fn rate_metrics(name: &str, a: &[f64], cross: f64) -> Vec<(String, f64, f64)> {
    let ln2 = 2f64.ln();
    let a20 = a.get(19).copied().unwrap_or(f64::NAN);
    let worst_tail = a[9..a.len().min(30)].iter().map(|v| v - ln2).fold(f64::NEG_INFINITY, f64::max);
    vec![
        (format!("{name}_abs_a20_minus_ln2"), (a20 - ln2).abs(), 0.05),
        (format!("{name}_max_a10_30_minus_ln2"), worst_tail, 0.05),
        (format!("{name}_direct_vs_log_rel"), cross, 1e-9),
    ]
}

fn escape_rates(gm: &GlobalMap<f64>) -> Vec<(String, f64, f64)> {
    let g = Example2::new(gm);
    let rec = iterate(&g, &example2_start(gm), &IterateConfig::new(30));
    let mut out = rate_metrics("example2", &escape_rate_series(&rec, 1), cross_validate(&g, &rec, 8));
    let rec = iterate(&Example1, &example1_start(), &IterateConfig::new(30));
    out.extend(rate_metrics("example1", &escape_rate_series(&rec, 1), cross_validate(&Example1, &rec, 8)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::global_map;

    #[test]
    fn suites_pass_at_small_sizes() {
        let cfg = VerifyConfig { samples: 200, pairs: 600, ..VerifyConfig::default() };
        for suite in Suite::ALL {
            let r = run_suite(global_map(), suite, &cfg);
            assert!(r.pass, "{:?}", r.lines());
        }
    }

    #[test]
    fn suite_names_parse() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn failing_metric_is_reported() {
        let r = SuiteResult::from_metrics(Suite::Seams, vec![("a".into(), 2.0, 1.0), ("b_min".into(), 2.0, 1.0)]);
        assert!(!r.pass);
        assert!(r.lines()[0].ends_with("FAIL") && r.lines()[1].ends_with("PASS"));
    }
}
