use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::global::{GlobalMap, TileFrame};
use crate::linalg::{central_jacobian, dilatation};
use crate::scalar::{lit, to_f64, Real, V3};
use crate::zorich::f_eval;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuditKind {
    Seams,
    Orientation,
    Dilatation,
}

#[derive(Clone, Debug)]
pub struct AuditReport {
    pub kind: AuditKind,
    pub pass: bool,
    /// Seams: worst discrepancy. Orientation: smallest determinant.
    /// Dilatation: sampled supremum of `max(K_O, K_I)`.
    pub value: f64,
    pub tolerance: f64,
    pub samples: usize,
    /// Per-interface or per-chart breakdown.
    pub details: Vec<(String, f64)>,
}

/// Distance from a face of the cell within which orientation and
/// dilatation samples are discarded.
const COLLAR: f64 = 1e-6;
pub const DEFAULT_SEAM_TOLERANCE: f64 = 1e-6;

pub fn audit<T: Real>(gm: &GlobalMap<T>, kind: AuditKind, samples: usize, seed: u64) -> AuditReport {
    match kind {
        AuditKind::Seams => seams(gm, samples, seed, DEFAULT_SEAM_TOLERANCE),
        AuditKind::Orientation => orientation(gm, samples, seed),
        AuditKind::Dilatation => dilatation_audit(gm, samples, seed),
    }
}

type Pipeline<'a, T> = Box<dyn Fn(&V3<T>) -> V3<T> + 'a>;

/// Each interface draws points on the seam and evaluates the two adjacent
/// pipelines there.
pub fn seams<T: Real>(gm: &GlobalMap<T>, samples: usize, seed: u64, tolerance: f64) -> AuditReport {
    let level = to_f64(gm.level);
    let id = TileFrame { n: 0, m: 0, r1: false, r2: false };
    let chart = |cell: usize| -> Pipeline<'_, T> { Box::new(move |x| gm.g_in_tile(x, id, cell)) };
    let dispatched = |frame: TileFrame| -> Pipeline<'_, T> {
        Box::new(move |x| gm.g_in_tile(x, frame, super::global::cell_for(&frame.to_local(x))))
    };
    let ident: Pipeline<'_, T> = Box::new(|x| *x);

    // (name, point on the seam from (u, v, L), left, right)
    type Gen = fn(f64, f64, f64, f64) -> [f64; 3];
    let interfaces: Vec<(String, Gen, Pipeline<'_, T>, Pipeline<'_, T>)> = vec![
        ("x3=0 identity|A'".into(), |u, v, _, _| [2.0 * u, 2.0 * v, 0.0], ident, chart(0)),
        ("x1=2 reflection".into(), |u, v, _, l| [2.0, 2.0 * u, l * v], dispatched(id), dispatched(TileFrame { r1: true, ..id })),
        ("x2=2 reflection".into(), |u, v, _, l| [2.0 * u, 2.0, l * v], dispatched(id), dispatched(TileFrame { r2: true, ..id })),
        (
            "x1=0 translation".into(),
            |u, v, _, l| [0.0, 2.0 * u, l * v],
            dispatched(id),
            dispatched(TileFrame { n: -1, m: 0, r1: true, r2: false }),
        ),
        (
            "x2=0 translation".into(),
            |u, v, _, l| [2.0 * u, 0.0, l * v],
            dispatched(id),
            dispatched(TileFrame { n: 0, m: -1, r1: false, r2: true }),
        ),
        ("x1=1 A''1|A''2".into(), |u, v, _, l| [1.0, u, 1.0 + (l - 1.0) * v], chart(1), chart(2)),
        ("x1=1 A''3|A''4".into(), |u, v, _, l| [1.0, 1.0 + u, 1.0 + (l - 1.0) * v], chart(3), chart(4)),
        ("x2=1 A''1|A''3".into(), |u, v, _, l| [u, 1.0, 1.0 + (l - 1.0) * v], chart(1), chart(3)),
        ("x2=1 A''2|A''4".into(), |u, v, _, l| [1.0 + u, 1.0, 1.0 + (l - 1.0) * v], chart(2), chart(4)),
    ];
    let quads: [(f64, f64); 4] = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)];
    let quad_at = |q: (f64, f64), z: Option<f64>| -> Box<dyn Fn(f64, f64, f64) -> [f64; 3]> {
        Box::new(move |u, v, l| [q.0 + u, q.1 + v, z.unwrap_or(l)])
    };
    let mut planar: Vec<(String, Box<dyn Fn(f64, f64, f64) -> [f64; 3]>, Pipeline<'_, T>, Pipeline<'_, T>)> = Vec::new();
    for (c, q) in quads.into_iter().enumerate() {
        planar.push((format!("x3=1 A'|A''{}", c + 1), quad_at(q, Some(1.0)), chart(0), chart(c + 1)));
        planar.push((format!("x3=L A''{}|F", c + 1), quad_at(q, None), chart(c + 1), Box::new(|x| f_eval(x))));
    }
    let mut interfaces: Vec<(String, Box<dyn Fn(f64, f64, f64) -> [f64; 3]>, Pipeline<'_, T>, Pipeline<'_, T>)> =
        interfaces.into_iter().map(|(n, g, a, b)| (n, Box::new(move |u, v, l| g(u, v, 0.0, l)) as Box<dyn Fn(f64, f64, f64) -> [f64; 3]>, a, b)).collect();
    interfaces.extend(planar);

    let mut details = Vec::new();
    let mut worst = 0.0f64;
    let mut total = 0;
    for (i, (name, gen, left, right)) in interfaces.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let mut max = 0.0f64;
        for _ in 0..samples {
            let p = gen(rng.random::<f64>(), rng.random::<f64>(), level);
            let p = V3::new(lit::<T>(p[0]), lit(p[1]), lit(p[2]));
            let d = to_f64((left(&p) - right(&p)).norm());
            max = max.max(d);
        }
        total += samples;
        worst = worst.max(max);
        details.push((name.clone(), max));
    }
    AuditReport { kind: AuditKind::Seams, pass: worst <= tolerance, value: worst, tolerance, samples: total, details }
}

/// Random interior points of chart `cell` in the base tile, away from its faces.
fn cell_samples<T: Real>(gm: &GlobalMap<T>, cell: usize, n: usize, rng: &mut ChaCha8Rng) -> Vec<V3<T>> {
    let dom = gm.charts()[cell].map.domain();
    let collar = lit::<T>(COLLAR) * dom.diameter().max(T::one());
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x = dom.sample_interior(rng);
        if dom.distance_to_boundary(&x) > collar {
            out.push(x);
        }
    }
    out
}

fn fd_step<T: Real>(x: &V3<T>) -> T {
    lit::<T>(1e-7) * x.norm().max(T::one())
}

pub fn orientation<T: Real>(gm: &GlobalMap<T>, samples: usize, seed: u64) -> AuditReport {
    let mut details = Vec::new();
    let mut min_det = f64::INFINITY;
    let mut negative = 0usize;
    for (cell, chart) in gm.charts().iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(100 + cell as u64);
        let mut m = f64::INFINITY;
        for x in cell_samples(gm, cell, samples, &mut rng) {
            let h = fd_step(&x);
            let j = central_jacobian(|p| gm.g(p), &x, h);
            let d = to_f64(j.determinant());
            if !(d > 0.0) {
                negative += 1;
            }
            m = m.min(d);
        }
        min_det = min_det.min(m);
        details.push((chart.id.to_string(), m));
    }
    AuditReport {
        kind: AuditKind::Orientation,
        pass: negative == 0,
        value: min_det,
        tolerance: 0.0,
        samples: samples * gm.charts().len(),
        details,
    }
}

/// Sampled supremum of the pointwise dilatation over each chart, at the
/// requested sample count and at twice that count for a stability read.
pub fn dilatation_audit<T: Real>(gm: &GlobalMap<T>, samples: usize, seed: u64) -> AuditReport {
    let mut details = Vec::new();
    let mut sup = 1.0f64;
    let mut sup_refined = 1.0f64;
    for (cell, chart) in gm.charts().iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(200 + cell as u64);
        let pts = cell_samples(gm, cell, 2 * samples, &mut rng);
        let mut k = 1.0f64;
        for (i, x) in pts.iter().enumerate() {
            let j = central_jacobian(|p| gm.g(p), x, fd_step(x));
            let (ko, ki) = dilatation(&j);
            let kk = to_f64(ko.max(ki));
            if i < samples {
                k = k.max(kk);
            }
            sup_refined = sup_refined.max(kk);
        }
        sup = sup.max(k);
        details.push((chart.id.to_string(), k));
    }
    details.push(("refined sup (2x samples)".into(), sup_refined));
    AuditReport {
        kind: AuditKind::Dilatation,
        pass: sup.is_finite() && sup < f64::MAX,
        value: sup,
        tolerance: f64::INFINITY,
        samples: samples * gm.charts().len(),
        details,
    }
}
