use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::charts::{build_aprime_chart, build_asecond_chart, CellChart, PieceCache};
use super::vertex_table::{build_vertex_table, VertexName, VertexTable};
use crate::error::{Error, Result};
use crate::geometry::DEFAULT_RESOLUTION;
use crate::scalar::{lit, to_f64, Real, V3};
use crate::zorich::{derive_beam_constants, f_eval, ConstantsReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Identity below the slab, `F` above it.
    G,
    /// `g − (0, 0, L′)`.
    F,
}

/// Placement of a point relative to the fundamental tile `[0,2]²`: the
/// period-4 translation `(4n, 4m)` and the reflections `xᵢ ↦ 4 − xᵢ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TileFrame {
    pub n: i64,
    pub m: i64,
    pub r1: bool,
    pub r2: bool,
}

impl TileFrame {
    pub fn of<T: Real>(x: &V3<T>) -> Self {
        let four = lit::<T>(4.0);
        let n = (x.x / four).floor();
        let m = (x.y / four).floor();
        let l1 = x.x - four * n;
        let l2 = x.y - four * m;
        Self {
            n: to_f64(n) as i64,
            m: to_f64(m) as i64,
            r1: l1 > lit(2.0),
            r2: l2 > lit(2.0),
        }
    }

    fn offset<T: Real>(&self) -> V3<T> {
        V3::new(lit((4 * self.n) as f64), lit((4 * self.m) as f64), T::zero())
    }

    pub fn to_local<T: Real>(&self, x: &V3<T>) -> V3<T> {
        let mut l = x - self.offset();
        if self.r1 {
            l.x = lit::<T>(4.0) - l.x;
        }
        if self.r2 {
            l.y = lit::<T>(4.0) - l.y;
        }
        l
    }

    pub fn from_local<T: Real>(&self, y: &V3<T>) -> V3<T> {
        let mut g = *y;
        if self.r1 {
            g.x = lit::<T>(4.0) - g.x;
        }
        if self.r2 {
            g.y = lit::<T>(4.0) - g.y;
        }
        g + self.offset()
    }
}

#[derive(Clone, Debug)]
pub struct GlobalMap<T: Real> {
    pub constants: ConstantsReport<T>,
    pub level: T,
    pub l_prime: T,
    pub mode: Mode,
    pub vertex_table: Arc<VertexTable<T>>,
    charts: Arc<[CellChart<T>]>,
}

/// Cell index in dispatch priority order `A′, A″₁, A″₂, A″₃, A″₄`.
pub fn cell_for<T: Real>(local: &V3<T>) -> usize {
    if local.z <= T::one() {
        0
    } else {
        match (local.x <= T::one(), local.y <= T::one()) {
            (true, true) => 1,
            (false, true) => 2,
            (true, false) => 3,
            (false, false) => 4,
        }
    }
}

impl<T: Real> GlobalMap<T> {
    pub fn charts(&self) -> &[CellChart<T>] {
        &self.charts
    }

    pub fn with_mode(&self, mode: Mode) -> Self {
        Self { mode, ..self.clone() }
    }

    /// `g` through a prescribed tile frame and cell, without dispatch.
    pub fn g_in_tile(&self, x: &V3<T>, frame: TileFrame, cell: usize) -> V3<T> {
        let local = frame.to_local(x);
        let y = self.charts[cell].map.eval_lenient(&local).expect("chart evaluation on a valid shape");
        frame.from_local(&y)
    }

    pub fn g(&self, x: &V3<T>) -> V3<T> {
        if x.z < T::zero() {
            *x
        } else if x.z > self.level {
            f_eval(x)
        } else {
            let frame = TileFrame::of(x);
            let cell = cell_for(&frame.to_local(x));
            self.g_in_tile(x, frame, cell)
        }
    }

    pub fn eval(&self, x: &V3<T>) -> V3<T> {
        let y = self.g(x);
        match self.mode {
            Mode::G => y,
            Mode::F => y - V3::new(T::zero(), T::zero(), self.l_prime),
        }
    }
}

pub fn map_eval<T: Real>(gm: &GlobalMap<T>, x: &V3<T>) -> V3<T> {
    gm.eval(x)
}

/// Build parameters for the global map.
#[derive(Clone, Copy, Debug)]
pub struct BuildConfig {
    /// Grid resolution for the beam constants (at least 64).
    pub resolution: usize,
    /// Boundary sampling resolution for star-centre certificates.
    pub certificate_resolution: usize,
    /// Slab samples used to confirm `L′`.
    pub translation_samples: usize,
    pub seed: u64,
}

impl Default for BuildConfig {
    fn default() -> Self {
        Self { resolution: 64, certificate_resolution: DEFAULT_RESOLUTION, translation_samples: 100_000, seed: 0 }
    }
}

pub fn build_charts<T: Real>(vt: &VertexTable<T>, certificate_resolution: usize) -> Result<Vec<CellChart<T>>> {
    let mut cache = PieceCache::default();
    let mut charts = vec![build_aprime_chart(vt, &mut cache, certificate_resolution)?];
    for cell in 0..4 {
        charts.push(build_asecond_chart(vt, &mut cache, cell, certificate_resolution)?);
    }
    Ok(charts)
}

/// Assembles `g` from the five charts. `L′` is left at zero until
/// [`derive_translation_constant`] fixes it.
pub fn assemble_g<T: Real>(charts: Vec<CellChart<T>>, vt: VertexTable<T>, constants: ConstantsReport<T>) -> Result<GlobalMap<T>> {
    if charts.len() != 5 {
        return Err(Error::Construction(format!("expected 5 charts, got {}", charts.len())));
    }
    Ok(GlobalMap {
        level: constants.level,
        constants,
        l_prime: T::zero(),
        mode: Mode::G,
        vertex_table: Arc::new(vt),
        charts: charts.into(),
    })
}

#[derive(Clone, Debug)]
pub struct TranslationReport<T> {
    pub l_prime: T,
    pub vertex_max: T,
    pub argmax: String,
    /// Largest sampled `g₃ − L′` over the slab.
    pub sampled_max: T,
    pub samples: usize,
}

/// `L′ = 1 + max` third coordinate over all chart image vertices, confirmed
/// by sampling the slab: `g₃ − L′ ≤ −1` must hold everywhere.
pub fn derive_translation_constant<T: Real>(gm: &GlobalMap<T>, samples: usize, seed: u64) -> Result<TranslationReport<T>> {
    let mut vertex_max = T::min_value().unwrap();
    let mut argmax = String::new();
    for chart in gm.charts.iter() {
        for face in &chart.faces {
            for name in face {
                let z = gm.vertex_table.image(*name).z;
                if z > vertex_max {
                    vertex_max = z;
                    argmax = name.to_string();
                }
            }
        }
    }
    let l_prime = vertex_max + T::one();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let level = to_f64(gm.level);
    let mut sampled_max = T::min_value().unwrap();
    let tau = lit::<T>(1e-9) * l_prime;
    for _ in 0..samples {
        let x = V3::new(
            lit::<T>(rng.random_range(-4.0..8.0)),
            lit(rng.random_range(-4.0..8.0)),
            lit(rng.random_range(0.0..=level)),
        );
        let d = gm.g(&x).z - l_prime;
        sampled_max = sampled_max.max(d);
        if d > -T::one() + tau {
            return Err(Error::Construction(format!(
                "g₃ − L′ = {d} > −1 at {:?}",
                x.as_slice()
            )));
        }
    }
    Ok(TranslationReport { l_prime, vertex_max, argmax, sampled_max, samples })
}

/// Derives the constants, builds the charts and returns `f` (mode `F`).
pub fn build_global_map<T: Real>(cfg: &BuildConfig) -> Result<GlobalMap<T>> {
    build_global_map_with_report(cfg).map(|(gm, _)| gm)
}

pub fn build_global_map_with_report<T: Real>(cfg: &BuildConfig) -> Result<(GlobalMap<T>, TranslationReport<T>)> {
    let constants = derive_beam_constants::<T>(cfg.resolution)?;
    let vt = build_vertex_table(constants.level)?;
    let charts = build_charts(&vt, cfg.certificate_resolution)?;
    let mut gm = assemble_g(charts, vt, constants)?;
    let tr = derive_translation_constant(&gm, cfg.translation_samples, cfg.seed)?;
    gm.l_prime = tr.l_prime;
    gm.mode = Mode::F;
    Ok((gm, tr))
}

impl<T: Real> GlobalMap<T> {
    pub fn vertex_image(&self, name: VertexName) -> V3<T> {
        self.vertex_table.image(name)
    }
}
