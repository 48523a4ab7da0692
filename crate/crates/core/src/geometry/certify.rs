use std::collections::HashMap;

use super::{Boundary, StarShape};
use crate::error::{Error, Result};
use crate::scalar::{line_angle, line_plane_angle, lit, to_f64, Real, V3};

/// Sampled angles below this many radians fail certification.
pub const MIN_ANGLE: f64 = 1e-3;
pub const DEFAULT_RESOLUTION: usize = 16;

/// Fraction of the observed minimum angle published as θ.
const SAFETY: f64 = 0.9;

/// Non-tangency certificate for a star centre: boundary pairs closer than
/// `epsilon` subtend an angle above `theta` with the ray from the centre.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certificate<T> {
    pub theta: T,
    pub epsilon: T,
    pub resolution: usize,
    /// Smallest angle at vertex/edge/face incidences.
    pub exact_min: T,
    /// Smallest angle over the sampled close pairs.
    pub sampled_min: T,
}

/// Lipschitz constants `(η, T)` of the boundary projection near a point `ξ`:
/// `|ψ(x) − ψ(y)| ≤ (T / |ξ − a|)|x − y|` on `B(ξ, η|ξ − a|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LipschitzConstants<T> {
    pub eta: T,
    pub t: T,
}

pub fn certify<T: Real>(shape: &StarShape<T>, a: &V3<T>, resolution: usize) -> Result<Certificate<T>> {
    let shape = shape.with_centre(*a)?;
    let tau = shape.tolerance();
    let min_angle = lit::<T>(MIN_ANGLE);

    let mut exact_min = T::pi();
    let epsilon;
    match shape.boundary() {
        Boundary::Polygon(p) => {
            let c = p.frame().local(a);
            let mut margin = T::max_value().unwrap();
            for i in 0..p.edge_count() {
                let m = p.edge_margin(i, &c);
                if m <= tau {
                    return Err(Error::Certification(format!("edge {i} is not visible from the centre")));
                }
                margin = margin.min(m);
                let (u, v) = p.edge(i);
                exact_min = exact_min.min(line_angle(&(u - a), &(v - u))).min(line_angle(&(v - a), &(v - u)));
            }
            epsilon = margin;
        }
        Boundary::Polyhedron(p) => {
            let mut margin = T::max_value().unwrap();
            for (fi, face) in p.faces().iter().enumerate() {
                let m = p.face_margin(fi, a);
                if m <= tau {
                    return Err(Error::Certification(format!("face {fi} is not visible from the centre")));
                }
                margin = margin.min(m);
                let n = face.normal();
                let k = face.indices.len();
                for j in 0..k {
                    let u = p.vertices()[face.indices[j]];
                    let v = p.vertices()[face.indices[(j + 1) % k]];
                    exact_min = exact_min
                        .min(line_plane_angle(&(u - a), &n))
                        .min(line_angle(&(u - a), &(v - u)))
                        .min(line_angle(&(v - a), &(v - u)));
                }
            }
            epsilon = margin;
        }
    }

    let sampled_min = sampled_min_angle(&shape, a, epsilon, resolution);
    let observed = exact_min.min(sampled_min);
    if observed < min_angle {
        return Err(Error::Certification(format!(
            "minimal boundary angle {:.3e} rad is below {MIN_ANGLE:e}",
            to_f64(observed)
        )));
    }
    let cap = T::frac_pi_4() * lit(0.999);
    let theta = (observed * lit(SAFETY)).min(cap);
    Ok(Certificate { theta, epsilon, resolution, exact_min, sampled_min })
}

/// Minimal angle between `L(a, w)` and `L(w, v)` over sampled boundary pairs
/// with `0 < |w − v| < ε`, found with a uniform spatial hash of cell size ε.
fn sampled_min_angle<T: Real>(shape: &StarShape<T>, a: &V3<T>, eps: T, resolution: usize) -> T {
    let pts: Vec<V3<T>> = shape.sample_boundary(resolution).into_iter().map(|(p, _)| p).collect();
    let key = |p: &V3<T>| -> [i64; 3] {
        let k = |c: T| to_f64((c / eps).floor()) as i64;
        [k(p.x), k(p.y), k(p.z)]
    };
    let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    for (i, p) in pts.iter().enumerate() {
        grid.entry(key(p)).or_default().push(i);
    }
    let floor = shape.tolerance();
    let mut best = T::pi();
    for (i, w) in pts.iter().enumerate() {
        let [kx, ky, kz] = key(w);
        let ray = w - a;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(cell) = grid.get(&[kx + dx, ky + dy, kz + dz]) else { continue };
                    for &j in cell {
                        if j == i {
                            continue;
                        }
                        let chord = pts[j] - w;
                        let d = chord.norm();
                        if d > floor && d < eps {
                            best = best.min(line_angle(&ray, &chord));
                        }
                    }
                }
            }
        }
    }
    best
}

pub fn lipschitz_constants<T: Real>(shape: &StarShape<T>) -> Result<LipschitzConstants<T>> {
    let cert = shape.certificate().ok_or(Error::MissingCertificate)?;
    let r = shape.max_radius();
    let half = cert.theta * lit(0.5);
    let s = half.sin();
    let quarter = lit::<T>(0.25);
    let eta = lit::<T>(0.5).min(s * quarter).min(cert.epsilon * s * quarter / r);
    Ok(LipschitzConstants { eta, t: r * lit(2.0) / s })
}
