//! Radial extension of a boundary map between star-shaped regions:
//! `x ↦ b + (|x − a| / |ψ_A(x) − a|)(f(ψ_A(x)) − b)` and its inverse.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{kernel_centroid, Boundary, Polygon, StarShape};
use crate::scalar::{from_usize, lit, tol, to_f64, Real, M3, V2, V3};
use crate::zorich::f_eval;

/// Closed-form maps used directly on a facet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirectFormula {
    Identity,
    ZorichF,
}

impl DirectFormula {
    pub fn eval<T: Real>(&self, x: &V3<T>) -> V3<T> {
        match self {
            Self::Identity => *x,
            Self::ZorichF => f_eval(x),
        }
    }
}

/// The affine map of a plane triangle determined by its vertex images.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineTri<T: Real> {
    pub src: [V3<T>; 3],
    pub dst: [V3<T>; 3],
}

fn barycentric<T: Real>(tri: &[V3<T>; 3], x: &V3<T>) -> V2<T> {
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let w = x - tri[0];
    let (a, b, c) = (e1.dot(&e1), e1.dot(&e2), e2.dot(&e2));
    let (p, q) = (w.dot(&e1), w.dot(&e2));
    let det = a * c - b * b;
    V2::new((p * c - q * b) / det, (q * a - p * b) / det)
}

impl<T: Real> AffineTri<T> {
    pub fn new(src: [V3<T>; 3], dst: [V3<T>; 3]) -> Self {
        Self { src, dst }
    }

    pub fn eval(&self, x: &V3<T>) -> V3<T> {
        let l = barycentric(&self.src, x);
        self.dst[0] + (self.dst[1] - self.dst[0]) * l.x + (self.dst[2] - self.dst[0]) * l.y
    }

    pub fn inverse(&self, y: &V3<T>) -> V3<T> {
        Self { src: self.dst, dst: self.src }.eval(y)
    }
}

/// How one facet of the domain is carried to the matching codomain facet.
#[derive(Clone, Debug)]
pub enum Piece<T: Real> {
    /// Polygon edge mapped linearly in arclength onto a segment.
    Segment { image: [V3<T>; 2] },
    /// Planar face mapped by a two-dimensional radial extension.
    Nested(Box<RadialMap<T>>),
    Affine(AffineTri<T>),
    Direct { formula: DirectFormula, inverse: Option<AffineTri<T>> },
}

/// Facet `i` of the domain goes to facet `i` of the codomain via `pieces[i]`.
#[derive(Clone, Debug)]
pub struct BoundaryMap<T: Real> {
    pub pieces: Vec<Piece<T>>,
}

#[derive(Clone, Debug)]
pub struct RadialMap<T: Real> {
    domain: StarShape<T>,
    codomain: StarShape<T>,
    boundary: BoundaryMap<T>,
}

impl<T: Real> RadialMap<T> {
    pub fn new(domain: StarShape<T>, codomain: StarShape<T>, boundary: BoundaryMap<T>) -> Result<Self> {
        if domain.certificate().is_none() || codomain.certificate().is_none() {
            return Err(Error::MissingCertificate);
        }
        if domain.facet_count() != codomain.facet_count() || boundary.pieces.len() != domain.facet_count() {
            return Err(Error::BoundaryMap(format!(
                "{} domain facets, {} codomain facets, {} pieces",
                domain.facet_count(),
                codomain.facet_count(),
                boundary.pieces.len()
            )));
        }
        Ok(Self { domain, codomain, boundary })
    }

    pub fn domain(&self) -> &StarShape<T> {
        &self.domain
    }

    pub fn codomain(&self) -> &StarShape<T> {
        &self.codomain
    }

    pub fn boundary(&self) -> &BoundaryMap<T> {
        &self.boundary
    }

    /// Evaluates the boundary map on a point of domain facet `facet`.
    pub fn eval_on_facet(&self, x: &V3<T>, facet: usize) -> Result<V3<T>> {
        match &self.boundary.pieces[facet] {
            Piece::Segment { image } => {
                let (p, q) = edge(&self.domain, facet);
                let s = segment_param(&p, &q, x);
                Ok(image[0] + (image[1] - image[0]) * s)
            }
            Piece::Nested(m) => m.eval_lenient(x),
            Piece::Affine(a) => Ok(a.eval(x)),
            Piece::Direct { formula, .. } => Ok(formula.eval(x)),
        }
    }

    /// Inverts the boundary map on a point of codomain facet `facet`.
    pub fn invert_on_facet(&self, y: &V3<T>, facet: usize) -> Result<V3<T>> {
        match &self.boundary.pieces[facet] {
            Piece::Segment { image } => {
                let (p, q) = edge(&self.domain, facet);
                let s = segment_param(&image[0], &image[1], y);
                Ok(p + (q - p) * s)
            }
            Piece::Nested(m) => m.inverse_lenient(y),
            Piece::Affine(a) => Ok(a.inverse(y)),
            Piece::Direct { formula: DirectFormula::Identity, .. } => Ok(*y),
            Piece::Direct { inverse: Some(a), .. } => Ok(a.inverse(y)),
            Piece::Direct { inverse: None, .. } => {
                Err(Error::BoundaryMap(format!("facet {facet} has no inverse")))
            }
        }
    }

    pub fn eval(&self, x: &V3<T>) -> Result<V3<T>> {
        self.radial(x, true)
    }

    /// Evaluation that tolerates points marginally outside the domain.
    pub fn eval_lenient(&self, x: &V3<T>) -> Result<V3<T>> {
        self.radial(x, false)
    }

    fn radial(&self, x: &V3<T>, strict: bool) -> Result<V3<T>> {
        let a = self.domain.centre();
        let b = self.codomain.centre();
        if (x - a).norm() <= self.domain.tolerance() {
            return Ok(b);
        }
        let hit = if strict { self.domain.psi(x)? } else { self.domain.psi_lenient(x)? };
        let fx = self.eval_on_facet(&hit.point, hit.facet)?;
        Ok(b + (fx - b) / hit.t)
    }

    pub fn inverse(&self, y: &V3<T>) -> Result<V3<T>> {
        self.radial_inv(y, true)
    }

    fn inverse_lenient(&self, y: &V3<T>) -> Result<V3<T>> {
        self.radial_inv(y, false)
    }

    fn radial_inv(&self, y: &V3<T>, strict: bool) -> Result<V3<T>> {
        let a = self.domain.centre();
        let b = self.codomain.centre();
        if (y - b).norm() <= self.codomain.tolerance() {
            return Ok(a);
        }
        let hit = if strict { self.codomain.psi(y)? } else { self.codomain.psi_lenient(y)? };
        let gy = self.invert_on_facet(&hit.point, hit.facet)?;
        Ok(a + (gy - a) / hit.t)
    }

    /// Absolute seam tolerance `1e-9` scaled by the larger diameter.
    pub fn seam_tolerance(&self) -> T {
        tol::<T>(1e-9) * self.domain.diameter().max(self.codomain.diameter()).max(T::one())
    }
}

fn edge<T: Real>(shape: &StarShape<T>, i: usize) -> (V3<T>, V3<T>) {
    match shape.boundary() {
        Boundary::Polygon(p) => p.edge(i),
        Boundary::Polyhedron(_) => unreachable!("segment pieces only occur on polygons"),
    }
}

fn segment_param<T: Real>(p: &V3<T>, q: &V3<T>, x: &V3<T>) -> T {
    let e = q - p;
    ((x - p).dot(&e) / e.norm_squared()).max(T::zero()).min(T::one())
}

pub fn radial_eval<T: Real>(m: &RadialMap<T>, x: &V3<T>) -> Result<V3<T>> {
    m.eval(x)
}

pub fn radial_inverse<T: Real>(m: &RadialMap<T>, y: &V3<T>) -> Result<V3<T>> {
    m.inverse(y)
}

/// Outcome of [`validate_boundary_map`].
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub pass: bool,
    pub samples: usize,
    /// Largest distance of a sampled image from the codomain boundary.
    pub off_boundary: f64,
    /// Largest disagreement between the pieces on a shared edge or vertex.
    pub seam: f64,
    pub injectivity_violations: usize,
    pub worst: Vec<String>,
}

impl ValidationReport {
    fn offend(&mut self, msg: String) {
        self.pass = false;
        if self.worst.len() < 16 {
            self.worst.push(msg);
        }
    }
}

/// Checks that sampled boundary images lie on the codomain boundary, that
/// pieces agree where facets meet, and that no two distant samples collide.
pub fn validate_boundary_map<T: Real>(m: &RadialMap<T>, samples: usize) -> ValidationReport {
    let mut rep = ValidationReport {
        pass: true,
        samples: 0,
        off_boundary: 0.0,
        seam: 0.0,
        injectivity_violations: 0,
        worst: Vec::new(),
    };
    let geom_tol = to_f64(m.codomain.tolerance()) * 1e3;
    let seam_tol = to_f64(m.seam_tolerance());

    let mut seam = |i: usize, j: usize, x: V3<T>| {
        if let (Ok(p), Ok(q)) = (m.eval_on_facet(&x, i), m.eval_on_facet(&x, j)) {
            let d = to_f64((p - q).norm());
            if d > rep.seam {
                rep.seam = d;
            }
            if d > seam_tol {
                rep.offend(format!("seam between facets {i} and {j} at {:?}: {d:.3e}", x.as_slice()));
            }
        }
    };
    match m.domain.boundary() {
        Boundary::Polygon(p) => {
            let n = p.edge_count();
            for k in 0..n {
                seam((k + n - 1) % n, k, p.vertices()[k]);
            }
        }
        Boundary::Polyhedron(p) => {
            let res = samples.max(2);
            for (i, j, a, b) in p.shared_edges() {
                for k in 0..=res {
                    let s = from_usize::<T>(k) / from_usize::<T>(res);
                    seam(i, j, a + (b - a) * s);
                }
            }
        }
    }

    let pts = m.domain.sample_boundary(samples.max(2));
    let mut images: Vec<(V3<f64>, V3<f64>)> = Vec::with_capacity(pts.len());
    for (x, facet) in &pts {
        match m.eval_on_facet(x, *facet) {
            Ok(y) => {
                let d = to_f64(m.codomain.distance_to_boundary(&y));
                rep.off_boundary = rep.off_boundary.max(d);
                if d > geom_tol {
                    rep.offend(format!("facet {facet}: image {:?} is {d:.3e} off the codomain boundary", y.as_slice()));
                }
                images.push((x.map(to_f64), y.map(to_f64)));
            }
            Err(e) => rep.offend(format!("facet {facet}: {e}")),
        }
    }
    rep.samples = images.len();

    // samples farther apart than τ must not land within τ/10 of each other
    let tau = 1e-6 * to_f64(m.domain.diameter());
    let cell = tau / 10.0;
    let key = |y: &V3<f64>| [(y.x / cell).floor() as i64, (y.y / cell).floor() as i64, (y.z / cell).floor() as i64];
    let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    for (i, (_, y)) in images.iter().enumerate() {
        grid.entry(key(y)).or_default().push(i);
    }
    for (i, (x, y)) in images.iter().enumerate() {
        let [kx, ky, kz] = key(y);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    for &j in grid.get(&[kx + dx, ky + dy, kz + dz]).map(Vec::as_slice).unwrap_or(&[]) {
                        if j > i && (images[j].1 - y).norm() < cell && (images[j].0 - x).norm() > tau {
                            rep.injectivity_violations += 1;
                        }
                    }
                }
            }
        }
    }
    if rep.injectivity_violations > 0 {
        let n = rep.injectivity_violations;
        rep.offend(format!("{n} sample pairs collapse under the boundary map"));
    }
    rep
}

/// Sampled `(min, max)` of `|m(x) − m(y)| / |x − y|` over random pairs in the
/// domain; half the pairs are global, half are local perturbations.
pub fn empirical_bilipschitz<T: Real>(m: &RadialMap<T>, pairs: usize, seed: u64) -> Result<(T, T)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lo = T::max_value().unwrap();
    let mut hi = T::zero();
    let scale = m.domain.diameter() * lit(1e-3);
    for i in 0..pairs {
        let x = m.domain.sample_interior(&mut rng);
        let y = if i % 2 == 0 {
            m.domain.sample_interior(&mut rng)
        } else {
            let d = m.domain.sample_interior(&mut rng) - m.domain.centre();
            let y = x + d * (scale / m.domain.diameter());
            if m.domain.locate(&y) != crate::geometry::Location::Interior {
                continue;
            }
            y
        };
        let d = (x - y).norm();
        if d <= T::zero() {
            continue;
        }
        let r = (m.eval(&x)? - m.eval(&y)?).norm() / d;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok((lo, hi))
}

/// Picks a certified star centre for a polygon: the vertex centroid, or the
/// centroid of the visibility kernel when the former fails.
pub fn certified_polygon<T: Real>(vertices: Vec<V3<T>>, resolution: usize) -> Result<StarShape<T>> {
    let n = from_usize::<T>(vertices.len());
    let centroid = vertices.iter().fold(V3::zeros(), |s, v| s + v) / n;
    let first = Polygon::new(vertices.clone(), centroid)
        .map(StarShape::from)
        .and_then(|s| s.certified(resolution));
    match first {
        Ok(s) => Ok(s),
        Err(_) => {
            let probe = crate::geometry::PlaneFrame::fit(&vertices)?;
            let local: Vec<V2<T>> = vertices.iter().map(|v| probe.local(v)).collect();
            let k = kernel_centroid(&local)
                .ok_or_else(|| Error::Certification("polygon has an empty visibility kernel".into()))?;
            StarShape::from(Polygon::new(vertices, probe.world(&k))?).certified(resolution)
        }
    }
}

/// Nested two-dimensional radial piece for a planar face: the edges are
/// mapped affinely onto the corresponding edges of `image`.
pub fn face_piece<T: Real>(domain: Vec<V3<T>>, image: Vec<V3<T>>, resolution: usize) -> Result<Piece<T>> {
    if domain.len() != image.len() {
        return Err(Error::BoundaryMap("face and image have different vertex counts".into()));
    }
    let n = image.len();
    let pieces = (0..n).map(|k| Piece::Segment { image: [image[k], image[(k + 1) % n]] }).collect();
    let dom = certified_polygon(domain, resolution)?;
    let cod = certified_polygon(image, resolution)?;
    Ok(Piece::Nested(Box::new(RadialMap::new(dom, cod, BoundaryMap { pieces })?)))
}

/// A linear map `x ↦ s·x` as a radial map between two scaled copies of a shape.
pub fn scaling_map<T: Real>(shape: &StarShape<T>, s: T, resolution: usize) -> Result<RadialMap<T>> {
    let poly = shape
        .polyhedron()
        .ok_or_else(|| Error::Precondition("scaling map needs a polyhedron".into()))?;
    let lin = M3::identity() * s;
    let verts: Vec<V3<T>> = poly.vertices().iter().map(|v| lin * v).collect();
    let loops = poly.faces().iter().map(|f| f.indices.clone()).collect();
    let cod = crate::geometry::Polyhedron::new(verts, loops, lin * shape.centre())?;
    let cod = StarShape::from(cod).certified(resolution)?;
    let pieces = poly
        .faces()
        .iter()
        .map(|f| {
            let src = [poly.vertices()[f.indices[0]], poly.vertices()[f.indices[1]], poly.vertices()[f.indices[2]]];
            Piece::Affine(AffineTri::new(src, src.map(|v| lin * v)))
        })
        .collect();
    let dom = if shape.certificate().is_some() { shape.clone() } else { shape.clone().certified(resolution)? };
    RadialMap::new(dom, cod, BoundaryMap { pieces })
}

/// The identity on a certified shape.
pub fn identity_map<T: Real>(shape: &StarShape<T>) -> Result<RadialMap<T>> {
    let pieces = (0..shape.facet_count())
        .map(|_| Piece::Direct { formula: DirectFormula::Identity, inverse: None })
        .collect();
    RadialMap::new(shape.clone(), shape.clone(), BoundaryMap { pieces })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Polyhedron;
    use proptest::prelude::*;

    fn cube() -> StarShape<f64> {
        StarShape::from(Polyhedron::cuboid(V3::repeat(-1.0), V3::repeat(1.0), V3::zeros()).unwrap())
            .certified(8)
            .unwrap()
    }

    #[test]
    fn identity_chart() {
        let m = identity_map(&cube()).unwrap();
        let x = V3::new(0.3, -0.2, 0.9);
        assert!((m.eval(&x).unwrap() - x).norm() < 1e-15);
        assert!((m.inverse(&x).unwrap() - x).norm() < 1e-15);
        assert_eq!(m.eval(&V3::zeros()).unwrap(), V3::zeros());
        assert!(validate_boundary_map(&m, 8).pass);
        let (lo, hi) = empirical_bilipschitz(&m, 200, 1).unwrap();
        assert!((lo - 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
        assert!(matches!(m.eval(&V3::new(2.0, 0.0, 0.0)), Err(Error::Exterior)));
    }

    #[test]
    fn dilation_chart() {
        let m = scaling_map(&cube(), 2.0, 8).unwrap();
        let (lo, hi) = empirical_bilipschitz(&m, 400, 2).unwrap();
        assert!((lo - 2.0).abs() < 1e-9 && (hi - 2.0).abs() < 1e-9, "{lo} {hi}");
        let y = V3::new(1.5, -0.3, 0.2);
        assert!((m.eval(&m.inverse(&y).unwrap()).unwrap() - y).norm() < 1e-12);
        assert!(validate_boundary_map(&m, 8).pass);
    }

    #[test]
    fn uncertified_shapes_are_refused() {
        let raw = StarShape::from(Polyhedron::cuboid(V3::repeat(-1.0), V3::repeat(1.0), V3::zeros()).unwrap());
        assert!(matches!(identity_map(&raw), Err(Error::MissingCertificate)));
    }

    fn skewed_square_map() -> RadialMap<f64> {
        let dom = vec![V3::new(0.0, 0.0, 0.0), V3::new(2.0, 0.0, 0.0), V3::new(2.0, 2.0, 0.0), V3::new(0.0, 2.0, 0.0)];
        let img = vec![V3::new(0.0, 0.0, 0.0), V3::new(3.0, 0.5, 0.0), V3::new(2.5, 2.0, 0.0), V3::new(-0.5, 1.0, 0.0)];
        match face_piece(dom, img, 16).unwrap() {
            Piece::Nested(m) => *m,
            _ => unreachable!(),
        }
    }

    #[test]
    fn perturbed_vertex_breaks_seams() {
        let m = skewed_square_map();
        assert!(validate_boundary_map(&m, 16).pass);
        let mut broken = m.clone();
        if let Piece::Segment { image } = &mut broken.boundary.pieces[1] {
            image[0] += V3::new(0.1, 0.0, 0.0);
        }
        let rep = validate_boundary_map(&broken, 16);
        assert!(!rep.pass);
        assert!(rep.worst.iter().any(|w| w.contains("facets 0 and 1")));
    }

    proptest! {
        #[test]
        fn radial_fraction_and_roundtrip(u in 0.01f64..1.99, v in 0.01f64..1.99) {
            let m = skewed_square_map();
            let x = V3::new(u, v, 0.0);
            let a = m.domain().centre();
            let b = m.codomain().centre();
            prop_assume!((x - a).norm() > 1e-6);
            let y = m.eval(&x).unwrap();
            let hit = m.domain().psi(&x).unwrap();
            let fb = m.eval_on_facet(&hit.point, hit.facet).unwrap();
            let lhs = (y - b).norm() / (fb - b).norm();
            let rhs = (x - a).norm() / (hit.point - a).norm();
            prop_assert!((lhs - rhs).abs() <= 1e-10);
            prop_assert!((m.inverse(&y).unwrap() - x).norm() <= 1e-10);
        }
    }
}
