//! Star-shaped polygons and polyhedra: membership, the radial boundary
//! projection `ψ`, and certification of non-tangential star centres.

mod certify;
mod frame;
mod kernel;
mod polygon;
mod polyhedron;

pub use certify::{Certificate, LipschitzConstants, DEFAULT_RESOLUTION, MIN_ANGLE};
pub use frame::PlaneFrame;
pub use kernel::{kernel_centroid, planar_kernel};
pub use polygon::Polygon;
pub use polyhedron::{Face, Polyhedron};

use crate::error::Result;
use crate::scalar::{Real, V3};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Interior,
    Boundary(usize),
    Exterior,
}

/// Result of casting the ray from the star centre through a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryHit<T> {
    pub point: V3<T>,
    pub facet: usize,
    /// `|point − a| / |x − a|`.
    pub t: T,
    /// Position along the hit edge, for polygons.
    pub edge_param: Option<T>,
}

#[derive(Clone, Debug)]
pub enum Boundary<T: Real> {
    Polygon(Polygon<T>),
    Polyhedron(Polyhedron<T>),
}

#[derive(Clone, Debug)]
pub struct StarShape<T: Real> {
    boundary: Boundary<T>,
    certificate: Option<Certificate<T>>,
}

impl<T: Real> From<Polygon<T>> for StarShape<T> {
    fn from(p: Polygon<T>) -> Self {
        Self { boundary: Boundary::Polygon(p), certificate: None }
    }
}

impl<T: Real> From<Polyhedron<T>> for StarShape<T> {
    fn from(p: Polyhedron<T>) -> Self {
        Self { boundary: Boundary::Polyhedron(p), certificate: None }
    }
}

macro_rules! dispatch {
    ($self:expr, $p:ident => $e:expr) => {
        match &$self.boundary {
            Boundary::Polygon($p) => $e,
            Boundary::Polyhedron($p) => $e,
        }
    };
}

impl<T: Real> StarShape<T> {
    pub fn boundary(&self) -> &Boundary<T> {
        &self.boundary
    }

    pub fn polygon(&self) -> Option<&Polygon<T>> {
        match &self.boundary {
            Boundary::Polygon(p) => Some(p),
            Boundary::Polyhedron(_) => None,
        }
    }

    pub fn polyhedron(&self) -> Option<&Polyhedron<T>> {
        match &self.boundary {
            Boundary::Polyhedron(p) => Some(p),
            Boundary::Polygon(_) => None,
        }
    }

    pub fn dim(&self) -> usize {
        match self.boundary {
            Boundary::Polygon(_) => 2,
            Boundary::Polyhedron(_) => 3,
        }
    }

    pub fn centre(&self) -> V3<T> {
        dispatch!(self, p => p.centre())
    }

    pub fn diameter(&self) -> T {
        dispatch!(self, p => p.diameter())
    }

    pub fn tolerance(&self) -> T {
        dispatch!(self, p => p.tolerance())
    }

    pub fn vertices(&self) -> &[V3<T>] {
        dispatch!(self, p => p.vertices())
    }

    pub fn facet_count(&self) -> usize {
        match &self.boundary {
            Boundary::Polygon(p) => p.edge_count(),
            Boundary::Polyhedron(p) => p.faces().len(),
        }
    }

    pub fn certificate(&self) -> Option<&Certificate<T>> {
        self.certificate.as_ref()
    }

    /// Same boundary with a new centre; any certificate is dropped.
    pub fn with_centre(&self, a: V3<T>) -> Result<Self> {
        let boundary = match &self.boundary {
            Boundary::Polygon(p) => Boundary::Polygon(p.with_centre(a)?),
            Boundary::Polyhedron(p) => Boundary::Polyhedron(p.with_centre(a)?),
        };
        Ok(Self { boundary, certificate: None })
    }

    /// Certifies the current centre and attaches the certificate.
    pub fn certified(mut self, resolution: usize) -> Result<Self> {
        self.certificate = Some(certify::certify(&self, &self.centre(), resolution)?);
        Ok(self)
    }

    pub fn locate(&self, x: &V3<T>) -> Location {
        dispatch!(self, p => p.locate(x))
    }

    pub fn psi(&self, x: &V3<T>) -> Result<BoundaryHit<T>> {
        dispatch!(self, p => p.psi(x))
    }

    /// Ray cast that tolerates points marginally outside the closed region.
    pub fn psi_lenient(&self, x: &V3<T>) -> Result<BoundaryHit<T>> {
        dispatch!(self, p => p.psi_lenient(x))
    }

    pub fn hit_on_facet(&self, x: &V3<T>, facet: usize) -> BoundaryHit<T> {
        dispatch!(self, p => p.hit_on_facet(x, facet))
    }

    pub fn distance_to_boundary(&self, x: &V3<T>) -> T {
        match &self.boundary {
            Boundary::Polygon(p) => p.distance_to_boundary(x).0,
            Boundary::Polyhedron(p) => p.distance_to_boundary(x).0,
        }
    }

    pub fn sample_boundary(&self, resolution: usize) -> Vec<(V3<T>, usize)> {
        dispatch!(self, p => p.sample_boundary(resolution))
    }

    /// Uniform sample from the open region by rejection from a bounding box.
    pub fn sample_interior<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> V3<T> {
        let unit = |rng: &mut R| crate::scalar::lit::<T>(rng.random::<f64>());
        match &self.boundary {
            Boundary::Polygon(p) => {
                let loc = p.local_vertices();
                let (lo, hi) = loc.iter().fold((loc[0], loc[0]), |(lo, hi), q| (lo.inf(q), hi.sup(q)));
                loop {
                    let q = crate::scalar::V2::new(lo.x + (hi.x - lo.x) * unit(rng), lo.y + (hi.y - lo.y) * unit(rng));
                    let x = p.frame().world(&q);
                    if p.locate(&x) == Location::Interior {
                        return x;
                    }
                }
            }
            Boundary::Polyhedron(p) => {
                let v = p.vertices();
                let (lo, hi) = v.iter().fold((v[0], v[0]), |(lo, hi), q| (lo.inf(q), hi.sup(q)));
                loop {
                    let x = V3::new(
                        lo.x + (hi.x - lo.x) * unit(rng),
                        lo.y + (hi.y - lo.y) * unit(rng),
                        lo.z + (hi.z - lo.z) * unit(rng),
                    );
                    if p.locate(&x) == Location::Interior {
                        return x;
                    }
                }
            }
        }
    }

    /// `max |w − a|` over the boundary, attained at a vertex.
    pub fn max_radius(&self) -> T {
        let a = self.centre();
        self.vertices().iter().map(|w| (w - a).norm()).fold(T::zero(), |m, r| m.max(r))
    }
}

pub fn locate<T: Real>(shape: &StarShape<T>, x: &V3<T>) -> Location {
    shape.locate(x)
}

pub fn psi<T: Real>(shape: &StarShape<T>, x: &V3<T>) -> Result<BoundaryHit<T>> {
    shape.psi(x)
}

pub fn certify_star_centre<T: Real>(shape: &StarShape<T>, a: &V3<T>, resolution: usize) -> Result<Certificate<T>> {
    certify::certify(shape, a, resolution)
}

pub fn local_lipschitz_constants<T: Real>(shape: &StarShape<T>) -> Result<LipschitzConstants<T>> {
    certify::lipschitz_constants(shape)
}
