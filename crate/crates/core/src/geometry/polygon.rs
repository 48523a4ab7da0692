use super::frame::{self, PlaneFrame};
use super::{BoundaryHit, Location};
use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, tol, Real, V2, V3};

/// A simple planar polygon, possibly embedded in a plane of R³, with a star centre.
#[derive(Clone, Debug)]
pub struct Polygon<T: Real> {
    vertices: Vec<V3<T>>,
    frame: PlaneFrame<T>,
    local: Vec<V2<T>>,
    centre: V3<T>,
    diameter: T,
}

impl<T: Real> Polygon<T> {
    pub fn new(vertices: Vec<V3<T>>, centre: V3<T>) -> Result<Self> {
        if vertices.iter().any(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(Error::MalformedShape("non-finite vertex".into()));
        }
        let frame = PlaneFrame::fit(&vertices)?;
        let diameter = diameter(&vertices);
        let tau = tol::<T>(1e-9) * diameter;
        if let Some(v) = vertices.iter().find(|v| frame.offset(v).abs() > tau) {
            return Err(Error::MalformedShape(format!(
                "vertex {:?} is off the polygon plane",
                v.as_slice()
            )));
        }
        let local: Vec<V2<T>> = vertices.iter().map(|v| frame.local(v)).collect();
        frame::check_simple(&local, tol::<T>(1e-12) * diameter)?;
        let poly = Self { vertices, frame, local, centre, diameter };
        poly.check_centre(&centre)?;
        Ok(poly)
    }

    /// Polygon in the `x₃ = 0` plane from planar coordinates.
    pub fn planar(vertices: &[V2<T>], centre: V2<T>) -> Result<Self> {
        let lift = |p: &V2<T>| V3::new(p.x, p.y, T::zero());
        Self::new(vertices.iter().map(lift).collect(), lift(&centre))
    }

    fn check_centre(&self, c: &V3<T>) -> Result<()> {
        match self.locate(c) {
            Location::Interior => Ok(()),
            Location::Boundary(_) => Err(Error::Certification("star centre lies on the boundary".into())),
            Location::Exterior => Err(Error::Certification("star centre lies outside the polygon".into())),
        }
    }

    pub fn with_centre(&self, centre: V3<T>) -> Result<Self> {
        let mut p = self.clone();
        p.check_centre(&centre)?;
        p.centre = centre;
        Ok(p)
    }

    pub fn vertices(&self) -> &[V3<T>] {
        &self.vertices
    }

    pub fn local_vertices(&self) -> &[V2<T>] {
        &self.local
    }

    pub fn frame(&self) -> &PlaneFrame<T> {
        &self.frame
    }

    pub fn centre(&self) -> V3<T> {
        self.centre
    }

    pub fn diameter(&self) -> T {
        self.diameter
    }

    pub fn edge_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge(&self, i: usize) -> (V3<T>, V3<T>) {
        (self.vertices[i], self.vertices[(i + 1) % self.vertices.len()])
    }

    pub fn tolerance(&self) -> T {
        tol::<T>(1e-12) * self.diameter
    }

    /// Signed area in the frame coordinates.
    pub fn signed_area(&self) -> T {
        frame::signed_area(&self.local)
    }

    /// Area centroid, lifted back to R³.
    pub fn centroid(&self) -> V3<T> {
        self.frame.world(&frame::area_centroid(&self.local))
    }

    pub fn vertex_centroid(&self) -> V3<T> {
        self.vertices.iter().fold(V3::zeros(), |s, v| s + v) / from_usize::<T>(self.vertices.len())
    }

    /// Distance to the boundary loop, the nearest edge and the parameter on it.
    pub fn distance_to_boundary(&self, x: &V3<T>) -> (T, usize, T) {
        let off = self.frame.offset(x);
        let (d, e, s) = frame::loop_distance(&self.local, &self.frame.local(x));
        ((d * d + off * off).sqrt(), e, s)
    }

    pub fn locate(&self, x: &V3<T>) -> Location {
        let tau = self.tolerance();
        if self.frame.offset(x).abs() > tau {
            return Location::Exterior;
        }
        let p = self.frame.local(x);
        let (d, e, _) = frame::loop_distance(&self.local, &p);
        if d <= tau {
            Location::Boundary(e)
        } else if frame::winding(&self.local, &p) != 0 {
            Location::Interior
        } else {
            Location::Exterior
        }
    }

    /// First boundary point on the ray from the centre through `x`.
    pub fn psi(&self, x: &V3<T>) -> Result<BoundaryHit<T>> {
        self.cast(x, true)
    }

    /// Like [`psi`](Self::psi) but accepts points slightly outside the
    /// polygon or off its plane, as produced by rounding in nested charts.
    pub fn psi_lenient(&self, x: &V3<T>) -> Result<BoundaryHit<T>> {
        self.cast(x, false)
    }

    fn cast(&self, x: &V3<T>, strict: bool) -> Result<BoundaryHit<T>> {
        let tau = self.tolerance();
        if strict && self.frame.offset(x).abs() > tau {
            return Err(Error::Exterior);
        }
        let c = self.frame.local(&self.centre);
        let d = self.frame.local(x) - c;
        let dn = d.norm();
        if dn <= tau {
            return Err(Error::AtCentre);
        }
        let stol = tol::<T>(1e-12);
        let tie = tol::<T>(1e-12);
        let mut best: Option<(T, usize, T)> = None;
        let n = self.local.len();
        for i in 0..n {
            let q0 = self.local[i];
            let e = self.local[(i + 1) % n] - q0;
            let den = frame::cross2(&d, &e);
            if den.abs() <= T::default_epsilon() * dn * e.norm() {
                continue;
            }
            let w = q0 - c;
            let t = frame::cross2(&w, &e) / den;
            let s = frame::cross2(&w, &d) / den;
            if t <= T::zero() || s < -stol || s > T::one() + stol {
                continue;
            }
            match best {
                Some((bt, _, _)) if t >= bt * (T::one() - tie) => {}
                _ => best = Some((t, i, s.max(T::zero()).min(T::one()))),
            }
        }
        let (t, facet, s) =
            best.ok_or_else(|| Error::MalformedShape("ray from the centre escapes the polygon".into()))?;
        if strict && t * dn < dn - tau {
            return Err(Error::Exterior);
        }
        let q0 = self.local[facet];
        let q1 = self.local[(facet + 1) % n];
        let point = self.frame.world(&(q0 + (q1 - q0) * s));
        Ok(BoundaryHit { point, facet, t, edge_param: Some(s) })
    }

    /// Projects a point known to lie on edge `facet` onto it.
    pub fn hit_on_facet(&self, x: &V3<T>, facet: usize) -> BoundaryHit<T> {
        let (a, b) = self.edge(facet);
        let e = b - a;
        let s = ((x - a).dot(&e) / e.norm_squared()).max(T::zero()).min(T::one());
        let point = a + e * s;
        let r = (x - self.centre).norm();
        let t = if r > T::zero() { (point - self.centre).norm() / r } else { T::one() };
        BoundaryHit { point, facet, t, edge_param: Some(s) }
    }

    /// Vertices plus `resolution` interior points per edge, tagged with their edge.
    pub fn sample_boundary(&self, resolution: usize) -> Vec<(V3<T>, usize)> {
        let mut out = Vec::with_capacity(self.edge_count() * (resolution + 1));
        for i in 0..self.edge_count() {
            let (a, b) = self.edge(i);
            for k in 0..=resolution {
                let s = from_usize::<T>(k) / from_usize::<T>(resolution + 1);
                out.push((a + (b - a) * s, i));
            }
        }
        out
    }

    /// Visibility kernel in frame coordinates, as a convex loop.
    pub fn kernel(&self) -> Vec<V2<T>> {
        super::kernel::planar_kernel(&self.local)
    }

    /// Signed distance of `p` (frame coordinates) from the inner side of edge `i`;
    /// positive when `p` is strictly on the interior side.
    pub(crate) fn edge_margin(&self, i: usize, p: &V2<T>) -> T {
        let n = self.local.len();
        let a = self.local[i];
        let e = self.local[(i + 1) % n] - a;
        let orient = self.signed_area().signum();
        frame::cross2(&e, &(p - a)) * orient / e.norm()
    }
}

pub(crate) fn diameter<T: Real>(v: &[V3<T>]) -> T {
    let mut d = T::zero();
    for i in 0..v.len() {
        for j in (i + 1)..v.len() {
            d = d.max((v[i] - v[j]).norm());
        }
    }
    if d > T::zero() {
        d
    } else {
        lit(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Polygon<f64> {
        let v = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)].map(|(a, b)| V2::new(a, b));
        Polygon::planar(&v, V2::zeros()).unwrap()
    }

    #[test]
    fn diagonal_ray_hits_corner() {
        let hit = square().psi(&V3::new(0.3, 0.3, 0.0)).unwrap();
        assert!((hit.point - V3::new(1.0, 1.0, 0.0)).norm() < 1e-14);
        assert!((hit.t - 10.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn corner_tie_goes_to_lower_edge() {
        let hit = square().psi(&V3::new(0.5, 0.5, 0.0)).unwrap();
        assert_eq!(hit.facet, 1);
    }

    #[test]
    fn rejects_bowtie() {
        let v = [(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)].map(|(a, b)| V2::new(a, b));
        assert!(Polygon::planar(&v, V2::new(0.5, 0.4)).is_err());
    }

    #[test]
    fn centre_must_be_interior() {
        let v = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)].map(|(a, b)| V2::new(a, b));
        assert!(Polygon::planar(&v, V2::new(1.0, 0.0)).is_err());
        assert!(Polygon::planar(&v, V2::new(3.0, 0.0)).is_err());
    }

    #[test]
    fn embedded_pentagon_hit() {
        let v = vec![
            V3::new(0.0, 0.0, 0.0),
            V3::new(0.0, 0.0, 4.0),
            V3::new(0.0, 4.0, 4.0),
            V3::new(0.0, 2.0, 3.5),
            V3::new(0.0, 2.0, 0.0),
        ];
        let p: Polygon<f64> = Polygon::new(v.clone(), V3::new(0.0, 1.0, 2.0)).unwrap();
        let hit = p.psi(&V3::new(0.0, 1.0, 3.0)).unwrap();
        assert!((hit.point - V3::new(0.0, 1.0, 4.0)).norm() < 1e-13);
        assert_eq!(hit.facet, 1);
        assert!((hit.t - 2.0).abs() < 1e-13);

        // brute-force oracle: every edge intersected with the vertical line x₂ = 1
        let mut best = f64::INFINITY;
        for i in 0..5 {
            let (a, b) = (v[i], v[(i + 1) % 5]);
            if (a.y - 1.0) * (b.y - 1.0) <= 0.0 && a.y != b.y {
                let s = (1.0 - a.y) / (b.y - a.y);
                let z = a.z + s * (b.z - a.z);
                if z > 2.0 {
                    best = best.min(z);
                }
            }
        }
        assert_eq!(best, 4.0);
    }

    #[test]
    fn exterior_and_centre_errors() {
        let s = square();
        assert!(matches!(s.psi(&V3::zeros()), Err(Error::AtCentre)));
        assert!(matches!(s.psi(&V3::new(2.0, 0.0, 0.0)), Err(Error::Exterior)));
        assert!(matches!(s.psi(&V3::new(0.5, 0.0, 0.1)), Err(Error::Exterior)));
    }
}
