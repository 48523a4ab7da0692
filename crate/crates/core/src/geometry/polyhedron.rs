use std::collections::HashMap;

use super::frame::{self, PlaneFrame};
use super::polygon::diameter;
use super::{BoundaryHit, Location};
use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, tol, Real, V2, V3};

/// One planar face of a polyhedron, stored with an outward-oriented loop.
#[derive(Clone, Debug)]
pub struct Face<T: Real> {
    pub indices: Vec<usize>,
    pub frame: PlaneFrame<T>,
    pub local: Vec<V2<T>>,
}

impl<T: Real> Face<T> {
    /// Unit outward normal.
    pub fn normal(&self) -> V3<T> {
        self.frame.normal
    }

    fn contains_local(&self, p: &V2<T>, tau: T) -> bool {
        frame::winding(&self.local, p) != 0 || frame::loop_distance(&self.local, p).0 <= tau
    }
}

/// A closed polyhedral surface with planar polygonal faces and a star centre.
#[derive(Clone, Debug)]
pub struct Polyhedron<T: Real> {
    vertices: Vec<V3<T>>,
    faces: Vec<Face<T>>,
    centre: V3<T>,
    diameter: T,
}

impl<T: Real> Polyhedron<T> {
    /// Builds a polyhedron from vertex loops given in any orientation; the
    /// loops are made coherent and then turned outward.
    pub fn new(vertices: Vec<V3<T>>, loops: Vec<Vec<usize>>, centre: V3<T>) -> Result<Self> {
        if vertices.iter().any(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(Error::MalformedShape("non-finite vertex".into()));
        }
        let diameter = diameter(&vertices);
        check_watertight(&loops, vertices.len())?;
        let loops = orient_coherently(loops)?;
        let volume = signed_volume(&vertices, &loops);
        if volume.abs() <= T::default_epsilon() * diameter.powi(3) {
            return Err(Error::MalformedShape("polyhedron has zero volume".into()));
        }
        let flip = volume < T::zero();
        let plane_tol = tol::<T>(1e-9) * diameter;
        let mut faces = Vec::with_capacity(loops.len());
        for (fi, mut idx) in loops.into_iter().enumerate() {
            if flip {
                idx.reverse();
            }
            let pts: Vec<V3<T>> = idx.iter().map(|&i| vertices[i]).collect();
            let frame = PlaneFrame::fit(&pts)?;
            if pts.iter().any(|p| frame.offset(p).abs() > plane_tol) {
                return Err(Error::MalformedShape(format!("face {fi} is not planar")));
            }
            let local: Vec<V2<T>> = pts.iter().map(|p| frame.local(p)).collect();
            frame::check_simple(&local, tol::<T>(1e-12) * diameter)
                .map_err(|e| Error::MalformedShape(format!("face {fi}: {e}")))?;
            faces.push(Face { indices: idx, frame, local });
        }
        let poly = Self { vertices, faces, centre, diameter };
        poly.check_centre(&centre)?;
        Ok(poly)
    }

    fn check_centre(&self, c: &V3<T>) -> Result<()> {
        match self.locate(c) {
            Location::Interior => Ok(()),
            Location::Boundary(_) => Err(Error::Certification("star centre lies on the boundary".into())),
            Location::Exterior => Err(Error::Certification("star centre lies outside the polyhedron".into())),
        }
    }

    pub fn with_centre(&self, centre: V3<T>) -> Result<Self> {
        let mut p = self.clone();
        p.check_centre(&centre)?;
        p.centre = centre;
        Ok(p)
    }

    /// Axis-aligned box `[lo, hi]` split into six quadrilateral faces.
    pub fn cuboid(lo: V3<T>, hi: V3<T>, centre: V3<T>) -> Result<Self> {
        let v = |i: usize| V3::new(
            if i & 1 == 0 { lo.x } else { hi.x },
            if i & 2 == 0 { lo.y } else { hi.y },
            if i & 4 == 0 { lo.z } else { hi.z },
        );
        let vertices = (0..8).map(v).collect();
        let loops = vec![
            vec![0, 2, 3, 1],
            vec![4, 5, 7, 6],
            vec![0, 1, 5, 4],
            vec![2, 6, 7, 3],
            vec![0, 4, 6, 2],
            vec![1, 3, 7, 5],
        ];
        Self::new(vertices, loops, centre)
    }

    pub fn vertices(&self) -> &[V3<T>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Face<T>] {
        &self.faces
    }

    pub fn face_points(&self, f: usize) -> Vec<V3<T>> {
        self.faces[f].indices.iter().map(|&i| self.vertices[i]).collect()
    }

    pub fn centre(&self) -> V3<T> {
        self.centre
    }

    pub fn diameter(&self) -> T {
        self.diameter
    }

    pub fn tolerance(&self) -> T {
        tol::<T>(1e-12) * self.diameter
    }

    pub fn volume(&self) -> T {
        let loops: Vec<Vec<usize>> = self.faces.iter().map(|f| f.indices.clone()).collect();
        signed_volume(&self.vertices, &loops)
    }

    pub fn vertex_centroid(&self) -> V3<T> {
        self.vertices.iter().fold(V3::zeros(), |s, v| s + v) / from_usize::<T>(self.vertices.len())
    }

    /// Distance from `x` to face `f` and the face's frame coordinates of the foot point.
    pub fn face_distance(&self, x: &V3<T>, f: usize) -> T {
        let face = &self.faces[f];
        let off = face.frame.offset(x);
        let p = face.frame.local(x);
        if frame::winding(&face.local, &p) != 0 {
            off.abs()
        } else {
            let d = frame::loop_distance(&face.local, &p).0;
            (d * d + off * off).sqrt()
        }
    }

    pub fn distance_to_boundary(&self, x: &V3<T>) -> (T, usize) {
        let mut best = (T::max_value().unwrap(), 0);
        for f in 0..self.faces.len() {
            let d = self.face_distance(x, f);
            if d < best.0 {
                best = (d, f);
            }
        }
        best
    }

    /// Generalised winding number from the summed solid angles of the faces.
    fn winding(&self, x: &V3<T>) -> T {
        let mut total = T::zero();
        for face in &self.faces {
            let a = self.vertices[face.indices[0]] - x;
            for k in 1..face.indices.len() - 1 {
                let b = self.vertices[face.indices[k]] - x;
                let c = self.vertices[face.indices[k + 1]] - x;
                let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
                let num = a.dot(&b.cross(&c));
                let den = la * lb * lc + a.dot(&b) * lc + a.dot(&c) * lb + b.dot(&c) * la;
                total += num.atan2(den) * lit(2.0);
            }
        }
        total / (T::pi() * lit(4.0))
    }

    pub fn locate(&self, x: &V3<T>) -> Location {
        let (d, f) = self.distance_to_boundary(x);
        if d <= self.tolerance() {
            Location::Boundary(f)
        } else if self.winding(x).abs() > lit(0.5) {
            Location::Interior
        } else {
            Location::Exterior
        }
    }

    /// First boundary point on the ray from the centre through `x`.
    pub fn psi(&self, x: &V3<T>) -> Result<BoundaryHit<T>> {
        self.cast(x, true)
    }

    pub fn psi_lenient(&self, x: &V3<T>) -> Result<BoundaryHit<T>> {
        self.cast(x, false)
    }

    fn cast(&self, x: &V3<T>, strict: bool) -> Result<BoundaryHit<T>> {
        let tau = self.tolerance();
        let c = self.centre;
        let d = x - c;
        let dn = d.norm();
        if dn <= tau {
            return Err(Error::AtCentre);
        }
        let tie = tol::<T>(1e-12);
        let mut best: Option<(T, usize)> = None;
        for (fi, face) in self.faces.iter().enumerate() {
            let n = face.normal();
            let nd = n.dot(&d);
            if nd.abs() <= T::default_epsilon() * dn {
                continue;
            }
            let t = -face.frame.offset(&c) / nd;
            if t <= T::zero() {
                continue;
            }
            if let Some((bt, _)) = best {
                if t >= bt * (T::one() - tie) {
                    continue;
                }
            }
            let p = c + d * t;
            if face.contains_local(&face.frame.local(&p), tau) {
                best = Some((t, fi));
            }
        }
        let (t, facet) =
            best.ok_or_else(|| Error::MalformedShape("ray from the centre escapes the polyhedron".into()))?;
        if strict && t * dn < dn - tau {
            return Err(Error::Exterior);
        }
        Ok(BoundaryHit { point: c + d * t, facet, t, edge_param: None })
    }

    /// Projects a point known to lie on face `facet` onto its plane.
    pub fn hit_on_facet(&self, x: &V3<T>, facet: usize) -> BoundaryHit<T> {
        let n = self.faces[facet].normal();
        let point = x - n * self.faces[facet].frame.offset(x);
        let r = (x - self.centre).norm();
        let t = if r > T::zero() { (point - self.centre).norm() / r } else { T::one() };
        BoundaryHit { point, facet, t, edge_param: None }
    }

    /// Boundary samples: vertices, `resolution` points per edge, and a
    /// `resolution × resolution` grid clipped to each face.
    pub fn sample_boundary(&self, resolution: usize) -> Vec<(V3<T>, usize)> {
        let mut out = Vec::new();
        let r = from_usize::<T>(resolution + 1);
        for (fi, face) in self.faces.iter().enumerate() {
            let n = face.local.len();
            for i in 0..n {
                let a = face.local[i];
                let b = face.local[(i + 1) % n];
                for k in 0..=resolution {
                    let s = from_usize::<T>(k) / r;
                    out.push((face.frame.world(&(a + (b - a) * s)), fi));
                }
            }
            let (mut lo, mut hi) = (face.local[0], face.local[0]);
            for p in &face.local {
                lo = lo.inf(p);
                hi = hi.sup(p);
            }
            for i in 1..=resolution {
                for j in 1..=resolution {
                    let p = V2::new(
                        lo.x + (hi.x - lo.x) * from_usize::<T>(i) / r,
                        lo.y + (hi.y - lo.y) * from_usize::<T>(j) / r,
                    );
                    if frame::winding(&face.local, &p) != 0 {
                        out.push((face.frame.world(&p), fi));
                    }
                }
            }
        }
        out
    }

    /// Pairs of faces sharing an edge, with the edge endpoints.
    pub fn shared_edges(&self) -> Vec<(usize, usize, V3<T>, V3<T>)> {
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        let mut out = Vec::new();
        for (fi, face) in self.faces.iter().enumerate() {
            let n = face.indices.len();
            for k in 0..n {
                let (a, b) = (face.indices[k], face.indices[(k + 1) % n]);
                let key = (a.min(b), a.max(b));
                if let Some(&other) = seen.get(&key) {
                    out.push((other, fi, self.vertices[key.0], self.vertices[key.1]));
                } else {
                    seen.insert(key, fi);
                }
            }
        }
        out
    }

    /// Signed distance of `x` from face `f`'s plane, positive on the inner side.
    pub(crate) fn face_margin(&self, f: usize, x: &V3<T>) -> T {
        -self.faces[f].frame.offset(x)
    }
}

fn check_watertight(loops: &[Vec<usize>], nv: usize) -> Result<()> {
    let mut edges: HashMap<(usize, usize), Vec<bool>> = HashMap::new();
    for (fi, l) in loops.iter().enumerate() {
        if l.len() < 3 {
            return Err(Error::MalformedShape(format!("face {fi} has fewer than three vertices")));
        }
        if l.iter().any(|&i| i >= nv) {
            return Err(Error::MalformedShape(format!("face {fi} references a missing vertex")));
        }
        for k in 0..l.len() {
            let (a, b) = (l[k], l[(k + 1) % l.len()]);
            if a == b {
                return Err(Error::MalformedShape(format!("face {fi} repeats a vertex")));
            }
            edges.entry((a.min(b), a.max(b))).or_default().push(a < b);
        }
    }
    for ((a, b), dirs) in &edges {
        if dirs.len() != 2 {
            return Err(Error::MalformedShape(format!(
                "edge ({a}, {b}) is shared by {} faces: surface is not watertight",
                dirs.len()
            )));
        }
    }
    Ok(())
}

/// Flips loops so that every shared edge is traversed in opposite directions.
fn orient_coherently(mut loops: Vec<Vec<usize>>) -> Result<Vec<Vec<usize>>> {
    let directed = |l: &[usize]| -> Vec<(usize, usize)> { (0..l.len()).map(|k| (l[k], l[(k + 1) % l.len()])).collect() };
    let mut by_edge: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (fi, l) in loops.iter().enumerate() {
        for (a, b) in directed(l) {
            by_edge.entry((a.min(b), a.max(b))).or_default().push(fi);
        }
    }
    let mut done = vec![false; loops.len()];
    for start in 0..loops.len() {
        if done[start] {
            continue;
        }
        done[start] = true;
        let mut stack = vec![start];
        while let Some(f) = stack.pop() {
            for (a, b) in directed(&loops[f]) {
                for &g in &by_edge[&(a.min(b), a.max(b))] {
                    if g == f {
                        continue;
                    }
                    let same = directed(&loops[g]).contains(&(a, b));
                    if done[g] {
                        if same {
                            return Err(Error::MalformedShape("surface is not orientable".into()));
                        }
                    } else {
                        if same {
                            loops[g].reverse();
                        }
                        done[g] = true;
                        stack.push(g);
                    }
                }
            }
        }
    }
    Ok(loops)
}

fn signed_volume<T: Real>(v: &[V3<T>], loops: &[Vec<usize>]) -> T {
    let mut s = T::zero();
    for l in loops {
        let a = v[l[0]];
        for k in 1..l.len() - 1 {
            s += a.dot(&v[l[k]].cross(&v[l[k + 1]]));
        }
    }
    s / lit(6.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube() -> Polyhedron<f64> {
        Polyhedron::cuboid(V3::repeat(-1.0), V3::repeat(1.0), V3::zeros()).unwrap()
    }

    #[test]
    fn cube_locate() {
        let c = cube();
        assert_eq!(c.locate(&V3::zeros()), Location::Interior);
        let Location::Boundary(f) = c.locate(&V3::new(1.0, 0.0, 0.0)) else { panic!() };
        assert!((c.faces()[f].normal() - V3::x()).norm() < 1e-15);
        assert_eq!(c.locate(&V3::new(2.0, 0.0, 0.0)), Location::Exterior);
        assert!((c.volume() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn cube_axis_ray() {
        let hit = cube().psi(&V3::new(0.5, 0.0, 0.0)).unwrap();
        assert!((hit.point - V3::new(1.0, 0.0, 0.0)).norm() < 1e-15);
        assert!((hit.t - 2.0).abs() < 1e-15);
    }

    #[test]
    fn reversed_loops_are_flipped_outward() {
        let c = cube();
        let loops: Vec<Vec<usize>> = c.faces().iter().map(|f| f.indices.iter().rev().copied().collect()).collect();
        let d = Polyhedron::new(c.vertices().to_vec(), loops, V3::zeros()).unwrap();
        assert!(d.volume() > 0.0);
        for f in d.faces() {
            let p = d.vertices()[f.indices[0]];
            assert!(f.normal().dot(&p) > 0.0);
        }
    }

    #[test]
    fn rejects_open_surface() {
        let c = cube();
        let mut loops: Vec<Vec<usize>> = c.faces().iter().map(|f| f.indices.clone()).collect();
        loops.pop();
        let err = Polyhedron::new(c.vertices().to_vec(), loops, V3::zeros()).unwrap_err();
        assert!(err.to_string().contains("watertight"));
    }

    #[test]
    fn shared_edge_count() {
        assert_eq!(cube().shared_edges().len(), 12);
    }
}
