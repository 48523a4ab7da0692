use crate::error::{Error, Result};
use crate::scalar::{Real, V2, V3};

/// Orthonormal coordinates on a plane in R³.
///
/// `normal` carries the orientation of the vertex loop the frame was fitted to
/// (Newell's rule); `e1`, `e2` span the plane but need not satisfy
/// `e1 × e2 = normal`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneFrame<T: Real> {
    pub origin: V3<T>,
    pub e1: V3<T>,
    pub e2: V3<T>,
    pub normal: V3<T>,
}

impl<T: Real> PlaneFrame<T> {
    /// Fits a frame to a closed vertex loop. Loops lying in a coordinate plane
    /// get the coordinate axes as in-plane basis so that local coordinates are
    /// exact copies of the global ones.
    pub fn fit(points: &[V3<T>]) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::MalformedShape("fewer than three vertices".into()));
        }
        let normal = newell_normal(points);
        let len = normal.norm();
        if !(len > T::zero()) || !len.is_finite() {
            return Err(Error::MalformedShape("degenerate vertex loop (zero area)".into()));
        }
        let normal = normal / len;
        for k in 0..3 {
            if points.iter().all(|p| p[k] == points[0][k]) {
                let mut origin = V3::zeros();
                origin[k] = points[0][k];
                let mut e1 = V3::zeros();
                let mut e2 = V3::zeros();
                e1[(k + 1) % 3] = T::one();
                e2[(k + 2) % 3] = T::one();
                let mut n = V3::zeros();
                n[k] = normal[k].signum();
                return Ok(Self { origin, e1, e2, normal: n });
            }
        }
        let origin = points[0];
        let mut e1 = points
            .iter()
            .map(|p| p - origin)
            .max_by(|a, b| a.norm_squared().partial_cmp(&b.norm_squared()).unwrap())
            .unwrap();
        e1 -= normal * normal.dot(&e1);
        e1 /= e1.norm();
        let e2 = normal.cross(&e1);
        Ok(Self { origin, e1, e2, normal })
    }

    /// Standard frame of the `x₃ = 0` plane.
    pub fn xy() -> Self {
        Self {
            origin: V3::zeros(),
            e1: V3::x(),
            e2: V3::y(),
            normal: V3::z(),
        }
    }

    #[inline]
    pub fn local(&self, x: &V3<T>) -> V2<T> {
        let d = x - self.origin;
        V2::new(d.dot(&self.e1), d.dot(&self.e2))
    }

    #[inline]
    pub fn world(&self, u: &V2<T>) -> V3<T> {
        self.origin + self.e1 * u.x + self.e2 * u.y
    }

    /// Signed distance of `x` from the plane along `normal`.
    #[inline]
    pub fn offset(&self, x: &V3<T>) -> T {
        (x - self.origin).dot(&self.normal)
    }
}

pub(crate) fn newell_normal<T: Real>(points: &[V3<T>]) -> V3<T> {
    let mut n = V3::zeros();
    for i in 0..points.len() {
        let a = points[i];
        let b = points[(i + 1) % points.len()];
        n.x += (a.y - b.y) * (a.z + b.z);
        n.y += (a.z - b.z) * (a.x + b.x);
        n.z += (a.x - b.x) * (a.y + b.y);
    }
    n
}

#[inline]
pub(crate) fn cross2<T: Real>(a: &V2<T>, b: &V2<T>) -> T {
    a.x * b.y - a.y * b.x
}

pub(crate) fn signed_area<T: Real>(loop2: &[V2<T>]) -> T {
    let mut s = T::zero();
    for i in 0..loop2.len() {
        s += cross2(&loop2[i], &loop2[(i + 1) % loop2.len()]);
    }
    s * crate::scalar::lit(0.5)
}

/// Area centroid of a simple polygon.
pub(crate) fn area_centroid<T: Real>(loop2: &[V2<T>]) -> V2<T> {
    let mut c = V2::zeros();
    let mut a = T::zero();
    for i in 0..loop2.len() {
        let p = loop2[i];
        let q = loop2[(i + 1) % loop2.len()];
        let w = cross2(&p, &q);
        a += w;
        c += (p + q) * w;
    }
    if a.abs() <= T::default_epsilon() {
        let n = crate::scalar::from_usize::<T>(loop2.len());
        return loop2.iter().fold(V2::zeros(), |s, p| s + p) / n;
    }
    c / (a * crate::scalar::lit(3.0))
}

/// Winding number of a closed loop around `p`.
pub(crate) fn winding<T: Real>(loop2: &[V2<T>], p: &V2<T>) -> i32 {
    let mut w = 0;
    for i in 0..loop2.len() {
        let a = loop2[i];
        let b = loop2[(i + 1) % loop2.len()];
        let side = cross2(&(b - a), &(p - a));
        if a.y <= p.y {
            if b.y > p.y && side > T::zero() {
                w += 1;
            }
        } else if b.y <= p.y && side < T::zero() {
            w -= 1;
        }
    }
    w
}

/// Distance from `p` to segment `[a, b]` and the clamped segment parameter.
pub(crate) fn segment_distance<T: Real>(p: &V2<T>, a: &V2<T>, b: &V2<T>) -> (T, T) {
    let e = b - a;
    let l2 = e.norm_squared();
    let s = if l2 > T::zero() {
        let s = (p - a).dot(&e) / l2;
        s.max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    ((a + e * s - p).norm(), s)
}

/// Distance from `p` to the closed loop and the index of the nearest edge.
pub(crate) fn loop_distance<T: Real>(loop2: &[V2<T>], p: &V2<T>) -> (T, usize, T) {
    let mut best = (T::max_value().unwrap(), 0, T::zero());
    for i in 0..loop2.len() {
        let (d, s) = segment_distance(p, &loop2[i], &loop2[(i + 1) % loop2.len()]);
        if d < best.0 {
            best = (d, i, s);
        }
    }
    best
}

fn segments_touch<T: Real>(a: &V2<T>, b: &V2<T>, c: &V2<T>, d: &V2<T>, tol: T) -> bool {
    if segment_distance(a, c, d).0 <= tol
        || segment_distance(b, c, d).0 <= tol
        || segment_distance(c, a, b).0 <= tol
        || segment_distance(d, a, b).0 <= tol
    {
        return true;
    }
    let d1 = cross2(&(b - a), &(c - a));
    let d2 = cross2(&(b - a), &(d - a));
    let d3 = cross2(&(d - c), &(a - c));
    let d4 = cross2(&(d - c), &(b - c));
    (d1 > T::zero()) != (d2 > T::zero()) && (d3 > T::zero()) != (d4 > T::zero())
}

/// Rejects loops with repeated vertices or crossing non-adjacent edges.
pub(crate) fn check_simple<T: Real>(loop2: &[V2<T>], tol: T) -> Result<()> {
    let n = loop2.len();
    for i in 0..n {
        if (loop2[(i + 1) % n] - loop2[i]).norm() <= tol {
            return Err(Error::MalformedShape(format!("zero-length edge {i}")));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (a, b) = (loop2[i], loop2[(i + 1) % n]);
            let (c, d) = (loop2[j], loop2[(j + 1) % n]);
            if segments_touch(&a, &b, &c, &d, tol) {
                return Err(Error::MalformedShape(format!(
                    "edges {i} and {j} intersect: loop is not simple"
                )));
            }
        }
    }
    Ok(())
}
