use super::frame::{area_centroid, cross2, signed_area};
use crate::scalar::{lit, Real, V2};

/// Visibility kernel of a simple polygon: the intersection of the inner
/// half-planes of its edges, computed by successive convex clipping.
/// Returns an empty vector when the kernel is empty.
pub fn planar_kernel<T: Real>(loop2: &[V2<T>]) -> Vec<V2<T>> {
    let orient = signed_area(loop2).signum();
    let (mut lo, mut hi) = (loop2[0], loop2[0]);
    for p in loop2 {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let pad = (hi - lo).norm() + T::one();
    let pad = V2::new(pad, pad);
    let (lo, hi) = (lo - pad, hi + pad);
    let mut poly = vec![lo, V2::new(hi.x, lo.y), hi, V2::new(lo.x, hi.y)];
    let n = loop2.len();
    for i in 0..n {
        let a = loop2[i];
        let e = loop2[(i + 1) % n] - a;
        let side = |p: &V2<T>| cross2(&e, &(p - a)) * orient;
        poly = clip(&poly, side);
        if poly.len() < 3 {
            return Vec::new();
        }
    }
    poly
}

fn clip<T: Real>(poly: &[V2<T>], side: impl Fn(&V2<T>) -> T) -> Vec<V2<T>> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let (sp, sq) = (side(&p), side(&q));
        if sp >= T::zero() {
            out.push(p);
        }
        if (sp >= T::zero()) != (sq >= T::zero()) {
            let s = sp / (sp - sq);
            out.push(p + (q - p) * s);
        }
    }
    out
}

/// Area centroid of the kernel, or `None` when it is empty or degenerate.
pub fn kernel_centroid<T: Real>(loop2: &[V2<T>]) -> Option<V2<T>> {
    let k = planar_kernel(loop2);
    if k.len() < 3 || signed_area(&k).abs() <= T::default_epsilon() * lit(16.0) {
        return None;
    }
    Some(area_centroid(&k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convex_kernel_is_itself() {
        let sq = [(0.0f64, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)].map(|(a, b)| V2::new(a, b));
        let k = planar_kernel(&sq);
        assert!((signed_area(&k) - 4.0).abs() < 1e-12);
        let c = kernel_centroid(&sq).unwrap();
        assert!((c - V2::new(1.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn pentagon_kernel_excludes_reflex_shadow() {
        // (x₂, x₃) of the x₁ = 0 image pentagon; the reflex vertex (2, 3.5)
        // cuts the kernel down to 3 + x₂/4 ≤ x₃ ≤ 4.
        let p = [(0.0f64, 0.0), (0.0, 4.0), (4.0, 4.0), (2.0, 3.5), (2.0, 0.0)].map(|(a, b)| V2::new(a, b));
        let k = planar_kernel(&p);
        let area = signed_area(&k).abs();
        assert!((area - 1.5).abs() < 1e-12, "kernel area {area}");
        for v in &k {
            assert!(v.y >= 3.0 + v.x / 4.0 - 1e-12 && v.x <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn l_shape_kernel() {
        let l = [(0.0f64, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (0.0, 2.0)]
            .map(|(a, b)| V2::new(a, b));
        assert!((signed_area(&planar_kernel(&l)).abs() - 1.0).abs() < 1e-12);
    }
}
