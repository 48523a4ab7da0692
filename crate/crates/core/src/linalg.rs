//! Finite differences, singular values and pointwise dilatation of 3×3 maps.

use crate::scalar::{lit, Real, M3, V3};

/// Central-difference Jacobian with step `h` in every coordinate.
pub fn central_jacobian<T: Real>(f: impl Fn(&V3<T>) -> V3<T>, x: &V3<T>, h: T) -> M3<T> {
    let mut j = M3::zeros();
    for k in 0..3 {
        let mut e = V3::zeros();
        e[k] = h;
        let col = (f(&(x + e)) - f(&(x - e))) / (h * lit(2.0));
        j.set_column(k, &col);
    }
    j
}

/// Step `1e-6 · max(1, |x|)` used for derivative checks.
pub fn default_step<T: Real>(x: &V3<T>) -> T {
    lit::<T>(1e-6) * x.norm().max(T::one())
}

/// Singular values in decreasing order.
pub fn singular_values<T: Real>(m: &M3<T>) -> [T; 3] {
    let s = m.singular_values();
    let mut v = [s[0], s[1], s[2]];
    v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    v
}

/// Pointwise outer and inner dilatation `(K_O, K_I)` of a derivative:
/// `K_O = |A|³ / J` and `K_I = J / ℓ(A)³`. Infinite when `J ≤ 0`.
pub fn dilatation<T: Real>(m: &M3<T>) -> (T, T) {
    let det = m.determinant();
    if !(det > T::zero()) {
        let inf = T::max_value().unwrap();
        return (inf, inf);
    }
    let [hi, _, lo] = singular_values(m);
    (hi.powi(3) / det, det / lo.powi(3))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dilatation_of_conformal_and_stretch() {
        let (ko, ki) = dilatation(&(M3::<f64>::identity() * 3.0));
        assert!((ko - 1.0).abs() < 1e-12 && (ki - 1.0).abs() < 1e-12);
        let (ko, ki) = dilatation(&M3::from_diagonal(&V3::new(2.0f64, 1.0, 1.0)));
        assert!((ko - 4.0).abs() < 1e-12 && (ki - 2.0).abs() < 1e-12);
        let (ko, _) = dilatation(&M3::from_diagonal(&V3::new(-1.0f64, 1.0, 1.0)));
        assert!(ko == f64::MAX);
    }

    #[test]
    fn central_difference_of_quadratic_is_exact() {
        let f = |x: &V3<f64>| V3::new(x.x * x.y, x.z * x.z, x.x);
        let x = V3::new(1.0, 2.0, 3.0);
        let j = central_jacobian(f, &x, 1e-3);
        let exact = M3::new(2.0, 1.0, 0.0, 0.0, 0.0, 6.0, 1.0, 0.0, 0.0);
        assert!((j - exact).norm() < 1e-9);
    }
}
