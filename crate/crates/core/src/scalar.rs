//! Scalar abstraction shared by every numeric kernel.
//!
//! All maps in this crate are generic over [`Real`], which is satisfied by
//! `f32` and `f64`. Concrete `f64` aliases live at the crate root.

use nalgebra as na;
use num_traits as nt;

/// Gathers the traits the geometry and dynamics kernels need from a real scalar.
pub trait Real:
    na::RealField
    + Copy
    + Default
    + nt::FloatConst
    + nt::FromPrimitive
    + nt::ToPrimitive
    + std::fmt::Display
{
}

impl Real for f32 {}
impl Real for f64 {}

pub type V2<T> = na::Vector2<T>;
pub type V3<T> = na::Vector3<T>;
pub type M3<T> = na::Matrix3<T>;

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Real>(v: f64) -> T {
    na::convert(v)
}

#[inline]
pub fn to_f64<T: Real>(v: T) -> f64 {
    nt::ToPrimitive::to_f64(&v).unwrap_or(f64::NAN)
}

#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    <T as nt::FromPrimitive>::from_usize(n).expect("float conversion from usize")
}

/// Relative tolerance `rel`, floored at a small multiple of machine epsilon so
/// that `f32` instantiations stay meaningful.
#[inline]
pub fn tol<T: Real>(rel: f64) -> T {
    let floor = T::default_epsilon() * lit::<T>(64.0);
    let t = lit::<T>(rel);
    if t > floor {
        t
    } else {
        floor
    }
}

/// Acute angle between two lines with directions `u` and `v`, in `[0, π/2]`.
pub fn line_angle<T: Real>(u: &V3<T>, v: &V3<T>) -> T {
    let c = u.cross(v).norm();
    let d = u.dot(v).abs();
    c.atan2(d)
}

/// Acute angle between a line with direction `u` and a plane with normal `n`.
pub fn line_plane_angle<T: Real>(u: &V3<T>, n: &V3<T>) -> T {
    let s = u.dot(n).abs() / (u.norm() * n.norm());
    let one = T::one();
    (if s > one { one } else { s }).asin()
}
