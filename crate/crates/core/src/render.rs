//! Escape-time slices through `R³`, written as binary PPM.

use std::io::Write;

use nalgebra::Vector3;
use rayon::prelude::*;

use crate::dynamics::EscapeClass;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
    X3,
}

impl Axis {
    fn index(self) -> usize {
        self as usize
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x1" | "1" => Ok(Axis::X1),
            "x2" | "2" => Ok(Axis::X2),
            "x3" | "3" => Ok(Axis::X3),
            _ => Err(Error::Precondition(format!("unknown axis {s:?}"))),
        }
    }
}

/// The plane `x_axis = value`. The horizontal image axis is the lower
/// remaining coordinate, the vertical one the higher; row 0 is the top edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SliceSpec {
    pub axis: Axis,
    pub value: f64,
    pub horizontal: (f64, f64),
    pub vertical: (f64, f64),
    pub width: usize,
    pub height: usize,
    pub budget: usize,
}

impl SliceSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = |r: (f64, f64)| r.0.is_finite() && r.1.is_finite() && r.0 < r.1;
        if self.width == 0 || self.height == 0 {
            return Err(Error::Precondition("image size must be at least 1×1".into()));
        }
        if !ok(self.horizontal) || !ok(self.vertical) || !self.value.is_finite() {
            return Err(Error::Precondition("slice window must be finite and non-degenerate".into()));
        }
        if self.budget == 0 {
            return Err(Error::Precondition("iteration budget must be positive".into()));
        }
        Ok(())
    }

    /// Centre of pixel `(col, row)`.
    pub fn pixel_centre(&self, col: usize, row: usize) -> Vector3<f64> {
        let (h0, h1) = self.horizontal;
        let (v0, v1) = self.vertical;
        let u = h0 + (h1 - h0) * (col as f64 + 0.5) / self.width as f64;
        let v = v1 - (v1 - v0) * (row as f64 + 0.5) / self.height as f64;
        let free: Vec<usize> = (0..3).filter(|&i| i != self.axis.index()).collect();
        let mut p = Vector3::zeros();
        p[self.axis.index()] = self.value;
        p[free[0]] = u;
        p[free[1]] = v;
        p
    }
}

pub fn colour(class: EscapeClass, budget: usize) -> [u8; 3] {
    match class {
        EscapeClass::QuasiFatouProxy(n) => {
            let s = (n as f64 / budget.max(1) as f64).sqrt();
            [(40.0 + 200.0 * s) as u8, (70.0 + 150.0 * s) as u8, (160.0 - 60.0 * s) as u8]
        }
        EscapeClass::RadialEscape => [250, 190, 30],
        EscapeClass::Undecided(_) => [8, 8, 8],
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Slice {
    pub width: usize,
    pub height: usize,
    /// Row-major from the top-left pixel.
    pub classes: Vec<EscapeClass>,
}

impl Slice {
    pub fn rgb(&self, budget: usize) -> Vec<u8> {
        self.classes.iter().flat_map(|c| colour(*c, budget)).collect()
    }
}

/// Classifies every pixel centre. Pixels are independent, so the result does
/// not depend on how the pool schedules them.
pub fn render_slice(spec: &SliceSpec, classify: impl Fn(&Vector3<f64>) -> EscapeClass + Sync) -> Result<Slice> {
    spec.validate()?;
    let classes = (0..spec.width * spec.height)
        .into_par_iter()
        .map(|i| classify(&spec.pixel_centre(i % spec.width, i / spec.width)))
        .collect();
    Ok(Slice { width: spec.width, height: spec.height, classes })
}

pub fn write_ppm<W: Write>(w: &mut W, width: usize, height: usize, rgb: &[u8]) -> std::io::Result<()> {
    assert_eq!(rgb.len(), 3 * width * height, "pixel buffer size");
    write!(w, "P6\n{width} {height}\n255\n")?;
    w.write_all(rgb)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> SliceSpec {
        SliceSpec { axis: Axis::X2, value: 0.0, horizontal: (-4.0, 4.0), vertical: (-2.0, 6.0), width: 8, height: 4, budget: 10 }
    }

    #[test]
    fn pixel_centres() {
        let s = spec();
        assert_eq!(s.pixel_centre(0, 0), Vector3::new(-3.5, 0.0, 5.0));
        assert_eq!(s.pixel_centre(7, 3), Vector3::new(3.5, 0.0, -1.0));
        let s3 = SliceSpec { axis: Axis::X3, value: 2.0, ..s };
        assert_eq!(s3.pixel_centre(0, 0), Vector3::new(-3.5, 5.0, 2.0));
    }

    #[test]
    fn ppm_header_and_size() {
        let slice = render_slice(&spec(), |p| if p.z < 0.0 { EscapeClass::QuasiFatouProxy(0) } else { EscapeClass::RadialEscape }).unwrap();
        let mut out = Vec::new();
        write_ppm(&mut out, slice.width, slice.height, &slice.rgb(10)).unwrap();
        assert!(out.starts_with(b"P6\n8 4\n255\n"));
        assert_eq!(out.len(), 11 + 3 * 32);
        assert_eq!(&out[11..14], &colour(EscapeClass::RadialEscape, 10));
        assert_eq!(&out[out.len() - 3..], &colour(EscapeClass::QuasiFatouProxy(0), 10));
    }

    #[test]
    fn rejects_degenerate_windows() {
        assert!(SliceSpec { width: 0, ..spec() }.validate().is_err());
        assert!(SliceSpec { horizontal: (1.0, 1.0), ..spec() }.validate().is_err());
        assert!(SliceSpec { vertical: (0.0, f64::INFINITY), ..spec() }.validate().is_err());
        assert!(SliceSpec { budget: 0, ..spec() }.validate().is_err());
    }
}
