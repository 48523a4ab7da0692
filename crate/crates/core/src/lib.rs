//! Quasiregular maps with a Baker-type domain: the Zorich-based map `f` on
//! `R³`, the radial-extension charts it is assembled from, and the dynamics
//! used to probe its escaping set.
//!
//! Geometry, extension and construction code is generic over [`Real`]; the
//! aliases below fix the scalar to `f64`, which the dynamics and rendering
//! layers use throughout.

pub mod construction;
pub mod dynamics;
pub mod error;
pub mod example_maps;
pub mod geometry;
pub mod linalg;
pub mod render;
pub mod report;
pub mod scalar;
pub mod star_extend;
pub mod verify;
pub mod zorich;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Vec2 = scalar::V2<f64>;
pub type Vec3 = scalar::V3<f64>;
pub type Mat3 = scalar::M3<f64>;
pub type StarShape = geometry::StarShape<f64>;
pub type Polygon = geometry::Polygon<f64>;
pub type Polyhedron = geometry::Polyhedron<f64>;
pub type RadialMap = star_extend::RadialMap<f64>;
pub type GlobalMap = construction::GlobalMap<f64>;
pub type VertexTable = construction::VertexTable<f64>;
pub type ConstantsReport = zorich::ConstantsReport<f64>;

#[cfg(test)]
mod test_support;
