//! The global map `g`: identity below `x₃ = 0`, `F` above `x₃ = L`, and five
//! radial charts on the slab between, extended by period-4 translations and
//! the reflections `xᵢ ↦ 4 − xᵢ`. `f = g − (0, 0, L′)`.

mod audit;
mod charts;
mod global;
mod vertex_table;

pub use audit::{audit, dilatation_audit, orientation, seams, AuditKind, AuditReport, DEFAULT_SEAM_TOLERANCE};
pub use charts::{
    aprime_faces, asecond_faces, build_aprime_chart, build_asecond_chart, CellChart, CellId, PieceCache,
    APRIME_CODOMAIN_CENTRE, APRIME_DOMAIN_CENTRE, ASECOND_CORNERS,
};
pub use global::{
    assemble_g, build_charts, build_global_map, build_global_map_with_report, cell_for, derive_translation_constant, map_eval, BuildConfig,
    GlobalMap, Mode, TileFrame, TranslationReport,
};
pub use vertex_table::{build_vertex_table, Level, Vertex, VertexName, VertexTable, BASE, LEVEL_ONE_IMAGES, TOP_FACES};

use crate::error::Result;
use crate::scalar::Real;

/// The four upper charts, in cell order.
pub fn build_asecond_charts<T: Real>(vt: &VertexTable<T>, cache: &mut PieceCache<T>, resolution: usize) -> Result<Vec<CellChart<T>>> {
    (0..4).map(|c| build_asecond_chart(vt, cache, c, resolution)).collect()
}
