use std::collections::HashMap;

use super::vertex_table::{Level, VertexName, VertexTable};
use crate::error::{Error, Result};
use crate::geometry::{Polyhedron, StarShape};
use crate::scalar::{from_usize, lit, Real, V3};
use crate::star_extend::{face_piece, AffineTri, BoundaryMap, DirectFormula, Piece, RadialMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellId {
    APrime,
    /// The quarter cuboids of `[0,2]² × [1, L]`, numbered 1 to 4.
    ASecond(u8),
}

impl std::fmt::Display for CellId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CellId::APrime => write!(f, "A'"),
            CellId::ASecond(i) => write!(f, "A''{i}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CellChart<T: Real> {
    pub id: CellId,
    pub map: RadialMap<T>,
    /// Vertex names of each face, matching the facet order of `map`.
    pub faces: Vec<Vec<VertexName>>,
}

/// Outer corner, the two edge midpoints next to it, in the order used for
/// the four upper cells.
pub const ASECOND_CORNERS: [(char, char, char); 4] = [('P', 'T', 'W'), ('S', 'V', 'W'), ('Q', 'T', 'U'), ('R', 'V', 'U')];

/// Pieces for planar faces, shared between charts so that a face common to
/// two cells is mapped by one and the same function.
#[derive(Default)]
pub struct PieceCache<T: Real> {
    pieces: HashMap<Vec<VertexName>, Piece<T>>,
}

impl<T: Real> PieceCache<T> {
    fn face(&mut self, vt: &VertexTable<T>, names: &[VertexName], resolution: usize) -> Result<Piece<T>> {
        let mut key = names.to_vec();
        key.sort();
        if let Some(p) = self.pieces.get(&key) {
            return Ok(p.clone());
        }
        let dom = names.iter().map(|n| vt.point(*n)).collect();
        let img = names.iter().map(|n| vt.image(*n)).collect();
        let piece = face_piece(dom, img, resolution)
            .map_err(|e| Error::Construction(format!("face {}: {e}", fmt_names(names))))?;
        self.pieces.insert(key, piece.clone());
        Ok(piece)
    }
}

pub(crate) fn fmt_names(names: &[VertexName]) -> String {
    names.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" ")
}

fn names(spec: &[(char, Level)]) -> Vec<VertexName> {
    spec.iter().map(|&(c, l)| VertexName::new(c, l)).collect()
}

fn polyhedron_from_faces<T: Real>(
    faces: &[Vec<VertexName>],
    at: impl Fn(VertexName) -> V3<T>,
    centre: V3<T>,
) -> Result<Polyhedron<T>> {
    let mut index: Vec<VertexName> = faces.iter().flatten().copied().collect();
    index.sort();
    index.dedup();
    let vertices = index.iter().map(|n| at(*n)).collect();
    let loops = faces
        .iter()
        .map(|f| f.iter().map(|n| index.binary_search(n).expect("indexed")).collect())
        .collect();
    Polyhedron::new(vertices, loops, centre)
}

pub fn aprime_faces() -> Vec<Vec<VertexName>> {
    use Level::{One, Zero};
    vec![
        names(&[('P', Zero), ('S', Zero), ('R', Zero), ('Q', Zero)]),
        names(&[('P', Zero), ('Q', Zero), ('Q', One), ('T', One), ('P', One)]),
        names(&[('P', Zero), ('P', One), ('W', One), ('S', One), ('S', Zero)]),
        names(&[('S', Zero), ('S', One), ('V', One), ('R', One), ('R', Zero)]),
        names(&[('Q', Zero), ('R', Zero), ('R', One), ('U', One), ('Q', One)]),
        names(&[('P', One), ('T', One), ('X', One), ('W', One)]),
        names(&[('T', One), ('Q', One), ('U', One), ('X', One)]),
        names(&[('X', One), ('U', One), ('R', One), ('V', One)]),
        names(&[('W', One), ('X', One), ('V', One), ('S', One)]),
    ]
}

pub const APRIME_DOMAIN_CENTRE: [f64; 3] = [1.0, 1.0, 0.5];
pub const APRIME_CODOMAIN_CENTRE: [f64; 3] = [5.0, 1.0, 2.0];

/// The chart from the cuboid `[0,2]² × [0,1]` onto the nine-faced polyhedron
/// spanned by the level-0 and level-1 images.
pub fn build_aprime_chart<T: Real>(vt: &VertexTable<T>, cache: &mut PieceCache<T>, resolution: usize) -> Result<CellChart<T>> {
    let faces = aprime_faces();
    let v3 = |c: [f64; 3]| V3::new(lit::<T>(c[0]), lit(c[1]), lit(c[2]));
    let dom = polyhedron_from_faces(&faces, |n| vt.point(n), v3(APRIME_DOMAIN_CENTRE))?;
    let cod = polyhedron_from_faces(&faces, |n| vt.image(n), v3(APRIME_CODOMAIN_CENTRE))?;
    let dom = StarShape::from(dom).certified(resolution)?;
    let cod = StarShape::from(cod).certified(resolution)?;
    let mut pieces = vec![Piece::Direct { formula: DirectFormula::Identity, inverse: None }];
    for f in &faces[1..] {
        pieces.push(cache.face(vt, f, resolution)?);
    }
    let map = RadialMap::new(dom, cod, BoundaryMap { pieces })?;
    Ok(CellChart { id: CellId::APrime, map, faces })
}

pub fn asecond_faces(cell: usize) -> Vec<Vec<VertexName>> {
    use Level::{One, Top};
    let (o, a, b) = ASECOND_CORNERS[cell];
    let x = 'X';
    vec![
        names(&[(o, One), (a, One), (x, One), (b, One)]),
        names(&[(o, Top), (a, Top), (x, Top)]),
        names(&[(o, Top), (x, Top), (b, Top)]),
        names(&[(o, One), (a, One), (a, Top), (o, Top)]),
        names(&[(o, One), (b, One), (b, Top), (o, Top)]),
        names(&[(a, One), (x, One), (a, Top)]),
        names(&[(a, Top), (x, One), (x, Top)]),
        names(&[(b, One), (x, One), (b, Top)]),
        names(&[(b, Top), (x, One), (x, Top)]),
    ]
}

const CENTRE_PULL: f64 = 0.1;
const CENTRE_RETRY_STEP: f64 = 0.04;
const CENTRE_RETRIES: usize = 20;

/// Chart `cell ∈ 0..4` of the upper slab part. The codomain centre starts
/// next to the image of the outer level-`L` corner and moves toward the image
/// centroid until it certifies.
pub fn build_asecond_chart<T: Real>(
    vt: &VertexTable<T>,
    cache: &mut PieceCache<T>,
    cell: usize,
    resolution: usize,
) -> Result<CellChart<T>> {
    let faces = asecond_faces(cell);
    let (o, _, _) = ASECOND_CORNERS[cell];
    let lo = vt.point(VertexName::new(o, Level::One));
    let hi = vt.point(VertexName::new('X', Level::Top));
    let centre = (lo + hi) * lit::<T>(0.5);
    let dom = polyhedron_from_faces(&faces, |n| vt.point(n), centre)?;
    let dom = StarShape::from(dom).certified(resolution)?;

    let mut all: Vec<VertexName> = faces.iter().flatten().copied().collect();
    all.sort();
    all.dedup();
    let centroid = all.iter().fold(V3::zeros(), |s, n| s + vt.image(*n)) / from_usize::<T>(all.len());
    let anchor = vt.image(VertexName::new(o, Level::Top));
    let mut cod = None;
    let mut last_err = None;
    for k in 0..=CENTRE_RETRIES {
        let w = lit::<T>(CENTRE_PULL + CENTRE_RETRY_STEP * k as f64);
        let b = anchor + (centroid - anchor) * w;
        match polyhedron_from_faces(&faces, |n| vt.image(n), b).and_then(|p| StarShape::from(p).certified(resolution)) {
            Ok(s) => {
                cod = Some(s);
                break;
            }
            Err(e) => last_err = Some(e),
        }
    }
    let cod = cod.ok_or_else(|| {
        Error::Construction(format!(
            "no certified codomain centre for A''{}: {}",
            cell + 1,
            last_err.map(|e| e.to_string()).unwrap_or_default()
        ))
    })?;

    let mut pieces = Vec::with_capacity(9);
    for (i, f) in faces.iter().enumerate() {
        if i == 1 || i == 2 {
            let src = [vt.point(f[0]), vt.point(f[1]), vt.point(f[2])];
            let dst = [vt.image(f[0]), vt.image(f[1]), vt.image(f[2])];
            pieces.push(Piece::Direct { formula: DirectFormula::ZorichF, inverse: Some(AffineTri::new(src, dst)) });
        } else {
            pieces.push(cache.face(vt, f, resolution)?);
        }
    }
    let map = RadialMap::new(dom, cod, BoundaryMap { pieces })?;
    Ok(CellChart { id: CellId::ASecond(cell as u8 + 1), map, faces })
}
