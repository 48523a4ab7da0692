use crate::error::{Error, Result};
use crate::scalar::{lit, Real, V3};
use crate::zorich::f_eval;

/// Horizontal positions of the named points over `[0, 2]²`.
pub const BASE: [(char, f64, f64); 9] = [
    ('P', 0.0, 0.0),
    ('Q', 0.0, 2.0),
    ('R', 2.0, 2.0),
    ('S', 2.0, 0.0),
    ('T', 0.0, 1.0),
    ('U', 1.0, 2.0),
    ('V', 2.0, 1.0),
    ('W', 1.0, 0.0),
    ('X', 1.0, 1.0),
];

/// Images of the level-1 points; the corners at level 0 are fixed.
pub const LEVEL_ONE_IMAGES: [(char, [f64; 3]); 9] = [
    ('P', [0.0, 0.0, 4.0]),
    ('Q', [0.0, 2.0, 3.5]),
    ('R', [2.0, 2.0, 0.5]),
    ('S', [2.0, 0.0, -0.4]),
    ('T', [0.0, 4.0, 4.0]),
    ('U', [4.5, 2.0, 2.0]),
    ('V', [2.0, 4.0, -0.4]),
    ('W', [6.0, 0.0, 2.0]),
    ('X', [6.0, 4.0, 2.0]),
];

/// The upper faces of the cuboid over `[0,2]² × [0,1]` and the planes
/// `n · x = c` containing their images.
pub const TOP_FACES: [([char; 4], [f64; 3], f64); 4] = [
    (['P', 'T', 'X', 'W'], [1.0, 0.0, 3.0], 12.0),
    (['T', 'Q', 'U', 'X'], [4.0, -3.0, 12.0], 36.0),
    (['U', 'R', 'V', 'X'], [-12.0, 9.0, 20.0], 4.0),
    (['V', 'S', 'W', 'X'], [3.0, 0.0, -5.0], 8.0),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Zero,
    One,
    Top,
}

/// A named point such as `T₁` or `X_L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexName {
    pub letter: char,
    pub level: Level,
}

impl VertexName {
    pub const fn new(letter: char, level: Level) -> Self {
        Self { letter, level }
    }
}

impl std::fmt::Display for VertexName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sub = match self.level {
            Level::Zero => "0",
            Level::One => "1",
            Level::Top => "L",
        };
        write!(f, "{}{}", self.letter, sub)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vertex<T> {
    pub name: VertexName,
    pub point: V3<T>,
    pub image: V3<T>,
}

#[derive(Clone, Debug)]
pub struct VertexTable<T: Real> {
    pub level: T,
    vertices: Vec<Vertex<T>>,
}

impl<T: Real> VertexTable<T> {
    pub fn get(&self, letter: char, level: Level) -> Result<&Vertex<T>> {
        self.vertices
            .iter()
            .find(|v| v.name == VertexName::new(letter, level))
            .ok_or_else(|| Error::Construction(format!("no vertex {letter} at {level:?}")))
    }

    pub fn point(&self, name: VertexName) -> V3<T> {
        self.get(name.letter, name.level).map(|v| v.point).expect("vertex table is complete")
    }

    pub fn image(&self, name: VertexName) -> V3<T> {
        self.get(name.letter, name.level).map(|v| v.image).expect("vertex table is complete")
    }

    pub fn vertices(&self) -> &[Vertex<T>] {
        &self.vertices
    }
}

fn base<T: Real>(letter: char) -> (T, T) {
    let (_, x, y) = BASE.iter().find(|b| b.0 == letter).expect("known letter");
    (lit(*x), lit(*y))
}

/// Builds the table of named points and images: identity at level 0, the
/// fixed images at level 1, and `F` at level `L`. The images of the upper
/// faces are checked against their planes.
pub fn build_vertex_table<T: Real>(level: T) -> Result<VertexTable<T>> {
    let mut vertices = Vec::with_capacity(22);
    for letter in ['P', 'Q', 'R', 'S'] {
        let (x, y) = base::<T>(letter);
        let p = V3::new(x, y, T::zero());
        vertices.push(Vertex { name: VertexName::new(letter, Level::Zero), point: p, image: p });
    }
    for (letter, img) in LEVEL_ONE_IMAGES {
        let (x, y) = base::<T>(letter);
        vertices.push(Vertex {
            name: VertexName::new(letter, Level::One),
            point: V3::new(x, y, T::one()),
            image: V3::new(lit(img[0]), lit(img[1]), lit(img[2])),
        });
    }
    for (letter, _, _) in BASE {
        let (x, y) = base::<T>(letter);
        let p = V3::new(x, y, level);
        vertices.push(Vertex { name: VertexName::new(letter, Level::Top), point: p, image: f_eval(&p) });
    }
    let table = VertexTable { level, vertices };
    let tol = lit::<T>(1e-12);
    for (face, n, c) in TOP_FACES {
        let n = V3::new(lit::<T>(n[0]), lit(n[1]), lit(n[2]));
        for letter in face {
            let y = table.image(VertexName::new(letter, Level::One));
            let r = n.dot(&y) - lit::<T>(c);
            if r.abs() > tol * n.norm() * lit(16.0) {
                return Err(Error::Construction(format!(
                    "image of {letter}1 is off the plane of face {face:?} by {r}"
                )));
            }
        }
    }
    // side faces stay in their coordinate planes
    for v in &table.vertices {
        for k in 0..2 {
            for edge in [T::zero(), lit(2.0)] {
                if v.name.level != Level::Top && v.point[k] == edge && v.image[k] != edge {
                    return Err(Error::Construction(format!("image of {} leaves the plane x{} = {edge}", v.name, k + 1)));
                }
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    const L: f64 = 4.4;

    #[test]
    fn level_one_images_match_table() {
        let t = build_vertex_table::<f64>(L).unwrap();
        let img = |c| t.image(VertexName::new(c, Level::One));
        assert_eq!(img('P'), V3::new(0.0, 0.0, 4.0));
        assert_eq!(img('X'), V3::new(6.0, 4.0, 2.0));
        assert_eq!(img('S'), V3::new(2.0, 0.0, -0.4));
        assert_eq!(t.image(VertexName::new('R', Level::Zero)), V3::new(2.0, 2.0, 0.0));
    }

    #[test]
    fn level_top_images_follow_f() {
        let t = build_vertex_table::<f64>(L).unwrap();
        let e = L.exp();
        let img = |c| t.image(VertexName::new(c, Level::Top));
        assert!((img('T') - V3::new(0.0, 1.0 + e, L)).norm() < 1e-12);
        assert!((img('P') - V3::new(0.0, 0.0, L + e)).norm() < 1e-12);
        assert!((img('S') - V3::new(2.0, 0.0, L - e)).norm() < 1e-12);
        assert!((img('X') - V3::new(1.0 + e, 1.0 + e, L)).norm() < 1e-12);
    }

    #[test]
    fn top_face_images_are_planar() {
        // independent check: every image quadrilateral has zero volume
        let t = build_vertex_table::<f64>(L).unwrap();
        for (face, _, _) in TOP_FACES {
            let p: Vec<V3<f64>> = face.iter().map(|&c| t.image(VertexName::new(c, Level::One))).collect();
            let vol = (p[1] - p[0]).cross(&(p[2] - p[0])).dot(&(p[3] - p[0]));
            assert!(vol.abs() < 1e-12, "{face:?}");
        }
    }
}
