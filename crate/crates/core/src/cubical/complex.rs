use std::fmt;
use std::fmt::Write as _;

use crate::{Error, Result};

/// Borrowed view of one cell of a [`FilteredPairComplex`].
#[derive(Clone, Copy, Debug)]
pub struct Cell<'a> {
    pub id: usize,
    pub dim: usize,
    /// Grid vertices spanning the cube (`2^dim` of them for grid-built complexes).
    pub vertices: &'a [u32],
    /// Codimension-one faces, as cell ids.
    pub faces: &'a [u32],
    pub in_a: bool,
    pub in_b: bool,
    pub f: f64,
}

/// Cubical complex `B` with a subcomplex `A` and a filtration value `f` per cell.
///
/// Cells are stored in flat arrays indexed by dense ids; faces and vertex lists live in
/// compressed row storage.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FilteredPairComplex {
    pub(crate) ambient_dim: usize,
    pub(crate) dims: Vec<u8>,
    pub(crate) in_a: Vec<bool>,
    pub(crate) in_b: Vec<bool>,
    pub(crate) values: Vec<f64>,
    pub(crate) face_offsets: Vec<u32>,
    pub(crate) faces: Vec<u32>,
    pub(crate) vertex_offsets: Vec<u32>,
    pub(crate) vertices: Vec<u32>,
}

impl FilteredPairComplex {
    pub fn empty(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            face_offsets: vec![0],
            vertex_offsets: vec![0],
            ..Default::default()
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    #[inline]
    pub fn dim(&self, id: usize) -> usize {
        self.dims[id] as usize
    }

    #[inline]
    pub fn in_a(&self, id: usize) -> bool {
        self.in_a[id]
    }

    #[inline]
    pub fn in_b(&self, id: usize) -> bool {
        self.in_b[id]
    }

    #[inline]
    pub fn f(&self, id: usize) -> f64 {
        self.values[id]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn faces(&self, id: usize) -> &[u32] {
        &self.faces[self.face_offsets[id] as usize..self.face_offsets[id + 1] as usize]
    }

    #[inline]
    pub fn vertices(&self, id: usize) -> &[u32] {
        &self.vertices[self.vertex_offsets[id] as usize..self.vertex_offsets[id + 1] as usize]
    }

    pub fn cell(&self, id: usize) -> Cell<'_> {
        Cell {
            id,
            dim: self.dim(id),
            vertices: self.vertices(id),
            faces: self.faces(id),
            in_a: self.in_a[id],
            in_b: self.in_b[id],
            f: self.values[id],
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell<'_>> {
        (0..self.len()).map(|id| self.cell(id))
    }

    pub fn a_count(&self) -> usize {
        self.in_a.iter().filter(|&&a| a).count()
    }

    /// Alternating count `Σ (−1)^dim` over the cells of `B`.
    pub fn euler_characteristic(&self) -> i64 {
        (0..self.len())
            .filter(|&c| self.in_b[c])
            .map(|c| if self.dims[c] % 2 == 0 { 1 } else { -1 })
            .sum()
    }

    pub(crate) fn push(
        &mut self,
        dim: usize,
        faces: &[u32],
        vertices: &[u32],
        in_a: bool,
        in_b: bool,
        f: f64,
    ) {
        self.dims.push(dim as u8);
        self.in_a.push(in_a);
        self.in_b.push(in_b);
        self.values.push(f);
        self.faces.extend_from_slice(faces);
        self.face_offsets.push(self.faces.len() as u32);
        self.vertices.extend_from_slice(vertices);
        self.vertex_offsets.push(self.vertices.len() as u32);
    }

    /// Debug dump, one cell per line: `id dim inA inB f vertex-ids`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for c in self.cells() {
            let verts: Vec<String> = c.vertices.iter().map(u32::to_string).collect();
            let _ = writeln!(
                out,
                "{} {} {} {} {} {}",
                c.id,
                c.dim,
                c.in_a as u8,
                c.in_b as u8,
                c.f,
                verts.join(",")
            );
        }
        out
    }
}

/// Incremental construction of hand-made complexes. Nothing is checked here; run
/// [`validate_pair`] on the result.
#[derive(Debug)]
pub struct ComplexBuilder {
    complex: FilteredPairComplex,
}

impl ComplexBuilder {
    pub fn new(ambient_dim: usize) -> Self {
        Self {
            complex: FilteredPairComplex::empty(ambient_dim),
        }
    }

    /// Adds a cell and returns its id.
    pub fn cell(&mut self, dim: usize, faces: &[usize], in_a: bool, in_b: bool, f: f64) -> usize {
        let faces: Vec<u32> = faces.iter().map(|&x| x as u32).collect();
        self.cell_with_vertices(dim, &faces, &[], in_a, in_b, f)
    }

    pub fn cell_with_vertices(
        &mut self,
        dim: usize,
        faces: &[u32],
        vertices: &[u32],
        in_a: bool,
        in_b: bool,
        f: f64,
    ) -> usize {
        let id = self.complex.len();
        self.complex.push(dim, faces, vertices, in_a, in_b, f);
        id
    }

    pub fn build(self) -> FilteredPairComplex {
        self.complex
    }
}

/// First broken invariant found by [`validate_pair`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    FaceOutOfRange {
        cell: usize,
        face: usize,
    },
    FaceDimension {
        cell: usize,
        face: usize,
    },
    /// A cell of the named subcomplex has a face outside it.
    Closure {
        set: char,
        cell: usize,
        face: usize,
    },
    /// A cell lies in `A` but not in `B`.
    Containment {
        cell: usize,
    },
    Monotonicity {
        cell: usize,
        face: usize,
    },
    NonFiniteValue {
        cell: usize,
    },
    DimensionRange {
        cell: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::FaceOutOfRange { cell, face } => {
                write!(f, "cell {cell} lists missing face {face}")
            }
            Violation::FaceDimension { cell, face } => {
                write!(
                    f,
                    "face {face} of cell {cell} does not have dimension one lower"
                )
            }
            Violation::Closure { set, cell, face } => {
                write!(
                    f,
                    "closure of {set}: cell {cell} is in {set} but its face {face} is not"
                )
            }
            Violation::Containment { cell } => write!(f, "cell {cell} is in A but not in B"),
            Violation::Monotonicity { cell, face } => {
                write!(f, "monotonicity: f(face {face}) exceeds f(cell {cell})")
            }
            Violation::NonFiniteValue { cell } => write!(f, "cell {cell} has a non-finite value"),
            Violation::DimensionRange { cell } => {
                write!(f, "cell {cell} exceeds the ambient dimension")
            }
        }
    }
}

/// Checks closure of `A` and `B`, `A ⊆ B` and monotonicity of `f`, cell by cell in id
/// order, and returns the first violation.
pub fn validate_pair(c: &FilteredPairComplex) -> Result<(), Violation> {
    for id in 0..c.len() {
        if c.dim(id) > c.ambient_dim {
            return Err(Violation::DimensionRange { cell: id });
        }
        if !c.f(id).is_finite() {
            return Err(Violation::NonFiniteValue { cell: id });
        }
        if c.in_a(id) && !c.in_b(id) {
            return Err(Violation::Containment { cell: id });
        }
        for &face in c.faces(id) {
            let face = face as usize;
            if face >= c.len() {
                return Err(Violation::FaceOutOfRange { cell: id, face });
            }
            if c.dim(face) + 1 != c.dim(id) {
                return Err(Violation::FaceDimension { cell: id, face });
            }
            if c.in_a(id) && !c.in_a(face) {
                return Err(Violation::Closure {
                    set: 'A',
                    cell: id,
                    face,
                });
            }
            if c.in_b(id) && !c.in_b(face) {
                return Err(Violation::Closure {
                    set: 'B',
                    cell: id,
                    face,
                });
            }
            if c.f(face) > c.f(id) {
                return Err(Violation::Monotonicity { cell: id, face });
            }
        }
    }
    Ok(())
}

/// [`validate_pair`] as a structural error.
pub fn ensure_valid(c: &FilteredPairComplex) -> Result<()> {
    validate_pair(c).map_err(|v| Error::Structural(v.to_string()))
}

/// Subcomplex of the cells with `f ≤ radius`, renumbered densely in id order.
///
/// Monotonicity of `f` makes this closed under faces. Bars of the restricted complex
/// agree with the original on `[0, radius]`; classes that die later become essential.
pub fn restrict_to_ball(c: &FilteredPairComplex, radius: f64) -> FilteredPairComplex {
    let mut map = vec![u32::MAX; c.len()];
    let mut next = 0u32;
    for id in 0..c.len() {
        if c.f(id) <= radius {
            map[id] = next;
            next += 1;
        }
    }
    let mut out = FilteredPairComplex::empty(c.ambient_dim);
    let mut faces = Vec::new();
    for id in 0..c.len() {
        if map[id] == u32::MAX {
            continue;
        }
        faces.clear();
        faces.extend(c.faces(id).iter().map(|&g| map[g as usize]));
        out.push(
            c.dim(id),
            &faces,
            c.vertices(id),
            c.in_a(id),
            c.in_b(id),
            c.f(id),
        );
    }
    out
}
