//! Builders for the worked examples: tori of wedges with the coordinate
//! swap, the one-vertex hexagonal complex with its shift symmetry, and the
//! product of two hexagonal complexes with the diagonal shift.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::link::vertex_link;
use crate::complex::polygonal::{
    Dir, Edge, EdgeId, Face, FaceId, PolygonalComplex, SignedEdge, VertexId,
};
use crate::curvature::CornerAngleAssignment;
use crate::morse::MorseWeighting;
use crate::symmetry::{CellularAutomorphism, ModelInput, SymmetryError};

#[derive(Debug, Clone, Error)]
pub enum BuildError {
    #[error("unknown example name {0:?} (expected raag-N, hexagon, hexagon-product)")]
    UnknownExample(String),
    #[error("raag parameter must be at least 1")]
    BadRaagParameter,
    #[error("face family fails the link invariant: {0}")]
    BadFaceFamily(String),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("cannot parse {path}: {message}")]
    Parse { path: String, message: String },
}

/// Which example to build.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExampleSpec {
    /// Product of `n` wedges of two circles with the diagonal swap.
    Raag { n: usize },
    /// The one-vertex hexagonal complex with the shift of order 8.
    Hexagon,
    /// Product of two hexagonal complexes with the diagonal shift.
    HexagonProduct,
    /// A bundle read from disk.
    Custom { path: PathBuf },
}

impl ExampleSpec {
    /// Parses names like `raag-3`, `hexagon`, `hexagon-product`.
    pub fn parse(name: &str) -> Result<ExampleSpec, BuildError> {
        match name {
            "hexagon" => Ok(ExampleSpec::Hexagon),
            "hexagon-product" => Ok(ExampleSpec::HexagonProduct),
            _ => {
                if let Some(n) = name.strip_prefix("raag-") {
                    let n: usize = n
                        .parse()
                        .map_err(|_| BuildError::UnknownExample(name.to_string()))?;
                    if n == 0 {
                        return Err(BuildError::BadRaagParameter);
                    }
                    return Ok(ExampleSpec::Raag { n });
                }
                Err(BuildError::UnknownExample(name.to_string()))
            }
        }
    }
}

/// Eight hexagonal boundary words over edges indexed mod 8, generated from
/// a single template so the family is shift-equivariant by construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HexagonFaceFamily {
    /// Offsets (mod 8) and directions of the six letters of face i.
    pub template: Vec<(u8, Dir)>,
}

impl HexagonFaceFamily {
    /// The shipped default: face i reads edge offsets
    /// `+0, +3, +0, -(+1), -(+0), -(+1)`.
    pub fn default_family() -> Self {
        HexagonFaceFamily {
            template: vec![
                (0, Dir::Fwd),
                (3, Dir::Fwd),
                (0, Dir::Fwd),
                (1, Dir::Rev),
                (0, Dir::Rev),
                (1, Dir::Rev),
            ],
        }
    }

    /// A shift-equivariant variant whose faces do not close up under the
    /// unit weighting (signed sum +2); same link, broken Morse data.
    /// Useful as a negative control.
    pub fn drift_family() -> Self {
        HexagonFaceFamily {
            template: vec![
                (0, Dir::Fwd),
                (3, Dir::Fwd),
                (0, Dir::Fwd),
                (1, Dir::Rev),
                (0, Dir::Rev),
                (1, Dir::Fwd),
            ],
        }
    }

    pub fn word(&self, i: usize) -> Vec<SignedEdge> {
        self.template
            .iter()
            .map(|&(off, dir)| SignedEdge(hex_edge_id((i + off as usize) % 8), dir))
            .collect()
    }
}

fn hex_edge_id(i0: usize) -> EdgeId {
    EdgeId(format!("{}", i0 + 1))
}

fn hex_face_id(i0: usize) -> FaceId {
    FaceId(format!("f{}", i0 + 1))
}

/// One vertex, eight loop edges `1..8`, eight hexagonal faces from the
/// family.
pub fn hexagon_complex_from(family: &HexagonFaceFamily) -> PolygonalComplex {
    let vertices = vec![VertexId("v".into())];
    let edges = (0..8)
        .map(|i| Edge {
            id: hex_edge_id(i),
            tail: "v".into(),
            head: "v".into(),
        })
        .collect();
    let faces = (0..8)
        .map(|i| Face {
            id: hex_face_id(i),
            boundary: family.word(i),
        })
        .collect();
    PolygonalComplex {
        vertices,
        edges,
        faces,
    }
}

/// The shift automorphism: edge i -> i+1 (orientation preserved), faces
/// follow by inference.
pub fn hexagon_shift(c: &PolygonalComplex) -> Result<CellularAutomorphism, SymmetryError> {
    let mut vertex_map = BTreeMap::new();
    vertex_map.insert(VertexId("v".into()), VertexId("v".into()));
    let mut edge_map = BTreeMap::new();
    for i in 0..8 {
        edge_map.insert(hex_edge_id(i), (hex_edge_id((i + 1) % 8), Dir::Fwd));
    }
    CellularAutomorphism::from_edge_data(c, vertex_map, edge_map)
}

/// Checks the exact-cover link invariant of a hexagon family: ascending
/// 8-cycle on the tail ends, descending 8-cycle on the head ends, and the
/// cross corners head(i) to tail(i±1), tail(i±3), each exactly once
/// (48 corners in total, all distinct).
pub fn check_hexagon_link_invariant(c: &PolygonalComplex) -> Result<(), BuildError> {
    let link = vertex_link(c, &"v".into()).map_err(|e| BuildError::BadFaceFamily(e.to_string()))?;
    if link.vertex_count() != 16 {
        return Err(BuildError::BadFaceFamily(format!(
            "expected 16 edge-ends, found {}",
            link.vertex_count()
        )));
    }
    let mut expected: BTreeMap<(String, String), usize> = BTreeMap::new();
    let tail = |i: usize| format!("{}-", (i % 8) + 1);
    let head = |i: usize| format!("{}+", (i % 8) + 1);
    let key = |x: String, y: String| {
        if x <= y {
            (x, y)
        } else {
            (y, x)
        }
    };
    for i in 0..8 {
        *expected.entry(key(tail(i), tail(i + 1))).or_insert(0) += 1;
        *expected.entry(key(head(i), head(i + 1))).or_insert(0) += 1;
        *expected.entry(key(head(i), tail(i + 1))).or_insert(0) += 1;
        *expected.entry(key(head(i), tail(i + 7))).or_insert(0) += 1;
        *expected.entry(key(head(i), tail(i + 3))).or_insert(0) += 1;
        *expected.entry(key(head(i), tail(i + 5))).or_insert(0) += 1;
    }
    let mut got: BTreeMap<(String, String), usize> = BTreeMap::new();
    for e in link.corner_edges() {
        let (a, b) = (link.labels()[e.a].clone(), link.labels()[e.b].clone());
        *got.entry(key(a, b)).or_insert(0) += 1;
    }
    if got != expected {
        return Err(BuildError::BadFaceFamily(
            "corner multiset does not exactly cover the 48 expected link edges".into(),
        ));
    }
    Ok(())
}

/// The wedge of two circles: one vertex, loop edges `a` and `b`.
pub fn wedge_complex() -> PolygonalComplex {
    PolygonalComplex {
        vertices: vec!["v".into()],
        edges: vec![
            Edge {
                id: "a".into(),
                tail: "v".into(),
                head: "v".into(),
            },
            Edge {
                id: "b".into(),
                tail: "v".into(),
                head: "v".into(),
            },
        ],
        faces: vec![],
    }
}

/// The swap of the two circles (orientation preserved).
pub fn wedge_swap(c: &PolygonalComplex) -> Result<CellularAutomorphism, SymmetryError> {
    let mut vertex_map = BTreeMap::new();
    vertex_map.insert(VertexId("v".into()), VertexId("v".into()));
    let mut edge_map = BTreeMap::new();
    edge_map.insert(EdgeId("a".into()), (EdgeId("b".into()), Dir::Fwd));
    edge_map.insert(EdgeId("b".into()), (EdgeId("a".into()), Dir::Fwd));
    CellularAutomorphism::from_edge_data(c, vertex_map, edge_map)
}

/// A built example: the model input plus a display name.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BuiltExample {
    pub name: String,
    pub input: ModelInput,
}

/// Builds the requested example with unit weights, right angles, and the
/// designated diagonal symmetry.
pub fn build_example(spec: &ExampleSpec) -> Result<BuiltExample, BuildError> {
    match spec {
        ExampleSpec::Raag { n } => {
            if *n == 0 {
                return Err(BuildError::BadRaagParameter);
            }
            let factor = wedge_complex();
            let swap = wedge_swap(&factor)?;
            let input = ModelInput {
                factors: vec![factor.clone(); *n],
                weightings: vec![MorseWeighting::unit(&factor); *n],
                angles: vec![CornerAngleAssignment::right_angled(&factor); *n],
                automorphisms: vec![swap; *n],
                base_vertices: vec!["v".into(); *n],
                metadata: BTreeMap::from([(
                    "description".to_string(),
                    format!("product of {n} wedges of two circles with the diagonal swap"),
                )]),
            };
            Ok(BuiltExample {
                name: format!("raag-{n}"),
                input,
            })
        }
        ExampleSpec::Hexagon => {
            let family = HexagonFaceFamily::default_family();
            let c = hexagon_complex_from(&family);
            check_hexagon_link_invariant(&c)?;
            let shift = hexagon_shift(&c)?;
            let input = ModelInput {
                weightings: vec![MorseWeighting::unit(&c)],
                angles: vec![CornerAngleAssignment::right_angled(&c)],
                automorphisms: vec![shift],
                base_vertices: vec!["v".into()],
                metadata: BTreeMap::from([
                    (
                        "description".to_string(),
                        "one vertex, eight loop edges, eight right-angled hyperbolic hexagons, \
                         shift symmetry of order 8"
                            .to_string(),
                    ),
                    (
                        "face_family".to_string(),
                        "x_i x_{i+3} x_i x_{i+1}^-1 x_i^-1 x_{i+1}^-1 (i mod 8)".to_string(),
                    ),
                    (
                        "face_family_note".to_string(),
                        "default family; any shift-equivariant family passing the exact-cover \
                         link invariant is interchangeable, since every downstream claim \
                         depends only on the link structure, the corner heights, and the \
                         shift equivariance"
                            .to_string(),
                    ),
                ]),
                factors: vec![c],
            };
            Ok(BuiltExample {
                name: "hexagon".to_string(),
                input,
            })
        }
        ExampleSpec::HexagonProduct => {
            let hexagon = build_example(&ExampleSpec::Hexagon)?;
            let f = hexagon.input.factors[0].clone();
            let w = hexagon.input.weightings[0].clone();
            let a = hexagon.input.angles[0].clone();
            let s = hexagon.input.automorphisms[0].clone();
            let input = ModelInput {
                factors: vec![f.clone(), f],
                weightings: vec![w.clone(), w],
                angles: vec![a.clone(), a],
                automorphisms: vec![s.clone(), s],
                base_vertices: vec!["v".into(), "v".into()],
                metadata: BTreeMap::from([(
                    "description".to_string(),
                    "product of two hexagonal complexes, sum weighting, diagonal shift".to_string(),
                )]),
            };
            Ok(BuiltExample {
                name: "hexagon-product".to_string(),
                input,
            })
        }
        ExampleSpec::Custom { path } => {
            let raw = std::fs::read_to_string(path).map_err(|e| BuildError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            let input: ModelInput = serde_json::from_str(&raw).map_err(|e| BuildError::Parse {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            Ok(BuiltExample {
                name: path.display().to_string(),
                input,
            })
        }
    }
}
