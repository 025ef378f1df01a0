//! Combinatorial polygonal 2-complexes and formal products.
//!
//! A complex is a finite set of vertices, directed edges, and polygonal faces
//! whose boundaries are cyclic words of signed edges. Products are kept
//! formal: a product complex is just its ordered list of factors, and every
//! product query is answered through the link-join rule.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub String);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub String);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FaceId(pub String);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
impl fmt::Display for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId(s.to_owned())
    }
}
impl From<&str> for EdgeId {
    fn from(s: &str) -> Self {
        EdgeId(s.to_owned())
    }
}
impl From<&str> for FaceId {
    fn from(s: &str) -> Self {
        FaceId(s.to_owned())
    }
}

/// Traversal direction of an edge inside a face boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dir {
    #[serde(rename = "+")]
    Fwd,
    #[serde(rename = "-")]
    Rev,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::Fwd => Dir::Rev,
            Dir::Rev => Dir::Fwd,
        }
    }

    pub fn compose(self, other: Dir) -> Dir {
        if self == other {
            Dir::Fwd
        } else {
            Dir::Rev
        }
    }

    pub fn sign(self) -> i64 {
        match self {
            Dir::Fwd => 1,
            Dir::Rev => -1,
        }
    }
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dir::Fwd => write!(f, "+"),
            Dir::Rev => write!(f, "-"),
        }
    }
}

/// An oriented edge occurrence in a face boundary; serializes as `["e3", "+"]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedEdge(pub EdgeId, pub Dir);

impl SignedEdge {
    pub fn edge(&self) -> &EdgeId {
        &self.0
    }

    pub fn dir(&self) -> Dir {
        self.1
    }

    pub fn inverse(&self) -> SignedEdge {
        SignedEdge(self.0.clone(), self.1.flip())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub tail: VertexId,
    pub head: VertexId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub id: FaceId,
    pub boundary: Vec<SignedEdge>,
}

/// A polygonal 2-complex. Serializes to the documented JSON schema with
/// string ids and `"+"`/`"-"` orientation tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolygonalComplex {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<Edge>,
    pub faces: Vec<Face>,
}

/// A formal product of polygonal complexes; never expanded into cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductComplex {
    pub factors: Vec<PolygonalComplex>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexViolation {
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(VertexId),
    #[error("duplicate edge id {0}")]
    DuplicateEdge(EdgeId),
    #[error("duplicate face id {0}")]
    DuplicateFace(FaceId),
    #[error("edge {edge} references unknown vertex {vertex}")]
    UnknownEndpoint { edge: EdgeId, vertex: VertexId },
    #[error("face {face} references unknown edge {edge} at position {position}")]
    UnknownBoundaryEdge {
        face: FaceId,
        edge: EdgeId,
        position: usize,
    },
    #[error("face {face} has length {len} < 3")]
    FaceTooShort { face: FaceId, len: usize },
    #[error("face {face} boundary inconsistent at position {position}: step ends at {found} but next step starts at {expected}")]
    BoundaryInconsistent {
        face: FaceId,
        position: usize,
        found: VertexId,
        expected: VertexId,
    },
}

#[derive(Debug, Clone, Error)]
pub enum ComplexError {
    #[error("invalid complex: {}", format_violations(.0))]
    Invalid(Vec<ComplexViolation>),
    #[error("unknown vertex id {0}")]
    UnknownVertex(VertexId),
    #[error("expected {expected} coordinates, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("bad simplex data: {0}")]
    BadSimplex(String),
}

fn format_violations(v: &[ComplexViolation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl PolygonalComplex {
    pub fn edge(&self, id: &EdgeId) -> Option<&Edge> {
        self.edges.iter().find(|e| &e.id == id)
    }

    pub fn face(&self, id: &FaceId) -> Option<&Face> {
        self.faces.iter().find(|f| &f.id == id)
    }

    pub fn has_vertex(&self, id: &VertexId) -> bool {
        self.vertices.contains(id)
    }

    /// Vertex where a boundary step begins.
    pub fn path_tail(&self, s: &SignedEdge) -> Option<&VertexId> {
        self.edge(s.edge()).map(|e| match s.dir() {
            Dir::Fwd => &e.tail,
            Dir::Rev => &e.head,
        })
    }

    /// Vertex where a boundary step ends.
    pub fn path_head(&self, s: &SignedEdge) -> Option<&VertexId> {
        self.edge(s.edge()).map(|e| match s.dir() {
            Dir::Fwd => &e.head,
            Dir::Rev => &e.tail,
        })
    }

    /// Runs every structural invariant; an empty list means the complex is valid.
    pub fn validate(&self) -> Vec<ComplexViolation> {
        let mut out = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if self.vertices[..i].contains(v) {
                out.push(ComplexViolation::DuplicateVertex(v.clone()));
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            if self.edges[..i].iter().any(|x| x.id == e.id) {
                out.push(ComplexViolation::DuplicateEdge(e.id.clone()));
            }
            for v in [&e.tail, &e.head] {
                if !self.has_vertex(v) {
                    out.push(ComplexViolation::UnknownEndpoint {
                        edge: e.id.clone(),
                        vertex: v.clone(),
                    });
                }
            }
        }
        for (i, f) in self.faces.iter().enumerate() {
            if self.faces[..i].iter().any(|x| x.id == f.id) {
                out.push(ComplexViolation::DuplicateFace(f.id.clone()));
            }
            if f.boundary.len() < 3 {
                out.push(ComplexViolation::FaceTooShort {
                    face: f.id.clone(),
                    len: f.boundary.len(),
                });
            }
            let mut refs_ok = true;
            for (pos, s) in f.boundary.iter().enumerate() {
                if self.edge(s.edge()).is_none() {
                    out.push(ComplexViolation::UnknownBoundaryEdge {
                        face: f.id.clone(),
                        edge: s.edge().clone(),
                        position: pos,
                    });
                    refs_ok = false;
                }
            }
            if refs_ok && !f.boundary.is_empty() {
                let k = f.boundary.len();
                for pos in 0..k {
                    let cur = &f.boundary[pos];
                    let next = &f.boundary[(pos + 1) % k];
                    let found = self.path_head(cur).unwrap();
                    let expected = self.path_tail(next).unwrap();
                    if found != expected {
                        out.push(ComplexViolation::BoundaryInconsistent {
                            face: f.id.clone(),
                            position: pos,
                            found: found.clone(),
                            expected: expected.clone(),
                        });
                    }
                }
            }
        }
        out
    }

    pub fn require_valid(&self) -> Result<(), ComplexError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(ComplexError::Invalid(v))
        }
    }

    pub fn euler_characteristic(&self) -> Result<i64, ComplexError> {
        self.require_valid()?;
        Ok(self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64)
    }

    /// Connectivity of the 1-skeleton (vertices joined by edges).
    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return false;
        }
        let index = |v: &VertexId| self.vertices.iter().position(|x| x == v).unwrap();
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for e in &self.edges {
                let (a, b) = (index(&e.tail), index(&e.head));
                for (x, y) in [(a, b), (b, a)] {
                    if x == i && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.iter().all(|&s| s)
    }
}

/// Free-function form of [`PolygonalComplex::validate`].
pub fn validate_complex(c: &PolygonalComplex) -> Vec<ComplexViolation> {
    c.validate()
}

impl ProductComplex {
    pub fn new(factors: Vec<PolygonalComplex>) -> Self {
        ProductComplex { factors }
    }

    pub fn validate(&self) -> Vec<(usize, ComplexViolation)> {
        let mut out = Vec::new();
        for (i, f) in self.factors.iter().enumerate() {
            for v in f.validate() {
                out.push((i, v));
            }
        }
        out
    }

    pub fn require_valid(&self) -> Result<(), ComplexError> {
        let v: Vec<ComplexViolation> = self.validate().into_iter().map(|(_, x)| x).collect();
        if v.is_empty() {
            Ok(())
        } else {
            Err(ComplexError::Invalid(v))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn wedge_of_two_circles() -> PolygonalComplex {
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

    #[test]
    fn wedge_is_valid_with_euler_minus_one() {
        let c = wedge_of_two_circles();
        assert!(c.validate().is_empty());
        assert_eq!(c.euler_characteristic().unwrap(), -1);
    }

    #[test]
    fn single_vertex_has_euler_one() {
        let c = PolygonalComplex {
            vertices: vec!["v".into()],
            edges: vec![],
            faces: vec![],
        };
        assert_eq!(c.euler_characteristic().unwrap(), 1);
    }

    #[test]
    fn short_face_is_rejected() {
        let mut c = wedge_of_two_circles();
        c.faces.push(Face {
            id: "f".into(),
            boundary: vec![
                SignedEdge("a".into(), Dir::Fwd),
                SignedEdge("b".into(), Dir::Rev),
            ],
        });
        let violations = c.validate();
        assert!(violations
            .iter()
            .any(|v| matches!(v, ComplexViolation::FaceTooShort { len: 2, .. })));
    }

    #[test]
    fn inconsistent_boundary_is_flagged() {
        let c = PolygonalComplex {
            vertices: vec!["p".into(), "q".into(), "r".into()],
            edges: vec![
                Edge {
                    id: "e1".into(),
                    tail: "p".into(),
                    head: "q".into(),
                },
                Edge {
                    id: "e2".into(),
                    tail: "q".into(),
                    head: "r".into(),
                },
                Edge {
                    id: "e3".into(),
                    tail: "p".into(),
                    head: "r".into(),
                },
            ],
            faces: vec![Face {
                id: "f".into(),
                // e3 is traversed forward but should be reversed to close up
                boundary: vec![
                    SignedEdge("e1".into(), Dir::Fwd),
                    SignedEdge("e2".into(), Dir::Fwd),
                    SignedEdge("e3".into(), Dir::Fwd),
                ],
            }],
        };
        let violations = c.validate();
        assert!(violations
            .iter()
            .any(|v| matches!(v, ComplexViolation::BoundaryInconsistent { .. })));
        // reversing e3 fixes it
        let mut fixed = c.clone();
        fixed.faces[0].boundary[2] = SignedEdge("e3".into(), Dir::Rev);
        assert!(fixed.validate().is_empty());
    }

    #[test]
    fn json_round_trip_is_bit_identical() {
        let c = wedge_of_two_circles();
        let s1 = serde_json::to_string(&c).unwrap();
        let c2: PolygonalComplex = serde_json::from_str(&s1).unwrap();
        let s2 = serde_json::to_string(&c2).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(c, c2);
    }
}
