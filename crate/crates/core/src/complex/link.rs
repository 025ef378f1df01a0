//! Links of vertices: the combinatorial sphere of directions at a vertex.
//!
//! Link vertices are edge-ends incident to the base vertex (a loop
//! contributes two), and link edges are face corners at the base vertex.
//! The link of a vertex tuple in a formal product is the join of the
//! factor links.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::polygonal::{ComplexError, EdgeId, FaceId, PolygonalComplex, ProductComplex, VertexId};
use super::simplicial::SimplicialComplex;

/// Which end of an edge a direction leaves through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndKind {
    Tail,
    Head,
}

impl EndKind {
    pub fn flip(self) -> EndKind {
        match self {
            EndKind::Tail => EndKind::Head,
            EndKind::Head => EndKind::Tail,
        }
    }
}

/// An edge-end: one of the two directions along an edge.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeEnd {
    pub edge: EdgeId,
    pub kind: EndKind,
}

impl fmt::Display for EdgeEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // tail ends are the directions a forward edge leaves through, written
        // with a minus; head ends with a plus
        match self.kind {
            EndKind::Tail => write!(f, "{}-", self.edge),
            EndKind::Head => write!(f, "{}+", self.edge),
        }
    }
}

/// A link vertex: an edge-end, tagged with the product factor it comes from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LinkVertex {
    pub factor: usize,
    pub end: EdgeEnd,
}

/// Morse polarity of a link vertex; `None` until a weighting is supplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Ascending,
    Descending,
    None,
}

/// Where a link edge came from: a face corner in one factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CornerRef {
    pub factor: usize,
    pub face: FaceId,
    pub corner: usize,
}

/// One link edge of the corner multigraph, with provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkEdge {
    pub a: usize,
    pub b: usize,
    pub corner: CornerRef,
}

/// The link of a vertex (or vertex tuple, for products).
///
/// `corner_edges` is the honest multigraph of face corners (parallel edges
/// and degenerate corners kept, for curvature checks); `base` is the
/// deduplicated simplicial complex (the join, for products).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkComplex {
    vertices: Vec<LinkVertex>,
    labels: Vec<String>,
    corner_edges: Vec<LinkEdge>,
    base: SimplicialComplex,
    polarity: Vec<Polarity>,
    factor_count: usize,
}

impl LinkComplex {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[LinkVertex] {
        &self.vertices
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn corner_edges(&self) -> &[LinkEdge] {
        &self.corner_edges
    }

    pub fn base(&self) -> &SimplicialComplex {
        &self.base
    }

    pub fn polarity(&self) -> &[Polarity] {
        &self.polarity
    }

    pub fn factor_count(&self) -> usize {
        self.factor_count
    }

    pub fn vertex_index(&self, factor: usize, end: &EdgeEnd) -> Option<usize> {
        self.vertices
            .iter()
            .position(|v| v.factor == factor && &v.end == end)
    }

    pub(crate) fn set_polarity(&mut self, tags: Vec<Polarity>) {
        assert_eq!(tags.len(), self.vertices.len());
        self.polarity = tags;
    }

    /// Restriction to a subset of link vertices (induced on the base,
    /// corner edges kept only when both ends survive).
    pub fn restrict(&self, keep: &[bool]) -> LinkComplex {
        assert_eq!(keep.len(), self.vertices.len());
        let mut old_to_new: BTreeMap<usize, usize> = BTreeMap::new();
        let mut vertices = Vec::new();
        let mut labels = Vec::new();
        let mut polarity = Vec::new();
        for (i, &k) in keep.iter().enumerate() {
            if k {
                old_to_new.insert(i, vertices.len());
                vertices.push(self.vertices[i].clone());
                labels.push(self.labels[i].clone());
                polarity.push(self.polarity[i]);
            }
        }
        let corner_edges: Vec<LinkEdge> = self
            .corner_edges
            .iter()
            .filter(|e| keep[e.a] && keep[e.b])
            .map(|e| LinkEdge {
                a: old_to_new[&e.a],
                b: old_to_new[&e.b],
                corner: e.corner.clone(),
            })
            .collect();
        let keep_set = keep
            .iter()
            .enumerate()
            .filter(|(_, &k)| k)
            .map(|(i, _)| i)
            .collect();
        let base = self.base.induced(&keep_set);
        LinkComplex {
            vertices,
            labels,
            corner_edges,
            base,
            polarity,
            factor_count: self.factor_count,
        }
    }
}

/// Link of `v` in a polygonal complex.
///
/// Link vertices are the edge-ends at `v`; each face corner sitting at `v`
/// contributes one link edge joining the two edge-ends of the corner.
pub fn vertex_link(c: &PolygonalComplex, v: &VertexId) -> Result<LinkComplex, ComplexError> {
    c.require_valid()?;
    if !c.has_vertex(v) {
        return Err(ComplexError::UnknownVertex(v.clone()));
    }

    let mut vertices: Vec<LinkVertex> = Vec::new();
    for e in &c.edges {
        if &e.tail == v {
            vertices.push(LinkVertex {
                factor: 0,
                end: EdgeEnd {
                    edge: e.id.clone(),
                    kind: EndKind::Tail,
                },
            });
        }
        if &e.head == v {
            vertices.push(LinkVertex {
                factor: 0,
                end: EdgeEnd {
                    edge: e.id.clone(),
                    kind: EndKind::Head,
                },
            });
        }
    }
    let labels: Vec<String> = vertices.iter().map(|lv| lv.end.to_string()).collect();
    let index_of = |end: &EdgeEnd| vertices.iter().position(|lv| &lv.end == end).unwrap();

    let mut corner_edges = Vec::new();
    let mut corners_at_v = 0usize;
    for f in &c.faces {
        let k = f.boundary.len();
        for pos in 0..k {
            let cur = &f.boundary[pos];
            let next = &f.boundary[(pos + 1) % k];
            if c.path_head(cur).unwrap() != v {
                continue;
            }
            corners_at_v += 1;
            // the end of `cur` at the corner is its path-head side, the end
            // of `next` is its path-tail side
            let end_in = EdgeEnd {
                edge: cur.edge().clone(),
                kind: match cur.dir() {
                    super::polygonal::Dir::Fwd => EndKind::Head,
                    super::polygonal::Dir::Rev => EndKind::Tail,
                },
            };
            let end_out = EdgeEnd {
                edge: next.edge().clone(),
                kind: match next.dir() {
                    super::polygonal::Dir::Fwd => EndKind::Tail,
                    super::polygonal::Dir::Rev => EndKind::Head,
                },
            };
            corner_edges.push(LinkEdge {
                a: index_of(&end_in),
                b: index_of(&end_out),
                corner: CornerRef {
                    factor: 0,
                    face: f.id.clone(),
                    corner: pos,
                },
            });
        }
    }
    debug_assert_eq!(corners_at_v, corner_edges.len());

    // base simplicial complex: dedup non-degenerate corner pairs
    let mut simplices: Vec<Vec<usize>> = corner_edges
        .iter()
        .filter(|e| e.a != e.b)
        .map(|e| vec![e.a.min(e.b), e.a.max(e.b)])
        .collect();
    simplices.extend((0..vertices.len()).map(|i| vec![i]));
    let base = SimplicialComplex::new(labels.clone(), simplices)?;
    let n = vertices.len();
    Ok(LinkComplex {
        vertices,
        labels,
        corner_edges,
        base,
        polarity: vec![Polarity::None; n],
        factor_count: 1,
    })
}

/// Link of a vertex tuple in a formal product: the iterated join of the
/// factor links. A single-factor product gives back the factor link.
pub fn product_link(p: &ProductComplex, coords: &[VertexId]) -> Result<LinkComplex, ComplexError> {
    if coords.len() != p.factors.len() {
        return Err(ComplexError::ArityMismatch {
            expected: p.factors.len(),
            got: coords.len(),
        });
    }
    let factor_links: Vec<LinkComplex> = p
        .factors
        .iter()
        .zip(coords)
        .map(|(c, v)| vertex_link(c, v))
        .collect::<Result<_, _>>()?;
    Ok(join_links(factor_links))
}

/// Joins a list of factor links into one link, re-tagging factors and
/// prefixing labels with the factor index when there is more than one.
pub fn join_links(factor_links: Vec<LinkComplex>) -> LinkComplex {
    if factor_links.len() == 1 {
        return factor_links.into_iter().next().unwrap();
    }
    let mut vertices = Vec::new();
    let mut labels = Vec::new();
    let mut corner_edges = Vec::new();
    let mut polarity = Vec::new();
    let mut base = SimplicialComplex::empty();
    for (f, link) in factor_links.iter().enumerate() {
        let offset = vertices.len();
        for lv in &link.vertices {
            vertices.push(LinkVertex {
                factor: f,
                end: lv.end.clone(),
            });
        }
        labels.extend(link.labels.iter().map(|l| format!("{f}:{l}")));
        polarity.extend(link.polarity.iter().copied());
        corner_edges.extend(link.corner_edges.iter().map(|e| LinkEdge {
            a: e.a + offset,
            b: e.b + offset,
            corner: CornerRef {
                factor: f,
                face: e.corner.face.clone(),
                corner: e.corner.corner,
            },
        }));
        let relabeled = link
            .base
            .with_labels(link.labels.iter().map(|l| format!("{f}:{l}")).collect());
        base = base.join(&relabeled);
    }
    let factor_count = factor_links.len();
    LinkComplex {
        vertices,
        labels,
        corner_edges,
        base,
        polarity,
        factor_count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::polygonal::{Dir, Edge, Face, SignedEdge};

    fn wedge() -> PolygonalComplex {
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
    fn wedge_link_is_four_points() {
        let link = vertex_link(&wedge(), &"v".into()).unwrap();
        assert_eq!(link.vertex_count(), 4);
        assert!(link.corner_edges().is_empty());
        assert_eq!(
            link.labels(),
            &["a-".to_string(), "a+".into(), "b-".into(), "b+".into()]
        );
    }

    #[test]
    fn unknown_vertex_is_an_error() {
        assert!(matches!(
            vertex_link(&wedge(), &"w".into()),
            Err(ComplexError::UnknownVertex(_))
        ));
    }

    #[test]
    fn square_on_four_loops_has_four_corners() {
        let mut c = wedge();
        c.edges.push(Edge {
            id: "c".into(),
            tail: "v".into(),
            head: "v".into(),
        });
        c.edges.push(Edge {
            id: "d".into(),
            tail: "v".into(),
            head: "v".into(),
        });
        c.faces.push(Face {
            id: "f".into(),
            boundary: vec![
                SignedEdge("a".into(), Dir::Fwd),
                SignedEdge("b".into(), Dir::Fwd),
                SignedEdge("c".into(), Dir::Fwd),
                SignedEdge("d".into(), Dir::Fwd),
            ],
        });
        let link = vertex_link(&c, &"v".into()).unwrap();
        assert_eq!(link.vertex_count(), 8);
        assert_eq!(link.corner_edges().len(), 4);
        assert_eq!(link.base().simplices_of_dim(1).len(), 4);
    }

    #[test]
    fn corner_count_matches_face_length_sum() {
        // one-vertex complex: every corner of every face sits at v
        let mut c = wedge();
        c.faces.push(Face {
            id: "f".into(),
            boundary: vec![
                SignedEdge("a".into(), Dir::Fwd),
                SignedEdge("b".into(), Dir::Fwd),
                SignedEdge("a".into(), Dir::Rev),
                SignedEdge("b".into(), Dir::Rev),
            ],
        });
        let link = vertex_link(&c, &"v".into()).unwrap();
        let total: usize = c.faces.iter().map(|f| f.boundary.len()).sum();
        assert_eq!(link.corner_edges().len(), total);
    }

    #[test]
    fn product_of_two_wedges_links_to_complete_bipartite() {
        let p = ProductComplex::new(vec![wedge(), wedge()]);
        let link = product_link(&p, &["v".into(), "v".into()]).unwrap();
        assert_eq!(link.vertex_count(), 8);
        // join of two 4-point sets: complete bipartite on 4+4
        assert_eq!(link.base().simplices_of_dim(1).len(), 16);
        assert_eq!(link.base().dim(), Some(1));
    }

    #[test]
    fn single_factor_product_link_equals_vertex_link() {
        let p = ProductComplex::new(vec![wedge()]);
        let via_product = product_link(&p, &["v".into()]).unwrap();
        let direct = vertex_link(&wedge(), &"v".into()).unwrap();
        assert_eq!(via_product, direct);
    }
}
