//! Circle-valued Morse functions as integer edge weightings.
//!
//! A weighting assigns each edge the nonzero degree with which it wraps the
//! circle. Validity is purely combinatorial: every face has signed weight
//! sum zero and unimodal corner heights (unique maximum and minimum corner),
//! which is exactly what an affine nonconstant extension over a convex
//! polygon requires. The linear extension itself is never materialized.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::link::{join_links, vertex_link, LinkComplex, Polarity};
use crate::complex::polygonal::{
    ComplexError, EdgeId, FaceId, PolygonalComplex, ProductComplex, SignedEdge, VertexId,
};
use crate::complex::simplicial::{SimplicialComplex, Trilean};
use crate::complex::{homology, EndKind, HomologyProfile};

/// Map from edge ids to nonzero integer degrees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorseWeighting {
    pub weights: BTreeMap<EdgeId, i64>,
}

impl MorseWeighting {
    pub fn new(weights: BTreeMap<EdgeId, i64>) -> Self {
        MorseWeighting { weights }
    }

    /// Weight `+1` on every edge of the complex.
    pub fn unit(c: &PolygonalComplex) -> Self {
        MorseWeighting {
            weights: c.edges.iter().map(|e| (e.id.clone(), 1)).collect(),
        }
    }

    pub fn weight(&self, e: &EdgeId) -> Option<i64> {
        self.weights.get(e).copied()
    }

    /// Height change along one boundary step.
    pub fn signed_weight(&self, s: &SignedEdge) -> Option<i64> {
        self.weight(s.edge()).map(|w| w * s.dir().sign())
    }

    /// Negation swaps ascending and descending everywhere.
    pub fn negated(&self) -> Self {
        MorseWeighting {
            weights: self.weights.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorseViolation {
    #[error("edge {0} has no weight")]
    MissingWeight(EdgeId),
    #[error("edge {0} has weight 0")]
    ZeroWeight(EdgeId),
    #[error("face {face} has signed weight sum {sum} != 0")]
    NonzeroFaceSum { face: FaceId, sum: i64 },
    #[error("face {face} is not unimodal: {max_corners} maximum corners and {min_corners} minimum corners")]
    NotUnimodal {
        face: FaceId,
        max_corners: usize,
        min_corners: usize,
    },
}

#[derive(Debug, Clone, Error)]
pub enum MorseError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("invalid Morse data: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidWeighting(Vec<MorseViolation>),
    #[error("complex is not connected")]
    Disconnected,
    #[error("unknown face id {0}")]
    UnknownFace(FaceId),
    #[error("expected {expected} weightings, got {got}")]
    ArityMismatch { expected: usize, got: usize },
}

/// Corner heights of one face: partial sums of signed weights around the
/// boundary, anchored at 0 on the starting vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CornerHeights {
    pub face: FaceId,
    pub heights: Vec<i64>,
}

impl CornerHeights {
    /// Closure defect: nonzero iff the face's signed weights do not sum to 0.
    pub fn closure_defect(&self, c: &PolygonalComplex, w: &MorseWeighting) -> i64 {
        let f = c.face(&self.face).expect("face exists");
        f.boundary
            .iter()
            .map(|s| w.signed_weight(s).unwrap_or(0))
            .sum()
    }
}

/// Heights at the path-tail of each boundary step.
pub fn corner_heights(
    c: &PolygonalComplex,
    w: &MorseWeighting,
    face: &FaceId,
) -> Result<CornerHeights, MorseError> {
    c.require_valid()?;
    let f = c
        .face(face)
        .ok_or_else(|| MorseError::UnknownFace(face.clone()))?;
    let mut heights = Vec::with_capacity(f.boundary.len());
    let mut h = 0i64;
    for s in &f.boundary {
        heights.push(h);
        let sw = w.signed_weight(s).ok_or_else(|| {
            MorseError::InvalidWeighting(vec![MorseViolation::MissingWeight(s.edge().clone())])
        })?;
        h += sw;
    }
    Ok(CornerHeights {
        face: face.clone(),
        heights,
    })
}

/// Checks the weighting: all weights present and nonzero, every face closes
/// up (signed sum 0), and every face's cyclic sign pattern has exactly one
/// `+ -> -` and one `- -> +` transition.
pub fn validate_morse(c: &PolygonalComplex, w: &MorseWeighting) -> Vec<MorseViolation> {
    let mut out = Vec::new();
    for e in &c.edges {
        match w.weight(&e.id) {
            None => out.push(MorseViolation::MissingWeight(e.id.clone())),
            Some(0) => out.push(MorseViolation::ZeroWeight(e.id.clone())),
            Some(_) => {}
        }
    }
    if !out.is_empty() {
        return out;
    }
    for f in &c.faces {
        let signed: Vec<i64> = f
            .boundary
            .iter()
            .map(|s| w.signed_weight(s).unwrap())
            .collect();
        let sum: i64 = signed.iter().sum();
        if sum != 0 {
            out.push(MorseViolation::NonzeroFaceSum {
                face: f.id.clone(),
                sum,
            });
        }
        let (max_corners, min_corners) = sign_transitions(&signed);
        if max_corners != 1 || min_corners != 1 {
            out.push(MorseViolation::NotUnimodal {
                face: f.id.clone(),
                max_corners,
                min_corners,
            });
        }
    }
    out
}

/// Counts cyclic `+ -> -` (maximum corners) and `- -> +` (minimum corners)
/// transitions in a signed weight sequence.
fn sign_transitions(signed: &[i64]) -> (usize, usize) {
    let k = signed.len();
    let mut maxima = 0;
    let mut minima = 0;
    for i in 0..k {
        let cur = signed[i] > 0;
        let next = signed[(i + 1) % k] > 0;
        if cur && !next {
            maxima += 1;
        }
        if !cur && next {
            minima += 1;
        }
    }
    (maxima, minima)
}

pub fn require_valid_morse(c: &PolygonalComplex, w: &MorseWeighting) -> Result<(), MorseError> {
    let v = validate_morse(c, w);
    if v.is_empty() {
        Ok(())
    } else {
        Err(MorseError::InvalidWeighting(v))
    }
}

/// Does the Morse function increase when leaving the base vertex through
/// this edge-end? Tail ends of positive edges ascend; so do head ends of
/// negative edges.
fn ascends(w: &MorseWeighting, edge: &EdgeId, kind: EndKind) -> bool {
    let weight = w.weight(edge).expect("validated weighting");
    match kind {
        EndKind::Tail => weight > 0,
        EndKind::Head => weight < 0,
    }
}

/// Full link with Morse polarity tags.
pub fn full_link(
    c: &PolygonalComplex,
    w: &MorseWeighting,
    v: &VertexId,
) -> Result<LinkComplex, MorseError> {
    require_valid_morse(c, w)?;
    let mut link = vertex_link(c, v)?;
    let tags: Vec<Polarity> = link
        .vertices()
        .iter()
        .map(|lv| {
            if ascends(w, &lv.end.edge, lv.end.kind) {
                Polarity::Ascending
            } else {
                Polarity::Descending
            }
        })
        .collect();
    link.set_polarity(tags);
    Ok(link)
}

fn restrict_to(link: &LinkComplex, polarity: Polarity) -> LinkComplex {
    let keep: Vec<bool> = link.polarity().iter().map(|&p| p == polarity).collect();
    link.restrict(&keep)
}

/// Ascending link: edge-ends along which the Morse function increases, with
/// the face corners both of whose ends ascend (each face's unique minimum
/// corner).
pub fn ascending_link(
    c: &PolygonalComplex,
    w: &MorseWeighting,
    v: &VertexId,
) -> Result<LinkComplex, MorseError> {
    Ok(restrict_to(&full_link(c, w, v)?, Polarity::Ascending))
}

pub fn descending_link(
    c: &PolygonalComplex,
    w: &MorseWeighting,
    v: &VertexId,
) -> Result<LinkComplex, MorseError> {
    Ok(restrict_to(&full_link(c, w, v)?, Polarity::Descending))
}

/// Full link of a vertex tuple in a formal product, with polarity from the
/// sum weighting (each factor keeps its own tags; a join simplex ascends
/// iff all its vertices do).
pub fn product_full_link(
    p: &ProductComplex,
    ws: &[MorseWeighting],
    coords: &[VertexId],
) -> Result<LinkComplex, MorseError> {
    if ws.len() != p.factors.len() {
        return Err(MorseError::ArityMismatch {
            expected: p.factors.len(),
            got: ws.len(),
        });
    }
    if coords.len() != p.factors.len() {
        return Err(MorseError::Complex(ComplexError::ArityMismatch {
            expected: p.factors.len(),
            got: coords.len(),
        }));
    }
    let links: Vec<LinkComplex> = p
        .factors
        .iter()
        .zip(ws)
        .zip(coords)
        .map(|((c, w), v)| full_link(c, w, v))
        .collect::<Result<_, _>>()?;
    Ok(join_links(links))
}

pub fn product_ascending_link(
    p: &ProductComplex,
    ws: &[MorseWeighting],
    coords: &[VertexId],
) -> Result<LinkComplex, MorseError> {
    Ok(restrict_to(
        &product_full_link(p, ws, coords)?,
        Polarity::Ascending,
    ))
}

pub fn product_descending_link(
    p: &ProductComplex,
    ws: &[MorseWeighting],
    coords: &[VertexId],
) -> Result<LinkComplex, MorseError> {
    Ok(restrict_to(
        &product_full_link(p, ws, coords)?,
        Polarity::Descending,
    ))
}

/// Index of the image of the induced map to Z, computed from the weights of
/// the loops induced by a spanning tree: 1 means epimorphism, 0 trivial
/// image.
pub fn morse_image_index(c: &PolygonalComplex, w: &MorseWeighting) -> Result<u64, MorseError> {
    c.require_valid()?;
    for e in &c.edges {
        if w.weight(&e.id).is_none() {
            return Err(MorseError::InvalidWeighting(vec![
                MorseViolation::MissingWeight(e.id.clone()),
            ]));
        }
    }
    if !c.is_connected() {
        return Err(MorseError::Disconnected);
    }
    let (potential, tree) = spanning_tree_potential(c, w);
    let mut g: u64 = 0;
    for (i, e) in c.edges.iter().enumerate() {
        if tree[i] {
            continue;
        }
        let loop_weight = loop_weight(c, w, &potential, e);
        g = num::integer::gcd(g, loop_weight.unsigned_abs());
    }
    Ok(g)
}

/// Heights of vertices along a spanning tree (root = first vertex), plus a
/// marker for which edges went into the tree.
fn spanning_tree_potential(
    c: &PolygonalComplex,
    w: &MorseWeighting,
) -> (BTreeMap<VertexId, i64>, Vec<bool>) {
    let mut potential: BTreeMap<VertexId, i64> = BTreeMap::new();
    let mut tree = vec![false; c.edges.len()];
    if c.vertices.is_empty() {
        return (potential, tree);
    }
    potential.insert(c.vertices[0].clone(), 0);
    let mut grew = true;
    while grew {
        grew = false;
        for (i, e) in c.edges.iter().enumerate() {
            if tree[i] {
                continue;
            }
            let wt = w.weight(&e.id).unwrap();
            let (pt, ph) = (
                potential.get(&e.tail).copied(),
                potential.get(&e.head).copied(),
            );
            match (pt, ph) {
                (Some(t), None) => {
                    potential.insert(e.head.clone(), t + wt);
                    tree[i] = true;
                    grew = true;
                }
                (None, Some(h)) => {
                    potential.insert(e.tail.clone(), h - wt);
                    tree[i] = true;
                    grew = true;
                }
                _ => {}
            }
        }
    }
    (potential, tree)
}

fn loop_weight(
    c: &PolygonalComplex,
    w: &MorseWeighting,
    potential: &BTreeMap<VertexId, i64>,
    e: &crate::complex::polygonal::Edge,
) -> i64 {
    let _ = c;
    w.weight(&e.id).unwrap() + potential[&e.tail] - potential[&e.head]
}

/// What the link analysis could certify about one link.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkAnalysis {
    pub vertex_count: usize,
    pub connected: bool,
    pub simply_connected: Trilean,
    pub homology: HomologyProfile,
}

impl LinkAnalysis {
    pub fn analyze(base: &SimplicialComplex) -> LinkAnalysis {
        LinkAnalysis {
            vertex_count: base.vertex_count(),
            connected: base.is_connected(),
            simply_connected: base.simply_connected(),
            homology: homology(base),
        }
    }

    /// Largest m such that "the link is (m-1)-connected" is certified:
    /// nonempty gives 0, connected 1, simply connected 2, and each further
    /// vanishing reduced homology group one more.
    fn certified_level(&self) -> Option<usize> {
        if self.vertex_count == 0 {
            return None;
        }
        if !self.connected {
            return Some(0);
        }
        if self.simply_connected != Trilean::Yes {
            return Some(1);
        }
        let mut level = 2;
        while self.homology.group(level).is_zero() && level <= self.homology.reduced.len() {
            level += 1;
        }
        Some(level)
    }
}

/// The finiteness conclusion drawn from the pair of links.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FinitenessConclusion {
    /// Type F_m but not F_{m+1}, contingent on the Bestvina-Brady
    /// finiteness criterion for Morse kernels.
    ExactlyF {
        m: usize,
    },
    /// Type F_m at least; nothing beyond is certified.
    AtLeastF {
        m: usize,
    },
    Inconclusive,
}

/// Finiteness report for the kernel of the induced map to Z.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinitenessReport {
    pub ascending: LinkAnalysis,
    pub descending: LinkAnalysis,
    pub conclusion: FinitenessConclusion,
    pub statement: String,
}

/// Applies the rule table: both links (m-1)-connected certifies F_m; if both
/// additionally have nonzero reduced homology in dimension m, the kernel is
/// of type F_m but not F_{m+1} (contingent on the cited finiteness
/// criterion). Undecided simple connectivity downgrades the claim to the
/// homological lower bound.
pub fn finiteness_report(asc: &LinkComplex, desc: &LinkComplex) -> FinitenessReport {
    let ascending = LinkAnalysis::analyze(asc.base());
    let descending = LinkAnalysis::analyze(desc.base());
    let conclusion = match (ascending.certified_level(), descending.certified_level()) {
        (Some(la), Some(ld)) => {
            let m = la.min(ld);
            let asc_h = !ascending.homology.group(m).is_zero();
            let desc_h = !descending.homology.group(m).is_zero();
            if asc_h && desc_h {
                FinitenessConclusion::ExactlyF { m }
            } else {
                FinitenessConclusion::AtLeastF { m }
            }
        }
        _ => FinitenessConclusion::Inconclusive,
    };
    let statement = match &conclusion {
        FinitenessConclusion::ExactlyF { m } => format!(
            "kernel is of type F_{m} but not of type F_{} (links verified ({})-connected with \
             nonzero reduced H_{m}; contingent on the Bestvina-Brady finiteness criterion)",
            m + 1,
            *m as i64 - 1,
        ),
        FinitenessConclusion::AtLeastF { m } => format!(
            "kernel is of type F_{m} at least (links verified ({})-connected); nothing beyond \
             is certified mechanically",
            *m as i64 - 1,
        ),
        FinitenessConclusion::Inconclusive => {
            "no finiteness conclusion: a link is empty".to_string()
        }
    };
    FinitenessReport {
        ascending,
        descending,
        conclusion,
        statement,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::polygonal::{Dir, Edge, Face};

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

    fn square_on_two_loops(word: &[(&str, Dir)]) -> PolygonalComplex {
        let mut c = wedge();
        c.faces.push(Face {
            id: "f".into(),
            boundary: word
                .iter()
                .map(|(e, d)| SignedEdge((*e).into(), *d))
                .collect(),
        });
        c
    }

    #[test]
    fn unit_weighting_on_wedge_is_valid() {
        let c = wedge();
        let w = MorseWeighting::unit(&c);
        assert!(validate_morse(&c, &w).is_empty());
    }

    #[test]
    fn zero_weight_is_rejected() {
        let c = wedge();
        let mut w = MorseWeighting::unit(&c);
        w.weights.insert("a".into(), 0);
        let v = validate_morse(&c, &w);
        assert!(v.iter().any(|x| matches!(x, MorseViolation::ZeroWeight(_))));
    }

    #[test]
    fn alternating_square_has_two_sign_change_pairs() {
        // word a b^-1 a b^-1 gives signed weights (+1,-1,+1,-1)
        let c = square_on_two_loops(&[
            ("a", Dir::Fwd),
            ("b", Dir::Rev),
            ("a", Dir::Fwd),
            ("b", Dir::Rev),
        ]);
        let w = MorseWeighting::unit(&c);
        let v = validate_morse(&c, &w);
        assert!(v.iter().any(|x| matches!(
            x,
            MorseViolation::NotUnimodal {
                max_corners: 2,
                min_corners: 2,
                ..
            }
        )));
        // the sums still close up
        assert!(!v
            .iter()
            .any(|x| matches!(x, MorseViolation::NonzeroFaceSum { .. })));
    }

    #[test]
    fn wedge_ascending_link_is_two_tail_ends() {
        let c = wedge();
        let w = MorseWeighting::unit(&c);
        let asc = ascending_link(&c, &w, &"v".into()).unwrap();
        assert_eq!(asc.labels(), &["a-".to_string(), "b-".into()]);
        assert!(asc.corner_edges().is_empty());
        let desc = descending_link(&c, &w, &"v".into()).unwrap();
        assert_eq!(desc.labels(), &["a+".to_string(), "b+".into()]);
    }

    #[test]
    fn negating_weights_swaps_links() {
        let c = wedge();
        let w = MorseWeighting::unit(&c);
        let neg = w.negated();
        let asc = ascending_link(&c, &w, &"v".into()).unwrap();
        let desc_neg = descending_link(&c, &neg, &"v".into()).unwrap();
        // same underlying links; only the polarity tags flip
        assert_eq!(asc.vertices(), desc_neg.vertices());
        assert_eq!(asc.base(), desc_neg.base());
        assert_eq!(asc.corner_edges(), desc_neg.corner_edges());
        let desc = descending_link(&c, &w, &"v".into()).unwrap();
        let asc_neg = ascending_link(&c, &neg, &"v".into()).unwrap();
        assert_eq!(desc.vertices(), asc_neg.vertices());
        assert_eq!(desc.base(), asc_neg.base());
    }

    #[test]
    fn ends_partition_between_links() {
        let c = wedge();
        let w = MorseWeighting::unit(&c);
        let full = full_link(&c, &w, &"v".into()).unwrap();
        let asc = ascending_link(&c, &w, &"v".into()).unwrap();
        let desc = descending_link(&c, &w, &"v".into()).unwrap();
        assert_eq!(
            asc.vertex_count() + desc.vertex_count(),
            full.vertex_count()
        );
    }

    #[test]
    fn image_index_from_loop_weights() {
        let c = wedge();
        let w = MorseWeighting::unit(&c);
        assert_eq!(morse_image_index(&c, &w).unwrap(), 1);

        let mut w2 = MorseWeighting::unit(&c);
        w2.weights.insert("a".into(), 2);
        w2.weights.insert("b".into(), 4);
        assert_eq!(morse_image_index(&c, &w2).unwrap(), 2);
    }

    #[test]
    fn disconnected_complex_has_no_index() {
        let c = PolygonalComplex {
            vertices: vec!["v".into(), "w".into()],
            edges: vec![Edge {
                id: "a".into(),
                tail: "v".into(),
                head: "v".into(),
            }],
            faces: vec![],
        };
        assert!(matches!(
            morse_image_index(&c, &MorseWeighting::unit(&c)),
            Err(MorseError::Disconnected)
        ));
    }

    #[test]
    fn spanning_tree_loops_see_potentials() {
        // two vertices joined by weight-1 edge, plus a weight-3 edge back:
        // the loop has weight 3 - 1 = 2
        let c = PolygonalComplex {
            vertices: vec!["p".into(), "q".into()],
            edges: vec![
                Edge {
                    id: "t".into(),
                    tail: "p".into(),
                    head: "q".into(),
                },
                Edge {
                    id: "u".into(),
                    tail: "p".into(),
                    head: "q".into(),
                },
            ],
            faces: vec![],
        };
        let mut weights = BTreeMap::new();
        weights.insert("t".into(), 1i64);
        weights.insert("u".into(), 3i64);
        let w = MorseWeighting::new(weights);
        assert_eq!(morse_image_index(&c, &w).unwrap(), 2);
    }

    #[test]
    fn finiteness_of_two_zero_spheres() {
        // both links two points: kernel F_0 but not F_1
        let c = wedge();
        let w = MorseWeighting::unit(&c);
        let asc = ascending_link(&c, &w, &"v".into()).unwrap();
        let desc = descending_link(&c, &w, &"v".into()).unwrap();
        let report = finiteness_report(&asc, &desc);
        assert_eq!(report.conclusion, FinitenessConclusion::ExactlyF { m: 0 });
    }

    #[test]
    fn finiteness_report_is_symmetric() {
        let c = wedge();
        let w = MorseWeighting::unit(&c);
        let asc = ascending_link(&c, &w, &"v".into()).unwrap();
        let desc = descending_link(&c, &w, &"v".into()).unwrap();
        let r1 = finiteness_report(&asc, &desc);
        let r2 = finiteness_report(&desc, &asc);
        assert_eq!(r1.conclusion, r2.conclusion);
    }
}
