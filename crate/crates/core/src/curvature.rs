//! Curvature certification through link conditions.
//!
//! For metrized polygonal 2-complexes the criterion is the weighted girth of
//! each vertex link: every embedded cycle must have total corner angle at
//! least 2π. Two metric families are supported: unit Euclidean squares
//! (right angles, 4-gons) and regular right-angled hyperbolic n-gons with
//! n >= 5. Formal products are certified by the product rule.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use num::rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::link::{vertex_link, LinkComplex};
use crate::complex::polygonal::{ComplexError, FaceId, PolygonalComplex, ProductComplex, VertexId};
use crate::complex::simplicial::SimplicialComplex;

/// Angles are rational multiples of pi; `1/2` is a right angle, the girth
/// threshold is `2` (meaning 2π).
pub type Angle = Ratio<i64>;

pub fn angle_to_string(a: &Angle) -> String {
    if *a.denom() == 1 {
        a.numer().to_string()
    } else {
        format!("{}/{}", a.numer(), a.denom())
    }
}

pub fn angle_from_string(s: &str) -> Option<Angle> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().ok()?;
            let d: i64 = d.trim().parse().ok()?;
            if d == 0 {
                None
            } else {
                Some(Ratio::new(n, d))
            }
        }
        None => {
            let n: i64 = s.trim().parse().ok()?;
            Some(Ratio::from_integer(n))
        }
    }
}

mod angle_map_serde {
    use super::*;
    use serde::de::Error as DeError;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<FaceId, Vec<Angle>>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let view: BTreeMap<&FaceId, Vec<String>> = m
            .iter()
            .map(|(k, v)| (k, v.iter().map(angle_to_string).collect()))
            .collect();
        serde::Serialize::serialize(&view, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<FaceId, Vec<Angle>>, D::Error> {
        let raw: BTreeMap<FaceId, Vec<String>> = serde::Deserialize::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| {
                let angles: Option<Vec<Angle>> = v.iter().map(|x| angle_from_string(x)).collect();
                angles
                    .map(|a| (k, a))
                    .ok_or_else(|| D::Error::custom("bad rational angle"))
            })
            .collect()
    }
}

/// Corner angles per face, as rational multiples of pi, indexed by corner.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CornerAngleAssignment {
    #[serde(with = "angle_map_serde")]
    pub angles: BTreeMap<FaceId, Vec<Angle>>,
}

impl CornerAngleAssignment {
    /// Right angle (π/2) at every corner of every face.
    pub fn right_angled(c: &PolygonalComplex) -> Self {
        let angles = c
            .faces
            .iter()
            .map(|f| (f.id.clone(), vec![Ratio::new(1, 2); f.boundary.len()]))
            .collect();
        CornerAngleAssignment { angles }
    }

    pub fn angle(&self, face: &FaceId, corner: usize) -> Option<Angle> {
        self.angles.get(face).and_then(|v| v.get(corner)).copied()
    }
}

#[derive(Debug, Clone, Error)]
pub enum CurvatureError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("no angle assigned to corner {corner} of face {face}")]
    MissingAngle { face: FaceId, corner: usize },
    #[error("corner angle of face {face} out of range (need 0 < angle < 1, in units of pi)")]
    AngleOutOfRange { face: FaceId },
    #[error("link is not 1-dimensional (product links have no corner metric)")]
    LinkNotOneDimensional,
    #[error("unsupported face geometry for {face}: {reason}")]
    UnsupportedGeometry { face: FaceId, reason: String },
    #[error("expected {expected} factor certificates, got {got}")]
    ArityMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "NPC")]
    Npc,
    #[serde(rename = "CAT(-1)")]
    CatMinusOne,
    #[serde(rename = "fail")]
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurvatureRule {
    #[serde(rename = "girth-2pi")]
    Girth2pi,
    Flag,
    ProductOfNpc,
}

/// A short link cycle violating the 2π bound; replayable evidence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleWitness {
    pub vertex: VertexId,
    /// Link vertex labels along the cycle (closed: last joins back to first).
    pub cycle: Vec<String>,
    /// Corner provenance of each traversed link edge.
    pub corners: Vec<crate::complex::link::CornerRef>,
    pub total_angle: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurvatureCertificate {
    pub verdict: Verdict,
    pub rule: CurvatureRule,
    /// Minimum cycle angle over all vertex links, serialized as a rational
    /// multiple of π ("2" means 2π); absent when every link is a forest.
    pub min_cycle_angle: Option<String>,
    pub witness: Option<CycleWitness>,
}

/// Minimum total angle over embedded cycles of a 1-dimensional link
/// multigraph; `None` means no cycles (forest).
pub fn min_link_cycle_angle(
    link: &LinkComplex,
    angles: &CornerAngleAssignment,
) -> Result<Option<Angle>, CurvatureError> {
    if link.factor_count() != 1 {
        return Err(CurvatureError::LinkNotOneDimensional);
    }
    let weights: Vec<Angle> = link
        .corner_edges()
        .iter()
        .map(|e| {
            angles
                .angle(&e.corner.face, e.corner.corner)
                .ok_or_else(|| CurvatureError::MissingAngle {
                    face: e.corner.face.clone(),
                    corner: e.corner.corner,
                })
        })
        .collect::<Result<_, _>>()?;
    Ok(min_cycle(link.vertex_count(), link.corner_edges(), &weights).map(|(a, _)| a))
}

/// Same search, also returning the realizing cycle as (edge indices).
fn min_cycle(
    n: usize,
    edges: &[crate::complex::link::LinkEdge],
    weights: &[Angle],
) -> Option<(Angle, Vec<usize>)> {
    let mut best: Option<(Angle, Vec<usize>)> = None;
    let mut consider = |cand: Option<(Angle, Vec<usize>)>| {
        if let Some((a, path)) = cand {
            if best.as_ref().is_none_or(|(b, _)| a < *b) {
                best = Some((a, path));
            }
        }
    };
    for (i, e) in edges.iter().enumerate() {
        if e.a == e.b {
            // degenerate corner: a loop is a cycle of length 1
            consider(Some((weights[i], vec![i])));
            continue;
        }
        // shortest path from e.a to e.b avoiding edge i, then close up through i
        if let Some((d, mut path)) = shortest_path(n, edges, weights, e.a, e.b, i) {
            path.push(i);
            consider(Some((d + weights[i], path)));
        }
    }
    best
}

/// Dijkstra with exact rational weights; returns (distance, edge index path).
fn shortest_path(
    n: usize,
    edges: &[crate::complex::link::LinkEdge],
    weights: &[Angle],
    from: usize,
    to: usize,
    skip: usize,
) -> Option<(Angle, Vec<usize>)> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n]; // (neighbor, edge idx)
    for (i, e) in edges.iter().enumerate() {
        if i == skip || e.a == e.b {
            continue;
        }
        adj[e.a].push((e.b, i));
        adj[e.b].push((e.a, i));
    }
    let mut dist: Vec<Option<Angle>> = vec![None; n];
    let mut via: Vec<Option<usize>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    dist[from] = Some(Ratio::from_integer(0));
    heap.push(Reverse((Ratio::from_integer(0), from)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if dist[u] != Some(d) {
            continue;
        }
        if u == to {
            break;
        }
        for &(v, ei) in &adj[u] {
            let nd = d + weights[ei];
            if dist[v].is_none_or(|cur| nd < cur) {
                dist[v] = Some(nd);
                via[v] = Some(ei);
                heap.push(Reverse((nd, v)));
            }
        }
    }
    let d = dist[to]?;
    let mut path = Vec::new();
    let mut u = to;
    while u != from {
        let ei = via[u].unwrap();
        path.push(ei);
        let e = &edges[ei];
        u = if e.a == u { e.b } else { e.a };
    }
    path.reverse();
    Some((d, path))
}

/// Supported metric families for a face with the given angle vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FaceGeometry {
    EuclideanSquare,
    HyperbolicRightAngled,
}

fn classify_face(
    face: &FaceId,
    len: usize,
    angles: &CornerAngleAssignment,
) -> Result<FaceGeometry, CurvatureError> {
    let v = angles
        .angles
        .get(face)
        .ok_or_else(|| CurvatureError::MissingAngle {
            face: face.clone(),
            corner: 0,
        })?;
    if v.len() != len {
        return Err(CurvatureError::MissingAngle {
            face: face.clone(),
            corner: v.len(),
        });
    }
    let half = Ratio::new(1, 2);
    let zero = Ratio::from_integer(0);
    let one = Ratio::from_integer(1);
    if v.iter().any(|a| *a <= zero || *a >= one) {
        return Err(CurvatureError::AngleOutOfRange { face: face.clone() });
    }
    if v.iter().all(|a| *a == half) {
        if len == 4 {
            Ok(FaceGeometry::EuclideanSquare)
        } else if len >= 5 {
            // a regular right-angled hyperbolic n-gon exists for every n >= 5
            Ok(FaceGeometry::HyperbolicRightAngled)
        } else {
            Err(CurvatureError::UnsupportedGeometry {
                face: face.clone(),
                reason: format!("right-angled {len}-gon is not Euclidean or hyperbolic"),
            })
        }
    } else {
        Err(CurvatureError::UnsupportedGeometry {
            face: face.clone(),
            reason: "only right-angled faces are supported".to_string(),
        })
    }
}

/// Certifies a metrized polygonal 2-complex via the girth-2π link condition.
/// The verdict is CAT(-1) when every face is hyperbolic and the condition
/// holds, NPC when all faces fit a nonpositively curved family.
pub fn certify_2complex(
    c: &PolygonalComplex,
    angles: &CornerAngleAssignment,
) -> Result<CurvatureCertificate, CurvatureError> {
    c.require_valid()?;
    let mut all_hyperbolic = !c.faces.is_empty();
    for f in &c.faces {
        match classify_face(&f.id, f.boundary.len(), angles)? {
            FaceGeometry::EuclideanSquare => all_hyperbolic = false,
            FaceGeometry::HyperbolicRightAngled => {}
        }
    }
    let two = Ratio::from_integer(2);
    let mut global_min: Option<(Angle, VertexId, Vec<usize>, LinkComplex)> = None;
    for v in &c.vertices {
        let link = vertex_link(c, v)?;
        let weights: Vec<Angle> = link
            .corner_edges()
            .iter()
            .map(|e| {
                angles
                    .angle(&e.corner.face, e.corner.corner)
                    .ok_or_else(|| CurvatureError::MissingAngle {
                        face: e.corner.face.clone(),
                        corner: e.corner.corner,
                    })
            })
            .collect::<Result<_, _>>()?;
        if let Some((a, path)) = min_cycle(link.vertex_count(), link.corner_edges(), &weights) {
            if global_min.as_ref().is_none_or(|(b, _, _, _)| a < *b) {
                global_min = Some((a, v.clone(), path, link));
            }
        }
    }
    let (verdict, min_angle, witness) = match &global_min {
        None => {
            // no link cycles anywhere: graphs and forests of faces are NPC
            let v = if all_hyperbolic {
                Verdict::CatMinusOne
            } else {
                Verdict::Npc
            };
            (v, None, None)
        }
        Some((a, vertex, path, link)) => {
            if *a >= two {
                let v = if all_hyperbolic {
                    Verdict::CatMinusOne
                } else {
                    Verdict::Npc
                };
                (v, Some(*a), None)
            } else {
                let witness = cycle_witness(vertex, link, path, a);
                (Verdict::Fail, Some(*a), Some(witness))
            }
        }
    };
    Ok(CurvatureCertificate {
        verdict,
        rule: CurvatureRule::Girth2pi,
        min_cycle_angle: min_angle.map(|a| angle_to_string(&a)),
        witness,
    })
}

fn cycle_witness(
    vertex: &VertexId,
    link: &LinkComplex,
    path: &[usize],
    total: &Angle,
) -> CycleWitness {
    let edges = link.corner_edges();
    // walk the edge path to list vertices in order
    let mut cycle_vertices = Vec::new();
    if let Some(&first) = path.first() {
        let e0 = &edges[first];
        // orient the walk starting from the endpoint shared with the last edge
        let start = if path.len() > 1 {
            let last = &edges[*path.last().unwrap()];
            if e0.a == last.a || e0.a == last.b {
                e0.a
            } else {
                e0.b
            }
        } else {
            e0.a
        };
        let mut cur = start;
        cycle_vertices.push(cur);
        for &ei in path {
            let e = &edges[ei];
            cur = if e.a == cur { e.b } else { e.a };
            cycle_vertices.push(cur);
        }
        cycle_vertices.pop(); // closed walk: last equals first
    }
    CycleWitness {
        vertex: vertex.clone(),
        cycle: cycle_vertices
            .iter()
            .map(|&i| link.labels()[i].clone())
            .collect(),
        corners: path.iter().map(|&i| edges[i].corner.clone()).collect(),
        total_angle: angle_to_string(total),
    }
}

/// Re-runs a failure witness: all corners must still exist with their
/// angles, and the total must still be below 2π.
pub fn replay_cycle_witness(
    c: &PolygonalComplex,
    angles: &CornerAngleAssignment,
    witness: &CycleWitness,
) -> bool {
    if !c.validate().is_empty() {
        return false;
    }
    let mut total = Ratio::from_integer(0);
    for corner in &witness.corners {
        match angles.angle(&corner.face, corner.corner) {
            Some(a) => total += a,
            None => return false,
        }
    }
    total < Ratio::from_integer(2) && angle_to_string(&total) == witness.total_angle
}

/// Product rule: every factor nonpositively curved makes the product NPC;
/// a product of two or more nontrivial factors contains flats, so it is
/// never CAT(-1). A single-factor product inherits the factor verdict.
pub fn certify_product(
    p: &ProductComplex,
    factor_certs: &[CurvatureCertificate],
) -> Result<CurvatureCertificate, CurvatureError> {
    if factor_certs.len() != p.factors.len() {
        return Err(CurvatureError::ArityMismatch {
            expected: p.factors.len(),
            got: factor_certs.len(),
        });
    }
    if let Some(bad) = factor_certs.iter().find(|c| c.verdict == Verdict::Fail) {
        return Ok(CurvatureCertificate {
            verdict: Verdict::Fail,
            rule: CurvatureRule::ProductOfNpc,
            min_cycle_angle: bad.min_cycle_angle.clone(),
            witness: bad.witness.clone(),
        });
    }
    if p.factors.len() == 1 {
        return Ok(factor_certs[0].clone());
    }
    let nontrivial = p.factors.iter().filter(|f| !f.edges.is_empty()).count();
    let all_cat_minus_one = factor_certs
        .iter()
        .all(|c| c.verdict == Verdict::CatMinusOne);
    let verdict = if nontrivial <= 1 && all_cat_minus_one {
        Verdict::CatMinusOne
    } else {
        Verdict::Npc
    };
    Ok(CurvatureCertificate {
        verdict,
        rule: CurvatureRule::ProductOfNpc,
        min_cycle_angle: None,
        witness: None,
    })
}

/// Flag report: every clique of the 1-skeleton spans a simplex, or a
/// minimal witness clique that does not.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagReport {
    pub flag: bool,
    pub witness: Option<Vec<String>>,
}

/// Checks the flag (no-empty-simplex) condition, used for cubical links.
/// The witness, when present, is a minimal non-spanning clique.
pub fn is_flag(s: &SimplicialComplex) -> FlagReport {
    let n = s.vertex_count();
    let adjacent: Vec<Vec<usize>> = (0..n)
        .map(|u| (0..n).filter(|&v| s.adjacent(u, v)).collect())
        .collect();
    // grow cliques by size; the first missing one is minimal because all
    // smaller cliques were verified present
    let mut current: Vec<Vec<usize>> = s
        .skeleton_edges()
        .into_iter()
        .map(|(u, v)| vec![u, v])
        .collect();
    let max_size = n.min(24);
    for _size in 3..=max_size {
        let mut next = Vec::new();
        for clique in &current {
            let last = *clique.last().unwrap();
            for &v in &adjacent[last] {
                if v <= last {
                    continue;
                }
                if clique.iter().all(|&u| adjacent[u].contains(&v)) {
                    let mut bigger = clique.clone();
                    bigger.push(v);
                    if !s.has_simplex(&bigger) {
                        return FlagReport {
                            flag: false,
                            witness: Some(bigger.iter().map(|&i| s.label(i).to_string()).collect()),
                        };
                    }
                    next.push(bigger);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        current = next;
    }
    FlagReport {
        flag: true,
        witness: None,
    }
}
