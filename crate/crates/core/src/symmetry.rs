//! Cellular automorphisms and the model-situation certifier.
//!
//! The certifier checks the full hypothesis package for producing
//! infinitely many conjugacy classes of finite-order elements in the Morse
//! kernel: a nonpositively curved complex, a weight-equivariant Morse
//! epimorphism to Z, and a finite-order cellular symmetry fixing a vertex
//! and acting freely on its link. On success it selects a loop of Morse
//! degree one and emits the witness family `n -> t^n σ t^-n` together with
//! the height invariant separating the conjugacy classes.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::link::LinkComplex;
use crate::complex::polygonal::{
    ComplexError, Dir, EdgeId, FaceId, PolygonalComplex, ProductComplex, SignedEdge, VertexId,
};
use crate::curvature::{
    certify_2complex, certify_product, CornerAngleAssignment, CurvatureCertificate, CurvatureError,
    Verdict,
};
use crate::morse::{
    morse_image_index, product_full_link, validate_morse, MorseError, MorseWeighting,
};

/// Image of a face under an automorphism: target face plus how the mapped
/// boundary word sits inside the target boundary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceImage {
    pub target: FaceId,
    pub offset: usize,
    pub reflected: bool,
}

/// A cellular automorphism of a polygonal complex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellularAutomorphism {
    pub vertex_map: BTreeMap<VertexId, VertexId>,
    pub edge_map: BTreeMap<EdgeId, (EdgeId, Dir)>,
    pub face_map: BTreeMap<FaceId, FaceImage>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomorphismViolation {
    #[error("vertex {0} has no image")]
    MissingVertex(VertexId),
    #[error("edge {0} has no image")]
    MissingEdge(EdgeId),
    #[error("face {0} has no image")]
    MissingFace(FaceId),
    #[error("vertex map is not a bijection (image {0} repeated)")]
    VertexNotBijective(VertexId),
    #[error("edge map is not a bijection (image {0} repeated)")]
    EdgeNotBijective(EdgeId),
    #[error("face map is not a bijection (image {0} repeated)")]
    FaceNotBijective(FaceId),
    #[error("image of {0} is not a known vertex")]
    UnknownVertexImage(VertexId),
    #[error("image of {0} is not a known edge")]
    UnknownEdgeImage(EdgeId),
    #[error("image of {0} is not a known face")]
    UnknownFaceImage(FaceId),
    #[error("edge {edge} maps to {image} but endpoint images do not match")]
    IncidenceBroken { edge: EdgeId, image: EdgeId },
    #[error("face {face} boundary does not map onto {target} with the declared rotation")]
    FaceBoundaryBroken { face: FaceId, target: FaceId },
}

#[derive(Debug, Clone, Error)]
pub enum SymmetryError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Morse(#[from] MorseError),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error("invalid automorphism: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidAutomorphism(Vec<AutomorphismViolation>),
    #[error("automorphism does not fix vertex {0}")]
    VertexNotFixed(VertexId),
    #[error("no face of the target complex matches the mapped boundary of {0}")]
    NoMatchingFace(FaceId),
    #[error("expected {expected} {what}, got {got}")]
    ArityMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("order search exceeded {0} iterations")]
    OrderSearchExceeded(u64),
    #[error("no spanning-tree loop of Morse degree 1 exists")]
    NoUnitLoop,
}

fn map_signed_edge(a: &CellularAutomorphism, s: &SignedEdge) -> Option<SignedEdge> {
    let (img, d) = a.edge_map.get(s.edge())?;
    Some(SignedEdge(img.clone(), s.dir().compose(*d)))
}

fn rotate_matches(mapped: &[SignedEdge], target: &[SignedEdge], offset: usize) -> bool {
    let k = target.len();
    mapped
        .iter()
        .enumerate()
        .all(|(i, s)| s == &target[(i + offset) % k])
}

/// Reverse traversal of a boundary word as an edge path.
fn reversed_boundary(boundary: &[SignedEdge]) -> Vec<SignedEdge> {
    boundary.iter().rev().map(|s| s.inverse()).collect()
}

/// Finds some (offset, reflected) placing `mapped` onto `target`.
fn find_rotation(mapped: &[SignedEdge], target: &[SignedEdge]) -> Option<(usize, bool)> {
    if mapped.len() != target.len() {
        return None;
    }
    let k = target.len();
    for offset in 0..k {
        if rotate_matches(mapped, target, offset) {
            return Some((offset, false));
        }
    }
    let rev = reversed_boundary(target);
    for offset in 0..k {
        if rotate_matches(mapped, &rev, offset) {
            return Some((offset, true));
        }
    }
    None
}

impl CellularAutomorphism {
    /// The identity automorphism of a complex.
    pub fn identity(c: &PolygonalComplex) -> Self {
        CellularAutomorphism {
            vertex_map: c.vertices.iter().map(|v| (v.clone(), v.clone())).collect(),
            edge_map: c
                .edges
                .iter()
                .map(|e| (e.id.clone(), (e.id.clone(), Dir::Fwd)))
                .collect(),
            face_map: c
                .faces
                .iter()
                .map(|f| {
                    (
                        f.id.clone(),
                        FaceImage {
                            target: f.id.clone(),
                            offset: 0,
                            reflected: false,
                        },
                    )
                })
                .collect(),
        }
    }

    /// Builds an automorphism from vertex and edge data, inferring the face
    /// map by matching mapped boundary words against target boundaries.
    pub fn from_edge_data(
        c: &PolygonalComplex,
        vertex_map: BTreeMap<VertexId, VertexId>,
        edge_map: BTreeMap<EdgeId, (EdgeId, Dir)>,
    ) -> Result<Self, SymmetryError> {
        let partial = CellularAutomorphism {
            vertex_map,
            edge_map,
            face_map: BTreeMap::new(),
        };
        let mut face_map = BTreeMap::new();
        for f in &c.faces {
            let mapped: Option<Vec<SignedEdge>> = f
                .boundary
                .iter()
                .map(|s| map_signed_edge(&partial, s))
                .collect();
            let mapped = mapped.ok_or_else(|| SymmetryError::NoMatchingFace(f.id.clone()))?;
            let mut found = None;
            for g in &c.faces {
                if let Some((offset, reflected)) = find_rotation(&mapped, &g.boundary) {
                    found = Some(FaceImage {
                        target: g.id.clone(),
                        offset,
                        reflected,
                    });
                    break;
                }
            }
            let image = found.ok_or_else(|| SymmetryError::NoMatchingFace(f.id.clone()))?;
            face_map.insert(f.id.clone(), image);
        }
        Ok(CellularAutomorphism {
            vertex_map: partial.vertex_map,
            edge_map: partial.edge_map,
            face_map,
        })
    }

    pub fn apply_vertex(&self, v: &VertexId) -> Option<&VertexId> {
        self.vertex_map.get(v)
    }

    /// Pointwise identity on every stratum.
    pub fn is_identity(&self) -> bool {
        self.vertex_map.iter().all(|(k, v)| k == v)
            && self
                .edge_map
                .iter()
                .all(|(k, (img, d))| k == img && *d == Dir::Fwd)
            && self.face_map.iter().all(|(k, img)| k == &img.target)
    }

    /// Composition `self ∘ other` (apply `other` first).
    pub fn compose(
        &self,
        c: &PolygonalComplex,
        other: &CellularAutomorphism,
    ) -> Result<CellularAutomorphism, SymmetryError> {
        let mut vertex_map = BTreeMap::new();
        for (v, mid) in &other.vertex_map {
            let img = self
                .vertex_map
                .get(mid)
                .ok_or_else(|| AutomorphismViolation::UnknownVertexImage(mid.clone()))
                .map_err(|e| SymmetryError::InvalidAutomorphism(vec![e]))?;
            vertex_map.insert(v.clone(), img.clone());
        }
        let mut edge_map = BTreeMap::new();
        for (e, (mid, d1)) in &other.edge_map {
            let (img, d2) = self
                .edge_map
                .get(mid)
                .ok_or_else(|| AutomorphismViolation::UnknownEdgeImage(mid.clone()))
                .map_err(|e| SymmetryError::InvalidAutomorphism(vec![e]))?;
            edge_map.insert(e.clone(), (img.clone(), d1.compose(*d2)));
        }
        // recompute the rotation data against the composed target
        let composed = CellularAutomorphism {
            vertex_map,
            edge_map,
            face_map: BTreeMap::new(),
        };
        let mut face_map = BTreeMap::new();
        for f in &c.faces {
            let mid = other
                .face_map
                .get(&f.id)
                .ok_or_else(|| SymmetryError::NoMatchingFace(f.id.clone()))?;
            let fin = self
                .face_map
                .get(&mid.target)
                .ok_or_else(|| SymmetryError::NoMatchingFace(mid.target.clone()))?;
            let target = c
                .face(&fin.target)
                .ok_or_else(|| SymmetryError::NoMatchingFace(fin.target.clone()))?;
            let mapped: Option<Vec<SignedEdge>> = f
                .boundary
                .iter()
                .map(|s| map_signed_edge(&composed, s))
                .collect();
            let mapped = mapped.ok_or_else(|| SymmetryError::NoMatchingFace(f.id.clone()))?;
            let (offset, reflected) = find_rotation(&mapped, &target.boundary)
                .ok_or_else(|| SymmetryError::NoMatchingFace(f.id.clone()))?;
            face_map.insert(
                f.id.clone(),
                FaceImage {
                    target: fin.target.clone(),
                    offset,
                    reflected,
                },
            );
        }
        Ok(CellularAutomorphism {
            vertex_map: composed.vertex_map,
            edge_map: composed.edge_map,
            face_map,
        })
    }
}

/// Structural validation: bijectivity on each stratum, incidence
/// preservation, and face boundaries mapping onto the declared rotations.
pub fn validate_automorphism(
    c: &PolygonalComplex,
    a: &CellularAutomorphism,
) -> Vec<AutomorphismViolation> {
    let mut out = Vec::new();
    for v in &c.vertices {
        match a.vertex_map.get(v) {
            None => out.push(AutomorphismViolation::MissingVertex(v.clone())),
            Some(img) if !c.has_vertex(img) => {
                out.push(AutomorphismViolation::UnknownVertexImage(v.clone()))
            }
            _ => {}
        }
    }
    let mut seen: BTreeSet<&VertexId> = BTreeSet::new();
    for img in c.vertices.iter().filter_map(|v| a.vertex_map.get(v)) {
        if !seen.insert(img) {
            out.push(AutomorphismViolation::VertexNotBijective(img.clone()));
        }
    }
    for e in &c.edges {
        match a.edge_map.get(&e.id) {
            None => out.push(AutomorphismViolation::MissingEdge(e.id.clone())),
            Some((img_id, d)) => match c.edge(img_id) {
                None => out.push(AutomorphismViolation::UnknownEdgeImage(e.id.clone())),
                Some(img) => {
                    let (vt, vh) = match a.vertex_map.get(&e.tail).zip(a.vertex_map.get(&e.head)) {
                        Some(pair) => pair,
                        None => continue, // already reported
                    };
                    let ok = match d {
                        Dir::Fwd => &img.tail == vt && &img.head == vh,
                        Dir::Rev => &img.tail == vh && &img.head == vt,
                    };
                    if !ok {
                        out.push(AutomorphismViolation::IncidenceBroken {
                            edge: e.id.clone(),
                            image: img_id.clone(),
                        });
                    }
                }
            },
        }
    }
    let mut seen_edges: BTreeSet<&EdgeId> = BTreeSet::new();
    for (img, _) in c.edges.iter().filter_map(|e| a.edge_map.get(&e.id)) {
        if !seen_edges.insert(img) {
            out.push(AutomorphismViolation::EdgeNotBijective(img.clone()));
        }
    }
    for f in &c.faces {
        match a.face_map.get(&f.id) {
            None => out.push(AutomorphismViolation::MissingFace(f.id.clone())),
            Some(fi) => match c.face(&fi.target) {
                None => out.push(AutomorphismViolation::UnknownFaceImage(f.id.clone())),
                Some(target) => {
                    let mapped: Option<Vec<SignedEdge>> =
                        f.boundary.iter().map(|s| map_signed_edge(a, s)).collect();
                    let ok = mapped.is_some_and(|m| {
                        let word = if fi.reflected {
                            reversed_boundary(&target.boundary)
                        } else {
                            target.boundary.clone()
                        };
                        m.len() == word.len() && rotate_matches(&m, &word, fi.offset)
                    });
                    if !ok {
                        out.push(AutomorphismViolation::FaceBoundaryBroken {
                            face: f.id.clone(),
                            target: fi.target.clone(),
                        });
                    }
                }
            },
        }
    }
    let mut seen_faces: BTreeSet<&FaceId> = BTreeSet::new();
    for fi in c.faces.iter().filter_map(|f| a.face_map.get(&f.id)) {
        if !seen_faces.insert(&fi.target) {
            out.push(AutomorphismViolation::FaceNotBijective(fi.target.clone()));
        }
    }
    out
}

pub fn require_valid_automorphism(
    c: &PolygonalComplex,
    a: &CellularAutomorphism,
) -> Result<(), SymmetryError> {
    let v = validate_automorphism(c, a);
    if v.is_empty() {
        Ok(())
    } else {
        Err(SymmetryError::InvalidAutomorphism(v))
    }
}

const ORDER_CAP: u64 = 100_000;

/// Least d >= 1 with the d-th power pointwise identity on all strata.
pub fn order_of(c: &PolygonalComplex, a: &CellularAutomorphism) -> Result<u64, SymmetryError> {
    require_valid_automorphism(c, a)?;
    let mut power = a.clone();
    let mut d = 1u64;
    while !power.is_identity() {
        power = a.compose(c, &power)?;
        d += 1;
        if d > ORDER_CAP {
            return Err(SymmetryError::OrderSearchExceeded(ORDER_CAP));
        }
    }
    Ok(d)
}

/// Weight equivariance: the weighting is preserved by the edge map, with the
/// sign flipped exactly when the orientation is reversed.
pub fn is_weight_equivariant(a: &CellularAutomorphism, w: &MorseWeighting) -> bool {
    a.edge_map
        .iter()
        .all(|(e, (img, d))| match (w.weight(e), w.weight(img)) {
            (Some(we), Some(wi)) => match d {
                Dir::Fwd => wi == we,
                Dir::Rev => wi == -we,
            },
            _ => false,
        })
}

/// Permutation induced on the link vertices by factor-wise automorphisms.
/// Each automorphism must fix the base vertex of its factor.
pub fn induced_link_permutation(
    link: &LinkComplex,
    autos: &[&CellularAutomorphism],
) -> Result<Vec<usize>, SymmetryError> {
    if autos.len() != link.factor_count() {
        return Err(SymmetryError::ArityMismatch {
            what: "factor automorphisms",
            expected: link.factor_count(),
            got: autos.len(),
        });
    }
    let mut perm = Vec::with_capacity(link.vertex_count());
    for lv in link.vertices() {
        let a = autos[lv.factor];
        let (img, d) = a.edge_map.get(&lv.end.edge).ok_or_else(|| {
            SymmetryError::InvalidAutomorphism(vec![AutomorphismViolation::MissingEdge(
                lv.end.edge.clone(),
            )])
        })?;
        let kind = match d {
            Dir::Fwd => lv.end.kind,
            Dir::Rev => lv.end.kind.flip(),
        };
        let end = crate::complex::link::EdgeEnd {
            edge: img.clone(),
            kind,
        };
        let idx = link
            .vertex_index(lv.factor, &end)
            .ok_or_else(|| SymmetryError::VertexNotFixed(VertexId(format!("{end}"))))?;
        perm.push(idx);
    }
    Ok(perm)
}

/// Result of testing whether a permutation acts freely on the simplices of
/// a link (no simplex setwise invariant).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeActionReport {
    pub free: bool,
    /// An invariant simplex, by labels, when not free.
    pub witness: Option<Vec<String>>,
    /// Orbit size histogram over all simplices: size -> count.
    pub orbit_sizes: BTreeMap<usize, usize>,
    /// The same freeness test for each nontrivial power (informational).
    pub power_free: BTreeMap<u64, bool>,
}

fn apply_perm_to_simplex(perm: &[usize], s: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = s.iter().map(|&v| perm[v]).collect();
    out.sort_unstable();
    out
}

fn compose_perm(p: &[usize], q: &[usize]) -> Vec<usize> {
    q.iter().map(|&i| p[i]).collect()
}

/// Tests freeness of the induced simplicial action and computes orbit data.
pub fn free_action_report(link: &LinkComplex, perm: &[usize], order: u64) -> FreeActionReport {
    let base = link.base();
    let simplices: Vec<Vec<usize>> = base.closure().into_iter().collect();
    let mut witness = None;
    for s in &simplices {
        if apply_perm_to_simplex(perm, s) == *s {
            witness = Some(s.iter().map(|&v| base.label(v).to_string()).collect());
            break;
        }
    }
    // orbit sizes under iteration
    let index: BTreeMap<&Vec<usize>, usize> =
        simplices.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut seen = vec![false; simplices.len()];
    let mut orbit_sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for start in 0..simplices.len() {
        if seen[start] {
            continue;
        }
        let mut size = 0usize;
        let mut cur = start;
        loop {
            seen[cur] = true;
            size += 1;
            let img = apply_perm_to_simplex(perm, &simplices[cur]);
            cur = index[&img];
            if cur == start {
                break;
            }
        }
        *orbit_sizes.entry(size).or_insert(0) += 1;
    }
    let mut power_free = BTreeMap::new();
    let mut p = perm.to_vec();
    for k in 2..order {
        p = compose_perm(perm, &p);
        let free_k = simplices.iter().all(|s| apply_perm_to_simplex(&p, s) != *s);
        power_free.insert(k, free_k);
    }
    FreeActionReport {
        free: witness.is_none(),
        witness,
        orbit_sizes,
        power_free,
    }
}

/// Does the symmetry act without a setwise-invariant simplex on the link of
/// the fixed vertex?
pub fn acts_freely_on_link(
    c: &PolygonalComplex,
    a: &CellularAutomorphism,
    v: &VertexId,
) -> Result<FreeActionReport, SymmetryError> {
    require_valid_automorphism(c, a)?;
    if a.apply_vertex(v) != Some(v) {
        return Err(SymmetryError::VertexNotFixed(v.clone()));
    }
    let link = crate::complex::link::vertex_link(c, v)?;
    let perm = induced_link_permutation(&link, &[a])?;
    let order = order_of(c, a)?;
    Ok(free_action_report(&link, &perm, order))
}

/// All the data the model-situation certifier consumes. A plain complex is
/// a single-factor instance; a product is several factors with factor-wise
/// (diagonal, when equal) symmetry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelInput {
    pub factors: Vec<PolygonalComplex>,
    pub weightings: Vec<MorseWeighting>,
    pub angles: Vec<CornerAngleAssignment>,
    pub automorphisms: Vec<CellularAutomorphism>,
    pub base_vertices: Vec<VertexId>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl ModelInput {
    pub fn product(&self) -> ProductComplex {
        ProductComplex::new(self.factors.clone())
    }

    pub fn check_arities(&self) -> Result<(), SymmetryError> {
        let n = self.factors.len();
        let counts: [(&'static str, usize); 4] = [
            ("weightings", self.weightings.len()),
            ("angle assignments", self.angles.len()),
            ("automorphisms", self.automorphisms.len()),
            ("base vertices", self.base_vertices.len()),
        ];
        for (what, got) in counts {
            if got != n {
                return Err(SymmetryError::ArityMismatch {
                    what,
                    expected: n,
                    got,
                });
            }
        }
        Ok(())
    }
}

/// Names of the individual hypotheses of the certifier.
pub const CHECK_NAMES: [&str; 7] = [
    "npc",
    "morse_valid",
    "epi_onto_Z",
    "equivariant",
    "fixes_v",
    "free_on_link",
    "finite_order",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelChecks {
    pub npc: bool,
    pub morse_valid: bool,
    #[serde(rename = "epi_onto_Z")]
    pub epi_onto_z: bool,
    pub equivariant: bool,
    pub fixes_v: bool,
    pub free_on_link: bool,
    pub finite_order: bool,
}

impl ModelChecks {
    pub fn all(&self) -> bool {
        self.npc
            && self.morse_valid
            && self.epi_onto_z
            && self.equivariant
            && self.fixes_v
            && self.free_on_link
            && self.finite_order
    }

    pub fn failed(&self) -> Vec<String> {
        [
            ("npc", self.npc),
            ("morse_valid", self.morse_valid),
            ("epi_onto_Z", self.epi_onto_z),
            ("equivariant", self.equivariant),
            ("fixes_v", self.fixes_v),
            ("free_on_link", self.free_on_link),
            ("finite_order", self.finite_order),
        ]
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(name, _)| name.to_string())
        .collect()
    }
}

/// The chosen loop with Morse degree one, as a signed edge word in one factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChosenLoop {
    pub factor: usize,
    pub word: Vec<SignedEdge>,
}

/// The witness family `n -> t^n σ t^-n` and its separating heights.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessFamily {
    pub description: String,
    pub order: u64,
    pub t: ChosenLoop,
    pub height_invariant: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSituationCertificate {
    pub checks: ModelChecks,
    pub failed: Vec<String>,
    pub order: Option<u64>,
    pub chosen_t: Option<ChosenLoop>,
    pub conclusion: Option<String>,
    pub witness_family: Option<WitnessFamily>,
    pub curvature: CurvatureCertificate,
    pub free_action: Option<FreeActionReport>,
    pub morse_diagnostics: Vec<String>,
}

/// Runs all hypotheses of the model situation and, on success, emits the
/// conclusion with the witness family. A failed check withholds the
/// conclusion and is named in `failed`.
pub fn certify_model_situation(
    input: &ModelInput,
) -> Result<ModelSituationCertificate, SymmetryError> {
    input.check_arities()?;
    let product = input.product();
    product.require_valid()?;
    for (c, a) in input.factors.iter().zip(&input.automorphisms) {
        require_valid_automorphism(c, a)?;
    }

    // curvature: per-factor girth certificates, product rule on top
    let factor_certs: Vec<CurvatureCertificate> = input
        .factors
        .iter()
        .zip(&input.angles)
        .map(|(c, a)| certify_2complex(c, a))
        .collect::<Result<_, _>>()?;
    let curvature = certify_product(&product, &factor_certs)?;
    let npc = curvature.verdict != Verdict::Fail;

    // Morse validity
    let mut morse_diagnostics = Vec::new();
    for (c, w) in input.factors.iter().zip(&input.weightings) {
        for v in validate_morse(c, w) {
            morse_diagnostics.push(v.to_string());
        }
    }
    let morse_valid = morse_diagnostics.is_empty();

    // epimorphism onto Z: gcd of factor indices must be 1
    let mut epi_gcd: u64 = 0;
    let mut epi_defined = true;
    for (c, w) in input.factors.iter().zip(&input.weightings) {
        match morse_image_index(c, w) {
            Ok(g) => epi_gcd = num::integer::gcd(epi_gcd, g),
            Err(MorseError::Disconnected) => return Err(MorseError::Disconnected.into()),
            Err(_) => {
                epi_defined = false;
            }
        }
    }
    let epi_onto_z = epi_defined && epi_gcd == 1;

    let equivariant = input
        .automorphisms
        .iter()
        .zip(&input.weightings)
        .all(|(a, w)| is_weight_equivariant(a, w));

    let fixes_v = input
        .automorphisms
        .iter()
        .zip(&input.base_vertices)
        .all(|(a, v)| a.apply_vertex(v) == Some(v));

    // finite order of the factor-wise symmetry: lcm of factor orders
    let mut order: Option<u64> = Some(1);
    for (c, a) in input.factors.iter().zip(&input.automorphisms) {
        match order_of(c, a) {
            Ok(d) => order = order.map(|o| num::integer::lcm(o, d)),
            Err(SymmetryError::OrderSearchExceeded(_)) => order = None,
            Err(e) => return Err(e),
        }
    }
    let finite_order = order.is_some();

    // free action on the full link of the base vertex tuple
    let (free_on_link, free_action) = if fixes_v && morse_valid {
        let link = product_full_link(&product, &input.weightings, &input.base_vertices)?;
        let autos: Vec<&CellularAutomorphism> = input.automorphisms.iter().collect();
        let perm = induced_link_permutation(&link, &autos)?;
        let report = free_action_report(&link, &perm, order.unwrap_or(1));
        (report.free, Some(report))
    } else if fixes_v {
        // weighting is broken, but the unweighted link still decides freeness
        let link = crate::complex::link::product_link(&product, &input.base_vertices)?;
        let autos: Vec<&CellularAutomorphism> = input.automorphisms.iter().collect();
        let perm = induced_link_permutation(&link, &autos)?;
        let report = free_action_report(&link, &perm, order.unwrap_or(1));
        (report.free, Some(report))
    } else {
        (false, None)
    };

    let checks = ModelChecks {
        npc,
        morse_valid,
        epi_onto_z,
        equivariant,
        fixes_v,
        free_on_link,
        finite_order,
    };
    let failed = checks.failed();

    if !checks.all() {
        return Ok(ModelSituationCertificate {
            checks,
            failed,
            order,
            chosen_t: None,
            conclusion: None,
            witness_family: None,
            curvature,
            free_action,
            morse_diagnostics,
        });
    }

    let d = order.unwrap();
    let chosen_t = choose_unit_loop(input)?;
    let conclusion = format!(
        "K ⋊ ⟨σ⟩ contains infinitely many conjugacy classes of elements of order {d}: the \
         elements t^n σ t^-n lie in K ⋊ ⟨σ⟩ and are pairwise non-conjugate there, since the \
         unique fixed vertex of the lift of t^n σ t^-n sits at height f~(x0)+n and kernel \
         elements act height-preservingly"
    );
    let witness_family = WitnessFamily {
        description: "n -> t^n σ t^-n".to_string(),
        order: d,
        t: chosen_t.clone(),
        height_invariant: "f~(x0)+n".to_string(),
    };
    Ok(ModelSituationCertificate {
        checks,
        failed,
        order: Some(d),
        chosen_t: Some(chosen_t),
        conclusion: Some(conclusion),
        witness_family: Some(witness_family),
        curvature,
        free_action,
        morse_diagnostics,
    })
}

/// Deterministic choice of a loop t with Morse degree exactly 1: the
/// shortest spanning-tree loop of weight ±1 (reversed when -1), ties broken
/// by factor index then lexicographic edge id.
fn choose_unit_loop(input: &ModelInput) -> Result<ChosenLoop, SymmetryError> {
    let mut best: Option<(usize, usize, EdgeId, ChosenLoop)> = None;
    for (f, (c, w)) in input.factors.iter().zip(&input.weightings).enumerate() {
        let base = &input.base_vertices[f];
        for cand in spanning_tree_loops(c, w, base) {
            let (len, edge_id, word, weight) = cand;
            if weight.abs() != 1 {
                continue;
            }
            let word = if weight == 1 {
                word
            } else {
                word.iter().rev().map(|s| s.inverse()).collect()
            };
            let key = (len, f, edge_id.clone());
            if best
                .as_ref()
                .is_none_or(|(bl, bf, be, _)| key < (*bl, *bf, be.clone()))
            {
                best = Some((len, f, edge_id, ChosenLoop { factor: f, word }));
            }
        }
    }
    best.map(|(_, _, _, l)| l).ok_or(SymmetryError::NoUnitLoop)
}

/// All spanning-tree loops based at `base`: tree path out, the non-tree
/// edge, tree path back. Returns (length, defining edge, word, weight).
fn spanning_tree_loops(
    c: &PolygonalComplex,
    w: &MorseWeighting,
    base: &VertexId,
) -> Vec<(usize, EdgeId, Vec<SignedEdge>, i64)> {
    // grow a spanning tree from `base`, remembering the path to each vertex
    let mut paths: BTreeMap<VertexId, Vec<SignedEdge>> = BTreeMap::new();
    let mut heights: BTreeMap<VertexId, i64> = BTreeMap::new();
    paths.insert(base.clone(), Vec::new());
    heights.insert(base.clone(), 0);
    let mut tree = vec![false; c.edges.len()];
    let mut grew = true;
    while grew {
        grew = false;
        for (i, e) in c.edges.iter().enumerate() {
            if tree[i] {
                continue;
            }
            let wt = match w.weight(&e.id) {
                Some(x) => x,
                None => continue,
            };
            if paths.contains_key(&e.tail) && !paths.contains_key(&e.head) {
                let mut p = paths[&e.tail].clone();
                p.push(SignedEdge(e.id.clone(), Dir::Fwd));
                let h = heights[&e.tail] + wt;
                paths.insert(e.head.clone(), p);
                heights.insert(e.head.clone(), h);
                tree[i] = true;
                grew = true;
            } else if paths.contains_key(&e.head) && !paths.contains_key(&e.tail) {
                let mut p = paths[&e.head].clone();
                p.push(SignedEdge(e.id.clone(), Dir::Rev));
                let h = heights[&e.head] - wt;
                paths.insert(e.tail.clone(), p);
                heights.insert(e.tail.clone(), h);
                tree[i] = true;
                grew = true;
            }
        }
    }
    let mut out = Vec::new();
    for (i, e) in c.edges.iter().enumerate() {
        if tree[i] {
            continue;
        }
        let (Some(pt), Some(ph)) = (paths.get(&e.tail), paths.get(&e.head)) else {
            continue;
        };
        let wt = match w.weight(&e.id) {
            Some(x) => x,
            None => continue,
        };
        let weight = wt + heights[&e.tail] - heights[&e.head];
        let mut word = pt.clone();
        word.push(SignedEdge(e.id.clone(), Dir::Fwd));
        word.extend(ph.iter().rev().map(|s| s.inverse()));
        out.push((word.len(), e.id.clone(), word, weight));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wedge() -> PolygonalComplex {
        PolygonalComplex {
            vertices: vec!["v".into()],
            edges: vec![
                crate::complex::polygonal::Edge {
                    id: "a".into(),
                    tail: "v".into(),
                    head: "v".into(),
                },
                crate::complex::polygonal::Edge {
                    id: "b".into(),
                    tail: "v".into(),
                    head: "v".into(),
                },
            ],
            faces: vec![],
        }
    }

    fn swap() -> CellularAutomorphism {
        let mut vertex_map = BTreeMap::new();
        vertex_map.insert("v".into(), "v".into());
        let mut edge_map = BTreeMap::new();
        edge_map.insert("a".into(), (EdgeId("b".into()), Dir::Fwd));
        edge_map.insert("b".into(), (EdgeId("a".into()), Dir::Fwd));
        CellularAutomorphism {
            vertex_map,
            edge_map,
            face_map: BTreeMap::new(),
        }
    }

    #[test]
    fn identity_is_valid_of_order_one() {
        let c = wedge();
        let id = CellularAutomorphism::identity(&c);
        assert!(validate_automorphism(&c, &id).is_empty());
        assert_eq!(order_of(&c, &id).unwrap(), 1);
    }

    #[test]
    fn swap_has_order_two() {
        let c = wedge();
        let s = swap();
        assert!(validate_automorphism(&c, &s).is_empty());
        assert_eq!(order_of(&c, &s).unwrap(), 2);
    }

    #[test]
    fn loop_to_non_loop_breaks_incidence() {
        let mut c = wedge();
        c.vertices.push("w".into());
        c.edges.push(crate::complex::polygonal::Edge {
            id: "c".into(),
            tail: "v".into(),
            head: "w".into(),
        });
        let mut a = CellularAutomorphism::identity(&c);
        a.edge_map
            .insert("a".into(), (EdgeId("c".into()), Dir::Fwd));
        a.edge_map
            .insert("c".into(), (EdgeId("a".into()), Dir::Fwd));
        let v = validate_automorphism(&c, &a);
        assert!(v
            .iter()
            .any(|x| matches!(x, AutomorphismViolation::IncidenceBroken { .. })));
    }

    #[test]
    fn swap_is_weight_equivariant_for_unit_weights() {
        let c = wedge();
        let w = MorseWeighting::unit(&c);
        assert!(is_weight_equivariant(&swap(), &w));
        let mut w2 = w.clone();
        w2.weights.insert("b".into(), 2);
        assert!(!is_weight_equivariant(&swap(), &w2));
    }

    #[test]
    fn swap_acts_freely_on_wedge_link() {
        let c = wedge();
        let report = acts_freely_on_link(&c, &swap(), &"v".into()).unwrap();
        assert!(report.free);
        // four isolated link points fall into two swap orbits of size 2
        assert_eq!(report.orbit_sizes.get(&2), Some(&2));
        assert_eq!(report.orbit_sizes.len(), 1);
    }

    #[test]
    fn identity_fixes_link_vertices() {
        let c = wedge();
        let id = CellularAutomorphism::identity(&c);
        let report = acts_freely_on_link(&c, &id, &"v".into()).unwrap();
        assert!(!report.free);
        assert!(report.witness.is_some());
    }

    #[test]
    fn order_of_composition_divides_lcm_in_cyclic_samples() {
        let c = wedge();
        let s = swap();
        let id = CellularAutomorphism::identity(&c);
        let powers = [id.clone(), s.clone()];
        for x in &powers {
            for y in &powers {
                let xy = x.compose(&c, y).unwrap();
                let ox = order_of(&c, x).unwrap();
                let oy = order_of(&c, y).unwrap();
                let oxy = order_of(&c, &xy).unwrap();
                assert_eq!(num::integer::lcm(ox, oy) % oxy, 0);
            }
        }
    }

    #[test]
    fn torus_swap_is_a_reflected_automorphism() {
        // one vertex, loops a and b, square face a b a^-1 b^-1: swapping the
        // loops maps the boundary word onto its reverse traversal
        let mut c = wedge();
        c.faces.push(crate::complex::polygonal::Face {
            id: "f".into(),
            boundary: vec![
                SignedEdge("a".into(), Dir::Fwd),
                SignedEdge("b".into(), Dir::Fwd),
                SignedEdge("a".into(), Dir::Rev),
                SignedEdge("b".into(), Dir::Rev),
            ],
        });
        let mut vertex_map = BTreeMap::new();
        vertex_map.insert(VertexId("v".into()), VertexId("v".into()));
        let mut edge_map = BTreeMap::new();
        edge_map.insert(EdgeId("a".into()), (EdgeId("b".into()), Dir::Fwd));
        edge_map.insert(EdgeId("b".into()), (EdgeId("a".into()), Dir::Fwd));
        let aut = CellularAutomorphism::from_edge_data(&c, vertex_map, edge_map).unwrap();
        let image = aut.face_map.get(&FaceId("f".into())).unwrap();
        assert!(image.reflected);
        assert!(validate_automorphism(&c, &aut).is_empty());
        assert_eq!(order_of(&c, &aut).unwrap(), 2);
        // composing the reflection with itself re-derives a rotation datum
        let square = aut.compose(&c, &aut).unwrap();
        assert!(square.is_identity());
        // a wrong rotation datum is caught
        let mut broken = aut.clone();
        broken.face_map.insert(
            FaceId("f".into()),
            FaceImage {
                target: "f".into(),
                offset: 1,
                reflected: false,
            },
        );
        let violations = validate_automorphism(&c, &broken);
        assert!(violations
            .iter()
            .any(|v| matches!(v, AutomorphismViolation::FaceBoundaryBroken { .. })));
    }
}
