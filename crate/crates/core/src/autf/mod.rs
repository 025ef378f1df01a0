//! Endomorphisms of free groups: the paired automorphism families
//! `phi_i`, `psi_i` and the pair-swap involution, their relations,
//! abelianization matrices, ping-pong freeness certificates, and the
//! inner-automorphism test.

pub mod pingpong;

use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::words::{FreeWord, Letter};

pub use pingpong::{
    freeness_chain, pingpong_search, pingpong_verify, FreenessChain, IntervalPair,
    PingPongCertificate, ProjInterval,
};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AutError {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("pair index {i} out of range for rank {k}")]
    IndexOutOfRange { i: usize, k: usize },
    #[error("matrix must have determinant ±1, got {0}")]
    NonInvertible(i64),
    #[error("missing ping-pong certificate")]
    MissingCertificate,
    #[error("cannot parse endomorphism: {0}")]
    Parse(String),
    #[error("no rational bracket isolates the fixed slopes")]
    NoBrackets,
}

/// An endomorphism of the free group of the given rank, by generator images.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FreeGroupEndo {
    rank: usize,
    images: Vec<FreeWord>,
}

impl FreeGroupEndo {
    pub fn new(rank: usize, images: Vec<FreeWord>) -> Result<Self, AutError> {
        if images.len() != rank {
            return Err(AutError::RankMismatch(rank, images.len()));
        }
        for w in &images {
            if let Some(g) = w.max_generator() {
                if g as usize >= rank {
                    return Err(AutError::Parse(format!(
                        "image uses generator x{} beyond rank {rank}",
                        g + 1
                    )));
                }
            }
        }
        Ok(FreeGroupEndo { rank, images })
    }

    pub fn identity(rank: usize) -> Self {
        FreeGroupEndo {
            rank,
            images: (0..rank as u16).map(FreeWord::generator).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn image(&self, gen: usize) -> &FreeWord {
        &self.images[gen]
    }

    pub fn images(&self) -> &[FreeWord] {
        &self.images
    }

    pub fn apply(&self, w: &FreeWord) -> FreeWord {
        w.substitute(&self.images)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &FreeGroupEndo) -> Result<FreeGroupEndo, AutError> {
        if self.rank != other.rank {
            return Err(AutError::RankMismatch(self.rank, other.rank));
        }
        Ok(FreeGroupEndo {
            rank: self.rank,
            images: other.images.iter().map(|w| self.apply(w)).collect(),
        })
    }

    pub fn pow(&self, n: u32) -> Result<FreeGroupEndo, AutError> {
        let mut out = FreeGroupEndo::identity(self.rank);
        for _ in 0..n {
            out = self.compose(&out)?;
        }
        Ok(out)
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, w)| *w == FreeWord::generator(i as u16))
    }

    /// Conjugation by a fixed word.
    pub fn conjugation(rank: usize, x: &FreeWord) -> Result<Self, AutError> {
        let xi = x.inverse();
        let images = (0..rank as u16)
            .map(|g| x.concat(&FreeWord::generator(g)).concat(&xi))
            .collect();
        FreeGroupEndo::new(rank, images)
    }

    /// Exponent-sum matrix: column `c` holds the abelianized image of the
    /// (c+1)-th generator.
    pub fn abelianization(&self) -> IntMatrix {
        let k = self.rank;
        let mut m = IntMatrix::zero(k);
        for (c, w) in self.images.iter().enumerate() {
            for r in 0..k {
                m.set(r, c, w.exponent_sum_of(r as u16));
            }
        }
        m
    }
}

fn check_pair_index(i: usize, k: usize) -> Result<(), AutError> {
    if i == 0 || 2 * i > k {
        Err(AutError::IndexOutOfRange { i, k })
    } else {
        Ok(())
    }
}

fn word(pairs: &[(usize, bool)]) -> FreeWord {
    FreeWord::from_letters(pairs.iter().map(|&(g, inv)| Letter::new(g as u16, inv)))
}

/// phi_i: maps the (2i-1)-th generator to its square times the 2i-th, the
/// 2i-th to the product; fixes everything else.
pub fn phi(i: usize, k: usize) -> Result<FreeGroupEndo, AutError> {
    check_pair_index(i, k)?;
    let (p, q) = (2 * i - 2, 2 * i - 1); // 0-based indices of the pair
    let mut e = FreeGroupEndo::identity(k);
    e.images[p] = word(&[(p, false), (p, false), (q, false)]);
    e.images[q] = word(&[(p, false), (q, false)]);
    Ok(e)
}

/// psi_i: the swap-conjugate partner of phi_i.
pub fn psi(i: usize, k: usize) -> Result<FreeGroupEndo, AutError> {
    check_pair_index(i, k)?;
    let (p, q) = (2 * i - 2, 2 * i - 1);
    let mut e = FreeGroupEndo::identity(k);
    e.images[p] = word(&[(q, false), (p, false)]);
    e.images[q] = word(&[(q, false), (q, false), (p, false)]);
    Ok(e)
}

/// The involution swapping each pair of generators; the last generator is
/// fixed when the rank is odd.
pub fn sigma(k: usize) -> FreeGroupEndo {
    let mut e = FreeGroupEndo::identity(k);
    for i in 1..=(k / 2) {
        let (p, q) = (2 * i - 2, 2 * i - 1);
        e.images[p] = FreeWord::generator(q as u16);
        e.images[q] = FreeWord::generator(p as u16);
    }
    e
}

/// Inverse of phi_i, by direct formula (verified by composition in tests).
pub fn phi_inv(i: usize, k: usize) -> Result<FreeGroupEndo, AutError> {
    check_pair_index(i, k)?;
    let (p, q) = (2 * i - 2, 2 * i - 1);
    let mut e = FreeGroupEndo::identity(k);
    e.images[p] = word(&[(p, false), (q, true)]);
    e.images[q] = word(&[(q, false), (p, true), (q, false)]);
    Ok(e)
}

pub fn psi_inv(i: usize, k: usize) -> Result<FreeGroupEndo, AutError> {
    let s = sigma(k);
    s.compose(&phi_inv(i, k)?)?.compose(&s)
}

/// One relation check: a name and whether the two sides agreed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationCheck {
    pub name: String,
    pub holds: bool,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationReport {
    pub rank: usize,
    pub checks: Vec<RelationCheck>,
    pub all_hold: bool,
}

fn endo_diff(a: &FreeGroupEndo, b: &FreeGroupEndo) -> Option<String> {
    for g in 0..a.rank() {
        if a.image(g) != b.image(g) {
            return Some(format!(
                "images of x{} differ: {} vs {}",
                g + 1,
                format_x(a.image(g)),
                format_x(b.image(g))
            ));
        }
    }
    None
}

/// Verifies the defining relations as exact endomorphism equalities:
/// σ² = 1, σ phi_i σ = psi_i, and cross-index commutations.
pub fn verify_relations(k: usize) -> Result<RelationReport, AutError> {
    verify_relations_of(k, &|i, kk| phi(i, kk), &|i, kk| psi(i, kk))
}

/// Same, with injectable builders (used to demonstrate detection of a
/// perturbed family).
pub fn verify_relations_of(
    k: usize,
    phi_of: &dyn Fn(usize, usize) -> Result<FreeGroupEndo, AutError>,
    psi_of: &dyn Fn(usize, usize) -> Result<FreeGroupEndo, AutError>,
) -> Result<RelationReport, AutError> {
    if k < 2 {
        return Err(AutError::IndexOutOfRange { i: 1, k });
    }
    let pairs = k / 2;
    let s = sigma(k);
    let mut checks = Vec::new();
    let mut push = |name: String, lhs: &FreeGroupEndo, rhs: &FreeGroupEndo| {
        let detail = endo_diff(lhs, rhs);
        checks.push(RelationCheck {
            name,
            holds: detail.is_none(),
            detail,
        });
    };

    let ss = s.compose(&s)?;
    push("σ σ = 1".into(), &ss, &FreeGroupEndo::identity(k));

    for i in 1..=pairs {
        let lhs = s.compose(&phi_of(i, k)?)?.compose(&s)?;
        push(format!("σ φ{i} σ = ψ{i}"), &lhs, &psi_of(i, k)?);
    }
    for i in 1..=pairs {
        for j in 1..=pairs {
            if i == j {
                continue;
            }
            let pi = phi_of(i, k)?;
            let pj = phi_of(j, k)?;
            push(
                format!("φ{i} φ{j} = φ{j} φ{i}"),
                &pi.compose(&pj)?,
                &pj.compose(&pi)?,
            );
            let qj = psi_of(j, k)?;
            push(
                format!("φ{i} ψ{j} = ψ{j} φ{i}"),
                &pi.compose(&qj)?,
                &qj.compose(&pi)?,
            );
        }
    }
    let all_hold = checks.iter().all(|c| c.holds);
    Ok(RelationReport {
        rank: k,
        checks,
        all_hold,
    })
}

/// Square integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    pub n: usize,
    pub rows: Vec<Vec<i64>>,
}

impl IntMatrix {
    pub fn zero(n: usize) -> Self {
        IntMatrix {
            n,
            rows: vec![vec![0; n]; n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n);
        for i in 0..n {
            m.rows[i][i] = 1;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n));
        IntMatrix { n, rows }
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.rows[r][c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.rows[r][c] = v;
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n);
        let mut m = IntMatrix::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let mut acc: i64 = 0;
                for k in 0..self.n {
                    acc = acc
                        .checked_add(
                            self.rows[i][k]
                                .checked_mul(other.rows[k][j])
                                .expect("matrix entry overflow"),
                        )
                        .expect("matrix entry overflow");
                }
                m.rows[i][j] = acc;
            }
        }
        m
    }

    pub fn pow(&self, e: u32) -> IntMatrix {
        let mut out = IntMatrix::identity(self.n);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn det2(&self) -> i64 {
        assert_eq!(self.n, 2);
        self.rows[0][0] * self.rows[1][1] - self.rows[0][1] * self.rows[1][0]
    }

    /// Inverse of a 2x2 matrix with determinant ±1.
    pub fn inverse2(&self) -> Result<IntMatrix, AutError> {
        let d = self.det2();
        if d.abs() != 1 {
            return Err(AutError::NonInvertible(d));
        }
        let (a, b, c, e) = (
            self.rows[0][0],
            self.rows[0][1],
            self.rows[1][0],
            self.rows[1][1],
        );
        Ok(IntMatrix::from_rows(vec![
            vec![d * e, -d * b],
            vec![-d * c, d * a],
        ]))
    }
}

/// Verdict of the inner-automorphism decision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum InnerVerdict {
    Inner {
        #[serde(
            serialize_with = "serialize_word",
            deserialize_with = "deserialize_word"
        )]
        conjugator: FreeWord,
    },
    NotInner,
}

fn serialize_word<S: Serializer>(w: &FreeWord, s: S) -> Result<S::Ok, S::Error> {
    format_x(w).serialize(s)
}

fn deserialize_word<'de, D: Deserializer<'de>>(d: D) -> Result<FreeWord, D::Error> {
    let raw = String::deserialize(d)?;
    parse_x(&raw).map_err(D::Error::custom)
}

/// Decides whether `e` is conjugation by some word: the image of the first
/// generator pins the conjugator up to its centralizer (the cyclic group it
/// generates), leaving finitely many candidates to test against every
/// generator.
pub fn is_inner(e: &FreeGroupEndo) -> InnerVerdict {
    let k = e.rank();
    if k == 0 {
        return InnerVerdict::Inner {
            conjugator: FreeWord::identity(),
        };
    }
    // inner automorphisms abelianize to the identity; cheap rejection
    if e.abelianization() != IntMatrix::identity(k) {
        return InnerVerdict::NotInner;
    }
    if k == 1 {
        // F_1 is abelian: only the identity is inner
        return if e.is_identity() {
            InnerVerdict::Inner {
                conjugator: FreeWord::identity(),
            }
        } else {
            InnerVerdict::NotInner
        };
    }
    let x1 = FreeWord::generator(0);
    let (p, core) = e.image(0).cyclic_reduce();
    if core != x1 {
        return InnerVerdict::NotInner;
    }
    let max_len = e.images().iter().map(|w| w.len()).max().unwrap_or(0);
    let bound = (max_len + p.len() + 2) as i64;
    for j in -bound..=bound {
        let cand = p.concat(&x1.pow(j));
        let cand_inv = cand.inverse();
        let works = (0..k as u16).all(|g| {
            let conj = cand.concat(&FreeWord::generator(g)).concat(&cand_inv);
            conj == *e.image(g as usize)
        });
        if works {
            return InnerVerdict::Inner { conjugator: cand };
        }
    }
    InnerVerdict::NotInner
}

/// Checks a claimed inverse: both compositions must be the identity.
pub fn verify_inverse(e: &FreeGroupEndo, inv: &FreeGroupEndo) -> Result<bool, AutError> {
    Ok(e.compose(inv)?.is_identity() && inv.compose(e)?.is_identity())
}

// ---- text form: words like "x1 x1 x2^-1" ----

pub fn format_x(w: &FreeWord) -> String {
    if w.is_identity() {
        return "1".to_string();
    }
    w.letters()
        .iter()
        .map(|l| {
            if l.inv {
                format!("x{}^-1", l.gen + 1)
            } else {
                format!("x{}", l.gen + 1)
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn parse_x(s: &str) -> Result<FreeWord, AutError> {
    let s = s.trim();
    if s.is_empty() || s == "1" {
        return Ok(FreeWord::identity());
    }
    let mut letters = Vec::new();
    for token in s.split_whitespace() {
        let (name, exp) = match token.split_once('^') {
            Some((n, e)) => {
                let exp: i64 = e
                    .parse()
                    .map_err(|_| AutError::Parse(format!("bad exponent in {token}")))?;
                (n, exp)
            }
            None => (token, 1i64),
        };
        let idx: usize = name
            .strip_prefix('x')
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| AutError::Parse(format!("unknown generator {name}")))?;
        if idx == 0 {
            return Err(AutError::Parse("generators are numbered from x1".into()));
        }
        for _ in 0..exp.unsigned_abs() {
            letters.push(Letter::new((idx - 1) as u16, exp < 0));
        }
    }
    Ok(FreeWord::from_letters(letters))
}

impl fmt::Display for FreeGroupEndo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .images
            .iter()
            .enumerate()
            .map(|(i, w)| format!("x{} -> {}", i + 1, format_x(w)))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[derive(Serialize, Deserialize)]
struct EndoRepr {
    rank: usize,
    images: BTreeMap<String, String>,
}

impl Serialize for FreeGroupEndo {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        EndoRepr {
            rank: self.rank,
            images: self
                .images
                .iter()
                .enumerate()
                .map(|(i, w)| (format!("x{}", i + 1), format_x(w)))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FreeGroupEndo {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = EndoRepr::deserialize(d)?;
        let mut images = vec![FreeWord::identity(); repr.rank];
        for (key, val) in &repr.images {
            let idx: usize = key
                .strip_prefix('x')
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| D::Error::custom(format!("bad generator key {key}")))?;
            if idx == 0 || idx > repr.rank {
                return Err(D::Error::custom(format!("generator {key} out of range")));
            }
            images[idx - 1] = parse_x(val).map_err(D::Error::custom)?;
        }
        FreeGroupEndo::new(repr.rank, images).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_matches_the_defining_images() {
        let p = phi(1, 2).unwrap();
        assert_eq!(format_x(p.image(0)), "x1 x1 x2");
        assert_eq!(format_x(p.image(1)), "x1 x2");
        assert_eq!(
            p.apply(&FreeWord::generator(0)),
            parse_x("x1 x1 x2").unwrap()
        );
    }

    #[test]
    fn psi_matches_the_defining_images() {
        let q = psi(1, 2).unwrap();
        assert_eq!(format_x(q.image(0)), "x2 x1");
        assert_eq!(format_x(q.image(1)), "x2 x2 x1");
    }

    #[test]
    fn sigma_swaps_pairs_and_fixes_odd_last() {
        let s = sigma(3);
        assert_eq!(format_x(s.image(0)), "x2");
        assert_eq!(format_x(s.image(1)), "x1");
        assert_eq!(format_x(s.image(2)), "x3");
    }

    #[test]
    fn phi_fixes_other_pairs() {
        let p = phi(2, 4).unwrap();
        assert_eq!(format_x(p.image(0)), "x1");
        assert_eq!(format_x(p.image(1)), "x2");
        assert_eq!(format_x(p.image(2)), "x3 x3 x4");
    }

    #[test]
    fn index_bounds_are_enforced() {
        assert!(phi(2, 2).is_err());
        assert!(phi(0, 4).is_err());
        assert!(psi(3, 4).is_err());
    }

    #[test]
    fn relations_hold_for_small_ranks() {
        for k in [2, 4, 6] {
            let report = verify_relations(k).unwrap();
            assert!(report.all_hold, "relations failed at k={k}: {report:?}");
        }
    }

    #[test]
    fn perturbed_psi_breaks_a_relation() {
        let bad_psi = |i: usize, k: usize| {
            let mut q = psi(i, k)?;
            // swap the order in the first image: x1 x2 instead of x2 x1
            if i == 1 {
                q.images[0] = parse_x("x1 x2").unwrap();
            }
            Ok(q)
        };
        let report = verify_relations_of(2, &|i, k| phi(i, k), &bad_psi).unwrap();
        assert!(!report.all_hold);
        let failing: Vec<&RelationCheck> = report.checks.iter().filter(|c| !c.holds).collect();
        assert!(failing.iter().any(|c| c.name.contains('ψ')));
        assert!(failing[0].detail.as_deref().unwrap_or("").contains("x1"));
    }

    #[test]
    fn abelianizations_are_the_expected_matrices() {
        let p = phi(1, 2).unwrap().abelianization();
        assert_eq!(p, IntMatrix::from_rows(vec![vec![2, 1], vec![1, 1]]));
        let q = psi(1, 2).unwrap().abelianization();
        assert_eq!(q, IntMatrix::from_rows(vec![vec![1, 1], vec![1, 2]]));
        let id = FreeGroupEndo::identity(3).abelianization();
        assert_eq!(id, IntMatrix::identity(3));
    }

    #[test]
    fn abelianization_is_multiplicative() {
        let p = phi(1, 4).unwrap();
        let q = psi(2, 4).unwrap();
        let s = sigma(4);
        for (a, b) in [(&p, &q), (&q, &s), (&s, &p)] {
            let lhs = a.compose(b).unwrap().abelianization();
            let rhs = a.abelianization().mul(&b.abelianization());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn builder_inverses_compose_to_identity() {
        for k in [2, 4] {
            for i in 1..=(k / 2) {
                let p = phi(i, k).unwrap();
                let pi = phi_inv(i, k).unwrap();
                assert!(verify_inverse(&p, &pi).unwrap());
                let q = psi(i, k).unwrap();
                let qi = psi_inv(i, k).unwrap();
                assert!(verify_inverse(&q, &qi).unwrap());
            }
        }
    }

    #[test]
    fn conjugation_is_detected_exactly() {
        let x = parse_x("x1 x2").unwrap();
        let e = FreeGroupEndo::conjugation(2, &x).unwrap();
        match is_inner(&e) {
            InnerVerdict::Inner { conjugator } => assert_eq!(conjugator, x),
            InnerVerdict::NotInner => panic!("conjugation must be inner"),
        }
    }

    #[test]
    fn identity_is_inner_with_trivial_conjugator() {
        match is_inner(&FreeGroupEndo::identity(3)) {
            InnerVerdict::Inner { conjugator } => assert!(conjugator.is_identity()),
            InnerVerdict::NotInner => panic!(),
        }
    }

    #[test]
    fn phi_is_not_inner() {
        assert_eq!(is_inner(&phi(1, 2).unwrap()), InnerVerdict::NotInner);
        assert_eq!(is_inner(&psi(1, 2).unwrap()), InnerVerdict::NotInner);
        assert_eq!(is_inner(&sigma(4)), InnerVerdict::NotInner);
    }

    #[test]
    fn conjugator_ending_in_x1_powers_is_recovered() {
        let x = parse_x("x2 x1 x1").unwrap();
        let e = FreeGroupEndo::conjugation(3, &x).unwrap();
        match is_inner(&e) {
            InnerVerdict::Inner { conjugator } => assert_eq!(conjugator, x),
            InnerVerdict::NotInner => panic!(),
        }
    }

    #[test]
    fn endo_json_round_trip() {
        let p = phi(1, 2).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(
            json,
            r#"{"rank":2,"images":{"x1":"x1 x1 x2","x2":"x1 x2"}}"#
        );
        let back: FreeGroupEndo = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }
}
