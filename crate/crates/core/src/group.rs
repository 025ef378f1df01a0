//! Concrete arithmetic in (F₂)ⁿ ⋊ ⟨σ⟩, where σ swaps the generators `a`
//! and `b` simultaneously in every coordinate.
//!
//! The twisted square root `w = u·σ(u)⁻¹` always splits a reduced word with
//! no cancellation at the seam (a letter never cancels its own swap), so the
//! ι invariant — the Morse degree of `u` — is well defined and shifts by the
//! degree of the conjugator. Witnesses `t^n σ t^-n` with distinct n get
//! distinct ι, hence lie in distinct kernel conjugacy classes.

use std::fmt;

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::words::{reduced_words_of_length, FreeWord, Letter};

pub const GEN_A: u16 = 0;
pub const GEN_B: u16 = 1;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("elements have different coordinate counts: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("bad base element for witnesses: {0}")]
    BadWitnessBase(String),
    #[error("twisted square root does not exist")]
    UnsolvableTwistedSqrt,
    #[error("enumeration bounds exceeded: {0}")]
    BoundsExceeded(String),
    #[error("cannot parse element: {0}")]
    Parse(String),
}

/// Swap `a <-> b` in one word.
pub fn swap_word(w: &FreeWord) -> FreeWord {
    w.map_generators(|g| g ^ 1)
}

/// An element of (F₂)ⁿ ⋊ ⟨σ⟩: one reduced word per coordinate plus the
/// σ-component.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DoubledFreeElement {
    coords: Vec<FreeWord>,
    flip: bool,
}

impl DoubledFreeElement {
    pub fn new(coords: Vec<FreeWord>, flip: bool) -> Result<Self, GroupError> {
        for w in &coords {
            if let Some(g) = w.max_generator() {
                if g > GEN_B {
                    return Err(GroupError::Parse(format!(
                        "coordinate words range over a, b only (saw generator index {g})"
                    )));
                }
            }
        }
        Ok(DoubledFreeElement { coords, flip })
    }

    pub fn identity(n: usize) -> Self {
        DoubledFreeElement {
            coords: vec![FreeWord::identity(); n],
            flip: false,
        }
    }

    /// The involution itself: trivial coordinates, flip set.
    pub fn sigma(n: usize) -> Self {
        DoubledFreeElement {
            coords: vec![FreeWord::identity(); n],
            flip: true,
        }
    }

    /// The standard degree-1 element `t = (a, 1, ..., 1)`.
    pub fn standard_t(n: usize) -> Self {
        assert!(n >= 1, "the degree-1 base element needs a coordinate");
        let mut coords = vec![FreeWord::identity(); n];
        coords[0] = FreeWord::generator(GEN_A);
        DoubledFreeElement {
            coords,
            flip: false,
        }
    }

    pub fn coords(&self) -> &[FreeWord] {
        &self.coords
    }

    pub fn flip(&self) -> bool {
        self.flip
    }

    pub fn arity(&self) -> usize {
        self.coords.len()
    }

    pub fn total_length(&self) -> usize {
        self.coords.iter().map(|w| w.len()).sum()
    }

    fn apply_sigma_coords(coords: &[FreeWord]) -> Vec<FreeWord> {
        coords.iter().map(swap_word).collect()
    }

    /// Semidirect multiplication: (u, ε)(v, δ) = (u · σ^ε(v), ε ⊕ δ).
    pub fn multiply(&self, other: &DoubledFreeElement) -> Result<DoubledFreeElement, GroupError> {
        if self.arity() != other.arity() {
            return Err(GroupError::ArityMismatch(self.arity(), other.arity()));
        }
        let rhs = if self.flip {
            Self::apply_sigma_coords(&other.coords)
        } else {
            other.coords.clone()
        };
        let coords = self
            .coords
            .iter()
            .zip(&rhs)
            .map(|(u, v)| u.concat(v))
            .collect();
        Ok(DoubledFreeElement {
            coords,
            flip: self.flip ^ other.flip,
        })
    }

    /// (u, ε)⁻¹ = (σ^ε(u⁻¹), ε).
    pub fn invert(&self) -> DoubledFreeElement {
        let inv: Vec<FreeWord> = self.coords.iter().map(|w| w.inverse()).collect();
        let coords = if self.flip {
            Self::apply_sigma_coords(&inv)
        } else {
            inv
        };
        DoubledFreeElement {
            coords,
            flip: self.flip,
        }
    }

    pub fn pow(&self, n: i64) -> Result<DoubledFreeElement, GroupError> {
        let base = if n >= 0 { self.clone() } else { self.invert() };
        let mut out = DoubledFreeElement::identity(self.arity());
        for _ in 0..n.unsigned_abs() {
            out = out.multiply(&base)?;
        }
        Ok(out)
    }

    pub fn conjugate_by(&self, c: &DoubledFreeElement) -> Result<DoubledFreeElement, GroupError> {
        c.multiply(self)?.multiply(&c.invert())
    }

    pub fn is_identity(&self) -> bool {
        !self.flip && self.coords.iter().all(|w| w.is_identity())
    }
}

/// Total exponent sum over all coordinates; the degree of the induced map
/// to Z (the σ-component maps to 0).
pub fn morse_degree(g: &DoubledFreeElement) -> i64 {
    g.coords().iter().map(|w| w.exponent_sum()).sum()
}

/// The witness family member `t^n σ t^-n`.
pub fn witness(n: i64, t: &DoubledFreeElement) -> Result<DoubledFreeElement, GroupError> {
    if t.flip() {
        return Err(GroupError::BadWitnessBase(
            "t must have trivial σ-component".into(),
        ));
    }
    if morse_degree(t) != 1 {
        return Err(GroupError::BadWitnessBase(format!(
            "t must have Morse degree 1, got {}",
            morse_degree(t)
        )));
    }
    let tn = t.pow(n)?;
    tn.multiply(&DoubledFreeElement::sigma(t.arity()))?
        .multiply(&tn.invert())
}

/// Solves `w = u·σ(u)⁻¹` coordinate-wise, scanning candidate prefixes.
/// Returns `None` when no solution exists (in particular when the
/// precondition σ(w) = w⁻¹ fails). The solution is unique because only the
/// trivial word is fixed by the swap.
pub fn twisted_sqrt(coords: &[FreeWord]) -> Option<Vec<FreeWord>> {
    for w in coords {
        if swap_word(w) != w.inverse() {
            return None;
        }
    }
    let mut out = Vec::with_capacity(coords.len());
    for w in coords {
        let mut found = None;
        for cut in 0..=w.len() {
            let u = w.prefix(cut);
            if u.concat(&swap_word(&u).inverse()) == *w {
                found = Some(u);
                break;
            }
        }
        out.push(found?);
    }
    Some(out)
}

/// The conjugacy-separating invariant: ι(w, σ) = Morse degree of the
/// twisted square root of w.
pub fn iota(g: &DoubledFreeElement) -> Result<i64, GroupError> {
    if !g.flip() {
        return Err(GroupError::BadWitnessBase(
            "ι is defined only on elements with σ-component".into(),
        ));
    }
    let u = twisted_sqrt(g.coords()).ok_or(GroupError::UnsolvableTwistedSqrt)?;
    Ok(u.iter().map(|w| w.exponent_sum()).sum())
}

/// Order of an element, searched up to a cutoff; `None` flags "exceeds the
/// cutoff" (infinite order, at desk scale).
pub fn element_order(g: &DoubledFreeElement, cutoff: u64) -> Option<u64> {
    let mut p = g.clone();
    for d in 1..=cutoff {
        if p.is_identity() {
            return Some(d);
        }
        p = p.multiply(g).expect("same arity");
    }
    None
}

/// Outcome of the exhaustive conjugacy search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum ConjugacyVerdict {
    Conjugate {
        witness: DoubledFreeElement,
    },
    NoConjugator {
        bound: usize,
        restricted_to_kernel: bool,
        tested: usize,
    },
}

const MAX_ORACLE_ARITY: usize = 2;
const MAX_ORACLE_LENGTH: usize = 8;

/// Exhaustively enumerates conjugators of total letter length at most `max_len`
/// (restricted to Morse degree 0 when asked) and tests `c g c⁻¹ = h`.
/// Deterministic: elements are tried by total length, then coordinate words
/// lexicographically, flip-free first.
pub fn conjugacy_oracle(
    g: &DoubledFreeElement,
    h: &DoubledFreeElement,
    max_len: usize,
    restrict_to_kernel: bool,
) -> Result<ConjugacyVerdict, GroupError> {
    if g.arity() != h.arity() {
        return Err(GroupError::ArityMismatch(g.arity(), h.arity()));
    }
    let n = g.arity();
    if n > MAX_ORACLE_ARITY {
        return Err(GroupError::BoundsExceeded(format!(
            "oracle supports at most {MAX_ORACLE_ARITY} coordinates, got {n}"
        )));
    }
    if max_len > MAX_ORACLE_LENGTH {
        return Err(GroupError::BoundsExceeded(format!(
            "oracle supports length bound at most {MAX_ORACLE_LENGTH}, got {max_len}"
        )));
    }
    let words: Vec<Vec<FreeWord>> = (0..=max_len)
        .map(|l| reduced_words_of_length(2, l))
        .collect();
    let mut tested = 0usize;
    for total in 0..=max_len {
        for coords in compositions(n, total) {
            let mut stack: Vec<Vec<FreeWord>> = vec![Vec::new()];
            for &l in &coords {
                let mut next = Vec::new();
                for partial in &stack {
                    for w in &words[l] {
                        let mut p = partial.clone();
                        p.push(w.clone());
                        next.push(p);
                    }
                }
                stack = next;
            }
            for coord_words in stack {
                for flip in [false, true] {
                    let c = DoubledFreeElement {
                        coords: coord_words.clone(),
                        flip,
                    };
                    if restrict_to_kernel && morse_degree(&c) != 0 {
                        continue;
                    }
                    tested += 1;
                    if g.conjugate_by(&c)? == *h {
                        return Ok(ConjugacyVerdict::Conjugate { witness: c });
                    }
                }
            }
        }
    }
    Ok(ConjugacyVerdict::NoConjugator {
        bound: max_len,
        restricted_to_kernel: restrict_to_kernel,
        tested,
    })
}

/// All ways to write `total` as an ordered sum of `parts` nonnegative ints.
fn compositions(parts: usize, total: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(parts - 1, total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

// ---- text form: words like "a^3 b^-3", identity "1" ----

pub fn format_ab(w: &FreeWord) -> String {
    if w.is_identity() {
        return "1".to_string();
    }
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    let letters = w.letters();
    while i < letters.len() {
        let l = letters[i];
        let mut run = 1usize;
        while i + run < letters.len() && letters[i + run] == l {
            run += 1;
        }
        let name = if l.gen == GEN_A { "a" } else { "b" };
        let exp = if l.inv { -(run as i64) } else { run as i64 };
        if exp == 1 {
            parts.push(name.to_string());
        } else {
            parts.push(format!("{name}^{exp}"));
        }
        i += run;
    }
    parts.join(" ")
}

pub fn parse_ab(s: &str) -> Result<FreeWord, GroupError> {
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
                    .map_err(|_| GroupError::Parse(format!("bad exponent in {token}")))?;
                (n, exp)
            }
            None => (token, 1),
        };
        let gen = match name {
            "a" => GEN_A,
            "b" => GEN_B,
            _ => return Err(GroupError::Parse(format!("unknown generator {name}"))),
        };
        for _ in 0..exp.unsigned_abs() {
            letters.push(Letter::new(gen, exp < 0));
        }
    }
    Ok(FreeWord::from_letters(letters))
}

impl fmt::Display for DoubledFreeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coords: Vec<String> = self.coords.iter().map(format_ab).collect();
        write!(
            f,
            "({}; {})",
            coords.join(", "),
            if self.flip { "σ" } else { "1" }
        )
    }
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    coords: Vec<String>,
    flip: bool,
}

impl Serialize for DoubledFreeElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ElementRepr {
            coords: self.coords.iter().map(format_ab).collect(),
            flip: self.flip,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DoubledFreeElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = ElementRepr::deserialize(d)?;
        let coords: Result<Vec<FreeWord>, GroupError> =
            repr.coords.iter().map(|s| parse_ab(s)).collect();
        let coords = coords.map_err(D::Error::custom)?;
        DoubledFreeElement::new(coords, repr.flip).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn elt(coords: &[&str], flip: bool) -> DoubledFreeElement {
        DoubledFreeElement::new(coords.iter().map(|s| parse_ab(s).unwrap()).collect(), flip)
            .unwrap()
    }

    #[test]
    fn sigma_times_sigma_is_identity() {
        let s = DoubledFreeElement::sigma(2);
        assert!(s.multiply(&s).unwrap().is_identity());
    }

    #[test]
    fn flip_twists_the_right_factor() {
        // (a; σ)(a; σ) = (a σ(a); 1) = (ab; 1)
        let g = elt(&["a"], true);
        let prod = g.multiply(&g).unwrap();
        assert_eq!(prod, elt(&["a b"], false));
    }

    #[test]
    fn inverse_is_two_sided() {
        let g = elt(&["a b^-1 a", "b"], true);
        assert!(g.multiply(&g.invert()).unwrap().is_identity());
        assert!(g.invert().multiply(&g).unwrap().is_identity());
    }

    #[test]
    fn degree_is_a_homomorphism() {
        let g = elt(&["a^2 b", "b^-1"], true);
        let h = elt(&["b a", "a"], false);
        let gh = g.multiply(&h).unwrap();
        assert_eq!(morse_degree(&gh), morse_degree(&g) + morse_degree(&h));
    }

    #[test]
    fn witnesses_match_hand_computation() {
        let t = DoubledFreeElement::standard_t(2);
        assert_eq!(witness(0, &t).unwrap(), DoubledFreeElement::sigma(2));
        assert_eq!(witness(1, &t).unwrap(), elt(&["a b^-1", "1"], true));
        assert_eq!(witness(3, &t).unwrap(), elt(&["a^3 b^-3", "1"], true));
        for n in 0..6 {
            let w = witness(n, &t).unwrap();
            assert_eq!(morse_degree(&w), 0);
            assert_eq!(element_order(&w, 10), Some(2));
        }
    }

    #[test]
    fn twisted_sqrt_solves_and_rejects() {
        let w = parse_ab("a^4 b^-4").unwrap();
        let u = twisted_sqrt(&[w]).unwrap();
        assert_eq!(u, vec![parse_ab("a^4").unwrap()]);

        assert_eq!(
            twisted_sqrt(&[FreeWord::identity()]),
            Some(vec![FreeWord::identity()])
        );
        // σ(a) = b != a^-1
        assert_eq!(twisted_sqrt(&[parse_ab("a").unwrap()]), None);
    }

    #[test]
    fn iota_counts_the_height() {
        let t = DoubledFreeElement::standard_t(1);
        for n in 0..6 {
            assert_eq!(iota(&witness(n, &t).unwrap()).unwrap(), n);
        }
        assert_eq!(iota(&DoubledFreeElement::sigma(1)).unwrap(), 0);
    }

    #[test]
    fn iota_shifts_by_conjugator_degree() {
        let t = DoubledFreeElement::standard_t(2);
        let g = witness(2, &t).unwrap();
        for c in [
            elt(&["a b a^-1", "1"], false),
            elt(&["a", "b"], false),
            elt(&["b^-1", "a b"], true),
        ] {
            let conj = g.conjugate_by(&c).unwrap();
            assert_eq!(iota(&conj).unwrap(), iota(&g).unwrap() + morse_degree(&c));
        }
    }

    #[test]
    fn oracle_finds_planted_conjugator() {
        let t = DoubledFreeElement::standard_t(2);
        let g = witness(1, &t).unwrap();
        let c = elt(&["a b", "1"], false);
        let h = g.conjugate_by(&c).unwrap();
        match conjugacy_oracle(&g, &h, 4, false).unwrap() {
            ConjugacyVerdict::Conjugate { witness } => {
                assert_eq!(g.conjugate_by(&witness).unwrap(), h);
            }
            other => panic!("expected a conjugator, got {other:?}"),
        }
    }

    #[test]
    fn oracle_refuses_out_of_bound_requests() {
        let g = DoubledFreeElement::identity(1);
        assert!(matches!(
            conjugacy_oracle(&g, &g, 9, false),
            Err(GroupError::BoundsExceeded(_))
        ));
    }

    #[test]
    fn equal_elements_are_conjugate_by_identity() {
        let t = DoubledFreeElement::standard_t(1);
        let g = witness(2, &t).unwrap();
        match conjugacy_oracle(&g, &g, 2, true).unwrap() {
            ConjugacyVerdict::Conjugate { witness } => assert!(witness.is_identity()),
            other => panic!("expected identity conjugator, got {other:?}"),
        }
    }

    #[test]
    fn element_orders() {
        assert_eq!(element_order(&DoubledFreeElement::identity(2), 5), Some(1));
        let t = DoubledFreeElement::standard_t(2);
        assert_eq!(element_order(&t, 20), None);
    }

    #[test]
    fn text_round_trip() {
        let g = elt(&["a^3 b^-3", "1"], true);
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"coords":["a^3 b^-3","1"],"flip":true}"#);
        let back: DoubledFreeElement = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn no_short_word_is_swap_fixed() {
        // exhaustive through length 10; underpins uniqueness of the square root
        for len in 1..=10 {
            for w in reduced_words_of_length(2, len) {
                assert_ne!(swap_word(&w), w);
            }
        }
    }
}
