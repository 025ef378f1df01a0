//! Ping-pong freeness certificates for pairs of 2x2 integer matrices
//! acting on slopes of the projective line.
//!
//! Domains are rational intervals bracketing the fixed slopes of each
//! matrix. The certificate pins one attracting and one repelling interval
//! per matrix and records the eight inclusion checks that reduce
//! `A^{±jN}(X_B) ⊂ X_A` for all j >= 1 to the j = 1 cases plus nesting.
//! All arithmetic is exact (big rationals).

use num::rational::Ratio;
use num::BigInt;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{AutError, IntMatrix};

pub type Rat = Ratio<BigInt>;

fn rat(n: i64) -> Rat {
    Ratio::from_integer(BigInt::from(n))
}

fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn rat_from_string(s: &str) -> Option<Rat> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Ratio::new(n, d))
            }
        }
        None => {
            let n: BigInt = s.trim().parse().ok()?;
            Some(Ratio::from_integer(n))
        }
    }
}

/// A closed interval of finite slopes with rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjInterval {
    pub lo: Rat,
    pub hi: Rat,
}

impl ProjInterval {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        assert!(lo <= hi);
        ProjInterval { lo, hi }
    }

    pub fn contains(&self, x: &Rat) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn contains_interval(&self, other: &ProjInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn disjoint(&self, other: &ProjInterval) -> bool {
        self.hi < other.lo || other.hi < self.lo
    }
}

impl Serialize for ProjInterval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [rat_to_string(&self.lo), rat_to_string(&self.hi)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjInterval {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw: [String; 2] = Deserialize::deserialize(d)?;
        let lo = rat_from_string(&raw[0]).ok_or_else(|| D::Error::custom("bad rational"))?;
        let hi = rat_from_string(&raw[1]).ok_or_else(|| D::Error::custom("bad rational"))?;
        if lo > hi {
            return Err(D::Error::custom("interval endpoints out of order"));
        }
        Ok(ProjInterval { lo, hi })
    }
}

/// The two fixed-slope intervals of one matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalPair {
    pub attracting: ProjInterval,
    pub repelling: ProjInterval,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InclusionCheck {
    pub map: String,
    pub from: String,
    pub into: String,
    pub holds: bool,
}

/// A replayable freeness certificate for `<A^N, B^N>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PingPongCertificate {
    pub n: u32,
    pub domain_a: IntervalPair,
    pub domain_b: IntervalPair,
    pub inclusions: Vec<InclusionCheck>,
}

/// Image of a slope under a Möbius map with matrix `m`.
fn mobius(m: &IntMatrix, s: &Rat) -> Option<Rat> {
    let a = rat(m.get(0, 0));
    let b = rat(m.get(0, 1));
    let c = rat(m.get(1, 0));
    let d = rat(m.get(1, 1));
    let den = &c * s + &d;
    if den.is_zero() {
        None
    } else {
        Some((&a * s + &b) / den)
    }
}

/// Image of an interval avoiding the pole; `None` when the pole lies inside
/// (the image then wraps through infinity and cannot land in a bounded
/// target).
fn mobius_interval(m: &IntMatrix, iv: &ProjInterval) -> Option<ProjInterval> {
    let c = rat(m.get(1, 0));
    let d = rat(m.get(1, 1));
    let den_lo = &c * &iv.lo + &d;
    let den_hi = &c * &iv.hi + &d;
    if den_lo.is_zero() || den_hi.is_zero() || (den_lo.is_positive() != den_hi.is_positive()) {
        return None;
    }
    let img_lo = mobius(m, &iv.lo)?;
    let img_hi = mobius(m, &iv.hi)?;
    Some(if img_lo <= img_hi {
        ProjInterval::new(img_lo, img_hi)
    } else {
        ProjInterval::new(img_hi, img_lo)
    })
}

fn check_det(m: &IntMatrix) -> Result<(), AutError> {
    let d = m.det2();
    if d.abs() != 1 {
        return Err(AutError::NonInvertible(d));
    }
    Ok(())
}

/// Replays all eight inclusion checks for the given power and domains.
/// `true` means the ping-pong conditions (hence freeness of `<A^N, B^N>`)
/// are verified; the returned list records each individual inclusion.
pub fn pingpong_verify(
    a: &IntMatrix,
    b: &IntMatrix,
    n: u32,
    domain_a: &IntervalPair,
    domain_b: &IntervalPair,
) -> Result<(bool, Vec<InclusionCheck>), AutError> {
    check_det(a)?;
    check_det(b)?;
    if n == 0 {
        return Ok((false, Vec::new()));
    }
    // the four intervals must be pairwise disjoint
    let all = [
        ("A.attracting", &domain_a.attracting),
        ("A.repelling", &domain_a.repelling),
        ("B.attracting", &domain_b.attracting),
        ("B.repelling", &domain_b.repelling),
    ];
    for i in 0..4 {
        for j in i + 1..4 {
            if !all[i].1.disjoint(all[j].1) {
                return Ok((false, Vec::new()));
            }
        }
    }

    let a_pow = a.pow(n);
    let a_inv_pow = a.inverse2()?.pow(n);
    let b_pow = b.pow(n);
    let b_inv_pow = b.inverse2()?.pow(n);

    let mut checks = Vec::new();
    let mut check = |map: &str,
                     mat: &IntMatrix,
                     from_name: &str,
                     iv: &ProjInterval,
                     into_name: &str,
                     into: &ProjInterval| {
        let holds = mobius_interval(mat, iv).is_some_and(|img| into.contains_interval(&img));
        checks.push(InclusionCheck {
            map: map.to_string(),
            from: from_name.to_string(),
            into: into_name.to_string(),
            holds,
        });
        holds
    };

    let mut ok = true;
    // forward power of A pulls X_B and its own attracting interval inward
    for (name, iv) in [
        ("B.attracting", &domain_b.attracting),
        ("B.repelling", &domain_b.repelling),
        ("A.attracting", &domain_a.attracting),
    ] {
        ok &= check(
            &format!("A^{n}"),
            &a_pow,
            name,
            iv,
            "A.attracting",
            &domain_a.attracting,
        );
    }
    for (name, iv) in [
        ("B.attracting", &domain_b.attracting),
        ("B.repelling", &domain_b.repelling),
        ("A.repelling", &domain_a.repelling),
    ] {
        ok &= check(
            &format!("A^-{n}"),
            &a_inv_pow,
            name,
            iv,
            "A.repelling",
            &domain_a.repelling,
        );
    }
    for (name, iv) in [
        ("A.attracting", &domain_a.attracting),
        ("A.repelling", &domain_a.repelling),
        ("B.attracting", &domain_b.attracting),
    ] {
        ok &= check(
            &format!("B^{n}"),
            &b_pow,
            name,
            iv,
            "B.attracting",
            &domain_b.attracting,
        );
    }
    for (name, iv) in [
        ("A.attracting", &domain_a.attracting),
        ("A.repelling", &domain_a.repelling),
        ("B.repelling", &domain_b.repelling),
    ] {
        ok &= check(
            &format!("B^-{n}"),
            &b_inv_pow,
            name,
            iv,
            "B.repelling",
            &domain_b.repelling,
        );
    }
    Ok((ok, checks))
}

/// Replays a certificate.
pub fn replay_certificate(
    a: &IntMatrix,
    b: &IntMatrix,
    cert: &PingPongCertificate,
) -> Result<bool, AutError> {
    let (ok, _) = pingpong_verify(a, b, cert.n, &cert.domain_a, &cert.domain_b)?;
    Ok(ok)
}

/// Fixed slopes of `m` solve `c s^2 + (d-a) s - b = 0`.
fn fixed_slope_quadratic(m: &IntMatrix) -> (i64, i64, i64) {
    (m.get(1, 0), m.get(1, 1) - m.get(0, 0), -m.get(0, 1))
}

fn eval_quadratic(coeffs: (i64, i64, i64), s: &Rat) -> Rat {
    let (a, b, c) = coeffs;
    rat(a) * s * s + rat(b) * s + rat(c)
}

/// Brackets both real roots of the fixed-slope quadratic inside intervals of
/// width at most `2 * radius`, scanning rational panels of width `radius`
/// between Cauchy bounds and bisecting each sign change.
fn bracket_fixed_slopes(m: &IntMatrix, radius: &Rat) -> Option<(ProjInterval, ProjInterval)> {
    let coeffs = fixed_slope_quadratic(m);
    let (a2, a1, a0) = coeffs;
    if a2 == 0 {
        return None; // parabolic or affine action; out of scope
    }
    let disc = a1 * a1 - 4 * a2 * a0;
    if disc <= 0 {
        return None; // elliptic or parabolic: no pair of real fixed slopes
    }
    let bound = 2 + a1.abs().max(a0.abs()) / a2.abs().max(1);
    let mut roots = Vec::new();
    let mut prev = rat(-bound);
    let mut prev_val = eval_quadratic(coeffs, &prev);
    loop {
        let cur = &prev + radius;
        let cur_val = eval_quadratic(coeffs, &cur);
        if prev_val.is_zero() {
            // rational root hit exactly
            roots.push((&prev - radius, &prev + radius));
        } else if prev_val.is_positive() != cur_val.is_positive() && !cur_val.is_zero() {
            roots.push((prev.clone(), cur.clone()));
        }
        prev = cur;
        prev_val = cur_val;
        if prev > rat(bound) {
            break;
        }
    }
    if roots.len() != 2 {
        return None; // roots too close to isolate at this radius
    }
    let two = rat(2);
    let mut intervals = Vec::new();
    for (mut lo, mut hi) in roots {
        let width_cap = radius + radius;
        while &hi - &lo > width_cap {
            let mid = (&lo + &hi) / &two;
            let val = eval_quadratic(coeffs, &mid);
            if val.is_zero() {
                lo = &mid - radius;
                hi = &mid + radius;
                break;
            }
            let lo_val = eval_quadratic(coeffs, &lo);
            if lo_val.is_positive() != val.is_positive() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        intervals.push(ProjInterval::new(lo, hi));
    }
    let mut it = intervals.into_iter();
    Some((it.next().unwrap(), it.next().unwrap()))
}

/// Searches `N = 1..=max_n` for a replayable certificate, proposing bracket
/// domains of shrinking radius around the fixed slopes and trying both
/// attracting/repelling labelings. Deterministic; returns the first success.
pub fn pingpong_search(
    a: &IntMatrix,
    b: &IntMatrix,
    max_n: u32,
) -> Result<Option<PingPongCertificate>, AutError> {
    check_det(a)?;
    check_det(b)?;
    let radii: Vec<Rat> = (1..=6)
        .map(|k| Ratio::new(BigInt::from(1), BigInt::from(1i64 << k)))
        .collect();
    for n in 1..=max_n {
        for radius in &radii {
            let Some((a1, a2)) = bracket_fixed_slopes(a, radius) else {
                continue;
            };
            let Some((b1, b2)) = bracket_fixed_slopes(b, radius) else {
                continue;
            };
            for a_swap in [false, true] {
                for b_swap in [false, true] {
                    let domain_a = if a_swap {
                        IntervalPair {
                            attracting: a2.clone(),
                            repelling: a1.clone(),
                        }
                    } else {
                        IntervalPair {
                            attracting: a1.clone(),
                            repelling: a2.clone(),
                        }
                    };
                    let domain_b = if b_swap {
                        IntervalPair {
                            attracting: b2.clone(),
                            repelling: b1.clone(),
                        }
                    } else {
                        IntervalPair {
                            attracting: b1.clone(),
                            repelling: b2.clone(),
                        }
                    };
                    let (ok, inclusions) = pingpong_verify(a, b, n, &domain_a, &domain_b)?;
                    if ok {
                        return Ok(Some(PingPongCertificate {
                            n,
                            domain_a,
                            domain_b,
                            inclusions,
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// The assembled freeness deduction for the automorphism pair at power N.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreenessChain {
    pub n: u32,
    pub steps: Vec<String>,
}

/// Assembles the deduction: ping-pong makes the matrix group free of rank
/// 2; abelianization maps the automorphism pair onto it; free groups are
/// Hopfian, so the surjection from F₂ is an isomorphism.
pub fn freeness_chain(
    a: &IntMatrix,
    b: &IntMatrix,
    cert: Option<&PingPongCertificate>,
) -> Result<FreenessChain, AutError> {
    let cert = cert.ok_or(AutError::MissingCertificate)?;
    if !replay_certificate(a, b, cert)? {
        return Err(AutError::MissingCertificate);
    }
    let n = cert.n;
    let steps = vec![
        format!(
            "ping-pong inclusions verified at power {n}: A^±{n} maps X_B and the nested \
             A-interval into X_A, B^±{n} maps X_A and the nested B-interval into X_B, on \
             disjoint rational domains"
        ),
        format!("hence <A^{n}, B^{n}> is free of rank 2 (ping-pong lemma)"),
        format!(
            "abelianization sends φ₁^{n}, ψ₁^{n} to A^{n}, B^{n}, so the composite \
             F₂ -> <φ₁^{n}, ψ₁^{n}> -> <A^{n}, B^{n}> ≅ F₂ is surjective"
        ),
        format!(
            "free groups are Hopfian: the surjection F₂ -> F₂ is an isomorphism, so the \
             composite is injective; therefore <φ₁^{n}, ψ₁^{n}> is free of rank 2"
        ),
    ];
    Ok(FreenessChain { n, steps })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_a() -> IntMatrix {
        IntMatrix::from_rows(vec![vec![2, 1], vec![1, 1]])
    }

    fn paper_b() -> IntMatrix {
        IntMatrix::from_rows(vec![vec![1, 1], vec![1, 2]])
    }

    #[test]
    fn mobius_action_on_slopes() {
        // A = [2 1; 1 1] sends slope 0 to 1 and 1 to 3/2
        let a = paper_a();
        assert_eq!(mobius(&a, &rat(0)), Some(rat(1)));
        assert_eq!(
            mobius(&a, &rat(1)),
            Some(Ratio::new(BigInt::from(3), BigInt::from(2)))
        );
    }

    #[test]
    fn pole_inside_interval_is_rejected() {
        // A^-1 = [1 -1; -1 2] has pole at s = 2
        let a_inv = paper_a().inverse2().unwrap();
        let iv = ProjInterval::new(rat(1), rat(3));
        assert!(mobius_interval(&a_inv, &iv).is_none());
    }

    #[test]
    fn fixed_slopes_are_bracketed() {
        let r = Ratio::new(BigInt::from(1), BigInt::from(4));
        let (i1, i2) = bracket_fixed_slopes(&paper_a(), &r).unwrap();
        // golden ratio and its negative inverse
        let phi_lo = Ratio::new(BigInt::from(16), BigInt::from(10));
        let phi_hi = Ratio::new(BigInt::from(17), BigInt::from(10));
        let brackets_phi = |iv: &ProjInterval| iv.lo < phi_lo && phi_hi < iv.hi;
        assert!(brackets_phi(&i1) ^ brackets_phi(&i2));
        assert!(i1.disjoint(&i2));
    }

    #[test]
    fn search_finds_a_small_power() {
        let cert = pingpong_search(&paper_a(), &paper_b(), 16)
            .unwrap()
            .expect("certificate exists for the golden pair");
        assert!(cert.n <= 16);
        assert!(replay_certificate(&paper_a(), &paper_b(), &cert).unwrap());
        assert!(cert.inclusions.iter().all(|c| c.holds));
    }

    #[test]
    fn equal_matrices_never_certify() {
        let cert = pingpong_search(&paper_a(), &paper_a(), 8).unwrap();
        assert!(cert.is_none());
    }

    #[test]
    fn chain_requires_a_certificate() {
        assert!(matches!(
            freeness_chain(&paper_a(), &paper_b(), None),
            Err(AutError::MissingCertificate)
        ));
        let cert = pingpong_search(&paper_a(), &paper_b(), 16)
            .unwrap()
            .unwrap();
        let chain = freeness_chain(&paper_a(), &paper_b(), Some(&cert)).unwrap();
        assert_eq!(chain.n, cert.n);
        assert!(chain.steps.iter().any(|s| s.contains("Hopfian")));
        assert!(chain.steps.iter().any(|s| s.contains("ping-pong")));
    }

    #[test]
    fn non_invertible_matrices_are_rejected() {
        let m = IntMatrix::from_rows(vec![vec![2, 0], vec![0, 2]]);
        assert!(matches!(
            pingpong_search(&m, &paper_b(), 4),
            Err(AutError::NonInvertible(4))
        ));
    }

    #[test]
    fn certificate_json_round_trip() {
        let cert = pingpong_search(&paper_a(), &paper_b(), 16)
            .unwrap()
            .unwrap();
        let json = serde_json::to_string(&cert).unwrap();
        let back: PingPongCertificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cert);
        assert!(replay_certificate(&paper_a(), &paper_b(), &back).unwrap());
    }
}
