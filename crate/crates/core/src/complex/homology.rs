//! Reduced integral simplicial homology via Smith normal form.
//!
//! Everything is exact: boundary matrices have `BigInt` entries and the
//! normal form is computed with integer row/column operations only.

use num::bigint::BigInt;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::simplicial::SimplicialComplex;

/// Reduced homology in one dimension: free rank plus elementary divisors > 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub betti: usize,
    #[serde(with = "bigint_strings")]
    pub torsion: Vec<BigInt>,
}

impl HomologyGroup {
    pub fn zero() -> Self {
        HomologyGroup {
            betti: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(betti: usize) -> Self {
        HomologyGroup {
            betti,
            torsion: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }
}

/// Reduced homology in every dimension `0..=dim`; higher dimensions vanish.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyProfile {
    pub reduced: Vec<HomologyGroup>,
}

impl HomologyProfile {
    /// The group in dimension `d` (zero beyond the stored range).
    pub fn group(&self, d: usize) -> HomologyGroup {
        self.reduced
            .get(d)
            .cloned()
            .unwrap_or_else(HomologyGroup::zero)
    }

    pub fn is_zero_through(&self, d: usize) -> bool {
        (0..=d).all(|i| self.group(i).is_zero())
    }

    /// Profile of the n-sphere: zero everywhere except one `Z` in dimension `n`.
    pub fn sphere(n: usize) -> Self {
        let mut reduced = vec![HomologyGroup::zero(); n + 1];
        reduced[n] = HomologyGroup::free(1);
        HomologyProfile { reduced }
    }

    /// Equality up to trailing zero groups.
    pub fn equivalent(&self, other: &HomologyProfile) -> bool {
        let d = self.reduced.len().max(other.reduced.len());
        (0..d).all(|i| self.group(i) == other.group(i))
    }
}

mod bigint_strings {
    use num::bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let strings: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        strings.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let strings: Vec<String> = Vec::deserialize(d)?;
        strings
            .into_iter()
            .map(|x| BigInt::from_str(&x).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Reduced integral homology of a simplicial complex.
pub fn homology(s: &SimplicialComplex) -> HomologyProfile {
    let dim = match s.dim() {
        Some(d) => d,
        None => {
            return HomologyProfile {
                reduced: Vec::new(),
            }
        }
    };
    let by_dim: Vec<Vec<Vec<usize>>> = (0..=dim).map(|d| s.simplices_of_dim(d)).collect();

    // elementary divisors of each boundary map; index d holds del_d for d >= 1,
    // index 0 is the augmentation C_0 -> Z
    let mut divisors: Vec<Vec<BigInt>> = Vec::with_capacity(dim + 2);
    divisors.push(if by_dim[0].is_empty() {
        Vec::new()
    } else {
        vec![BigInt::one()]
    });
    for d in 1..=dim {
        let mat = boundary_matrix(&by_dim[d - 1], &by_dim[d]);
        divisors.push(smith_elementary_divisors(mat));
    }
    divisors.push(Vec::new()); // del_{dim+1} = 0

    let mut reduced = Vec::with_capacity(dim + 1);
    for d in 0..=dim {
        let rank_d = divisors[d].len();
        let rank_up = divisors[d + 1].len();
        let betti = by_dim[d].len() - rank_d - rank_up;
        let torsion: Vec<BigInt> = divisors[d + 1]
            .iter()
            .filter(|x| **x > BigInt::one())
            .cloned()
            .collect();
        reduced.push(HomologyGroup { betti, torsion });
    }
    HomologyProfile { reduced }
}

/// Boundary matrix of `del: C_d -> C_{d-1}` with simplices ordered as given.
fn boundary_matrix(rows: &[Vec<usize>], cols: &[Vec<usize>]) -> Vec<Vec<BigInt>> {
    let row_index = |s: &[usize]| rows.binary_search_by(|r| r.as_slice().cmp(s)).unwrap();
    let mut m = vec![vec![BigInt::zero(); cols.len()]; rows.len()];
    for (j, simplex) in cols.iter().enumerate() {
        for (i, _) in simplex.iter().enumerate() {
            let mut face = simplex.clone();
            face.remove(i);
            let r = row_index(&face);
            m[r][j] = if i % 2 == 0 {
                BigInt::one()
            } else {
                -BigInt::one()
            };
        }
    }
    m
}

/// Nonzero diagonal of the Smith normal form, as a divisibility chain of
/// positive integers. The length is the rank of the matrix.
// indexed access throughout: row operations read one row while writing another
#[allow(clippy::needless_range_loop)]
pub fn smith_elementary_divisors(mut m: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut divisors = Vec::new();
    let mut k = 0usize;
    while k < rows.min(cols) {
        // pick the entry of least absolute value in the remaining block
        let mut pivot: Option<(usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                if !m[i][j].is_zero()
                    && pivot.is_none_or(|(pi, pj)| m[i][j].abs() < m[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let (pi, pj) = match pivot {
            Some(p) => p,
            None => break,
        };
        m.swap(k, pi);
        for row in m.iter_mut() {
            row.swap(k, pj);
        }

        loop {
            // clear column k with row operations
            let mut dirty = false;
            for i in k + 1..rows {
                if !m[i][k].is_zero() {
                    let q = div_round(&m[i][k], &m[k][k]);
                    if !q.is_zero() {
                        for j in k..cols {
                            let sub = &q * &m[k][j];
                            m[i][j] -= sub;
                        }
                    }
                    if !m[i][k].is_zero() {
                        m.swap(k, i); // remainder is strictly smaller; restart
                        dirty = true;
                        break;
                    }
                }
            }
            if dirty {
                continue;
            }
            // clear row k with column operations
            for j in k + 1..cols {
                if !m[k][j].is_zero() {
                    let q = div_round(&m[k][j], &m[k][k]);
                    if !q.is_zero() {
                        for row in m.iter_mut().skip(k) {
                            let sub = &q * &row[k];
                            row[j] -= sub;
                        }
                    }
                    if !m[k][j].is_zero() {
                        for row in m.iter_mut() {
                            row.swap(k, j);
                        }
                        dirty = true;
                        break;
                    }
                }
            }
            if dirty {
                continue;
            }
            // enforce the divisibility chain
            let pivot_val = m[k][k].clone();
            let mut fixed = true;
            'scan: for i in k + 1..rows {
                for j in k + 1..cols {
                    if !(&m[i][j] % &pivot_val).is_zero() {
                        for col in k..cols {
                            let add = m[i][col].clone();
                            m[k][col] += add;
                        }
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        let d = m[k][k].abs();
        divisors.push(d);
        k += 1;
    }
    divisors
}

/// Quotient rounding toward the nearest integer, so the remainder has
/// absolute value at most |b|/2. Keeps entries small during elimination.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    let (q, r) = num::Integer::div_rem(a, b);
    if &r.abs() * &two > b.abs() {
        if (r.sign() == b.sign()) || r.is_zero() {
            q + BigInt::one()
        } else {
            q - BigInt::one()
        }
    } else {
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize, prefix: &str) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn snf_of_known_matrix() {
        let m: Vec<Vec<BigInt>> = vec![big(&[2, 4, 4]), big(&[-6, 6, 12]), big(&[10, 4, 16])];
        assert_eq!(smith_elementary_divisors(m), big(&[2, 2, 156]));
    }

    #[test]
    fn snf_of_zero_and_identity() {
        let z = vec![vec![BigInt::zero(); 3]; 2];
        assert!(smith_elementary_divisors(z).is_empty());
        let id: Vec<Vec<BigInt>> = (0..3)
            .map(|i| (0..3).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect();
        assert_eq!(smith_elementary_divisors(id), big(&[1, 1, 1]));
    }

    /// Row-echelon rank over the rationals; an independent route to the
    /// rank that the divisor count must agree with.
    #[allow(clippy::needless_range_loop)]
    fn rational_rank(m: &[Vec<BigInt>]) -> usize {
        use num::rational::Ratio;
        let mut m: Vec<Vec<Ratio<BigInt>>> = m
            .iter()
            .map(|r| r.iter().map(|x| Ratio::from_integer(x.clone())).collect())
            .collect();
        let rows = m.len();
        let cols = if rows == 0 { 0 } else { m[0].len() };
        let mut rank = 0;
        for col in 0..cols {
            let pivot = (rank..rows).find(|&r| !m[r][col].is_zero());
            let Some(p) = pivot else { continue };
            m.swap(rank, p);
            for r in 0..rows {
                if r != rank && !m[r][col].is_zero() {
                    let factor = &m[r][col] / &m[rank][col];
                    for cc in col..cols {
                        let sub = &factor * &m[rank][cc];
                        m[r][cc] -= sub;
                    }
                }
            }
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }

    #[test]
    fn snf_rank_agrees_with_rational_elimination() {
        // deterministic pseudo-random small matrices
        let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..60 {
            let rows = (next() % 6 + 1) as usize;
            let cols = (next() % 6 + 1) as usize;
            let m: Vec<Vec<BigInt>> = (0..rows)
                .map(|_| {
                    (0..cols)
                        .map(|_| BigInt::from((next() % 11) as i64 - 5))
                        .collect()
                })
                .collect();
            let rank = rational_rank(&m);
            let divisors = smith_elementary_divisors(m);
            assert_eq!(divisors.len(), rank);
            // divisibility chain
            for pair in divisors.windows(2) {
                assert!(
                    (&pair[1] % &pair[0]).is_zero(),
                    "chain broken: {divisors:?}"
                );
            }
            assert!(divisors.iter().all(|d| d > &BigInt::zero()));
        }
    }

    #[test]
    fn circle_has_h1_z() {
        let c = SimplicialComplex::cycle(names(8, "v"));
        let h = homology(&c);
        assert!(h.group(0).is_zero());
        assert_eq!(h.group(1), HomologyGroup::free(1));
        assert!(h.equivalent(&HomologyProfile::sphere(1)));
    }

    #[test]
    fn octahedron_is_a_two_sphere() {
        let part = || SimplicialComplex::discrete(vec!["x".into(), "y".into()]);
        let oct = part().join(&part()).join(&part());
        assert!(homology(&oct).equivalent(&HomologyProfile::sphere(2)));
    }

    #[test]
    fn join_of_two_eight_cycles_is_a_three_sphere() {
        let a = SimplicialComplex::cycle(names(8, "a"));
        let b = SimplicialComplex::cycle(names(8, "b"));
        let h = homology(&a.join(&b));
        assert!(h.is_zero_through(2));
        assert_eq!(h.group(3), HomologyGroup::free(1));
    }

    #[test]
    fn two_points_have_reduced_h0_z() {
        let s = SimplicialComplex::discrete(names(2, "p"));
        let h = homology(&s);
        assert_eq!(h.group(0), HomologyGroup::free(1));
    }

    #[test]
    fn projective_plane_has_z2_torsion() {
        // minimal 6-vertex triangulation of RP^2 (every edge lies in
        // exactly two of these ten triangles)
        let tris = vec![
            vec![0, 1, 3],
            vec![0, 1, 4],
            vec![0, 2, 3],
            vec![0, 2, 5],
            vec![0, 4, 5],
            vec![1, 2, 4],
            vec![1, 2, 5],
            vec![1, 3, 5],
            vec![2, 3, 4],
            vec![3, 4, 5],
        ];
        let s = SimplicialComplex::new(names(6, "p"), tris).unwrap();
        assert_eq!(s.skeleton_edges().len(), 15);
        let h = homology(&s);
        assert!(h.group(0).is_zero());
        assert_eq!(h.group(1).betti, 0);
        assert_eq!(h.group(1).torsion, big(&[2]));
        assert!(h.group(2).is_zero());
    }
}
