//! Freely reduced words over a ranked alphabet with formal inverses.
//!
//! Shared by the semidirect-product arithmetic (words over `a`, `b`) and the
//! free-group endomorphism algebra (words over `x1..xk`).

/// One letter of a word: a generator index and an inversion flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: u16,
    pub inv: bool,
}

impl Letter {
    pub fn new(gen: u16, inv: bool) -> Self {
        Letter { gen, inv }
    }

    pub fn inverse(self) -> Self {
        Letter {
            gen: self.gen,
            inv: !self.inv,
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.inv != other.inv
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeWord {
    letters: Vec<Letter>,
}

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord::default()
    }

    pub fn generator(gen: u16) -> Self {
        FreeWord {
            letters: vec![Letter::new(gen, false)],
        }
    }

    /// Builds a word from arbitrary letters, performing free reduction.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            match out.last() {
                Some(&last) if last.cancels(l) => {
                    out.pop();
                }
                _ => out.push(l),
            }
        }
        FreeWord { letters: out }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &FreeWord) -> FreeWord {
        FreeWord::from_letters(self.letters.iter().chain(other.letters.iter()).copied())
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn pow(&self, n: i64) -> FreeWord {
        let base = if n >= 0 { self.clone() } else { self.inverse() };
        let mut out = FreeWord::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// Sum of exponents over all generators.
    pub fn exponent_sum(&self) -> i64 {
        self.letters
            .iter()
            .map(|l| if l.inv { -1i64 } else { 1 })
            .sum()
    }

    /// Sum of exponents of a single generator.
    pub fn exponent_sum_of(&self, gen: u16) -> i64 {
        self.letters
            .iter()
            .filter(|l| l.gen == gen)
            .map(|l| if l.inv { -1i64 } else { 1 })
            .sum()
    }

    pub fn max_generator(&self) -> Option<u16> {
        self.letters.iter().map(|l| l.gen).max()
    }

    /// Relabels generators letter-by-letter (used for involutions like `a <-> b`).
    pub fn map_generators(&self, f: impl Fn(u16) -> u16) -> FreeWord {
        FreeWord::from_letters(self.letters.iter().map(|l| Letter::new(f(l.gen), l.inv)))
    }

    /// Substitutes each generator by its image word and reduces.
    pub fn substitute(&self, images: &[FreeWord]) -> FreeWord {
        let mut out = FreeWord::identity();
        for l in &self.letters {
            let img = &images[l.gen as usize];
            if l.inv {
                out = out.concat(&img.inverse());
            } else {
                out = out.concat(img);
            }
        }
        out
    }

    /// Splits `w` as `p r p^{-1}` with `r` cyclically reduced; returns `(p, r)`.
    pub fn cyclic_reduce(&self) -> (FreeWord, FreeWord) {
        let mut core = self.letters.clone();
        let mut prefix = Vec::new();
        while core.len() >= 2 {
            let first = core[0];
            let last = *core.last().unwrap();
            if first.cancels(last) {
                prefix.push(first);
                core.remove(0);
                core.pop();
            } else {
                break;
            }
        }
        (FreeWord { letters: prefix }, FreeWord { letters: core })
    }

    pub fn prefix(&self, n: usize) -> FreeWord {
        FreeWord {
            letters: self.letters[..n.min(self.letters.len())].to_vec(),
        }
    }
}

/// All freely reduced words of exactly `len` letters over `rank` generators,
/// in lexicographic order (`x1 < x1^-1 < x2 < ...`).
pub fn reduced_words_of_length(rank: u16, len: usize) -> Vec<FreeWord> {
    let alphabet: Vec<Letter> = (0..rank)
        .flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
        .collect();
    let mut out = vec![FreeWord::identity()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * (2 * rank as usize - 1).max(1));
        for w in &out {
            for &l in &alphabet {
                if w.letters.last().is_none_or(|&last| !last.cancels(l)) {
                    let mut letters = w.letters.clone();
                    letters.push(l);
                    next.push(FreeWord { letters });
                }
            }
        }
        out = next;
    }
    out
}
