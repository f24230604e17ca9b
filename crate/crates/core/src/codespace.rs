//! Words over the index set `I = {1..N}` and the code-space metric `d_c`.

use std::fmt;

use crate::error::{Error, Result};
use crate::ifs::AffineMap;
use crate::scalar::Scalar;

/// A finite word; letters are 1-based indices. The empty word is allowed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<u32>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `[ω]_n`: the first `min(n, |ω|)` letters.
    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn validate(&self, alphabet: usize) -> Result<()> {
        match self.0.iter().find(|&&l| l == 0 || l as usize > alphabet) {
            Some(&letter) => Err(Error::LetterOutOfRange { letter, alphabet }),
            None => Ok(()),
        }
    }

    /// All words of length exactly `len` over `{1..alphabet}`, in
    /// lexicographic order.
    pub fn all_of_length(alphabet: u32, len: usize) -> impl Iterator<Item = Word> {
        let total = (alphabet as u64).pow(len as u32);
        (0..total).map(move |mut code| {
            let mut letters = vec![0; len];
            for slot in letters.iter_mut().rev() {
                *slot = (code % alphabet as u64) as u32 + 1;
                code /= alphabet as u64;
            }
            Word(letters)
        })
    }

    /// All words of length ≤ `max_len`, shortest first.
    pub fn all_up_to(alphabet: u32, max_len: usize) -> impl Iterator<Item = Word> {
        (0..=max_len).flat_map(move |n| Word::all_of_length(alphabet, n))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "λ");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct CodeMetricParams<S> {
    c: S,
    truncation_depth: usize,
}

impl<S: Scalar> CodeMetricParams<S> {
    pub fn new(c: S, truncation_depth: usize) -> Result<Self> {
        if c < S::zero() || c >= S::one() {
            return Err(Error::ContractionOutOfRange(c.to_f64()));
        }
        if truncation_depth == 0 {
            return Err(Error::InvalidSystem(
                "truncation depth must be positive".into(),
            ));
        }
        Ok(CodeMetricParams {
            c,
            truncation_depth,
        })
    }

    pub fn c(&self) -> &S {
        &self.c
    }

    pub fn truncation_depth(&self) -> usize {
        self.truncation_depth
    }
}

/// Enclosure of `d_c` for words read as truncations of infinite words.
#[derive(Clone, Debug, PartialEq)]
pub struct DcInterval<S> {
    pub lower: S,
    pub upper: S,
}

/// `d_c(α,β) = Σ_{n≥1} c^n (1 − δ(α_n, β_n))`, summed over positions
/// `1..=depth`, plus the tail bound `c^{depth+1}/(1−c)` for the upper end.
///
/// A position past the end of either word counts as a mismatch.
pub fn dc_distance<S: Scalar>(
    alpha: &Word,
    beta: &Word,
    params: &CodeMetricParams<S>,
) -> DcInterval<S> {
    let c = params.c.clone();
    let mut lower = S::zero();
    let mut weight = S::one();
    for n in 0..params.truncation_depth {
        weight = weight * c.clone();
        let differs = match (alpha.0.get(n), beta.0.get(n)) {
            (Some(a), Some(b)) => a != b,
            _ => true,
        };
        if differs {
            lower = lower + weight.clone();
        }
    }
    let tail = weight * c.clone() / (S::one() - c);
    DcInterval {
        upper: lower.clone() + tail,
        lower,
    }
}

/// `f_ω = f_{ω₁} ∘ … ∘ f_{ω_n}`; the empty word gives the identity.
pub fn compose_along_word<S: Scalar>(maps: &[AffineMap<S>], word: &Word) -> Result<AffineMap<S>> {
    let first = maps
        .first()
        .ok_or_else(|| Error::InvalidSystem("no maps".into()))?;
    word.validate(maps.len())?;
    let mut acc = AffineMap::identity(first.dim());
    for &l in word.letters() {
        acc = acc.compose(&maps[l as usize - 1])?;
    }
    Ok(acc)
}
