//! The two-map system on R² with `f₁(x,y) = (x, y/2)`,
//! `f₂(x,y) = (x, y/2 + 1/2)`, grey maps `ρ₁(t) = t`, `ρ₂(t) = 3t/4`, and a
//! closed-form oracle for its iterates built by enumerating words.
//!
//! On the vertical line through `x`, `Zⁿ(u₀)` for `u₀ = 1` at `(x, 0)` is
//! `y ↦ max{(3/4)^{η(α)} : p(α) = y, |α| ≤ n}` where
//! `p(α) = Σ_k (α_k − 1)/2^k` and `η(α)` counts the letters equal to 2.

use std::collections::BTreeMap;

use crate::codespace::Word;
use crate::error::{Error, Result};
use crate::fuzzy::{FuzzySet, GreyLevelMap};
use crate::geometry::Point;
use crate::ifs::{AffineMap, IteratedFunctionSystem};
use crate::operator::OrbitalFuzzySystem;
use crate::scalar::{Rational, Scalar};

pub fn f1<S: Scalar>() -> AffineMap<S> {
    AffineMap::new(
        vec![
            vec![S::one(), S::zero()],
            vec![S::zero(), S::from_ratio(1, 2)],
        ],
        vec![S::zero(), S::zero()],
    )
    .expect("2x2")
}

pub fn f2<S: Scalar>() -> AffineMap<S> {
    AffineMap::new(
        vec![
            vec![S::one(), S::zero()],
            vec![S::zero(), S::from_ratio(1, 2)],
        ],
        vec![S::zero(), S::from_ratio(1, 2)],
    )
    .expect("2x2")
}

/// Crisp system with declared constant `C = 1/2`.
pub fn system<S: Scalar>() -> IteratedFunctionSystem<S> {
    IteratedFunctionSystem::new(vec![f1(), f2()], S::from_ratio(1, 2)).expect("valid system")
}

pub fn grey_maps<S: Scalar>() -> Vec<GreyLevelMap<S>> {
    vec![
        GreyLevelMap::identity(),
        GreyLevelMap::scaled(S::from_ratio(3, 4)).expect("3t/4"),
    ]
}

pub fn fuzzy_system<S: Scalar>() -> OrbitalFuzzySystem<S> {
    OrbitalFuzzySystem::new(system(), grey_maps()).expect("admissible")
}

/// Level 1 at `(x, 0)` for each sampled `x`.
pub fn initial_segment<S: Scalar>(xs: &[S]) -> FuzzySet<S> {
    FuzzySet::new(
        xs.iter()
            .map(|x| (Point::new(vec![x.clone(), S::zero()]), S::one())),
    )
    .expect("nonempty sample")
}

fn check_binary(word: &Word) -> Result<()> {
    word.validate(2)
}

/// `p(α) = Σ_{k=1}^{|α|} (α_k − 1)/2^k`.
pub fn example_p(word: &Word) -> Result<Rational> {
    check_binary(word)?;
    let mut acc = Rational::zero();
    let mut weight = Rational::one();
    let half = Rational::from_ratio(1, 2);
    for &l in word.letters() {
        weight *= half.clone();
        if l == 2 {
            acc += weight.clone();
        }
    }
    Ok(acc)
}

/// Number of letters equal to 2.
pub fn example_eta(word: &Word) -> usize {
    word.letters().iter().filter(|&&l| l == 2).count()
}

fn level_for(word: &Word) -> Rational {
    Rational::from_ratio(3, 4).powi(example_eta(word) as u32)
}

/// `max{(3/4)^{η(α)} : p(α) = y, |α| ≤ n}`, or 0 when no word reaches `y`.
pub fn example_zn_closed_form(y: &Rational, n: usize) -> Rational {
    Word::all_up_to(2, n)
        .filter(|w| example_p(w).is_ok_and(|p| p == *y))
        .map(|w| level_for(&w))
        .max()
        .unwrap_or_else(Rational::zero)
}

/// The closed form at every reachable `y` for words of length ≤ `n`.
pub fn example_zn_table(n: usize) -> BTreeMap<Rational, Rational> {
    let mut table = BTreeMap::new();
    for w in Word::all_up_to(2, n) {
        let p = example_p(&w).expect("binary word");
        let level = level_for(&w);
        let slot = table.entry(p).or_insert_with(Rational::zero);
        if level > *slot {
            *slot = level;
        }
    }
    table
}

/// First disagreement between the engine and the closed form.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleMismatch {
    pub n: usize,
    pub y: Rational,
    pub engine: Rational,
    pub oracle: Rational,
}

impl std::fmt::Display for OracleMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "n = {}, y = {}: engine level {} but closed form {}",
            self.n,
            self.y.format(),
            self.engine.format(),
            self.oracle.format()
        )
    }
}

/// Runs `sys` from `u₀ = 1` at `(x, 0)` and compares `Zⁿ(u₀)` with the
/// closed form for `n = 0..=n_max`, pointwise on the union of both supports.
pub fn oracle_equivalence(
    sys: &OrbitalFuzzySystem<Rational>,
    x: &Rational,
    n_max: usize,
) -> Result<std::result::Result<(), OracleMismatch>> {
    let mut u = initial_segment(std::slice::from_ref(x));
    for n in 0..=n_max {
        if n > 0 {
            u = sys.apply_z(&u)?;
        }
        let table = example_zn_table(n);
        for (p, l) in u.iter() {
            if p.coords()[0] != *x {
                return Err(Error::InvalidSystem(
                    "iterate left the vertical line".into(),
                ));
            }
            let y = &p.coords()[1];
            let oracle = table.get(y).cloned().unwrap_or_else(Rational::zero);
            if *l != oracle {
                return Ok(Err(OracleMismatch {
                    n,
                    y: y.clone(),
                    engine: l.clone(),
                    oracle,
                }));
            }
        }
        for (y, oracle) in &table {
            let engine = u.level(&Point::new(vec![x.clone(), y.clone()]));
            if engine != *oracle {
                return Ok(Err(OracleMismatch {
                    n,
                    y: y.clone(),
                    engine,
                    oracle: oracle.clone(),
                }));
            }
        }
    }
    Ok(Ok(()))
}

/// The system with `ρ₂` replaced by `t/2`; used to show the oracle check is
/// not vacuous.
pub fn faulty_fuzzy_system() -> OrbitalFuzzySystem<Rational> {
    OrbitalFuzzySystem::new(
        system(),
        vec![
            GreyLevelMap::identity(),
            GreyLevelMap::scaled(Rational::from_ratio(1, 2)).expect("t/2"),
        ],
    )
    .expect("admissible")
}
