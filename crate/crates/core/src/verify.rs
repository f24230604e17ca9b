//! Randomized property suites and the oracle comparison run by the `verify`
//! command and the acceptance tests.
//!
//! Every suite draws its cases from a seeded [`StdRng`], so a failure can be
//! replayed from the reported seed.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::error::Result;
use crate::example;
use crate::fuzzy::{
    apply_grey_to_fuzzy, d_infinity, d_infinity_level_sweep, join, zadeh_pushforward, FuzzySet,
    GreyLevelMap, Knot,
};
use crate::geometry::{
    diameter, directed_distance, directed_distance_brute, hausdorff, hausdorff_brute, Distance,
    FinitePointSet, Point,
};
use crate::ifs::{AffineMap, IteratedFunctionSystem};
use crate::operator::{Membership, OrbitalFuzzySystem};
use crate::scalar::{Rational, Scalar};

/// Outcome of one suite.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Description of the first failing case.
    pub first_failure: Option<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

impl std::fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status} {:<28} {} cases, {} failures",
            self.name, self.cases, self.failures
        )?;
        if let Some(msg) = &self.first_failure {
            write!(f, " (first: {msg})")?;
        }
        Ok(())
    }
}

type Case = std::result::Result<(), String>;

fn suite_rng(seed: u64, name: &str) -> StdRng {
    let salt = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x100_0000_01b3)
    });
    StdRng::seed_from_u64(seed ^ salt)
}

/// Runs `cases` draws of `case`; library errors count as failures.
pub fn run_suite(
    name: &'static str,
    cases: usize,
    seed: u64,
    mut case: impl FnMut(&mut StdRng) -> Result<Case>,
) -> SuiteResult {
    let mut rng = suite_rng(seed, name);
    let mut failures = 0;
    let mut first_failure = None;
    for i in 0..cases {
        let outcome = match case(&mut rng) {
            Ok(r) => r,
            Err(e) => Err(format!("error: {e}")),
        };
        if let Err(msg) = outcome {
            failures += 1;
            first_failure.get_or_insert_with(|| format!("case {i}: {msg}"));
        }
    }
    SuiteResult {
        name,
        cases,
        failures,
        first_failure,
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn expect(cond: bool, msg: impl FnOnce() -> String) -> Case {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------------------
// generators

/// Point with coordinates `k/8`, `|k| ≤ 16`.
pub fn random_point(rng: &mut impl Rng, dim: usize) -> Point<Rational> {
    Point::new((0..dim).map(|_| q(rng.gen_range(-16..=16), 8)).collect())
}

/// Between 1 and `max` points.
pub fn random_point_set(rng: &mut impl Rng, dim: usize, max: usize) -> FinitePointSet<Rational> {
    let n = rng.gen_range(1..=max);
    FinitePointSet::new((0..n).map(|_| random_point(rng, dim))).expect("nonempty")
}

/// Between 1 and `max` points with levels `k/8`; one point is lifted to 1
/// when `normal` is set.
pub fn random_fuzzy_set(
    rng: &mut impl Rng,
    dim: usize,
    max: usize,
    normal: bool,
) -> FuzzySet<Rational> {
    let n = rng.gen_range(1..=max);
    let mut pairs: Vec<_> = (0..n)
        .map(|_| (random_point(rng, dim), q(rng.gen_range(1..=8), 8)))
        .collect();
    if normal {
        let k = rng.gen_range(0..n);
        pairs[k].1 = Rational::one();
    }
    FuzzySet::new(pairs).expect("positive levels")
}

/// Nondecreasing right-continuous map with `ρ(0) = 0`, built from up to three
/// interior knots at multiples of `1/8` with optional jumps. With `reach_one`
/// the map ends at `ρ(1) = 1`.
pub fn random_grey_map(rng: &mut impl Rng, reach_one: bool) -> GreyLevelMap<Rational> {
    let mut ts: Vec<i64> = (1..8).collect();
    ts.shuffle(rng);
    let mut interior: Vec<i64> = ts[..rng.gen_range(0..=3)].to_vec();
    interior.sort_unstable();
    let mut knots = vec![Knot {
        t: Rational::zero(),
        left: Rational::zero(),
        value: Rational::zero(),
    }];
    let mut level = 0i64;
    for t in interior.into_iter().chain([8]) {
        let left = (level + rng.gen_range(0..=3)).min(8);
        let value = if rng.gen_bool(0.4) {
            (left + rng.gen_range(1..=3)).min(8)
        } else {
            left
        };
        knots.push(Knot {
            t: q(t, 8),
            left: q(left, 8),
            value: q(value, 8),
        });
        level = value;
    }
    let last = knots.last_mut().expect("t = 1 knot");
    if reach_one || last.value.is_zero_value() {
        last.value = Rational::one();
    }
    GreyLevelMap::new(knots).expect("valid layout")
}

/// Affine map with entries `k/8`, `|k| ≤ 3`; its Frobenius norm, hence its
/// Lipschitz constant, is at most `3/4` in two dimensions.
pub fn random_affine_map(rng: &mut impl Rng, dim: usize) -> AffineMap<Rational> {
    let linear = (0..dim)
        .map(|_| (0..dim).map(|_| q(rng.gen_range(-3..=3), 8)).collect())
        .collect();
    let offset = (0..dim).map(|_| q(rng.gen_range(-8..=8), 8)).collect();
    AffineMap::new(linear, offset).expect("square")
}

/// Admissible planar system of 1 to 3 random maps, declared contraction `3/4`.
pub fn random_fuzzy_system(rng: &mut impl Rng) -> OrbitalFuzzySystem<Rational> {
    let n = rng.gen_range(1..=3);
    let maps = (0..n).map(|_| random_affine_map(rng, 2)).collect();
    let one = rng.gen_range(0..n);
    let greys = (0..n).map(|i| random_grey_map(rng, i == one)).collect();
    let ifs = IteratedFunctionSystem::new(maps, q(3, 4)).expect("C < 1");
    OrbitalFuzzySystem::new(ifs, greys).expect("admissible by construction")
}

/// Float system whose maps have spectral norm at most `c`, where `c` is drawn
/// from `(0, 0.9]` and declared as the contraction constant.
pub fn random_float_system(rng: &mut impl Rng) -> OrbitalFuzzySystem<f64> {
    let n = rng.gen_range(1..=3);
    let c: f64 = rng.gen_range(0.05..=0.9);
    let maps = (0..n)
        .map(|_| {
            let mut a: Vec<Vec<f64>> = (0..2)
                .map(|_| (0..2).map(|_| rng.gen_range(-1.0..=1.0)).collect())
                .collect();
            let norm = spectral_norm_2x2(&a);
            let target = c * rng.gen_range(0.1..=1.0);
            if norm > 0.0 {
                for row in &mut a {
                    for v in row.iter_mut() {
                        *v *= target / norm;
                    }
                }
            }
            let b = (0..2).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            AffineMap::new(a, b).expect("square")
        })
        .collect();
    let one = rng.gen_range(0..n);
    let greys = (0..n)
        .map(|i| to_float_grey(&random_grey_map(rng, i == one)))
        .collect();
    let ifs = IteratedFunctionSystem::new(maps, c).expect("C < 1");
    OrbitalFuzzySystem::new(ifs, greys).expect("admissible by construction")
}

/// Largest singular value of a 2×2 matrix.
pub fn spectral_norm_2x2(a: &[Vec<f64>]) -> f64 {
    // eigenvalues of AᵀA = [[p, r], [r, s]]
    let p = a[0][0] * a[0][0] + a[1][0] * a[1][0];
    let s = a[0][1] * a[0][1] + a[1][1] * a[1][1];
    let r = a[0][0] * a[0][1] + a[1][0] * a[1][1];
    let mean = (p + s) / 2.0;
    let radius = (((p - s) / 2.0).powi(2) + r * r).sqrt();
    (mean + radius).sqrt()
}

fn to_float_grey(rho: &GreyLevelMap<Rational>) -> GreyLevelMap<f64> {
    GreyLevelMap::new(
        rho.knots()
            .iter()
            .map(|k| Knot {
                t: k.t.to_f64(),
                left: k.left.to_f64(),
                value: k.value.to_f64(),
            })
            .collect(),
    )
    .expect("same layout")
}

fn dist_text(d: &Distance<Rational>) -> String {
    format!("{:.6}", d.value())
}

// ---------------------------------------------------------------------------
// geometry

pub fn union_bound(trials: usize, seed: u64) -> SuiteResult {
    run_suite("union_bound", trials, seed, |rng| {
        let k = rng.gen_range(1..=3);
        let a: Vec<_> = (0..k).map(|_| random_point_set(rng, 2, 5)).collect();
        let b: Vec<_> = (0..k).map(|_| random_point_set(rng, 2, 5)).collect();
        let lhs = hausdorff(
            &FinitePointSet::union_all(&a)?,
            &FinitePointSet::union_all(&b)?,
        )?;
        let mut rhs = Distance::zero();
        for (x, y) in a.iter().zip(&b) {
            rhs = rhs.max(hausdorff(x, y)?);
        }
        Ok(expect(lhs <= rhs, || {
            format!("h(∪A,∪B) = {} > {}", dist_text(&lhs), dist_text(&rhs))
        }))
    })
}

pub fn diameter_bound(trials: usize, seed: u64) -> SuiteResult {
    run_suite("diameter_bound", trials, seed, |rng| {
        let a = random_point_set(rng, 2, 6);
        let b = random_point_set(rng, 2, 6);
        let h = hausdorff(&a, &b)?;
        let d = diameter(&a.union(&b)?);
        Ok(expect(h <= d, || {
            format!("h = {} > diam = {}", dist_text(&h), dist_text(&d))
        }))
    })
}

pub fn hausdorff_matches_brute_force(trials: usize, seed: u64) -> SuiteResult {
    run_suite("hausdorff_vs_brute_force", trials, seed, |rng| {
        let dim = rng.gen_range(1..=3);
        let a = random_point_set(rng, dim, 12);
        let b = random_point_set(rng, dim, 12);
        let fast = hausdorff(&a, &b)?;
        let slow = hausdorff_brute(&a, &b)?;
        let directed = directed_distance(&a, &b)? == directed_distance_brute(&a, &b)?;
        Ok(expect(fast == slow && directed, || {
            format!("fast {} vs brute {}", dist_text(&fast), dist_text(&slow))
        }))
    })
}

pub fn metric_axioms(trials: usize, seed: u64) -> SuiteResult {
    run_suite("metric_axioms", trials, seed, |rng| {
        let a = random_point_set(rng, 2, 5);
        let b = random_point_set(rng, 2, 5);
        let c = random_point_set(rng, 2, 5);
        let ab = hausdorff(&a, &b)?;
        let ba = hausdorff(&b, &a)?;
        let ac = hausdorff(&a, &c)?;
        let cb = hausdorff(&c, &b)?;
        if !hausdorff(&a, &a)?.is_zero() {
            return Ok(Err("h(A,A) ≠ 0".into()));
        }
        if ab != ba {
            return Ok(Err("h not symmetric".into()));
        }
        if ab.is_zero() != (a == b) {
            return Ok(Err("h(A,B) = 0 disagrees with A = B".into()));
        }
        Ok(expect(ab.le_sum(&ac, &cb), || {
            format!(
                "triangle: {} > {} + {}",
                dist_text(&ab),
                dist_text(&ac),
                dist_text(&cb)
            )
        }))
    })
}

// ---------------------------------------------------------------------------
// fuzzy sets

/// `d∞` three ways: the nearest-point identity, the sweep over present
/// levels, and a sweep over every `α = k/64`.
pub fn level_sweep_equality(trials: usize, seed: u64) -> SuiteResult {
    run_suite("level_sweep_equality", trials, seed, |rng| {
        let u = random_fuzzy_set(rng, 2, 6, true);
        let v = random_fuzzy_set(rng, 2, 6, true);
        let fast = d_infinity(&u, &v)?;
        let sweep = d_infinity_level_sweep(&u, &v)?;
        let mut dense = Distance::zero();
        for k in 1..=64 {
            let alpha = q(k, 64);
            dense = dense.max(hausdorff(&u.alpha_cut(&alpha)?, &v.alpha_cut(&alpha)?)?);
        }
        Ok(expect(fast == sweep && sweep == dense, || {
            format!(
                "fast {} sweep {} dense {}",
                dist_text(&fast),
                dist_text(&sweep),
                dist_text(&dense)
            )
        }))
    })
}

pub fn d_infinity_diameter_bound(trials: usize, seed: u64) -> SuiteResult {
    run_suite("d_infinity_diameter_bound", trials, seed, |rng| {
        let u = random_fuzzy_set(rng, 2, 6, true);
        let v = random_fuzzy_set(rng, 2, 6, true);
        let d = d_infinity(&u, &v)?;
        let diam = diameter(&u.support()?.union(&v.support()?)?);
        Ok(expect(d <= diam, || {
            format!("d∞ = {} > diam = {}", dist_text(&d), dist_text(&diam))
        }))
    })
}

pub fn pushforward_join_exchange(trials: usize, seed: u64) -> SuiteResult {
    run_suite("pushforward_join_exchange", trials, seed, |rng| {
        let f = random_affine_map(rng, 2);
        let us: Vec<_> = (0..rng.gen_range(1..=4))
            .map(|_| random_fuzzy_set(rng, 2, 5, false))
            .collect();
        let lhs = zadeh_pushforward(&f, &join(&us)?)?;
        let images = us
            .iter()
            .map(|u| zadeh_pushforward(&f, u))
            .collect::<Result<Vec<_>>>()?;
        let rhs = join(&images)?;
        Ok(expect(lhs == rhs, || "f(∨u) ≠ ∨f(u)".into()))
    })
}

pub fn join_distance_bound(trials: usize, seed: u64) -> SuiteResult {
    run_suite("join_distance_bound", trials, seed, |rng| {
        let k = rng.gen_range(1..=3);
        let us: Vec<_> = (0..k).map(|_| random_fuzzy_set(rng, 2, 4, true)).collect();
        let vs: Vec<_> = (0..k).map(|_| random_fuzzy_set(rng, 2, 4, true)).collect();
        let lhs = d_infinity(&join(&us)?, &join(&vs)?)?;
        let mut rhs = Distance::zero();
        for (u, v) in us.iter().zip(&vs) {
            rhs = rhs.max(d_infinity(u, v)?);
        }
        Ok(expect(lhs <= rhs, || {
            format!("d∞(∨u,∨v) = {} > {}", dist_text(&lhs), dist_text(&rhs))
        }))
    })
}

pub fn grey_cut_identity(trials: usize, seed: u64) -> SuiteResult {
    run_suite("grey_cut_identity", trials, seed, |rng| {
        let rho = random_grey_map(rng, true);
        let u = random_fuzzy_set(rng, 2, 6, true);
        let v = random_fuzzy_set(rng, 2, 6, true);
        let ru = apply_grey_to_fuzzy(&rho, &u)?;
        let rv = apply_grey_to_fuzzy(&rho, &v)?;
        let d = d_infinity(&u, &v)?;
        let mut alphas: Vec<Rational> = (1..=64).map(|k| q(k, 64)).collect();
        alphas.extend(ru.levels().iter().chain(rv.levels()).cloned());
        for alpha in &alphas {
            let beta = rho.level_preimage(alpha)?;
            if ru.alpha_cut(alpha)? != u.alpha_cut(&beta)? {
                return Ok(Err(format!(
                    "[ρ(u)]^{} ≠ [u]^{}",
                    alpha.format(),
                    beta.format()
                )));
            }
            let h = hausdorff(&ru.alpha_cut(alpha)?, &rv.alpha_cut(alpha)?)?;
            if h > d {
                return Ok(Err(format!(
                    "h at α = {} is {} > d∞ = {}",
                    alpha.format(),
                    dist_text(&h),
                    dist_text(&d)
                )));
            }
        }
        Ok(Ok(()))
    })
}

pub fn grey_map_monotone_right_continuous(trials: usize, seed: u64) -> SuiteResult {
    run_suite("grey_map_ndrc", trials, seed, |rng| {
        let reach_one = rng.gen_bool(0.5);
        let rho = random_grey_map(rng, reach_one);
        if !rho.is_ndrc() {
            return Ok(Err(format!(
                "generated map not ndrc: {:?}",
                rho.ndrc_violations()
            )));
        }
        // largest slope bounds how fast ρ(t + ε) approaches ρ(t)
        let slope = rho
            .knots()
            .windows(2)
            .map(|w| (w[1].left.clone() - w[0].value.clone()) / (w[1].t.clone() - w[0].t.clone()))
            .max()
            .unwrap_or_else(Rational::zero);
        let t = q(rng.gen_range(0..1024), 1024);
        let rt = rho.evaluate(&t)?;
        let mut previous: Option<Rational> = None;
        // t is a multiple of 1/1024 and knots of 1/8, so no knot lies in
        // (t, t + ε] once ε < 1/1024
        for k in 0..=30 {
            let eps = Rational::new(1.into(), num_bigint::BigInt::from(1u64) << (11 + k));
            let s = t.clone() + eps.clone();
            if s > Rational::one() {
                continue;
            }
            let rs = rho.evaluate(&s)?;
            if rs < rt || previous.as_ref().is_some_and(|p| rs > *p) {
                return Ok(Err(format!("not nondecreasing near t = {}", t.format())));
            }
            if rs.clone() - rt.clone() > slope.clone() * eps {
                return Ok(Err(format!("not right continuous at t = {}", t.format())));
            }
            previous = Some(rs);
        }
        Ok(Ok(()))
    })
}

pub fn pushforward_keeps_normality(trials: usize, seed: u64) -> SuiteResult {
    run_suite("pushforward_normality", trials, seed, |rng| {
        let f = random_affine_map(rng, 2);
        let u = random_fuzzy_set(rng, 2, 6, true);
        let image = zadeh_pushforward(&f, &u)?;
        Ok(expect(image.is_normal() && image.len() <= u.len(), || {
            "pushforward lost normality or grew the support".into()
        }))
    })
}

// ---------------------------------------------------------------------------
// operator

pub fn support_inclusion(trials: usize, seed: u64) -> SuiteResult {
    run_suite("support_inclusion", trials, seed, |rng| {
        let sys = random_fuzzy_system(rng);
        let u = random_fuzzy_set(rng, 2, 6, true);
        let z = sys.apply_z(&u)?;
        let image = sys.ifs().fractal_operator(&u.support()?)?;
        Ok(expect(z.support()?.is_subset(&image), || {
            "[Z(u)]⁰ ⊄ F_S([u]⁰)".into()
        }))
    })
}

pub fn operator_majorant(trials: usize, seed: u64) -> SuiteResult {
    run_suite("operator_majorant", trials, seed, |rng| {
        let sys = random_fuzzy_system(rng);
        let u = random_fuzzy_set(rng, 2, 5, true);
        let v = random_fuzzy_set(rng, 2, 5, true);
        let lhs = d_infinity(&sys.apply_z(&u)?, &sys.apply_z(&v)?)?;
        let mut rhs = Distance::zero();
        for f in sys.ifs().maps() {
            rhs = rhs.max(d_infinity(
                &zadeh_pushforward(f, &u)?,
                &zadeh_pushforward(f, &v)?,
            )?);
        }
        Ok(expect(lhs <= rhs, || {
            format!("d∞(Zu,Zv) = {} > {}", dist_text(&lhs), dist_text(&rhs))
        }))
    })
}

pub fn iterate_join_exchange(trials: usize, seed: u64) -> SuiteResult {
    run_suite("iterate_join_exchange", trials, seed, |rng| {
        let sys = random_fuzzy_system(rng);
        let us: Vec<_> = (0..rng.gen_range(1..=3))
            .map(|_| random_fuzzy_set(rng, 2, 3, false))
            .collect();
        let n = rng.gen_range(0..=3);
        let lhs = sys.apply_z_n(&join(&us)?, n);
        let parts: Result<Vec<_>> = us.iter().map(|u| sys.apply_z_n(u, n)).collect();
        // a non-normal input can map to the empty set; both sides must agree
        match (lhs, parts) {
            (Ok(l), Ok(p)) => Ok(expect(l == join(&p)?, || format!("Z^{n}(∨u) ≠ ∨Z^{n}(u)"))),
            (Err(_), Err(_)) => Ok(Ok(())),
            (Ok(l), Err(_)) => {
                // some parts vanish; compare against the surviving ones
                let survivors: Vec<_> =
                    us.iter().filter_map(|u| sys.apply_z_n(u, n).ok()).collect();
                Ok(expect(
                    !survivors.is_empty() && l == join(&survivors)?,
                    || format!("Z^{n}(∨u) ≠ ∨Z^{n}(u) over surviving parts"),
                ))
            }
            (Err(e), Ok(_)) => Err(e),
        }
    })
}

/// If `u` passes the orbit-witness test, so does `Z(u)`; checked on the
/// example system with `u` inside the orbit of a base point `(x, 0)`.
pub fn witness_preservation(trials: usize, seed: u64) -> SuiteResult {
    let sys = example::fuzzy_system::<Rational>();
    run_suite("witness_preservation", trials, seed, |rng| {
        let x = q(rng.gen_range(0..=8), 8);
        let base = Point::new(vec![x, Rational::zero()]);
        let orbit = sys
            .ifs()
            .orbit(&FinitePointSet::singleton(base.clone()), 2)?;
        let mut pairs = vec![(base, Rational::one())];
        for p in orbit.points.iter() {
            if rng.gen_bool(0.5) {
                pairs.push((p.clone(), q(rng.gen_range(1..=8), 8)));
            }
        }
        let u = FuzzySet::new(pairs)?;
        let tol = Rational::zero();
        if sys.check_membership_fss(&u, 3, &tol)? != Membership::Yes {
            return Ok(Err("constructed u not recognised".into()));
        }
        let z = sys.apply_z(&u)?;
        Ok(expect(
            sys.check_membership_fss(&z, 4, &tol)? == Membership::Yes,
            || "Z(u) lost its witnesses".into(),
        ))
    })
}

/// Along `u_k = u + (2^{-k}, 0)`, both `d∞(Z u_k, Z u)` and its majorant
/// `max_i d∞(f_i(u_k), f_i(u))` shrink at least like `L · 2^{-k}`.
pub fn operator_continuity(trials: usize, seed: u64) -> SuiteResult {
    run_suite("operator_continuity", trials, seed, |rng| {
        let sys = random_fuzzy_system(rng);
        let u = random_fuzzy_set(rng, 2, 5, true);
        let zu = sys.apply_z(&u)?;
        // Lipschitz constants squared: sum of squared matrix entries
        let lip_sq = sys
            .ifs()
            .maps()
            .iter()
            .map(|f| {
                f.linear()
                    .iter()
                    .flatten()
                    .fold(Rational::zero(), |acc, a| acc + a.clone() * a.clone())
            })
            .max()
            .unwrap_or_else(Rational::zero);
        for k in 0..8 {
            let shift = q(1, 1 << k);
            let uk = FuzzySet::new(u.iter().map(|(p, l)| {
                let c = p.coords();
                (
                    Point::new(vec![c[0].clone() + shift.clone(), c[1].clone()]),
                    l.clone(),
                )
            }))?;
            let step = d_infinity(&uk, &u)?;
            let mut majorant = Distance::zero();
            for f in sys.ifs().maps() {
                majorant = majorant.max(d_infinity(
                    &zadeh_pushforward(f, &uk)?,
                    &zadeh_pushforward(f, &u)?,
                )?);
            }
            let lhs = d_infinity(&sys.apply_z(&uk)?, &zu)?;
            if lhs > majorant {
                return Ok(Err(format!("k = {k}: d∞(Zu_k, Zu) above majorant")));
            }
            if *majorant.squared() > lip_sq.clone() * step.squared().clone() {
                return Ok(Err(format!("k = {k}: majorant above L·d∞(u_k, u)")));
            }
        }
        Ok(Ok(()))
    })
}

// ---------------------------------------------------------------------------
// bounds

/// `d∞(Z^m u, Zⁿ u) ≤ (C^m − Cⁿ)/(1−C) · diam(F_S(supp u) ∪ supp u)` for all
/// `0 ≤ m < n ≤ n_max`, compared exactly on squares.
pub fn cauchy_bound(
    sys: &OrbitalFuzzySystem<Rational>,
    u0: &FuzzySet<Rational>,
    n_max: usize,
) -> Result<SuiteResult> {
    let supp = u0.support()?;
    let diam = diameter(&supp.union(&sys.ifs().fractal_operator(&supp)?)?);
    let mut iterates = vec![u0.clone()];
    for _ in 0..n_max {
        iterates.push(sys.apply_z(iterates.last().expect("nonempty"))?);
    }
    let c = sys.contraction().clone();
    let mut cases = 0;
    let mut failures = 0;
    let mut first_failure = None;
    for m in 0..n_max {
        for n in m + 1..=n_max {
            cases += 1;
            let d = d_infinity(&iterates[m], &iterates[n])?;
            let k = (c.powi(m as u32) - c.powi(n as u32)) / (Rational::one() - c.clone());
            if !d.le_scaled(&k, &diam) {
                failures += 1;
                first_failure.get_or_insert_with(|| {
                    format!(
                        "m = {m}, n = {n}: {} > {}",
                        d.value(),
                        k.to_f64() * diam.value()
                    )
                });
            }
        }
    }
    Ok(SuiteResult {
        name: "cauchy_bound",
        cases,
        failures,
        first_failure,
    })
}

/// `d∞(Z^{n+1}u, Zⁿu) ≤ Cⁿ · d∞(Z(u), u) · (1 + 1e-9)` for `n ≤ n_max`, on
/// random float systems with `u` drawn from one orbit approximation.
pub fn residual_decay(trials: usize, n_max: usize, seed: u64) -> SuiteResult {
    run_suite("residual_decay", trials, seed, |rng| {
        let sys = random_float_system(rng);
        let w = Point::new(vec![rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)]);
        let orbit = sys.ifs().orbit(&FinitePointSet::singleton(w), 2)?;
        let pts = orbit.points.points();
        let k = rng.gen_range(1..=3.min(pts.len()));
        let chosen: Vec<_> = pts.choose_multiple(rng, k).cloned().collect();
        let pairs = chosen.into_iter().enumerate().map(|(i, p)| {
            (
                p,
                if i == 0 {
                    1.0
                } else {
                    rng.gen_range(1..=8) as f64 / 8.0
                },
            )
        });
        let u = FuzzySet::new(pairs)?;
        let c = *sys.contraction();
        let mut cur = u.clone();
        let mut next = sys.apply_z(&cur)?;
        let first = d_infinity(&next, &cur)?.value();
        for n in 0..=n_max {
            let d = d_infinity(&next, &cur)?.value();
            let bound = c.powi(n as i32) * first * (1.0 + 1e-9);
            if d > bound {
                return Ok(Err(format!("n = {n}: {d:e} > {bound:e} (C = {c})")));
            }
            cur = next;
            next = sys.apply_z(&cur)?;
        }
        Ok(Ok(()))
    })
}

/// Engine iterates against the closed form for `n ≤ depth`, one run per
/// sampled `x ∈ {0, 1/8, …, 1}`.
pub fn oracle_suite(sys: &OrbitalFuzzySystem<Rational>, depth: usize) -> Result<SuiteResult> {
    let mut failures = 0;
    let mut first_failure = None;
    let xs: Vec<Rational> = (0..=8).map(|k| q(k, 8)).collect();
    for x in &xs {
        if let Err(m) = example::oracle_equivalence(sys, x, depth)? {
            failures += 1;
            first_failure.get_or_insert_with(|| format!("x = {}: {m}", x.format()));
        }
    }
    Ok(SuiteResult {
        name: "oracle_equivalence",
        cases: xs.len(),
        failures,
        first_failure,
    })
}

// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    /// Cases per randomized suite.
    pub trials: usize,
    /// Iteration depth for the oracle and bound checks.
    pub depth: usize,
    pub seed: u64,
    /// Replace `ρ₂` by `t/2` in the oracle run.
    pub inject_fault: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            trials: 1000,
            depth: 8,
            seed: 0x5eed,
            inject_fault: false,
        }
    }
}

/// Every suite, in a fixed order.
pub fn run_all(cfg: &VerifyConfig) -> Result<Vec<SuiteResult>> {
    let (t, s) = (cfg.trials, cfg.seed);
    let mut out = vec![
        union_bound(t, s),
        diameter_bound(t, s),
        hausdorff_matches_brute_force(t, s),
        metric_axioms(t, s),
        level_sweep_equality(t, s),
        d_infinity_diameter_bound(t, s),
        pushforward_join_exchange(t, s),
        join_distance_bound(t, s),
        grey_cut_identity(t, s),
        grey_map_monotone_right_continuous(t, s),
        pushforward_keeps_normality(t, s),
        support_inclusion(t, s),
        operator_majorant(t, s),
        iterate_join_exchange(t, s),
        witness_preservation(t.min(200), s),
        operator_continuity(t.min(200), s),
    ];
    let sys = example::fuzzy_system::<Rational>();
    let u0 = example::initial_segment(&[q(0, 1), q(1, 2), q(1, 1)]);
    out.push(cauchy_bound(&sys, &u0, cfg.depth.max(1))?);
    out.push(residual_decay(t.min(200), cfg.depth, s));
    let oracle_sys = if cfg.inject_fault {
        example::faulty_fuzzy_system()
    } else {
        sys
    };
    out.push(oracle_suite(&oracle_sys, cfg.depth)?);
    Ok(out)
}
