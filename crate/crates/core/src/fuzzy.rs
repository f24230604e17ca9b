//! Finitely supported fuzzy sets, grey level maps, α-cuts, the Zadeh
//! pushforward, joins and the `d∞` metric.
//!
//! A [`FuzzySet`] stores only points with strictly positive level; every
//! other point of `R^D` has level 0. Such functions are automatically upper
//! semicontinuous, so no usc check is performed.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::geometry::{check_dim, hausdorff, Distance, FinitePointSet, KdTree, Point, PointIndex};
use crate::ifs::AffineMap;
use crate::scalar::Scalar;

/// One knot of a grey level map: the function jumps from `left` (the left
/// limit) to `value` at `t`, and is linear from `value` to the next knot's
/// `left`.
#[derive(Clone, Debug, PartialEq)]
pub struct Knot<S> {
    pub t: S,
    pub left: S,
    pub value: S,
}

/// Piecewise-linear map `[0,1] → [0,1]` with right-continuous jumps.
///
/// Construction checks the layout (knots strictly increasing from 0 to 1,
/// values in `[0,1]`, not identically zero). Monotonicity is reported by
/// [`GreyLevelMap::ndrc_violations`] so that admissibility checks can list it
/// alongside the other conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct GreyLevelMap<S> {
    knots: Vec<Knot<S>>,
}

impl<S: Scalar> GreyLevelMap<S> {
    pub fn new(mut knots: Vec<Knot<S>>) -> Result<Self> {
        let invalid = |m: &str| Err(Error::InvalidGreyMap(m.to_string()));
        if knots.len() < 2 {
            return invalid("need at least the knots t = 0 and t = 1");
        }
        if knots[0].t != S::zero() {
            return invalid("first knot must be at t = 0");
        }
        if knots[knots.len() - 1].t != S::one() {
            return invalid("last knot must be at t = 1");
        }
        if knots.windows(2).any(|w| w[0].t >= w[1].t) {
            return invalid("knot positions must be strictly increasing");
        }
        let unit = |v: &S| *v >= S::zero() && *v <= S::one();
        if !knots.iter().all(|k| unit(&k.left) && unit(&k.value)) {
            return invalid("values must lie in [0, 1]");
        }
        if knots
            .iter()
            .all(|k| k.value.is_zero_value() && k.left.is_zero_value())
        {
            return invalid("grey level map must be nonzero");
        }
        knots[0].left = knots[0].value.clone();
        Ok(GreyLevelMap { knots })
    }

    /// Continuous piecewise-linear map through `(t, v)` pairs.
    pub fn linear(points: Vec<(S, S)>) -> Result<Self> {
        GreyLevelMap::new(
            points
                .into_iter()
                .map(|(t, v)| Knot {
                    t,
                    left: v.clone(),
                    value: v,
                })
                .collect(),
        )
    }

    pub fn identity() -> Self {
        GreyLevelMap::linear(vec![(S::zero(), S::zero()), (S::one(), S::one())])
            .expect("identity is valid")
    }

    /// `t ↦ k·t` for `k ∈ (0,1]`.
    pub fn scaled(k: S) -> Result<Self> {
        GreyLevelMap::linear(vec![(S::zero(), S::zero()), (S::one(), k)])
    }

    /// `low` on `[0, at)`, `high` on `[at, 1]`.
    pub fn step(at: S, low: S, high: S) -> Result<Self> {
        if at <= S::zero() || at >= S::one() {
            return Err(Error::InvalidGreyMap("step must lie inside (0, 1)".into()));
        }
        GreyLevelMap::new(vec![
            Knot {
                t: S::zero(),
                left: low.clone(),
                value: low.clone(),
            },
            Knot {
                t: at,
                left: low,
                value: high.clone(),
            },
            Knot {
                t: S::one(),
                left: high.clone(),
                value: high,
            },
        ])
    }

    pub fn knots(&self) -> &[Knot<S>] {
        &self.knots
    }

    /// Non-decreasing/right-continuous violations. Right continuity holds by
    /// construction; only monotonicity can fail.
    pub fn ndrc_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, k) in self.knots.iter().enumerate() {
            if k.left > k.value {
                out.push(format!("decreasing jump at t = {}", k.t.format()));
            }
            if let Some(next) = self.knots.get(i + 1) {
                if k.value > next.left {
                    out.push(format!(
                        "decreasing on [{}, {}]",
                        k.t.format(),
                        next.t.format()
                    ));
                }
            }
        }
        out
    }

    pub fn is_ndrc(&self) -> bool {
        self.ndrc_violations().is_empty()
    }

    /// `ρ(t)` for `t ∈ [0,1]`.
    pub fn evaluate(&self, t: &S) -> Result<S> {
        if *t < S::zero() || *t > S::one() {
            return Err(Error::OutOfUnitInterval { value: t.to_f64() });
        }
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: &S) -> S {
        // last knot with knot.t ≤ t
        let k = self
            .knots
            .partition_point(|knot| knot.t <= *t)
            .saturating_sub(1);
        let a = &self.knots[k];
        if a.t == *t || k + 1 == self.knots.len() {
            return a.value.clone();
        }
        let b = &self.knots[k + 1];
        let frac = (t.clone() - a.t.clone()) / (b.t.clone() - a.t.clone());
        a.value.clone() + (b.left.clone() - a.value.clone()) * frac
    }

    pub fn at_zero(&self) -> &S {
        &self.knots[0].value
    }

    pub fn at_one(&self) -> &S {
        &self.knots[self.knots.len() - 1].value
    }

    /// `inf{γ : ρ(γ) ≥ α}` for `α ∈ (0,1]`. Right continuity makes the
    /// infimum attained.
    pub fn level_preimage(&self, alpha: &S) -> Result<S> {
        if *alpha <= S::zero() || *alpha > S::one() {
            return Err(Error::OutOfUnitInterval {
                value: alpha.to_f64(),
            });
        }
        for (k, knot) in self.knots.iter().enumerate() {
            if k > 0 {
                let prev = &self.knots[k - 1];
                // prev.value < α here, otherwise we would have returned
                if knot.left >= *alpha {
                    let rise = knot.left.clone() - prev.value.clone();
                    let run = knot.t.clone() - prev.t.clone();
                    return Ok(prev.t.clone() + (alpha.clone() - prev.value.clone()) * run / rise);
                }
            }
            if knot.value >= *alpha {
                return Ok(knot.t.clone());
            }
        }
        Err(Error::LevelUnreachable {
            alpha: alpha.to_f64(),
        })
    }
}

/// Normal-or-not, finitely supported fuzzy subset of `R^D`.
#[derive(Clone, Debug)]
pub struct FuzzySet<S: Scalar> {
    dim: usize,
    points: Vec<Point<S>>,
    levels: Vec<S>,
    index: PointIndex<S::Key>,
}

impl<S: Scalar> FuzzySet<S> {
    /// Builds a fuzzy set from `(point, level)` pairs. Levels must lie in
    /// `(0, 1]`; repeated points keep the larger level.
    pub fn new(pairs: impl IntoIterator<Item = (Point<S>, S)>) -> Result<Self> {
        let mut out: Option<FuzzySet<S>> = None;
        for (p, level) in pairs {
            if level <= S::zero() || level > S::one() {
                return Err(Error::OutOfUnitInterval {
                    value: level.to_f64(),
                });
            }
            match out.as_mut() {
                Some(u) => {
                    check_dim(u.dim, p.dim())?;
                    u.insert_max(p, level);
                }
                None => {
                    let mut u = FuzzySet::empty(p.dim());
                    u.insert_max(p, level);
                    out = Some(u);
                }
            }
        }
        out.ok_or(Error::EmptySupport)
    }

    /// Level 1 on every point of `set`.
    pub fn crisp(set: &FinitePointSet<S>) -> Self {
        let mut u = FuzzySet::empty(set.dim());
        for p in set.iter() {
            u.insert_max(p.clone(), S::one());
        }
        u
    }

    pub(crate) fn empty(dim: usize) -> Self {
        FuzzySet {
            dim,
            points: Vec::new(),
            levels: Vec::new(),
            index: PointIndex::new(),
        }
    }

    pub(crate) fn with_capacity(dim: usize, n: usize) -> Self {
        FuzzySet {
            dim,
            points: Vec::with_capacity(n),
            levels: Vec::with_capacity(n),
            index: PointIndex::with_capacity(n),
        }
    }

    /// Pointwise max with a single point; levels ≤ 0 are ignored.
    pub(crate) fn insert_max(&mut self, p: Point<S>, level: S) {
        if level <= S::zero() {
            return;
        }
        match self.index.find(&p, &self.points) {
            Some(i) => {
                if level > self.levels[i] {
                    self.levels[i] = level;
                }
            }
            None => {
                self.index.insert(&p, self.points.len());
                self.points.push(p);
                self.levels.push(level);
            }
        }
    }

    pub(crate) fn into_nonempty(self) -> Result<Self> {
        if self.points.is_empty() {
            Err(Error::EmptySupport)
        } else {
            Ok(self)
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point<S>] {
        &self.points
    }

    pub fn levels(&self) -> &[S] {
        &self.levels
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point<S>, &S)> {
        self.points.iter().zip(&self.levels)
    }

    /// `u(p)`, zero off the support.
    pub fn level(&self, p: &Point<S>) -> S {
        if p.dim() != self.dim {
            return S::zero();
        }
        self.index
            .find(p, &self.points)
            .map_or_else(S::zero, |i| self.levels[i].clone())
    }

    pub fn max_level(&self) -> S {
        self.levels
            .iter()
            .cloned()
            .reduce(S::max_of)
            .unwrap_or_else(S::zero)
    }

    pub fn is_normal(&self) -> bool {
        self.levels.iter().any(|l| *l == S::one())
    }

    /// `[u]^0 = supp(u)`.
    pub fn support(&self) -> Result<FinitePointSet<S>> {
        FinitePointSet::new(self.points.iter().cloned())
    }

    /// Distinct levels in decreasing order.
    pub fn distinct_levels(&self) -> Vec<S> {
        let mut v = self.levels.clone();
        sort_desc_dedup(&mut v);
        v
    }

    /// `[u]^α = {x : u(x) ≥ α}` for `α > 0`; the support for `α = 0`.
    pub fn alpha_cut(&self, alpha: &S) -> Result<FinitePointSet<S>> {
        if *alpha < S::zero() || *alpha > S::one() {
            return Err(Error::OutOfUnitInterval {
                value: alpha.to_f64(),
            });
        }
        let pts = self
            .iter()
            .filter(|(_, l)| *alpha <= S::zero() || *l >= alpha)
            .map(|(p, _)| p.clone());
        FinitePointSet::new(pts).map_err(|_| Error::EmptyCut {
            alpha: alpha.to_f64(),
        })
    }

    /// `u ≤ v` pointwise.
    pub fn is_below(&self, other: &Self) -> bool {
        self.iter().all(|(p, l)| *l <= other.level(p))
    }

    /// Equality as functions; float mode compares levels within the dedup
    /// tolerance.
    pub fn same_as(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.len() == other.len()
            && self.iter().all(|(p, l)| {
                other
                    .index
                    .find(p, &other.points)
                    .is_some_and(|i| other.levels[i].same(l))
            })
    }
}

impl<S: Scalar> PartialEq for FuzzySet<S> {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

fn sort_desc_dedup<S: Scalar>(v: &mut Vec<S>) {
    v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    v.dedup_by(|a, b| a == b);
}

/// Zadeh's extension: `f(u)(y) = max_{f(x)=y} u(x)`.
pub fn zadeh_pushforward<S: Scalar>(f: &AffineMap<S>, u: &FuzzySet<S>) -> Result<FuzzySet<S>> {
    check_dim(f.dim(), u.dim())?;
    let mut out = FuzzySet::with_capacity(u.dim(), u.len());
    for (p, l) in u.iter() {
        out.insert_max(f.apply_unchecked(p), l.clone());
    }
    Ok(out)
}

/// `ρ(u)(x) = ρ(u(x))`. Requires `ρ(0) = 0`; points mapped to level 0 leave
/// the support.
pub fn apply_grey_to_fuzzy<S: Scalar>(
    rho: &GreyLevelMap<S>,
    u: &FuzzySet<S>,
) -> Result<FuzzySet<S>> {
    if !rho.at_zero().is_zero_value() {
        return Err(Error::GreyNonzeroAtZero);
    }
    let mut out = FuzzySet::with_capacity(u.dim(), u.len());
    for (p, l) in u.iter() {
        out.insert_max(p.clone(), rho.eval_unchecked(l));
    }
    out.into_nonempty()
}

/// Pointwise maximum of a nonempty family.
pub fn join<'a, S: Scalar>(us: impl IntoIterator<Item = &'a FuzzySet<S>>) -> Result<FuzzySet<S>> {
    let mut iter = us.into_iter();
    let mut out = iter.next().ok_or(Error::EmptySupport)?.clone();
    for u in iter {
        check_dim(out.dim, u.dim)?;
        for (p, l) in u.iter() {
            out.insert_max(p.clone(), l.clone());
        }
    }
    Ok(out)
}

/// `sup_α h([u]^α, [v]^α)`.
///
/// Uses the identity
/// `sup_α sup_{x∈[u]^α} d(x, [v]^α) = max_{x∈supp u} d(x, [v]^{u(x)})`,
/// which holds because `d(x, [v]^α)` is nondecreasing in `α` and `x` belongs
/// to `[u]^α` exactly for `α ≤ u(x)`. Nearest points within a cut come from a
/// kd-tree that prunes subtrees whose maximum level is below the cut.
pub fn d_infinity<S: Scalar>(u: &FuzzySet<S>, v: &FuzzySet<S>) -> Result<Distance<S>> {
    check_dim(u.dim, v.dim)?;
    Ok(directed_fuzzy(u, v)?.max(directed_fuzzy(v, u)?))
}

fn directed_fuzzy<S: Scalar>(u: &FuzzySet<S>, v: &FuzzySet<S>) -> Result<Distance<S>> {
    let tree = KdTree::with_levels(&v.points, &v.levels);
    let mut worst = S::zero();
    for (x, lx) in u.iter() {
        if v.level(x) >= *lx {
            continue;
        }
        match tree.nearest(x.coords(), Some(lx), Some(&worst)) {
            Some((_, d)) => {
                if d > worst {
                    worst = d;
                }
            }
            None => return Err(Error::EmptyCut { alpha: lx.to_f64() }),
        }
    }
    Ok(Distance::from_squared(worst))
}

/// `d∞` by evaluating `h` on the cuts at every level present in either set.
/// Between consecutive levels the cuts are constant, so this is the supremum
/// over `(0,1]`.
pub fn d_infinity_level_sweep<S: Scalar>(u: &FuzzySet<S>, v: &FuzzySet<S>) -> Result<Distance<S>> {
    check_dim(u.dim, v.dim)?;
    let mut levels: Vec<S> = u.levels.iter().chain(&v.levels).cloned().collect();
    sort_desc_dedup(&mut levels);
    let mut worst = Distance::zero();
    for alpha in &levels {
        let a = u.alpha_cut(alpha)?;
        let b = v.alpha_cut(alpha)?;
        worst = worst.max(hausdorff(&a, &b)?);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn pt(x: i64, y: i64) -> Point<Rational> {
        Point::from_ratios(&[(x, 1), (y, 1)])
    }

    type Entry = ((i64, i64), (i64, i64));

    fn fz(pairs: &[Entry]) -> FuzzySet<Rational> {
        FuzzySet::new(pairs.iter().map(|&((x, y), (n, d))| (pt(x, y), q(n, d)))).unwrap()
    }

    fn three_quarters() -> GreyLevelMap<Rational> {
        GreyLevelMap::scaled(q(3, 4)).unwrap()
    }

    fn jump_at_half() -> GreyLevelMap<Rational> {
        GreyLevelMap::step(q(1, 2), q(0, 1), q(1, 1)).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(
            GreyLevelMap::identity().evaluate(&q(3, 10)).unwrap(),
            q(3, 10)
        );
        assert_eq!(three_quarters().evaluate(&q(1, 1)).unwrap(), q(3, 4));
        assert_eq!(jump_at_half().evaluate(&q(1, 2)).unwrap(), q(1, 1));
        assert_eq!(jump_at_half().evaluate(&q(49, 100)).unwrap(), q(0, 1));
        assert!(GreyLevelMap::<Rational>::identity()
            .evaluate(&q(3, 2))
            .is_err());
        assert!(GreyLevelMap::<Rational>::identity()
            .evaluate(&q(-1, 2))
            .is_err());
    }

    #[test]
    fn grey_map_layout_checked() {
        assert!(GreyLevelMap::linear(vec![(q(0, 1), q(0, 1)), (q(1, 2), q(1, 1))]).is_err());
        assert!(GreyLevelMap::linear(vec![(q(0, 1), q(0, 1)), (q(1, 1), q(0, 1))]).is_err());
        assert!(GreyLevelMap::linear(vec![(q(0, 1), q(0, 1)), (q(1, 1), q(3, 2))]).is_err());
        let dec = GreyLevelMap::linear(vec![(q(0, 1), q(1, 1)), (q(1, 1), q(1, 2))]).unwrap();
        assert!(!dec.is_ndrc());
        assert!(three_quarters().is_ndrc());
    }

    #[test]
    fn level_preimage_examples() {
        let id = GreyLevelMap::<Rational>::identity();
        assert_eq!(id.level_preimage(&q(1, 2)).unwrap(), q(1, 2));
        assert_eq!(three_quarters().level_preimage(&q(3, 5)).unwrap(), q(4, 5));
        assert_eq!(jump_at_half().level_preimage(&q(7, 10)).unwrap(), q(1, 2));
        assert!(matches!(
            three_quarters().level_preimage(&q(9, 10)),
            Err(Error::LevelUnreachable { .. })
        ));
    }

    #[test]
    fn alpha_cut_examples() {
        let u = fz(&[((0, 0), (1, 1)), ((1, 0), (1, 2))]);
        assert_eq!(
            u.alpha_cut(&q(3, 4)).unwrap(),
            FinitePointSet::singleton(pt(0, 0))
        );
        assert_eq!(u.alpha_cut(&q(0, 1)).unwrap(), u.support().unwrap());
        let low = fz(&[((0, 0), (1, 2))]);
        assert!(matches!(
            low.alpha_cut(&q(1, 1)),
            Err(Error::EmptyCut { .. })
        ));
    }

    #[test]
    fn pushforward_examples() {
        let u = fz(&[((0, 0), (1, 1)), ((2, 0), (1, 2)), ((4, 4), (1, 3))]);
        let shift = AffineMap::new(
            vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]],
            vec![q(1, 1), q(0, 1)],
        )
        .unwrap();
        let moved = zadeh_pushforward(&shift, &u).unwrap();
        assert_eq!(moved.level(&pt(3, 0)), q(1, 2));
        assert_eq!(moved.len(), 3);

        let collapse = AffineMap::scaling(q(0, 1), vec![q(5, 1), q(5, 1)]);
        let c = zadeh_pushforward(&collapse, &u).unwrap();
        assert_eq!(c, fz(&[((5, 5), (1, 1))]));

        let f1 = crate::example::system::<Rational>().maps()[0].clone();
        let base = FuzzySet::new(vec![(Point::from_ratios(&[(1, 3), (0, 1)]), q(1, 1))]).unwrap();
        assert_eq!(zadeh_pushforward(&f1, &base).unwrap(), base);
    }

    #[test]
    fn grey_application_examples() {
        let u = fz(&[((0, 0), (1, 1)), ((1, 0), (1, 2))]);
        assert_eq!(
            apply_grey_to_fuzzy(&GreyLevelMap::identity(), &u).unwrap(),
            u
        );
        assert_eq!(
            apply_grey_to_fuzzy(&three_quarters(), &u).unwrap(),
            fz(&[((0, 0), (3, 4)), ((1, 0), (3, 8))])
        );
        let erase = GreyLevelMap::step(q(1, 4), q(0, 1), q(1, 1)).unwrap();
        assert!(matches!(
            apply_grey_to_fuzzy(&erase, &fz(&[((0, 0), (1, 5))])),
            Err(Error::EmptySupport)
        ));
        let lifted = GreyLevelMap::linear(vec![(q(0, 1), q(1, 2)), (q(1, 1), q(1, 1))]).unwrap();
        assert!(matches!(
            apply_grey_to_fuzzy(&lifted, &u),
            Err(Error::GreyNonzeroAtZero)
        ));
    }

    #[test]
    fn join_examples() {
        let u = fz(&[((0, 0), (1, 1))]);
        assert_eq!(join([&u]).unwrap(), u);
        let v = fz(&[((0, 0), (1, 2)), ((1, 1), (1, 2))]);
        assert_eq!(
            join([&u, &v]).unwrap(),
            fz(&[((0, 0), (1, 1)), ((1, 1), (1, 2))])
        );
    }

    #[test]
    fn d_infinity_examples() {
        let u = fz(&[((0, 0), (1, 1)), ((0, 3), (1, 2))]);
        assert!(d_infinity(&u, &u).unwrap().is_zero());
        let p = fz(&[((0, 0), (1, 1))]);
        let r = fz(&[((3, 4), (1, 1))]);
        assert_eq!(d_infinity(&p, &r).unwrap().value(), 5.0);

        let base = FuzzySet::new(vec![(Point::from_ratios(&[(1, 2), (0, 1)]), q(1, 1))]).unwrap();
        let stepped = FuzzySet::new(vec![
            (Point::from_ratios(&[(1, 2), (0, 1)]), q(1, 1)),
            (Point::from_ratios(&[(1, 2), (1, 2)]), q(3, 4)),
        ])
        .unwrap();
        let d = d_infinity(&stepped, &base).unwrap();
        assert_eq!(d, Distance::from_value(q(1, 2)));
        assert_eq!(d, d_infinity_level_sweep(&stepped, &base).unwrap());
    }

    #[test]
    fn d_infinity_rejects_non_normal_mismatch() {
        let u = fz(&[((0, 0), (1, 1))]);
        let v = fz(&[((0, 0), (1, 2))]);
        assert!(matches!(d_infinity(&u, &v), Err(Error::EmptyCut { .. })));
        assert!(matches!(
            d_infinity_level_sweep(&u, &v),
            Err(Error::EmptyCut { .. })
        ));
    }

    #[test]
    fn repeated_points_keep_max_level() {
        let u = FuzzySet::new(vec![(pt(0, 0), q(1, 3)), (pt(0, 0), q(2, 3))]).unwrap();
        assert_eq!(u.len(), 1);
        assert_eq!(u.level(&pt(0, 0)), q(2, 3));
        assert!(FuzzySet::new(vec![(pt(0, 0), q(0, 1))]).is_err());
        assert!(FuzzySet::<Rational>::new(Vec::new()).is_err());
    }
}
