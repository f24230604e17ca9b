//! Points in R^D, finite compact sets and the Hausdorff-Pompeiu metric.
//!
//! Compact sets are finite point sets. All distances are carried as exact
//! squared values ([`Distance`]) so that exact-mode comparisons never round.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Point<S> {
    coords: Vec<S>,
}

impl<S: Scalar> Point<S> {
    pub fn new(coords: Vec<S>) -> Self {
        assert!(!coords.is_empty(), "a point needs at least one coordinate");
        Point { coords }
    }

    pub fn from_ratios(coords: &[(i64, i64)]) -> Self {
        Point::new(coords.iter().map(|&(n, d)| S::from_ratio(n, d)).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(Scalar::to_f64).collect()
    }

    fn keys(&self) -> Vec<S::Key> {
        self.coords.iter().map(Scalar::key).collect()
    }

    /// Dedup equality (exact, or coordinatewise within the float tolerance).
    pub fn same(&self, other: &Self) -> bool {
        self.coords.len() == other.coords.len()
            && self
                .coords
                .iter()
                .zip(&other.coords)
                .all(|(a, b)| a.same(b))
    }
}

/// A Euclidean distance stored as its exact square.
///
/// Ordering and equality compare the squares, which is equivalent to
/// comparing distances because the square root is monotone.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct Distance<S> {
    squared: S,
}

impl<S: Scalar> Distance<S> {
    pub fn zero() -> Self {
        Distance { squared: S::zero() }
    }

    pub fn from_squared(squared: S) -> Self {
        Distance { squared }
    }

    /// Distance equal to `value` (which must be nonnegative).
    pub fn from_value(value: S) -> Self {
        Distance {
            squared: value.clone() * value,
        }
    }

    pub fn squared(&self) -> &S {
        &self.squared
    }

    pub fn value(&self) -> f64 {
        self.squared.to_f64().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.squared.is_zero_value()
    }

    pub fn max(self, other: Self) -> Self {
        if other.squared > self.squared {
            other
        } else {
            self
        }
    }

    /// `self ≤ k · other` for `k ≥ 0`, decided on squares.
    pub fn le_scaled(&self, k: &S, other: &Self) -> bool {
        self.squared <= k.clone() * k.clone() * other.squared.clone()
    }

    /// `self ≤ a + b`, decided without square roots:
    /// `√c ≤ √a + √b ⇔ c − a − b ≤ 0 ∨ (c − a − b)² ≤ 4ab`.
    pub fn le_sum(&self, a: &Self, b: &Self) -> bool {
        let slack = self.squared.clone() - a.squared.clone() - b.squared.clone();
        if slack <= S::zero() {
            return true;
        }
        let four = S::from_ratio(4, 1);
        slack.clone() * slack <= four * a.squared.clone() * b.squared.clone()
    }
}

#[derive(Clone, Debug, Default)]
pub(crate) struct PointIndex<K> {
    buckets: HashMap<Vec<K>, Vec<usize>>,
}

impl<K: std::hash::Hash + Eq + Clone> PointIndex<K> {
    pub(crate) fn new() -> Self {
        PointIndex {
            buckets: HashMap::new(),
        }
    }

    pub(crate) fn with_capacity(n: usize) -> Self {
        PointIndex {
            buckets: HashMap::with_capacity(n),
        }
    }
}

impl<K: std::hash::Hash + Eq + Clone> PointIndex<K> {
    pub(crate) fn find<S>(&self, p: &Point<S>, points: &[Point<S>]) -> Option<usize>
    where
        S: Scalar<Key = K>,
    {
        let keys = p.keys();
        if S::EXACT {
            return self
                .buckets
                .get(&keys)
                .and_then(|b| b.iter().copied().find(|&i| points[i].same(p)));
        }
        let mut candidate = Vec::with_capacity(keys.len());
        self.scan_neighbors(&keys, 0, &mut candidate, p, points)
    }

    fn scan_neighbors<S>(
        &self,
        keys: &[K],
        axis: usize,
        candidate: &mut Vec<K>,
        p: &Point<S>,
        points: &[Point<S>],
    ) -> Option<usize>
    where
        S: Scalar<Key = K>,
    {
        if axis == keys.len() {
            return self
                .buckets
                .get(candidate.as_slice())
                .and_then(|b| b.iter().copied().find(|&i| points[i].same(p)));
        }
        for k in S::neighbor_keys(&keys[axis]) {
            candidate.push(k);
            let hit = self.scan_neighbors(keys, axis + 1, candidate, p, points);
            candidate.pop();
            if hit.is_some() {
                return hit;
            }
        }
        None
    }

    pub(crate) fn insert<S>(&mut self, p: &Point<S>, index: usize)
    where
        S: Scalar<Key = K>,
    {
        self.buckets.entry(p.keys()).or_default().push(index);
    }
}

/// A nonempty finite set of points of a common dimension, without duplicates.
#[derive(Clone, Debug)]
pub struct FinitePointSet<S: Scalar> {
    dim: usize,
    points: Vec<Point<S>>,
    index: PointIndex<S::Key>,
}

impl<S: Scalar> FinitePointSet<S> {
    pub fn new(points: impl IntoIterator<Item = Point<S>>) -> Result<Self> {
        let mut iter = points.into_iter();
        let first = iter.next().ok_or(Error::EmptySet)?;
        let mut set = FinitePointSet {
            dim: first.dim(),
            points: Vec::new(),
            index: PointIndex::new(),
        };
        set.insert(first)?;
        for p in iter {
            set.insert(p)?;
        }
        Ok(set)
    }

    pub fn singleton(p: Point<S>) -> Self {
        let mut index = PointIndex::new();
        index.insert(&p, 0);
        FinitePointSet {
            dim: p.dim(),
            points: vec![p],
            index,
        }
    }

    /// Inserts `p`; returns `false` if an equal point was already present.
    pub fn insert(&mut self, p: Point<S>) -> Result<bool> {
        check_dim(self.dim, p.dim())?;
        if self.index.find(&p, &self.points).is_some() {
            return Ok(false);
        }
        self.index.insert(&p, self.points.len());
        self.points.push(p);
        Ok(true)
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

    pub fn iter(&self) -> impl Iterator<Item = &Point<S>> {
        self.points.iter()
    }

    pub fn contains(&self, p: &Point<S>) -> bool {
        p.dim() == self.dim && self.index.find(p, &self.points).is_some()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.points.iter().all(|p| other.contains(p))
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for p in &other.points {
            out.insert(p.clone())?;
        }
        Ok(out)
    }

    /// Union of a nonempty family.
    pub fn union_all<'a>(sets: impl IntoIterator<Item = &'a Self>) -> Result<Self> {
        let mut iter = sets.into_iter();
        let mut out = iter.next().ok_or(Error::EmptySet)?.clone();
        for s in iter {
            for p in &s.points {
                out.insert(p.clone())?;
            }
        }
        Ok(out)
    }
}

impl<S: Scalar> PartialEq for FinitePointSet<S> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.len() == other.len() && self.is_subset(other)
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

pub fn euclid<S: Scalar>(p: &Point<S>, q: &Point<S>) -> Result<Distance<S>> {
    check_dim(p.dim(), q.dim())?;
    Ok(Distance::from_squared(S::dist_sq(p.coords(), q.coords())))
}

/// Axis along which the selected points spread the most.
fn widest_axis<S: Scalar>(pts: &[Point<S>], order: &[usize]) -> usize {
    let dim = pts[order[0]].dim();
    let mut best = (0, S::zero());
    for axis in 0..dim {
        let mut lo = &pts[order[0]].coords[axis];
        let mut hi = lo;
        for &i in &order[1..] {
            let v = &pts[i].coords[axis];
            if v < lo {
                lo = v;
            }
            if v > hi {
                hi = v;
            }
        }
        let spread = hi.clone() - lo.clone();
        if spread > best.1 {
            best = (axis, spread);
        }
    }
    best.0
}

/// Static kd-tree over a slice of points, optionally carrying a level per
/// point so that queries can be restricted to `level ≥ λ` (an α-cut).
pub(crate) struct KdTree<'a, S: Scalar> {
    points: &'a [Point<S>],
    levels: Option<&'a [S]>,
    nodes: Vec<KdNode<S>>,
    root: Option<usize>,
}

struct KdNode<S> {
    idx: usize,
    axis: usize,
    left: Option<usize>,
    right: Option<usize>,
    max_level: Option<S>,
}

impl<'a, S: Scalar> KdTree<'a, S> {
    pub(crate) fn new(points: &'a [Point<S>]) -> Self {
        Self::build(points, None)
    }

    pub(crate) fn with_levels(points: &'a [Point<S>], levels: &'a [S]) -> Self {
        assert_eq!(points.len(), levels.len());
        Self::build(points, Some(levels))
    }

    fn build(points: &'a [Point<S>], levels: Option<&'a [S]>) -> Self {
        let mut tree = KdTree {
            points,
            levels,
            nodes: Vec::with_capacity(points.len()),
            root: None,
        };
        let mut order: Vec<usize> = (0..points.len()).collect();
        tree.root = tree.build_node(&mut order);
        tree
    }

    fn build_node(&mut self, order: &mut [usize]) -> Option<usize> {
        if order.is_empty() {
            return None;
        }
        let pts = self.points;
        let axis = widest_axis(pts, order);
        let mid = order.len() / 2;
        order.select_nth_unstable_by(mid, |&a, &b| {
            pts[a].coords[axis]
                .partial_cmp(&pts[b].coords[axis])
                .unwrap_or(Ordering::Equal)
        });
        let idx = order[mid];
        let (lo, rest) = order.split_at_mut(mid);
        let hi = &mut rest[1..];
        let left = self.build_node(lo);
        let right = self.build_node(hi);
        let max_level = self.levels.map(|lv| {
            let mut m = lv[idx].clone();
            for child in [left, right].into_iter().flatten() {
                if let Some(c) = &self.nodes[child].max_level {
                    if *c > m {
                        m = c.clone();
                    }
                }
            }
            m
        });
        self.nodes.push(KdNode {
            idx,
            axis,
            left,
            right,
            max_level,
        });
        Some(self.nodes.len() - 1)
    }

    /// Nearest point to `q` among points with level ≥ `min_level` (all points
    /// when `None`). If `stop_at` is given, the search returns as soon as a
    /// candidate at squared distance ≤ `stop_at` is found.
    pub(crate) fn nearest(
        &self,
        q: &[S],
        min_level: Option<&S>,
        stop_at: Option<&S>,
    ) -> Option<(usize, S)> {
        let mut best = None;
        if let Some(root) = self.root {
            self.search(root, q, min_level, stop_at, &mut best);
        }
        best
    }

    fn search(
        &self,
        node: usize,
        q: &[S],
        min_level: Option<&S>,
        stop_at: Option<&S>,
        best: &mut Option<(usize, S)>,
    ) -> bool {
        let n = &self.nodes[node];
        if let (Some(min), Some(max)) = (min_level, &n.max_level) {
            if max < min {
                return false;
            }
        }
        let p = &self.points[n.idx];
        let eligible = match (min_level, self.levels) {
            (Some(min), Some(lv)) => lv[n.idx] >= *min,
            _ => true,
        };
        if eligible {
            let d = S::dist_sq(p.coords(), q);
            let better = best.as_ref().is_none_or(|(_, b)| d < *b);
            if better {
                let stop = stop_at.is_some_and(|s| d <= *s);
                *best = Some((n.idx, d));
                if stop {
                    return true;
                }
            }
        }
        let (near, far) = if q[n.axis] < p.coords[n.axis] {
            (n.left, n.right)
        } else {
            (n.right, n.left)
        };
        if let Some(c) = near {
            if self.search(c, q, min_level, stop_at, best) {
                return true;
            }
        }
        if let Some(c) = far {
            let gap = S::dist_sq(&q[n.axis..=n.axis], &p.coords[n.axis..=n.axis]);
            if best.as_ref().is_none_or(|(_, b)| gap < *b) {
                return self.search(c, q, min_level, stop_at, best);
            }
        }
        false
    }
}

/// `sup_{x∈A} inf_{y∈B} d(x,y)` by exhaustive double loop.
pub fn directed_distance_brute<S: Scalar>(
    a: &FinitePointSet<S>,
    b: &FinitePointSet<S>,
) -> Result<Distance<S>> {
    check_dim(a.dim(), b.dim())?;
    let mut worst = S::zero();
    for x in a.iter() {
        let nearest = b
            .iter()
            .map(|y| S::dist_sq(x.coords(), y.coords()))
            .reduce(S::min_of)
            .ok_or(Error::EmptySet)?;
        worst = S::max_of(worst, nearest);
    }
    Ok(Distance::from_squared(worst))
}

/// `sup_{x∈A} inf_{y∈B} d(x,y)`.
///
/// Points of `A` that belong to `B` are skipped by hash lookup; the rest use a
/// kd-tree over `B`, built on first use, with early exit once a point cannot
/// raise the running max.
pub fn directed_distance<S: Scalar>(
    a: &FinitePointSet<S>,
    b: &FinitePointSet<S>,
) -> Result<Distance<S>> {
    check_dim(a.dim(), b.dim())?;
    let mut tree = None;
    let mut worst = S::zero();
    for x in a.iter() {
        if b.contains(x) {
            continue;
        }
        let tree = tree.get_or_insert_with(|| KdTree::new(b.points()));
        if let Some((_, d)) = tree.nearest(x.coords(), None, Some(&worst)) {
            if d > worst {
                worst = d;
            }
        }
    }
    Ok(Distance::from_squared(worst))
}

pub fn hausdorff<S: Scalar>(a: &FinitePointSet<S>, b: &FinitePointSet<S>) -> Result<Distance<S>> {
    Ok(directed_distance(a, b)?.max(directed_distance(b, a)?))
}

pub fn hausdorff_brute<S: Scalar>(
    a: &FinitePointSet<S>,
    b: &FinitePointSet<S>,
) -> Result<Distance<S>> {
    Ok(directed_distance_brute(a, b)?.max(directed_distance_brute(b, a)?))
}

/// Largest pairwise distance; zero for a singleton.
pub fn diameter<S: Scalar>(a: &FinitePointSet<S>) -> Distance<S> {
    let pts = a.points();
    let mut best = S::zero();
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            let d = S::dist_sq(p.coords(), q.coords());
            if d > best {
                best = d;
            }
        }
    }
    Distance::from_squared(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn pt(c: &[(i64, i64)]) -> Point<Rational> {
        Point::from_ratios(c)
    }

    fn line(xs: &[i64]) -> FinitePointSet<Rational> {
        FinitePointSet::new(xs.iter().map(|&x| pt(&[(x, 1)]))).unwrap()
    }

    #[test]
    fn euclid_examples() {
        let o = pt(&[(0, 1), (0, 1)]);
        assert!(euclid(&o, &o).unwrap().is_zero());
        let d = euclid(&o, &pt(&[(3, 1), (4, 1)])).unwrap();
        assert_eq!(d, Distance::from_value(Rational::from_ratio(5, 1)));
        let d = euclid(&pt(&[(1, 2), (0, 1)]), &pt(&[(1, 2), (1, 1)])).unwrap();
        assert_eq!(d.squared(), &Rational::from_ratio(1, 1));
        assert!(matches!(
            euclid(&o, &pt(&[(1, 1)])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn directed_distance_is_asymmetric() {
        let zero = line(&[0]);
        let both = line(&[0, 1]);
        assert!(directed_distance(&zero, &zero).unwrap().is_zero());
        assert_eq!(directed_distance(&both, &zero).unwrap().value(), 1.0);
        assert!(directed_distance(&zero, &both).unwrap().is_zero());
    }

    #[test]
    fn hausdorff_examples() {
        assert_eq!(hausdorff(&line(&[0]), &line(&[1])).unwrap().value(), 1.0);
        let a = line(&[0, 3, 7]);
        assert!(hausdorff(&a, &a).unwrap().is_zero());
    }

    #[test]
    fn empty_set_rejected() {
        assert!(matches!(
            FinitePointSet::<Rational>::new(Vec::new()),
            Err(Error::EmptySet)
        ));
    }

    #[test]
    fn dedup_on_construction() {
        let s = line(&[1, 1, 2, 1]);
        assert_eq!(s.len(), 2);
        let f = FinitePointSet::new(vec![
            Point::new(vec![0.5f64]),
            Point::new(vec![0.5 + 1e-13]),
        ])
        .unwrap();
        assert_eq!(f.len(), 1);
    }

    #[test]
    fn diameter_examples() {
        assert!(diameter(&line(&[4])).is_zero());
        assert_eq!(diameter(&line(&[0, 3])).value(), 3.0);
        let square = FinitePointSet::new(vec![
            pt(&[(0, 1), (0, 1)]),
            pt(&[(1, 1), (0, 1)]),
            pt(&[(0, 1), (1, 1)]),
            pt(&[(1, 1), (1, 1)]),
        ])
        .unwrap();
        assert_eq!(diameter(&square).squared(), &Rational::from_ratio(2, 1));
    }

    #[test]
    fn le_sum_decides_triangle_exactly() {
        let three = Distance::from_value(Rational::from_ratio(3, 1));
        let four = Distance::from_value(Rational::from_ratio(4, 1));
        let five = Distance::from_value(Rational::from_ratio(5, 1));
        let eight = Distance::from_value(Rational::from_ratio(8, 1));
        assert!(five.le_sum(&three, &four));
        assert!(!eight.le_sum(&three, &four));
        // √2 ≤ 1 + 1
        let root2 = Distance::from_squared(Rational::from_ratio(2, 1));
        let one = Distance::from_value(Rational::from_ratio(1, 1));
        assert!(root2.le_sum(&one, &one));
        // 2 > √2 + 0.5
        let half = Distance::from_value(Rational::from_ratio(1, 2));
        assert!(!Distance::from_value(Rational::from_ratio(2, 1)).le_sum(&root2, &half));
    }

    #[test]
    fn kd_tree_level_filter() {
        let pts = vec![pt(&[(0, 1)]), pt(&[(1, 1)]), pt(&[(5, 1)])];
        let levels = vec![
            Rational::from_ratio(1, 4),
            Rational::from_ratio(1, 2),
            Rational::from_ratio(1, 1),
        ];
        let tree = KdTree::with_levels(&pts, &levels);
        let q = [Rational::from_ratio(0, 1)];
        assert_eq!(tree.nearest(&q, None, None).unwrap().0, 0);
        assert_eq!(
            tree.nearest(&q, Some(&Rational::from_ratio(1, 2)), None)
                .unwrap()
                .0,
            1
        );
        assert_eq!(
            tree.nearest(&q, Some(&Rational::from_ratio(1, 1)), None)
                .unwrap()
                .0,
            2
        );
        assert!(tree
            .nearest(&q, Some(&Rational::from_ratio(2, 1)), None)
            .is_none());
    }
}
