//! Affine iterated function systems: orbits, the crisp fractal operator and
//! attractor iteration.

use crate::error::{Error, Result};
use crate::geometry::{check_dim, hausdorff, Distance, FinitePointSet, Point};
use crate::scalar::Scalar;

/// Default bound on the number of support points any iterate may hold.
pub const DEFAULT_SUPPORT_CAP: usize = 10_000_000;

/// `p ↦ linear · p + offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap<S> {
    linear: Vec<Vec<S>>,
    offset: Vec<S>,
}

impl<S: Scalar> AffineMap<S> {
    pub fn new(linear: Vec<Vec<S>>, offset: Vec<S>) -> Result<Self> {
        let d = offset.len();
        if d == 0 {
            return Err(Error::InvalidSystem("affine map of dimension 0".into()));
        }
        check_dim(d, linear.len())?;
        for row in &linear {
            check_dim(d, row.len())?;
        }
        Ok(AffineMap { linear, offset })
    }

    pub fn identity(dim: usize) -> Self {
        let linear = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| if i == j { S::one() } else { S::zero() })
                    .collect()
            })
            .collect();
        AffineMap {
            linear,
            offset: vec![S::zero(); dim],
        }
    }

    /// `p ↦ factor · p + offset`.
    pub fn scaling(factor: S, offset: Vec<S>) -> Self {
        let dim = offset.len();
        let linear = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| if i == j { factor.clone() } else { S::zero() })
                    .collect()
            })
            .collect();
        AffineMap { linear, offset }
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn linear(&self) -> &[Vec<S>] {
        &self.linear
    }

    pub fn offset(&self) -> &[S] {
        &self.offset
    }

    pub fn apply(&self, p: &Point<S>) -> Result<Point<S>> {
        check_dim(self.dim(), p.dim())?;
        Ok(self.apply_unchecked(p))
    }

    pub(crate) fn apply_unchecked(&self, p: &Point<S>) -> Point<S> {
        let coords = self
            .linear
            .iter()
            .zip(&self.offset)
            .map(|(row, b)| {
                row.iter()
                    .zip(p.coords())
                    .fold(b.clone(), |acc, (a, x)| acc + a.clone() * x.clone())
            })
            .collect();
        Point::new(coords)
    }

    /// `self ∘ inner`: applies `inner` first.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        check_dim(self.dim(), inner.dim())?;
        let d = self.dim();
        let linear = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        (0..d).fold(S::zero(), |acc, k| {
                            acc + self.linear[i][k].clone() * inner.linear[k][j].clone()
                        })
                    })
                    .collect()
            })
            .collect();
        let offset = self.apply_unchecked(&Point::new(inner.offset.clone()));
        Ok(AffineMap {
            linear,
            offset: offset.coords().to_vec(),
        })
    }

    /// Upper bound on the Lipschitz constant: the Frobenius norm of the
    /// linear part (f64).
    pub fn frobenius_norm(&self) -> f64 {
        self.linear
            .iter()
            .flatten()
            .map(|a| {
                let v = a.to_f64();
                v * v
            })
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Clone, Debug)]
pub struct IteratedFunctionSystem<S> {
    maps: Vec<AffineMap<S>>,
    contraction: S,
    support_cap: usize,
}

impl<S: Scalar> IteratedFunctionSystem<S> {
    pub fn new(maps: Vec<AffineMap<S>>, contraction: S) -> Result<Self> {
        let first = maps
            .first()
            .ok_or_else(|| Error::InvalidSystem("no maps".into()))?;
        let d = first.dim();
        for m in &maps {
            check_dim(d, m.dim())?;
        }
        if contraction < S::zero() || contraction >= S::one() {
            return Err(Error::ContractionOutOfRange(contraction.to_f64()));
        }
        Ok(IteratedFunctionSystem {
            maps,
            contraction,
            support_cap: DEFAULT_SUPPORT_CAP,
        })
    }

    pub fn with_support_cap(mut self, cap: usize) -> Self {
        self.support_cap = cap;
        self
    }

    pub fn maps(&self) -> &[AffineMap<S>] {
        &self.maps
    }

    pub fn contraction(&self) -> &S {
        &self.contraction
    }

    pub fn support_cap(&self) -> usize {
        self.support_cap
    }

    pub fn dim(&self) -> usize {
        self.maps[0].dim()
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// `F_S(K) = ∪ f_i(K)`.
    pub fn fractal_operator(&self, k: &FinitePointSet<S>) -> Result<FinitePointSet<S>> {
        check_dim(self.dim(), k.dim())?;
        let mut out: Option<FinitePointSet<S>> = None;
        for f in &self.maps {
            for p in k.iter() {
                let q = f.apply_unchecked(p);
                match out.as_mut() {
                    Some(set) => {
                        set.insert(q)?;
                    }
                    None => out = Some(FinitePointSet::singleton(q)),
                }
                if let Some(set) = &out {
                    if set.len() > self.support_cap {
                        return Err(Error::CapExceeded {
                            size: set.len(),
                            cap: self.support_cap,
                            partial: None,
                        });
                    }
                }
            }
        }
        out.ok_or(Error::EmptySet)
    }

    /// Returns `F_S^steps(k0)` and the history `h(K_n, K_{n+1})`, `n < steps`.
    pub fn iterate_attractor(
        &self,
        k0: &FinitePointSet<S>,
        steps: usize,
    ) -> Result<(FinitePointSet<S>, Vec<Distance<S>>)> {
        let mut current = k0.clone();
        let mut history = Vec::with_capacity(steps);
        for _ in 0..steps {
            let next = self.fractal_operator(&current)?;
            history.push(hausdorff(&current, &next)?);
            current = next;
        }
        Ok((current, history))
    }

    /// Iterates until `h(K_n, K_{n+1}) ≤ tol` (exact equality when `tol` is
    /// zero) or `max_steps` is reached.
    pub fn iterate_attractor_until(
        &self,
        k0: &FinitePointSet<S>,
        tol: &S,
        max_steps: usize,
    ) -> Result<(FinitePointSet<S>, Vec<Distance<S>>)> {
        let mut current = k0.clone();
        let mut history = Vec::new();
        let tol = Distance::from_value(tol.clone());
        for _ in 0..max_steps {
            let next = self.fractal_operator(&current)?;
            let d = hausdorff(&current, &next)?;
            let done = d <= tol;
            history.push(d);
            current = next;
            if done {
                break;
            }
        }
        Ok((current, history))
    }

    /// Images of `base` under all words of length ≤ `depth`.
    pub fn orbit(&self, base: &FinitePointSet<S>, depth: usize) -> Result<OrbitApproximation<S>> {
        check_dim(self.dim(), base.dim())?;
        let mut points = base.clone();
        let mut frontier = base.clone();
        for _ in 0..depth {
            frontier = self.fractal_operator(&frontier)?;
            for p in frontier.iter() {
                points.insert(p.clone())?;
            }
            if points.len() > self.support_cap {
                return Err(Error::CapExceeded {
                    size: points.len(),
                    cap: self.support_cap,
                    partial: None,
                });
            }
        }
        Ok(OrbitApproximation {
            base: base.clone(),
            depth,
            points,
        })
    }

    /// Samples `d(f_i(y), f_i(z)) / d(y, z)` over distinct pairs of an orbit
    /// approximation and compares the maximum with the declared constant.
    /// This is a sampling check, not a proof of the orbital condition.
    pub fn verify_orbital_contractivity(
        &self,
        base: &FinitePointSet<S>,
        depth: usize,
    ) -> Result<ContractivityReport> {
        let orbit = self.orbit(base, depth)?;
        let pts = orbit.points.points();
        // largest squared ratio, kept exact
        let mut worst: Option<S> = None;
        for (a, y) in pts.iter().enumerate() {
            for z in &pts[a + 1..] {
                let base_sq = S::dist_sq(y.coords(), z.coords());
                if base_sq.is_zero_value() {
                    continue;
                }
                for f in &self.maps {
                    let fy = f.apply_unchecked(y);
                    let fz = f.apply_unchecked(z);
                    let ratio = S::dist_sq(fy.coords(), fz.coords()) / base_sq.clone();
                    if worst.as_ref().is_none_or(|w| ratio > *w) {
                        worst = Some(ratio);
                    }
                }
            }
        }
        let c_sq = self.contraction.clone() * self.contraction.clone();
        let (max_ratio, ok) = match &worst {
            None => (0.0, true),
            Some(w) => {
                let ok = if S::EXACT {
                    *w <= c_sq
                } else {
                    w.to_f64().sqrt() <= self.contraction.to_f64() + crate::scalar::FLOAT_CMP_TOL
                };
                (w.to_f64().sqrt(), ok)
            }
        };
        Ok(ContractivityReport {
            max_ratio,
            max_ratio_squared: worst.map(|w| w.format()),
            pairs: pts.len() * pts.len().saturating_sub(1) / 2,
            ok,
        })
    }
}

#[derive(Clone, Debug)]
pub struct OrbitApproximation<S: Scalar> {
    pub base: FinitePointSet<S>,
    pub depth: usize,
    pub points: FinitePointSet<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContractivityReport {
    pub max_ratio: f64,
    /// Exact squared ratio in the scalar's textual form.
    pub max_ratio_squared: Option<String>,
    pub pairs: usize,
    pub ok: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn pt(x: (i64, i64), y: (i64, i64)) -> Point<Rational> {
        Point::from_ratios(&[x, y])
    }

    fn ys(set: &FinitePointSet<Rational>) -> Vec<Rational> {
        let mut v: Vec<_> = set.iter().map(|p| p.coords()[1].clone()).collect();
        v.sort();
        v
    }

    #[test]
    fn apply_map_examples() {
        let sys = example::system::<Rational>();
        let p = pt((1, 3), (1, 1));
        assert_eq!(AffineMap::identity(2).apply(&p).unwrap(), p);
        assert_eq!(sys.maps()[0].apply(&p).unwrap(), pt((1, 3), (1, 2)));
        let half = pt((1, 2), (0, 1));
        assert_eq!(sys.maps()[1].apply(&half).unwrap(), pt((1, 2), (1, 2)));
        assert!(sys.maps()[0].apply(&Point::from_ratios(&[(1, 1)])).is_err());
    }

    #[test]
    fn fractal_operator_examples() {
        let k = FinitePointSet::singleton(pt((1, 2), (0, 1)));
        let id = IteratedFunctionSystem::new(vec![AffineMap::identity(2)], q(0, 1)).unwrap();
        assert_eq!(id.fractal_operator(&k).unwrap(), k);

        let sys = example::system::<Rational>();
        let k1 = sys.fractal_operator(&k).unwrap();
        assert_eq!(ys(&k1), vec![q(0, 1), q(1, 2)]);
        let k2 = sys.fractal_operator(&k1).unwrap();
        assert_eq!(ys(&k2), vec![q(0, 1), q(1, 4), q(1, 2), q(3, 4)]);
    }

    #[test]
    fn iterate_attractor_examples() {
        let sys = example::system::<Rational>();
        let k = FinitePointSet::singleton(pt((1, 2), (0, 1)));
        let (same, hist) = sys.iterate_attractor(&k, 0).unwrap();
        assert_eq!(same, k);
        assert!(hist.is_empty());

        let half =
            IteratedFunctionSystem::new(vec![AffineMap::scaling(q(1, 2), vec![q(0, 1)])], q(1, 2))
                .unwrap();
        let one = FinitePointSet::singleton(Point::from_ratios(&[(1, 1)]));
        let (k3, hist) = half.iterate_attractor(&one, 3).unwrap();
        assert_eq!(k3, FinitePointSet::singleton(Point::from_ratios(&[(1, 8)])));
        let steps: Vec<f64> = hist.iter().map(Distance::value).collect();
        assert_eq!(steps, vec![0.5, 0.25, 0.125]);
    }

    #[test]
    fn iterate_until_tolerance_stops() {
        let half =
            IteratedFunctionSystem::new(vec![AffineMap::scaling(q(1, 2), vec![q(0, 1)])], q(1, 2))
                .unwrap();
        let one = FinitePointSet::singleton(Point::from_ratios(&[(1, 1)]));
        let (_, hist) = half.iterate_attractor_until(&one, &q(1, 16), 100).unwrap();
        assert_eq!(hist.len(), 4);
    }

    #[test]
    fn orbit_examples() {
        let sys = example::system::<Rational>();
        let b = FinitePointSet::singleton(pt((1, 2), (0, 1)));
        assert_eq!(sys.orbit(&b, 0).unwrap().points, b);
        let o2 = sys.orbit(&b, 2).unwrap();
        assert_eq!(ys(&o2.points), vec![q(0, 1), q(1, 4), q(1, 2), q(3, 4)]);
        let id = IteratedFunctionSystem::new(vec![AffineMap::identity(2)], q(0, 1)).unwrap();
        assert_eq!(id.orbit(&b, 5).unwrap().points, b);
    }

    #[test]
    fn orbit_is_monotone_in_depth() {
        let sys = example::system::<Rational>();
        let b = FinitePointSet::singleton(pt((1, 3), (5, 1)));
        let mut prev = sys.orbit(&b, 0).unwrap().points;
        for depth in 1..6 {
            let next = sys.orbit(&b, depth).unwrap().points;
            assert!(prev.is_subset(&next));
            prev = next;
        }
    }

    #[test]
    fn contractivity_examples() {
        let sys = example::system::<Rational>();
        let b = FinitePointSet::singleton(pt((1, 2), (0, 1)));
        let r = sys.verify_orbital_contractivity(&b, 6).unwrap();
        assert_eq!(r.max_ratio, 0.5);
        assert_eq!(r.max_ratio_squared.as_deref(), Some("1/4"));
        assert!(r.ok);

        let one = FinitePointSet::new(vec![
            Point::from_ratios(&[(1, 1)]),
            Point::from_ratios(&[(3, 1)]),
        ])
        .unwrap();
        let half =
            IteratedFunctionSystem::new(vec![AffineMap::scaling(q(1, 2), vec![q(0, 1)])], q(1, 2))
                .unwrap();
        assert_eq!(
            half.verify_orbital_contractivity(&one, 2)
                .unwrap()
                .max_ratio,
            0.5
        );

        let double =
            IteratedFunctionSystem::new(vec![AffineMap::scaling(q(2, 1), vec![q(0, 1)])], q(1, 2))
                .unwrap();
        let r = double.verify_orbital_contractivity(&one, 2).unwrap();
        assert!(!r.ok);
        assert_eq!(r.max_ratio, 2.0);
    }

    #[test]
    fn support_cap_enforced() {
        let sys = example::system::<Rational>().with_support_cap(10);
        let k = FinitePointSet::singleton(pt((1, 2), (0, 1)));
        assert!(matches!(
            sys.iterate_attractor(&k, 5),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn contraction_constant_validated() {
        assert!(matches!(
            IteratedFunctionSystem::new(vec![AffineMap::<Rational>::identity(1)], q(1, 1)),
            Err(Error::ContractionOutOfRange(_))
        ));
    }
}
