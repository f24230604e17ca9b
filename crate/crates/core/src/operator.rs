//! The orbital fuzzy IFS and its fuzzy Hutchinson-Barnsley operator `Z`.
//!
//! `Z(u) = ∨_i ρ_i(f_i(u))`. Iteration stops either after a fixed number of
//! steps or at the first `m` whose a-priori bound
//! `C^m/(1−C) · diam(F_S(supp u₀) ∪ supp u₀)` is within tolerance, which
//! bounds the distance from `Z^m(u₀)` to the limit.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fuzzy::{
    apply_grey_to_fuzzy, d_infinity, join, zadeh_pushforward, FuzzySet, GreyLevelMap,
};
use crate::geometry::{diameter, Distance, FinitePointSet, KdTree};
use crate::ifs::IteratedFunctionSystem;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AdmissibilityViolation {
    CountMismatch { maps: usize, grey_maps: usize },
    NotNdrc { index: usize, detail: String },
    NonzeroAtZero { index: usize },
    NoMapReachesOne,
}

impl fmt::Display for AdmissibilityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdmissibilityViolation::CountMismatch { maps, grey_maps } => {
                write!(f, "{maps} maps but {grey_maps} grey level maps")
            }
            AdmissibilityViolation::NotNdrc { index, detail } => {
                write!(f, "grey map {} is not ndrc: {detail}", index + 1)
            }
            AdmissibilityViolation::NonzeroAtZero { index } => {
                write!(f, "grey map {} does not vanish at 0", index + 1)
            }
            AdmissibilityViolation::NoMapReachesOne => {
                write!(f, "no grey map takes the value 1 at 1")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct OrbitalFuzzySystem<S> {
    ifs: IteratedFunctionSystem<S>,
    grey_maps: Vec<GreyLevelMap<S>>,
}

impl<S: Scalar> OrbitalFuzzySystem<S> {
    /// Builds an admissible system; any violation is an error.
    pub fn new(ifs: IteratedFunctionSystem<S>, grey_maps: Vec<GreyLevelMap<S>>) -> Result<Self> {
        let sys = OrbitalFuzzySystem::new_unchecked(ifs, grey_maps);
        let violations = sys.validate_admissible();
        if violations.is_empty() {
            Ok(sys)
        } else {
            Err(Error::NotAdmissible(
                violations.iter().map(ToString::to_string).collect(),
            ))
        }
    }

    /// Builds without the admissibility check, e.g. to inspect violations.
    pub fn new_unchecked(ifs: IteratedFunctionSystem<S>, grey_maps: Vec<GreyLevelMap<S>>) -> Self {
        OrbitalFuzzySystem { ifs, grey_maps }
    }

    pub fn ifs(&self) -> &IteratedFunctionSystem<S> {
        &self.ifs
    }

    pub fn grey_maps(&self) -> &[GreyLevelMap<S>] {
        &self.grey_maps
    }

    pub fn contraction(&self) -> &S {
        self.ifs.contraction()
    }

    pub fn with_support_cap(mut self, cap: usize) -> Self {
        self.ifs = self.ifs.with_support_cap(cap);
        self
    }

    /// Empty when the grey maps are admissible: each ndrc, each vanishing at
    /// 0, and at least one equal to 1 at 1.
    pub fn validate_admissible(&self) -> Vec<AdmissibilityViolation> {
        let mut out = Vec::new();
        if self.grey_maps.len() != self.ifs.len() {
            out.push(AdmissibilityViolation::CountMismatch {
                maps: self.ifs.len(),
                grey_maps: self.grey_maps.len(),
            });
        }
        for (index, rho) in self.grey_maps.iter().enumerate() {
            for detail in rho.ndrc_violations() {
                out.push(AdmissibilityViolation::NotNdrc { index, detail });
            }
            if !rho.at_zero().is_zero_value() {
                out.push(AdmissibilityViolation::NonzeroAtZero { index });
            }
        }
        if !self.grey_maps.iter().any(|rho| *rho.at_one() == S::one()) {
            out.push(AdmissibilityViolation::NoMapReachesOne);
        }
        out
    }

    /// `Z(u) = ∨_i ρ_i(f_i(u))`, computed in one pass with max-combine.
    pub fn apply_z(&self, u: &FuzzySet<S>) -> Result<FuzzySet<S>> {
        crate::geometry::check_dim(self.ifs.dim(), u.dim())?;
        let mut out = FuzzySet::with_capacity(u.dim(), u.len() * self.ifs.len());
        for (f, rho) in self.ifs.maps().iter().zip(&self.grey_maps) {
            for (p, l) in u.iter() {
                out.insert_max(f.apply_unchecked(p), rho.eval_unchecked(l));
            }
            if out.len() > self.ifs.support_cap() {
                return Err(Error::CapExceeded {
                    size: out.len(),
                    cap: self.ifs.support_cap(),
                    partial: None,
                });
            }
        }
        out.into_nonempty()
    }

    /// `Z(u)` assembled literally from pushforward, grey map and join.
    pub fn apply_z_by_definition(&self, u: &FuzzySet<S>) -> Result<FuzzySet<S>> {
        let mut parts = Vec::with_capacity(self.ifs.len());
        for (f, rho) in self.ifs.maps().iter().zip(&self.grey_maps) {
            match apply_grey_to_fuzzy(rho, &zadeh_pushforward(f, u)?) {
                Ok(part) => parts.push(part),
                Err(Error::EmptySupport) => {}
                Err(e) => return Err(e),
            }
        }
        join(&parts)
    }

    pub fn apply_z_n(&self, u: &FuzzySet<S>, n: usize) -> Result<FuzzySet<S>> {
        let mut cur = u.clone();
        for _ in 0..n {
            cur = self.apply_z(&cur)?;
        }
        Ok(cur)
    }

    /// `C^m/(1−C) · diam(F_S(supp u) ∪ supp u)`.
    pub fn a_priori_bound(&self, u: &FuzzySet<S>, m: usize) -> Result<Distance<S>> {
        let diam = self.bound_diameter(u)?;
        Ok(self.bound_at(&diam, m))
    }

    fn bound_diameter(&self, u: &FuzzySet<S>) -> Result<Distance<S>> {
        let supp = u.support()?;
        let image = self.ifs.fractal_operator(&supp)?;
        Ok(diameter(&supp.union(&image)?))
    }

    fn bound_at(&self, diam: &Distance<S>, m: usize) -> Distance<S> {
        let c = self.ifs.contraction().clone();
        let k = c.powi(m as u32) / (S::one() - c);
        Distance::from_squared(k.clone() * k * diam.squared().clone())
    }

    /// Iterates `Z` from `u0` under the given stop rule.
    pub fn iterate_z(
        &self,
        u0: &FuzzySet<S>,
        stop: &Stop<S>,
    ) -> Result<(FuzzySet<S>, ConvergenceReport)> {
        self.iterate_z_observed(u0, stop, |_, _| {})
    }

    /// As [`Self::iterate_z`], calling `observe(n, Zⁿ(u0))` for every iterate
    /// including `n = 0`.
    pub fn iterate_z_observed(
        &self,
        u0: &FuzzySet<S>,
        stop: &Stop<S>,
        mut observe: impl FnMut(usize, &FuzzySet<S>),
    ) -> Result<(FuzzySet<S>, ConvergenceReport)> {
        let diam = self.bound_diameter(u0)?;
        let mut report = ConvergenceReport {
            iterations: 0,
            d_history: Vec::new(),
            bound_trace: vec![self.bound_at(&diam, 0).value()],
            a_priori: self.bound_at(&diam, 0).value(),
            certified_residual: None,
            support_size: u0.len(),
            tolerance: match stop {
                Stop::Tolerance(t) => Some(t.to_f64()),
                Stop::Steps(_) => None,
            },
        };
        let tol_dist = match stop {
            Stop::Tolerance(t) => {
                if *t <= S::zero() {
                    return Err(Error::InvalidSystem("tolerance must be positive".into()));
                }
                Some(Distance::from_value(t.clone()))
            }
            Stop::Steps(_) => None,
        };
        let done = |m: usize| match (stop, &tol_dist) {
            (Stop::Steps(n), _) => m >= *n,
            (Stop::Tolerance(_), Some(t)) => self.bound_at(&diam, m) <= *t,
            _ => unreachable!(),
        };

        let mut current = u0.clone();
        let mut m = 0;
        observe(0, &current);
        while !done(m) {
            let next = match self.apply_z(&current) {
                Ok(next) => next,
                Err(Error::CapExceeded { size, cap, .. }) => {
                    return Err(Error::CapExceeded {
                        size,
                        cap,
                        partial: Some(Box::new(report)),
                    })
                }
                Err(e) => return Err(e),
            };
            report.d_history.push(d_infinity(&current, &next)?.value());
            current = next;
            m += 1;
            let bound = self.bound_at(&diam, m);
            report.iterations = m;
            report.a_priori = bound.value();
            report.bound_trace.push(bound.value());
            report.support_size = current.len();
            observe(m, &current);
        }
        report.certified_residual = match self.apply_z(&current) {
            Ok(next) => Some(d_infinity(&next, &current)?.value()),
            Err(Error::CapExceeded { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok((current, report))
    }

    /// Iterates until the a-priori bound is ≤ `tol`; the residual
    /// `d∞(Z(u*), u*)` is then also ≤ `tol`.
    pub fn fixed_point(
        &self,
        u0: &FuzzySet<S>,
        tol: S,
    ) -> Result<(FuzzySet<S>, ConvergenceReport)> {
        self.iterate_z(u0, &Stop::Tolerance(tol))
    }

    /// Best-effort test of the orbit condition: every support point `x` must
    /// share an orbit approximation `O(w)` with some level-1 point `y`.
    /// Candidate `w` are drawn from the support itself; points are matched
    /// within `tol`.
    pub fn check_membership_fss(
        &self,
        u: &FuzzySet<S>,
        depth: usize,
        tol: &S,
    ) -> Result<Membership> {
        if !u.is_normal() {
            return Ok(Membership::No);
        }
        Ok(match self.membership_witnesses(u, depth, tol)? {
            Some(_) => Membership::Yes,
            None => Membership::Unknown,
        })
    }

    /// For each support point (by index), the index of a support point `w`
    /// whose orbit approximation contains it and a level-1 point.
    pub fn membership_witnesses(
        &self,
        u: &FuzzySet<S>,
        depth: usize,
        tol: &S,
    ) -> Result<Option<Vec<usize>>> {
        let tol_sq = tol.clone() * tol.clone();
        let ones: Vec<usize> = (0..u.len())
            .filter(|&i| u.levels()[i] == S::one())
            .collect();
        let mut orbits: Vec<Option<FinitePointSet<S>>> = vec![None; u.len()];
        let mut out = Vec::with_capacity(u.len());
        for (xi, x) in u.points().iter().enumerate() {
            let mut found = None;
            // try x itself first
            let order = std::iter::once(xi).chain((0..u.len()).filter(|&w| w != xi));
            for wi in order {
                if orbits[wi].is_none() {
                    let base = FinitePointSet::singleton(u.points()[wi].clone());
                    orbits[wi] = Some(self.ifs.orbit(&base, depth)?.points);
                }
                let orbit = orbits[wi].as_ref().expect("filled above");
                let tree = KdTree::new(orbit.points());
                let near = |p: &crate::geometry::Point<S>| {
                    orbit.contains(p)
                        || tree
                            .nearest(p.coords(), None, Some(&tol_sq))
                            .is_some_and(|(_, d)| d <= tol_sq)
                };
                if near(x) && ones.iter().any(|&yi| near(&u.points()[yi])) {
                    found = Some(wi);
                    break;
                }
            }
            match found {
                Some(w) => out.push(w),
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }

    /// Splits `u` into restrictions `u^x` to orbit approximations of
    /// witnesses, one per support point; their join is `u`.
    pub fn decompose(
        &self,
        u: &FuzzySet<S>,
        depth: usize,
        tol: &S,
    ) -> Result<Option<Vec<FuzzySet<S>>>> {
        let witnesses = match self.membership_witnesses(u, depth, tol)? {
            Some(w) => w,
            None => return Ok(None),
        };
        let mut parts = Vec::with_capacity(witnesses.len());
        for w in witnesses {
            let base = FinitePointSet::singleton(u.points()[w].clone());
            let orbit = self.ifs.orbit(&base, depth)?.points;
            parts.push(restrict(u, &orbit)?);
        }
        Ok(Some(parts))
    }
}

/// Stop rule for [`OrbitalFuzzySystem::iterate_z`].
#[derive(Clone, Debug)]
pub enum Stop<S> {
    Steps(usize),
    /// Halt at the first `m` whose a-priori bound is ≤ the tolerance.
    Tolerance(S),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    Yes,
    No,
    Unknown,
}

/// Outcome of iterating `Z`. Distances are reported as `f64`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub iterations: usize,
    /// `d∞(Z^n u, Z^{n+1} u)` for `n < iterations`.
    pub d_history: Vec<f64>,
    /// A-priori bound at the final iterate.
    pub a_priori: f64,
    /// A-priori bound at every `m = 0..=iterations`.
    pub bound_trace: Vec<f64>,
    /// `d∞(Z(u_final), u_final)`; `None` if the extra step hit the support cap.
    pub certified_residual: Option<f64>,
    pub support_size: usize,
    pub tolerance: Option<f64>,
}

/// `u` on `set ∩ supp(u)`, zero elsewhere.
pub fn restrict<S: Scalar>(u: &FuzzySet<S>, set: &FinitePointSet<S>) -> Result<FuzzySet<S>> {
    let mut out = FuzzySet::empty(u.dim());
    for (p, l) in u.iter() {
        if set.contains(p) {
            out.insert_max(p.clone(), l.clone());
        }
    }
    out.into_nonempty()
}
