//! Grey levels on a regular 2-D grid, used for rendering and for
//! approximate iteration of `Z` on dense supports.

use crate::error::{Error, Result};
use crate::fuzzy::{FuzzySet, GreyLevelMap};
use crate::geometry::Point;
use crate::ifs::AffineMap;
use crate::operator::OrbitalFuzzySystem;
use crate::scalar::Scalar;

/// Axis-aligned box `[lo, hi]` in world coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BBox {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl BBox {
    pub fn new(lo: [f64; 2], hi: [f64; 2]) -> Result<Self> {
        if !(lo[0] < hi[0] && lo[1] < hi[1]) || !lo.iter().chain(&hi).all(|v| v.is_finite()) {
            return Err(Error::InvalidSystem(format!(
                "degenerate bounding box {lo:?}..{hi:?}"
            )));
        }
        Ok(BBox { lo, hi })
    }

    /// Smallest box around the points, widened by `pad` on each side (and
    /// to unit size along any axis where all points agree).
    pub fn around(points: impl IntoIterator<Item = [f64; 2]>, pad: f64) -> Result<Self> {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        if !lo[0].is_finite() {
            return Err(Error::EmptySet);
        }
        for k in 0..2 {
            if hi[k] - lo[k] <= 0.0 {
                lo[k] -= 0.5;
                hi[k] += 0.5;
            }
            lo[k] -= pad;
            hi[k] += pad;
        }
        BBox::new(lo, hi)
    }
}

/// Levels on a `width × height` grid of cells. Row 0 is the lowest world
/// `y`; column 0 the lowest world `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFuzzySet {
    bbox: BBox,
    width: usize,
    height: usize,
    levels: Vec<f64>,
}

impl GridFuzzySet {
    pub fn zeros(bbox: BBox, width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidSystem(
                "grid resolution must be positive".into(),
            ));
        }
        Ok(GridFuzzySet {
            bbox,
            width,
            height,
            levels: vec![0.0; width * height],
        })
    }

    /// Samples `level(x, y)` at every cell center.
    pub fn from_fn(
        bbox: BBox,
        width: usize,
        height: usize,
        level: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let mut g = GridFuzzySet::zeros(bbox, width, height)?;
        for row in 0..height {
            for col in 0..width {
                let [x, y] = g.cell_center(col, row);
                g.levels[row * width + col] = level(x, y).clamp(0.0, 1.0);
            }
        }
        Ok(g)
    }

    /// Snaps each support point to its containing cell, max-combining.
    /// Points outside the box are dropped.
    pub fn from_fuzzy<S: Scalar>(
        u: &FuzzySet<S>,
        bbox: BBox,
        width: usize,
        height: usize,
    ) -> Result<Self> {
        if u.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: u.dim(),
            });
        }
        let mut g = GridFuzzySet::zeros(bbox, width, height)?;
        for (p, l) in u.iter() {
            let c = p.to_f64();
            g.deposit(c[0], c[1], l.to_f64());
        }
        Ok(g)
    }

    pub fn bbox(&self) -> BBox {
        self.bbox
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.levels[row * self.width + col]
    }

    /// Levels of one row, lowest `x` first.
    pub fn row(&self, row: usize) -> &[f64] {
        &self.levels[row * self.width..(row + 1) * self.width]
    }

    pub fn cell_size(&self) -> [f64; 2] {
        [
            (self.bbox.hi[0] - self.bbox.lo[0]) / self.width as f64,
            (self.bbox.hi[1] - self.bbox.lo[1]) / self.height as f64,
        ]
    }

    pub fn cell_diagonal(&self) -> f64 {
        let [w, h] = self.cell_size();
        w.hypot(h)
    }

    pub fn cell_center(&self, col: usize, row: usize) -> [f64; 2] {
        let [w, h] = self.cell_size();
        [
            self.bbox.lo[0] + (col as f64 + 0.5) * w,
            self.bbox.lo[1] + (row as f64 + 0.5) * h,
        ]
    }

    /// Cell containing `(x, y)`; the upper box edges belong to the last cell.
    pub fn cell_of(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let locate = |v: f64, lo: f64, hi: f64, n: usize| -> Option<usize> {
            if !(lo..=hi).contains(&v) {
                return None;
            }
            let i = ((v - lo) / (hi - lo) * n as f64).floor() as usize;
            Some(i.min(n - 1))
        };
        Some((
            locate(x, self.bbox.lo[0], self.bbox.hi[0], self.width)?,
            locate(y, self.bbox.lo[1], self.bbox.hi[1], self.height)?,
        ))
    }

    fn deposit(&mut self, x: f64, y: f64, level: f64) {
        if let Some((c, r)) = self.cell_of(x, y) {
            let slot = &mut self.levels[r * self.width + c];
            if level > *slot {
                *slot = level;
            }
        }
    }

    pub fn max_level(&self) -> f64 {
        self.levels.iter().copied().fold(0.0, f64::max)
    }

    /// Maps every occupied cell center through `f` and deposits into the
    /// containing cell (max-combine). Positions are off by at most
    /// `Lip(f) · cell_diagonal()` compared with the exact pushforward.
    pub fn pushforward(&self, f: &AffineMap<f64>) -> Result<Self> {
        if f.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: f.dim(),
            });
        }
        let mut out = GridFuzzySet::zeros(self.bbox, self.width, self.height)?;
        for row in 0..self.height {
            for col in 0..self.width {
                let l = self.get(col, row);
                if l <= 0.0 {
                    continue;
                }
                let c = self.cell_center(col, row);
                let q = f.apply_unchecked(&Point::new(c.to_vec()));
                out.deposit(q.coords()[0], q.coords()[1], l);
            }
        }
        Ok(out)
    }

    pub fn apply_grey(&self, rho: &GreyLevelMap<f64>) -> Result<Self> {
        if !rho.at_zero().is_zero_value() {
            return Err(Error::GreyNonzeroAtZero);
        }
        let mut out = self.clone();
        for l in &mut out.levels {
            *l = rho.eval_unchecked(l);
        }
        Ok(out)
    }

    pub fn join(&self, other: &Self) -> Result<Self> {
        if self.bbox != other.bbox || self.width != other.width || self.height != other.height {
            return Err(Error::InvalidSystem("grids differ in layout".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.levels.iter_mut().zip(&other.levels) {
            *a = a.max(*b);
        }
        Ok(out)
    }

    /// `Z` on the grid.
    pub fn apply_z(&self, sys: &OrbitalFuzzySystem<f64>) -> Result<Self> {
        let mut out = GridFuzzySet::zeros(self.bbox, self.width, self.height)?;
        for (f, rho) in sys.ifs().maps().iter().zip(sys.grey_maps()) {
            out = out.join(&self.pushforward(f)?.apply_grey(rho)?)?;
        }
        Ok(out)
    }

    /// Occupied cells as a float fuzzy set at cell centers.
    pub fn to_fuzzy(&self) -> Result<FuzzySet<f64>> {
        let mut pairs = Vec::new();
        for row in 0..self.height {
            for col in 0..self.width {
                let l = self.get(col, row);
                if l > 0.0 {
                    pairs.push((Point::new(self.cell_center(col, row).to_vec()), l));
                }
            }
        }
        FuzzySet::new(pairs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example;
    use crate::fuzzy::d_infinity;

    fn unit() -> BBox {
        BBox::new([0.0, 0.0], [1.0, 1.0]).unwrap()
    }

    #[test]
    fn cells_and_edges() {
        let g = GridFuzzySet::zeros(unit(), 4, 2).unwrap();
        assert_eq!(g.cell_of(0.0, 0.0), Some((0, 0)));
        assert_eq!(g.cell_of(1.0, 1.0), Some((3, 1)));
        assert_eq!(g.cell_of(0.5, 0.5), Some((2, 1)));
        assert_eq!(g.cell_of(1.5, 0.5), None);
        assert_eq!(g.cell_center(0, 0), [0.125, 0.25]);
    }

    #[test]
    fn bbox_must_be_nondegenerate() {
        assert!(BBox::new([0.0, 0.0], [0.0, 1.0]).is_err());
        let b = BBox::around([[0.5, 0.0], [0.5, 1.0]], 0.0).unwrap();
        assert_eq!(b.lo, [0.0, 0.0]);
        assert_eq!(b.hi, [1.0, 1.0]);
    }

    #[test]
    fn snapping_max_combines() {
        let u = FuzzySet::new(vec![
            (Point::new(vec![0.1, 0.1]), 0.5),
            (Point::new(vec![0.2, 0.2]), 0.75),
            (Point::new(vec![5.0, 5.0]), 1.0),
        ])
        .unwrap();
        let g = GridFuzzySet::from_fuzzy(&u, unit(), 2, 2).unwrap();
        assert_eq!(g.levels(), &[0.75, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn grid_iteration_tracks_exact_iteration() {
        // bottom row at level 1 over [0,1]; compare against the exact float
        // iterate of the same cell centers, up to the deposit error
        let bbox = BBox::new([0.0, 0.0], [1.0, 1.0]).unwrap();
        let n = 64;
        let g0 = GridFuzzySet::from_fn(
            bbox,
            8,
            n,
            |_, y| if y < 1.0 / n as f64 { 1.0 } else { 0.0 },
        )
        .unwrap();
        let sys = example::fuzzy_system::<f64>();
        let mut g = g0.clone();
        let mut exact = g0.to_fuzzy().unwrap();
        for _ in 0..3 {
            g = g.apply_z(&sys).unwrap();
            exact = sys.apply_z(&exact).unwrap();
        }
        let approx = g.to_fuzzy().unwrap();
        let d = d_infinity(&approx, &exact).unwrap().value();
        // each step adds at most half a cell diagonal of snapping error
        assert!(d <= 3.0 * g.cell_diagonal(), "d = {d}");
        assert_eq!(g.max_level(), 1.0);
        let levels: Vec<f64> = (0..n).map(|r| g.get(3, r)).filter(|&l| l > 0.0).collect();
        assert!(levels.contains(&0.75) && levels.contains(&0.5625) && levels.contains(&0.421875));
    }
}
