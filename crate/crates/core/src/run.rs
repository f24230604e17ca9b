//! Executes a scene: iterate `Z` under the stop rule and produce the report,
//! CSV and image outputs.

use serde_json::json;

use crate::error::{Error, Result};
use crate::fuzzy::FuzzySet;
use crate::grid::{BBox, GridFuzzySet};
use crate::operator::{ConvergenceReport, Stop};
use crate::render::{parse_csv, render_pgm, write_csv};
use crate::scalar::{Rational, Scalar};
use crate::scene::{NumericMode, Scene, StopSpec};

/// Default raster size when neither the scene nor the caller gives one.
pub const DEFAULT_RESOLUTION: (usize, usize) = (256, 256);

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Overrides the scene's stop rule.
    pub stop: Option<StopSpec>,
    pub mode: Option<NumericMode>,
    pub grid: Option<(usize, usize)>,
    pub bbox: Option<BBox>,
    pub want_csv: bool,
    pub want_image: bool,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: ConvergenceReport,
    pub csv: Option<String>,
    pub pgm: Option<Vec<u8>>,
    pub mode: NumericMode,
}

impl RunOutput {
    pub fn report_json(&self) -> String {
        let value = json!({
            "numeric_mode": self.mode.as_str(),
            "iterations": self.report.iterations,
            "d_history": self.report.d_history,
            "a_priori": self.report.a_priori,
            "bound_trace": self.report.bound_trace,
            "certified_residual": self.report.certified_residual,
            "support_size": self.report.support_size,
            "tolerance": self.report.tolerance,
        });
        serde_json::to_string_pretty(&value).expect("serializable") + "\n"
    }
}

pub fn run_scene(scene: &Scene, opts: &RunOptions) -> Result<RunOutput> {
    let mut scene = scene.clone();
    if let Some(stop) = &opts.stop {
        scene.stop = stop.clone();
    }
    if let Some(mode) = opts.mode {
        scene.numeric_mode = mode;
    }
    let violations = scene.validate();
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }
    match scene.numeric_mode {
        NumericMode::Exact => run_in::<Rational>(&scene, opts),
        NumericMode::Float => run_in::<f64>(&scene, opts),
    }
}

fn run_in<S: Scalar>(scene: &Scene, opts: &RunOptions) -> Result<RunOutput> {
    let sys = scene.fuzzy_system::<S>()?;
    let u0 = scene.initial_set::<S>()?;
    let stop: Stop<S> = scene.stop_rule();
    let mut iterates: Vec<(usize, FuzzySet<S>)> = Vec::new();
    let (last, report) = sys.iterate_z_observed(&u0, &stop, |n, u| {
        if opts.want_csv {
            iterates.push((n, u.clone()));
        }
    })?;
    let csv = opts
        .want_csv
        .then(|| write_csv(iterates.iter().map(|(n, u)| (*n, u))));
    let pgm = if opts.want_image {
        Some(render_pgm(&rasterize(&last, scene, opts)?))
    } else {
        None
    };
    Ok(RunOutput {
        report,
        csv,
        pgm,
        mode: scene.numeric_mode,
    })
}

fn rasterize<S: Scalar>(u: &FuzzySet<S>, scene: &Scene, opts: &RunOptions) -> Result<GridFuzzySet> {
    let (w, h) = opts
        .grid
        .or(scene.render.as_ref().map(|r| (r.width, r.height)))
        .unwrap_or(DEFAULT_RESOLUTION);
    let bbox = match (opts.bbox, &scene.render) {
        (Some(b), _) => b,
        (None, Some(r)) => r.bbox()?,
        (None, None) => BBox::around(
            u.points().iter().map(|p| {
                let c = p.to_f64();
                [c[0], c[1]]
            }),
            0.0,
        )?,
    };
    GridFuzzySet::from_fuzzy(u, bbox, w, h)
}

/// Rasterizes the last iteration stored in a CSV dump.
pub fn render_csv(text: &str, grid: Option<(usize, usize)>, bbox: Option<BBox>) -> Result<Vec<u8>> {
    let rows = parse_csv(text)?;
    let last = rows
        .iter()
        .map(|r| r.iteration)
        .max()
        .ok_or(Error::EmptySupport)?;
    let pairs: Vec<_> = rows
        .into_iter()
        .filter(|r| r.iteration == last)
        .map(|r| (crate::geometry::Point::new(r.coords), r.level))
        .collect();
    let u = FuzzySet::new(pairs)?;
    if u.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: u.dim(),
        });
    }
    let bbox = match bbox {
        Some(b) => b,
        None => BBox::around(
            u.points().iter().map(|p| [p.coords()[0], p.coords()[1]]),
            0.0,
        )?,
    };
    let (w, h) = grid.unwrap_or(DEFAULT_RESOLUTION);
    Ok(render_pgm(&GridFuzzySet::from_fuzzy(&u, bbox, w, h)?))
}
