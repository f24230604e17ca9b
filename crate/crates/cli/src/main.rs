use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use fuzzy_ifs::grid::BBox;
use fuzzy_ifs::run::{render_csv, run_scene, RunOptions};
use fuzzy_ifs::scalar::parse_rational;
use fuzzy_ifs::scene::{NumericMode, Scene, StopSpec};
use fuzzy_ifs::verify::{run_all, VerifyConfig};
use fuzzy_ifs::Error;

const EXIT_INVALID: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(
    name = "fuzzy-ifs",
    version,
    about = "Iterate orbital fuzzy IFS scenes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate a scene and write the requested outputs.
    Run(RunArgs),
    /// Run the randomized property suites and the closed-form comparison.
    Verify(VerifyArgs),
    /// Rasterize a scene's final iterate, or the last iteration of a CSV dump.
    Render(RenderArgs),
}

#[derive(Args)]
struct RunArgs {
    scene: PathBuf,
    #[arg(long, conflicts_with = "tol")]
    steps: Option<usize>,
    /// Stop at the first m whose a-priori bound is at most T.
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    out_image: Option<PathBuf>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// JSON convergence report; printed to stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    mode: Option<NumericMode>,
    #[command(flatten)]
    raster: RasterArgs,
}

#[derive(Args)]
struct RasterArgs {
    /// Image resolution as WxH.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    /// World window as x0,y0,x1,y1.
    #[arg(long, value_parser = parse_bbox)]
    bbox: Option<BBox>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Cases per randomized suite.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Iteration depth for the closed-form comparison and the bounds.
    #[arg(long, default_value_t = 8)]
    depth: usize,
    #[arg(long, default_value_t = VerifyConfig::default().seed)]
    seed: u64,
    /// Mis-set the second grey map to t/2 before the closed-form comparison.
    #[arg(long)]
    inject_fault: bool,
}

#[derive(Args)]
struct RenderArgs {
    input: PathBuf,
    #[arg(long)]
    out_image: PathBuf,
    #[command(flatten)]
    raster: RasterArgs,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WxH")?;
    let num = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    let (w, h) = (num(w)?, num(h)?);
    if w == 0 || h == 0 {
        return Err("resolution must be positive".into());
    }
    Ok((w, h))
}

fn parse_bbox(s: &str) -> Result<BBox, String> {
    let v = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if v.len() != 4 {
        return Err("expected x0,y0,x1,y1".into());
    }
    BBox::new([v[0], v[1]], [v[2], v[3]]).map_err(|e| e.to_string())
}

fn write(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn run(args: RunArgs) -> anyhow::Result<()> {
    let scene = Scene::load(&args.scene)?;
    let stop = match (args.steps, &args.tol) {
        (Some(n), _) => Some(StopSpec::Steps(n)),
        (None, Some(t)) => Some(StopSpec::Tolerance(parse_rational(t)?)),
        (None, None) => None,
    };
    let opts = RunOptions {
        stop,
        mode: args.mode,
        grid: args.raster.grid,
        bbox: args.raster.bbox,
        want_csv: args.out_csv.is_some(),
        want_image: args.out_image.is_some(),
    };
    let out = run_scene(&scene, &opts)?;
    if let (Some(path), Some(csv)) = (&args.out_csv, &out.csv) {
        write(path, csv.as_bytes())?;
    }
    if let (Some(path), Some(pgm)) = (&args.out_image, &out.pgm) {
        write(path, pgm)?;
    }
    match &args.report {
        Some(path) => write(path, out.report_json().as_bytes())?,
        None => print!("{}", out.report_json()),
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> anyhow::Result<bool> {
    let cfg = VerifyConfig {
        trials: args.trials,
        depth: args.depth,
        seed: args.seed,
        inject_fault: args.inject_fault,
    };
    let results = run_all(&cfg)?;
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed()).count();
    println!(
        "{} of {} suites passed (seed {})",
        results.len() - failed,
        results.len(),
        cfg.seed
    );
    Ok(failed == 0)
}

fn render(args: RenderArgs) -> anyhow::Result<()> {
    let text = fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let is_csv = args
        .input
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
        || text.trim_start().starts_with('x');
    let pgm = if is_csv {
        render_csv(&text, args.raster.grid, args.raster.bbox)?
    } else {
        let scene = Scene::parse(&text)?;
        let opts = RunOptions {
            grid: args.raster.grid,
            bbox: args.raster.bbox,
            want_image: true,
            ..Default::default()
        };
        run_scene(&scene, &opts)?
            .pgm
            .ok_or_else(|| anyhow!("no image produced"))?
    };
    write(&args.out_image, &pgm)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::CapExceeded { .. }) => EXIT_CAP,
        _ => EXIT_INVALID,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => run(a).map(|()| true),
        Command::Verify(a) => verify(a),
        Command::Render(a) => render(a).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFY),
        Err(err) => {
            eprintln!("error: {err:#}");
            if let Some(Error::CapExceeded {
                partial: Some(report),
                ..
            }) = err.downcast_ref::<Error>()
            {
                eprintln!(
                    "partial run: {} iterations, support size {}",
                    report.iterations, report.support_size
                );
            }
            ExitCode::from(exit_code(&err))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_and_bbox_arguments() {
        assert_eq!(parse_grid("64x32"), Ok((64, 32)));
        assert!(parse_grid("0x4").is_err());
        assert!(parse_grid("64").is_err());
        let b = parse_bbox("0,0,1,0.5").unwrap();
        assert_eq!((b.lo, b.hi), ([0.0, 0.0], [1.0, 0.5]));
        assert!(parse_bbox("0,0,0,1").is_err());
        assert!(parse_bbox("0,0,1").is_err());
    }

    #[test]
    fn command_line_parses() {
        Cli::try_parse_from([
            "fuzzy-ifs",
            "run",
            "s.json",
            "--steps",
            "3",
            "--mode",
            "float",
        ])
        .unwrap();
        assert!(Cli::try_parse_from([
            "fuzzy-ifs",
            "run",
            "s.json",
            "--steps",
            "3",
            "--tol",
            "0.1"
        ])
        .is_err());
        Cli::try_parse_from(["fuzzy-ifs", "verify", "--trials", "10", "--seed", "7"]).unwrap();
    }
}
