mod failure;
mod grid;
mod render;

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hmorph_core::catalog::{get_example_with, list_examples, CatalogEntry, ExampleOptions, Mu1Variant};
use hmorph_core::complex_core::parse_complex;
use hmorph_core::system_json::{load_system_spec, ComplexText, SystemSpec};
use hmorph_core::verify::{scan_point, verify_entry, ScanRow, VerifyOptions};
use hmorph_core::{tol, C64};
use rayon::prelude::*;
use serde::Serialize;

use failure::CliFailure;
use grid::Grid;

/// Harmonic morphisms from Hermitian structures on R^2m.
#[derive(Parser)]
#[command(name = "hmorph", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in examples.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Run the full verification pipeline on one system.
    Verify {
        #[command(flatten)]
        target: Target,
        /// Number of sample points.
        #[arg(long, default_value_t = tol::VERIFY_POINTS)]
        points: usize,
        /// Seed for every random choice.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Harmonicity tolerance; overrides HMORPH_TOL.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// One Newton solve at a point.
    Solve {
        #[command(flatten)]
        target: Target,
        /// q as comma-separated "re+imj" values or a JSON array.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long)]
        json: bool,
    },
    /// Residual and det K scan over a grid, written as CSV.
    Scan {
        #[command(flatten)]
        target: Target,
        /// `N` (N points on each Re q^j) or `x1=lo:hi:n,x3=lo:hi:n,...`.
        #[arg(long, default_value = "10", allow_hyphen_values = true)]
        grid: String,
        /// Half-width for the `N` form; defaults to the example's sampling radius.
        #[arg(long)]
        radius: Option<f64>,
        /// Output file, or `-` for stdout.
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a built-in example as a system-spec file.
    Export {
        name: String,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        variant: Option<String>,
    },
}

#[derive(Args)]
struct Target {
    /// Built-in example name.
    name: Option<String>,
    /// System-spec JSON file.
    #[arg(long, conflicts_with = "name")]
    system: Option<PathBuf>,
    /// Dimension for examples defined for every m.
    #[arg(long)]
    m: Option<usize>,
    /// mu1 choice for family3 and family4: mixed or z1only.
    #[arg(long)]
    variant: Option<String>,
    /// Which seed selects the solution branch.
    #[arg(long, default_value_t = 0)]
    seed_index: usize,
}

fn example(name: &str, m: Option<usize>, variant: Option<&str>) -> Result<CatalogEntry, CliFailure> {
    let mut opts = ExampleOptions::default();
    opts.m = m;
    if let Some(v) = variant {
        opts.mu1 = Mu1Variant::parse(v)?;
    }
    Ok(get_example_with(name, &opts)?)
}

fn read_input(path: &Path) -> Result<String, CliFailure> {
    std::fs::read_to_string(path).map_err(|e| CliFailure::Input(format!("cannot read {}: {e}", path.display())))
}

impl Target {
    fn load(&self) -> Result<CatalogEntry, CliFailure> {
        match (&self.name, &self.system) {
            (Some(name), None) => example(name, self.m, self.variant.as_deref()),
            (None, Some(path)) => {
                let loaded = load_system_spec(&read_input(path)?)?;
                Ok(CatalogEntry::from_loaded(loaded)?)
            }
            _ => Err(CliFailure::Input("give an example name or --system FILE".into())),
        }
    }
}

fn harmonic_tol(flag: Option<f64>) -> Result<f64, CliFailure> {
    let t = match flag {
        Some(t) => t,
        None => match std::env::var("HMORPH_TOL") {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| CliFailure::Input(format!("HMORPH_TOL={s:?} is not a number")))?,
            Err(_) => tol::HARMONIC_TOL,
        },
    };
    if !(t.is_finite() && t > 0.0) {
        return Err(CliFailure::Input(format!("tolerance must be positive, got {t}")));
    }
    Ok(t)
}

fn parse_point(text: &str) -> Result<Vec<C64>, CliFailure> {
    let t = text.trim();
    if t.starts_with('[') {
        let items: Vec<ComplexText> =
            serde_json::from_str(t).map_err(|e| CliFailure::Input(format!("bad point {text:?}: {e}")))?;
        Ok(items.iter().map(ComplexText::to_complex).collect::<Result<_, _>>()?)
    } else {
        Ok(t.split(',').map(parse_complex).collect::<Result<_, _>>()?)
    }
}

fn emit(text: &str) -> Result<(), CliFailure> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliFailure::Output(e.to_string()))
}

fn to_json<T: Serialize>(v: &T) -> Result<String, CliFailure> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| CliFailure::Output(e.to_string()))
}

#[derive(Serialize)]
struct ListItem<'a> {
    name: &'a str,
    summary: &'a str,
}

#[derive(Serialize)]
struct SolveOutput {
    id: String,
    seed_index: usize,
    q: Vec<C64>,
    z: Vec<C64>,
    det_k: C64,
    residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    explicit_z: Option<Vec<C64>>,
}

fn run(cli: Cli) -> Result<bool, CliFailure> {
    match cli.command {
        Command::List { json } => {
            let rows = list_examples();
            let text = if json {
                let items: Vec<ListItem> = rows.iter().map(|&(name, summary)| ListItem { name, summary }).collect();
                to_json(&items)?
            } else {
                render::list_table(&rows)
            };
            emit(&text)?;
            Ok(true)
        }
        Command::Verify {
            target,
            points,
            seed,
            tol,
            json,
        } => {
            let entry = target.load()?;
            let opts = VerifyOptions {
                points,
                seed,
                seed_index: target.seed_index,
                harmonic_tol: harmonic_tol(tol)?,
                ..Default::default()
            };
            let report = verify_entry(&entry, &opts)?;
            let text = if json { to_json(&report)? } else { render::report_table(&report) };
            emit(&text)?;
            Ok(report.overall.is_pass())
        }
        Command::Solve { target, at, json } => {
            let entry = target.load()?;
            let q = parse_point(&at)?;
            if q.len() != entry.m {
                return Err(CliFailure::Input(format!("--at needs {} coordinates, got {}", entry.m, q.len())));
            }
            let branch = entry.branch(target.seed_index)?;
            let z = branch.solve_z(&q)?;
            let sys = branch.system();
            let (_, det) = sys.checked_jacobian(&q, &z)?;
            let residual = branch.residual(&q, &z)?;
            let explicit_z = match &entry.closed_form {
                Some(cf) => Some(cf.eval(&q)?),
                None => None,
            };
            let out = SolveOutput {
                id: entry.name.clone(),
                seed_index: target.seed_index,
                q,
                z,
                det_k: det,
                residual,
                explicit_z,
            };
            let text = if json {
                to_json(&out)?
            } else {
                let mut s = format!(
                    "q        = {}\nz        = {}\ndet K    = {}  (|det K| = {:.3e})\nresidual = {:.3e}\n",
                    render::complex_vec(&out.q),
                    render::complex_vec(&out.z),
                    hmorph_core::complex_core::format_complex(det),
                    det.norm(),
                    residual
                );
                if let Some(e) = &out.explicit_z {
                    let dev = e.iter().zip(&out.z).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                    s += &format!("explicit = {}  (max deviation {dev:.3e})\n", render::complex_vec(e));
                }
                s
            };
            emit(&text)?;
            Ok(true)
        }
        Command::Scan {
            target,
            grid,
            radius,
            out,
        } => {
            let entry = target.load()?;
            let branch = entry.branch(target.seed_index)?;
            let g = Grid::parse(&grid, branch.seed_q(), radius.unwrap_or(entry.sample_radius))?;
            let mut sink: Box<dyn Write> = if out.as_os_str() == "-" {
                Box::new(std::io::stdout().lock())
            } else {
                Box::new(File::create(&out).map_err(|e| CliFailure::Output(format!("cannot write {}: {e}", out.display())))?)
            };
            let rows: Vec<ScanRow> = (0..g.len())
                .into_par_iter()
                .map(|i| scan_point(&branch, i, &g.point(i)))
                .collect();
            write_csv(&mut sink, entry.m, branch.system().k(), &rows)
                .map_err(|e| CliFailure::Output(format!("cannot write {}: {e}", out.display())))?;
            Ok(true)
        }
        Command::Export { name, m, variant } => {
            let entry = example(&name, m, variant.as_deref())?;
            emit(&(SystemSpec::from_entry(&entry).to_json()? + "\n"))?;
            Ok(true)
        }
    }
}

/// Header: index, status, q<j>_re, q<j>_im, det_k_abs, lap<a>_abs,
/// f_residual, holomorphicity_residual.
fn write_csv(sink: &mut dyn Write, m: usize, k: usize, rows: &[ScanRow]) -> Result<(), Box<dyn std::error::Error>> {
    let mut w = csv::Writer::from_writer(sink);
    let mut header = vec!["index".to_string(), "status".to_string()];
    for j in 1..=m {
        header.push(format!("q{j}_re"));
        header.push(format!("q{j}_im"));
    }
    header.push("det_k_abs".into());
    header.extend((1..=k).map(|a| format!("lap{a}_abs")));
    header.push("f_residual".into());
    header.push("holomorphicity_residual".into());
    w.write_record(&header)?;
    for r in rows {
        let mut nums: Vec<f64> = r.q.iter().flat_map(|c| [c.re, c.im]).collect();
        nums.push(r.det_abs);
        nums.extend(&r.lap_abs);
        nums.push(r.f_residual);
        nums.push(r.holomorphicity);
        let finite = nums.iter().all(|x| x.is_finite());
        let status = if finite { r.status.clone() } else { "nonfinite".into() };
        let mut rec = vec![r.index.to_string(), status];
        rec.extend(nums.iter().map(|x| if x.is_finite() { x.to_string() } else { "0".into() }));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
