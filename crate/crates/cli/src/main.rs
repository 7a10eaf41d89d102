//! `gk-kaczmarz`: run Kaczmarz solvers on MatrixMarket or generated
//! tomography problems and export convergence traces as CSV.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gk_kaczmarz::io::{read_matrix_market_file, read_vector_file};
use gk_kaczmarz::tomo::{Geometry, TomoProblem};
use gk_kaczmarz::trace::{write_compare_csv, write_trace_csv};
use gk_kaczmarz::{run, CostModel, IterationTrace, SolverConfig, SparseRowMatrix, Variant, Weighting, WindowSize};
use rayon::prelude::*;

#[derive(Parser)]
#[command(
    name = "gk-kaczmarz",
    version,
    about = "Accelerated Kaczmarz solvers for sparse consistent systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver configuration and write its per-cycle trace.
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Solver variant.
        #[arg(long, default_value = "k-aff-fast")]
        variant: Variant,
        /// Window length ℓ, or `all` for an unbounded window.
        #[arg(long, default_value = "10")]
        ell: WindowSize,
        /// Trace CSV destination.
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Run several variants and window lengths; emit one long-format CSV.
    Compare {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Comma-separated variants.
        #[arg(long, value_delimiter = ',', required = true)]
        variants: Vec<String>,
        /// Comma-separated window lengths for the windowed variants.
        #[arg(long, value_delimiter = ',', default_value = "10")]
        ells: Vec<WindowSize>,
        /// CSV destination; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a generated tomography problem as A.mtx, b.txt and x_star.txt.
    ExportTomo {
        /// Image side length N.
        n: usize,
        /// Rays per angle; defaults to round(√2·N).
        #[arg(long)]
        rays: Option<usize>,
        /// Number of equispaced angles over [0°, 180°).
        #[arg(long, default_value_t = 180)]
        angles: usize,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct ProblemArgs {
    /// System matrix in MatrixMarket coordinate format.
    #[arg(long, requires = "rhs", conflicts_with = "tomo")]
    matrix: Option<PathBuf>,
    /// Right-hand side, one value per line.
    #[arg(long, requires = "matrix")]
    rhs: Option<PathBuf>,
    /// Known solution, enables the error column.
    #[arg(long, conflicts_with = "tomo")]
    solution: Option<PathBuf>,
    /// Generate an N×N parallel-beam tomography problem instead.
    #[arg(long, required_unless_present = "matrix")]
    tomo: Option<usize>,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 100)]
    max_cycles: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Row sampling for the random variants: uniform or rownorm.
    #[arg(long, default_value = "uniform")]
    weighting: Weighting,
    /// Keep the rows in file order.
    #[arg(long)]
    no_shuffle: bool,
}

struct Problem {
    a: SparseRowMatrix,
    b: Vec<f64>,
    x_star: Option<Vec<f64>>,
}

impl ProblemArgs {
    fn load(&self) -> Result<Problem, String> {
        if let Some(n) = self.tomo {
            let p = TomoProblem::with_defaults(n).map_err(|e| format!("--tomo {n}: {e}"))?;
            return Ok(Problem {
                a: p.matrix,
                b: p.b,
                x_star: Some(p.x_star),
            });
        }
        let path = self.matrix.as_ref().expect("clap enforces --matrix or --tomo");
        let a = read_matrix_market_file(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let rhs = self.rhs.as_ref().expect("clap enforces --rhs with --matrix");
        let b = read_vector_file(rhs).map_err(|e| format!("{}: {e}", rhs.display()))?;
        let x_star = match &self.solution {
            Some(p) => Some(read_vector_file(p).map_err(|e| format!("{}: {e}", p.display()))?),
            None => None,
        };
        Ok(Problem { a, b, x_star })
    }
}

impl SolverArgs {
    fn config(&self, variant: Variant, ell: WindowSize) -> SolverConfig {
        SolverConfig::new(variant)
            .with_ell(ell)
            .with_max_cycles(self.max_cycles)
            .with_tol(self.tol)
            .with_seed(self.seed)
            .with_weighting(self.weighting)
            .with_shuffle(!self.no_shuffle)
    }
}

fn solve_one(p: &Problem, cfg: &SolverConfig) -> Result<IterationTrace, String> {
    let x0 = vec![0.0; p.a.n_cols()];
    run(&p.a, &p.b, &x0, p.x_star.as_deref(), cfg).map_err(|e| e.to_string())
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, String> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| format!("{}: {e}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_solve(
    problem: &ProblemArgs,
    solver: &SolverArgs,
    variant: Variant,
    ell: WindowSize,
    trace_out: Option<&PathBuf>,
) -> Result<(), String> {
    let p = problem.load()?;
    let cfg = solver.config(variant, ell);
    let trace = solve_one(&p, &cfg)?;
    if let Some(path) = trace_out {
        let out = output(Some(path))?;
        write_trace_csv(&trace.rows(), out).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    println!("variant: {variant}");
    println!("status: {}", trace.status);
    println!("cycles: {}", trace.cycles());
    match trace.final_error {
        Some(e) => println!("final error: {e:e}"),
        None => println!("final error: unknown (no --solution)"),
    }
    println!("flops: {}", trace.total_flops().0);
    println!("breakdown resets: {}", trace.breakdown_resets);
    Ok(())
}

fn cmd_compare(
    problem: &ProblemArgs,
    solver: &SolverArgs,
    variants: &[String],
    ells: &[WindowSize],
    out: Option<&PathBuf>,
) -> Result<(), String> {
    let variants: Vec<Variant> = variants
        .iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Variant>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    if variants.is_empty() {
        return Err("--variants: empty variant list".into());
    }
    if ells.is_empty() {
        return Err("--ells: empty window list".into());
    }
    let mut configs = Vec::new();
    for &v in &variants {
        if v.uses_window() {
            configs.extend(ells.iter().map(|&l| solver.config(v, l)));
        } else {
            configs.push(solver.config(v, WindowSize::Bounded(1)));
        }
    }
    for cfg in &configs {
        cfg.validate().map_err(|e| e.to_string())?;
    }
    let p = problem.load()?;
    let traces: Vec<IterationTrace> = configs
        .par_iter()
        .map(|cfg| solve_one(&p, cfg))
        .collect::<Result<_, _>>()?;
    let rows: Vec<_> = traces.iter().flat_map(IterationTrace::compare_rows).collect();
    let sink = output(out)?;
    write_compare_csv(&rows, sink).map_err(|e| e.to_string())?;

    let model = CostModel::for_matrix(&p.a);
    let mut log = io::stderr().lock();
    let _ = writeln!(
        log,
        "problem: m = {}, n = {}, nnz = {}",
        p.a.n_rows(),
        p.a.n_cols(),
        p.a.nnz()
    );
    for l in ells.iter().filter_map(WindowSize::get) {
        let _ = writeln!(log, "oncost({l}) = {:.4}", model.oncost(l));
    }
    for t in &traces {
        let label = if t.variant.uses_window() {
            format!("{}({})", t.variant, t.ell)
        } else {
            t.variant.to_string()
        };
        let err = t.final_error.map_or("-".to_string(), |e| format!("{e:.3e}"));
        let _ = writeln!(
            log,
            "{label:<16} {:<10} cycles {:>5}  error {err}",
            t.status,
            t.cycles()
        );
    }
    Ok(())
}

fn cmd_export(n: usize, rays: Option<usize>, angles: usize, out_dir: &PathBuf) -> Result<(), String> {
    let mut geometry = Geometry::default_for(n);
    if let Some(r) = rays {
        geometry.rays = r;
    }
    geometry.angles = (0..angles).map(|i| 180.0 * i as f64 / angles as f64).collect();
    let p = TomoProblem::new(geometry).map_err(|e| e.to_string())?;
    p.export(out_dir).map_err(|e| format!("{}: {e}", out_dir.display()))?;
    println!(
        "wrote {} ({} x {}, nnz {})",
        out_dir.display(),
        p.matrix.n_rows(),
        p.matrix.n_cols(),
        p.matrix.nnz()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Solve {
            problem,
            solver,
            variant,
            ell,
            trace_out,
        } => cmd_solve(problem, solver, *variant, *ell, trace_out.as_ref()),
        Command::Compare {
            problem,
            solver,
            variants,
            ells,
            out,
        } => cmd_compare(problem, solver, variants, ells, out.as_ref()),
        Command::ExportTomo {
            n,
            rays,
            angles,
            out_dir,
        } => cmd_export(*n, *rays, *angles, out_dir),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
