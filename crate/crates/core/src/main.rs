use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use prcd::analysis::{estimate_gebp_constants, estimate_sigma_w, RateBundle};
use prcd::harness::config::Loss;
use prcd::harness::{
    error_bound_counterexample, reference_optimum, run_experiment, write_matrix_market,
    write_report, write_trace, write_vector, ExperimentConfig, ProblemSource,
};
use prcd::{Error, Mode, Result, SamplerConfig, SamplingScheme, Solver, SolverConfig, StopRule};

#[derive(Parser)]
#[command(name = "prcd", version, about = "Parallel randomized block-coordinate descent")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a problem and write A (MatrixMarket) and b.
    Generate {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value = "A.mtx")]
        out_matrix: PathBuf,
        #[arg(long, default_value = "b.txt")]
        out_rhs: PathBuf,
    },
    /// Solve one problem with one solver configuration.
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Run the configured (mode, tau, seed) grid against a reference optimum.
    Compare {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Evaluate the rate bounds for given constants.
    Bounds(BoundsArgs),
    /// Fit error-bound constants from sample points around the optimum.
    GebpFit {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        fit: FitArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceArg {
    Lasso,
    Logistic,
    Dual,
    Load,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Prcd,
    Pcdm1,
    Full,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Prcd => Mode::Prcd,
            ModeArg::Pcdm1 => Mode::Pcdm1,
            ModeArg::Full => Mode::FullProxGrad,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    TauNice,
    PartitionShuffle,
}

impl From<SchemeArg> for SamplingScheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::TauNice => SamplingScheme::TauNice,
            SchemeArg::PartitionShuffle => SamplingScheme::PartitionShuffle,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LossArg {
    Lasso,
    Logistic,
}

/// Problem selection. Flags override the `[problem]` section of `--config`.
#[derive(Args)]
struct ProblemArgs {
    /// TOML experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    source: Option<SourceArg>,
    /// Rows (lasso) or samples (logistic).
    #[arg(long)]
    m: Option<usize>,
    /// Columns (lasso, logistic) or components (dual).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    sparsity: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lower: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    upper: Option<f64>,
    #[arg(long)]
    block_size: Option<usize>,
    #[arg(long)]
    linking_rows: Option<usize>,
    #[arg(long)]
    linking_width: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    primal_block: Option<usize>,
    /// MatrixMarket file for `--source load`.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Right-hand side or labels for `--source load`.
    #[arg(long)]
    rhs: Option<PathBuf>,
    #[arg(long, value_enum)]
    loss: Option<LossArg>,
    /// Seed of the problem generator.
    #[arg(long)]
    problem_seed: Option<u64>,
}

impl ProblemArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        let p = &mut c.problem;
        if let Some(s) = self.source {
            p.source = match s {
                SourceArg::Lasso => ProblemSource::GenerateLasso,
                SourceArg::Logistic => ProblemSource::GenerateLogistic,
                SourceArg::Dual => ProblemSource::GenerateDual,
                SourceArg::Load => ProblemSource::LoadMatrix,
            };
        }
        macro_rules! set {
            ($($f:ident),*) => {$(if let Some(v) = self.$f.clone() { p.$f = v; })*};
        }
        set!(m, n, sparsity, lambda, block_size, linking_rows, linking_width, sigma, primal_block);
        if self.lower.is_some() {
            p.lower = self.lower;
        }
        if self.upper.is_some() {
            p.upper = self.upper;
        }
        if self.matrix.is_some() {
            p.matrix = self.matrix.clone();
        }
        if self.rhs.is_some() {
            p.rhs = self.rhs.clone();
        }
        if let Some(l) = self.loss {
            p.loss = match l {
                LossArg::Lasso => Loss::Lasso,
                LossArg::Logistic => Loss::Logistic,
            };
        }
        if let Some(s) = self.problem_seed {
            p.seed = s;
        }
        Ok(c)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum, default_value = "prcd")]
    mode: ModeArg,
    #[arg(long, default_value_t = 1)]
    tau: usize,
    /// Sampler seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "tau-nice")]
    scheme: SchemeArg,
    /// Stop once the W-norm of the proximal-gradient mapping is below this.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Stop on the gap to this known optimal value instead.
    #[arg(long, allow_hyphen_values = true)]
    f_star: Option<f64>,
    #[arg(long, default_value_t = 1e-8)]
    gap_tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_iters: u64,
    #[arg(long, env = "PRCD_WORKERS", default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value_t = 1)]
    log_stride: u64,
    /// Write the trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the final iterate, one value per line.
    #[arg(long)]
    out_x: Option<PathBuf>,
    /// Record zero elapsed time, making trace files reproducible.
    #[arg(long)]
    no_time: bool,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, value_enum, value_delimiter = ',')]
    modes: Option<Vec<ModeArg>>,
    #[arg(long, value_delimiter = ',')]
    taus: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    #[arg(long)]
    relative_gap: Option<f64>,
    #[arg(long)]
    max_iters: Option<u64>,
    #[arg(long, env = "PRCD_WORKERS")]
    workers: Option<usize>,
    #[arg(long)]
    log_stride: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_traces: bool,
    #[arg(long)]
    no_time: bool,
}

#[derive(Args)]
struct BoundsArgs {
    /// Number of blocks N.
    #[arg(long)]
    blocks: usize,
    #[arg(long)]
    tau: usize,
    #[arg(long)]
    r_w: f64,
    /// Initial gap F(x0) - F*.
    #[arg(long)]
    delta0: f64,
    #[arg(long)]
    sigma_w: Option<f64>,
    #[arg(long)]
    kappa1: Option<f64>,
    #[arg(long)]
    kappa2: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    /// Iteration counts at which to print the sublinear bound.
    #[arg(long, value_delimiter = ',', default_value = "0,10,100,1000,10000")]
    k: Vec<u64>,
}

#[derive(Args)]
struct FitArgs {
    /// Use the two-variable problem on which no classical error bound holds.
    #[arg(long)]
    counterexample: bool,
    #[arg(long, default_value_t = 50)]
    samples: usize,
    /// Largest W-distance of a sample from the optimum.
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = 0)]
    sample_seed: u64,
    #[arg(long, env = "PRCD_WORKERS", default_value_t = 1)]
    workers: usize,
}

fn generate(problem: ProblemArgs, out_matrix: PathBuf, out_rhs: PathBuf) -> Result<()> {
    let cfg = problem.config()?;
    let g = cfg.problem.build()?;
    write_matrix_market(&out_matrix, &g.matrix)?;
    write_vector(&out_rhs, &g.rhs)?;
    println!(
        "wrote {} x {} matrix ({} nonzeros) to {} and {} values to {}",
        g.matrix.rows,
        g.matrix.cols,
        g.matrix.entries.len(),
        out_matrix.display(),
        g.rhs.len(),
        out_rhs.display()
    );
    println!("omega = {}, omega_bar = {}", g.omega(), g.omega_bar());
    Ok(())
}

fn solve(problem: ProblemArgs, a: SolveArgs) -> Result<()> {
    let cfg = problem.config()?;
    let g = cfg.problem.build()?;
    let prob = &g.problem;
    let stop = match a.f_star {
        Some(f_star) => StopRule::Gap {
            f_star,
            tol: a.gap_tol,
        },
        None => StopRule::MappingNorm { tol: a.tol },
    };
    let tau = match a.mode {
        ModeArg::Full => prob.num_blocks(),
        _ => a.tau,
    };
    let sc = SolverConfig {
        mode: a.mode.into(),
        sampler: SamplerConfig {
            scheme: a.scheme.into(),
            tau,
            seed: a.seed,
        },
        max_iters: a.max_iters,
        stop,
        workers: a.workers,
        log_stride: a.log_stride,
        record_time: !a.no_time,
        ..SolverConfig::default()
    };
    let x0 = vec![0.0; prob.dim()];
    let out = Solver::new(prob, sc, &x0)?.run()?;
    println!(
        "n = {}, N = {}, N_bar = {}, omega = {}, omega_bar = {}",
        prob.dim(),
        prob.num_blocks(),
        prob.num_components(),
        g.omega(),
        g.omega_bar()
    );
    println!("status: {:?}", out.status);
    println!("iterations: {}", out.iterations);
    println!("coordinate updates / N: {}", out.coordinate_updates as f64 / prob.num_blocks() as f64);
    println!("F: {:.12e}", out.objective);
    println!("mapping norm: {:.6e}", out.mapping_norm);
    if let Some(p) = a.trace {
        write_trace(&p, &out.trace, a.f_star.unwrap_or(0.0), prob.num_blocks())?;
    }
    if let Some(p) = a.out_x {
        write_vector(&p, &out.x)?;
    }
    Ok(())
}

fn compare(problem: ProblemArgs, a: GridArgs) -> Result<()> {
    let mut cfg = problem.config()?;
    let s = &mut cfg.solver;
    if let Some(m) = a.modes {
        s.modes = m.into_iter().map(Mode::from).collect();
    }
    if let Some(t) = a.taus {
        s.taus = t;
    }
    if let Some(v) = a.seeds {
        s.seeds = v;
    }
    if let Some(v) = a.scheme {
        s.scheme = v.into();
    }
    if let Some(v) = a.relative_gap {
        s.relative_gap = v;
    }
    if let Some(v) = a.max_iters {
        s.max_iters = v;
    }
    if let Some(v) = a.workers {
        s.workers = v;
    }
    if let Some(v) = a.log_stride {
        s.log_stride = v;
    }
    if a.no_time {
        s.record_time = false;
    }
    if let Some(d) = a.out {
        cfg.output.dir = d;
    }
    if a.no_traces {
        cfg.output.traces = false;
    }
    let g = cfg.problem.build()?;
    let report = run_experiment(&g.problem, g.matrix.rows, &cfg)?;
    write_report(&report, &cfg.output.dir, cfg.output.traces, g.problem.num_blocks())?;
    if !report.reference_converged {
        eprintln!("warning: reference solve hit its iteration cap; F* is approximate");
    }
    println!(
        "{:>8} {:>8} {:>10} {:>6} {:>6} {:>6} {:>6} {:>14} {:>14} {:>18}",
        "n", "m", "sparsity", "w_bar", "w", "tau", "seed", "prcd tk/n", "pcdm1 tk/n", "F*"
    );
    let fmt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.2}"));
    for r in report.summary() {
        println!(
            "{:>8} {:>8} {:>10.2e} {:>6} {:>6} {:>6} {:>6} {:>14} {:>14} {:>18.10e}",
            r.n,
            r.m,
            r.sparsity,
            r.omega_bar,
            r.omega,
            r.tau,
            r.seed,
            fmt(r.prcd_updates),
            fmt(r.pcdm1_updates),
            r.f_star
        );
    }
    println!("results in {}", cfg.output.dir.display());
    Ok(())
}

fn bounds(a: BoundsArgs) -> Result<()> {
    let b = RateBundle {
        num_blocks: a.blocks,
        tau: a.tau,
        r_w: a.r_w,
        delta0: a.delta0,
        sigma_w: a.sigma_w,
        kappa1: a.kappa1,
        kappa2: a.kappa2,
    };
    b.validate()?;
    println!("{:>12} {:>22}", "k", "sublinear bound");
    for k in &a.k {
        println!("{k:>12} {:>22.15e}", b.sublinear_bound(*k as f64));
    }
    if b.sigma_w.is_some() {
        println!("strongly convex factor: {:.15e}", b.strongly_convex_factor()?);
    }
    if b.kappa1.is_some() || b.kappa2.is_some() {
        let c = b.gebp_constants()?;
        println!(
            "c_kappa = {:.15e}, c1 = {:.15e}, c2 = {:.15e}, c3 = {:.15e}",
            c.c_kappa, c.c1, c.c2, c.c3
        );
        println!("theta: {:.15e}", c.theta);
    }
    if let (Some(eps), Some(rho)) = (a.eps, a.rho) {
        println!("sublinear iterations: {}", b.sublinear_confidence_iters(eps, rho)?);
        if b.kappa1.is_some() || b.kappa2.is_some() {
            println!("error-bound iterations: {}", b.gebp_confidence_iters(eps, rho)?);
        }
    }
    Ok(())
}

fn gebp_fit(problem: ProblemArgs, a: FitArgs) -> Result<()> {
    if a.counterexample {
        let prob = error_bound_counterexample()?;
        let points: Vec<Vec<f64>> = (1..=a.samples.max(1)).map(|t| vec![t as f64; 2]).collect();
        let fit = estimate_gebp_constants(&prob, |x| vec![0.0; x.len()], &points)?;
        println!("{:>6} {:>14} {:>14} {:>14}", "t", "distance", "mapping", "ratio");
        for (t, s) in fit.samples.iter().enumerate() {
            println!(
                "{:>6} {:>14.6e} {:>14.6e} {:>14.6e}",
                t + 1,
                s.distance,
                s.mapping_norm,
                s.distance / s.mapping_norm
            );
        }
        print_fit(&fit);
        return Ok(());
    }
    if !(a.radius > 0.0) {
        return Err(Error::Input(format!("radius must be positive, got {}", a.radius)));
    }
    let cfg = problem.config()?;
    let g = cfg.problem.build()?;
    let prob = &g.problem;
    let x0 = vec![0.0; prob.dim()];
    let reference = reference_optimum(prob, &prob.project(&x0), 1e-12, 1_000_000, a.workers)?;
    let xstar = reference.x;
    let mut rng = ChaCha8Rng::seed_from_u64(a.sample_seed);
    let mut points = Vec::with_capacity(a.samples);
    for _ in 0..a.samples {
        let dir: Vec<f64> = (0..prob.dim()).map(|_| rng.sample(StandardNormal)).collect();
        let nrm = prob.weights().norm(prob.partition(), &dir);
        let r = a.radius * rng.random::<f64>();
        let x: Vec<f64> = xstar.iter().zip(&dir).map(|(s, d)| s + r * d / nrm).collect();
        points.push(prob.project(&x));
    }
    // the reference solution stands in for the projection onto the optimal
    // set, which is exact when the minimizer is unique
    let fit = estimate_gebp_constants(prob, |_| xstar.clone(), &points)?;
    print_fit(&fit);
    if let Ok(s) = estimate_sigma_w(prob) {
        println!("sigma_W = {s:.12e}, 2 / sigma_W = {:.12e}", 2.0 / s);
    }
    Ok(())
}

fn print_fit(fit: &prcd::analysis::GebpFit) {
    println!("kappa1 = {:.12e}", fit.kappa1);
    println!("kappa2 = {:.12e}", fit.kappa2);
    println!("max violation = {:.3e}", fit.max_violation);
    if !fit.counter_witnesses.is_empty() {
        println!("counter-witnesses: {:?}", fit.counter_witnesses);
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.category() {
        "input" => 2,
        "parse" => 3,
        "structure" => 4,
        "io" => 5,
        _ => 70,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Generate {
            problem,
            out_matrix,
            out_rhs,
        } => generate(problem, out_matrix, out_rhs),
        Command::Solve { problem, solve: s } => solve(problem, s),
        Command::Compare { problem, grid } => compare(problem, grid),
        Command::Bounds(b) => bounds(b),
        Command::GebpFit { problem, fit } => gebp_fit(problem, fit),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error ({}): {e}", e.category());
            ExitCode::from(exit_code(&e))
        }
    }
}
