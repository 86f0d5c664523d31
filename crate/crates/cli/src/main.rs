//! `molcap`: molecular timing channel laboratory.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use molcap_cli::config::{SweepMode, SweepSpec};
use molcap_cli::emit::{emit, to_csv, EmitFormat, FitOverlay};
use molcap_cli::fit::{fit_rows, FitModel, XVar};
use molcap_cli::sweep::run_sweep;
use molcap_cli::{Error, Result};
use molcap_core::bounds::{ub_joint, ub_molecules, ub_time, BoundName, BoundReport};
use molcap_core::channel::{
    capacity_small, exact_mi, worker_rng, InputEnsemble, ReleasePattern, MAX_EXACT_MOLECULES,
    MAX_EXACT_SLOTS,
};
use molcap_core::schemes::{scheme_b_bound, scheme_c_mc_validate};
use molcap_core::{FirstArrivalDist, SchemeAParams, SchemeBParams, SchemeCParams};

#[derive(Parser)]
#[command(
    name = "molcap",
    version,
    about = "Discrete-time molecular timing channel laboratory",
    propagate_version = true
)]
struct Cli {
    /// JSON experiment config (see README for the schema).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config value.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte-Carlo trials; overrides the config value.
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Output file path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format for `sweep`.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Svg,
}

#[derive(Clone, Copy, ValueEnum)]
enum XArg {
    T,
    M,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    /// y = a·log₂x + b
    Log2,
    /// y = a·x + b
    Linear,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect and validate a first-arrival distribution.
    Dist {
        #[command(subcommand)]
        cmd: DistCmd,
    },
    /// Closed-form capacity bounds at one grid point.
    Bounds(BoundsArgs),
    /// Coding-scheme layouts, analytic bounds, and optional Monte-Carlo
    /// validation.
    Scheme {
        #[command(subcommand)]
        which: SchemeCmd,
    },
    /// Exact mutual information and capacity of a small instance.
    ExactMi(ExactMiArgs),
    /// Run the configured sweep and emit CSV or SVG.
    Sweep,
    /// Least-squares scaling fit over an emitted CSV.
    Fit(FitArgs),
}

#[derive(Subcommand)]
enum DistCmd {
    /// Validate the distribution and print a summary.
    Check {
        /// Plain-text table file (one probability per line, optional final
        /// `tail <value>`); defaults to the config's distribution.
        #[arg(long)]
        table: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    t: u64,
    #[arg(long)]
    m: u64,
    /// Budget ratio for the joint bound; defaults to m/t.
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Subcommand)]
enum SchemeCmd {
    /// Interval timing.
    A {
        #[arg(long)]
        t: u64,
        #[arg(long)]
        m: u64,
    },
    /// Amplitude levels with Chebyshev decoding.
    B {
        #[arg(long)]
        t: u64,
        #[arg(long)]
        m: u64,
        /// Chebyshev confidence (> 1); defaults to the config value or 2.
        #[arg(long)]
        k: Option<f64>,
    },
    /// Bernoulli release with binarized output.
    C {
        #[arg(long)]
        t: u64,
        /// Molecule budget; sets α = m/t when --alpha is absent.
        #[arg(long)]
        m: Option<u64>,
        /// Budget ratio; defaults to m/t or 1.
        #[arg(long)]
        alpha: Option<f64>,
        /// Release probability; defaults to the config value or 0.5.
        #[arg(long)]
        r: Option<f64>,
    },
}

#[derive(Args)]
struct ExactMiArgs {
    #[arg(long)]
    t: u64,
    #[arg(long)]
    m: u64,
    /// Capacity tolerance in bits.
    #[arg(long, default_value_t = molcap_core::channel::CAPACITY_DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args)]
struct FitArgs {
    /// CSV previously written by `sweep`.
    #[arg(long)]
    input: PathBuf,
    /// Column to fit, e.g. LB_schemeA.
    #[arg(long)]
    column: String,
    /// Grid coordinate on the x axis.
    #[arg(long, value_enum)]
    x: XArg,
    #[arg(long, value_enum)]
    model: ModelArg,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!(
                "{}",
                serde_json::json!({"error": e.to_string().lines().next().unwrap_or("bad usage")})
            );
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::json!({"error": e.to_string()}));
            ExitCode::FAILURE
        }
    }
}

struct Context {
    spec: Option<SweepSpec>,
    seed: Option<u64>,
    trials: Option<u64>,
}

impl Context {
    fn spec(&self) -> Result<&SweepSpec> {
        self.spec
            .as_ref()
            .ok_or_else(|| Error::Config("this command needs --config".to_string()))
    }

    fn dist(&self) -> Result<FirstArrivalDist<f64>> {
        self.spec()?.dist.build()
    }

    fn seed(&self) -> u64 {
        self.seed
            .or_else(|| self.spec.as_ref().map(|s| s.seed))
            .unwrap_or(0)
    }

    fn trials(&self) -> u64 {
        self.trials
            .or_else(|| self.spec.as_ref().map(|s| s.trials))
            .unwrap_or(0)
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut spec = match &cli.config {
        Some(path) => Some(SweepSpec::load(path)?),
        None => None,
    };
    // Flag > file precedence.
    if let Some(spec) = spec.as_mut() {
        if let Some(seed) = cli.seed {
            spec.seed = seed;
        }
        if let Some(trials) = cli.trials {
            spec.trials = trials;
        }
        spec.validate()?;
    }
    let ctx = Context {
        spec,
        seed: cli.seed,
        trials: cli.trials,
    };

    match cli.command {
        Command::Dist { cmd } => {
            let DistCmd::Check { table } = cmd;
            dist_check(&ctx, table)
        }
        Command::Bounds(args) => bounds(args),
        Command::Scheme { which } => scheme(&ctx, which),
        Command::ExactMi(args) => exact_mi_cmd(&ctx, args),
        Command::Sweep => sweep_cmd(&ctx, cli.format, cli.out),
        Command::Fit(args) => fit_cmd(args),
    }
}

fn dist_check(ctx: &Context, table: Option<PathBuf>) -> Result<()> {
    let dist = match table {
        Some(path) => {
            let text = std::fs::read_to_string(&path)?;
            FirstArrivalDist::from_table_text(&text)?
        }
        None => ctx.dist()?,
    };
    println!("n_max: {}", dist.n_max());
    println!("pmf[0]: {}", dist.instant_arrival_prob());
    println!("tail_mass: {}", dist.tail_mass());
    println!("F_N(n_max): {}", dist.cdf(dist.n_max() as i64));
    let head: Vec<f64> = dist.pmf_slice().iter().copied().take(8).collect();
    println!("pmf head: {head:?}");
    if dist.instant_arrival_prob() == 0.0 {
        println!("warning: p_N(0) = 0, the release scheme's per-slot rate I0 may vanish");
    }
    println!("ok");
    Ok(())
}

fn print_report(report: &BoundReport<f64>) {
    let params: Vec<String> = report
        .params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    println!(
        "{}: {} bits ({})",
        report.name.label(),
        report.value,
        params.join(", ")
    );
}

fn bounds(args: BoundsArgs) -> Result<()> {
    let (t, m) = (args.t, args.m);
    if t < 1 || m < 1 {
        return Err(Error::Config("bounds needs t ≥ 1 and m ≥ 1".to_string()));
    }
    let alpha = args.alpha.unwrap_or(m as f64 / t as f64);
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::Config(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let time = ub_time::<f64>(m, t);
    let mols = ub_molecules::<f64>(t, m);
    let joint = ub_joint::<f64>(t, alpha);
    let reports = [
        BoundReport::new(BoundName::UbTime, time.asymptotic),
        BoundReport::new(BoundName::UbTimeSafe, time.safe),
        BoundReport::new(BoundName::UbMolecules, mols.asymptotic),
        BoundReport::new(BoundName::UbMoleculesSafe, mols.safe),
        BoundReport::new(BoundName::UbJointEntropy, joint.entropy_form),
        BoundReport::new(BoundName::UbJointLinear, joint.linear_form),
    ];
    for report in reports {
        let report = report
            .with_param("t", t)
            .with_param("m", m)
            .with_param("alpha", alpha);
        print_report(&report);
    }
    Ok(())
}

fn scheme(ctx: &Context, which: SchemeCmd) -> Result<()> {
    let dist = ctx.dist()?;
    let trials = ctx.trials();
    match which {
        SchemeCmd::A { t, m } => {
            let params = SchemeAParams::new(t, m)?;
            println!("tau: {}", params.tau());
            println!("ell: {}", params.ell());
            let bound = params.bound(&dist)?;
            println!("P_e: {}", bound.p_err);
            let report = BoundReport::new(BoundName::LbSchemeA, bound.lb_sqrt)
                .with_param("t", t)
                .with_param("m", m)
                .with_param("tau", params.tau())
                .with_param("ell", params.ell());
            print_report(&report);
            println!("LB_schemeA_exact_ell: {} bits", bound.lb_exact_ell);
            if trials > 0 {
                let mut rng = worker_rng(ctx.seed(), 0);
                let rate: f64 = params.simulate_error_rate(&dist, trials, &mut rng);
                println!("mc_error_rate: {rate} ({trials} trials)");
            }
        }
        SchemeCmd::B { t, m, k } => {
            let k = k
                .or_else(|| ctx.spec.as_ref().and_then(|s| s.scheme.k))
                .unwrap_or(2.0);
            let bound = scheme_b_bound(t, m, k, &dist)?;
            if bound.noiseless {
                println!("noiseless: F_N(t) = 1, lossless amplitude readout");
            }
            println!("err_ub: {}", bound.err_ub);
            let report = BoundReport::new(BoundName::LbSchemeB, bound.lb)
                .with_param("t", t)
                .with_param("m", m)
                .with_param("k", k);
            print_report(&report);
            println!("K: {}", bound.k_const);
            if let Ok(params) = SchemeBParams::new(t, m, k, &dist) {
                println!("n_levels: {}", params.n_levels());
                let head: Vec<u64> = params.levels().iter().copied().take(8).collect();
                println!("levels head: {head:?}");
                if params.is_degenerate() {
                    println!("warning: a single level carries no information");
                }
                if trials > 0 {
                    let mut rng = worker_rng(ctx.seed(), 0);
                    let rate = params.simulate_error_rate(&dist, trials, &mut rng);
                    println!("mc_error_rate: {rate} ({trials} trials)");
                }
            }
        }
        SchemeCmd::C { t, m, alpha, r } => {
            let alpha = alpha.or(m.map(|m| m as f64 / t as f64)).unwrap_or(1.0);
            let r = r
                .or_else(|| ctx.spec.as_ref().and_then(|s| s.scheme.r))
                .unwrap_or(0.5);
            let params = SchemeCParams::new(t, alpha, r, &dist)?;
            println!("i0: {} bits/slot", params.i0());
            println!("slot_stride: {}", params.slot_stride());
            let report = BoundReport::new(BoundName::LbSchemeC, params.lower_bound())
                .with_param("t", t)
                .with_param("alpha", alpha)
                .with_param("r", r);
            print_report(&report);
            if dist.instant_arrival_prob() == 0.0 {
                println!("warning: p_N(0) = 0, I0 may vanish");
            }
            if trials > 0 {
                let mut rng = worker_rng(ctx.seed(), 0);
                let est = scheme_c_mc_validate(t, r, &dist, trials, &mut rng)?;
                let analytic: f64 = params.per_slot_mi().iter().sum();
                println!(
                    "mc_estimate: {} ± {} bits (analytic {analytic}, {trials} trials)",
                    est.mean_bits, est.std_err
                );
            }
        }
    }
    Ok(())
}

fn exact_mi_cmd(ctx: &Context, args: ExactMiArgs) -> Result<()> {
    let dist = ctx.dist()?;
    let (t, m) = (args.t, args.m);
    if t > MAX_EXACT_SLOTS || m > MAX_EXACT_MOLECULES {
        return Err(Error::Core(molcap_core::Error::TooLarge {
            slots: t,
            molecules: m,
            max_slots: MAX_EXACT_SLOTS,
            max_molecules: MAX_EXACT_MOLECULES,
        }));
    }
    let patterns = ReleasePattern::enumerate_all(t, m)?;
    println!("patterns: {}", patterns.len());
    let uniform = InputEnsemble::uniform(patterns.clone())?;
    let mi = exact_mi(&uniform, &dist)?;
    println!("exact_MI_uniform: {mi} bits");
    let cap = capacity_small(&patterns, &dist, args.tol)?;
    println!(
        "capacity: {} bits ({} iterations{})",
        cap.bits,
        cap.iterations,
        if cap.converged {
            ""
        } else {
            ", iteration cap hit"
        }
    );
    Ok(())
}

fn sweep_cmd(ctx: &Context, format: FormatArg, out: Option<PathBuf>) -> Result<()> {
    let spec = ctx.spec()?;
    let rows = run_sweep(spec)?;
    let x = match spec.mode {
        SweepMode::FixedTSweepM => XVar::M,
        _ => XVar::T,
    };
    let fit: Option<FitOverlay> = None;
    match format {
        FormatArg::Csv => match out {
            Some(path) => {
                emit(&rows, x, fit.as_ref(), EmitFormat::Csv, &path)?;
                println!("wrote {} rows to {}", rows.len(), path.display());
            }
            None => print!("{}", to_csv(&rows)),
        },
        FormatArg::Svg => {
            let path =
                out.ok_or_else(|| Error::Config("--out is required for SVG output".to_string()))?;
            emit(&rows, x, fit.as_ref(), EmitFormat::Svg, &path)?;
            println!("wrote {} rows to {}", rows.len(), path.display());
        }
    }
    Ok(())
}

fn fit_cmd(args: FitArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.input)?;
    let rows = molcap_cli::emit::parse_csv(&text)?;
    let x = match args.x {
        XArg::T => XVar::T,
        XArg::M => XVar::M,
    };
    let model = match args.model {
        ModelArg::Log2 => FitModel::Log2,
        ModelArg::Linear => FitModel::Linear,
    };
    let fit = fit_rows(&rows, &args.column, x, model)?;
    let shape = match model {
        FitModel::Log2 => format!("{} = a·log2({}) + b", args.column, x.label()),
        FitModel::Linear => format!("{} = a·{} + b", args.column, x.label()),
    };
    println!("model: {shape}");
    println!("a: {}", fit.a);
    println!("b: {}", fit.b);
    println!("r_squared: {}", fit.r_squared);
    Ok(())
}
