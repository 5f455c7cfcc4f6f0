//! Command-line front end for quantum-walk search analysis.
//!
//! Exit codes: 0 success, 2 usage error, 3 computational error (no eigenvalue
//! crossing, no degenerate cluster, verification guard or failure).

use std::f64::consts::PI;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use qwsearch::{
    critical_gamma_for_graph, curve_to_csv, default_split_spec, eigh, equitable_partition,
    estimate_exponents, full_hamiltonian, load_edge_list, overlap_sweep,
    perturbative_runtime_report, quotient_hamiltonian, quotient_hamiltonian_adjacency,
    success_curve, superposition_state, sweep_to_csv, table1_column, Error, FamilyKind,
    GraphSpec, SplitSpec, DEFAULT_DEGENERACY_TOL,
};

#[derive(Parser)]
#[command(name = "qwsearch", version, about = "Quantum-walk search on graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the reduced (symmetry-subspace) search Hamiltonian
    Family(FamilyCmd),
    /// Sweep the jumping rate and record eigenvalues and squared overlaps
    Sweep(SweepCmd),
    /// Evolve from the equal superposition and emit the success curve
    Evolve(EvolveCmd),
    /// Locate the critical jumping rate of a leading-order split
    CriticalGamma(CriticalGammaCmd),
    /// Critical-rate table: n, 1/(exact chain eigenvalue), 1/n
    Table1(Table1Cmd),
    /// Full perturbative analysis with a simulated cross-check
    Perturb(PerturbCmd),
    /// Check full-space against reduced-space dynamics
    Verify(VerifyCmd),
}

#[derive(Args)]
struct GraphArgs {
    /// Graph family: complete, simplex, hypercube, or file
    #[arg(long)]
    family: String,
    /// Family size parameter (N, M, or n)
    #[arg(long)]
    size: Option<usize>,
    /// Edge-list path, for --family file
    #[arg(long)]
    input: Option<PathBuf>,
    /// Override the marked vertex
    #[arg(long)]
    marked: Option<usize>,
}

impl GraphArgs {
    fn kind(&self) -> Result<Option<FamilyKind>, CliError> {
        match self.family.as_str() {
            "complete" => Ok(Some(FamilyKind::Complete)),
            "simplex" => Ok(Some(FamilyKind::SimplexComplete)),
            "hypercube" => Ok(Some(FamilyKind::Hypercube)),
            "file" => Ok(None),
            other => Err(usage(format!(
                "unknown family {other:?}; expected complete, simplex, hypercube, or file"
            ))),
        }
    }

    fn build(&self) -> Result<(GraphSpec, Option<FamilyKind>), CliError> {
        let kind = self.kind()?;
        let g = match kind {
            Some(kind) => {
                let size = self
                    .size
                    .ok_or_else(|| usage(format!("--size is required for --family {}", self.family)))?;
                kind.build(size)?
            }
            None => {
                let path = self
                    .input
                    .as_ref()
                    .ok_or_else(|| usage("--input is required for --family file".into()))?;
                let text = fs::read_to_string(path)
                    .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
                load_edge_list(&text)?
            }
        };
        let g = match self.marked {
            Some(m) => g.with_marked(m)?,
            None => g,
        };
        Ok((g, kind))
    }
}

#[derive(Args)]
struct SplitArgs {
    /// Exponent cutoff: entries scaling faster than size^cutoff stay leading-order
    #[arg(long)]
    cutoff: Option<f64>,
    /// Entry positions assigned to the perturbation, as "i,j;i,j"
    #[arg(long)]
    mask: Option<String>,
}

impl SplitArgs {
    fn spec(&self, kind: Option<FamilyKind>) -> Result<SplitSpec, CliError> {
        if let Some(mask) = &self.mask {
            return Ok(SplitSpec::mask(parse_mask(mask)?));
        }
        let kind = kind.ok_or_else(|| {
            usage("custom graphs need --mask (no size family to estimate exponents from)".into())
        })?;
        match self.cutoff {
            Some(cutoff) => {
                let (s1, s2) = exponent_probes(kind)?;
                Ok(SplitSpec::threshold(cutoff, estimate_exponents(kind, s1, s2)?))
            }
            None => Ok(default_split_spec(kind)?),
        }
    }
}

/// Probe sizes for exponent estimation, per family.
fn exponent_probes(kind: FamilyKind) -> Result<(usize, usize), CliError> {
    match kind {
        FamilyKind::Complete => Ok((64, 256)),
        FamilyKind::SimplexComplete => Ok((16, 64)),
        FamilyKind::Hypercube => Err(usage(
            "the hypercube's reduced dimension grows with n; use --mask 0,1".into(),
        )),
    }
}

fn parse_mask(text: &str) -> Result<Vec<(usize, usize)>, CliError> {
    text.split(';')
        .map(|pair| {
            let mut it = pair.split(',');
            let bad = || usage(format!("bad mask entry {pair:?}; expected \"i,j\""));
            let i = it.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
            let j = it.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
            if it.next().is_some() {
                return Err(bad());
            }
            Ok((i, j))
        })
        .collect()
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output path; standard output when omitted
    #[arg(long)]
    output: Option<PathBuf>,
}

impl OutputArgs {
    fn emit(&self, text: &str) -> Result<(), CliError> {
        match &self.output {
            Some(path) => fs::write(path, text)
                .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

#[derive(Args)]
struct FamilyCmd {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    gamma: f64,
    /// Force the adjacency form -gamma A - |a><a| on non-regular graphs
    #[arg(long)]
    adjacency: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct SweepCmd {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    gamma_min: f64,
    #[arg(long)]
    gamma_max: f64,
    #[arg(long, default_value_t = 200)]
    gamma_steps: usize,
    /// Number of lowest eigenstates recorded per rate
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct EvolveCmd {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    gamma: f64,
    /// Time window; default 2 pi / gap of the reduced matrix
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long, default_value_t = 1024)]
    points: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct CriticalGammaCmd {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    split: SplitArgs,
    #[arg(long)]
    gamma_min: Option<f64>,
    #[arg(long)]
    gamma_max: Option<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct Table1Cmd {
    /// Chain lengths n; default 10, 20, ..., 100
    n_values: Vec<usize>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct PerturbCmd {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    split: SplitArgs,
    /// Relative degeneracy tolerance for the leading-order cluster
    #[arg(long, default_value_t = DEFAULT_DEGENERACY_TOL)]
    tol: f64,
    #[arg(long)]
    gamma_min: Option<f64>,
    #[arg(long)]
    gamma_max: Option<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct VerifyCmd {
    #[command(flatten)]
    graph: GraphArgs,
    /// Jumping rate; default 1 / num_vertices
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long, default_value_t = 64)]
    points: usize,
    #[command(flatten)]
    out: OutputArgs,
}

/// Error plus the exit code it maps to.
struct CliError {
    message: String,
    code: u8,
}

fn usage(message: String) -> CliError {
    CliError { message, code: 2 }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_) | Error::Parse { .. } => 2,
            _ => 3,
        };
        CliError { message: e.to_string(), code }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Family(cmd) => cmd_family(cmd),
        Command::Sweep(cmd) => cmd_sweep(cmd),
        Command::Evolve(cmd) => cmd_evolve(cmd),
        Command::CriticalGamma(cmd) => cmd_critical_gamma(cmd),
        Command::Table1(cmd) => cmd_table1(cmd),
        Command::Perturb(cmd) => cmd_perturb(cmd),
        Command::Verify(cmd) => cmd_verify(cmd),
    }
}

fn cmd_family(cmd: FamilyCmd) -> Result<(), CliError> {
    let (g, _) = cmd.graph.build()?;
    let p = equitable_partition(&g);
    let h = if cmd.adjacency {
        quotient_hamiltonian_adjacency(&g, &p, cmd.gamma)?
    } else {
        quotient_hamiltonian(&g, &p, cmd.gamma)?
    };
    let text = match cmd.out.format {
        Format::Csv => h.to_csv(),
        Format::Json => format!("{:#}\n", h.to_json()),
    };
    cmd.out.emit(&text)
}

fn cmd_sweep(cmd: SweepCmd) -> Result<(), CliError> {
    if cmd.out.format == Format::Json {
        return Err(usage("sweep emits CSV only".into()));
    }
    if !(cmd.gamma_min > 0.0 && cmd.gamma_max > cmd.gamma_min) {
        return Err(usage("need 0 < --gamma-min < --gamma-max".into()));
    }
    if cmd.gamma_steps < 2 {
        return Err(usage("--gamma-steps must be at least 2".into()));
    }
    let (g, _) = cmd.graph.build()?;
    let log_lo = cmd.gamma_min.ln();
    let step = (cmd.gamma_max / cmd.gamma_min).ln() / (cmd.gamma_steps - 1) as f64;
    let gammas: Vec<f64> =
        (0..cmd.gamma_steps).map(|i| (log_lo + step * i as f64).exp()).collect();
    let rows = overlap_sweep(&g, &gammas, cmd.k)?;
    cmd.out.emit(&sweep_to_csv(&rows))
}

fn cmd_evolve(cmd: EvolveCmd) -> Result<(), CliError> {
    let (g, _) = cmd.graph.build()?;
    let p = equitable_partition(&g);
    let h = quotient_hamiltonian(&g, &p, cmd.gamma)?;
    let t_max = match cmd.t_max {
        Some(t) => t,
        None => {
            // window two periods of the lowest exact gap
            let d = eigh(&h.entries)?;
            let gap = d.eigenvalues[1] - d.eigenvalues[0];
            if gap.is_nan() || gap <= 0.0 {
                return Err(usage("degenerate spectrum; pass --t-max explicitly".into()));
            }
            2.0 * PI / gap
        }
    };
    let s = superposition_state(&p).map(|x| Complex64::new(x, 0.0));
    let curve = success_curve(&h.entries, &s, 0, t_max, cmd.points)?;
    let text = match cmd.out.format {
        Format::Csv => curve_to_csv(&curve),
        Format::Json => format!(
            "{:#}\n",
            serde_json::json!({
                "gamma": cmd.gamma,
                "t_max": t_max,
                "peak_time": curve.peak_time,
                "peak_probability": curve.peak_probability,
                "times": curve.times,
                "success_probability": curve.success_probability,
            })
        ),
    };
    cmd.out.emit(&text)
}

fn cmd_critical_gamma(cmd: CriticalGammaCmd) -> Result<(), CliError> {
    let (g, kind) = cmd.graph.build()?;
    let spec = cmd.split.spec(kind)?;
    let scale = match kind {
        Some(_) => cmd.graph.size.unwrap() as f64,
        None => g.num_vertices() as f64,
    };
    let bracket = (
        cmd.gamma_min.unwrap_or(0.1 / scale),
        cmd.gamma_max.unwrap_or(10.0 / scale),
    );
    let cg = critical_gamma_for_graph(&g, &spec, bracket)?;
    if cg.multiple_crossings {
        eprintln!("warning: multiple eigenvalue crossings in bracket; using the lowest");
    }
    let text = match cmd.out.format {
        Format::Csv => format!("{}\n", cg.gamma_c),
        Format::Json => format!(
            "{:#}\n",
            serde_json::json!({
                "gamma_c": cg.gamma_c,
                "multiple_crossings": cg.multiple_crossings,
            })
        ),
    };
    cmd.out.emit(&text)
}

fn cmd_table1(cmd: Table1Cmd) -> Result<(), CliError> {
    if cmd.out.format == Format::Json {
        return Err(usage("table1 emits CSV only".into()));
    }
    let n_values = if cmd.n_values.is_empty() {
        (1..=10).map(|i| 10 * i).collect()
    } else {
        cmd.n_values.clone()
    };
    let rows = table1_column(&n_values)?;
    let mut text = String::from("n,one_over_actual_eig,one_over_n\n");
    for row in rows {
        text.push_str(&format!(
            "{},{:.6},{:.6}\n",
            row.n, row.one_over_actual_eig, row.one_over_n
        ));
    }
    cmd.out.emit(&text)
}

fn cmd_perturb(cmd: PerturbCmd) -> Result<(), CliError> {
    let kind = cmd
        .graph
        .kind()?
        .ok_or_else(|| usage("perturb needs a named family (complete, simplex, hypercube)".into()))?;
    let size = cmd.graph.size.ok_or_else(|| usage("--size is required".into()))?;
    let spec = cmd.split.spec(Some(kind))?;
    let bracket = match (cmd.gamma_min, cmd.gamma_max) {
        (Some(lo), Some(hi)) => Some((lo, hi)),
        (None, None) => None,
        _ => return Err(usage("pass both --gamma-min and --gamma-max or neither".into())),
    };
    let report = perturbative_runtime_report(kind, size, &spec, cmd.tol, bracket)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let text = format!("{:#}\n", serde_json::to_value(&report).expect("report serializes"));
    cmd.out.emit(&text)
}

const VERIFY_MAX_VERTICES: usize = 4096;
const VERIFY_TOLERANCE: f64 = 1e-10;

fn cmd_verify(cmd: VerifyCmd) -> Result<(), CliError> {
    let (g, _) = cmd.graph.build()?;
    let n = g.num_vertices();
    if n > VERIFY_MAX_VERTICES {
        return Err(usage(format!(
            "verification diagonalizes the full {n}-dimensional space; guard is {VERIFY_MAX_VERTICES} vertices"
        )));
    }
    let gamma = cmd.gamma.unwrap_or(1.0 / n as f64);
    let t_max = cmd.t_max.unwrap_or(PI * (n as f64).sqrt());

    let full = full_hamiltonian(&g, gamma)?;
    let s_full = nalgebra_vector_of(n, 1.0 / (n as f64).sqrt());
    let full_curve = success_curve(&full.entries, &s_full, g.marked(), t_max, cmd.points)?;

    let p = equitable_partition(&g);
    let h = quotient_hamiltonian(&g, &p, gamma)?;
    let s_red = superposition_state(&p).map(|x| Complex64::new(x, 0.0));
    let reduced_curve = success_curve(&h.entries, &s_red, 0, t_max, cmd.points)?;

    let max_deviation = full_curve
        .success_probability
        .iter()
        .zip(&reduced_curve.success_probability)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    let pass = max_deviation <= VERIFY_TOLERANCE;

    let text = format!(
        "{:#}\n",
        serde_json::json!({
            "num_vertices": n,
            "reduced_dimension": p.num_classes(),
            "gamma": gamma,
            "t_max": t_max,
            "points": cmd.points,
            "max_deviation": max_deviation,
            "tolerance": VERIFY_TOLERANCE,
            "pass": pass,
        })
    );
    cmd.out.emit(&text)?;
    if pass {
        Ok(())
    } else {
        Err(CliError {
            message: format!("full-vs-reduced deviation {max_deviation} exceeds {VERIFY_TOLERANCE}"),
            code: 3,
        })
    }
}

fn nalgebra_vector_of(n: usize, value: f64) -> nalgebra::DVector<Complex64> {
    nalgebra::DVector::from_element(n, Complex64::new(value, 0.0))
}
