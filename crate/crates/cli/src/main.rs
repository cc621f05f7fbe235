use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use lyapcert_cli::input::{parse_input, InputDocument};
use lyapcert_cli::render::{
    fmt_float, matrix_json, render_report, vector_json, ReportFormat,
};
use lyapcert_cli::triad::{check_consistency, run_triad, TriadReport};
use lyapcert_cli::CliError;
use lyapcert_core::positive::{solve_positive_q, PositiveSystem};
use lyapcert_core::solver::{
    cobweb_iterates, solve_direct, solve_series, solve_via_alpha_bisection, LyapunovSolution,
    ThetaMapParams, DEFAULT_LAMBDA_TOL,
};
use lyapcert_core::Error;

#[derive(Parser)]
#[command(
    name = "lyapcert",
    about = "Certify stability, observability, and Lyapunov solvability of discrete-time systems",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the three-way equivalence check and emit a report.
    Triad {
        /// JSON document with "A" and exactly one of "C", "B", "c".
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
    },
    /// Solve the Lyapunov equation by one method.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
    },
    /// Report the spectral radius verdict for condition (i).
    CheckStability { file: PathBuf },
    /// Report the observability rank verdict for condition (ii).
    CheckObservability { file: PathBuf },
    /// Solve q = c + qA for a positive system and check q > 0.
    PositiveSolve { file: PathBuf },
    /// Emit cobweb iterates of the scalar line map as CSV (k,theta).
    ThetaMap {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        theta0: f64,
        #[arg(long)]
        steps: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    FixedPoint,
    Direct,
    Series,
}

fn read_document(path: &Path) -> Result<InputDocument, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_input(&bytes)
}

fn numerical(err: Error) -> CliError {
    CliError::Numerical(err.to_string())
}

fn solution_json(sol: &LyapunovSolution, extra: Option<(f64, f64, usize)>) -> String {
    let mut fields = vec![
        ("method".to_string(), format!("\"{}\"", sol.method.label())),
        ("q".to_string(), matrix_json(&sol.q)),
        ("residual".to_string(), fmt_float(sol.residual)),
        (
            "definiteness".to_string(),
            format!("\"{}\"", sol.definiteness.label()),
        ),
        ("min_eigenvalue".to_string(), fmt_float(sol.min_eigenvalue)),
    ];
    if let Some((alpha, lambda, iterations)) = extra {
        fields.push(("alpha".to_string(), fmt_float(alpha)));
        fields.push(("lambda".to_string(), fmt_float(lambda)));
        fields.push(("iterations".to_string(), iterations.to_string()));
    }
    let body: Vec<String> = fields
        .into_iter()
        .map(|(k, v)| format!("\"{k}\":{v}"))
        .collect();
    format!("{{{}}}\n", body.join(","))
}

fn cmd_triad(file: &Path, format: FormatArg) -> Result<String, CliError> {
    let doc = read_document(file)?;
    let report = run_triad(&doc);
    let rendered = render_report(
        &report,
        match format {
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Text => ReportFormat::Text,
        },
    );
    if let Err(err) = check_consistency(&report) {
        // The report still goes out so the bug is inspectable; the exit
        // code carries the alarm.
        print!("{rendered}");
        return Err(err);
    }
    Ok(rendered)
}

fn cmd_solve(file: &Path, method: MethodArg) -> Result<String, CliError> {
    let doc = read_document(file)?;
    let sys = TriadReport::system_of(&doc);
    match method {
        MethodArg::Direct => {
            let sol = solve_direct(&sys).map_err(numerical)?;
            Ok(solution_json(&sol, None))
        }
        MethodArg::Series => {
            let sol = solve_series(&sys, 1e-10, 200_000).map_err(numerical)?;
            Ok(solution_json(&sol, None))
        }
        MethodArg::FixedPoint => {
            let result = solve_via_alpha_bisection(&sys, DEFAULT_LAMBDA_TOL).map_err(numerical)?;
            Ok(solution_json(
                &result.solution,
                Some((
                    result.fixed_point.alpha,
                    result.fixed_point.lambda,
                    result.fixed_point.iterations,
                )),
            ))
        }
    }
}

fn cmd_check_stability(file: &Path) -> Result<String, CliError> {
    let doc = read_document(file)?;
    let sys = TriadReport::system_of(&doc);
    let verdict =
        lyapcert_core::system::is_asymptotically_stable(&sys).map_err(numerical)?;
    Ok(format!(
        "{{\"stable\":{},\"spectral_radius\":{}}}\n",
        verdict.stable,
        fmt_float(verdict.spectral_radius)
    ))
}

fn cmd_check_observability(file: &Path) -> Result<String, CliError> {
    let doc = read_document(file)?;
    let sys = TriadReport::system_of(&doc);
    let verdict = lyapcert_core::system::is_observable(&sys);
    Ok(format!(
        "{{\"observable\":{},\"rank\":{},\"n\":{}}}\n",
        verdict.observable,
        verdict.rank,
        sys.dim()
    ))
}

fn cmd_positive_solve(file: &Path) -> Result<String, CliError> {
    let doc = read_document(file)?;
    let (a, c) = match doc {
        InputDocument::Positive { a, c } => (a, c),
        _ => {
            return Err(CliError::Input(
                "positive-solve requires a document with key \"c\"".into(),
            ))
        }
    };
    // Nonnegativity is part of the input contract for this mode.
    let ps = PositiveSystem::new(a, c).map_err(|e| CliError::Input(e.to_string()))?;
    let cert = solve_positive_q(&ps).map_err(numerical)?;
    Ok(format!(
        "{{\"q\":{},\"residual\":{},\"positive\":{}}}\n",
        vector_json(&cert.q),
        fmt_float(cert.residual),
        cert.positive
    ))
}

fn cmd_theta_map(lambda: f64, gamma: f64, theta0: f64, steps: usize) -> Result<String, CliError> {
    let params = ThetaMapParams::new(lambda, gamma)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let trace = cobweb_iterates(&params, theta0, steps);
    let mut out = String::from("k,theta\n");
    for (k, theta) in trace.thetas.iter().enumerate() {
        out.push_str(&format!("{k},{}\n", fmt_float(*theta)));
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Triad { file, format } => cmd_triad(&file, format),
        Command::Solve { file, method } => cmd_solve(&file, method),
        Command::CheckStability { file } => cmd_check_stability(&file),
        Command::CheckObservability { file } => cmd_check_observability(&file),
        Command::PositiveSolve { file } => cmd_positive_solve(&file),
        Command::ThetaMap {
            lambda,
            gamma,
            theta0,
            steps,
        } => cmd_theta_map(lambda, gamma, theta0, steps),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(output) => {
            print!("{output}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
