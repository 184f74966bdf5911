use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use oil_cli::campaign::{with_jobs, TheoremSummary};
use oil_cli::report::{csv_bytes, json_bytes, write_file, SweepReport, VerifyReport};
use oil_cli::{
    apply_seed_override, compute_problem, load_problem, run_campaign, run_sweep, CampaignConfig, CliError,
    OutputFormat, SweepAxis, SEED_ENV,
};
use oil_core::{Theorem, ToleranceProfile};

#[derive(Parser)]
#[command(name = "oil", version, about = "Outer inverses A_{T,S}^(2) and their perturbation bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the outer inverse described by a problem file.
    Compute {
        problem: PathBuf,
        /// Relative rank-truncation tolerance (default: max(m, n) * machine epsilon).
        #[arg(long)]
        tol: Option<f64>,
        /// Absolute tolerance for the defining-equation residual check.
        #[arg(long)]
        verify_atol: Option<f64>,
        /// Largest condition number accepted by linear solves.
        #[arg(long)]
        cond_cap: Option<f64>,
        /// Output file (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification campaign over the theorem suite.
    Verify {
        campaign: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Overrides the configured output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Vary one perturbation ratio and tabulate bounds against actual values.
    Sweep {
        campaign: PathBuf,
        #[arg(long, value_enum)]
        axis: SweepAxis,
        #[arg(long, default_value_t = 20)]
        points: usize,
        /// Theorem to sweep (default: first configured theorem the axis applies to).
        #[arg(long)]
        theorem: Option<Theorem>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

fn load_campaign(path: &Path) -> Result<CampaignConfig, CliError> {
    let mut config = CampaignConfig::load(path)?;
    apply_seed_override(&mut config, std::env::var(SEED_ENV).ok().as_deref())?;
    Ok(config)
}

fn print_summaries(rows: &[TheoremSummary]) {
    eprintln!(
        "{:<8} {:>6} {:>5} {:>5} {:>6} {:>5} {:>10} {:>11} {:>11}",
        "theorem", "run", "skip", "err", "hyp", "viol", "max_relerr", "min_m_norm", "min_m_diff"
    );
    let f = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.3e}"));
    for s in rows {
        eprintln!(
            "{:<8} {:>6} {:>5} {:>5} {:>6} {:>5} {:>10} {:>11} {:>11}",
            s.theorem.as_str(),
            s.trials_run,
            s.skipped,
            s.errors,
            s.hypotheses_met_count,
            s.bounds_violations,
            f(s.max_relerr),
            f(s.worst_margin_norm),
            f(s.worst_margin_diff)
        );
    }
}

fn run(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Compute { problem, tol, verify_atol, cond_cap, out } => {
            let mut profile = ToleranceProfile::default();
            if tol.is_some() {
                profile.rank_rtol = tol;
            }
            if let Some(v) = verify_atol {
                profile.verify_atol = v;
            }
            if let Some(v) = cond_cap {
                profile.cond_cap = v;
            }
            let problem = load_problem(&problem)?;
            let result = compute_problem(&problem, &profile)?;
            let bytes = json_bytes(&result);
            match out {
                Some(path) => write_file(&path, &bytes)?,
                None => print!("{}", String::from_utf8_lossy(&bytes)),
            }
            Ok(0)
        }
        Command::Verify { campaign, jobs, out } => {
            let config = load_campaign(&campaign)?;
            let outcome = with_jobs(jobs, || run_campaign(&config))?;
            let rows: Vec<_> = outcome.evaluations().map(|e| e.row.clone()).collect();
            let failures: Vec<_> = outcome.failures().cloned().collect();
            for f in &failures {
                eprintln!("{} trial {} {:?}: {}", f.theorem, f.trial_id, f.kind, f.message);
            }
            let bytes = match config.format {
                OutputFormat::Csv => csv_bytes(&outcome.header, &rows)?,
                OutputFormat::Json => json_bytes(&VerifyReport { header: outcome.header.clone(), rows, failures }),
            };
            write_file(out.as_deref().unwrap_or(&config.output_path), &bytes)?;
            print_summaries(&outcome.summary.per_theorem);
            println!("{}", serde_json::to_string_pretty(&outcome.summary).unwrap());
            Ok(outcome.summary.verdict().exit_code())
        }
        Command::Sweep { campaign, axis, points, theorem, jobs, out } => {
            let config = load_campaign(&campaign)?;
            let theorem = oil_cli::sweep::pick_theorem(&config, axis, theorem)?;
            let outcome = with_jobs(jobs, || run_sweep(&config, theorem, axis, points))??;
            for f in &outcome.failures {
                eprintln!("{} trial {} {:?}: {}", f.theorem, f.trial_id, f.kind, f.message);
            }
            let bytes = match config.format {
                OutputFormat::Csv => csv_bytes(&outcome.header, &outcome.rows)?,
                OutputFormat::Json => json_bytes(&SweepReport {
                    header: outcome.header.clone(),
                    theorem,
                    axis,
                    rows: outcome.rows.clone(),
                    failures: outcome.failures.clone(),
                }),
            };
            write_file(out.as_deref().unwrap_or(&config.output_path), &bytes)?;
            let summary =
                oil_cli::CampaignSummary { per_theorem: vec![outcome.summary], wall_time_s: outcome.wall_time_s };
            print_summaries(&summary.per_theorem);
            println!("{}", serde_json::to_string_pretty(&summary).unwrap());
            Ok(summary.verdict().exit_code())
        }
    }
}
