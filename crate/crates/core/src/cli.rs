//! `qtraj run | compare | verify`.

use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use crate::config::{load_config, Overrides, RunConfig};
use crate::ensemble::{all_slice_reports, run_ensemble, EnsembleResult, Observable, SliceReport};
use crate::error::{QtrajError, Result};
use crate::io::{
    ensure_dir, file_digest, write_histograms, write_manifest, write_trajectories, HistogramDocument,
    RunManifest, RunSection, TOOL_VERSION,
};
use crate::sampling::Theory;
use crate::verify;

pub const TRAJECTORIES_FILE: &str = "trajectories.csv";
pub const HISTOGRAMS_FILE: &str = "histograms.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const COMPARISON_FILE: &str = "comparison.tsv";

#[derive(Debug, Parser)]
#[command(name = "qtraj", version, about = "Bohmian and revised quantum trajectories through a double slit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one ensemble and write trajectories, histograms and a manifest.
    Run(CommonArgs),
    /// Run both guidance laws on the same seed and tabulate their statistics.
    Compare(CommonArgs),
    /// Check the closed forms against the Schrödinger and continuity equations.
    Verify(CommonArgs),
}

#[derive(Debug, Args, Clone, Default)]
pub struct CommonArgs {
    /// `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub theory: Option<Theory>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of trajectories.
    #[arg(long)]
    pub n: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            theory: self.theory,
            seed: self.seed,
            n_traj: self.n,
            out_dir: self.out.clone(),
        }
    }

    pub fn load(&self) -> Result<RunConfig> {
        load_config(self.config.as_deref(), &self.overrides())
    }
}

fn with_threads<T: Send>(threads: Option<usize>, work: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(work),
        None => work(),
    }
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

fn section(result: &EnsembleResult) -> Result<RunSection> {
    Ok(RunSection {
        theory: result.config.theory,
        config_digest: result.config_digest.clone(),
        status_counts: result.status_counts(),
        slices: all_slice_reports(result)?,
    })
}

fn manifest(
    command: &str,
    config: &RunConfig,
    started: f64,
    runs: &[&EnsembleResult],
    files: &[PathBuf],
) -> Result<RunManifest> {
    Ok(RunManifest {
        tool_version: TOOL_VERSION.to_string(),
        command: command.to_string(),
        config: config.clone(),
        master_seed: config.ensemble.master_seed,
        started_unix: started,
        finished_unix: unix_now(),
        status_counts: runs
            .iter()
            .map(|r| (r.config.theory, r.status_counts()))
            .collect(),
        outputs: files.iter().map(|f| file_digest(f)).collect::<Result<_>>()?,
    })
}

fn print_slice_line(report: &SliceReport) {
    let dip = report
        .dip
        .map(|d| format!("  dip {:.3} (oracle {:.3}, vs side peak {:.3})", d.ratio, d.oracle_ratio, d.peak_ratio))
        .unwrap_or_default();
    println!(
        "  {:<8} t={:>5.2} ps {:<8} n={:<6} excluded={:<5} KS {:.4} / {:.4} {}{}",
        report.theory.to_string(),
        report.t,
        match report.observable {
            Observable::Position => "position",
            Observable::Momentum => "momentum",
        },
        report.contributing,
        report.excluded,
        report.ks.statistic,
        report.ks.critical_at_alpha,
        if report.ks.passed { "pass" } else { "FAIL" },
        dip
    );
}

pub fn cmd_run(args: &CommonArgs) -> Result<PathBuf> {
    let config = args.load()?;
    let started = unix_now();
    let params = config.params();
    let out = ensure_dir(&config.out_dir)?;
    let result = with_threads(args.threads, || run_ensemble(&config.ensemble, &params))?;
    let run = with_threads(args.threads, || section(&result))?;
    let counts = run.status_counts;
    println!(
        "{} trajectories ({}): {} completed, {} exited, {} stalled",
        config.ensemble.n_traj, config.ensemble.theory, counts.completed, counts.exited_domain, counts.node_stalled
    );
    for report in &run.slices {
        print_slice_line(report);
    }
    let traj_path = out.join(TRAJECTORIES_FILE);
    let hist_path = out.join(HISTOGRAMS_FILE);
    write_trajectories(&result, &traj_path)?;
    write_histograms(&HistogramDocument::new(vec![run]), &hist_path)?;
    let m = manifest("run", &config, started, &[&result], &[traj_path, hist_path])?;
    write_manifest(&m, &out.join(MANIFEST_FILE))?;
    Ok(out)
}

/// Tab-separated side-by-side statistics of both theories.
pub fn comparison_table(sections: &[RunSection]) -> String {
    let mut table = String::from(
        "t_ps\tobservable\ttheory\tcontributing\texcluded\tks_statistic\tks_critical\tks_passed\tdip_ratio\toracle_dip_ratio\tside_peak\tdip_peak_ratio\n",
    );
    let Some(first) = sections.first() else {
        return table;
    };
    for i in 0..first.slices.len() {
        for s in sections {
            let r = &s.slices[i];
            let (ratio, oracle, peak, peak_ratio) = r
                .dip
                .map(|d| {
                    (
                        d.ratio.to_string(),
                        d.oracle_ratio.to_string(),
                        d.side_peak.to_string(),
                        d.peak_ratio.to_string(),
                    )
                })
                .unwrap_or_else(|| ("-".into(), "-".into(), "-".into(), "-".into()));
            table.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                r.t,
                match r.observable {
                    Observable::Position => "position",
                    Observable::Momentum => "momentum",
                },
                r.theory,
                r.contributing,
                r.excluded,
                r.ks.statistic,
                r.ks.critical_at_alpha,
                r.ks.passed,
                ratio,
                oracle,
                peak,
                peak_ratio
            ));
        }
    }
    table
}

pub fn cmd_compare(args: &CommonArgs) -> Result<Vec<RunSection>> {
    let config = args.load()?;
    let started = unix_now();
    let params = config.params();
    let out = ensure_dir(&config.out_dir)?;
    let mut results = Vec::new();
    for theory in [Theory::Dbb, Theory::Revised] {
        let mut ensemble = config.ensemble.clone();
        ensemble.theory = theory;
        results.push(with_threads(args.threads, || run_ensemble(&ensemble, &params))?);
    }
    let sections = results
        .iter()
        .map(|r| with_threads(args.threads, || section(r)))
        .collect::<Result<Vec<_>>>()?;
    for s in &sections {
        let c = s.status_counts;
        println!(
            "{}: {} completed, {} exited, {} stalled",
            s.theory, c.completed, c.exited_domain, c.node_stalled
        );
    }
    let table = comparison_table(&sections);
    print!("{table}");
    let table_path = out.join(COMPARISON_FILE);
    std::fs::write(&table_path, &table).map_err(|e| QtrajError::io(&table_path, e))?;
    let hist_path = out.join(HISTOGRAMS_FILE);
    write_histograms(&HistogramDocument::new(sections.clone()), &hist_path)?;
    let runs: Vec<&EnsembleResult> = results.iter().collect();
    let m = manifest("compare", &config, started, &runs, &[table_path, hist_path])?;
    write_manifest(&m, &out.join(MANIFEST_FILE))?;
    Ok(sections)
}

/// Returns whether every check passed.
pub fn cmd_verify(args: &CommonArgs) -> Result<bool> {
    let config = args.load()?;
    let params = config.params();
    let outcomes = with_threads(args.threads, || {
        verify::run_all(&params, config.ensemble.schedule.t_final, config.ensemble.master_seed)
    });
    for o in &outcomes {
        println!("{o}");
    }
    Ok(outcomes.iter().all(|o| o.passed))
}

/// Process exit status for a parsed command line.
pub fn run_cli(cli: &Cli) -> i32 {
    let outcome = match &cli.command {
        Command::Run(args) => cmd_run(args).map(|out| {
            println!("wrote {}", out.display());
            true
        }),
        Command::Compare(args) => cmd_compare(args).map(|_| true),
        Command::Verify(args) => cmd_verify(args),
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("qtraj: one or more checks failed");
            1
        }
        Err(e) => {
            eprintln!("qtraj: {e}");
            2
        }
    }
}

