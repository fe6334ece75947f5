//! `ltcert`: run the certificates, write figure data and measure ratios.
//!
//! Exit status: 0 when every record passes, 1 when one fails (or a
//! computation cannot finish), 2 for configuration errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use ltcert::config::RunConfig;
use ltcert::empirical::{elongated_ratio, lt_ratio, semiclassical_sequence, LtReport};
use ltcert::figures::{fig1, fig2, Figure, FIG1_DEFAULT_A_MAX};
use ltcert::harmonics::{build_family, FamilySpec};
use ltcert::verify::{run, Report, Target};
use ltcert::VerificationRecord;

#[derive(Parser)]
#[command(
    name = "ltcert",
    version,
    about = "Certify Lieb–Thirring estimates on the sphere and torus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run certificates and print their records.
    Verify {
        #[arg(value_enum)]
        target: TargetArg,
        #[command(flatten)]
        opts: Opts,
    },
    /// Write figure data as CSV.
    Figures {
        #[arg(value_enum)]
        which: FigureArg,
        #[command(flatten)]
        opts: Opts,
    },
    /// Measured ratios for explicit families.
    Empirical {
        #[arg(value_enum)]
        domain: DomainArg,
        #[command(flatten)]
        opts: Opts,
    },
    /// Summarize a JSON report written by `verify --json`.
    Report {
        file: PathBuf,
        /// Print the parsed report as JSON again.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Sphere,
    Torus,
    Profile,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureArg {
    Fig1,
    Fig2,
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    Sphere,
    Torus,
    Elongated,
}

#[derive(Args)]
struct Opts {
    /// key = value file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Right end of the sweep for the selected command.
    #[arg(long)]
    a_max: Option<f64>,
    #[arg(long)]
    a_max_sphere: Option<f64>,
    #[arg(long)]
    a_max_torus: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Directory for CSV and JSON output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// Print JSON instead of a table.
    #[arg(long)]
    json: bool,
}

/// Configuration problems, reported with exit status 2.
#[derive(Debug)]
struct ConfigError(String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_error(e: impl std::fmt::Display) -> anyhow::Error {
    ConfigError(e.to_string()).into()
}

impl Opts {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path).map_err(config_error)?,
            None => RunConfig::default(),
        };
        let mut set = |key: &str, value: Option<String>| -> Result<()> {
            if let Some(v) = value {
                cfg.set(key, &v).map_err(config_error)?;
            }
            Ok(())
        };
        set("a_max_sphere", self.a_max_sphere.map(|v| v.to_string()))?;
        set("a_max_torus", self.a_max_torus.map(|v| v.to_string()))?;
        set("step", self.step.map(|v| v.to_string()))?;
        set("tol", self.tol.map(|v| v.to_string()))?;
        set("n_max", self.n_max.map(|v| v.to_string()))?;
        set("alpha", self.alpha.map(|v| v.to_string()))?;
        set("out", self.out.as_ref().map(|v| v.display().to_string()))?;
        set("threads", self.threads.map(|v| v.to_string()))?;
        Ok(cfg)
    }
}

fn finish(cfg: &RunConfig) -> Result<()> {
    cfg.validate().map_err(config_error)?;
    if cfg.threads > 0 {
        // ignore a second initialization; results never depend on the pool size
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build_global();
    }
    Ok(())
}

fn print_records(records: &[VerificationRecord]) {
    for r in records {
        println!(
            "{} {:<34} computed {:>24.16e}  bound {:>24.16e}  margin {:>11.3e}",
            if r.pass { "pass" } else { "FAIL" },
            r.name,
            r.computed,
            r.bound,
            r.margin
        );
        for n in &r.notes {
            println!("       {n}");
        }
    }
}

fn cmd_verify(target: TargetArg, opts: &Opts) -> Result<bool> {
    let mut cfg = opts.resolve()?;
    let target = match target {
        TargetArg::Sphere => Target::Sphere,
        TargetArg::Torus => Target::Torus,
        TargetArg::Profile => Target::Profile,
        TargetArg::All => Target::All,
    };
    if let Some(a) = opts.a_max {
        if matches!(target, Target::Sphere | Target::All) {
            cfg.a_max_sphere = a;
        }
        if matches!(target, Target::Torus | Target::All) {
            cfg.a_max_torus = a;
        }
    }
    finish(&cfg)?;
    let report = run(target, &cfg).map_err(lib_error)?;
    if opts.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print_records(&report.records);
        println!(
            "{} of {} records pass",
            report.records.iter().filter(|r| r.pass).count(),
            report.records.len()
        );
    }
    if opts.out.is_some() {
        let path = cfg.out.join(format!("verify_{target}.json"));
        write(&path, &serde_json::to_string_pretty(&report)?)?;
    }
    Ok(report.all_pass)
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn cmd_figures(which: FigureArg, opts: &Opts) -> Result<bool> {
    let cfg = opts.resolve()?;
    finish(&cfg)?;
    let (figure, table) = match which {
        FigureArg::Fig1 => {
            let a_max = opts
                .a_max
                .or(opts.a_max_sphere)
                .unwrap_or(FIG1_DEFAULT_A_MAX);
            (
                Figure::Fig1,
                fig1(a_max, cfg.step, cfg.tol).map_err(lib_error)?,
            )
        }
        FigureArg::Fig2 => {
            let a_max = opts.a_max.unwrap_or(cfg.a_max_torus);
            (
                Figure::Fig2,
                fig2(a_max, cfg.step, cfg.tol).map_err(lib_error)?,
            )
        }
    };
    let name = match figure {
        Figure::Fig1 => "fig1.csv",
        Figure::Fig2 => "fig2.csv",
    };
    let path = cfg.out.join(name);
    write(&path, &table.to_csv())?;
    if opts.json {
        println!("{}", serde_json::to_string_pretty(&table)?);
    } else {
        println!("wrote {} rows to {}", table.rows.len(), path.display());
    }
    Ok(true)
}

/// One row of the empirical table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct EmpiricalRow {
    label: String,
    report: LtReport,
}

fn cmd_empirical(domain: DomainArg, opts: &Opts) -> Result<bool> {
    let cfg = opts.resolve()?;
    finish(&cfg)?;
    let (name, rows): (&str, Vec<EmpiricalRow>) = match domain {
        DomainArg::Sphere => (
            "empirical_sphere.csv",
            semiclassical_sequence(cfg.n_max)
                .map_err(lib_error)?
                .into_iter()
                .map(|p| EmpiricalRow {
                    label: format!("N={}", p.n),
                    report: p.report,
                })
                .collect(),
        ),
        DomainArg::Torus => {
            let family = build_family(&FamilySpec::unit_torus()).map_err(lib_error)?;
            (
                "empirical_torus.csv",
                vec![EmpiricalRow {
                    label: "modes (±1,0),(0,±1)".into(),
                    report: lt_ratio(&family).map_err(lib_error)?,
                }],
            )
        }
        DomainArg::Elongated => (
            "empirical_elongated.csv",
            vec![EmpiricalRow {
                label: format!("alpha={}", cfg.alpha),
                report: elongated_ratio(cfg.alpha).map_err(lib_error)?,
            }],
        ),
    };
    let mut csv = String::from("label,count,rho_sq_integral,dirichlet_sum,ratio,bound,margin\n");
    for row in &rows {
        let r = &row.report;
        csv.push_str(&format!(
            "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            row.label, r.count, r.rho_sq_integral, r.dirichlet_sum, r.ratio, r.bound, r.margin
        ));
    }
    if opts.out.is_some() {
        write(&cfg.out.join(name), &csv)?;
    }
    if opts.json {
        println!("{}", serde_json::to_string_pretty(&rows)?);
    } else {
        for row in &rows {
            println!(
                "{:<24} ratio {:.10}  bound {:.10}  margin {:.3e}",
                row.label, row.report.ratio, row.report.bound, row.report.margin
            );
        }
    }
    Ok(rows.iter().all(|r| r.report.margin > 0.0))
}

fn cmd_report(file: &Path, json: bool) -> Result<bool> {
    let text = fs::read_to_string(file)
        .with_context(|| format!("reading {}", file.display()))
        .map_err(config_error)?;
    let report: Report = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", file.display()))
        .map_err(config_error)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("target {}, {} records", report.target, report.records.len());
        print_records(&report.records);
    }
    // the stored flag is not trusted
    Ok(report.records.iter().all(|r| r.pass && r.margin > 0.0))
}

/// Library errors about parameters count as configuration errors.
fn lib_error(e: ltcert::Error) -> anyhow::Error {
    match e {
        ltcert::Error::InvalidParameter(_) => config_error(e),
        other => other.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Verify { target, opts } => cmd_verify(*target, opts),
        Command::Figures { which, opts } => cmd_figures(*which, opts),
        Command::Empirical { domain, opts } => cmd_empirical(*domain, opts),
        Command::Report { file, json } => cmd_report(file, *json),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
