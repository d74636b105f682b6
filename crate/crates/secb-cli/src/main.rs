//! `secb` — stability constants, benchmark tables and figure data for
//! backward parabolic problems under a slow-evolution constraint.

mod manifest;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use secb::constraints::{s_star, solve_lambda};
use secb::experiments::{self, ExperimentConfig};

use manifest::{ManifestEntry, RunManifest};

/// Exit code for numerical-domain errors (usage errors exit 2 via clap).
const EXIT_DOMAIN: u8 = 3;

#[derive(Parser)]
#[command(
    name = "secb",
    version,
    about = "Backward parabolic solver with slow-evolution constraints"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the amplification constant Lambda from x = K + x^(s/T).
    Lambda {
        #[arg(long = "K")]
        secb_ratio: f64,
        #[arg(long = "s")]
        secb_time: f64,
        #[arg(long = "T")]
        horizon: f64,
        /// Relative convergence tolerance of the fixed-point iteration.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Critical constraint time s* = T log(M/delta - K) / log(M/delta).
    Sstar {
        #[arg(long)]
        delta: f64,
        #[arg(long = "M")]
        apriori_bound: f64,
        #[arg(long = "K")]
        secb_ratio: f64,
        #[arg(long = "T")]
        horizon: f64,
    },
    /// Run one benchmark configuration and write the error table as CSV.
    Table {
        #[arg(long)]
        delta: f64,
        #[arg(long = "s")]
        secb_time: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV path.
        #[arg(long, default_value = "table.csv")]
        out: PathBuf,
        /// Manifest path; defaults to the output path with a .manifest.json suffix.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[command(flatten)]
        overrides: ConfigOverrides,
    },
    /// Compute terminal-state curves for several noise radii (TSV).
    Figure {
        #[arg(long = "s")]
        secb_time: f64,
        /// Comma-separated noise radii, e.g. 1e-4,1e-3,1e-2.
        #[arg(long, value_delimiter = ',', required = true)]
        deltas: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "figure.tsv")]
        out: PathBuf,
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[command(flatten)]
        overrides: ConfigOverrides,
    },
    /// Run the built-in invariant suite and exit nonzero on any failure.
    Verify {
        /// Skip the slower convergence-order sweeps.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Args)]
struct ConfigOverrides {
    /// Slow-evolution product K*delta (defaults depend on s).
    #[arg(long)]
    kdelta: Option<f64>,
    #[arg(long)]
    n_elements: Option<usize>,
    #[arg(long)]
    n_contour: Option<usize>,
    #[arg(long)]
    y_max: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    n_terms: Option<usize>,
}

impl ConfigOverrides {
    fn apply(&self, mut config: ExperimentConfig) -> ExperimentConfig {
        if let Some(v) = self.kdelta {
            config.kdelta = v;
        }
        if let Some(v) = self.n_elements {
            config.n_elements = v;
        }
        if let Some(v) = self.n_contour {
            config.n_contour = v;
        }
        if let Some(v) = self.y_max {
            config.y_max = v;
        }
        if let Some(v) = self.nu {
            config.nu = v;
        }
        if let Some(v) = self.sigma {
            config.sigma = v;
        }
        if let Some(v) = self.n_terms {
            config.n_terms = v;
        }
        config
    }

    fn build(
        &self,
        delta: f64,
        secb_time: f64,
        seed: u64,
    ) -> Result<ExperimentConfig, secb::Error> {
        let base = match ExperimentConfig::new(delta, secb_time, seed) {
            Ok(c) => c,
            Err(e) => {
                // An explicit product rescues unknown constraint times.
                if self.kdelta.is_some() {
                    let mut c = ExperimentConfig::new(delta, 3.8, seed)?;
                    c.secb_time = secb_time;
                    c
                } else {
                    return Err(e);
                }
            }
        };
        let config = self.apply(base);
        config.validate()?;
        Ok(config)
    }
}

/// Six-significant-digit scientific notation used for all emitted numbers.
fn fmt_sci(x: f64) -> String {
    format!("{x:.5e}")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_DOMAIN)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Lambda {
            secb_ratio,
            secb_time,
            horizon,
            tol,
        } => {
            let root = solve_lambda(secb_ratio, secb_time, horizon, tol)?;
            println!("lambda = {}", fmt_sci(root.lambda));
            println!("residual = {}", fmt_sci(root.residual));
            println!("iterations = {}", root.iterations);
            Ok(ExitCode::SUCCESS)
        }
        Command::Sstar {
            delta,
            apriori_bound,
            secb_ratio,
            horizon,
        } => {
            let s = s_star(delta, apriori_bound, secb_ratio, horizon)?;
            println!("s_star = {}", fmt_sci(s));
            Ok(ExitCode::SUCCESS)
        }
        Command::Table {
            delta,
            secb_time,
            seed,
            out,
            manifest,
            overrides,
        } => {
            let config = overrides.build(delta, secb_time, seed)?;
            let run = experiments::run_table(&config)?;

            let mut csv = String::from("t,computed,predicted\n");
            for row in &run.rows {
                csv.push_str(&format!(
                    "{},{},{}\n",
                    fmt_sci(row.t),
                    fmt_sci(row.computed),
                    fmt_sci(row.predicted)
                ));
            }
            std::fs::write(&out, csv)?;

            let manifest_path = manifest.unwrap_or_else(|| manifest::sibling_path(&out));
            let doc = RunManifest::for_table(&config, &run, &out);
            std::fs::write(&manifest_path, doc.to_json()?)?;

            println!(
                "wrote {} (lambda = {}, gamma = {}, enclosed modes = {}); manifest {}",
                out.display(),
                fmt_sci(run.lambda.lambda),
                fmt_sci(run.gamma),
                run.n_trunc,
                manifest_path.display()
            );
            println!(
                "slow-evolution residual = {} ({} K*delta = {})",
                fmt_sci(run.membership.secb_residual),
                if run.membership.in_class {
                    "within"
                } else {
                    "exceeds"
                },
                fmt_sci(config.kdelta)
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Figure {
            secb_time,
            deltas,
            seed,
            out,
            manifest,
            overrides,
        } => {
            let configs: Vec<ExperimentConfig> = deltas
                .iter()
                .map(|&delta| overrides.build(delta, secb_time, seed))
                .collect::<Result<_, _>>()?;
            let figure = experiments::run_figure(&configs)?;

            let mut tsv = String::from("x\texact");
            for (delta, _) in &figure.columns {
                tsv.push_str(&format!("\tdelta={}", fmt_sci(*delta)));
            }
            tsv.push('\n');
            for i in 0..figure.x.len() {
                tsv.push_str(&fmt_sci(figure.x[i]));
                tsv.push('\t');
                tsv.push_str(&fmt_sci(figure.exact[i]));
                for (_, column) in &figure.columns {
                    tsv.push('\t');
                    tsv.push_str(&fmt_sci(column[i]));
                }
                tsv.push('\n');
            }
            std::fs::write(&out, tsv)?;

            let manifest_path = manifest.unwrap_or_else(|| manifest::sibling_path(&out));
            let entries: Vec<ManifestEntry> = configs
                .iter()
                .map(|config| {
                    let root =
                        solve_lambda(config.secb_ratio(), config.secb_time, config.horizon, 1e-12)?;
                    Ok(ManifestEntry::resolve(config, &root))
                })
                .collect::<Result<_, secb::Error>>()?;
            let doc = RunManifest::for_figure(&configs, entries, &out);
            std::fs::write(&manifest_path, doc.to_json()?)?;

            println!(
                "wrote {} ({} columns); manifest {}",
                out.display(),
                2 + figure.columns.len(),
                manifest_path.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { quick } => {
            if verify::run_all(quick) {
                println!("verify: all checks passed");
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("verify: FAILED");
                Ok(ExitCode::from(1))
            }
        }
    }
}
