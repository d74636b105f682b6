//! Run manifests: every emitted file is paired with a JSON document holding
//! the full configuration, the resolved constants, and the seed, so the run
//! can be reproduced bit-identically.

use std::path::{Path, PathBuf};

use serde::Serialize;

use secb::constraints::LambdaRoot;
use secb::experiments::{ExperimentConfig, TableRun};
use secb::spectral::truncation_index;

#[derive(Serialize)]
pub struct RunManifest {
    tool: &'static str,
    version: &'static str,
    created_unix: u64,
    command: &'static str,
    output: String,
    config: ConfigDoc,
    resolved: Vec<ManifestEntry>,
}

#[derive(Serialize)]
struct ConfigDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    deltas: Option<Vec<f64>>,
    secb_time: f64,
    horizon: f64,
    diffusivity: f64,
    kdelta: f64,
    n_elements: usize,
    n_contour: usize,
    y_max: f64,
    nu: f64,
    sigma: f64,
    n_terms: usize,
    seed: u64,
}

#[derive(Serialize)]
pub struct ManifestEntry {
    delta: f64,
    lambda: f64,
    lambda_residual: f64,
    lambda_iterations: usize,
    gamma: f64,
    n_trunc: usize,
}

impl ManifestEntry {
    pub fn resolve(config: &ExperimentConfig, root: &LambdaRoot) -> Self {
        Self {
            delta: config.delta,
            lambda: root.lambda,
            lambda_residual: root.residual,
            lambda_iterations: root.iterations,
            gamma: root.lambda.ln() / config.horizon + config.nu,
            n_trunc: truncation_index(root.lambda, config.horizon, config.diffusivity),
        }
    }
}

impl RunManifest {
    pub fn for_table(config: &ExperimentConfig, run: &TableRun, output: &Path) -> Self {
        Self {
            tool: "secb",
            version: env!("CARGO_PKG_VERSION"),
            created_unix: now_unix(),
            command: "table",
            output: output.display().to_string(),
            config: ConfigDoc::from_config(config, None),
            resolved: vec![ManifestEntry {
                delta: config.delta,
                lambda: run.lambda.lambda,
                lambda_residual: run.lambda.residual,
                lambda_iterations: run.lambda.iterations,
                gamma: run.gamma,
                n_trunc: run.n_trunc,
            }],
        }
    }

    pub fn for_figure(
        configs: &[ExperimentConfig],
        resolved: Vec<ManifestEntry>,
        output: &Path,
    ) -> Self {
        let first = &configs[0];
        let deltas = configs.iter().map(|c| c.delta).collect();
        Self {
            tool: "secb",
            version: env!("CARGO_PKG_VERSION"),
            created_unix: now_unix(),
            command: "figure",
            output: output.display().to_string(),
            config: ConfigDoc::from_config(first, Some(deltas)),
            resolved,
        }
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }
}

impl ConfigDoc {
    fn from_config(config: &ExperimentConfig, deltas: Option<Vec<f64>>) -> Self {
        Self {
            delta: if deltas.is_none() {
                Some(config.delta)
            } else {
                None
            },
            deltas,
            secb_time: config.secb_time,
            horizon: config.horizon,
            diffusivity: config.diffusivity,
            kdelta: config.kdelta,
            n_elements: config.n_elements,
            n_contour: config.n_contour,
            y_max: config.y_max,
            nu: config.nu,
            sigma: config.sigma,
            n_terms: config.n_terms,
            seed: config.seed,
        }
    }
}

/// Manifest path placed next to an output file.
pub fn sibling_path(out: &Path) -> PathBuf {
    let mut name = out
        .file_stem()
        .map(|s| s.to_os_string())
        .unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn now_unix() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}
