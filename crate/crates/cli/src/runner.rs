//! Run orchestration: prepare a run directory, execute the plan inside the
//! configured worker pool, and leave a manifest behind — marked `failed`
//! (with the error preserved) when the experiment aborts mid-way.

use std::path::{Path, PathBuf};

use crate::config::ExperimentConfig;
use crate::manifest::{now_rfc3339, sha256_hex, RunManifest, RunStatus};
use crate::plan;
use crate::CliError;

/// Environment variable naming the worker-thread count. This is the only
/// environment influence the tool accepts; everything else comes from the
/// config file.
pub const WORKERS_ENV: &str = "SGDLAB_WORKERS";

fn worker_pool() -> Result<Option<rayon::ThreadPool>, CliError> {
    let Some(raw) = std::env::var_os(WORKERS_ENV) else {
        return Ok(None);
    };
    let text = raw.to_string_lossy();
    let n: usize = text.parse().map_err(|_| {
        CliError::Validation(vec![format!(
            "{WORKERS_ENV}: must be a positive integer, got {text:?}"
        )])
    })?;
    if n == 0 {
        return Err(CliError::Validation(vec![format!(
            "{WORKERS_ENV}: must be a positive integer, got 0"
        )]));
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| {
        CliError::Run(format!("cannot build a {n}-thread worker pool: {e}"))
    })?;
    Ok(Some(pool))
}

/// `<output_dir>/<kind>-<UTC stamp>-<config hash prefix>`, suffixed with a
/// counter if a directory of that name already exists.
fn create_run_dir(config: &ExperimentConfig, config_hash: &str) -> Result<PathBuf, CliError> {
    let parent = &config.output_dir;
    std::fs::create_dir_all(parent).map_err(|e| {
        CliError::Run(format!("cannot create output directory {}: {e}", parent.display()))
    })?;
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ");
    let base = format!("{}-{stamp}-{}", config.kind, &config_hash[..8]);
    for attempt in 0..1000u32 {
        let name = if attempt == 0 { base.clone() } else { format!("{base}-{attempt}") };
        let dir = parent.join(&name);
        match std::fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => {
                return Err(CliError::Run(format!(
                    "cannot create run directory {}: {e}",
                    dir.display()
                )))
            }
        }
    }
    Err(CliError::Run(format!(
        "gave up finding a free run-directory name under {}",
        parent.display()
    )))
}

/// Validates a config without running it. Returns the plan warnings.
pub fn validate(config_path: &Path) -> Result<Vec<String>, CliError> {
    let config = ExperimentConfig::load(config_path)?;
    let (_, warnings) = plan::plan(&config)?;
    Ok(warnings)
}

/// Executes the experiment described by `config_path`. Returns the run
/// directory; on failure the directory still exists with a `failed`
/// manifest covering whatever was written.
pub fn run(config_path: &Path) -> Result<PathBuf, CliError> {
    let config = ExperimentConfig::load(config_path)?;
    let (plan, mut warnings) = plan::plan(&config)?;
    let pool = worker_pool()?;

    let canonical = config.canonical_json();
    let config_hash = sha256_hex(canonical.as_bytes());
    let dir = create_run_dir(&config, &config_hash)?;
    std::fs::write(dir.join("config.json"), &canonical).map_err(|e| {
        CliError::Run(format!("cannot write the resolved config copy: {e}"))
    })?;

    let started = now_rfc3339();
    let seed = config.seed;
    let result = match &pool {
        Some(p) => p.install(|| crate::experiments::execute(plan, seed, &dir)),
        None => crate::experiments::execute(plan, seed, &dir),
    };
    let finished = now_rfc3339();

    let (status, error) = match &result {
        Ok(run_warnings) => {
            warnings.extend(run_warnings.iter().cloned());
            (RunStatus::Ok, None)
        }
        Err(msg) => (RunStatus::Failed, Some(msg.clone())),
    };
    let outputs = RunManifest::collect_outputs(&dir)
        .map_err(|e| CliError::Run(format!("cannot checksum run outputs: {e}")))?;
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").into(),
        kind: config.kind,
        seed,
        config_hash,
        started,
        finished,
        status,
        error,
        warnings,
        outputs,
    };
    manifest
        .write(&dir)
        .map_err(|e| CliError::Run(format!("cannot write the manifest: {e}")))?;

    match result {
        Ok(_) => Ok(dir),
        Err(msg) => Err(CliError::Run(format!("{msg} (see {})", dir.display()))),
    }
}

/// Re-verifies a run directory. Returns the manifest together with any
/// integrity problems found.
pub fn report(run_dir: &Path) -> Result<(RunManifest, Vec<String>), CliError> {
    let manifest = RunManifest::load(run_dir)?;
    let problems = manifest
        .verify(run_dir)
        .map_err(|e| CliError::Validation(vec![format!("report: cannot scan {}: {e}", run_dir.display())]))?;
    Ok((manifest, problems))
}
