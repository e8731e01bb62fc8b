//! Run configuration, input ingestion and the versioned report behind the `cwdlab` binary.

mod commands;
mod config;
mod ingest;
mod table;

pub use commands::{grid_semimetric_endpoint, line_form, m2_profile, vicsek_witness};
pub use config::*;
pub use ingest::*;
pub use table::*;

use crate::Result;
use std::time::Instant;

/// Validate, dispatch, and write every artifact under `config.out` when it is set.
pub fn run(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let start = Instant::now();
    let out = commands::dispatch(config)?;
    let mut report = Report {
        schema: SCHEMA,
        meta: Meta {
            command: config.command(),
            config_hash: config.hash(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            parallel: crate::par::is_parallel(),
            wall_time_ms: None,
        },
        tables: out.tables,
        verdicts: out.verdicts,
        artifacts: Vec::new(),
    };
    let mut files = out.files;
    if config.csv {
        for t in &report.tables {
            files.push((format!("tables/{}.csv", t.name), t.to_csv()?));
        }
    }
    if config.wants_json() {
        files.push(("report.json".into(), String::new()));
    }
    report.artifacts = files.iter().map(|f| f.0.clone()).collect();
    report.artifacts.sort();
    if !config.normalized {
        report.meta.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    if let Some(dir) = &config.out {
        std::fs::create_dir_all(dir.join("tables"))?;
        for (name, body) in &files {
            let body = if name == "report.json" { report.to_json()? } else { body.clone() };
            std::fs::write(dir.join(name), body)?;
        }
    }
    Ok(report)
}
