use clap::Parser;
use cwdlab::report::{run, Inputs, Params, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

/// cwdlab <group> <verb> [flags]
///
/// Groups: filling (build, weights, check), pcf (energy, m2, spectrum, vicsek, sgdegen),
/// diag (cap, ehi, vd, rh, d_h, g1d).
#[derive(Parser, Debug)]
#[command(version, about, allow_negative_numbers = true)]
struct Cli {
    group: String,
    verb: String,
    /// TOML config; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    csv: bool,
    /// Omit wall time so reruns are byte-identical.
    #[arg(long)]
    normalized: bool,
    #[arg(long)]
    strict: bool,
    /// Point cloud or distance matrix CSV.
    #[arg(long)]
    points_file: Option<PathBuf>,
    /// Density CSV with columns x,g.
    #[arg(long)]
    density: Option<PathBuf>,
    /// Graph CSV with columns kind,a,b,value.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    exponent: Option<f64>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    level: Option<usize>,
    #[arg(long)]
    max_level: Option<usize>,
    /// Grid size when no points file is given.
    #[arg(long)]
    points: Option<usize>,
    /// sg, vicsek, interval, path, plane, const or half.
    #[arg(long)]
    fractal: Option<String>,
    /// gradient or zero.
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    word: Option<String>,
}

impl Cli {
    fn into_config(self) -> RunConfig {
        RunConfig {
            group: self.group,
            verb: self.verb,
            out: self.out,
            seed: self.seed,
            json: self.json,
            csv: self.csv,
            normalized: self.normalized,
            strict: self.strict,
            inputs: Inputs { points: self.points_file, density: self.density, graph: self.graph },
            params: Params {
                a: self.a,
                lambda: self.lambda,
                beta: self.beta,
                gamma: self.gamma,
                alpha: self.alpha,
                rho: self.rho,
                delta: self.delta,
                r: self.r,
                t: self.t,
                p: self.p,
                exponent: self.exponent,
                dim: self.dim,
                level: self.level,
                max_level: self.max_level,
                points: self.points,
                fractal: self.fractal,
                sigma: self.sigma,
                word: self.word,
            },
        }
    }
}

fn main() -> ExitCode {
    cwdlab::par::init_threads_from_env();
    let cli = Cli::parse();
    let file = cli.config.clone();
    let flags = cli.into_config();
    let config = match file {
        Some(path) => match RunConfig::load(&path) {
            Ok(mut c) => {
                c.overlay(&flags);
                c
            }
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
        None => flags,
    };
    match run(&config) {
        Ok(report) => {
            println!("{}", report.meta.command);
            for t in &report.tables {
                println!("  table {} ({} rows)", t.name, t.rows.len());
            }
            for v in &report.verdicts {
                let consts: Vec<String> = v.constants.iter().map(|(k, c)| format!("{k}={c}")).collect();
                println!("  {} {} [{}] {}", if v.pass { "PASS" } else { "FAIL" }, v.name, v.op, consts.join(" "));
            }
            if let Some(dir) = &config.out {
                println!("  wrote {} artifacts to {}", report.artifacts.len(), dir.display());
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
