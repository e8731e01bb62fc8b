use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::PathBuf;

/// Every `group verb` pair accepted by [`super::run`].
pub const COMMANDS: &[(&str, &[&str])] = &[
    ("filling", &["build", "weights", "check"]),
    ("pcf", &["energy", "m2", "spectrum", "vicsek", "sgdegen"]),
    ("diag", &["cap", "ehi", "vd", "rh", "d_h", "g1d"]),
];

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Inputs {
    /// Point cloud `id,x,y,...` or distance matrix `id,<id1>,<id2>,...`.
    pub points: Option<PathBuf>,
    /// Two columns `x,g`.
    pub density: Option<PathBuf>,
    /// Rows `kind,a,b,value` with kind `e` (edge) or `m` (vertex mass).
    pub graph: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub a: Option<f64>,
    pub lambda: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub alpha: Option<f64>,
    pub rho: Option<f64>,
    pub delta: Option<f64>,
    pub r: Option<f64>,
    pub t: Option<f64>,
    pub p: Option<f64>,
    pub exponent: Option<f64>,
    pub dim: Option<usize>,
    pub level: Option<usize>,
    pub max_level: Option<usize>,
    pub points: Option<usize>,
    pub fractal: Option<String>,
    pub sigma: Option<String>,
    pub word: Option<String>,
}

macro_rules! overlay {
    ($base:expr, $over:expr, $($f:ident),*) => {
        $( if $over.$f.is_some() { $base.$f = $over.$f.clone(); } )*
    };
}

impl Params {
    pub fn overlay(&mut self, o: &Params) {
        overlay!(
            self, o, a, lambda, beta, gamma, alpha, rho, delta, r, t, p, exponent, dim, level, max_level, points, fractal,
            sigma, word
        );
    }
}

/// One run: `group verb` with inputs, parameters and output options.
///
/// The TOML form has top-level keys plus `[inputs]` and `[params]` sections; command-line flags override it.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub group: String,
    pub verb: String,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub json: bool,
    pub csv: bool,
    /// Drop wall time so that reports are byte-identical across runs.
    pub normalized: bool,
    pub strict: bool,
    pub inputs: Inputs,
    pub params: Params,
}

fn bad(msg: String) -> Error {
    Error::Config(msg)
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| bad(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Fields set in `o` win; flags are or-ed.
    pub fn overlay(&mut self, o: &RunConfig) {
        if !o.group.is_empty() {
            self.group = o.group.clone();
        }
        if !o.verb.is_empty() {
            self.verb = o.verb.clone();
        }
        overlay!(self, o, out, seed);
        overlay!(self.inputs, o.inputs, points, density, graph);
        self.params.overlay(&o.params);
        self.json |= o.json;
        self.csv |= o.csv;
        self.normalized |= o.normalized;
        self.strict |= o.strict;
    }

    pub fn command(&self) -> String {
        format!("{} {}", self.group, self.verb)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// JSON when neither format was requested.
    pub fn wants_json(&self) -> bool {
        self.json || !self.csv
    }

    /// SHA-256 of the canonical JSON form, output directory excluded.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = None;
        c.normalized = false;
        let text = serde_json::to_string(&c).expect("config serializes");
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let verbs = COMMANDS
            .iter()
            .find(|(g, _)| *g == self.group)
            .ok_or_else(|| bad(format!("unknown group '{}'", self.group)))?
            .1;
        if !verbs.contains(&self.verb.as_str()) {
            return Err(bad(format!("unknown verb '{}' for group '{}'", self.verb, self.group)));
        }
        let p = &self.params;
        let check = |name: &str, v: Option<f64>, ok: &dyn Fn(f64) -> bool, domain: &str| -> Result<()> {
            match v {
                Some(x) if !ok(x) => Err(bad(format!("{name} = {x} outside {domain}"))),
                _ => Ok(()),
            }
        };
        check("a", p.a, &|x| x > 1.0, "(1, ∞)")?;
        check("lambda", p.lambda, &|x| x >= 3.0, "[3, ∞)")?;
        check("beta", p.beta, &|x| x > 0.0, "(0, ∞)")?;
        check("gamma", p.gamma, &|x| x >= 0.0, "[0, ∞)")?;
        let lam = p.lambda.unwrap_or(32.0);
        check("alpha", p.alpha, &|x| (2.0..=lam / 4.0).contains(&x), "[2, λ/4]")?;
        check("rho", p.rho, &|x| x > 0.0 && x < 1.0, "(0, 1)")?;
        check("delta", p.delta, &|x| x > 0.0 && x < 1.0, "(0, 1)")?;
        check("r", p.r, &|x| x > 0.0 && x < 0.5, "(0, 1/2)")?;
        check("t", p.t, &|x| x > -1.0, "(−1, ∞)")?;
        check("p", p.p, &|x| x > 1.0, "(1, ∞)")?;
        check("exponent", p.exponent, &|x| x > 0.0, "(0, ∞)")?;
        if let Some(n) = p.dim {
            if n < 2 {
                return Err(bad(format!("dim = {n} must be at least 2")));
            }
        }
        for (name, v, hi) in [("level", p.level, 16), ("max_level", p.max_level, 16)] {
            if let Some(l) = v {
                if l > hi {
                    return Err(bad(format!("{name} = {l} exceeds {hi}")));
                }
            }
        }
        if let Some(n) = p.points {
            if n < 2 {
                return Err(bad(format!("points = {n} must be at least 2")));
            }
        }
        if let Some(f) = &p.fractal {
            if !["sg", "vicsek", "interval", "path", "plane", "const", "half"].contains(&f.as_str()) {
                return Err(bad(format!("unknown fractal '{f}'")));
            }
        }
        if let Some(s) = &p.sigma {
            if !["gradient", "zero"].contains(&s.as_str()) {
                return Err(bad(format!("unknown sigma '{s}'")));
            }
        }
        Ok(())
    }
}
