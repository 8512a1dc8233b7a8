//! Declarative run configuration: a line-oriented `key = value` file with
//! `[section]` headers. Rationals are accepted as `a/b` and parsed exactly
//! before any float conversion, so structure-changing parameter thresholds
//! survive parsing.

use anyhow::{bail, Context, Result};
use fh_core::rat::{Exactness, Rat};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: String,
    /// γ₀ kept exact when entered as a ratio.
    pub gamma0: Exactness,
    /// Raw spelling of gamma0, echoed into reports.
    pub gamma0_text: String,
    /// Branch selection: auto | lower | upper.
    pub branch: String,
    /// Unfolding coefficient: γ(ε) = γ₀ + γ₁ ε².
    pub gamma1: f64,
    /// Ascending amplitude scales.
    pub eps: Vec<f64>,
    /// Test-suite size for the operator-bound stage.
    pub suite_size: usize,
    /// Interpolation integer; 0 means the minimal admissible value.
    pub bound_n: u32,
    /// Grid cells for the simulation stage.
    pub sim_cells: usize,
    pub sim_t_end: f64,
    pub sim_snapshot_dt: f64,
    pub sim_seed_amplitude: f64,
    /// Which ε the simulation stage uses (must appear in `eps`).
    pub sim_eps: f64,
    /// Bloch points per side for the band sweep.
    pub band_points: usize,
    pub out_dir: String,
    pub seed: u64,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: "fhn".into(),
            gamma0: Exactness::Rational(Rat::new(4, 1).unwrap()),
            gamma0_text: "4".into(),
            branch: "auto".into(),
            gamma1: 1.0,
            eps: vec![0.005, 0.01, 0.02, 0.04],
            suite_size: 100,
            bound_n: 0,
            sim_cells: 512,
            sim_t_end: 55.0,
            sim_snapshot_dt: 0.25,
            sim_seed_amplitude: 1e-6,
            sim_eps: 0.02,
            band_points: 4,
            out_dir: "out".into(),
            seed: 0,
            workers: 1,
        }
    }
}

fn parse_exact(s: &str) -> Result<Exactness> {
    if let Ok(r) = Rat::parse(s) {
        Ok(Exactness::Rational(r))
    } else {
        let v: f64 = s.trim().parse().with_context(|| format!("cannot parse number {s:?}"))?;
        Ok(Exactness::Float(v))
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    if let Ok(r) = Rat::parse(s) {
        return Ok(r.to_f64());
    }
    Ok(s.trim().parse::<f64>().with_context(|| format!("cannot parse number {s:?}"))?)
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::from_str_impl(&text)
    }

    pub fn from_str_impl(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(h) = line.strip_prefix('[') {
                let h = h.strip_suffix(']').with_context(|| format!("line {}: bad section", lineno + 1))?;
                section = h.trim().to_string();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .with_context(|| format!("line {}: expected key = value", lineno + 1))?;
            let key = format!("{}.{}", section, k.trim());
            cfg.set(&key, v.trim())
                .with_context(|| format!("line {}: {}", lineno + 1, raw.trim()))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "model.name" => self.model = value.to_string(),
            "model.gamma0" => {
                self.gamma0 = parse_exact(value)?;
                self.gamma0_text = value.to_string();
            }
            "model.branch" => self.branch = value.to_string(),
            "unfolding.gamma1" => self.gamma1 = parse_f64(value)?,
            "continuation.eps" => {
                let mut eps = Vec::new();
                for part in value.split(',') {
                    let p = part.trim();
                    if !p.is_empty() {
                        eps.push(parse_f64(p)?);
                    }
                }
                self.eps = eps;
            }
            "bounds.suite_size" => self.suite_size = value.parse()?,
            "bounds.n" => self.bound_n = if value == "auto" { 0 } else { value.parse()? },
            "simulate.cells" => self.sim_cells = value.parse()?,
            "simulate.t_end" => self.sim_t_end = parse_f64(value)?,
            "simulate.snapshot_dt" => self.sim_snapshot_dt = parse_f64(value)?,
            "simulate.seed_amplitude" => self.sim_seed_amplitude = parse_f64(value)?,
            "simulate.eps" => self.sim_eps = parse_f64(value)?,
            "spectrum.band_points" => self.band_points = value.parse()?,
            "output.dir" => self.out_dir = value.to_string(),
            "output.seed" => self.seed = value.parse()?,
            "output.workers" => self.workers = value.parse()?,
            other => bail!("unknown config key {other:?}"),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma0.to_f64() <= 0.0 {
            bail!("gamma0 must be positive");
        }
        let mut prev = 0.0;
        for &e in &self.eps {
            if e <= 0.0 {
                bail!("eps values must be positive");
            }
            if e < prev {
                bail!("eps values must be ascending");
            }
            prev = e;
        }
        if !matches!(self.branch.as_str(), "auto" | "lower" | "upper") {
            bail!("branch must be auto, lower or upper");
        }
        if self.workers == 0 {
            bail!("workers must be at least 1");
        }
        Ok(())
    }

    /// Canonical listing of the effective configuration, used for embedding
    /// and hashing so identical runs produce identical reports.
    pub fn canonical_string(&self) -> String {
        let mut m = BTreeMap::new();
        m.insert("bounds.n", self.bound_n.to_string());
        m.insert("bounds.suite_size", self.suite_size.to_string());
        m.insert(
            "continuation.eps",
            self.eps.iter().map(|e| format!("{e:.17e}")).collect::<Vec<_>>().join(","),
        );
        m.insert("model.branch", self.branch.clone());
        m.insert("model.gamma0", self.gamma0_text.clone());
        m.insert("model.name", self.model.clone());
        m.insert("output.dir", self.out_dir.clone());
        m.insert("output.seed", self.seed.to_string());
        m.insert("output.workers", self.workers.to_string());
        m.insert("simulate.cells", self.sim_cells.to_string());
        m.insert("simulate.eps", format!("{:.17e}", self.sim_eps));
        m.insert("simulate.seed_amplitude", format!("{:.17e}", self.sim_seed_amplitude));
        m.insert("simulate.snapshot_dt", format!("{:.17e}", self.sim_snapshot_dt));
        m.insert("simulate.t_end", format!("{:.17e}", self.sim_t_end));
        m.insert("spectrum.band_points", self.band_points.to_string());
        m.insert("unfolding.gamma1", format!("{:.17e}", self.gamma1));
        let mut out = String::new();
        for (k, v) in m {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// FNV-1a hash of the canonical configuration.
    pub fn hash(&self) -> String {
        let mut h: u64 = 0xcbf29ce484222325;
        for b in self.canonical_string().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }
}
