//! Flat `section.key = value` experiment configuration.
//!
//! ```text
//! # physics (bare keys)
//! gamma = 0.5
//! epsilon = 1e-3
//! T = 20
//!
//! domain.kind = linear          # constant | linear | saturating
//! domain.right0 = 0.5
//! domain.right_speed = 0.05
//!
//! initial.u0 = sine             # zero | sine | bump
//! initial.u0_amplitude = 0.1
//! initial.u0_mode = 2
//!
//! sweep.epsilon = [1e-2, 1e-3, 1e-4]
//! ```
//!
//! Blank lines and `#` comments are ignored. Unknown or duplicated keys are
//! errors. Required keys: `gamma`, `domain.kind`, `initial.u0`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::fem1d::Projection;
use crate::geometry::{BoundaryMotion, Interval};
use crate::integrator::{
    DomainSpec, InitialData, InitialProfile, SimConfig, DEFAULT_PICARD_ITERS, DEFAULT_PICARD_TOL,
};

pub const DEFAULT_WINDOW_FRACTION: f64 = 0.5;
pub const DEFAULT_FIT_TOL: f64 = 0.05;
pub const DEFAULT_CHECK_SEED: u64 = 20_240_601;
pub const DEFAULT_CORPUS_SIZE: usize = 100;

const KNOWN_KEYS: &[&str] = &[
    "a",
    "b",
    "gamma",
    "epsilon",
    "m",
    "dt",
    "T",
    "picard_iters",
    "picard_tol",
    "projection",
    "nonlinear",
    "domain.kind",
    "domain.x_lo",
    "domain.x_hi",
    "domain.left0",
    "domain.right0",
    "domain.left_speed",
    "domain.right_speed",
    "domain.left_inf",
    "domain.right_inf",
    "domain.rate",
    "initial.u0",
    "initial.u0_amplitude",
    "initial.u0_mode",
    "initial.u1",
    "initial.u1_amplitude",
    "initial.u1_mode",
    "sweep.epsilon",
    "sweep.m",
    "output.dir",
    "fit.window_fraction",
    "fit.tol",
    "fit.energy_csv",
    "check.seed",
    "check.corpus_size",
    "check.max_modes",
];

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub sim: SimConfig,
    pub sweep_epsilon: Option<Vec<f64>>,
    pub sweep_m: Option<Vec<usize>>,
    pub out_dir: PathBuf,
    pub window_fraction: f64,
    pub fit_tol: f64,
    /// Input of the `fit` subcommand; defaults to `<out_dir>/energy.csv`.
    pub energy_csv: Option<PathBuf>,
    pub check_seed: u64,
    pub corpus_size: usize,
    pub max_modes: u32,
}

impl ExperimentConfig {
    /// `(epsilon, m)` cells of the sweep, ε-major.
    pub fn sweep_plan(&self) -> Vec<(f64, usize)> {
        let eps = self
            .sweep_epsilon
            .clone()
            .unwrap_or_else(|| vec![self.sim.epsilon]);
        let ms = self.sweep_m.clone().unwrap_or_else(|| vec![self.sim.m]);
        eps.iter()
            .flat_map(|&e| ms.iter().map(move |&m| (e, m)))
            .collect()
    }
}

struct Doc {
    entries: BTreeMap<String, String>,
}

impl Doc {
    fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64> {
        self.take(key).map_or(Ok(default), |v| parse_f64(key, &v))
    }

    fn opt_f64(&mut self, key: &str) -> Result<Option<f64>> {
        self.take(key).map(|v| parse_f64(key, &v)).transpose()
    }

    fn usize_or(&mut self, key: &str, default: usize) -> Result<usize> {
        self.take(key).map_or(Ok(default), |v| parse_usize(key, &v))
    }

    fn required(&mut self, key: &str) -> Result<String> {
        self.take(key)
            .ok_or_else(|| Error::config(key, "missing required key"))
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| Error::config(key, format!("expected a number, got `{v}`")))?;
    if !x.is_finite() {
        return Err(Error::config(key, "value must be finite"));
    }
    Ok(x)
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.parse()
        .map_err(|_| Error::config(key, format!("expected a non-negative integer, got `{v}`")))
}

fn parse_list<T>(key: &str, v: &str, item: impl Fn(&str, &str) -> Result<T>) -> Result<Vec<T>> {
    let inner = v
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::config(key, format!("expected a list `[a, b, ...]`, got `{v}`")))?;
    let items: Vec<T> = inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| item(key, s))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::config(key, "list must not be empty"));
    }
    Ok(items)
}

fn unquote(v: &str) -> &str {
    v.strip_prefix('"')
        .and_then(|s| s.strip_suffix('"'))
        .unwrap_or(v)
}

fn parse_profile(doc: &mut Doc, which: &str, default_zero: bool) -> Result<InitialProfile> {
    let key = format!("initial.{which}");
    let kind = if default_zero {
        doc.take(&key).unwrap_or_else(|| "zero".into())
    } else {
        doc.required(&key)?
    };
    let amp_key = format!("initial.{which}_amplitude");
    let mode_key = format!("initial.{which}_mode");
    let profile = match unquote(&kind) {
        "zero" => InitialProfile::Zero,
        "sine" => InitialProfile::Sine {
            amplitude: doc.f64_or(&amp_key, 1.0)?,
            mode: {
                let mode = doc.usize_or(&mode_key, 1)?;
                if mode == 0 {
                    return Err(Error::config(&mode_key, "mode must be at least 1"));
                }
                mode as u32
            },
        },
        "bump" => InitialProfile::Bump {
            amplitude: doc.f64_or(&amp_key, 1.0)?,
        },
        other => {
            return Err(Error::config(
                &key,
                format!("unknown profile `{other}` (expected zero, sine or bump)"),
            ))
        }
    };
    for k in [&amp_key, &mode_key] {
        if doc.entries.contains_key(k.as_str()) {
            return Err(Error::config(k, format!("not used by profile `{kind}`")));
        }
    }
    Ok(profile)
}

fn parse_domain(doc: &mut Doc) -> Result<DomainSpec> {
    let x_lo = doc.f64_or("domain.x_lo", 0.0)?;
    let x_hi = doc.f64_or("domain.x_hi", 1.0)?;
    let ambient = Interval::new(x_lo, x_hi)
        .ok()
        .filter(|i| !i.is_empty())
        .ok_or_else(|| Error::config("domain.x_hi", "ambient interval must satisfy x_lo < x_hi"))?;
    let left0 = doc.f64_or("domain.left0", x_lo)?;
    let right0 = doc.f64_or("domain.right0", x_hi)?;
    let initial = Interval::new(left0, right0)
        .ok()
        .filter(|i| !i.is_empty() && ambient.contains_interval(i))
        .ok_or_else(|| {
            Error::config(
                "domain.right0",
                "initial domain must satisfy x_lo ≤ left0 < right0 ≤ x_hi",
            )
        })?;
    let kind = doc.required("domain.kind")?;
    let motion = match unquote(&kind) {
        "constant" => BoundaryMotion::Constant,
        "linear" => {
            let left_speed = doc.f64_or("domain.left_speed", 0.0)?;
            let right_speed = doc.f64_or("domain.right_speed", 0.0)?;
            for (k, v) in [
                ("domain.left_speed", left_speed),
                ("domain.right_speed", right_speed),
            ] {
                if v < 0.0 {
                    return Err(Error::config(
                        k,
                        "speed must be non-negative (expanding domains only)",
                    ));
                }
            }
            BoundaryMotion::Linear {
                left_speed,
                right_speed,
            }
        }
        "saturating" => {
            let left_inf = doc.f64_or("domain.left_inf", left0)?;
            let right_inf = doc.f64_or("domain.right_inf", right0)?;
            let rate = doc.f64_or("domain.rate", 1.0)?;
            if rate < 0.0 {
                return Err(Error::config("domain.rate", "rate must be non-negative"));
            }
            if !(x_lo <= left_inf && left_inf <= left0) {
                return Err(Error::config(
                    "domain.left_inf",
                    "need x_lo ≤ left_inf ≤ left0",
                ));
            }
            if !(right0 <= right_inf && right_inf <= x_hi) {
                return Err(Error::config(
                    "domain.right_inf",
                    "need right0 ≤ right_inf ≤ x_hi",
                ));
            }
            BoundaryMotion::Saturating {
                left_inf,
                right_inf,
                rate,
            }
        }
        other => {
            return Err(Error::config(
                "domain.kind",
                format!("unknown kind `{other}` (expected constant, linear or saturating)"),
            ))
        }
    };
    Ok(DomainSpec {
        ambient,
        initial,
        motion,
    })
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut entries = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::config(format!("line {}", lineno + 1), "expected `key = value`")
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::config(key, "unknown key"));
        }
        if value.is_empty() {
            return Err(Error::config(key, "empty value"));
        }
        if entries.insert(key.to_string(), value.to_string()).is_some() {
            return Err(Error::config(key, "duplicate key"));
        }
    }
    let mut doc = Doc { entries };

    let gamma = parse_f64("gamma", &doc.required("gamma")?)?;
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::config(
            "gamma",
            format!("must satisfy 0 < γ < 1, got {gamma}"),
        ));
    }
    let domain = parse_domain(&mut doc)?;
    let initial = InitialData {
        u0: parse_profile(&mut doc, "u0", false)?,
        u1: parse_profile(&mut doc, "u1", true)?,
    };
    let mut sim = SimConfig::new(gamma, domain, initial);

    let positive = |key: &str, v: f64| -> Result<f64> {
        if v > 0.0 {
            Ok(v)
        } else {
            Err(Error::config(key, format!("must be positive, got {v}")))
        }
    };
    sim.a = positive("a", doc.f64_or("a", sim.a)?)?;
    sim.b = positive("b", doc.f64_or("b", sim.b)?)?;
    sim.epsilon = positive("epsilon", doc.f64_or("epsilon", sim.epsilon)?)?;
    sim.horizon = positive("T", doc.f64_or("T", sim.horizon)?)?;
    sim.m = doc.usize_or("m", sim.m)?;
    if sim.m == 0 {
        return Err(Error::config("m", "must be at least 1"));
    }
    sim.dt = doc.opt_f64("dt")?.map(|v| positive("dt", v)).transpose()?;
    if let Some(dt) = sim.dt {
        if dt > sim.horizon {
            return Err(Error::config(
                "dt",
                format!("dt = {dt} exceeds T = {}", sim.horizon),
            ));
        }
    }
    sim.picard_iters = doc.usize_or("picard_iters", DEFAULT_PICARD_ITERS)?;
    if sim.picard_iters == 0 {
        return Err(Error::config("picard_iters", "must be at least 1"));
    }
    sim.picard_tol = positive("picard_tol", doc.f64_or("picard_tol", DEFAULT_PICARD_TOL)?)?;
    sim.projection = match doc.take("projection").as_deref().map(unquote) {
        None | Some("interp") => Projection::Interp,
        Some("l2") => Projection::L2,
        Some(other) => {
            return Err(Error::config(
                "projection",
                format!("expected interp or l2, got `{other}`"),
            ))
        }
    };
    sim.nonlinear = match doc.take("nonlinear").as_deref() {
        None | Some("true") => true,
        Some("false") => false,
        Some(other) => {
            return Err(Error::config(
                "nonlinear",
                format!("expected true or false, got `{other}`"),
            ))
        }
    };

    let sweep_epsilon = doc
        .take("sweep.epsilon")
        .map(|v| parse_list("sweep.epsilon", &v, parse_f64))
        .transpose()?;
    if let Some(eps) = &sweep_epsilon {
        if eps.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::config("sweep.epsilon", "values must be positive"));
        }
    }
    let sweep_m = doc
        .take("sweep.m")
        .map(|v| parse_list("sweep.m", &v, parse_usize))
        .transpose()?;
    if let Some(ms) = &sweep_m {
        if ms.contains(&0) {
            return Err(Error::config("sweep.m", "values must be at least 1"));
        }
    }

    let out_dir = PathBuf::from(unquote(
        &doc.take("output.dir").unwrap_or_else(|| "out".into()),
    ));
    let window_fraction = doc.f64_or("fit.window_fraction", DEFAULT_WINDOW_FRACTION)?;
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::config("fit.window_fraction", "must lie in (0, 1]"));
    }
    let fit_tol = doc.f64_or("fit.tol", DEFAULT_FIT_TOL)?;
    if !(fit_tol >= 0.0) {
        return Err(Error::config("fit.tol", "must be non-negative"));
    }
    let energy_csv = doc
        .take("fit.energy_csv")
        .map(|v| PathBuf::from(unquote(&v)));
    let check_seed = match doc.take("check.seed") {
        Some(v) => v
            .parse()
            .map_err(|_| Error::config("check.seed", format!("expected an integer, got `{v}`")))?,
        None => DEFAULT_CHECK_SEED,
    };
    let corpus_size = doc.usize_or("check.corpus_size", DEFAULT_CORPUS_SIZE)?;
    let max_modes = doc.usize_or("check.max_modes", crate::corpus::DEFAULT_MAX_MODES as usize)?;
    if max_modes == 0 {
        return Err(Error::config("check.max_modes", "must be at least 1"));
    }

    if let Some(key) = doc.entries.keys().next() {
        return Err(Error::config(
            key,
            "not used by the selected domain kind or profile",
        ));
    }
    sim.validate()
        .map_err(|e| Error::config("config", e.to_string()))?;

    Ok(ExperimentConfig {
        sim,
        sweep_epsilon,
        sweep_m,
        out_dir,
        window_fraction,
        fit_tol,
        energy_csv,
        check_seed,
        corpus_size,
        max_modes: max_modes as u32,
    })
}
