//! Config-driven batch front end.
//!
//! Settings come from defaults, then `EMODEL_SEED`, then a flat `key = value` file, then
//! flags. Exit codes: 0 all checks pass, 2 a tolerance failed, 3 numerical abort, 64 usage.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::Parser;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{CMat, C64};
use crate::dynamics::{
    current_of, integrate, BiYbModel, EModel, IntegrationOptions, Scheme, TStarModel, Trajectory,
};
use crate::error::Error;
use crate::integrability::{
    lax_observables, lax_residual, rmatrix_identity, verify_conditions, BiYbSpectral, ElemOf, PcmSpectral,
    SpectralData,
};
use crate::models::{self, cpn, pendulum, SuiteReport};
use crate::random::{complex_gaussian, rng_from_seed, su_element, Rng};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_TOLERANCE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

/// Invalid configuration; always names the offending field.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid value for `{field}`: {reason}")]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

fn bad(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.to_string(),
        reason: reason.into(),
    }
}

macro_rules! named_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn name(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }

            fn parse(field: &str, s: &str) -> Result<Self, ConfigError> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(bad(field, format!(
                        "expected one of {}, got `{s}`",
                        [$($text),+].join(", ")
                    ))),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }
    };
}

named_enum!(Command {
    Simulate => "simulate",
    Verify => "verify",
    LaxCheck => "lax-check",
    Reduce => "reduce",
    Appendix => "appendix",
    Parity => "parity",
});

named_enum!(ModelKind {
    Pendulum => "pendulum",
    Pcm => "pcm",
    Cpn => "cpn",
    BiybSu2 => "biyb-su2",
    BiybSu3 => "biyb-su3",
    YbCpn => "yb-cpn",
});

named_enum!(XiPreset {
    CartanRegular => "cartan-regular",
    CpnBlock => "cpn-block",
});

/// One experiment. `n` is the matrix size for `pcm`, and the `N` of `CP^N` for `cpn`
/// and `yb-cpn`; the other models fix it.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub command: Option<Command>,
    pub model: ModelKind,
    pub n: usize,
    pub eta: f64,
    pub mu: f64,
    pub xi_preset: XiPreset,
    pub t_end: f64,
    pub dt: f64,
    pub scheme: Scheme,
    pub lambdas: Vec<C64>,
    pub powers: Vec<u32>,
    pub samples: usize,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub out_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: None,
            model: ModelKind::Pendulum,
            n: 2,
            eta: 0.7,
            mu: 0.3,
            xi_preset: XiPreset::CpnBlock,
            t_end: 10.0,
            dt: 1e-3,
            scheme: Scheme::Rk4,
            lambdas: vec![C64::new(0.3, 0.0), C64::new(0.5, 0.2), C64::new(-0.4, 0.1)],
            powers: vec![2, 3],
            samples: 100,
            seed: 0,
            tolerances: BTreeMap::new(),
            out_dir: None,
        }
    }
}

/// Parses `a`, `a+bi`, `a-bi`, `bi` (exponents allowed).
pub fn parse_complex(s: &str) -> Option<C64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return None;
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse().ok().map(|re| C64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        x => x,
    };
    Some(C64::new(re.parse().ok()?, im.parse().ok()?))
}

fn parse_f64(field: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = v.parse().map_err(|_| bad(field, format!("not a number: `{v}`")))?;
    if !x.is_finite() {
        return Err(bad(field, "must be finite"));
    }
    Ok(x)
}

fn parse_int<T: std::str::FromStr>(field: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| bad(field, format!("not a non-negative integer: `{v}`")))
}

impl ExperimentConfig {
    /// Sets one key. Shared by the file parser and the flags.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "command" => self.command = Some(Command::parse(key, v)?),
            "model" => self.model = ModelKind::parse(key, v)?,
            "N" | "n" => self.n = parse_int("N", v)?,
            "eta" => self.eta = parse_f64(key, v)?,
            "mu" => self.mu = parse_f64(key, v)?,
            "xi_preset" => self.xi_preset = XiPreset::parse(key, v)?,
            "t_end" => self.t_end = parse_f64(key, v)?,
            "dt" => self.dt = parse_f64(key, v)?,
            "scheme" => {
                self.scheme = match v {
                    "rk4" => Scheme::Rk4,
                    "dopri" => Scheme::Dopri,
                    _ => return Err(bad(key, format!("expected rk4 or dopri, got `{v}`"))),
                }
            }
            "lambdas" => {
                self.lambdas = v
                    .split(',')
                    .filter(|x| !x.trim().is_empty())
                    .map(|x| parse_complex(x).ok_or_else(|| bad(key, format!("not a complex number: `{}`", x.trim()))))
                    .collect::<Result<_, _>>()?
            }
            "powers" => {
                self.powers = v
                    .split(',')
                    .filter(|x| !x.trim().is_empty())
                    .map(|x| parse_int(key, x.trim()))
                    .collect::<Result<_, _>>()?
            }
            "samples" => self.samples = parse_int(key, v)?,
            "seed" => self.seed = parse_int(key, v)?,
            "out_dir" => self.out_dir = Some(PathBuf::from(v)),
            _ => {
                if let Some(name) = key.strip_prefix("tol.") {
                    if name.is_empty() {
                        return Err(bad(key, "empty tolerance name"));
                    }
                    let t = parse_f64(key, v)?;
                    if t < 0.0 {
                        return Err(bad(key, "must be non-negative"));
                    }
                    self.tolerances.insert(name.to_string(), t);
                } else {
                    return Err(bad(key, "unknown key"));
                }
            }
        }
        Ok(())
    }

    /// Applies a flat `key = value` text; `#` starts a comment.
    pub fn merge_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| bad(&format!("line {}", no + 1), "expected `key = value`"))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut c = Self::default();
        c.merge_text(text)?;
        c.validate()?;
        Ok(c)
    }

    /// Key-value pairs in a fixed order, as written by [`Self::to_text`].
    pub fn pairs(&self) -> Vec<(String, String)> {
        let join = |v: Vec<String>| v.join(", ");
        let mut out = Vec::new();
        if let Some(c) = self.command {
            out.push(("command".into(), c.name().into()));
        }
        out.push(("model".into(), self.model.name().into()));
        out.push(("N".into(), self.n.to_string()));
        out.push(("eta".into(), self.eta.to_string()));
        out.push(("mu".into(), self.mu.to_string()));
        out.push(("xi_preset".into(), self.xi_preset.name().into()));
        out.push(("t_end".into(), self.t_end.to_string()));
        out.push(("dt".into(), self.dt.to_string()));
        out.push(("scheme".into(), self.scheme.to_string()));
        out.push((
            "lambdas".into(),
            join(self.lambdas.iter().map(|&z| crate::dynamics::format_complex(z)).collect()),
        ));
        out.push(("powers".into(), join(self.powers.iter().map(|p| p.to_string()).collect())));
        out.push(("samples".into(), self.samples.to_string()));
        out.push(("seed".into(), self.seed.to_string()));
        for (k, v) in &self.tolerances {
            out.push((format!("tol.{k}"), v.to_string()));
        }
        if let Some(d) = &self.out_dir {
            out.push(("out_dir".into(), d.display().to_string()));
        }
        out
    }

    pub fn to_text(&self) -> String {
        self.pairs().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// Matrix size of the double.
    pub fn matrix_size(&self) -> usize {
        match self.model {
            ModelKind::Pendulum | ModelKind::BiybSu2 => 2,
            ModelKind::BiybSu3 => 3,
            ModelKind::Pcm => self.n,
            ModelKind::Cpn | ModelKind::YbCpn => self.n + 1,
        }
    }

    fn xi(&self) -> CMat {
        let n = self.matrix_size();
        match self.model {
            ModelKind::Pendulum | ModelKind::BiybSu2 => pendulum::zeta(),
            ModelKind::Cpn | ModelKind::YbCpn => cpn::zeta(self.n),
            ModelKind::Pcm | ModelKind::BiybSu3 => match self.xi_preset {
                XiPreset::CartanRegular => models::regular_xi(n),
                XiPreset::CpnBlock => models::block_xi(n),
            },
        }
    }

    fn uses_lu_weinstein(&self) -> bool {
        matches!(self.model, ModelKind::BiybSu2 | ModelKind::BiybSu3 | ModelKind::YbCpn)
    }

    fn effective_mu(&self) -> f64 {
        if self.model == ModelKind::YbCpn {
            0.0
        } else {
            self.mu
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.dt > 0.0) {
            return Err(bad("dt", "must be positive"));
        }
        if !(self.t_end > 0.0) {
            return Err(bad("t_end", "must be positive"));
        }
        if self.samples == 0 {
            return Err(bad("samples", "must be at least 1"));
        }
        let min_n = if self.model == ModelKind::Pcm { 2 } else { 1 };
        if self.n < min_n || self.n > 16 {
            return Err(bad("N", format!("must lie in {min_n}..=16")));
        }
        if self.eta < 0.0 {
            return Err(bad("eta", "must be non-negative"));
        }
        if self.mu < 0.0 {
            return Err(bad("mu", "must be non-negative"));
        }
        if self.powers.is_empty() || self.powers.contains(&0) {
            return Err(bad("powers", "need at least one positive power"));
        }
        let needs_dynamics = matches!(self.command, Some(Command::Simulate | Command::LaxCheck | Command::Verify));
        if needs_dynamics && self.uses_lu_weinstein() && self.eta <= 0.0 {
            return Err(bad("eta", "the Lu-Weinstein double needs eta > 0"));
        }
        // poles of the spectral coefficients
        for &l in &self.lambdas {
            let pole = if self.uses_lu_weinstein() && self.eta > 0.0 {
                BiYbModel::new(self.xi(), self.eta, self.effective_mu())
                    .map(BiYbSpectral::new)
                    .and_then(|sd| sd.coefficients(l).map(|_| ()))
                    .err()
            } else {
                PcmSpectral::new(TStarModel::new(self.xi()).map_err(|e| bad("N", e.to_string()))?)
                    .coefficients(l)
                    .err()
            };
            if let Some(e) = pole {
                return Err(bad("lambdas", format!("{} excluded: {e}", crate::dynamics::format_complex(l))));
            }
        }
        Ok(())
    }
}

#[derive(Parser, Debug)]
#[command(name = "emodel-lab", version, about = "Point-particle E-model experiments")]
struct Cli {
    /// simulate, verify, lax-check, reduce, appendix or parity
    command: Option<String>,
    /// Flat key = value file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long = "N", visible_alias = "n")]
    n: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    #[arg(long, alias = "xi_preset")]
    xi_preset: Option<String>,
    #[arg(long, alias = "t_end", allow_hyphen_values = true)]
    t_end: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    dt: Option<String>,
    #[arg(long)]
    scheme: Option<String>,
    /// Comma-separated complex numbers such as `0.3+0i,0.5-0.2i`
    #[arg(long, allow_hyphen_values = true)]
    lambdas: Option<String>,
    #[arg(long)]
    powers: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Threshold override for a named check, `NAME=VALUE`; repeatable
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Writes report.json (and trajectory.csv) here instead of printing
    #[arg(long, alias = "out_dir")]
    out_dir: Option<String>,
    /// Prints the resolved configuration and exits
    #[arg(long, alias = "print_config")]
    print_config: bool,
}

fn resolve(cli: &Cli, env_seed: Option<String>) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = ExperimentConfig::default();
    if let Some(s) = env_seed {
        cfg.set("seed", &s).map_err(|e| bad("EMODEL_SEED", e.reason))?;
    }
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| bad("config", format!("{}: {e}", path.display())))?;
        cfg.merge_text(&text)?;
    }
    let flags: [(&str, &Option<String>); 13] = [
        ("command", &cli.command),
        ("model", &cli.model),
        ("N", &cli.n),
        ("eta", &cli.eta),
        ("mu", &cli.mu),
        ("xi_preset", &cli.xi_preset),
        ("t_end", &cli.t_end),
        ("dt", &cli.dt),
        ("scheme", &cli.scheme),
        ("lambdas", &cli.lambdas),
        ("powers", &cli.powers),
        ("samples", &cli.samples),
        ("seed", &cli.seed),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            cfg.set(k, v)?;
        }
    }
    for t in &cli.tol {
        let (k, v) = t.split_once('=').ok_or_else(|| bad("tol", format!("expected NAME=VALUE, got `{t}`")))?;
        cfg.set(&format!("tol.{}", k.trim()), v)?;
    }
    if let Some(d) = &cli.out_dir {
        cfg.set("out_dir", d)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Result of [`run`]: exit code, JSON report and an optional trajectory CSV.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
    pub csv: Option<String>,
}

impl Outcome {
    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn report_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("report is serialisable");
        s.push('\n');
        s
    }
}

fn is_usage(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidParameter { .. } | Error::DimensionMismatch { .. } | Error::KindMismatch(_)
    )
}

struct Sections {
    suites: Vec<SuiteReport>,
    extra: BTreeMap<String, Value>,
    csv: Option<String>,
}

/// Runs one experiment. Deterministic in `(config, seed)`.
pub fn run(cfg: &ExperimentConfig) -> Outcome {
    let header = |status: &str| {
        let config: BTreeMap<String, String> = cfg.pairs().into_iter().filter(|(k, _)| k != "out_dir").collect();
        json!({ "status": status, "config": config })
    };
    let Some(command) = cfg.command else {
        let mut r = header("usage-error");
        r["error"] = json!("no command given");
        return Outcome {
            code: EXIT_USAGE,
            report: r,
            csv: None,
        };
    };
    match execute(command, cfg) {
        Ok(mut sec) => {
            for s in &mut sec.suites {
                s.apply_tolerances(&cfg.tolerances);
            }
            let pass = sec.suites.iter().all(|s| s.pass());
            let mut r = header(if pass { "pass" } else { "tolerance-failure" });
            r["command"] = json!(command.name());
            r["suites"] = serde_json::to_value(&sec.suites).expect("serialisable");
            for (k, v) in sec.extra {
                r[k] = v;
            }
            Outcome {
                code: if pass { EXIT_PASS } else { EXIT_TOLERANCE },
                report: r,
                csv: sec.csv,
            }
        }
        Err(e) => {
            let usage = is_usage(&e);
            let mut r = header(if usage { "usage-error" } else { "numerical-abort" });
            r["command"] = json!(command.name());
            r["error"] = json!(e.to_string());
            Outcome {
                code: if usage { EXIT_USAGE } else { EXIT_NUMERICAL },
                report: r,
                csv: None,
            }
        }
    }
}

fn tol(cfg: &ExperimentConfig, name: &str, default: f64) -> f64 {
    cfg.tolerances.get(name).copied().unwrap_or(default)
}

fn execute(command: Command, cfg: &ExperimentConfig) -> crate::Result<Sections> {
    let mut sec = Sections {
        suites: Vec::new(),
        extra: BTreeMap::new(),
        csv: None,
    };
    let (n, seed, samples) = (cfg.n, cfg.seed, cfg.samples);
    match command {
        Command::Simulate | Command::LaxCheck => {
            let lax = command == Command::LaxCheck;
            let xi = cfg.xi();
            let mut rng = rng_from_seed(seed);
            if cfg.uses_lu_weinstein() {
                let sd = BiYbSpectral::new(BiYbModel::new(xi, cfg.eta, cfg.effective_mu())?);
                let l0 = sd.model().random_point(0.3, &mut rng);
                simulate(&sd, &l0, cfg, lax, &mut sec)?;
            } else {
                let model = TStarModel::new(xi)?;
                let l0 = tstar_initial(cfg, &model, &mut rng)?;
                simulate(&PcmSpectral::new(model), &l0, cfg, lax, &mut sec)?;
            }
        }
        Command::Verify => {
            let xi = cfg.xi();
            if cfg.uses_lu_weinstein() {
                let model = BiYbModel::new(xi, cfg.eta, cfg.effective_mu())?;
                verify(&BiYbSpectral::new(model.clone()), cfg, &mut sec)?;
                let neg = verify_conditions(&BiYbSpectral::negative_control(model), samples, seed, 1e-10)?;
                let worst = neg.iter().map(|r| r.max_residual).fold(0.0, f64::max);
                sec.suites[0].note("negative-control-max-residual", worst);
            } else {
                verify(&PcmSpectral::new(TStarModel::new(xi)?), cfg, &mut sec)?;
            }
        }
        Command::Reduce => {
            sec.suites.push(models::reduction::reduction_suite(n, samples, seed)?);
            sec.suites.push(cpn::cpn_suite(n, samples, seed)?);
        }
        Command::Appendix => {
            sec.suites.push(models::su3::suite(cfg.eta, cfg.mu, samples, seed)?);
        }
        Command::Parity => {
            let rep = match cfg.model {
                ModelKind::Pendulum => pendulum::pendulum_suite(samples.min(10), seed, cfg.t_end, cfg.dt)?,
                ModelKind::Pcm => models::pcm::pcm_suite(&cfg.xi(), samples, seed)?,
                ModelKind::Cpn => cpn::cpn_suite(n, samples, seed)?,
                ModelKind::BiybSu2 => models::biyb::su2_suite(cfg.eta, cfg.mu, samples, seed)?,
                ModelKind::BiybSu3 => models::su3::suite(cfg.eta, cfg.mu, samples, seed)?,
                ModelKind::YbCpn => models::ybcpn::yb_cpn_suite(n, cfg.eta, samples, seed)?,
            };
            sec.suites.push(rep);
        }
    }
    Ok(sec)
}

fn tstar_initial(cfg: &ExperimentConfig, model: &TStarModel, rng: &mut Rng) -> crate::Result<crate::doubles::TStarPoint> {
    match cfg.model {
        ModelKind::Pendulum => {
            let s = pendulum::random_state(rng);
            pendulum::state(s.x, s.v)
        }
        ModelKind::Cpn => {
            let (chi, w) = models::reduction::random_chart(cfg.n, 0.5, rng);
            cpn::tstar_point(&chi, &w)
        }
        _ => {
            let n = model.n();
            let k = crate::random::special_unitary(n, rng);
            let stab = crate::algebra::Stabilizer::new(model.zeta())?;
            let rho = stab.project_perp(&su_element(n, rng)).scale(0.5);
            Ok(model.point_from_rho(&k, &rho))
        }
    }
}

fn simulate<S: SpectralData>(
    sd: &S,
    l0: &<S::Model as EModel>::Point,
    cfg: &ExperimentConfig,
    lax: bool,
    sec: &mut Sections,
) -> crate::Result<()> {
    let model = sd.model();
    let obs = lax_observables(sd, &cfg.lambdas, &cfg.powers)?;
    let opts = IntegrationOptions {
        scheme: cfg.scheme,
        ..IntegrationOptions::rk4(cfg.t_end, cfg.dt)
    };
    let traj: Trajectory<_, ElemOf<S>> = integrate(model, l0, &opts, &obs)?;
    let mut rep = SuiteReport::new(if lax { "lax-check" } else { "simulate" }, cfg.seed, 1);
    rep.record("energy-drift", traj.energy_drift(), tol(cfg, "energy-drift", 1e-8));
    let summary = traj.summary();
    for (_, d) in &summary.observable_drifts {
        rep.record("observable-drift", *d, tol(cfg, "observable-drift", 1e-8));
    }
    if lax {
        for &l in &cfg.lambdas {
            let c = lax_residual(sd, &traj, l)?;
            rep.record("lax-residual", c.residual, tol(cfg, "lax-residual", 1e-6));
            rep.record("spectral-drift", c.spectral_drift, tol(cfg, "spectral-drift", 1e-8));
        }
    }
    sec.extra.insert("trajectory".into(), serde_json::to_value(&summary).expect("serialisable"));
    sec.csv = Some(traj.to_csv(model));
    sec.suites.push(rep);
    Ok(())
}

fn verify<S: SpectralData>(sd: &S, cfg: &ExperimentConfig, sec: &mut Sections) -> crate::Result<()> {
    let threshold = tol(cfg, "conditions", 1e-10);
    let reports = verify_conditions(sd, cfg.samples, cfg.seed, threshold)?;
    let mut rep = SuiteReport::new("conditions", cfg.seed, cfg.samples);
    for r in &reports {
        let name = serde_json::to_value(r.condition).expect("serialisable");
        rep.record(name.as_str().unwrap_or("condition"), r.max_residual, r.threshold);
    }
    // fundamental r-matrix relation on random draws
    let model = sd.model();
    let n = model.n();
    let mut rng = rng_from_seed(cfg.seed ^ 0x9e37_79b9);
    let mut done = 0;
    while done < cfg.samples {
        let lambda = complex_gaussian(&mut rng) * 0.5;
        let rho = complex_gaussian(&mut rng) * 0.5;
        let j = current_of(model, &model.random_point(0.5, &mut rng));
        let x = su_element(n, &mut rng);
        let y = su_element(n, &mut rng);
        let coeffs_ok = [lambda, rho]
            .iter()
            .all(|&z| sd.coefficients(z).map(|c| c.iter().all(|v| v.norm() < 20.0)).unwrap_or(false));
        if !coeffs_ok || (lambda - rho).norm() < 0.05 {
            continue;
        }
        let Ok((lhs, rhs)) = rmatrix_identity(sd, &j, &x, &y, lambda, rho) else {
            continue;
        };
        rep.record("rmatrix-identity", (lhs - rhs).norm() / lhs.norm().max(1.0), tol(cfg, "rmatrix-identity", 1e-10));
        done += 1;
    }
    sec.extra.insert("conditions".into(), serde_json::to_value(&reports).expect("serialisable"));
    sec.suites.push(rep);
    Ok(())
}

fn write_outputs(cfg: &ExperimentConfig, out: &Outcome) -> std::io::Result<()> {
    match &cfg.out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("report.json"), out.report_json())?;
            if let Some(csv) = &out.csv {
                std::fs::write(dir.join("trajectory.csv"), csv)?;
            }
            eprintln!("{}: {}", out.report["status"].as_str().unwrap_or("?"), dir.display());
        }
        None => print!("{}", out.report_json()),
    }
    Ok(())
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match resolve(&cli, std::env::var("EMODEL_SEED").ok()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if cli.print_config {
        print!("{}", cfg.to_text());
        return EXIT_PASS;
    }
    if cfg.command.is_none() {
        eprintln!("error: no command given (expected one of {})", Command::ALL.iter().map(|c| c.name()).collect::<Vec<_>>().join(", "));
        return EXIT_USAGE;
    }
    let out = run(&cfg);
    if let Err(e) = write_outputs(&cfg, &out) {
        eprintln!("error: cannot write outputs: {e}");
        return EXIT_NUMERICAL;
    }
    out.code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0.3"), Some(C64::new(0.3, 0.0)));
        assert_eq!(parse_complex("0.5+0.2i"), Some(C64::new(0.5, 0.2)));
        assert_eq!(parse_complex("-0.5-1e-3i"), Some(C64::new(-0.5, -1e-3)));
        assert_eq!(parse_complex("1e-2+2E+1i"), Some(C64::new(0.01, 20.0)));
        assert_eq!(parse_complex("-2i"), Some(C64::new(0.0, -2.0)));
        assert_eq!(parse_complex("i"), Some(C64::new(0.0, 1.0)));
        assert_eq!(parse_complex("abc"), None);
        assert_eq!(parse_complex(""), None);
    }

    #[test]
    fn unknown_key_names_the_field() {
        let e = ExperimentConfig::parse("colour = blue").unwrap_err();
        assert_eq!(e.field, "colour");
    }

    #[test]
    fn poles_are_rejected_at_validation() {
        let e = ExperimentConfig::parse("model = pcm\nN = 2\nlambdas = 1+0i").unwrap_err();
        assert_eq!(e.field, "lambdas");
    }

    #[test]
    fn default_round_trips() {
        let c = ExperimentConfig::default();
        assert_eq!(ExperimentConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn flags_override_file_and_env() {
        let cli = Cli::try_parse_from(["emodel-lab", "verify", "--model", "pcm", "--N", "3", "--seed", "7"]).unwrap();
        let cfg = resolve(&cli, Some("11".into())).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.n, 3);
        let cli = Cli::try_parse_from(["emodel-lab", "verify"]).unwrap();
        assert_eq!(resolve(&cli, Some("11".into())).unwrap().seed, 11);
    }

    #[test]
    fn missing_command_is_usage() {
        let out = run(&ExperimentConfig::default());
        assert_eq!(out.code, EXIT_USAGE);
    }
}
