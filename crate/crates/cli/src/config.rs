//! Run configuration: a flat, sectioned TOML file.
//!
//! Parsing never stops at the first problem; every violation is collected
//! with the key path it belongs to.

use std::fmt;
use std::path::{Path, PathBuf};

use interphase::equilibrium::{solve_equilibrium_radius, solve_equilibrium_temperature, TemperatureSolution};
use interphase::materials::{FreeEnergy, MaterialPair, PhaseModel, Poly};
use interphase::radial_bvp::DEFAULT_ORDER;
use interphase::{EquilibriumState, Geometry};
use toml::{Table, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub key: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Equilibrium,
    Classify,
    DispersionSweep,
    Evolve,
    Sweep,
}

impl Mode {
    pub const ALL: [Mode; 5] = [
        Mode::Equilibrium,
        Mode::Classify,
        Mode::DispersionSweep,
        Mode::Evolve,
        Mode::Sweep,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Equilibrium => "equilibrium",
            Mode::Classify => "classify",
            Mode::DispersionSweep => "dispersion-sweep",
            Mode::Evolve => "evolve",
            Mode::Sweep => "sweep",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        Mode::ALL.into_iter().find(|m| m.as_str() == s)
    }
}

/// How the equilibrium is pinned down.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Anchor {
    Radius(f64),
    Temperature(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub poly: Vec<f64>,
    pub mu: Vec<f64>,
    pub d: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Sigma,
    ThetaStar,
    RStar,
    ROuter,
}

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::Sigma => "sigma",
            SweepParam::ThetaStar => "theta_star",
            SweepParam::RStar => "R_star",
            SweepParam::ROuter => "R_outer",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [SweepParam::Sigma, SweepParam::ThetaStar, SweepParam::RStar, SweepParam::ROuter]
            .into_iter()
            .find(|p| p.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParam,
    pub range: (f64, f64),
    pub count: usize,
}

impl SweepSpec {
    /// `count` equispaced values, both ends included.
    pub fn values(&self) -> Vec<f64> {
        let (a, b) = self.range;
        if self.count == 1 {
            return vec![a];
        }
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    b
                } else {
                    a + (b - a) * i as f64 / (self.count - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    Bump,
    Eigen,
    CustomFile(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionSpec {
    pub t_end: f64,
    pub dt: f64,
    pub init: InitSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionSpec {
    pub l_max: usize,
    pub lambdas: Vec<f64>,
}

impl Default for DispersionSpec {
    fn default() -> Self {
        DispersionSpec {
            l_max: 8,
            lambdas: vec![0.0, 0.01, 0.1, 1.0, 10.0, 100.0, 1e4],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Option<Mode>,
    pub phase1: PhaseSpec,
    pub phase2: PhaseSpec,
    pub sigma: f64,
    pub theta_range: (f64, f64),
    pub n: usize,
    pub r_outer: f64,
    pub anchor: Anchor,
    pub theta_guess: Option<f64>,
    pub m: usize,
    pub order: usize,
    pub evolution: Option<EvolutionSpec>,
    pub sweep: Option<SweepSpec>,
    pub dispersion: DispersionSpec,
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn phase_model(&self, which: usize) -> interphase::Result<PhaseModel> {
        let p = if which == 1 { &self.phase1 } else { &self.phase2 };
        PhaseModel::new(
            FreeEnergy::new(p.a, p.b, p.c).with_tail(p.poly.clone()),
            Poly(p.mu.clone()),
            Poly(p.d.clone()),
            self.theta_range,
        )
    }

    pub fn pair(&self) -> interphase::Result<MaterialPair> {
        MaterialPair::new(self.phase_model(1)?, self.phase_model(2)?, self.sigma)
    }

    /// Geometry template; the radius is a placeholder when the anchor is a
    /// temperature.
    pub fn geometry(&self) -> Geometry {
        let r = match self.anchor {
            Anchor::Radius(r) => r,
            Anchor::Temperature(_) => 0.5 * self.r_outer,
        };
        Geometry::concentric(self.n, r, self.r_outer).with_inclusions(self.m)
    }

    pub fn solve_equilibrium(&self) -> interphase::Result<TemperatureSolution> {
        let pair = self.pair()?;
        match self.anchor {
            Anchor::Temperature(t) => Ok(TemperatureSolution {
                state: solve_equilibrium_radius(&pair, self.geometry(), t)?,
                warnings: Vec::new(),
            }),
            Anchor::Radius(_) => solve_equilibrium_temperature(&pair, self.geometry(), self.theta_guess),
        }
    }

    /// Copy with one sweep parameter replaced.
    pub fn with_param(&self, p: SweepParam, value: f64) -> RunConfig {
        let mut c = self.clone();
        match p {
            SweepParam::Sigma => c.sigma = value,
            SweepParam::ThetaStar => c.anchor = Anchor::Temperature(value),
            SweepParam::RStar => c.anchor = Anchor::Radius(value),
            SweepParam::ROuter => c.r_outer = value,
        }
        c
    }
}

/// Reads and validates a configuration file. Relative paths inside the file
/// resolve against its directory.
pub fn load(path: &Path) -> std::io::Result<Result<RunConfig, Vec<Diagnostic>>> {
    let text = std::fs::read_to_string(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    Ok(parse(&text, base))
}

pub fn parse(text: &str, base: &Path) -> Result<RunConfig, Vec<Diagnostic>> {
    let table: Table = match text.parse() {
        Ok(t) => t,
        Err(e) => {
            return Err(vec![Diagnostic {
                key: "<file>".into(),
                message: format!("not valid TOML: {}", e.message()),
            }])
        }
    };
    let mut r = Reader::default();
    let cfg = r.run_config(&table, base);
    match cfg {
        Some(cfg) if r.diags.is_empty() => {
            let physics = physics_diagnostics(&cfg);
            if physics.is_empty() {
                Ok(cfg)
            } else {
                Err(physics)
            }
        }
        _ => Err(r.diags),
    }
}

const TOP_KEYS: [&str; 15] = [
    "mode", "phase1", "phase2", "sigma", "theta_range", "n", "R_outer", "R_star", "theta_star", "theta_guess", "m",
    "solver", "evolution", "sweep", "output",
];
const ALL_SECTIONS: [&str; 1] = ["dispersion"];
const PHASE_KEYS: [&str; 6] = ["a", "b", "c", "poly", "mu", "d"];

#[derive(Default)]
struct Reader {
    diags: Vec<Diagnostic>,
}

impl Reader {
    fn err(&mut self, key: &str, message: impl Into<String>) {
        self.diags.push(Diagnostic {
            key: key.into(),
            message: message.into(),
        });
    }

    fn unknown_keys(&mut self, t: &Table, prefix: &str, allowed: &[&str]) {
        for k in t.keys() {
            if !allowed.contains(&k.as_str()) {
                let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                self.err(&path, "unknown key");
            }
        }
    }

    fn number(&mut self, t: &Table, key: &str, path: &str) -> Option<Option<f64>> {
        match t.get(key) {
            None => Some(None),
            Some(Value::Float(x)) => Some(Some(*x)),
            Some(Value::Integer(i)) => Some(Some(*i as f64)),
            Some(other) => {
                self.err(path, format!("expected a number, found {}", other.type_str()));
                None
            }
        }
    }

    fn required_number(&mut self, t: &Table, key: &str, path: &str) -> Option<f64> {
        match self.number(t, key, path)? {
            Some(x) if x.is_finite() => Some(x),
            Some(x) => {
                self.err(path, format!("{x} is not finite"));
                None
            }
            None => {
                self.err(path, "missing required key");
                None
            }
        }
    }

    fn integer(&mut self, t: &Table, key: &str, path: &str) -> Option<Option<i64>> {
        match t.get(key) {
            None => Some(None),
            Some(Value::Integer(i)) => Some(Some(*i)),
            Some(other) => {
                self.err(path, format!("expected an integer, found {}", other.type_str()));
                None
            }
        }
    }

    fn numbers(&mut self, t: &Table, key: &str, path: &str) -> Option<Option<Vec<f64>>> {
        let Some(v) = t.get(key) else { return Some(None) };
        let Value::Array(items) = v else {
            self.err(path, format!("expected an array of numbers, found {}", v.type_str()));
            return None;
        };
        let mut out = Vec::with_capacity(items.len());
        for (i, item) in items.iter().enumerate() {
            match item {
                Value::Float(x) if x.is_finite() => out.push(*x),
                Value::Integer(x) => out.push(*x as f64),
                other => {
                    self.err(&format!("{path}[{i}]"), format!("expected a finite number, found {other}"));
                    return None;
                }
            }
        }
        Some(Some(out))
    }

    fn pair_of(&mut self, t: &Table, key: &str, path: &str) -> Option<Option<(f64, f64)>> {
        match self.numbers(t, key, path)? {
            None => Some(None),
            Some(v) if v.len() == 2 => Some(Some((v[0], v[1]))),
            Some(v) => {
                self.err(path, format!("expected [min, max], found {} entries", v.len()));
                None
            }
        }
    }

    fn section<'a>(&mut self, t: &'a Table, key: &str) -> Option<Option<&'a Table>> {
        match t.get(key) {
            None => Some(None),
            Some(Value::Table(s)) => Some(Some(s)),
            Some(other) => {
                self.err(key, format!("expected a section, found {}", other.type_str()));
                None
            }
        }
    }

    fn string(&mut self, t: &Table, key: &str, path: &str) -> Option<Option<String>> {
        match t.get(key) {
            None => Some(None),
            Some(Value::String(s)) => Some(Some(s.clone())),
            Some(other) => {
                self.err(path, format!("expected a string, found {}", other.type_str()));
                None
            }
        }
    }

    fn phase(&mut self, t: &Table, name: &str) -> Option<PhaseSpec> {
        let Some(s) = self.section(t, name)? else {
            self.err(name, "missing required section");
            return None;
        };
        self.unknown_keys(s, name, &PHASE_KEYS);
        let a = self.number(s, "a", &format!("{name}.a")).map(|x| x.unwrap_or(0.0));
        let b = self.number(s, "b", &format!("{name}.b")).map(|x| x.unwrap_or(0.0));
        let c = self.required_number(s, "c", &format!("{name}.c"));
        let poly = self.numbers(s, "poly", &format!("{name}.poly")).map(Option::unwrap_or_default);
        let mu = self.numbers(s, "mu", &format!("{name}.mu")).map(|x| x.unwrap_or_else(|| vec![1.0]));
        let d = self.numbers(s, "d", &format!("{name}.d")).map(|x| x.unwrap_or_else(|| vec![1.0]));
        Some(PhaseSpec {
            a: a?,
            b: b?,
            c: c?,
            poly: poly?,
            mu: mu?,
            d: d?,
        })
    }

    fn positive_count(&mut self, t: &Table, key: &str, path: &str, default: Option<usize>) -> Option<usize> {
        match self.integer(t, key, path)? {
            Some(i) if i >= 1 => Some(i as usize),
            Some(i) => {
                self.err(path, format!("{i} must be at least 1"));
                None
            }
            None => match default {
                Some(d) => Some(d),
                None => {
                    self.err(path, "missing required key");
                    None
                }
            },
        }
    }

    fn run_config(&mut self, t: &Table, base: &Path) -> Option<RunConfig> {
        let mut allowed: Vec<&str> = TOP_KEYS.to_vec();
        allowed.extend(ALL_SECTIONS);
        self.unknown_keys(t, "", &allowed);

        let mode = match self.string(t, "mode", "mode") {
            Some(Some(s)) => match Mode::parse(&s) {
                Some(m) => Some(Some(m)),
                None => {
                    let names: Vec<&str> = Mode::ALL.iter().map(|m| m.as_str()).collect();
                    self.err("mode", format!("unknown mode {s:?}; expected one of {}", names.join(", ")));
                    None
                }
            },
            Some(None) => Some(None),
            None => None,
        };
        let phase1 = self.phase(t, "phase1");
        let phase2 = self.phase(t, "phase2");
        let sigma = self.required_number(t, "sigma", "sigma");
        let theta_range = match self.pair_of(t, "theta_range", "theta_range") {
            Some(Some(r)) => Some(r),
            Some(None) => {
                self.err("theta_range", "missing required key");
                None
            }
            None => None,
        };
        let n = match self.integer(t, "n", "n") {
            Some(Some(n @ (2 | 3))) => Some(n as usize),
            Some(Some(n)) => {
                self.err("n", format!("dimension {n} must be 2 or 3"));
                None
            }
            Some(None) => {
                self.err("n", "missing required key");
                None
            }
            None => None,
        };
        let r_outer = self.required_number(t, "R_outer", "R_outer");
        let r_star = self.number(t, "R_star", "R_star");
        let theta_star = self.number(t, "theta_star", "theta_star");
        let anchor = match (r_star, theta_star) {
            (Some(Some(_)), Some(Some(_))) => {
                self.err("R_star, theta_star", "exactly one of R_star and theta_star may be given, found both");
                None
            }
            (Some(Some(r)), Some(None)) => Some(Anchor::Radius(r)),
            (Some(None), Some(Some(th))) => Some(Anchor::Temperature(th)),
            (Some(None), Some(None)) => {
                self.err("R_star, theta_star", "exactly one of R_star and theta_star is required, found neither");
                None
            }
            _ => None,
        };
        let theta_guess = self.number(t, "theta_guess", "theta_guess");
        let m = self.positive_count(t, "m", "m", Some(1));

        let order = match self.section(t, "solver") {
            Some(Some(s)) => {
                self.unknown_keys(s, "solver", &["order"]);
                match self.integer(s, "order", "solver.order") {
                    Some(Some(o)) if (4..=512).contains(&o) => Some(o as usize),
                    Some(Some(o)) => {
                        self.err("solver.order", format!("{o} must lie in [4, 512]"));
                        None
                    }
                    Some(None) => Some(DEFAULT_ORDER),
                    None => None,
                }
            }
            Some(None) => Some(DEFAULT_ORDER),
            None => None,
        };
        let evolution = match self.section(t, "evolution") {
            Some(Some(s)) => self.evolution(s, base).map(Some),
            Some(None) => Some(None),
            None => None,
        };
        let sweep = match self.section(t, "sweep") {
            Some(Some(s)) => self.sweep(s).map(Some),
            Some(None) => Some(None),
            None => None,
        };
        let dispersion = match self.section(t, "dispersion") {
            Some(Some(s)) => self.dispersion(s),
            Some(None) => Some(DispersionSpec::default()),
            None => None,
        };
        let output_dir = match self.section(t, "output") {
            Some(Some(s)) => {
                self.unknown_keys(s, "output", &["dir"]);
                self.string(s, "dir", "output.dir").map(|d| d.map(|d| base.join(d)))
            }
            Some(None) => Some(None),
            None => None,
        };

        Some(RunConfig {
            mode: mode?,
            phase1: phase1?,
            phase2: phase2?,
            sigma: sigma?,
            theta_range: theta_range?,
            n: n?,
            r_outer: r_outer?,
            anchor: anchor?,
            theta_guess: theta_guess?,
            m: m?,
            order: order?,
            evolution: evolution?,
            sweep: sweep?,
            dispersion: dispersion?,
            output_dir: output_dir?,
        })
    }

    fn evolution(&mut self, s: &Table, base: &Path) -> Option<EvolutionSpec> {
        self.unknown_keys(s, "evolution", &["T_end", "dt", "init", "init_file"]);
        let t_end = self.required_number(s, "T_end", "evolution.T_end");
        let dt = self.required_number(s, "dt", "evolution.dt");
        if let (Some(t), Some(d)) = (t_end, dt) {
            if !(t > 0.0) {
                self.err("evolution.T_end", format!("{t} must be positive"));
            }
            if !(d > 0.0 && d <= t) {
                self.err("evolution.dt", format!("{d} must be positive and at most T_end"));
            }
        }
        let file = self.string(s, "init_file", "evolution.init_file");
        let init = match self.string(s, "init", "evolution.init") {
            Some(None) => Some(InitSpec::Bump),
            Some(Some(kind)) => match kind.as_str() {
                "bump" => Some(InitSpec::Bump),
                "eigen" => Some(InitSpec::Eigen),
                "custom-file" => match file.clone() {
                    Some(Some(f)) => Some(InitSpec::CustomFile(base.join(f))),
                    Some(None) => {
                        self.err("evolution.init_file", "required when evolution.init = \"custom-file\"");
                        None
                    }
                    None => None,
                },
                other => {
                    self.err(
                        "evolution.init",
                        format!("unknown initial data {other:?}; expected bump, eigen or custom-file"),
                    );
                    None
                }
            },
            None => None,
        };
        Some(EvolutionSpec {
            t_end: t_end?,
            dt: dt?,
            init: init?,
        })
    }

    fn sweep(&mut self, s: &Table) -> Option<SweepSpec> {
        self.unknown_keys(s, "sweep", &["parameter", "range", "count"]);
        let parameter = match self.string(s, "parameter", "sweep.parameter") {
            Some(Some(p)) => match SweepParam::parse(&p) {
                Some(p) => Some(p),
                None => {
                    self.err(
                        "sweep.parameter",
                        format!("unknown parameter {p:?}; expected sigma, theta_star, R_star or R_outer"),
                    );
                    None
                }
            },
            Some(None) => {
                self.err("sweep.parameter", "missing required key");
                None
            }
            None => None,
        };
        let range = match self.pair_of(s, "range", "sweep.range") {
            Some(Some((a, b))) if a <= b => Some((a, b)),
            Some(Some((a, b))) => {
                self.err("sweep.range", format!("[{a}, {b}] is empty"));
                None
            }
            Some(None) => {
                self.err("sweep.range", "missing required key");
                None
            }
            None => None,
        };
        let count = self.positive_count(s, "count", "sweep.count", None);
        Some(SweepSpec {
            parameter: parameter?,
            range: range?,
            count: count?,
        })
    }

    fn dispersion(&mut self, s: &Table) -> Option<DispersionSpec> {
        self.unknown_keys(s, "dispersion", &["l_max", "lambdas"]);
        let def = DispersionSpec::default();
        let l_max = match self.integer(s, "l_max", "dispersion.l_max")? {
            Some(l) if (0..=64).contains(&l) => Some(l as usize),
            Some(l) => {
                self.err("dispersion.l_max", format!("{l} must lie in [0, 64]"));
                None
            }
            None => Some(def.l_max),
        };
        let lambdas = match self.numbers(s, "lambdas", "dispersion.lambdas")? {
            Some(v) if v.is_empty() => {
                self.err("dispersion.lambdas", "must not be empty");
                None
            }
            Some(v) if v.iter().any(|&x| x < 0.0) => {
                self.err("dispersion.lambdas", "values must be >= 0");
                None
            }
            Some(v) => Some(v),
            None => Some(def.lambdas),
        };
        Some(DispersionSpec {
            l_max: l_max?,
            lambdas: lambdas?,
        })
    }
}

fn physics_diagnostics(cfg: &RunConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut push = |key: String, message: String| out.push(Diagnostic { key, message });
    if !(cfg.sigma > 0.0) {
        push("sigma".into(), format!("surface tension {} must be positive", cfg.sigma));
    }
    let (lo, hi) = cfg.theta_range;
    let range_ok = lo > 0.0 && hi > lo;
    if !range_ok {
        push("theta_range".into(), format!("[{lo}, {hi}] must satisfy 0 < min < max"));
    }
    let mut phases_ok = range_ok;
    for which in [1, 2] {
        let name = format!("phase{which}");
        let p = if which == 1 { &cfg.phase1 } else { &cfg.phase2 };
        let model = PhaseModel {
            free_energy: FreeEnergy::new(p.a, p.b, p.c).with_tail(p.poly.clone()),
            mu: Poly(p.mu.clone()),
            d: Poly(p.d.clone()),
            theta_range: cfg.theta_range,
        };
        if !range_ok {
            continue;
        }
        for v in model.violations() {
            phases_ok = false;
            let key = match v.quantity {
                "kappa" if p.poly.len() > 2 => format!("{name}.c, {name}.poly"),
                "kappa" => format!("{name}.c"),
                "mu" => format!("{name}.mu"),
                "d" => format!("{name}.d"),
                _ => "theta_range".into(),
            };
            let message = if v.quantity == "kappa" {
                format!("heat capacity must be positive: {}", v.message)
            } else {
                v.message
            };
            push(key, message);
        }
    }
    let geom = cfg.geometry();
    match cfg.anchor {
        Anchor::Radius(_) => {
            for v in geom.violations() {
                push("R_star, R_outer, m".into(), v);
            }
        }
        Anchor::Temperature(th) => {
            let outer = Geometry::concentric(cfg.n, 0.5 * cfg.r_outer, cfg.r_outer);
            if !(cfg.r_outer > 0.0) {
                for v in outer.violations() {
                    push("R_outer".into(), v);
                }
            }
            if !(th >= lo && th <= hi) {
                push("theta_star".into(), format!("{th} outside theta_range [{lo}, {hi}]"));
            } else if phases_ok && cfg.sigma > 0.0 && cfg.r_outer > 0.0 {
                let pair = MaterialPair {
                    phase1: cfg.phase_model(1).expect("validated"),
                    phase2: cfg.phase_model(2).expect("validated"),
                    sigma: cfg.sigma,
                };
                let jump = pair.psi_jump(th);
                if !(jump > 0.0) {
                    push(
                        "theta_star".into(),
                        format!("free-energy jump {jump} at theta_star is not positive; no equilibrium"),
                    );
                } else {
                    let r = cfg.sigma * (cfg.n - 1) as f64 / jump;
                    for v in geom.with_radius(r).violations() {
                        push("theta_star, R_outer, m".into(), format!("implied R_star = {r}: {v}"));
                    }
                }
            }
        }
    }
    if let Some(g) = cfg.theta_guess {
        if !(g >= lo && g <= hi) {
            push("theta_guess".into(), format!("{g} outside theta_range [{lo}, {hi}]"));
        }
    }
    if let Some(s) = &cfg.sweep {
        if s.parameter == SweepParam::Sigma && !(s.range.0 > 0.0) {
            push("sweep.range".into(), "surface tension values must be positive".into());
        }
        if matches!(s.parameter, SweepParam::RStar | SweepParam::ROuter) && !(s.range.0 > 0.0) {
            push("sweep.range".into(), "radii must be positive".into());
        }
    }
    out
}

/// Validation entry point: every violation, or an empty list.
pub fn validate(path: &Path) -> std::io::Result<Vec<Diagnostic>> {
    Ok(match load(path)? {
        Ok(_) => Vec::new(),
        Err(d) => d,
    })
}

/// Equilibrium, with warnings rendered as text.
pub fn equilibrium_of(cfg: &RunConfig) -> interphase::Result<(EquilibriumState, Vec<String>)> {
    let sol = cfg.solve_equilibrium()?;
    let warnings = sol
        .warnings
        .iter()
        .map(|w| match w {
            interphase::equilibrium::EquilibriumWarning::MultiRoot { chosen, others } => {
                format!("several equilibrium temperatures; chose {chosen}, others {others:?}")
            }
        })
        .collect();
    Ok((sol.state, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
sigma = 0.5
theta_range = [0.05, 20.0]
n = 3
R_outer = 2.0
theta_star = 1.0

[phase1]
c = 1.0

[phase2]
a = 1.0
c = 2.0
"#;

    fn parse_str(s: &str) -> Result<RunConfig, Vec<Diagnostic>> {
        parse(s, Path::new("."))
    }

    #[test]
    fn minimal_config_parses_with_defaults() {
        let c = parse_str(BASE).unwrap();
        assert_eq!(c.order, 48);
        assert_eq!(c.m, 1);
        assert_eq!(c.anchor, Anchor::Temperature(1.0));
        assert_eq!(c.phase1.mu, vec![1.0]);
    }

    #[test]
    fn both_anchors_conflict() {
        let d = parse_str(&format!("R_star = 1.0\n{BASE}")).unwrap_err();
        assert!(d.iter().any(|d| d.key.contains("R_star") && d.message.contains("both")));
    }

    #[test]
    fn all_schema_errors_are_listed() {
        let text = "bogus = 1\n".to_owned() + &BASE.replace("n = 3", "n = 4").replace("sigma = 0.5", "sigma = \"x\"");
        let d = parse_str(&text).unwrap_err();
        let keys: Vec<&str> = d.iter().map(|d| d.key.as_str()).collect();
        assert!(keys.contains(&"n") && keys.contains(&"sigma") && keys.contains(&"bogus"), "{keys:?}");
    }

    #[test]
    fn negative_capacity_names_the_coefficient() {
        let d = parse_str(&BASE.replace("c = 1.0", "c = -1.0")).unwrap_err();
        assert!(d.iter().any(|d| d.key == "phase1.c"), "{d:?}");
    }

    #[test]
    fn radius_beyond_domain_names_geometry_keys() {
        let text = BASE.replace("theta_star = 1.0", "R_star = 3.0");
        let d = parse_str(&text).unwrap_err();
        assert!(d.iter().any(|d| d.key.contains("R_star") && d.key.contains("R_outer")), "{d:?}");
    }

    #[test]
    fn sweep_values_include_both_ends() {
        let s = SweepSpec {
            parameter: SweepParam::Sigma,
            range: (0.1, 0.5),
            count: 5,
        };
        let v = s.values();
        assert_eq!(v.len(), 5);
        assert_eq!((v[0], v[4]), (0.1, 0.5));
    }
}
