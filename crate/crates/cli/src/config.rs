//! Experiment configuration: a TOML subset with top-level scalars and the
//! sections `[family]`, `[grid]` and `[quench]`. Every problem in a document
//! is reported, not just the first.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use mpslab_core::mps::DEFAULT_DENSE_THRESHOLD;
use mpslab_core::quench::{Boundary, Coupling, TruncationPolicy, DEFAULT_HARD_CAP};
use mpslab_core::RenyiOrder;
use serde_json::{json, Value};
use toml::{Table, Value as Toml};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Experiment {
    EpsBounds,
    Audenaert,
    Majorization,
    Multiplicativity,
    ProductStructure,
    Table1Scan,
    SmoothRenyiCheck,
    QuenchExact,
    QuenchTebd,
    QuenchHardness,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Experiment::EpsBounds,
        Experiment::Audenaert,
        Experiment::Majorization,
        Experiment::Multiplicativity,
        Experiment::ProductStructure,
        Experiment::Table1Scan,
        Experiment::SmoothRenyiCheck,
        Experiment::QuenchExact,
        Experiment::QuenchTebd,
        Experiment::QuenchHardness,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Experiment::EpsBounds => "eps_bounds",
            Experiment::Audenaert => "audenaert",
            Experiment::Majorization => "majorization",
            Experiment::Multiplicativity => "multiplicativity",
            Experiment::ProductStructure => "product_structure",
            Experiment::Table1Scan => "table1_scan",
            Experiment::SmoothRenyiCheck => "smooth_renyi_check",
            Experiment::QuenchExact => "quench_exact",
            Experiment::QuenchTebd => "quench_tebd",
            Experiment::QuenchHardness => "quench_hardness",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Experiment::EpsBounds => "truncation-error lower bound (random D-MPS) and compression upper bound",
            Experiment::Audenaert => "entropy continuity bound on random density-matrix pairs",
            Experiment::Majorization => "largest Renyi entropy at fixed tail weight, sampled",
            Experiment::Multiplicativity => "distance growth of K-fold tensor powers",
            Experiment::ProductStructure => "factorized candidates never lose fidelity with a product target",
            Experiment::Table1Scan => "block entropy and required bond dimension over a state family",
            Experiment::SmoothRenyiCheck => "smooth Renyi entropy against brute force, and magic-state scaling",
            Experiment::QuenchExact => "exact Ising quench on a small chain",
            Experiment::QuenchTebd => "TEBD quench checked against the exact evolution",
            Experiment::QuenchHardness => "entropy slope and bond doubling times of a long TEBD quench",
        }
    }

    /// Experiments that draw random samples and therefore need a seed.
    pub fn is_stochastic(self) -> bool {
        matches!(
            self,
            Experiment::EpsBounds | Experiment::Audenaert | Experiment::Majorization | Experiment::ProductStructure
        )
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.key() == s)
            .ok_or_else(|| format!("unknown experiment '{s}'"))
    }
}

/// How the magic-state weight depends on `N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PRule {
    Fixed(f64),
    InverseN,
    InverseNSquared,
}

impl PRule {
    pub fn at(self, n: usize) -> f64 {
        match self {
            PRule::Fixed(p) => p,
            PRule::InverseN => 1.0 / n as f64,
            PRule::InverseNSquared => 1.0 / (n * n) as f64,
        }
    }

    fn label(self) -> String {
        match self {
            PRule::Fixed(p) => format!("{p}"),
            PRule::InverseN => "1/N".into(),
            PRule::InverseNSquared => "1/N^2".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyConfig {
    pub name: String,
    pub n: Vec<usize>,
    pub p: PRule,
    /// Pair counts for the ring family; empty means `floor(N^kappa)`.
    pub nu: Vec<usize>,
    pub kappa: f64,
    pub copies: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridConfig {
    pub bonds: Vec<usize>,
    pub blocks: Option<Vec<usize>>,
    pub alphas: Vec<RenyiOrder>,
    pub deltas: Vec<f64>,
    pub trials: usize,
    pub samples: usize,
    pub dims: Vec<usize>,
    pub eps: Vec<f64>,
    pub t: Vec<f64>,
    pub copies: Vec<usize>,
    pub smooth_eps_scale: Option<f64>,
    pub grid_step: f64,
    pub max_dim: usize,
    /// Block lengths back from `N` used for the growth slope.
    pub slope_window: usize,
    pub min_growth: f64,
    pub smooth_cap: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuenchConfig {
    pub n: usize,
    pub g: f64,
    pub boundary: Boundary,
    pub coupling: Coupling,
    pub dt: f64,
    pub t_max: f64,
    pub policy: TruncationPolicy,
    pub hard_cap: usize,
    pub window: (f64, f64),
    pub stop_at_bond: Option<usize>,
    pub entropy_tol: f64,
    pub min_slope: f64,
    pub target_bond: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub dense_threshold: usize,
    pub threads: Option<usize>,
    pub family: FamilyConfig,
    pub grid: GridConfig,
    pub quench: QuenchConfig,
}

/// One problem with a configuration document, tied to the offending key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigIssue {
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<ConfigIssue>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

/// Pulls typed values out of a table, recording every problem and
/// remembering which keys were consumed.
struct Reader {
    issues: Vec<ConfigIssue>,
}

impl Reader {
    fn issue(&mut self, key: impl Into<String>, message: impl Into<String>) {
        self.issues.push(ConfigIssue {
            key: key.into(),
            message: message.into(),
        });
    }

    fn take(&mut self, t: &mut Table, section: &str, key: &str) -> Option<(String, Toml)> {
        let name = if section.is_empty() {
            key.to_string()
        } else {
            format!("{section}.{key}")
        };
        t.remove(key).map(|v| (name, v))
    }

    fn string(&mut self, t: &mut Table, section: &str, key: &str) -> Option<String> {
        let (name, v) = self.take(t, section, key)?;
        match v {
            Toml::String(s) => Some(s),
            other => {
                self.issue(name, format!("expected a string, got {}", other.type_str()));
                None
            }
        }
    }

    fn count(&mut self, t: &mut Table, section: &str, key: &str) -> Option<usize> {
        let (name, v) = self.take(t, section, key)?;
        self.as_count(&name, &v)
    }

    fn as_count(&mut self, name: &str, v: &Toml) -> Option<usize> {
        match v {
            Toml::Integer(i) if *i >= 0 => Some(*i as usize),
            Toml::Integer(i) => {
                self.issue(name, format!("expected a nonnegative integer, got {i}"));
                None
            }
            other => {
                self.issue(name, format!("expected an integer, got {}", other.type_str()));
                None
            }
        }
    }

    fn real(&mut self, t: &mut Table, section: &str, key: &str) -> Option<f64> {
        let (name, v) = self.take(t, section, key)?;
        self.as_real(&name, &v)
    }

    fn as_real(&mut self, name: &str, v: &Toml) -> Option<f64> {
        match v {
            Toml::Float(x) => Some(*x),
            Toml::Integer(i) => Some(*i as f64),
            other => {
                self.issue(name, format!("expected a number, got {}", other.type_str()));
                None
            }
        }
    }

    fn list<T>(
        &mut self,
        t: &mut Table,
        section: &str,
        key: &str,
        item: impl Fn(&mut Self, &str, &Toml) -> Option<T>,
    ) -> Option<Vec<T>> {
        let (name, v) = self.take(t, section, key)?;
        let items = match v {
            Toml::Array(a) => a,
            single => vec![single],
        };
        let before = self.issues.len();
        let out: Vec<T> = items
            .iter()
            .enumerate()
            .filter_map(|(i, x)| item(self, &format!("{name}[{i}]"), x))
            .collect();
        if self.issues.len() > before {
            return None;
        }
        if out.is_empty() {
            self.issue(name, "grid must not be empty");
            return None;
        }
        Some(out)
    }

    fn counts(&mut self, t: &mut Table, section: &str, key: &str) -> Option<Vec<usize>> {
        self.list(t, section, key, |r, n, v| r.as_count(n, v))
    }

    fn reals(&mut self, t: &mut Table, section: &str, key: &str) -> Option<Vec<f64>> {
        self.list(t, section, key, |r, n, v| r.as_real(n, v))
    }

    fn orders(&mut self, t: &mut Table, section: &str, key: &str) -> Option<Vec<RenyiOrder>> {
        self.list(t, section, key, |r, n, v| {
            let parsed = match v {
                Toml::String(s) => s.parse::<RenyiOrder>().map_err(|e| e.to_string()),
                Toml::Float(x) => RenyiOrder::new(*x).map_err(|e| e.to_string()),
                Toml::Integer(i) => RenyiOrder::new(*i as f64).map_err(|e| e.to_string()),
                other => Err(format!("expected a Renyi order, got {}", other.type_str())),
            };
            parsed.map_err(|e| r.issue(n, e)).ok()
        })
    }

    fn section(&mut self, root: &mut Table, name: &str) -> Table {
        match root.remove(name) {
            None => Table::new(),
            Some(Toml::Table(t)) => t,
            Some(other) => {
                self.issue(name, format!("expected a section, got {}", other.type_str()));
                Table::new()
            }
        }
    }

    fn leftovers(&mut self, t: &Table, section: &str) {
        for (k, v) in t {
            let name = if section.is_empty() {
                k.clone()
            } else {
                format!("{section}.{k}")
            };
            if v.is_table() && section.is_empty() {
                self.issue(name, "unknown section");
            } else {
                self.issue(name, "unknown key");
            }
        }
    }
}

fn parse_p(r: &mut Reader, t: &mut Table) -> Option<PRule> {
    let (name, v) = r.take(t, "family", "p")?;
    match v {
        Toml::Float(x) => Some(PRule::Fixed(x)),
        Toml::Integer(i) => Some(PRule::Fixed(i as f64)),
        Toml::String(s) => match s.replace(' ', "").as_str() {
            "1/N" => Some(PRule::InverseN),
            "1/N^2" | "1/N2" | "1/N**2" => Some(PRule::InverseNSquared),
            other => match other.parse::<f64>() {
                Ok(x) => Some(PRule::Fixed(x)),
                Err(_) => {
                    r.issue(name, format!("expected a number, \"1/N\" or \"1/N^2\", got {s:?}"));
                    None
                }
            },
        },
        other => {
            r.issue(name, format!("expected a number or string, got {}", other.type_str()));
            None
        }
    }
}

fn parse_boundary(r: &mut Reader, t: &mut Table, default: Boundary) -> Boundary {
    match r.string(t, "quench", "boundary") {
        None => default,
        Some(s) => s.parse().unwrap_or_else(|e: mpslab_core::Error| {
            r.issue("quench.boundary", e.to_string());
            default
        }),
    }
}

fn parse_coupling(r: &mut Reader, t: &mut Table) -> Coupling {
    match r.string(t, "quench", "coupling") {
        None => Coupling::XX,
        Some(s) => s.parse().unwrap_or_else(|e: mpslab_core::Error| {
            r.issue("quench.coupling", e.to_string());
            Coupling::XX
        }),
    }
}

fn default_family(e: Experiment) -> (&'static str, Vec<usize>, PRule) {
    match e {
        Experiment::EpsBounds => ("ghz", vec![8], PRule::InverseN),
        Experiment::SmoothRenyiCheck => ("magic", vec![18, 20, 22], PRule::InverseNSquared),
        _ => ("magic", (2..=10).collect(), PRule::InverseN),
    }
}

fn orders(values: &[f64]) -> Vec<RenyiOrder> {
    values.iter().map(|&a| RenyiOrder::new(a).expect("valid default order")).collect()
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigErrors> {
    parse_config_with(text, &Overrides::default())
}

/// Values that replace the document's own before validation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

pub fn parse_config_with(text: &str, overrides: &Overrides) -> Result<ExperimentConfig, ConfigErrors> {
    let mut root: Table = match text.parse::<Table>() {
        Ok(t) => t,
        Err(e) => {
            return Err(ConfigErrors(vec![ConfigIssue {
                key: "<document>".into(),
                message: e.message().trim().to_string(),
            }]))
        }
    };
    if let Some(s) = overrides.seed {
        root.insert("seed".into(), Toml::Integer(s as i64));
    }
    if let Some(t) = overrides.threads {
        root.insert("threads".into(), Toml::Integer(t as i64));
    }
    let mut r = Reader { issues: Vec::new() };

    let experiment = match r.string(&mut root, "", "experiment") {
        None => {
            if !r.issues.iter().any(|i| i.key == "experiment") {
                r.issue("experiment", "missing; one of the registered keys is required");
            }
            None
        }
        Some(s) => match s.parse::<Experiment>() {
            Ok(e) => Some(e),
            Err(msg) => {
                r.issue("experiment", msg);
                None
            }
        },
    };
    let seed = match r.take(&mut root, "", "seed") {
        None => None,
        Some((_, Toml::Integer(i))) if i >= 0 => Some(i as u64),
        Some((name, _)) => {
            r.issue(name, "expected a nonnegative integer");
            None
        }
    };
    let output_dir = r.string(&mut root, "", "output_dir").map(PathBuf::from);
    let dense_threshold = r.count(&mut root, "", "dense_threshold").unwrap_or(DEFAULT_DENSE_THRESHOLD);
    let threads = r.count(&mut root, "", "threads");

    let mut fam = r.section(&mut root, "family");
    let mut grid = r.section(&mut root, "grid");
    let mut qt = r.section(&mut root, "quench");
    r.leftovers(&root, "");

    let e = experiment.unwrap_or(Experiment::Audenaert);
    let (fname, fn_default, fp_default) = default_family(e);
    let family = FamilyConfig {
        name: r.string(&mut fam, "family", "name").unwrap_or_else(|| fname.to_string()),
        n: r.counts(&mut fam, "family", "n").unwrap_or(fn_default),
        p: parse_p(&mut r, &mut fam).unwrap_or(fp_default),
        nu: r.counts(&mut fam, "family", "nu").unwrap_or_default(),
        kappa: r.real(&mut fam, "family", "kappa").unwrap_or(0.5),
        copies: r.counts(&mut fam, "family", "copies").unwrap_or(vec![2]),
    };
    r.leftovers(&fam, "family");

    let (d_bonds, d_eps, d_blocks, d_alphas): (Vec<usize>, Vec<f64>, Option<Vec<usize>>, Vec<RenyiOrder>) = match e {
        Experiment::Majorization => (
            vec![2, 4],
            vec![0.01, 0.1, 0.3],
            Some(vec![3, 4, 5]),
            orders(&[1.5, 2.0, 3.0]),
        ),
        Experiment::SmoothRenyiCheck => (vec![], vec![0.05, 0.2], None, orders(&[0.0, 0.5, 2.0])),
        Experiment::ProductStructure => (vec![1, 2, 3, 4], vec![], None, vec![]),
        _ => (
            vec![1, 2, 4, 8],
            vec![],
            None,
            orders(&[0.0, 0.5, 1.0, 2.0]),
        ),
    };
    let grid_cfg = GridConfig {
        bonds: r.counts(&mut grid, "grid", "bonds").unwrap_or(d_bonds),
        blocks: r.counts(&mut grid, "grid", "blocks").or(d_blocks),
        alphas: r.orders(&mut grid, "grid", "alphas").unwrap_or(d_alphas),
        deltas: r
            .reals(&mut grid, "grid", "deltas")
            .unwrap_or(vec![0.05, 0.1, 0.3, 0.58]),
        trials: r.count(&mut grid, "grid", "trials").unwrap_or(1000),
        samples: r.count(&mut grid, "grid", "samples").unwrap_or(10_000),
        dims: r.counts(&mut grid, "grid", "dims").unwrap_or(vec![2, 4, 8, 16]),
        eps: r.reals(&mut grid, "grid", "eps").unwrap_or(d_eps),
        t: r
            .reals(&mut grid, "grid", "t")
            .unwrap_or(vec![0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9, 1.0]),
        copies: r.counts(&mut grid, "grid", "copies").unwrap_or(vec![1, 2, 3, 4, 5, 8]),
        smooth_eps_scale: r.real(&mut grid, "grid", "smooth_eps_scale").or(match e {
            Experiment::SmoothRenyiCheck => Some(5.0),
            _ => None,
        }),
        grid_step: r.real(&mut grid, "grid", "grid_step").unwrap_or(0.01),
        max_dim: r.count(&mut grid, "grid", "max_dim").unwrap_or(4),
        slope_window: r.count(&mut grid, "grid", "slope_window").unwrap_or(4),
        min_growth: r.real(&mut grid, "grid", "min_growth").unwrap_or(0.9),
        smooth_cap: r.real(&mut grid, "grid", "smooth_cap").unwrap_or(1.0),
        tolerance: r.real(&mut grid, "grid", "tolerance").unwrap_or(1e-3),
    };
    r.leftovers(&grid, "grid");

    let (qn, qb, qt_max, qeps, window, stop) = match e {
        Experiment::QuenchExact => (12, Boundary::Periodic, 2.0, 1e-8, (0.5, 2.0), None),
        Experiment::QuenchHardness => (32, Boundary::Open, 8.0, 1e-6, (0.5, 2.5), Some(128)),
        _ => (12, Boundary::Open, 2.0, 1e-8, (0.5, 2.0), None),
    };
    let policy_name = r.string(&mut qt, "quench", "policy");
    let q_eps = r.real(&mut qt, "quench", "eps").unwrap_or(qeps);
    let q_max_bond = r.count(&mut qt, "quench", "max_bond");
    let policy = match policy_name.as_deref() {
        None | Some("epsilon") | Some("eps") => match (policy_name.is_none(), q_max_bond) {
            (true, Some(d)) => TruncationPolicy::MaxBond(d),
            _ => TruncationPolicy::Epsilon(q_eps),
        },
        Some("max_bond") => match q_max_bond {
            Some(d) => TruncationPolicy::MaxBond(d),
            None => {
                r.issue("quench.max_bond", "required when policy = \"max_bond\"");
                TruncationPolicy::MaxBond(1)
            }
        },
        Some(other) => {
            r.issue("quench.policy", format!("expected \"epsilon\" or \"max_bond\", got {other:?}"));
            TruncationPolicy::Epsilon(q_eps)
        }
    };
    let window = match r.reals(&mut qt, "quench", "window") {
        None => window,
        Some(w) if w.len() == 2 => (w[0], w[1]),
        Some(_) => {
            r.issue("quench.window", "expected [start, end]");
            window
        }
    };
    let quench = QuenchConfig {
        n: r.count(&mut qt, "quench", "n").unwrap_or(qn),
        g: r.real(&mut qt, "quench", "g").unwrap_or(1.0),
        boundary: parse_boundary(&mut r, &mut qt, qb),
        coupling: parse_coupling(&mut r, &mut qt),
        dt: r.real(&mut qt, "quench", "dt").unwrap_or(0.01),
        t_max: r.real(&mut qt, "quench", "t_max").unwrap_or(qt_max),
        policy,
        hard_cap: r.count(&mut qt, "quench", "hard_cap").unwrap_or(DEFAULT_HARD_CAP),
        window,
        stop_at_bond: r.count(&mut qt, "quench", "stop_at_bond").or(stop),
        entropy_tol: r.real(&mut qt, "quench", "entropy_tol").unwrap_or(1e-3),
        min_slope: r.real(&mut qt, "quench", "min_slope").unwrap_or(0.2),
        target_bond: r.count(&mut qt, "quench", "target_bond").unwrap_or(128),
    };
    r.leftovers(&qt, "quench");

    let Some(experiment) = experiment else {
        return Err(ConfigErrors(r.issues));
    };
    let cfg = ExperimentConfig {
        experiment,
        seed,
        output_dir,
        dense_threshold,
        threads,
        family,
        grid: grid_cfg,
        quench,
    };
    validate(&cfg, &mut r);
    if r.issues.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigErrors(r.issues))
    }
}

fn validate(c: &ExperimentConfig, r: &mut Reader) {
    let e = c.experiment;
    if e.is_stochastic() && c.seed.is_none() {
        r.issue("seed", format!("required for the stochastic experiment {e}"));
    }
    if c.threads == Some(0) {
        r.issue("threads", "must be at least 1");
    }
    if c.dense_threshold == 0 {
        r.issue("dense_threshold", "must be at least 1");
    }
    if c.family.n.contains(&0) {
        r.issue("family.n", "N ≥ 1");
    }
    if c.family.copies.contains(&0) {
        r.issue("family.copies", "K ≥ 1");
    }
    if let PRule::Fixed(p) = c.family.p {
        if !(0.0..=1.0).contains(&p) {
            r.issue("family.p", format!("p must lie in [0, 1], got {p}"));
        }
    }
    let known = ["magic", "chi", "pair_ring", "tagged_ti", "ghz", "all_up"];
    if !known.contains(&c.family.name.as_str()) {
        r.issue("family.name", format!("unknown family '{}'; expected one of {}", c.family.name, known.join(", ")));
    }
    let g = &c.grid;
    if g.bonds.contains(&0) {
        r.issue("grid.bonds", "D ≥ 1");
    }
    if g.blocks.as_ref().is_some_and(|b| b.contains(&0)) {
        r.issue("grid.blocks", "L ≥ 1");
    }
    if g.deltas.iter().any(|d| !(0.0..=1.0).contains(d)) {
        r.issue("grid.deltas", "each delta must lie in [0, 1]");
    }
    if g.eps.iter().any(|x| !(0.0..1.0).contains(x)) {
        r.issue("grid.eps", "each eps must lie in [0, 1)");
    }
    if g.t.iter().any(|x| !(0.0..=1.0).contains(x)) {
        r.issue("grid.t", "each T must lie in [0, 1]");
    }
    if g.dims.iter().any(|&d| d < 1) {
        r.issue("grid.dims", "dimension ≥ 1");
    }
    if g.copies.contains(&0) {
        r.issue("grid.copies", "K ≥ 1");
    }
    if !(g.grid_step > 0.0 && g.grid_step <= 0.5) {
        r.issue("grid.grid_step", "must lie in (0, 0.5]");
    }
    if g.max_dim == 0 || g.max_dim > 6 {
        r.issue("grid.max_dim", "must lie in 1..=6");
    }
    match e {
        Experiment::EpsBounds | Experiment::ProductStructure if g.bonds.is_empty() => {
            r.issue("grid.bonds", "grid must not be empty")
        }
        Experiment::Majorization if g.eps.is_empty() => r.issue("grid.eps", "grid must not be empty"),
        _ => {}
    }
    if matches!(e, Experiment::EpsBounds | Experiment::Audenaert | Experiment::ProductStructure) && g.trials == 0 {
        r.issue("grid.trials", "trials ≥ 1");
    }
    if e == Experiment::Majorization && g.samples == 0 {
        r.issue("grid.samples", "samples ≥ 1");
    }
    let q = &c.quench;
    if q.n < 2 {
        r.issue("quench.n", "N ≥ 2");
    }
    if !(q.g >= 0.0 && q.g.is_finite()) {
        r.issue("quench.g", "g ≥ 0");
    }
    if !(q.dt > 0.0 && q.dt.is_finite()) {
        r.issue("quench.dt", "dt > 0");
    }
    if !(q.t_max >= 0.0 && q.t_max.is_finite()) {
        r.issue("quench.t_max", "t_max ≥ 0");
    }
    match q.policy {
        TruncationPolicy::Epsilon(x) if !(0.0..1.0).contains(&x) => r.issue("quench.eps", "must lie in [0, 1)"),
        TruncationPolicy::MaxBond(0) => r.issue("quench.max_bond", "D ≥ 1"),
        _ => {}
    }
    if q.hard_cap == 0 {
        r.issue("quench.hard_cap", "must be at least 1");
    }
    if !(q.window.0 < q.window.1) {
        r.issue("quench.window", "start must be below end");
    } else if matches!(e, Experiment::QuenchExact | Experiment::QuenchHardness)
        && (q.window.0 < 0.0 || q.window.1 > q.t_max)
    {
        r.issue("quench.window", format!("must lie within [0, t_max = {}]", q.t_max));
    }
    if e == Experiment::QuenchTebd && q.boundary == Boundary::Periodic {
        r.issue("quench.boundary", "TEBD runs on open chains");
    }
}

impl ExperimentConfig {
    /// Number of time steps covering `[0, t_max]`.
    pub fn quench_steps(&self) -> usize {
        (self.quench.t_max / self.quench.dt).round() as usize
    }

    /// Normalized echo of the configuration for the run manifest.
    pub fn to_json(&self) -> Value {
        let orders: Vec<String> = self.grid.alphas.iter().map(|a| a.to_string()).collect();
        let policy = match self.quench.policy {
            TruncationPolicy::MaxBond(d) => json!({"max_bond": d}),
            TruncationPolicy::Epsilon(x) => json!({"epsilon": x}),
        };
        json!({
            "experiment": self.experiment.key(),
            "seed": self.seed,
            "dense_threshold": self.dense_threshold,
            "family": {
                "name": self.family.name,
                "n": self.family.n,
                "p": self.family.p.label(),
                "nu": self.family.nu,
                "kappa": self.family.kappa,
                "copies": self.family.copies,
            },
            "grid": {
                "bonds": self.grid.bonds,
                "blocks": self.grid.blocks,
                "alphas": orders,
                "deltas": self.grid.deltas,
                "trials": self.grid.trials,
                "samples": self.grid.samples,
                "dims": self.grid.dims,
                "eps": self.grid.eps,
                "t": self.grid.t,
                "copies": self.grid.copies,
                "smooth_eps_scale": self.grid.smooth_eps_scale,
                "grid_step": self.grid.grid_step,
                "max_dim": self.grid.max_dim,
                "slope_window": self.grid.slope_window,
                "min_growth": self.grid.min_growth,
                "smooth_cap": self.grid.smooth_cap,
                "tolerance": self.grid.tolerance,
            },
            "quench": {
                "n": self.quench.n,
                "g": self.quench.g,
                "boundary": self.quench.boundary.to_string(),
                "coupling": format!("{:?}", self.quench.coupling),
                "dt": self.quench.dt,
                "t_max": self.quench.t_max,
                "policy": policy,
                "hard_cap": self.quench.hard_cap,
                "window": [self.quench.window.0, self.quench.window.1],
                "stop_at_bond": self.quench.stop_at_bond,
                "entropy_tol": self.quench.entropy_tol,
                "min_slope": self.quench.min_slope,
                "target_bond": self.quench.target_bond,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_audenaert_fills_defaults() {
        let c = parse_config("experiment = \"audenaert\"\nseed = 3\n").unwrap();
        assert_eq!(c.experiment, Experiment::Audenaert);
        assert_eq!(c.grid.trials, 1000);
        assert_eq!(c.grid.dims, vec![2, 4, 8, 16]);
        assert_eq!(c.seed, Some(3));
    }

    #[test]
    fn unknown_key_is_named() {
        let e = parse_config("experiment = \"audenaert\"\nseed = 1\ncolour = 3\n[grid]\ntrails = 5\n").unwrap_err();
        let keys: Vec<&str> = e.0.iter().map(|i| i.key.as_str()).collect();
        assert!(keys.contains(&"colour"));
        assert!(keys.contains(&"grid.trails"));
    }

    #[test]
    fn zero_sites_rejected() {
        let e = parse_config("experiment = \"table1_scan\"\n[family]\nname = \"magic\"\nn = [0, 2]\n").unwrap_err();
        assert!(e.0.iter().any(|i| i.key == "family.n" && i.message.contains("N ≥ 1")));
    }

    #[test]
    fn collects_every_error() {
        let text = "experiment = \"eps_bounds\"\n[family]\nn = [0]\n[grid]\nbonds = [0]\ndeltas = [2.0]\n";
        let e = parse_config(text).unwrap_err();
        let keys: Vec<&str> = e.0.iter().map(|i| i.key.as_str()).collect();
        for k in ["seed", "family.n", "grid.bonds", "grid.deltas"] {
            assert!(keys.contains(&k), "{k} missing from {keys:?}");
        }
    }

    #[test]
    fn unknown_experiment() {
        let e = parse_config("experiment = \"teleport\"\n").unwrap_err();
        assert_eq!(e.0[0].key, "experiment");
        assert!(parse_config("seed = 1\n").is_err());
    }

    #[test]
    fn malformed_grid() {
        let e = parse_config("experiment = \"majorization\"\nseed = 1\n[grid]\nbonds = [2, \"x\"]\neps = []\n").unwrap_err();
        let keys: Vec<&str> = e.0.iter().map(|i| i.key.as_str()).collect();
        assert!(keys.contains(&"grid.bonds[1]"));
        assert!(keys.contains(&"grid.eps"));
    }

    #[test]
    fn orders_and_p_rules() {
        let c = parse_config(
            "experiment = \"table1_scan\"\n[family]\nname = \"magic\"\np = \"1/N^2\"\n[grid]\nalphas = [\"1/2\", 2, \"inf\"]\n",
        )
        .unwrap();
        assert_eq!(c.family.p, PRule::InverseNSquared);
        assert_eq!(c.family.p.at(4), 1.0 / 16.0);
        assert_eq!(c.grid.alphas[0], RenyiOrder::HALF);
        assert!(c.grid.alphas[2].is_infinite());
    }

    #[test]
    fn quench_policy() {
        let c = parse_config("experiment = \"quench_tebd\"\n[quench]\npolicy = \"max_bond\"\nmax_bond = 16\n").unwrap();
        assert_eq!(c.quench.policy, TruncationPolicy::MaxBond(16));
        assert_eq!(c.quench_steps(), 200);
        assert!(parse_config("experiment = \"quench_tebd\"\n[quench]\npolicy = \"max_bond\"\n").is_err());
        assert!(parse_config("experiment = \"quench_tebd\"\n[quench]\nboundary = \"periodic\"\n").is_err());
        let h = parse_config("experiment = \"quench_hardness\"\n").unwrap();
        assert_eq!(h.quench.n, 32);
        assert_eq!(h.quench.policy, TruncationPolicy::Epsilon(1e-6));
    }

    #[test]
    fn syntax_error_is_reported() {
        let e = parse_config("experiment = \n").unwrap_err();
        assert_eq!(e.0[0].key, "<document>");
    }
}
