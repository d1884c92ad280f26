//! Scenario configuration: a flat, sectioned TOML document.
//!
//! ```toml
//! version = 1
//!
//! [scenario]
//! name = "fig1"
//! kind = "pair-orbitals"          # single | pair-orbitals | pair-cm-rel
//! statistics = ["boson", "fermion", "distinguishable"]
//! mass = 1.0
//! arrival_point = 3.0
//!
//! [time]
//! t_min = 0.0
//! t_max = 8.0
//! steps = 400
//!
//! [orbital_a]
//! x0 = -3.5
//! p0 = 3.0
//! delta_x = 1.0
//!
//! [orbital_b]
//! x0 = 0.0
//! p0 = 3.0
//! delta_x = 1.0
//! ```
//!
//! See `docs/config-schema.md` for every section and key.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use toml::{Table, Value};

use crate::statistics::Statistics;

pub const SCHEMA_VERSION: i64 = 1;

pub const MIN_POINTS: usize = 32;
pub const MAX_POINTS_1D: usize = 1 << 16;
pub const MAX_POINTS_TENSOR: usize = 2048;
pub const MAX_STEPS: usize = 100_000;
pub const MAX_N_MAX: usize = 200;
pub const MAX_ABS_TIME: f64 = 1e6;
pub const MAX_ABS_COORDINATE: f64 = 1e4;
pub const MASS_RANGE: (f64, f64) = (1e-3, 1e6);
pub const DELTA_X_RANGE: (f64, f64) = (1e-3, 1e3);
pub const OMEGA_RANGE: (f64, f64) = (1e-4, 1e4);
pub const MAX_ABS_COHERENT: f64 = 10.0;

fn in_range(x: f64, (lo, hi): (f64, f64)) -> bool {
    (lo..=hi).contains(&x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    Single,
    PairOrbitals,
    PairCmRel,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Single => "single",
            Self::PairOrbitals => "pair-orbitals",
            Self::PairCmRel => "pair-cm-rel",
        }
    }
}

impl FromStr for ScenarioKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "single" => Ok(Self::Single),
            "pair-orbitals" => Ok(Self::PairOrbitals),
            "pair-cm-rel" => Ok(Self::PairCmRel),
            _ => Err(()),
        }
    }
}

/// Minimum-uncertainty Gaussian; the mass comes from the scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketConfig {
    pub x0: f64,
    pub p0: f64,
    pub delta_x: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InternalSelector {
    /// Oscillator eigenstates u_n, one variant per level.
    Levels(Vec<usize>),
    /// Coherent label z; the sign of the combination follows the statistics.
    Coherent { re: f64, im: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct InternalConfig {
    pub omega: f64,
    pub selector: InternalSelector,
    pub n_max: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericsConfig {
    pub n_points: usize,
    pub span_sigmas: f64,
    pub convergence_audit: bool,
    pub convergence_tolerance: f64,
    pub window_tolerance: f64,
    pub peak_prominence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub prefix: String,
    /// Adds the flux diagnostics to the summary. The CSV always has the column.
    pub flux: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub kind: ScenarioKind,
    pub statistics: Vec<Statistics>,
    pub mass: f64,
    pub arrival_point: f64,
    pub time: TimeConfig,
    pub orbital: Option<PacketConfig>,
    pub orbital_a: Option<PacketConfig>,
    pub orbital_b: Option<PacketConfig>,
    pub center_of_mass: Option<PacketConfig>,
    pub internal: Option<InternalConfig>,
    pub numerics: NumericsConfig,
    pub output: OutputConfig,
}

pub(crate) fn default_points(kind: ScenarioKind) -> usize {
    match kind {
        ScenarioKind::PairCmRel => 512,
        _ => crate::grid::DEFAULT_POINTS,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Every problem found in a document, not just the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaError {
    pub violations: Vec<Violation>,
}

impl SchemaError {
    pub fn mentions(&self, field: &str) -> bool {
        self.violations.iter().any(|v| v.field == field)
    }
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} configuration error(s)", self.violations.len())?;
        for v in &self.violations {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for SchemaError {}

/// Collects violations while reading typed values out of the table.
struct Reader<'a> {
    root: &'a Table,
    violations: Vec<Violation>,
}

impl<'a> Reader<'a> {
    fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            field: field.into(),
            message: message.into(),
        });
    }

    fn section(&mut self, name: &str) -> Option<&'a Table> {
        match self.root.get(name) {
            None => None,
            Some(Value::Table(t)) => Some(t),
            Some(_) => {
                self.push(name, "must be a section");
                None
            }
        }
    }

    fn check_keys(&mut self, section: &str, table: &Table, allowed: &[&str]) {
        for key in table.keys() {
            if !allowed.contains(&key.as_str()) {
                let field = if section.is_empty() {
                    key.clone()
                } else {
                    format!("{section}.{key}")
                };
                self.push(field, "unknown key");
            }
        }
    }

    fn float(&mut self, section: &str, table: &Table, key: &str) -> Option<f64> {
        let field = format!("{section}.{key}");
        match table.get(key) {
            None => {
                self.push(field, "missing required field");
                None
            }
            Some(v) => self.as_float(&field, v),
        }
    }

    fn as_float(&mut self, field: &str, v: &Value) -> Option<f64> {
        let x = match v {
            Value::Float(x) => *x,
            Value::Integer(i) => *i as f64,
            _ => {
                self.push(field, "expected a number");
                return None;
            }
        };
        if !x.is_finite() {
            self.push(field, "must be finite");
            return None;
        }
        Some(x)
    }

    fn opt_float(&mut self, section: &str, table: Option<&Table>, key: &str, default: f64) -> f64 {
        match table.and_then(|t| t.get(key)) {
            None => default,
            Some(v) => self.as_float(&format!("{section}.{key}"), v).unwrap_or(default),
        }
    }

    fn as_count(&mut self, field: &str, v: &Value) -> Option<usize> {
        match v {
            Value::Integer(i) if *i >= 0 => Some(*i as usize),
            Value::Integer(_) => {
                self.push(field, "must not be negative");
                None
            }
            _ => {
                self.push(field, "expected an integer");
                None
            }
        }
    }

    fn count(&mut self, section: &str, table: &Table, key: &str) -> Option<usize> {
        match table.get(key) {
            None => {
                self.push(format!("{section}.{key}"), "missing required field");
                None
            }
            Some(v) => self.as_count(&format!("{section}.{key}"), v),
        }
    }

    fn opt_count(&mut self, section: &str, table: Option<&Table>, key: &str, default: usize) -> usize {
        match table.and_then(|t| t.get(key)) {
            None => default,
            Some(v) => self.as_count(&format!("{section}.{key}"), v).unwrap_or(default),
        }
    }

    fn opt_bool(&mut self, section: &str, table: Option<&Table>, key: &str, default: bool) -> bool {
        match table.and_then(|t| t.get(key)) {
            None => default,
            Some(Value::Boolean(b)) => *b,
            Some(_) => {
                self.push(format!("{section}.{key}"), "expected true or false");
                default
            }
        }
    }

    fn opt_string(&mut self, section: &str, table: Option<&Table>, key: &str) -> Option<String> {
        match table.and_then(|t| t.get(key)) {
            None => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => {
                self.push(format!("{section}.{key}"), "expected a string");
                None
            }
        }
    }

    fn packet(&mut self, name: &str, required: bool) -> Option<PacketConfig> {
        let Some(t) = self.section(name) else {
            if required {
                self.push(name, "missing required section");
            }
            return None;
        };
        self.check_keys(name, t, &["x0", "p0", "delta_x"]);
        let x0 = self.float(name, t, "x0");
        let p0 = self.float(name, t, "p0");
        let delta_x = self.float(name, t, "delta_x");
        if let Some(dx) = delta_x {
            if dx <= 0.0 {
                self.push(format!("{name}.delta_x"), "must be positive");
            } else if !in_range(dx, DELTA_X_RANGE) {
                self.push(format!("{name}.delta_x"), format!("must lie in {DELTA_X_RANGE:?}"));
            }
        }
        for (key, v) in [("x0", x0), ("p0", p0)] {
            if v.is_some_and(|v| v.abs() > MAX_ABS_COORDINATE) {
                self.push(
                    format!("{name}.{key}"),
                    format!("magnitude must not exceed {MAX_ABS_COORDINATE:e}"),
                );
            }
        }
        Some(PacketConfig {
            x0: x0?,
            p0: p0?,
            delta_x: delta_x.filter(|&d| in_range(d, DELTA_X_RANGE))?,
        })
    }

    fn forbid(&mut self, name: &str, kind: ScenarioKind) {
        if self.root.contains_key(name) {
            self.push(name, format!("section not used by kind \"{}\"", kind.name()));
        }
    }
}

/// |⟨a|b⟩|² for two minimum-uncertainty Gaussians.
pub fn gaussian_overlap_sqr(a: &PacketConfig, b: &PacketConfig) -> f64 {
    let (sa, sb) = (0.5 / a.delta_x, 0.5 / b.delta_x);
    let sum_p = sa * sa + sb * sb;
    let sum_x = a.delta_x * a.delta_x + b.delta_x * b.delta_x;
    let prefactor = 2.0 * a.delta_x * b.delta_x / sum_x;
    prefactor * (-(a.p0 - b.p0).powi(2) / (2.0 * sum_p)).exp() * (-(a.x0 - b.x0).powi(2) / (2.0 * sum_x)).exp()
}

/// Schema-level parse and validation. Physics-level checks that need the
/// constructed states run in [`crate::scenario::prepare`].
pub(crate) fn parse_schema(text: &str) -> Result<ScenarioConfig, SchemaError> {
    let root: Table = match text.parse() {
        Ok(t) => t,
        Err(e) => {
            return Err(SchemaError {
                violations: vec![Violation {
                    field: "<document>".into(),
                    message: format!("not a valid key-value document: {}", e.message()),
                }],
            })
        }
    };
    let mut r = Reader {
        root: &root,
        violations: Vec::new(),
    };
    r.check_keys(
        "",
        &root,
        &[
            "version",
            "scenario",
            "time",
            "orbital",
            "orbital_a",
            "orbital_b",
            "center_of_mass",
            "internal",
            "numerics",
            "output",
        ],
    );
    match root.get("version") {
        None => r.push("version", "missing required field"),
        Some(Value::Integer(v)) if *v == SCHEMA_VERSION => {}
        Some(v) => r.push(
            "version",
            format!("unsupported schema version {v} (expected {SCHEMA_VERSION})"),
        ),
    }

    // [scenario]
    let scenario = r.section("scenario");
    if scenario.is_none() && !root.contains_key("scenario") {
        r.push("scenario", "missing required section");
    }
    let empty = Table::new();
    let sc = scenario.unwrap_or(&empty);
    r.check_keys("scenario", sc, &["name", "kind", "statistics", "mass", "arrival_point"]);
    let name = r
        .opt_string("scenario", scenario, "name")
        .unwrap_or_else(|| "scenario".into());
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
        r.push("scenario.name", "use letters, digits, '-' and '_' only");
    }
    let kind = match r.opt_string("scenario", scenario, "kind") {
        None => {
            if !sc.contains_key("kind") {
                r.push("scenario.kind", "missing required field");
            }
            None
        }
        Some(k) => match k.parse::<ScenarioKind>() {
            Ok(kind) => Some(kind),
            Err(()) => {
                r.push(
                    "scenario.kind",
                    format!("unknown kind \"{k}\" (single, pair-orbitals, pair-cm-rel)"),
                );
                None
            }
        },
    };
    let mass = r.float("scenario", sc, "mass");
    if let Some(m) = mass {
        if m <= 0.0 {
            r.push("scenario.mass", "must be positive");
        } else if !in_range(m, MASS_RANGE) {
            r.push("scenario.mass", format!("must lie in {MASS_RANGE:?}"));
        }
    }
    let arrival_point = r.float("scenario", sc, "arrival_point");
    if arrival_point.is_some_and(|x| x.abs() > MAX_ABS_COORDINATE) {
        r.push(
            "scenario.arrival_point",
            format!("magnitude must not exceed {MAX_ABS_COORDINATE:e}"),
        );
    }
    let statistics = match sc.get("statistics") {
        None => None,
        Some(Value::Array(items)) => {
            let mut out = Vec::new();
            for (i, item) in items.iter().enumerate() {
                match item.as_str().map(str::parse::<Statistics>) {
                    Some(Ok(s)) if !out.contains(&s) => out.push(s),
                    Some(Ok(s)) => r.push(format!("scenario.statistics[{i}]"), format!("duplicate entry {s}")),
                    _ => r.push(
                        format!("scenario.statistics[{i}]"),
                        "expected \"boson\", \"fermion\" or \"distinguishable\"",
                    ),
                }
            }
            if items.is_empty() {
                r.push("scenario.statistics", "must list at least one statistics");
            }
            Some(out)
        }
        Some(_) => {
            r.push("scenario.statistics", "expected a list of strings");
            None
        }
    };

    // [time]
    let time = match r.section("time") {
        None => {
            if !root.contains_key("time") {
                r.push("time", "missing required section");
            }
            None
        }
        Some(t) => {
            r.check_keys("time", t, &["t_min", "t_max", "steps"]);
            let t_min = r.float("time", t, "t_min");
            let t_max = r.float("time", t, "t_max");
            let steps = r.count("time", t, "steps");
            for (key, v) in [("t_min", t_min), ("t_max", t_max)] {
                if v.is_some_and(|v| v.abs() > MAX_ABS_TIME) {
                    r.push(format!("time.{key}"), format!("|t| must not exceed {MAX_ABS_TIME:e}"));
                }
            }
            if let (Some(a), Some(b)) = (t_min, t_max) {
                if b <= a {
                    r.push("time.t_max", "must exceed time.t_min");
                }
            }
            if let Some(s) = steps {
                if !(1..=MAX_STEPS).contains(&s) {
                    r.push("time.steps", format!("must lie in [1, {MAX_STEPS}]"));
                }
            }
            match (t_min, t_max, steps) {
                (Some(t_min), Some(t_max), Some(steps)) => Some(TimeConfig { t_min, t_max, steps }),
                _ => None,
            }
        }
    };

    // State sections, by kind.
    let mut orbital = None;
    let mut orbital_a = None;
    let mut orbital_b = None;
    let mut center_of_mass = None;
    let mut internal = None;
    if let Some(kind) = kind {
        match kind {
            ScenarioKind::Single => {
                orbital = r.packet("orbital", true);
                for s in ["orbital_a", "orbital_b", "center_of_mass", "internal"] {
                    r.forbid(s, kind);
                }
                if statistics.is_some() {
                    r.push("scenario.statistics", "not used by kind \"single\"");
                }
            }
            ScenarioKind::PairOrbitals => {
                orbital_a = r.packet("orbital_a", true);
                orbital_b = r.packet("orbital_b", true);
                for s in ["orbital", "center_of_mass", "internal"] {
                    r.forbid(s, kind);
                }
                if statistics.is_none() && !sc.contains_key("statistics") {
                    r.push("scenario.statistics", "missing required field");
                }
                if let (Some(a), Some(b), Some(stats)) = (&orbital_a, &orbital_b, &statistics) {
                    if stats.contains(&Statistics::Fermion) && 1.0 - gaussian_overlap_sqr(a, b) <= 1e-8 {
                        r.push(
                            "orbital_b",
                            "fermions cannot occupy the same orbital as orbital_a (Pauli exclusion)",
                        );
                    }
                }
            }
            ScenarioKind::PairCmRel => {
                center_of_mass = r.packet("center_of_mass", true);
                for s in ["orbital", "orbital_a", "orbital_b"] {
                    r.forbid(s, kind);
                }
                internal = parse_internal(&mut r);
                if let (Some(int), Some(stats)) = (&internal, &statistics) {
                    check_internal_statistics(&mut r, int, stats);
                } else if statistics.is_none() && !sc.contains_key("statistics") {
                    if let Some(InternalConfig {
                        selector: InternalSelector::Coherent { .. },
                        ..
                    }) = &internal
                    {
                        r.push("scenario.statistics", "missing required field");
                    }
                }
            }
        }
    }

    // [numerics]
    let numerics_table = r.section("numerics");
    if let Some(t) = numerics_table {
        r.check_keys(
            "numerics",
            t,
            &[
                "n_points",
                "span_sigmas",
                "convergence_audit",
                "convergence_tolerance",
                "window_tolerance",
                "peak_prominence",
            ],
        );
    }
    let n_points = r.opt_count(
        "numerics",
        numerics_table,
        "n_points",
        kind.map_or(crate::grid::DEFAULT_POINTS, default_points),
    );
    let max_points = if kind == Some(ScenarioKind::PairCmRel) {
        MAX_POINTS_TENSOR
    } else {
        MAX_POINTS_1D
    };
    if !(MIN_POINTS..=max_points).contains(&n_points) {
        r.push("numerics.n_points", format!("must lie in [{MIN_POINTS}, {max_points}]"));
    }
    let span_sigmas = r.opt_float(
        "numerics",
        numerics_table,
        "span_sigmas",
        crate::grid::DEFAULT_SPAN_SIGMAS,
    );
    if !(4.0..=40.0).contains(&span_sigmas) {
        r.push("numerics.span_sigmas", "must lie in [4, 40]");
    }
    let convergence_audit = r.opt_bool("numerics", numerics_table, "convergence_audit", false);
    let convergence_tolerance = r.opt_float("numerics", numerics_table, "convergence_tolerance", 1e-4);
    let window_tolerance = r.opt_float("numerics", numerics_table, "window_tolerance", 1e-4);
    let peak_prominence = r.opt_float(
        "numerics",
        numerics_table,
        "peak_prominence",
        crate::analysis::DEFAULT_PROMINENCE,
    );
    for (key, v) in [
        ("convergence_tolerance", convergence_tolerance),
        ("window_tolerance", window_tolerance),
        ("peak_prominence", peak_prominence),
    ] {
        if !(v > 0.0 && v < 1.0) {
            r.push(format!("numerics.{key}"), "must lie in (0, 1)");
        }
    }

    // [output]
    let output_table = r.section("output");
    if let Some(t) = output_table {
        r.check_keys("output", t, &["directory", "prefix", "flux"]);
    }
    let directory = r
        .opt_string("output", output_table, "directory")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    let prefix = r
        .opt_string("output", output_table, "prefix")
        .unwrap_or_else(|| name.clone());
    if prefix.is_empty() || prefix.contains(['/', '\\']) {
        r.push("output.prefix", "must be a plain file-name prefix");
    }
    let flux = r.opt_bool("output", output_table, "flux", false);

    if !r.violations.is_empty() {
        return Err(SchemaError {
            violations: r.violations,
        });
    }
    let kind = kind.expect("checked");
    let statistics = match (kind, statistics) {
        (ScenarioKind::Single, _) => Vec::new(),
        (_, Some(s)) => s,
        (_, None) => vec![Statistics::Boson, Statistics::Fermion],
    };
    Ok(ScenarioConfig {
        name,
        kind,
        statistics,
        mass: mass.expect("checked"),
        arrival_point: arrival_point.expect("checked"),
        time: time.expect("checked"),
        orbital,
        orbital_a,
        orbital_b,
        center_of_mass,
        internal,
        numerics: NumericsConfig {
            n_points,
            span_sigmas,
            convergence_audit,
            convergence_tolerance,
            window_tolerance,
            peak_prominence,
        },
        output: OutputConfig {
            directory,
            prefix,
            flux,
        },
    })
}

fn parse_internal(r: &mut Reader<'_>) -> Option<InternalConfig> {
    let Some(t) = r.section("internal") else {
        r.push("internal", "missing required section");
        return None;
    };
    r.check_keys(
        "internal",
        t,
        &["omega", "levels", "coherent_re", "coherent_im", "n_max"],
    );
    let omega = r.float("internal", t, "omega");
    if let Some(w) = omega {
        if w <= 0.0 {
            r.push("internal.omega", "must be positive");
        } else if !in_range(w, OMEGA_RANGE) {
            r.push("internal.omega", format!("must lie in {OMEGA_RANGE:?}"));
        }
    }
    let n_max = r.opt_count("internal", Some(t), "n_max", crate::states::DEFAULT_N_MAX);
    if !(1..=MAX_N_MAX).contains(&n_max) {
        r.push("internal.n_max", format!("must lie in [1, {MAX_N_MAX}]"));
    }
    let has_levels = t.contains_key("levels");
    let has_coherent = t.contains_key("coherent_re") || t.contains_key("coherent_im");
    let selector = match (has_levels, has_coherent) {
        (true, true) => {
            r.push("internal", "give either levels or coherent_re/coherent_im, not both");
            None
        }
        (false, false) => {
            r.push("internal.levels", "missing: give levels or coherent_re/coherent_im");
            None
        }
        (true, false) => match t.get("levels") {
            Some(Value::Array(items)) if !items.is_empty() => {
                let mut levels = Vec::new();
                for (i, item) in items.iter().enumerate() {
                    let field = format!("internal.levels[{i}]");
                    if let Some(n) = r.as_count(&field, item) {
                        if n > n_max {
                            r.push(field, format!("level {n} exceeds internal.n_max = {n_max}"));
                        } else if levels.contains(&n) {
                            r.push(field, format!("duplicate level {n}"));
                        } else {
                            levels.push(n);
                        }
                    }
                }
                Some(InternalSelector::Levels(levels))
            }
            _ => {
                r.push("internal.levels", "expected a non-empty list of integers");
                None
            }
        },
        (false, true) => {
            let re = r.float("internal", t, "coherent_re");
            let im = r.float("internal", t, "coherent_im");
            match (re, im) {
                (Some(re), Some(im)) if re.hypot(im) <= MAX_ABS_COHERENT => Some(InternalSelector::Coherent { re, im }),
                (Some(_), Some(_)) => {
                    r.push("internal", format!("|z| must not exceed {MAX_ABS_COHERENT}"));
                    None
                }
                _ => None,
            }
        }
    };
    Some(InternalConfig {
        omega: omega.filter(|&w| in_range(w, OMEGA_RANGE))?,
        selector: selector?,
        n_max,
    })
}

fn check_internal_statistics(r: &mut Reader<'_>, internal: &InternalConfig, stats: &[Statistics]) {
    match &internal.selector {
        InternalSelector::Levels(levels) => {
            for (i, &n) in levels.iter().enumerate() {
                if !stats.iter().any(|s| level_allowed(n, *s)) {
                    r.push(
                        format!("internal.levels[{i}]"),
                        format!(
                            "level {n} has {} parity, which none of the listed statistics admit",
                            if n % 2 == 0 { "even" } else { "odd" }
                        ),
                    );
                }
            }
        }
        InternalSelector::Coherent { re, im } => {
            let label = crate::states::CoherentLabel::new(*re, *im);
            match crate::states::coherent_coefficients(label, internal.n_max) {
                Err(e) => r.push("internal.n_max", e.to_string()),
                Ok(_) if re.abs() > 1e-12 && stats.iter().any(|s| s.exchange_sign().is_some()) => r.push(
                    "internal.coherent_re",
                    "must be 0 for boson/fermion: |z> and |conj z> are parity images only for imaginary z",
                ),
                Ok(_) if stats.contains(&Statistics::Fermion) && im.abs() < 1e-6 => r.push(
                    "internal.coherent_im",
                    "the antisymmetric combination of |z> and |conj z> vanishes for real z",
                ),
                Ok(_) => {}
            }
        }
    }
}

/// Bosons need an even relative state, fermions an odd one.
pub(crate) fn level_allowed(n: usize, statistics: Statistics) -> bool {
    match statistics {
        Statistics::Boson => n.is_multiple_of(2),
        Statistics::Fermion => n % 2 == 1,
        Statistics::Distinguishable => true,
    }
}

fn fmt_f64(x: f64) -> String {
    let s = format!("{x:?}");
    if s.contains(['.', 'e', 'i', 'N']) {
        s
    } else {
        format!("{s}.0")
    }
}

fn write_packet(out: &mut String, name: &str, p: &PacketConfig) {
    out.push_str(&format!(
        "\n[{name}]\nx0 = {}\np0 = {}\ndelta_x = {}\n",
        fmt_f64(p.x0),
        fmt_f64(p.p0),
        fmt_f64(p.delta_x)
    ));
}

impl ScenarioConfig {
    /// Serializes back to the documented schema; parsing the result yields
    /// an equal config.
    pub fn to_toml(&self) -> String {
        let mut out = format!("version = {SCHEMA_VERSION}\n\n[scenario]\n");
        out.push_str(&format!("name = \"{}\"\n", self.name));
        out.push_str(&format!("kind = \"{}\"\n", self.kind.name()));
        if self.kind != ScenarioKind::Single {
            let names: Vec<String> = self.statistics.iter().map(|s| format!("\"{s}\"")).collect();
            out.push_str(&format!("statistics = [{}]\n", names.join(", ")));
        }
        out.push_str(&format!("mass = {}\n", fmt_f64(self.mass)));
        out.push_str(&format!("arrival_point = {}\n", fmt_f64(self.arrival_point)));
        out.push_str(&format!(
            "\n[time]\nt_min = {}\nt_max = {}\nsteps = {}\n",
            fmt_f64(self.time.t_min),
            fmt_f64(self.time.t_max),
            self.time.steps
        ));
        if let Some(p) = &self.orbital {
            write_packet(&mut out, "orbital", p);
        }
        if let Some(p) = &self.orbital_a {
            write_packet(&mut out, "orbital_a", p);
        }
        if let Some(p) = &self.orbital_b {
            write_packet(&mut out, "orbital_b", p);
        }
        if let Some(p) = &self.center_of_mass {
            write_packet(&mut out, "center_of_mass", p);
        }
        if let Some(int) = &self.internal {
            out.push_str(&format!("\n[internal]\nomega = {}\n", fmt_f64(int.omega)));
            match &int.selector {
                InternalSelector::Levels(levels) => {
                    let l: Vec<String> = levels.iter().map(usize::to_string).collect();
                    out.push_str(&format!("levels = [{}]\n", l.join(", ")));
                }
                InternalSelector::Coherent { re, im } => {
                    out.push_str(&format!(
                        "coherent_re = {}\ncoherent_im = {}\n",
                        fmt_f64(*re),
                        fmt_f64(*im)
                    ));
                }
            }
            out.push_str(&format!("n_max = {}\n", int.n_max));
        }
        let n = &self.numerics;
        out.push_str(&format!(
            "\n[numerics]\nn_points = {}\nspan_sigmas = {}\nconvergence_audit = {}\nconvergence_tolerance = {}\nwindow_tolerance = {}\npeak_prominence = {}\n",
            n.n_points,
            fmt_f64(n.span_sigmas),
            n.convergence_audit,
            fmt_f64(n.convergence_tolerance),
            fmt_f64(n.window_tolerance),
            fmt_f64(n.peak_prominence)
        ));
        let dir = self
            .output
            .directory
            .to_string_lossy()
            .replace('\\', "\\\\")
            .replace('"', "\\\"");
        out.push_str(&format!(
            "\n[output]\ndirectory = \"{dir}\"\nprefix = \"{}\"\nflux = {}\n",
            self.output.prefix, self.output.flux
        ));
        out
    }

    /// Variant labels in run order.
    pub fn variant_labels(&self) -> Vec<String> {
        match self.kind {
            ScenarioKind::Single => vec!["single".into()],
            ScenarioKind::PairOrbitals => self.statistics.iter().map(|s| s.name().to_string()).collect(),
            ScenarioKind::PairCmRel => {
                let int = self.internal.as_ref().expect("validated");
                match &int.selector {
                    InternalSelector::Levels(levels) => levels
                        .iter()
                        .flat_map(|&n| {
                            self.statistics
                                .iter()
                                .filter(move |s| level_allowed(n, **s))
                                .map(move |s| format!("n{n}-{s}"))
                        })
                        .collect(),
                    InternalSelector::Coherent { .. } => {
                        self.statistics.iter().map(|s| format!("coherent-{s}")).collect()
                    }
                }
            }
        }
    }
}
