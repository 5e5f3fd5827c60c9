//! Run configuration: JSON parsing with exhaustive validation, defaults, and
//! the canonical form whose hash names a run.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use fkpn_core::dynamics::ClosureKind;
use fkpn_core::lattice::{nesting_level, LatticeDomain, Window};
use fkpn_core::physics::{
    dislocation_profile, BoundaryProfile, DislocationKind, Forcing, Nonlinearity, PeriodicPotential, Scenario,
};

pub const DEFAULT_SAFETY: f64 = 0.9;
pub const DEFAULT_ELLIPTIC_TOL: f64 = 1e-10;
pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-8;
pub const DEFAULT_SLACK: f64 = 0.1;
pub const DEFAULT_ORDERING_SHIFT: f64 = 0.05;
pub const DEFAULT_HEIGHTS: [f64; 4] = [1.0, 2.0, 4.0, 8.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    Extend,
    Converge,
    BetaStudy,
    ExtensionStudy,
    Barriers,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Self::Simulate,
        Self::Extend,
        Self::Converge,
        Self::BetaStudy,
        Self::ExtensionStudy,
        Self::Barriers,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::Extend => "extend",
            Self::Converge => "converge",
            Self::BetaStudy => "beta-study",
            Self::ExtensionStudy => "extension-study",
            Self::Barriers => "barriers",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ForcingConfig {
    /// `F^ε(a) = σ − W'(2a + εσ)` with a cosine potential.
    Effective {
        amplitude: f64,
        sigma: f64,
        eps_dependent: bool,
    },
    Constant {
        value: f64,
    },
    /// `F(a) = −amplitude · sin(wavenumber · a)`.
    Sinusoidal {
        amplitude: f64,
        wavenumber: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProfileConfig {
    Screw {
        width: f64,
    },
    Edge {
        width: f64,
    },
    Constant {
        value: f64,
    },
    Arctan {
        axis: usize,
        width: f64,
        lower: f64,
        upper: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DomainConfig {
    pub lateral_extent: f64,
    pub height_extent: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WindowConfig {
    pub lateral_radius: f64,
    pub height: f64,
    pub t_start: f64,
    /// Open-ended when absent.
    pub t_end: Option<f64>,
}

impl WindowConfig {
    pub fn build(&self) -> fkpn_core::Result<Window<f64>> {
        Window::new(
            self.lateral_radius,
            self.height,
            self.t_start,
            self.t_end.unwrap_or(f64::INFINITY),
        )
    }
}

/// Fully validated run description. Output directory and worker count are
/// run-time settings and stay out of the canonical form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub n: usize,
    pub beta: f64,
    pub eps: Option<f64>,
    pub eps_list: Option<Vec<f64>>,
    pub eps_ref: Option<f64>,
    pub beta_list: Option<Vec<f64>>,
    pub forcing: ForcingConfig,
    pub profile: ProfileConfig,
    /// Constant added to the profile.
    pub profile_shift: f64,
    pub domain: DomainConfig,
    pub window: Option<WindowConfig>,
    pub horizon: f64,
    pub snapshot_times: Vec<f64>,
    pub closure: ClosureName,
    pub safety: f64,
    pub max_dt: Option<f64>,
    pub elliptic_tol: f64,
    pub quadrature_tol: f64,
    pub slack: f64,
    pub heights: Vec<f64>,
    pub ordering_shift: f64,
    pub audit_barriers: bool,
    #[serde(skip)]
    pub output: Option<String>,
    #[serde(skip)]
    pub workers: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosureName {
    Kernel,
    ZeroNormalDifference,
}

impl ClosureName {
    pub fn kind(self) -> ClosureKind {
        match self {
            Self::Kernel => ClosureKind::Kernel,
            Self::ZeroNormalDifference => ClosureKind::ZeroNormalDifference,
        }
    }
}

/// Every problem found in a document, reported together.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<String>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} configuration error(s):", self.0.len())?;
        for e in &self.0 {
            writeln!(f, "  - {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

/// Reads keys of one JSON object, recording problems instead of stopping.
struct Obj<'a> {
    map: Option<&'a Map<String, Value>>,
    path: String,
    used: BTreeSet<&'static str>,
}

struct Errors(Vec<String>);

impl Errors {
    fn push(&mut self, msg: impl Into<String>) {
        self.0.push(msg.into());
    }
}

impl<'a> Obj<'a> {
    fn new(value: Option<&'a Value>, path: &str, errs: &mut Errors) -> Self {
        let map = match value {
            Some(Value::Object(m)) => Some(m),
            Some(_) => {
                errs.push(format!("{path}: expected an object"));
                None
            }
            None => None,
        };
        Self {
            map,
            path: path.to_string(),
            used: BTreeSet::new(),
        }
    }

    fn key(&self, k: &str) -> String {
        if self.path.is_empty() {
            k.to_string()
        } else {
            format!("{}.{k}", self.path)
        }
    }

    fn get(&mut self, k: &'static str) -> Option<&'a Value> {
        self.used.insert(k);
        self.map.and_then(|m| m.get(k)).filter(|v| !v.is_null())
    }

    fn present(&self) -> bool {
        self.map.is_some()
    }

    fn f64(&mut self, k: &'static str, errs: &mut Errors) -> Option<f64> {
        let v = self.get(k)?;
        match v.as_f64() {
            Some(x) if x.is_finite() => Some(x),
            _ => {
                errs.push(format!("{}: expected a finite number", self.key(k)));
                None
            }
        }
    }

    fn f64_req(&mut self, k: &'static str, errs: &mut Errors) -> Option<f64> {
        if self.present() && self.map.is_some_and(|m| m.get(k).is_none_or(Value::is_null)) {
            self.used.insert(k);
            errs.push(format!("{}: missing required field", self.key(k)));
            return None;
        }
        self.f64(k, errs)
    }

    fn usize(&mut self, k: &'static str, errs: &mut Errors) -> Option<usize> {
        let v = self.get(k)?;
        match v.as_u64() {
            Some(x) => Some(x as usize),
            None => {
                errs.push(format!("{}: expected a nonnegative integer", self.key(k)));
                None
            }
        }
    }

    fn bool(&mut self, k: &'static str, errs: &mut Errors) -> Option<bool> {
        let v = self.get(k)?;
        match v.as_bool() {
            Some(b) => Some(b),
            None => {
                errs.push(format!("{}: expected true or false", self.key(k)));
                None
            }
        }
    }

    fn str(&mut self, k: &'static str, errs: &mut Errors) -> Option<&'a str> {
        let v = self.get(k)?;
        match v.as_str() {
            Some(s) => Some(s),
            None => {
                errs.push(format!("{}: expected a string", self.key(k)));
                None
            }
        }
    }

    fn list(&mut self, k: &'static str, errs: &mut Errors) -> Option<Vec<f64>> {
        let v = self.get(k)?;
        let Some(items) = v.as_array() else {
            errs.push(format!("{}: expected an array of numbers", self.key(k)));
            return None;
        };
        let mut out = Vec::with_capacity(items.len());
        for (i, item) in items.iter().enumerate() {
            match item.as_f64() {
                Some(x) if x.is_finite() => out.push(x),
                _ => errs.push(format!("{}[{i}]: expected a finite number", self.key(k))),
            }
        }
        Some(out)
    }

    fn finish(self, errs: &mut Errors) {
        if let Some(m) = self.map {
            for k in m.keys() {
                if !self.used.contains(k.as_str()) {
                    errs.push(format!("{}: unknown key", self.key(k)));
                }
            }
        }
    }
}

fn require<T>(v: Option<T>, what: &str, command: Command, errs: &mut Errors) -> Option<T> {
    if v.is_none() {
        errs.push(format!("{what}: required by the {command} command"));
    }
    v
}

/// Parses and validates a JSON configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigErrors> {
    let doc: Value = serde_json::from_str(text).map_err(|e| ConfigErrors(vec![format!("malformed JSON: {e}")]))?;
    let mut errs = Errors(Vec::new());
    let mut root = Obj::new(Some(&doc), "", &mut errs);
    if !root.present() {
        return Err(ConfigErrors(errs.0));
    }

    let command = match root.str("command", &mut errs) {
        Some(s) => Command::parse(s).or_else(|| {
            let names: Vec<_> = Command::ALL.iter().map(|c| c.name()).collect();
            errs.push(format!(
                "command: unknown command `{s}` (expected one of {})",
                names.join(", ")
            ));
            None
        }),
        None => {
            errs.push("command: missing required field");
            None
        }
    };
    let n = root.usize("n", &mut errs);
    if n.is_none() && root.map.is_some_and(|m| !m.contains_key("n")) {
        errs.push("n: missing required field");
    }
    if let Some(n) = n {
        if !(1..=3).contains(&n) {
            errs.push(format!("n: dimension must be 1, 2 or 3, got {n}"));
        }
    }
    let beta = root.f64("beta", &mut errs).unwrap_or(0.0);
    if beta < 0.0 {
        errs.push(format!("beta: must be nonnegative, got {beta}"));
    }
    let eps = root.f64("eps", &mut errs);
    let eps_list = root.list("eps_list", &mut errs);
    let eps_ref = root.f64("eps_ref", &mut errs);
    let beta_list = root.list("beta_list", &mut errs);
    let horizon = root.f64("horizon", &mut errs);
    let snapshot_times = root.list("snapshot_times", &mut errs).unwrap_or_default();
    let closure = match root.str("closure", &mut errs) {
        None | Some("kernel") => ClosureName::Kernel,
        Some("zero-normal-difference") => ClosureName::ZeroNormalDifference,
        Some(other) => {
            errs.push(format!(
                "closure: unknown rule `{other}` (expected kernel or zero-normal-difference)"
            ));
            ClosureName::Kernel
        }
    };
    let safety = root.f64("safety", &mut errs).unwrap_or(DEFAULT_SAFETY);
    let max_dt = root.f64("max_dt", &mut errs);
    let elliptic_tol = root.f64("elliptic_tol", &mut errs).unwrap_or(DEFAULT_ELLIPTIC_TOL);
    let quadrature_tol = root.f64("quadrature_tol", &mut errs).unwrap_or(DEFAULT_QUADRATURE_TOL);
    let slack = root.f64("slack", &mut errs).unwrap_or(DEFAULT_SLACK);
    let heights = root
        .list("heights", &mut errs)
        .unwrap_or_else(|| DEFAULT_HEIGHTS.to_vec());
    let ordering_shift = root.f64("ordering_shift", &mut errs).unwrap_or(DEFAULT_ORDERING_SHIFT);
    let audit_barriers = root.bool("audit_barriers", &mut errs).unwrap_or(true);
    let output = root.str("output", &mut errs).map(str::to_string);
    let workers = root.usize("workers", &mut errs);
    let profile_shift = root.f64("profile_shift", &mut errs).unwrap_or(0.0);

    let forcing_value = root.get("forcing");
    let profile_value = root.get("profile");
    let domain_value = root.get("domain");
    let window_value = root.get("window");
    root.finish(&mut errs);

    let forcing = parse_forcing(forcing_value, &mut errs);
    let profile = parse_profile(profile_value, &mut errs);
    let domain = parse_domain(domain_value, n, &mut errs);
    let window = window_value.map(|v| parse_window(v, &mut errs));

    // Scalar ranges.
    if !(safety > 0.0 && safety <= 1.0) {
        errs.push(format!("safety: must lie in (0, 1], got {safety}"));
    }
    for (name, v) in [("elliptic_tol", elliptic_tol), ("quadrature_tol", quadrature_tol)] {
        if v <= 0.0 {
            errs.push(format!("{name}: must be positive, got {v}"));
        }
    }
    if let Some(m) = max_dt {
        if m <= 0.0 {
            errs.push(format!("max_dt: must be positive, got {m}"));
        }
    }
    if slack < 0.0 {
        errs.push(format!("slack: must be nonnegative, got {slack}"));
    }
    if let Some(w) = workers {
        if w == 0 {
            errs.push("workers: must be at least 1");
        }
    }
    if let Some(h) = horizon {
        if h < 0.0 {
            errs.push(format!("horizon: must be nonnegative, got {h}"));
        }
        for (i, &t) in snapshot_times.iter().enumerate() {
            if !(0.0..=h).contains(&t) {
                errs.push(format!("snapshot_times[{i}]: {t} lies outside [0, {h}]"));
            }
        }
    }
    if let Some(e) = eps {
        if e <= 0.0 {
            errs.push(format!("eps: must be positive, got {e}"));
        }
    }
    if let Some(list) = &eps_list {
        if list.iter().any(|&e| e <= 0.0) {
            errs.push("eps_list: every spacing must be positive");
        } else if list.is_empty() {
            errs.push("eps_list: must not be empty");
        } else {
            for w in list.windows(2) {
                if nesting_level(w[1], w[0]) != Some(1) {
                    errs.push(format!(
                        "eps_list: pair ({}, {}) is not nested by a factor of 2",
                        w[0], w[1]
                    ));
                }
            }
            if let Some(r) = eps_ref {
                let finest = list[list.len() - 1];
                if r <= 0.0 || nesting_level(r, finest).is_none() {
                    errs.push(format!(
                        "eps_ref: {r} is not a power-of-two refinement of the finest spacing {finest}"
                    ));
                }
            }
        }
    }
    if let Some(list) = &beta_list {
        if list.is_empty() || list.iter().any(|&b| b <= 0.0) {
            errs.push("beta_list: needs at least one value, all positive");
        }
        for w in list.windows(2) {
            if w[1] >= w[0] {
                errs.push(format!(
                    "beta_list: pair ({}, {}) is not strictly decreasing",
                    w[0], w[1]
                ));
            }
        }
    }

    // Command requirements.
    let mut eps_values: Vec<f64> = Vec::new();
    if let Some(cmd) = command {
        let needs_eps = matches!(
            cmd,
            Command::Simulate | Command::Extend | Command::BetaStudy | Command::Barriers
        );
        let needs_list = matches!(cmd, Command::Converge | Command::ExtensionStudy);
        let needs_horizon = matches!(
            cmd,
            Command::Simulate | Command::Converge | Command::BetaStudy | Command::Barriers
        );
        let needs_window = matches!(cmd, Command::Converge | Command::BetaStudy | Command::ExtensionStudy);
        if needs_eps {
            eps_values.extend(require(eps, "eps", cmd, &mut errs));
        }
        if needs_list {
            eps_values.extend(require(eps_list.clone(), "eps_list", cmd, &mut errs).unwrap_or_default());
        }
        if cmd == Command::Converge {
            eps_values.extend(require(eps_ref, "eps_ref", cmd, &mut errs));
        }
        if cmd == Command::BetaStudy {
            require(beta_list.as_ref(), "beta_list", cmd, &mut errs);
        }
        if needs_horizon {
            require(horizon, "horizon", cmd, &mut errs);
        }
        if needs_window {
            require(window, "window", cmd, &mut errs);
        }
        if matches!(cmd, Command::Extend) {
            if n == Some(1) {
                errs.push("n: the extend command needs at least one lateral axis");
            }
            if let Some(e) = eps {
                for (i, &h) in heights.iter().enumerate() {
                    if h < e {
                        errs.push(format!("heights[{i}]: {h} is below eps {e}"));
                    }
                }
            }
        }
    }

    // Cross-field checks that need a valid dimension.
    if let (Some(n), Some(p)) = (n, &profile) {
        if (1..=3).contains(&n) {
            if let Err(e) = build_profile(p, n, profile_shift) {
                errs.push(format!("profile: {e}"));
            }
        }
    }
    if let (Some(n), Some(d)) = (n, domain) {
        if (1..=3).contains(&n) {
            for &e in eps_values.iter().filter(|&&e| e > 0.0) {
                match LatticeDomain::from_extents(n, e, d.lateral_extent, d.height_extent) {
                    Ok(dom) => {
                        if let Some(Some(w)) = window {
                            if let Err(err) = w.build().and_then(|win| win.check_inside(&dom)) {
                                errs.push(format!("window: {err} (eps {e})"));
                            }
                        }
                    }
                    Err(err) => errs.push(format!("domain: {err} (eps {e})")),
                }
            }
        }
    }

    if !errs.0.is_empty() {
        return Err(ConfigErrors(errs.0));
    }
    Ok(RunConfig {
        command: command.expect("checked"),
        n: n.expect("checked"),
        beta,
        eps,
        eps_list,
        eps_ref,
        beta_list,
        forcing: forcing.expect("checked"),
        profile: profile.expect("checked"),
        profile_shift,
        domain: domain.expect("checked"),
        window: window.flatten(),
        horizon: horizon.unwrap_or(0.0),
        snapshot_times,
        closure,
        safety,
        max_dt,
        elliptic_tol,
        quadrature_tol,
        slack,
        heights,
        ordering_shift,
        audit_barriers,
        output,
        workers,
    })
}

fn parse_forcing(v: Option<&Value>, errs: &mut Errors) -> Option<ForcingConfig> {
    let Some(v) = v else {
        errs.push("forcing: missing required field");
        return None;
    };
    let mut o = Obj::new(Some(v), "forcing", errs);
    if !o.present() {
        return None;
    }
    let kind = o.str("kind", errs);
    let out = match kind {
        Some("effective") => {
            let amplitude = o.f64_req("amplitude", errs);
            let sigma = o.f64("sigma", errs).unwrap_or(0.0);
            let eps_dependent = o.bool("eps_dependent", errs).unwrap_or(true);
            match amplitude {
                Some(a) if a <= 0.0 => {
                    errs.push(format!("forcing.amplitude: must be positive, got {a}"));
                    None
                }
                Some(amplitude) => Some(ForcingConfig::Effective {
                    amplitude,
                    sigma,
                    eps_dependent,
                }),
                None => None,
            }
        }
        Some("constant") => o.f64_req("value", errs).map(|value| ForcingConfig::Constant { value }),
        Some("sinusoidal") => {
            let amplitude = o.f64_req("amplitude", errs);
            let wavenumber = o.f64_req("wavenumber", errs);
            if let Some(a) = amplitude.filter(|&a| a < 0.0) {
                errs.push(format!("forcing.amplitude: must be nonnegative, got {a}"));
                None
            } else {
                Some(ForcingConfig::Sinusoidal {
                    amplitude: amplitude?,
                    wavenumber: wavenumber?,
                })
            }
        }
        Some(other) => {
            errs.push(format!(
                "forcing.kind: unknown forcing `{other}` (expected effective, constant or sinusoidal)"
            ));
            None
        }
        None => {
            errs.push("forcing.kind: missing required field");
            None
        }
    };
    o.finish(errs);
    out
}

fn parse_profile(v: Option<&Value>, errs: &mut Errors) -> Option<ProfileConfig> {
    let Some(v) = v else {
        errs.push("profile: missing required field");
        return None;
    };
    let mut o = Obj::new(Some(v), "profile", errs);
    if !o.present() {
        return None;
    }
    let out = match o.str("kind", errs) {
        Some(kind @ ("screw" | "edge")) => {
            let width = o.f64_req("width", errs)?;
            Some(if kind == "screw" {
                ProfileConfig::Screw { width }
            } else {
                ProfileConfig::Edge { width }
            })
        }
        Some("constant") => o.f64_req("value", errs).map(|value| ProfileConfig::Constant { value }),
        Some("arctan") => {
            let axis = o.usize("axis", errs).unwrap_or(0);
            let width = o.f64_req("width", errs);
            let lower = o.f64_req("lower", errs);
            let upper = o.f64_req("upper", errs);
            Some(ProfileConfig::Arctan {
                axis,
                width: width?,
                lower: lower?,
                upper: upper?,
            })
        }
        Some(other) => {
            errs.push(format!(
                "profile.kind: unknown profile `{other}` (expected screw, edge, constant or arctan)"
            ));
            None
        }
        None => {
            errs.push("profile.kind: missing required field");
            None
        }
    };
    o.finish(errs);
    out
}

fn parse_domain(v: Option<&Value>, n: Option<usize>, errs: &mut Errors) -> Option<DomainConfig> {
    let Some(v) = v else {
        errs.push("domain: missing required field");
        return None;
    };
    let mut o = Obj::new(Some(v), "domain", errs);
    if !o.present() {
        return None;
    }
    let lateral = if n == Some(1) {
        o.f64("lateral_extent", errs).unwrap_or(0.0)
    } else {
        o.f64_req("lateral_extent", errs)?
    };
    let height = o.f64_req("height_extent", errs)?;
    o.finish(errs);
    if lateral < 0.0 || height <= 0.0 {
        errs.push("domain: extents must be nonnegative with a positive height");
        return None;
    }
    Some(DomainConfig {
        lateral_extent: lateral,
        height_extent: height,
    })
}

fn parse_window(v: &Value, errs: &mut Errors) -> Option<WindowConfig> {
    let mut o = Obj::new(Some(v), "window", errs);
    if !o.present() {
        return None;
    }
    let lateral_radius = o.f64_req("lateral_radius", errs);
    let height = o.f64_req("height", errs);
    let t_start = o.f64("t_start", errs).unwrap_or(0.0);
    let t_end = o.f64("t_end", errs);
    o.finish(errs);
    let w = WindowConfig {
        lateral_radius: lateral_radius?,
        height: height?,
        t_start,
        t_end,
    };
    if let Err(e) = w.build() {
        errs.push(format!("window: {e}"));
        return None;
    }
    Some(w)
}

pub fn build_profile(p: &ProfileConfig, n: usize, shift: f64) -> fkpn_core::Result<BoundaryProfile<f64>> {
    let base = match *p {
        ProfileConfig::Screw { width } => dislocation_profile(DislocationKind::Screw, width, n)?,
        ProfileConfig::Edge { width } => dislocation_profile(DislocationKind::Edge, width, n)?,
        ProfileConfig::Constant { value } => BoundaryProfile::constant(n, value)?,
        ProfileConfig::Arctan {
            axis,
            width,
            lower,
            upper,
        } => BoundaryProfile::arctan(n, axis, width, lower, upper)?,
    };
    Ok(if shift != 0.0 { base.shifted(shift) } else { base })
}

impl RunConfig {
    pub fn scenario(&self) -> fkpn_core::Result<Scenario<f64>> {
        let forcing = match self.forcing {
            ForcingConfig::Effective {
                amplitude,
                sigma,
                eps_dependent,
            } => Forcing::Effective {
                potential: PeriodicPotential::cosine(amplitude)?,
                sigma,
                eps_dependent,
            },
            ForcingConfig::Constant { value } => Forcing::Fixed(Nonlinearity::constant(value)),
            ForcingConfig::Sinusoidal { amplitude, wavenumber } => {
                Forcing::Fixed(Nonlinearity::sinusoidal(amplitude, wavenumber))
            }
        };
        Ok(Scenario::new(
            forcing,
            build_profile(&self.profile, self.n, self.profile_shift)?,
        ))
    }

    pub fn window(&self) -> Option<Window<f64>> {
        self.window.and_then(|w| w.build().ok())
    }

    /// Compact JSON with sorted keys and defaults filled in.
    pub fn canonical(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        serde_json::to_string(&value).expect("value serializes")
    }

    /// SHA-256 of the canonical form, hex encoded.
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// `<command>-<first 12 hex digits of the hash>`.
    pub fn run_name(&self) -> String {
        format!("{}-{}", self.command, &self.hash()[..12])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "command": "simulate", "n": 1, "beta": 0, "eps": 0.5, "horizon": 1,
        "forcing": {"kind": "constant", "value": 1},
        "profile": {"kind": "constant", "value": 0},
        "domain": {"height_extent": 2}
    }"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.command, Command::Simulate);
        assert_eq!(c.safety, 0.9);
        assert_eq!(c.elliptic_tol, 1e-10);
        assert_eq!(c.quadrature_tol, 1e-8);
        assert_eq!(c.closure, ClosureName::Kernel);
        assert_eq!(c.run_name().len(), "simulate-".len() + 12);
    }

    #[test]
    fn hash_ignores_layout_and_defaults() {
        let a = parse_config(MINIMAL).unwrap();
        let reordered = r#"{"domain": {"height_extent": 2.0}, "profile": {"value": 0, "kind": "constant"},
            "forcing": {"value": 1, "kind": "constant"}, "horizon": 1, "eps": 0.5, "beta": 0, "n": 1,
            "command": "simulate", "safety": 0.9, "workers": 3, "output": "elsewhere"}"#;
        let b = parse_config(reordered).unwrap();
        assert_eq!(a.hash(), b.hash());
        let c = parse_config(&MINIMAL.replace("\"eps\": 0.5", "\"eps\": 0.25")).unwrap();
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn reports_every_violation() {
        let bad = r#"{
            "command": "converge", "n": 2, "beta": -1, "eps_list": [0.4, 0.3], "eps_ref": 0.1,
            "forcing": {"kind": "effective", "amplitude": -0.5, "colour": 1},
            "profile": {"kind": "screw", "width": 1},
            "domain": {"lateral_extent": 4, "height_extent": 3.2},
            "bogus": true
        }"#;
        let errs = parse_config(bad).unwrap_err().0;
        let joined = errs.join("\n");
        for needle in [
            "beta: must be nonnegative",
            "eps_list: pair (0.4, 0.3)",
            "forcing.amplitude: must be positive",
            "forcing.colour: unknown key",
            "bogus: unknown key",
            "horizon: required",
            "window: required",
        ] {
            assert!(joined.contains(needle), "missing `{needle}` in\n{joined}");
        }
    }

    #[test]
    fn rejects_missing_and_malformed() {
        assert!(parse_config("{").is_err());
        assert!(parse_config("[]").is_err());
        let e = parse_config(r#"{"n": 2}"#).unwrap_err().0.join("\n");
        assert!(e.contains("command: missing") && e.contains("forcing: missing") && e.contains("domain: missing"));
        let e = parse_config(&MINIMAL.replace("\"n\": 1", "\"n\": 5"))
            .unwrap_err()
            .0
            .join("\n");
        assert!(e.contains("n: dimension"));
        let e = parse_config(&MINIMAL.replace("\"eps\": 0.5", "\"eps\": 0.3"))
            .unwrap_err()
            .0
            .join("\n");
        assert!(e.contains("domain:"), "{e}");
    }

    #[test]
    fn window_must_fit_every_lattice() {
        let text = r#"{
            "command": "extension-study", "n": 2, "eps_list": [0.4, 0.2],
            "forcing": {"kind": "constant", "value": 0},
            "profile": {"kind": "arctan", "width": 1, "lower": 0, "upper": 1},
            "domain": {"lateral_extent": 2, "height_extent": 1.6},
            "window": {"lateral_radius": 2, "height": 1}
        }"#;
        let e = parse_config(text).unwrap_err().0.join("\n");
        assert!(e.contains("window:"), "{e}");
        assert!(parse_config(&text.replace("\"lateral_radius\": 2,", "\"lateral_radius\": 1,")).is_ok());
    }
}
