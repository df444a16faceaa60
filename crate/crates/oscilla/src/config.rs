//! TOML experiment configuration.
//!
//! A config has optional top-level `out` and `seed`, coefficient sections
//! `[volume]`, `[potential]` and `[envelope]`, solver overrides in
//! `[solver]`, and one section per subcommand. Unknown keys are rejected.
//! Every error names the offending field and, when it can be located, the
//! line it sits on.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use oscilla_core::criteria::CriteriaOptions;
use oscilla_core::gaps::GapOptions;
use oscilla_core::spectral::SpectralOptions;
use oscilla_core::volterra::SolverOptions;
use oscilla_core::{make_model, CoefficientProfile, GrowthEnvelope, ModelKind};
use serde::Deserialize;

use crate::table::load_table;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub file: String,
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.file)?;
        if let Some(l) = self.line {
            write!(f, ":{l}")?;
        }
        if let Some(field) = &self.field {
            write!(f, ": field `{field}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub volume: Option<ProfileSpec>,
    pub potential: Option<ProfileSpec>,
    pub envelope: Option<EnvelopeSpec>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub solve: SolveSection,
    #[serde(default)]
    pub critical: CriticalSection,
    #[serde(default)]
    pub criteria: CriteriaSection,
    #[serde(default)]
    pub gaps: GapsSection,
    #[serde(default)]
    pub spectral: SpectralSection,
    /// Directory that relative table paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
    #[serde(skip)]
    source: String,
    #[serde(skip)]
    file: String,
}

/// A coefficient: a family name with its parameters, or a sample table.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub family: String,
    pub m: Option<u32>,
    pub b: Option<f64>,
    pub a: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub h: Option<f64>,
    pub c: Option<f64>,
    pub scale: Option<f64>,
    pub rate: Option<f64>,
    pub exponent: Option<f64>,
    pub log_exponent: Option<f64>,
    pub value: Option<f64>,
    pub path: Option<PathBuf>,
    pub clamp: Option<f64>,
    pub truncate: Option<f64>,
    #[serde(default)]
    pub jumps: Vec<JumpSpec>,
}

/// `{ at, ratio }` for closed forms, `{ at, left, right }` for tables.
#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpSpec {
    pub at: f64,
    pub ratio: Option<f64>,
    pub left: Option<f64>,
    pub right: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeSpec {
    #[serde(default = "one")]
    pub scale: f64,
    pub rate: f64,
    pub exponent: f64,
    #[serde(default)]
    pub log_exponent: f64,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub rel_tol: Option<f64>,
    pub max_phase_step: Option<f64>,
    pub max_log_v_step: Option<f64>,
    pub max_step: Option<f64>,
    pub eps0: Option<f64>,
    pub eps_floor: Option<f64>,
    pub stability_tol: Option<f64>,
    pub residual_tol: Option<f64>,
    pub max_halvings: Option<usize>,
    pub refine_tol: Option<f64>,
    pub separation_floor: Option<f64>,
    pub near_zero_mask: Option<f64>,
    pub max_steps: Option<usize>,
    pub checkpoints_per_decade: Option<usize>,
    pub uniform_checkpoints: Option<usize>,
    pub verify: Option<bool>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSection {
    #[serde(default = "one")]
    pub z0: f64,
    pub horizon: Option<f64>,
    /// Grow the horizon until this many zeros are found.
    pub zeros: Option<usize>,
    #[serde(default = "default_horizon_cap")]
    pub horizon_cap: f64,
    /// Write every `stride`-th node of the track.
    #[serde(default = "one_usize")]
    pub stride: usize,
}

impl Default for SolveSection {
    fn default() -> Self {
        Self {
            z0: 1.0,
            horizon: None,
            zeros: None,
            horizon_cap: default_horizon_cap(),
            stride: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CriticalSection {
    pub t_lo: f64,
    pub t_hi: f64,
    pub points_per_decade: usize,
    /// Upper end R of the reciprocal tail; infinite by default.
    pub upper: f64,
}

impl Default for CriticalSection {
    fn default() -> Self {
        Self {
            t_lo: 0.1,
            t_hi: 1e3,
            points_per_decade: 16,
            upper: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CriteriaSection {
    pub horizon: f64,
    /// T and t of the first-zero test. With only `t_end` the test scans T.
    pub t_start: Option<f64>,
    pub t_end: Option<f64>,
    pub scan_points: usize,
    pub per_decade: usize,
    pub unbounded_threshold: f64,
    pub ratio_margin: f64,
    pub divergence_ratio: f64,
    pub hn_tol: f64,
    pub window: f64,
}

impl Default for CriteriaSection {
    fn default() -> Self {
        let o = CriteriaOptions::default();
        Self {
            horizon: 200.0,
            t_start: None,
            t_end: None,
            scan_points: 24,
            per_decade: o.per_decade,
            unbounded_threshold: o.unbounded_threshold,
            ratio_margin: o.ratio_margin,
            divergence_ratio: o.divergence_ratio,
            hn_tol: o.hn_tol,
            window: o.window,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GapsSection {
    pub taus: Option<Vec<f64>>,
    pub tau_lo: Option<f64>,
    pub tau_hi: Option<f64>,
    pub tau_count: Option<usize>,
    pub c: Option<f64>,
    pub z0: f64,
    pub level: f64,
    pub horizon_cap: f64,
}

impl Default for GapsSection {
    fn default() -> Self {
        let o = GapOptions::default();
        Self {
            taus: None,
            tau_lo: None,
            tau_hi: None,
            tau_count: None,
            c: None,
            z0: o.z0,
            level: o.level,
            horizon_cap: o.horizon_cap,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectralSection {
    /// R grid for the superexponential model sandwich.
    pub r: Option<Vec<f64>>,
    pub m: u32,
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
    pub eps: f64,
    pub window: f64,
    pub knots: usize,
    pub cap_factor: f64,
    pub fd_n: usize,
    pub fd_length: f64,
    /// Radii for nodal-annulus counting with `[volume]`, `[potential]`
    /// and `[envelope]`.
    pub index_r: Option<Vec<f64>>,
    pub c: Option<f64>,
}

impl Default for SpectralSection {
    fn default() -> Self {
        let o = SpectralOptions::default();
        Self {
            r: None,
            m: 3,
            a: 1.0,
            alpha: 1.0,
            beta: 0.0,
            eps: o.eps,
            window: o.window,
            knots: o.knots,
            cap_factor: o.cap_factor,
            fd_n: o.fd_n,
            fd_length: o.fd_length,
            index_r: None,
            c: None,
        }
    }
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

fn default_horizon_cap() -> f64 {
    1e9
}

/// Family name, required fields, optional fields.
const FAMILIES: &[(&str, &[&str], &[&str])] = &[
    ("euclidean", &["m"], &[]),
    ("hyperbolic", &["m"], &["b"]),
    ("superexp", &["m", "a", "alpha"], &["beta"]),
    ("power", &["exponent"], &["scale", "log_exponent"]),
    ("sinh_power", &["exponent"], &["scale", "rate"]),
    ("coth", &[], &["scale", "rate", "h"]),
    ("constant", &["value"], &[]),
    ("growth", &["rate", "exponent"], &["scale", "log_exponent"]),
    ("euler", &["h"], &[]),
    ("hypothesis", &["c"], &[]),
    ("table", &["path"], &[]),
];

const MODIFIERS: &[&str] = &["clamp", "truncate", "jumps"];

impl ProfileSpec {
    fn present(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let opts: [(&'static str, bool); 14] = [
            ("m", self.m.is_some()),
            ("b", self.b.is_some()),
            ("a", self.a.is_some()),
            ("alpha", self.alpha.is_some()),
            ("beta", self.beta.is_some()),
            ("h", self.h.is_some()),
            ("c", self.c.is_some()),
            ("scale", self.scale.is_some()),
            ("rate", self.rate.is_some()),
            ("exponent", self.exponent.is_some()),
            ("log_exponent", self.log_exponent.is_some()),
            ("value", self.value.is_some()),
            ("path", self.path.is_some()),
            ("clamp", self.clamp.is_some()),
        ];
        for (name, on) in opts {
            if on {
                out.push(name);
            }
        }
        if self.truncate.is_some() {
            out.push("truncate");
        }
        if !self.jumps.is_empty() {
            out.push("jumps");
        }
        out
    }

    /// Build the profile. `env` is needed by the `hypothesis` family.
    pub fn build(&self, base_dir: &Path, env: Option<&GrowthEnvelope>) -> Result<CoefficientProfile, (String, String)> {
        let err = |field: &str, msg: String| (field.to_string(), msg);
        let core = |e: oscilla_core::Error| (String::from("family"), e.to_string());
        let num =
            |name: &str, x: Option<f64>| x.ok_or_else(|| err(name, format!("required by family `{}`", self.family)));
        let m = || {
            self.m
                .ok_or_else(|| err("m", format!("required by family `{}`", self.family)))
        };
        let mut p = match self.family.as_str() {
            "euclidean" => make_model(ModelKind::Euclidean { m: m()? }).map_err(core)?,
            "hyperbolic" => make_model(ModelKind::Hyperbolic {
                m: m()?,
                b: self.b.unwrap_or(1.0),
            })
            .map_err(core)?,
            "superexp" => make_model(ModelKind::SuperExp {
                m: m()?,
                a: num("a", self.a)?,
                alpha: num("alpha", self.alpha)?,
                beta: self.beta.unwrap_or(0.0),
            })
            .map_err(core)?,
            "power" => CoefficientProfile::power_log(
                self.scale.unwrap_or(1.0),
                num("exponent", self.exponent)?,
                self.log_exponent.unwrap_or(0.0),
            )
            .map_err(core)?,
            "sinh_power" => CoefficientProfile::sinh_power(
                self.scale.unwrap_or(1.0),
                self.rate.unwrap_or(1.0),
                num("exponent", self.exponent)?,
            )
            .map_err(core)?,
            "coth" => {
                let scale = match (self.h, self.scale) {
                    (Some(_), Some(_)) => return Err(err("h", "give either `h` or `scale`, not both".into())),
                    (Some(h), None) => h * h,
                    (None, s) => s.unwrap_or(1.0),
                };
                CoefficientProfile::coth(scale, self.rate.unwrap_or(1.0)).map_err(core)?
            }
            "constant" => CoefficientProfile::constant(num("value", self.value)?).map_err(core)?,
            "growth" => CoefficientProfile::growth(
                GrowthEnvelope::new(
                    self.scale.unwrap_or(1.0),
                    num("rate", self.rate)?,
                    num("exponent", self.exponent)?,
                    self.log_exponent.unwrap_or(0.0),
                )
                .map_err(core)?,
            ),
            "euler" => {
                let h = num("h", self.h)?;
                CoefficientProfile::power(h * h, -2.0).map_err(core)?
            }
            "hypothesis" => {
                let env = env.ok_or_else(|| err("family", "`hypothesis` needs an [envelope] section".into()))?;
                oscilla_core::spectral::hypothesis_potential(env, num("c", self.c)?).map_err(core)?
            }
            "table" => {
                let path = base_dir.join(
                    self.path
                        .as_ref()
                        .ok_or_else(|| err("path", "required by family `table`".into()))?,
                );
                let samples = load_table(&path).map_err(|e| err("path", e.to_string()))?;
                let mut js = Vec::new();
                for (k, j) in self.jumps.iter().enumerate() {
                    match (j.left, j.right, j.ratio) {
                        (Some(l), Some(r), None) => js.push((j.at, l, r)),
                        _ => {
                            return Err(err(
                                &format!("jumps[{k}]"),
                                "table jumps take `at`, `left` and `right`".into(),
                            ))
                        }
                    }
                }
                CoefficientProfile::table(&samples, &js).map_err(|e| err("path", e.to_string()))?
            }
            other => {
                let names: Vec<&str> = FAMILIES.iter().map(|f| f.0).collect();
                return Err(err(
                    "family",
                    format!("unknown family `{other}`; expected one of {}", names.join(", ")),
                ));
            }
        };
        let clamp = match (self.family.as_str(), self.clamp) {
            (_, Some(c)) => Some(c),
            ("euler", None) => Some(1.0),
            _ => None,
        };
        if let Some(c) = clamp {
            if !matches!(self.family.as_str(), "table" | "hypothesis") {
                p = p.clamped_below(c).map_err(|e| err("clamp", e.to_string()))?;
            } else if self.clamp.is_some() {
                return Err(err("clamp", format!("not available for family `{}`", self.family)));
            }
        }
        if self.family != "table" {
            for (k, j) in self.jumps.iter().enumerate() {
                let field = format!("jumps[{k}]");
                match (j.ratio, j.left, j.right) {
                    (Some(r), None, None) => p = p.with_jump(j.at, r).map_err(|e| err(&field, e.to_string()))?,
                    _ => return Err(err(&field, "closed-form jumps take `at` and `ratio`".into())),
                }
            }
        }
        if let Some(end) = self.truncate {
            p = p.truncated(end).map_err(|e| err("truncate", e.to_string()))?;
        }
        Ok(p)
    }

    fn check_fields(&self) -> Result<(), (String, String)> {
        let Some(&(_, req, opt)) = FAMILIES.iter().find(|f| f.0 == self.family) else {
            let names: Vec<&str> = FAMILIES.iter().map(|f| f.0).collect();
            return Err((
                "family".into(),
                format!("unknown family `{}`; expected one of {}", self.family, names.join(", ")),
            ));
        };
        let present = self.present();
        for r in req {
            if !present.contains(r) {
                return Err(((*r).into(), format!("required by family `{}`", self.family)));
            }
        }
        for p in present {
            if !req.contains(&p) && !opt.contains(&p) && !MODIFIERS.contains(&p) {
                return Err((p.into(), format!("not a parameter of family `{}`", self.family)));
            }
        }
        Ok(())
    }
}

impl EnvelopeSpec {
    pub fn build(&self) -> oscilla_core::Result<GrowthEnvelope> {
        GrowthEnvelope::new(self.scale, self.rate, self.exponent, self.log_exponent)
    }
}

impl SolverSection {
    pub fn options(&self) -> SolverOptions {
        let d = SolverOptions::default();
        SolverOptions {
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            max_phase_step: self.max_phase_step.unwrap_or(d.max_phase_step),
            max_log_v_step: self.max_log_v_step.unwrap_or(d.max_log_v_step),
            max_step: self.max_step.unwrap_or(d.max_step),
            eps0: self.eps0.unwrap_or(d.eps0),
            eps_floor: self.eps_floor.unwrap_or(d.eps_floor),
            stability_tol: self.stability_tol.unwrap_or(d.stability_tol),
            residual_tol: self.residual_tol.unwrap_or(d.residual_tol),
            max_halvings: self.max_halvings.unwrap_or(d.max_halvings),
            refine_tol: self.refine_tol.unwrap_or(d.refine_tol),
            separation_floor: self.separation_floor.unwrap_or(d.separation_floor),
            near_zero_mask: self.near_zero_mask.unwrap_or(d.near_zero_mask),
            max_steps: self.max_steps.unwrap_or(d.max_steps),
            checkpoints_per_decade: self.checkpoints_per_decade.unwrap_or(d.checkpoints_per_decade),
            uniform_checkpoints: self.uniform_checkpoints.unwrap_or(d.uniform_checkpoints),
            verify: self.verify.unwrap_or(d.verify),
        }
    }
}

impl CriteriaSection {
    pub fn options(&self) -> CriteriaOptions {
        CriteriaOptions {
            per_decade: self.per_decade,
            unbounded_threshold: self.unbounded_threshold,
            ratio_margin: self.ratio_margin,
            divergence_ratio: self.divergence_ratio,
            hn_tol: self.hn_tol,
            window: self.window,
            ..CriteriaOptions::default()
        }
    }
}

impl GapsSection {
    /// The explicit τ list, or a geometric grid from `tau_lo`, `tau_hi`, `tau_count`.
    pub fn tau_grid(&self) -> Vec<f64> {
        if let Some(t) = &self.taus {
            return t.clone();
        }
        match (self.tau_lo, self.tau_hi, self.tau_count) {
            (Some(lo), Some(hi), Some(n)) if n >= 2 => {
                (0..n).map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64)).collect()
            }
            (Some(lo), _, Some(1)) => vec![lo],
            _ => Vec::new(),
        }
    }

    pub fn options(&self, solver: SolverOptions) -> GapOptions {
        GapOptions {
            solver,
            z0: self.z0,
            level: self.level,
            horizon_cap: self.horizon_cap,
        }
    }
}

impl SpectralSection {
    pub fn options(&self, solver: SolverOptions) -> SpectralOptions {
        SpectralOptions {
            solver,
            eps: self.eps,
            window: self.window,
            knots: self.knots,
            cap_factor: self.cap_factor,
            fd_n: self.fd_n,
            fd_length: self.fd_length,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let file = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|e| ConfigError {
            file: file.clone(),
            line: None,
            field: None,
            message: e.to_string(),
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &file, &base)
    }

    /// Parse and validate config text. `file` labels diagnostics.
    pub fn parse(text: &str, file: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let mut cfg: Self = toml::from_str(text).map_err(|e| ConfigError {
            file: file.to_string(),
            line: e.span().map(|s| line_at(text, s.start)),
            field: None,
            message: e.message().trim().to_string(),
        })?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.source = text.to_string();
        cfg.file = file.to_string();
        cfg.validate()?;
        Ok(cfg)
    }

    /// Diagnostic for `field` (dotted path), located in the source if possible.
    pub fn error(&self, field: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            file: self.file.clone(),
            line: locate(&self.source, field),
            field: Some(field.to_string()),
            message: message.into(),
        }
    }

    pub fn solver_options(&self) -> SolverOptions {
        self.solver.options()
    }

    pub fn envelope(&self) -> Result<Option<GrowthEnvelope>, ConfigError> {
        match &self.envelope {
            None => Ok(None),
            Some(e) => e.build().map(Some).map_err(|x| self.error("envelope", x.to_string())),
        }
    }

    fn profile(&self, section: &str, spec: Option<&ProfileSpec>) -> Result<CoefficientProfile, ConfigError> {
        let spec = spec.ok_or_else(|| self.error(section, format!("missing [{section}] section")))?;
        let env = self.envelope()?;
        spec.build(&self.base_dir, env.as_ref())
            .map_err(|(f, m)| self.error(&format!("{section}.{f}"), m))
    }

    pub fn volume(&self) -> Result<CoefficientProfile, ConfigError> {
        self.profile("volume", self.volume.as_ref())
    }

    pub fn potential(&self) -> Result<CoefficientProfile, ConfigError> {
        self.profile("potential", self.potential.as_ref())
    }

    fn validate(&self) -> Result<(), ConfigError> {
        for (name, spec) in [("volume", &self.volume), ("potential", &self.potential)] {
            if let Some(s) = spec {
                s.check_fields()
                    .map_err(|(f, m)| self.error(&format!("{name}.{f}"), m))?;
                if s.family == "table" {
                    let p = self.base_dir.join(s.path.as_ref().expect("checked above"));
                    if !p.is_file() {
                        return Err(
                            self.error(&format!("{name}.path"), format!("table file {} not found", p.display()))
                        );
                    }
                }
            }
        }
        let s = &self.solver;
        let positive = [
            ("rel_tol", s.rel_tol),
            ("max_phase_step", s.max_phase_step),
            ("max_log_v_step", s.max_log_v_step),
            ("max_step", s.max_step),
            ("eps0", s.eps0),
            ("eps_floor", s.eps_floor),
            ("stability_tol", s.stability_tol),
            ("residual_tol", s.residual_tol),
            ("refine_tol", s.refine_tol),
            ("separation_floor", s.separation_floor),
            ("near_zero_mask", s.near_zero_mask),
        ];
        for (name, x) in positive {
            if let Some(x) = x {
                if !(x > 0.0) {
                    return Err(self.error(&format!("solver.{name}"), format!("must be positive, got {x}")));
                }
            }
        }
        if let Err(e) = self.solver_options().validate() {
            return Err(self.error("solver", e.to_string()));
        }
        self.positive("solve.z0", self.solve.z0)?;
        if let Some(h) = self.solve.horizon {
            self.positive("solve.horizon", h)?;
        }
        self.positive("solve.horizon_cap", self.solve.horizon_cap)?;
        if self.solve.stride == 0 {
            return Err(self.error("solve.stride", "must be at least 1"));
        }
        let c = &self.critical;
        self.positive("critical.t_lo", c.t_lo)?;
        if !(c.t_hi > c.t_lo) {
            return Err(self.error("critical.t_hi", format!("must exceed t_lo = {}", c.t_lo)));
        }
        if c.points_per_decade == 0 {
            return Err(self.error("critical.points_per_decade", "must be at least 1"));
        }
        if !(c.upper > c.t_hi) {
            return Err(self.error("critical.upper", "must exceed t_hi"));
        }
        let k = &self.criteria;
        self.positive("criteria.horizon", k.horizon)?;
        for (name, x) in [
            ("unbounded_threshold", k.unbounded_threshold),
            ("ratio_margin", k.ratio_margin),
            ("divergence_ratio", k.divergence_ratio),
            ("hn_tol", k.hn_tol),
            ("window", k.window),
        ] {
            self.positive(&format!("criteria.{name}"), x)?;
        }
        if let (Some(a), Some(b)) = (k.t_start, k.t_end) {
            if !(a > 0.0 && b > a) {
                return Err(self.error("criteria.t_end", "need 0 < t_start < t_end"));
            }
        }
        if k.t_start.is_some() && k.t_end.is_none() {
            return Err(self.error("criteria.t_start", "needs `t_end` as well"));
        }
        let g = &self.gaps;
        if g.taus.is_some() && (g.tau_lo.is_some() || g.tau_hi.is_some() || g.tau_count.is_some()) {
            return Err(self.error("gaps.taus", "give either `taus` or `tau_lo`/`tau_hi`/`tau_count`"));
        }
        if g.taus.is_some() || g.tau_lo.is_some() || g.tau_hi.is_some() || g.tau_count.is_some() {
            let field = if g.taus.is_some() { "gaps.taus" } else { "gaps.tau_lo" };
            self.grid(field, &g.tau_grid())?;
        }
        if let Some(c) = g.c {
            if !(c > 1.0) {
                return Err(self.error("gaps.c", format!("must exceed 1, got {c}")));
            }
        }
        self.positive("gaps.z0", g.z0)?;
        self.positive("gaps.level", g.level)?;
        self.positive("gaps.horizon_cap", g.horizon_cap)?;
        let sp = &self.spectral;
        if let Some(r) = &sp.r {
            self.grid("spectral.r", r)?;
        }
        if let Some(r) = &sp.index_r {
            self.grid("spectral.index_r", r)?;
        }
        for (name, x) in [
            ("a", sp.a),
            ("alpha", sp.alpha),
            ("eps", sp.eps),
            ("window", sp.window),
            ("cap_factor", sp.cap_factor),
            ("fd_length", sp.fd_length),
        ] {
            self.positive(&format!("spectral.{name}"), x)?;
        }
        if sp.fd_n < 16 {
            return Err(self.error("spectral.fd_n", "must be at least 16"));
        }
        if let Some(c) = sp.c {
            if !(c > 1.0) {
                return Err(self.error("spectral.c", format!("must exceed 1, got {c}")));
            }
        }
        Ok(())
    }

    fn positive(&self, field: &str, x: f64) -> Result<(), ConfigError> {
        if x > 0.0 {
            Ok(())
        } else {
            Err(self.error(field, format!("must be positive, got {x}")))
        }
    }

    fn grid(&self, field: &str, g: &[f64]) -> Result<(), ConfigError> {
        if g.is_empty() {
            return Err(self.error(field, "grid is empty or incompletely specified"));
        }
        if !g.iter().all(|x| *x > 0.0 && x.is_finite()) {
            return Err(self.error(field, "grid entries must be positive and finite"));
        }
        if !g.windows(2).all(|w| w[1] > w[0]) {
            return Err(self.error(field, "grid must be strictly increasing"));
        }
        Ok(())
    }
}

fn line_at(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line of `section.key` (or of the `[section]` header) in TOML source.
fn locate(src: &str, field: &str) -> Option<usize> {
    let (section, key) = match field.split_once('.') {
        Some((s, k)) => (s, k),
        None => ("", field),
    };
    let key = key.split(['[', '.']).next().unwrap_or(key);
    let mut current = String::new();
    let mut header = None;
    for (k, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
            if current == section {
                header = Some(k + 1);
            }
            continue;
        }
        if current == section {
            if let Some((lhs, _)) = line.split_once('=') {
                if lhs.trim() == key {
                    return Some(k + 1);
                }
            }
        }
        if section.is_empty() && current.is_empty() && line.starts_with(field) {
            return Some(k + 1);
        }
    }
    header
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
        ExperimentConfig::parse(text, "test.toml", Path::new("."))
    }

    #[test]
    fn negative_tolerance_is_located() {
        let e = parse("[volume]\nfamily = \"euclidean\"\nm = 3\n\n[solver]\nrel_tol = -1e-9\n").unwrap_err();
        assert_eq!(e.line, Some(6));
        assert_eq!(e.field.as_deref(), Some("solver.rel_tol"));
        assert!(e.to_string().starts_with("test.toml:6: field `solver.rel_tol`"));
    }

    #[test]
    fn unknown_key_and_type_errors_carry_lines() {
        let e = parse("[solve]\nz0 = 1\nhorizn = 5\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        assert!(e.message.contains("unknown field `horizn`"), "{}", e.message);
        let e = parse("[solve]\nhorizon = \"far\"\n").unwrap_err();
        assert_eq!(e.line, Some(2));
    }

    #[test]
    fn family_fields_are_checked() {
        let e = parse("[volume]\nfamily = \"euclidean\"\nm = 3\nalpha = 2\n").unwrap_err();
        assert_eq!((e.field.as_deref(), e.line), (Some("volume.alpha"), Some(4)));
        let e = parse("[potential]\nfamily = \"euler\"\n").unwrap_err();
        assert_eq!(e.field.as_deref(), Some("potential.h"));
        let e = parse("[volume]\nfamily = \"cone\"\n").unwrap_err();
        assert!(e.message.contains("unknown family"));
    }

    #[test]
    fn grids_must_be_sorted() {
        let e = parse("[gaps]\ntaus = [3.0, 2.0]\n").unwrap_err();
        assert_eq!(e.field.as_deref(), Some("gaps.taus"));
        let e = parse("[spectral]\nr = []\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        let ok = parse("[gaps]\ntau_lo = 10\ntau_hi = 100\ntau_count = 3\n").unwrap();
        let g = ok.gaps.tau_grid();
        assert!((g[1] - 10f64.powf(1.5)).abs() < 1e-12 && g[2] == 100.0);
    }

    #[test]
    fn missing_table_file() {
        let e = parse("[volume]\nfamily = \"table\"\npath = \"nope.txt\"\n").unwrap_err();
        assert_eq!(e.field.as_deref(), Some("volume.path"));
        assert!(e.message.contains("not found"));
    }

    #[test]
    fn builds_profiles() {
        let c = parse(
            "[volume]\nfamily = \"euclidean\"\nm = 3\njumps = [{ at = 2.0, ratio = 0.5 }]\n\
             [potential]\nfamily = \"euler\"\nh = 1.0\n",
        )
        .unwrap();
        let v = c.volume().unwrap();
        assert_eq!(v.jumps()[0].mid, 0.5 * (4.0 + 2.0));
        let a = c.potential().unwrap();
        assert_eq!(a.eval(0.5).unwrap(), 1.0);
        assert_eq!(a.eval(2.0).unwrap(), 0.25);
    }
}
