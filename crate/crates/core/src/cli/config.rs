//! Flat `key = value` run configuration with `#` comments. Command-line
//! `--key value` pairs override file entries.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::solver::Wavespeed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    ConvergeChannel,
    Cavity,
    ShockChannel,
    CylinderDemo,
    Custom,
}

impl Case {
    pub const ALL: [Case; 5] = [
        Case::ConvergeChannel,
        Case::Cavity,
        Case::ShockChannel,
        Case::CylinderDemo,
        Case::Custom,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Case::ConvergeChannel => "converge_channel",
            Case::Cavity => "cavity",
            Case::ShockChannel => "shock_channel",
            Case::CylinderDemo => "cylinder_demo",
            Case::Custom => "custom",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }

    /// `(N, K1D, Re, Ma, t_final)` defaults.
    fn defaults(&self) -> (usize, usize, f64, f64, f64) {
        match self {
            Case::ConvergeChannel => (3, 4, 50.0, 0.1, 0.5),
            Case::Cavity => (3, 8, 1000.0, 0.1, 1.0),
            Case::ShockChannel => (3, 8, 100.0, 1.5, 0.1),
            Case::CylinderDemo => (3, 1, 1.0e4, 1.5, 1.0),
            Case::Custom => (3, 1, 100.0, 0.3, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WallKind {
    Adiabatic,
    Isothermal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PenaltyMode {
    Scaled,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdentityMode {
    Off,
    Equality,
    Dissipative,
}

/// Boundary condition for one tag of a custom mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomBoundary {
    pub kind: String,
    pub u_wall: [f64; 2],
    pub t_wall: Option<f64>,
    /// Primitive `(rho, u1, u2, p)` for freestream boundaries.
    pub state: Option<[f64; 4]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case: Case,
    pub n: usize,
    pub k1d: usize,
    pub re: f64,
    pub ma: f64,
    pub pr: f64,
    pub gamma: f64,
    pub lambda_bulk: Option<f64>,
    pub boundary_penalty: bool,
    pub interior_penalty: bool,
    pub penalty_mode: PenaltyMode,
    pub penalty_value: f64,
    pub lax_friedrichs: bool,
    pub wavespeed: Wavespeed,
    pub t_final: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub dt_init: Option<f64>,
    pub dt_max: Option<f64>,
    pub diagnostics_stride: usize,
    pub output_dir: PathBuf,
    pub snapshot_times: Vec<f64>,
    pub wall: WallKind,
    pub t_wall: Option<f64>,
    /// Amplitude `A` of the lid heat entropy flow `g = A sin(4 pi x)`.
    pub heat_flow: f64,
    pub mesh_file: Option<PathBuf>,
    pub initial: Option<[f64; 4]>,
    pub boundary: BTreeMap<String, CustomBoundary>,
    pub identity_check: IdentityMode,
    pub identity_tol: f64,
}

impl RunConfig {
    /// Defaults for a case.
    pub fn for_case(case: Case) -> Self {
        let (n, k1d, re, ma, t_final) = case.defaults();
        Self {
            case,
            n,
            k1d,
            re,
            ma,
            pr: 0.72,
            gamma: 1.4,
            lambda_bulk: None,
            boundary_penalty: true,
            interior_penalty: true,
            penalty_mode: PenaltyMode::Scaled,
            penalty_value: 1.0,
            lax_friedrichs: true,
            wavespeed: Wavespeed::PerPoint,
            t_final,
            abs_tol: 1e-7,
            rel_tol: 1e-7,
            dt_init: None,
            dt_max: None,
            diagnostics_stride: 1,
            output_dir: PathBuf::from("output"),
            snapshot_times: Vec::new(),
            wall: WallKind::Adiabatic,
            t_wall: None,
            heat_flow: 0.0,
            mesh_file: None,
            initial: None,
            boundary: BTreeMap::new(),
            identity_check: IdentityMode::Off,
            identity_tol: 1e-10,
        }
    }

    /// Reads a config file and applies `--key value` overrides. A relative
    /// `mesh_file` from the file is taken relative to the file's directory.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?,
            None => String::new(),
        };
        let mut entries = parse_entries(&text)?;
        if let (Some(dir), Some((m, _))) =
            (path.and_then(Path::parent), entries.get_mut("mesh_file"))
        {
            if Path::new(m.as_str()).is_relative() {
                *m = dir.join(m.as_str()).display().to_string();
            }
        }
        for (k, v) in parse_overrides(overrides)? {
            entries.insert(k, (v, Source::Flag));
        }
        Self::from_entries(entries)
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        Self::from_entries(parse_entries(text)?)
    }

    fn from_entries(mut entries: BTreeMap<String, (String, Source)>) -> Result<Self> {
        let (case_str, case_src) = entries.remove("case").ok_or_else(|| {
            let names: Vec<_> = Case::ALL.iter().map(|c| c.name()).collect();
            Error::Config(format!(
                "missing required key: case (one of {})",
                names.join(", ")
            ))
        })?;
        let case = Case::parse(&case_str)
            .ok_or_else(|| case_src.error(format!("unknown case '{case_str}'")))?;
        let mut cfg = Self::for_case(case);
        let mut t_wall_src = None;
        let mut heat_src = None;
        let mut mesh_src = None;
        for (key, (value, src)) in &entries {
            let v = value.as_str();
            let err = |m: String| src.error(format!("{key}: {m}"));
            let float = || {
                v.parse::<f64>()
                    .map_err(|_| err(format!("expected a number, got '{v}'")))
            };
            let int = || {
                v.parse::<usize>()
                    .map_err(|_| err(format!("expected an integer, got '{v}'")))
            };
            let flag = || match v {
                "on" | "true" | "yes" => Ok(true),
                "off" | "false" | "no" => Ok(false),
                _ => Err(err(format!("expected on/off, got '{v}'"))),
            };
            match key.as_str() {
                "N" => cfg.n = int()?,
                "K1D" => cfg.k1d = int()?,
                "Re" => cfg.re = float()?,
                "Ma" => cfg.ma = float()?,
                "Pr" => cfg.pr = float()?,
                "gamma" => cfg.gamma = float()?,
                "lambda_bulk" => cfg.lambda_bulk = Some(float()?),
                "boundary_penalty" => cfg.boundary_penalty = flag()?,
                "interior_penalty" => cfg.interior_penalty = flag()?,
                "penalty_mode" => {
                    cfg.penalty_mode = match v {
                        "scaled" => PenaltyMode::Scaled,
                        "constant" => PenaltyMode::Constant,
                        _ => return Err(err(format!("expected scaled or constant, got '{v}'"))),
                    }
                }
                "penalty_value" => cfg.penalty_value = float()?,
                "lax_friedrichs" => cfg.lax_friedrichs = flag()?,
                "wavespeed" => {
                    cfg.wavespeed = match v {
                        "per_point" => Wavespeed::PerPoint,
                        "per_face" => Wavespeed::PerFace,
                        _ => return Err(err(format!("expected per_point or per_face, got '{v}'"))),
                    }
                }
                "t_final" => cfg.t_final = float()?,
                "abs_tol" => cfg.abs_tol = float()?,
                "rel_tol" => cfg.rel_tol = float()?,
                "dt_init" => cfg.dt_init = Some(float()?),
                "dt_max" => cfg.dt_max = Some(float()?),
                "diagnostics_stride" => cfg.diagnostics_stride = int()?,
                "output_dir" => cfg.output_dir = PathBuf::from(v),
                "snapshot_times" => cfg.snapshot_times = list(v, 0).map_err(err)?,
                "wall" => {
                    cfg.wall = match v {
                        "adiabatic" => WallKind::Adiabatic,
                        "isothermal" => WallKind::Isothermal,
                        _ => {
                            return Err(err(format!("expected adiabatic or isothermal, got '{v}'")))
                        }
                    }
                }
                "T_wall" => {
                    cfg.t_wall = Some(float()?);
                    t_wall_src = Some(*src);
                }
                "heat_flow" => {
                    cfg.heat_flow = float()?;
                    heat_src = Some(*src);
                }
                "mesh_file" => {
                    cfg.mesh_file = Some(PathBuf::from(v));
                    mesh_src = Some(*src);
                }
                "initial" => cfg.initial = Some(fixed::<4>(v).map_err(err)?),
                "identity_check" => {
                    cfg.identity_check = match v {
                        "off" => IdentityMode::Off,
                        "equality" => IdentityMode::Equality,
                        "dissipative" => IdentityMode::Dissipative,
                        _ => {
                            return Err(err(format!(
                                "expected off, equality or dissipative, got '{v}'"
                            )))
                        }
                    }
                }
                "identity_tol" => cfg.identity_tol = float()?,
                k if k.starts_with("bc.") => {
                    let rest = &k[3..];
                    let (tag, field) = match rest.split_once('.') {
                        Some((t, f)) => (t, Some(f)),
                        None => (rest, None),
                    };
                    if tag.is_empty() {
                        return Err(err("empty boundary tag".into()));
                    }
                    let b = cfg
                        .boundary
                        .entry(tag.to_string())
                        .or_insert_with(|| CustomBoundary {
                            kind: String::new(),
                            u_wall: [0.0; 2],
                            t_wall: None,
                            state: None,
                        });
                    match field {
                        None => {
                            crate::boundary::BoundaryKind::parse(v)
                                .map_err(|e| err(e.to_string()))?;
                            b.kind = v.to_string();
                        }
                        Some("u_wall") => b.u_wall = fixed::<2>(v).map_err(err)?,
                        Some("T_wall") => b.t_wall = Some(float()?),
                        Some("state") => b.state = Some(fixed::<4>(v).map_err(err)?),
                        Some(other) => {
                            return Err(err(format!("unknown boundary field '{other}'")))
                        }
                    }
                }
                _ => return Err(src.error(format!("unknown key '{key}'"))),
            }
        }
        for (tag, b) in &cfg.boundary {
            if b.kind.is_empty() {
                return Err(Error::Config(format!(
                    "boundary tag '{tag}' has no kind (set bc.{tag} = <kind>)"
                )));
            }
        }
        if cfg.t_wall.is_some() && !(cfg.case == Case::Cavity && cfg.wall == WallKind::Isothermal) {
            return Err(t_wall_src
                .unwrap_or(Source::Flag)
                .error("T_wall requires case = cavity with wall = isothermal".into()));
        }
        if cfg.heat_flow != 0.0 && !(cfg.case == Case::Cavity && cfg.wall == WallKind::Adiabatic) {
            return Err(heat_src
                .unwrap_or(Source::Flag)
                .error("heat_flow requires case = cavity with wall = adiabatic".into()));
        }
        if cfg.mesh_file.is_some() != (cfg.case == Case::Custom) {
            let src = mesh_src.unwrap_or(case_src);
            return Err(
                src.error("mesh_file is required for case = custom and only allowed there".into())
            );
        }
        if cfg.case == Case::Custom && cfg.initial.is_none() {
            return Err(Error::Config(
                "case = custom needs initial = rho,u1,u2,p".into(),
            ));
        }
        if cfg.case != Case::Custom && !cfg.boundary.is_empty() {
            return Err(Error::Config(
                "bc.<tag> entries are only allowed for case = custom".into(),
            ));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n < 1 {
            return bad("N must be at least 1".into());
        }
        if self.k1d < 1 {
            return bad("K1D must be at least 1".into());
        }
        for (name, v) in [
            ("Re", self.re),
            ("Ma", self.ma),
            ("Pr", self.pr),
            ("t_final", self.t_final),
            ("abs_tol", self.abs_tol),
            ("rel_tol", self.rel_tol),
            ("identity_tol", self.identity_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} = {v} must be positive"));
            }
        }
        if !(self.gamma > 1.0) {
            return bad(format!("gamma = {} must exceed 1", self.gamma));
        }
        if !(self.penalty_value >= 0.0) {
            return bad(format!(
                "penalty_value = {} must be nonnegative",
                self.penalty_value
            ));
        }
        if self.diagnostics_stride == 0 {
            return bad("diagnostics_stride must be at least 1".into());
        }
        if let Some(t) = self.t_wall {
            if !(t > 0.0) {
                return bad(format!("T_wall = {t} must be positive"));
            }
        }
        Ok(())
    }

    /// Effective configuration as re-parseable text.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let onoff = |b: bool| if b { "on" } else { "off" };
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("case", self.case.name().into());
        kv("N", self.n.to_string());
        kv("K1D", self.k1d.to_string());
        kv("Re", self.re.to_string());
        kv("Ma", self.ma.to_string());
        kv("Pr", self.pr.to_string());
        kv("gamma", self.gamma.to_string());
        if let Some(l) = self.lambda_bulk {
            kv("lambda_bulk", l.to_string());
        }
        kv("boundary_penalty", onoff(self.boundary_penalty).into());
        kv("interior_penalty", onoff(self.interior_penalty).into());
        kv(
            "penalty_mode",
            match self.penalty_mode {
                PenaltyMode::Scaled => "scaled",
                PenaltyMode::Constant => "constant",
            }
            .into(),
        );
        kv("penalty_value", self.penalty_value.to_string());
        kv("lax_friedrichs", onoff(self.lax_friedrichs).into());
        kv(
            "wavespeed",
            match self.wavespeed {
                Wavespeed::PerPoint => "per_point",
                Wavespeed::PerFace => "per_face",
            }
            .into(),
        );
        kv("t_final", self.t_final.to_string());
        kv("abs_tol", self.abs_tol.to_string());
        kv("rel_tol", self.rel_tol.to_string());
        if let Some(d) = self.dt_init {
            kv("dt_init", d.to_string());
        }
        if let Some(d) = self.dt_max {
            kv("dt_max", d.to_string());
        }
        kv("diagnostics_stride", self.diagnostics_stride.to_string());
        kv("output_dir", self.output_dir.display().to_string());
        if !self.snapshot_times.is_empty() {
            kv("snapshot_times", join(&self.snapshot_times));
        }
        kv(
            "wall",
            match self.wall {
                WallKind::Adiabatic => "adiabatic",
                WallKind::Isothermal => "isothermal",
            }
            .into(),
        );
        if let Some(t) = self.t_wall {
            kv("T_wall", t.to_string());
        }
        if self.heat_flow != 0.0 {
            kv("heat_flow", self.heat_flow.to_string());
        }
        if let Some(m) = &self.mesh_file {
            kv("mesh_file", m.display().to_string());
        }
        if let Some(u) = self.initial {
            kv("initial", join(&u));
        }
        for (tag, b) in &self.boundary {
            kv(&format!("bc.{tag}"), b.kind.clone());
            kv(&format!("bc.{tag}.u_wall"), join(&b.u_wall));
            if let Some(t) = b.t_wall {
                kv(&format!("bc.{tag}.T_wall"), t.to_string());
            }
            if let Some(st) = b.state {
                kv(&format!("bc.{tag}.state"), join(&st));
            }
        }
        kv(
            "identity_check",
            match self.identity_check {
                IdentityMode::Off => "off",
                IdentityMode::Equality => "equality",
                IdentityMode::Dissipative => "dissipative",
            }
            .into(),
        );
        kv("identity_tol", self.identity_tol.to_string());
        s
    }
}

fn join(v: &[f64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn list(v: &str, min: usize) -> std::result::Result<Vec<f64>, String> {
    let out: std::result::Result<Vec<f64>, _> = v
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse::<f64>)
        .collect();
    let out = out.map_err(|_| format!("expected a comma-separated list of numbers, got '{v}'"))?;
    if out.len() < min {
        return Err(format!("expected at least {min} values"));
    }
    Ok(out)
}

fn fixed<const M: usize>(v: &str) -> std::result::Result<[f64; M], String> {
    let l = list(v, 0)?;
    l.try_into()
        .map_err(|_| format!("expected {M} comma-separated numbers, got '{v}'"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Source {
    Line(usize),
    Flag,
}

impl Source {
    fn error(&self, message: String) -> Error {
        match *self {
            Source::Line(line) => Error::Parse { line, message },
            Source::Flag => Error::Config(format!("command-line override: {message}")),
        }
    }
}

fn parse_entries(text: &str) -> Result<BTreeMap<String, (String, Source)>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (k, v) = content.split_once('=').ok_or_else(|| Error::Parse {
            line,
            message: format!("expected key = value, got '{content}'"),
        })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(Error::Parse {
                line,
                message: "empty key".into(),
            });
        }
        if out
            .insert(k.to_string(), (v.to_string(), Source::Line(line)))
            .is_some()
        {
            return Err(Error::Parse {
                line,
                message: format!("duplicate key '{k}'"),
            });
        }
    }
    Ok(out)
}

/// `--key value` or `--key=value` pairs.
pub fn parse_overrides(args: &[String]) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let key = a
            .strip_prefix("--")
            .ok_or_else(|| Error::Config(format!("expected --key value, got '{a}'")))?;
        if let Some((k, v)) = key.split_once('=') {
            out.push((k.to_string(), v.to_string()));
        } else {
            let v = it
                .next()
                .ok_or_else(|| Error::Config(format!("missing value for --{key}")))?;
            out.push((key.to_string(), v.clone()));
        }
    }
    Ok(out)
}
