//! Sectioned key-value run configuration: parsing with line/column errors,
//! then validation that reports every problem at once with a field path.

use crate::expr::{parse_expr, Expr};
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Geometry,
    Lubricate,
    Shallow,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Geometry => "geometry",
            Model::Lubricate => "lubricate",
            Model::Shallow => "shallow",
        }
    }

    pub fn from_name(name: &str) -> Option<Model> {
        match name {
            "geometry" => Some(Model::Geometry),
            "lubricate" => Some(Model::Lubricate),
            "shallow" => Some(Model::Shallow),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}",
            self.line, self.column, self.message
        )
    }
}

#[derive(Clone, Debug)]
pub struct ValidationError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug)]
pub enum ConfigError {
    Io(std::io::Error),
    Parse(ParseError),
    Validation(Vec<ValidationError>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(e) => write!(f, "cannot read config: {e}"),
            ConfigError::Parse(e) => write!(f, "config parse error: {e}"),
            ConfigError::Validation(errors) => {
                writeln!(f, "invalid config ({} error(s)):", errors.len())?;
                for e in errors {
                    writeln!(f, "  - {e}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartKind {
    Plane,
    Cylinder,
    Sphere,
    Paraboloid,
    TranslatingPlane,
}

#[derive(Clone, Debug)]
pub struct ChartSpec {
    pub kind: ChartKind,
    pub radius: f64,
    pub a: f64,
    pub b: f64,
    pub speed: f64,
    pub orientation: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bc {
    Dirichlet,
    Periodic,
}

#[derive(Clone, Debug)]
pub struct GridSpec {
    pub n1: usize,
    pub n2: usize,
    pub xi1: Option<(f64, f64)>,
    pub xi2: Option<(f64, f64)>,
    pub bc1: Bc,
    pub bc2: Bc,
}

#[derive(Clone, Debug)]
pub struct GapSpec {
    pub h: Option<Expr>,
    pub h_file: Option<PathBuf>,
    pub dh_dt: Expr,
    pub floor: f64,
}

#[derive(Clone, Debug)]
pub struct PhysicsSpec {
    pub mu: f64,
    pub rho0: f64,
    pub nu: f64,
    pub c_r1: f64,
    /// Body force components; either in the local chart basis or Cartesian
    /// (projected onto the basis at runtime).
    pub body_force: [Expr; 3],
    pub body_force_cartesian: bool,
}

#[derive(Clone, Debug)]
pub struct LubricateSpec {
    pub v: [Expr; 2],
    pub w: [Expr; 2],
    pub p_boundary: Expr,
    pub rescaled: bool,
    pub eps: f64,
    pub t: f64,
    pub slices: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct ShallowSpec {
    pub pi0: Expr,
    pub v_init: [Expr; 2],
    pub t_end: f64,
    /// `None` selects the CFL-limited automatic step.
    pub dt: Option<f64>,
    pub output_every: usize,
    /// When set, state files report the physical gap `eps * h`; integration
    /// itself always runs in reference variables.
    pub output_scale_eps: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct SolverSpec {
    pub tol: f64,
    /// 0 selects an automatic limit from the system size.
    pub max_iter: usize,
}

#[derive(Clone, Debug)]
pub struct OutputSpec {
    pub dump_coefficients: bool,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub model: Model,
    pub out_dir: PathBuf,
    pub chart: ChartSpec,
    pub grid: GridSpec,
    pub gap: GapSpec,
    pub physics: PhysicsSpec,
    pub lubricate: LubricateSpec,
    pub shallow: ShallowSpec,
    pub solver: SolverSpec,
    pub output: OutputSpec,
}

/// Command-line overrides applied before validation.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub grid: Option<(usize, usize)>,
    pub tol: Option<f64>,
}

// ---------------------------------------------------------------------------
// Raw sectioned key-value parsing.

struct Entry {
    key: String,
    value: String,
    line: usize,
    value_column: usize,
}

struct Section {
    name: String,
    entries: Vec<Entry>,
}

struct Raw {
    sections: Vec<Section>,
}

impl Raw {
    fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.sections
            .iter()
            .find(|s| s.name == section)
            .and_then(|s| s.entries.iter().find(|e| e.key == key))
    }
}

fn parse_raw(text: &str) -> Result<Raw, ParseError> {
    let mut sections: Vec<Section> = Vec::new();
    for (line_idx, raw_line) in text.lines().enumerate() {
        let line_no = line_idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or(ParseError {
                line: line_no,
                column: line.len(),
                message: "section header missing ']'".into(),
            })?;
            let name = name.trim().to_string();
            if name.is_empty() {
                return Err(ParseError {
                    line: line_no,
                    column: 1,
                    message: "empty section name".into(),
                });
            }
            if sections.iter().any(|s| s.name == name) {
                return Err(ParseError {
                    line: line_no,
                    column: 1,
                    message: format!("duplicate section [{name}]"),
                });
            }
            sections.push(Section {
                name,
                entries: Vec::new(),
            });
            continue;
        }
        let eq = trimmed.find('=').ok_or(ParseError {
            line: line_no,
            column: 1,
            message: format!("expected 'key = value', found '{trimmed}'"),
        })?;
        let key = trimmed[..eq].trim().to_string();
        let value = trimmed[eq + 1..].trim().to_string();
        if key.is_empty() {
            return Err(ParseError {
                line: line_no,
                column: 1,
                message: "empty key".into(),
            });
        }
        let value_column = line.find('=').map(|p| p + 2).unwrap_or(1);
        let section = sections.last_mut().ok_or(ParseError {
            line: line_no,
            column: 1,
            message: format!("key '{key}' appears before any [section]"),
        })?;
        if section.entries.iter().any(|e| e.key == key) {
            return Err(ParseError {
                line: line_no,
                column: 1,
                message: format!("duplicate key '{key}' in [{}]", section.name),
            });
        }
        section.entries.push(Entry {
            key,
            value,
            line: line_no,
            value_column,
        });
    }
    Ok(Raw { sections })
}

// ---------------------------------------------------------------------------
// Typed extraction with accumulated validation errors.

struct Ctx<'r> {
    raw: &'r Raw,
    errors: Vec<ValidationError>,
}

impl<'r> Ctx<'r> {
    fn push(&mut self, section: &str, key: &str, message: impl Into<String>) {
        self.errors.push(ValidationError {
            path: format!("{section}.{key}"),
            message: message.into(),
        });
    }

    fn str(&mut self, section: &str, key: &str) -> Option<String> {
        self.raw.get(section, key).map(|e| e.value.clone())
    }

    fn f64(&mut self, section: &str, key: &str, default: f64) -> f64 {
        match self.raw.get(section, key) {
            None => default,
            Some(e) => match e.value.parse::<f64>() {
                Ok(v) => v,
                Err(_) => {
                    self.push(section, key, format!("not a number: '{}'", e.value));
                    default
                }
            },
        }
    }

    fn usize(&mut self, section: &str, key: &str, default: usize) -> usize {
        match self.raw.get(section, key) {
            None => default,
            Some(e) => match e.value.parse::<usize>() {
                Ok(v) => v,
                Err(_) => {
                    self.push(
                        section,
                        key,
                        format!("not a non-negative integer: '{}'", e.value),
                    );
                    default
                }
            },
        }
    }

    fn bool(&mut self, section: &str, key: &str, default: bool) -> bool {
        match self.raw.get(section, key) {
            None => default,
            Some(e) => match e.value.as_str() {
                "true" | "yes" | "on" => true,
                "false" | "no" | "off" => false,
                other => {
                    self.push(
                        section,
                        key,
                        format!("expected true/false, found '{other}'"),
                    );
                    default
                }
            },
        }
    }

    fn expr(&mut self, section: &str, key: &str, default: Expr) -> Expr {
        match self.raw.get(section, key) {
            None => default,
            Some(e) => match parse_expr(&e.value) {
                Ok(expr) => expr,
                Err(err) => {
                    self.push(
                        section,
                        key,
                        format!(
                            "expression error at line {} column {}: {}",
                            e.line,
                            e.value_column + err.column,
                            err.message
                        ),
                    );
                    default
                }
            },
        }
    }

    /// Comma-separated list of expressions with a fixed arity.
    fn expr_list<const N: usize>(
        &mut self,
        section: &str,
        key: &str,
        default: [Expr; N],
    ) -> [Expr; N] {
        let Some(e) = self.raw.get(section, key) else {
            return default;
        };
        let parts: Vec<&str> = split_top_level(&e.value);
        if parts.len() != N {
            self.push(
                section,
                key,
                format!("expected {N} comma-separated components"),
            );
            return default;
        }
        let mut out = default;
        for (k, part) in parts.iter().enumerate() {
            match parse_expr(part) {
                Ok(expr) => out[k] = expr,
                Err(err) => {
                    self.push(section, key, format!("component {}: {}", k + 1, err));
                }
            }
        }
        out
    }

    fn f64_pair(&mut self, section: &str, key: &str) -> Option<(f64, f64)> {
        let e = self.raw.get(section, key)?;
        let parts: Vec<&str> = e.value.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            self.push(section, key, "expected 'min, max'");
            return None;
        }
        match (parts[0].parse::<f64>(), parts[1].parse::<f64>()) {
            (Ok(a), Ok(b)) => {
                if b <= a {
                    self.push(section, key, "range must satisfy min < max");
                    None
                } else {
                    Some((a, b))
                }
            }
            _ => {
                self.push(section, key, "range endpoints must be numbers");
                None
            }
        }
    }

    fn bc(&mut self, section: &str, key: &str) -> Bc {
        match self.raw.get(section, key) {
            None => Bc::Dirichlet,
            Some(e) => match e.value.as_str() {
                "dirichlet" => Bc::Dirichlet,
                "periodic" => Bc::Periodic,
                other => {
                    self.push(
                        section,
                        key,
                        format!("expected dirichlet|periodic, found '{other}'"),
                    );
                    Bc::Dirichlet
                }
            },
        }
    }
}

/// Splits at top-level commas (commas inside parentheses belong to `pow`).
fn split_top_level(value: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (idx, c) in value.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(value[start..idx].trim());
                start = idx + 1;
            }
            _ => {}
        }
    }
    parts.push(value[start..].trim());
    parts
}

const KNOWN_KEYS: &[(&str, &[&str])] = &[
    ("run", &["model", "out"]),
    (
        "chart",
        &["name", "radius", "a", "b", "speed", "orientation"],
    ),
    ("grid", &["n1", "n2", "xi1", "xi2", "bc_xi1", "bc_xi2"]),
    ("gap", &["h", "h_file", "dh_dt", "floor"]),
    (
        "physics",
        &[
            "mu",
            "rho0",
            "nu",
            "c_r1",
            "body_force",
            "body_force_cartesian",
        ],
    ),
    (
        "lubricate",
        &["v", "w", "p_boundary", "rescaled", "eps", "t", "slices"],
    ),
    (
        "shallow",
        &[
            "pi0",
            "v_init",
            "t_end",
            "dt",
            "output_every",
            "output_scale_eps",
            "prescribed_h",
        ],
    ),
    ("solver", &["tol", "max_iter"]),
    ("output", &["dump_coefficients"]),
];

pub fn parse_config(
    path: &Path,
    model: Model,
    overrides: &Overrides,
) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(ConfigError::Io)?;
    parse_config_str(&text, model, overrides, path.parent())
}

pub fn parse_config_str(
    text: &str,
    model: Model,
    overrides: &Overrides,
    base_dir: Option<&Path>,
) -> Result<RunConfig, ConfigError> {
    let raw = parse_raw(text).map_err(ConfigError::Parse)?;
    let mut ctx = Ctx {
        raw: &raw,
        errors: Vec::new(),
    };

    // Unknown sections and keys are hard validation errors.
    for section in &raw.sections {
        match KNOWN_KEYS.iter().find(|(name, _)| *name == section.name) {
            None => ctx.errors.push(ValidationError {
                path: section.name.clone(),
                message: "unknown section".into(),
            }),
            Some((_, keys)) => {
                for entry in &section.entries {
                    if !keys.contains(&entry.key.as_str()) {
                        ctx.push(
                            &section.name,
                            &entry.key,
                            format!("unknown key (line {})", entry.line),
                        );
                    }
                }
            }
        }
    }

    // [run]
    if let Some(m) = ctx.str("run", "model") {
        match Model::from_name(&m) {
            Some(declared) if declared != model => ctx.push(
                "run",
                "model",
                format!(
                    "config declares '{m}' but the '{}' subcommand was invoked",
                    model.name()
                ),
            ),
            Some(_) => {}
            None => ctx.push("run", "model", format!("unknown model '{m}'")),
        }
    }
    let out_dir = overrides
        .out_dir
        .clone()
        .or_else(|| ctx.str("run", "out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));

    // [chart]
    let kind = match ctx.str("chart", "name").as_deref() {
        Some("plane") => ChartKind::Plane,
        Some("cylinder") => ChartKind::Cylinder,
        Some("sphere") => ChartKind::Sphere,
        Some("paraboloid") => ChartKind::Paraboloid,
        Some("translating-plane") => ChartKind::TranslatingPlane,
        Some(other) => {
            ctx.push(
                "chart",
                "name",
                format!("unknown chart '{other}' (plane, cylinder, sphere, paraboloid, translating-plane)"),
            );
            ChartKind::Plane
        }
        None => {
            ctx.push("chart", "name", "missing (required)");
            ChartKind::Plane
        }
    };
    let radius = ctx.f64("chart", "radius", 1.0);
    if radius <= 0.0 {
        ctx.push("chart", "radius", "must be positive");
    }
    let orientation = ctx.f64("chart", "orientation", 1.0);
    if orientation != 1.0 && orientation != -1.0 {
        ctx.push("chart", "orientation", "must be +1 or -1");
    }
    let chart = ChartSpec {
        kind,
        radius,
        a: ctx.f64("chart", "a", 1.0),
        b: ctx.f64("chart", "b", 1.0),
        speed: ctx.f64("chart", "speed", 1.0),
        orientation,
    };

    // [grid]
    let n1 = ctx.usize("grid", "n1", 0);
    let n2 = ctx.usize("grid", "n2", 0);
    let (n1, n2) = overrides.grid.unwrap_or((n1, n2));
    if n1 < 3 {
        ctx.push("grid", "n1", "need at least 3 nodes");
    }
    if n2 < 3 {
        ctx.push("grid", "n2", "need at least 3 nodes");
    }
    let grid = GridSpec {
        n1,
        n2,
        xi1: ctx.f64_pair("grid", "xi1"),
        xi2: ctx.f64_pair("grid", "xi2"),
        bc1: ctx.bc("grid", "bc_xi1"),
        bc2: ctx.bc("grid", "bc_xi2"),
    };

    // [gap]
    let gap_expr = if ctx.raw.get("gap", "h").is_some() {
        Some(ctx.expr("gap", "h", Expr::zero()))
    } else {
        None
    };
    let h_file = ctx.str("gap", "h_file").map(|f| {
        let p = PathBuf::from(&f);
        match base_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p,
        }
    });
    if let Some(file) = &h_file {
        if gap_expr.is_some() {
            ctx.push(
                "gap",
                "h_file",
                "give either 'h' (expression) or 'h_file', not both",
            );
        }
        if !file.exists() {
            ctx.push(
                "gap",
                "h_file",
                format!("referenced file does not exist: {}", file.display()),
            );
        }
    }
    let floor = ctx.f64("gap", "floor", 1e-9);
    if floor <= 0.0 {
        ctx.push("gap", "floor", "must be positive");
    }
    let gap = GapSpec {
        h: gap_expr,
        h_file,
        dh_dt: ctx.expr("gap", "dh_dt", Expr::zero()),
        floor,
    };
    let needs_gap = model != Model::Geometry || ctx.bool("output", "dump_coefficients", false);
    if needs_gap && gap.h.is_none() && gap.h_file.is_none() {
        ctx.push("gap", "h", "missing (required for this mode)");
    }

    // [physics]
    let mu = ctx.f64("physics", "mu", 1.0);
    if model == Model::Lubricate && mu <= 0.0 {
        ctx.push("physics", "mu", "dynamic viscosity must be positive");
    }
    let rho0 = ctx.f64("physics", "rho0", 1.0);
    let nu = ctx.f64("physics", "nu", 1.0);
    if model == Model::Shallow {
        if rho0 <= 0.0 {
            ctx.push("physics", "rho0", "density must be positive");
        }
        if nu <= 0.0 {
            ctx.push("physics", "nu", "kinematic viscosity must be positive");
        }
    }
    let c_r1 = ctx.f64("physics", "c_r1", 0.0);
    if c_r1 < 0.0 {
        ctx.push(
            "physics",
            "c_r1",
            "friction coefficient must be non-negative",
        );
    }
    let physics = PhysicsSpec {
        mu,
        rho0,
        nu,
        c_r1,
        body_force: ctx.expr_list(
            "physics",
            "body_force",
            [Expr::zero(), Expr::zero(), Expr::zero()],
        ),
        body_force_cartesian: ctx.bool("physics", "body_force_cartesian", false),
    };

    // [lubricate]
    let rescaled = ctx.bool("lubricate", "rescaled", false);
    let eps = ctx.f64("lubricate", "eps", 0.1);
    if rescaled && eps <= 0.0 {
        ctx.push(
            "lubricate",
            "eps",
            "must be positive when rescaled output is requested",
        );
    }
    let mut slices = vec![0.0, 0.5, 1.0];
    if let Some(e) = ctx.raw.get("lubricate", "slices") {
        let mut parsed = Vec::new();
        for part in e.value.split(',') {
            match part.trim().parse::<f64>() {
                Ok(v) if (0.0..=1.0).contains(&v) => parsed.push(v),
                _ => {
                    ctx.push("lubricate", "slices", "entries must be numbers in [0, 1]");
                    parsed.clear();
                    break;
                }
            }
        }
        if !parsed.is_empty() {
            slices = parsed;
        }
    }
    let lubricate = LubricateSpec {
        v: ctx.expr_list("lubricate", "v", [Expr::zero(), Expr::zero()]),
        w: ctx.expr_list("lubricate", "w", [Expr::zero(), Expr::zero()]),
        p_boundary: ctx.expr("lubricate", "p_boundary", Expr::zero()),
        rescaled,
        eps,
        t: ctx.f64("lubricate", "t", 0.0),
        slices,
    };

    // [shallow]
    if ctx.raw.get("shallow", "prescribed_h").is_some() {
        ctx.push(
            "shallow",
            "prescribed_h",
            "prescribing the gap and treating the applied pressure as the unknown is an \
             inverse problem this solver does not support; prescribe tractions and initial \
             gap instead",
        );
    }
    let t_end = ctx.f64("shallow", "t_end", 0.0);
    if model == Model::Shallow && t_end <= 0.0 {
        ctx.push("shallow", "t_end", "must be positive");
    }
    let dt = match ctx.str("shallow", "dt").as_deref() {
        None | Some("auto") => None,
        Some(v) => match v.parse::<f64>() {
            Ok(x) if x > 0.0 => Some(x),
            _ => {
                ctx.push("shallow", "dt", "must be 'auto' or a positive number");
                None
            }
        },
    };
    let output_every = ctx.usize("shallow", "output_every", 10);
    if output_every == 0 {
        ctx.push("shallow", "output_every", "must be at least 1");
    }
    let output_scale_eps = match ctx.raw.get("shallow", "output_scale_eps") {
        None => None,
        Some(_) => {
            let v = ctx.f64("shallow", "output_scale_eps", 1.0);
            if v <= 0.0 {
                ctx.push("shallow", "output_scale_eps", "must be positive");
                None
            } else {
                Some(v)
            }
        }
    };
    let shallow = ShallowSpec {
        pi0: ctx.expr("shallow", "pi0", Expr::zero()),
        v_init: ctx.expr_list("shallow", "v_init", [Expr::zero(), Expr::zero()]),
        t_end,
        dt,
        output_every,
        output_scale_eps,
    };

    // [solver]
    let tol = overrides
        .tol
        .unwrap_or_else(|| ctx.f64("solver", "tol", 1e-10));
    if tol <= 0.0 || tol >= 1.0 {
        ctx.push("solver", "tol", "must lie in (0, 1)");
    }
    let solver = SolverSpec {
        tol,
        max_iter: ctx.usize("solver", "max_iter", 0),
    };

    let output = OutputSpec {
        dump_coefficients: ctx.bool("output", "dump_coefficients", false),
    };

    // Boundary-condition coherence for the solvers.
    if model == Model::Lubricate && grid.bc1 == Bc::Periodic && grid.bc2 == Bc::Periodic {
        ctx.errors.push(ValidationError {
            path: "grid.bc_xi1".into(),
            message: "the pressure problem needs at least one Dirichlet edge \
                      (an all-periodic operator is singular up to a constant)"
                .into(),
        });
    }

    if ctx.errors.is_empty() {
        Ok(RunConfig {
            model,
            out_dir,
            chart,
            grid,
            gap,
            physics,
            lubricate,
            shallow,
            solver,
            output,
        })
    } else {
        Err(ConfigError::Validation(ctx.errors))
    }
}
