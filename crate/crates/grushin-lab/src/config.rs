//! Flat `key = value` experiment configurations.
//!
//! One assignment per line, `#` starts a comment, unknown or inapplicable
//! keys are hard errors. The full schema (keys per experiment kind) is
//! documented in `docs/config_schema.md` at the repository root; sources and
//! exponent fields come from a small closed-form catalog rather than an
//! expression language.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::geometry::Domain;
use crate::operator::Field;
use crate::report::fmt_f64;
use crate::semilinear::Exponent;

#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {}, field '{}': {}", line, self.field, self.message),
            None => write!(f, "field '{}': {}", self.field, self.message),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("invalid config:\n{}", .0.iter().map(|e| format!("  - {e}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<FieldError>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Manufactured,
    SequenceStudy,
    RegularitySweep,
    ScalingCheck,
    VariableExponent,
    UniquenessProbe,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Manufactured => "manufactured",
            ExperimentKind::SequenceStudy => "sequence_study",
            ExperimentKind::RegularitySweep => "regularity_sweep",
            ExperimentKind::ScalingCheck => "scaling_check",
            ExperimentKind::VariableExponent => "variable_exponent",
            ExperimentKind::UniquenessProbe => "uniqueness_probe",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "manufactured" => Some(ExperimentKind::Manufactured),
            "sequence_study" => Some(ExperimentKind::SequenceStudy),
            "regularity_sweep" => Some(ExperimentKind::RegularitySweep),
            "scaling_check" => Some(ExperimentKind::ScalingCheck),
            "variable_exponent" => Some(ExperimentKind::VariableExponent),
            "uniqueness_probe" => Some(ExperimentKind::UniquenessProbe),
            _ => None,
        }
    }
}

/// Closed-form source catalog.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceSpec {
    /// `f = value`
    Constant { value: f64 },
    /// `f = value * |X|^{-gamma}` (unbounded at the origin for gamma > 0;
    /// the truncation `min{f, n}` caps it)
    RadialPower { value: f64, gamma: f64 },
    /// `f = value * sin(pi (x-ax)/Lx) * sin(pi (y-ay)/Ly)`
    ProductOfSines { value: f64 },
    /// `f = value` inside the closed sub-rectangle, 0 outside
    Indicator { value: f64, rect: Domain },
}

impl SourceSpec {
    pub fn field(&self, grid: &crate::geometry::Grid) -> Field {
        match self {
            SourceSpec::Constant { value } => Field::constant(grid, *value),
            SourceSpec::RadialPower { value, gamma } => Field::from_fn(grid, |x, y| {
                value * (x * x + y * y).sqrt().powf(-gamma)
            }),
            SourceSpec::ProductOfSines { value } => {
                let d = grid.domain;
                Field::from_fn(grid, |x, y| {
                    let sx = (std::f64::consts::PI * (x - d.ax) / d.width()).sin().max(0.0);
                    let sy = (std::f64::consts::PI * (y - d.ay) / d.height()).sin().max(0.0);
                    value * sx * sy
                })
            }
            SourceSpec::Indicator { value, rect } => Field::from_fn(grid, |x, y| {
                if rect.contains(x, y) {
                    *value
                } else {
                    0.0
                }
            }),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            SourceSpec::Constant { .. } => "constant",
            SourceSpec::RadialPower { .. } => "radial_power",
            SourceSpec::ProductOfSines { .. } => "product_of_sines",
            SourceSpec::Indicator { .. } => "indicator",
        }
    }
}

/// Exponent catalog: a constant `ν` or the two-zone field of the variable
/// exponent study (`nu_inside` on a compact sub-rectangle K, `nu_outside`
/// elsewhere).
#[derive(Debug, Clone, PartialEq)]
pub enum NuSpec {
    Constant(f64),
    TwoZone { inside: f64, outside: f64, zone: Domain },
}

impl NuSpec {
    pub fn exponent(&self, grid: &crate::geometry::Grid) -> Exponent {
        match self {
            NuSpec::Constant(nu) => Exponent::Constant(*nu),
            NuSpec::TwoZone { inside, outside, zone } => {
                Exponent::Variable(Field::from_fn(grid, |x, y| {
                    if zone.contains(x, y) {
                        *inside
                    } else {
                        *outside
                    }
                }))
            }
        }
    }
}

/// Parsed and validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub domain: Domain,
    /// One grid or a refinement ladder of `(nx, ny)` node counts.
    pub grids: Vec<(usize, usize)>,
    pub lambda: f64,
    pub nu: Option<NuSpec>,
    pub source: Option<SourceSpec>,
    pub n: Option<u64>,
    pub n_list: Option<Vec<u64>>,
    pub t: Option<f64>,
    pub scaling_tol: f64,
    pub window: Option<Domain>,
    pub picard_tol: f64,
    pub picard_maxiter: usize,
    pub relaxation: Option<f64>,
    pub linear_tol: f64,
    pub out: Option<String>,
}

const ALL_KEYS: &[&str] = &[
    "kind", "ax", "bx", "ay", "by", "nx", "ny", "ladder", "lambda", "nu", "nu_kind",
    "nu_inside", "nu_outside", "zone_ax", "zone_bx", "zone_ay", "zone_by", "source",
    "source_value", "gamma", "src_ax", "src_bx", "src_ay", "src_by", "n", "n_list", "t",
    "scaling_tol", "window_ax", "window_bx", "window_ay", "window_by", "picard_tol",
    "picard_maxiter", "relaxation", "linear_tol", "out",
];

struct Entries {
    map: BTreeMap<String, (usize, String)>,
    consumed: std::collections::BTreeSet<String>,
    errors: Vec<FieldError>,
}

impl Entries {
    fn err(&mut self, line: Option<usize>, field: &str, message: impl Into<String>) {
        self.errors.push(FieldError { line, field: field.to_string(), message: message.into() });
    }

    fn raw(&mut self, key: &str) -> Option<(usize, String)> {
        self.consumed.insert(key.to_string());
        self.map.get(key).cloned()
    }

    fn opt_f64(&mut self, key: &str) -> Option<(usize, f64)> {
        let (line, value) = self.raw(key)?;
        match value.parse::<f64>() {
            Ok(v) => Some((line, v)),
            Err(_) => {
                self.err(Some(line), key, format!("expected a number, got '{value}'"));
                None
            }
        }
    }

    fn req_f64(&mut self, key: &str) -> Option<(usize, f64)> {
        if self.map.contains_key(key) {
            self.opt_f64(key)
        } else {
            self.err(None, key, "required field is missing");
            self.consumed.insert(key.to_string());
            None
        }
    }

    fn opt_usize(&mut self, key: &str) -> Option<(usize, usize)> {
        let (line, value) = self.raw(key)?;
        match value.parse::<usize>() {
            Ok(v) => Some((line, v)),
            Err(_) => {
                self.err(Some(line), key, format!("expected a nonnegative integer, got '{value}'"));
                None
            }
        }
    }

    fn opt_u64(&mut self, key: &str) -> Option<(usize, u64)> {
        let (line, value) = self.raw(key)?;
        match value.parse::<u64>() {
            Ok(v) => Some((line, v)),
            Err(_) => {
                self.err(Some(line), key, format!("expected a nonnegative integer, got '{value}'"));
                None
            }
        }
    }

    fn opt_list_u64(&mut self, key: &str) -> Option<(usize, Vec<u64>)> {
        let (line, value) = self.raw(key)?;
        let mut out = Vec::new();
        for part in value.split(',') {
            match part.trim().parse::<u64>() {
                Ok(v) => out.push(v),
                Err(_) => {
                    self.err(
                        Some(line),
                        key,
                        format!("expected a comma-separated integer list, got '{value}'"),
                    );
                    return None;
                }
            }
        }
        Some((line, out))
    }

    fn opt_list_usize(&mut self, key: &str) -> Option<(usize, Vec<usize>)> {
        let (line, list) = self.opt_list_u64(key)?;
        Some((line, list.into_iter().map(|v| v as usize).collect()))
    }

    fn opt_str(&mut self, key: &str) -> Option<(usize, String)> {
        self.raw(key)
    }

    fn rect(&mut self, keys: [&str; 4], what: &str, required: bool) -> Option<Domain> {
        let present = keys.iter().any(|k| self.map.contains_key(*k));
        if !present && !required {
            for k in keys {
                self.consumed.insert(k.to_string());
            }
            return None;
        }
        let mut vals = [0.0f64; 4];
        let mut ok = true;
        for (slot, key) in vals.iter_mut().zip(keys) {
            match if required { self.req_f64(key) } else { self.opt_f64(key) } {
                Some((_, v)) => *slot = v,
                None => {
                    if !required && !self.map.contains_key(key) {
                        self.err(None, key, format!("all four {what} bounds must be given together"));
                    }
                    ok = false;
                }
            }
        }
        if !ok {
            return None;
        }
        match Domain::new(vals[0], vals[1], vals[2], vals[3]) {
            Ok(d) => Some(d),
            Err(e) => {
                self.err(None, keys[0], format!("invalid {what} rectangle: {e}"));
                None
            }
        }
    }
}

fn lex(text: &str) -> Entries {
    let mut errors = Vec::new();
    let mut map = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let Some(eq) = line.find('=') else {
            errors.push(FieldError {
                line: Some(line_no),
                field: line.to_string(),
                message: "expected 'key = value'".to_string(),
            });
            continue;
        };
        let key = line[..eq].trim().to_string();
        let value = line[eq + 1..].trim().to_string();
        if key.is_empty() || value.is_empty() {
            errors.push(FieldError {
                line: Some(line_no),
                field: key.clone(),
                message: "expected 'key = value'".to_string(),
            });
            continue;
        }
        if !ALL_KEYS.contains(&key.as_str()) {
            errors.push(FieldError {
                line: Some(line_no),
                field: key.clone(),
                message: "unknown key".to_string(),
            });
            continue;
        }
        if map.insert(key.clone(), (line_no, value)).is_some() {
            errors.push(FieldError {
                line: Some(line_no),
                field: key,
                message: "duplicate key".to_string(),
            });
        }
    }
    Entries { map, consumed: Default::default(), errors }
}

fn parse_source(e: &mut Entries) -> Option<SourceSpec> {
    let value = e.opt_f64("source_value").map(|(_, v)| v).unwrap_or(1.0);
    let Some((line, name)) = e.opt_str("source") else {
        e.err(None, "source", "required field is missing");
        // consume dependent keys so they do not double-report
        e.raw("gamma");
        e.rect(["src_ax", "src_bx", "src_ay", "src_by"], "source", false);
        return None;
    };
    if !(value > 0.0) || !value.is_finite() {
        e.err(None, "source_value", format!("must be a positive number, got {value}"));
    }
    let spec = match name.as_str() {
        "constant" => Some(SourceSpec::Constant { value }),
        "radial_power" => {
            let gamma = match e.raw("gamma") {
                Some((gline, gv)) => match gv.parse::<f64>() {
                    Ok(g) if g >= 0.0 => Some(g),
                    Ok(g) => {
                        e.err(Some(gline), "gamma", format!("must be >= 0, got {g}"));
                        None
                    }
                    Err(_) => {
                        e.err(Some(gline), "gamma", format!("expected a number, got '{gv}'"));
                        None
                    }
                },
                None => {
                    e.err(None, "gamma", "required for source = radial_power");
                    None
                }
            };
            gamma.map(|gamma| SourceSpec::RadialPower { value, gamma })
        }
        "product_of_sines" => Some(SourceSpec::ProductOfSines { value }),
        "indicator" => e
            .rect(["src_ax", "src_bx", "src_ay", "src_by"], "source indicator", true)
            .map(|rect| SourceSpec::Indicator { value, rect }),
        other => {
            e.err(
                Some(line),
                "source",
                format!("unknown source '{other}' (expected constant, radial_power, product_of_sines or indicator)"),
            );
            None
        }
    };
    if !matches!(name.as_str(), "radial_power") {
        if let Some((gline, _)) = e.raw("gamma") {
            e.err(Some(gline), "gamma", "only applies to source = radial_power");
        }
    }
    if !matches!(name.as_str(), "indicator") {
        if e.map.contains_key("src_ax")
            || e.map.contains_key("src_bx")
            || e.map.contains_key("src_ay")
            || e.map.contains_key("src_by")
        {
            e.err(None, "src_ax", "src_* bounds only apply to source = indicator");
        }
        for k in ["src_ax", "src_bx", "src_ay", "src_by"] {
            e.consumed.insert(k.to_string());
        }
    }
    spec
}

fn parse_constant_nu(e: &mut Entries) -> Option<NuSpec> {
    if let Some((kline, kindv)) = e.opt_str("nu_kind") {
        if kindv != "constant" {
            e.err(Some(kline), "nu_kind", "this experiment kind needs a constant exponent");
        }
    }
    match e.req_f64("nu") {
        Some((_, nu)) if nu > 0.0 && nu.is_finite() => Some(NuSpec::Constant(nu)),
        Some((line, nu)) => {
            e.err(Some(line), "nu", format!("must be > 0, got {nu}"));
            None
        }
        None => None,
    }
}

fn parse_two_zone_nu(e: &mut Entries) -> Option<NuSpec> {
    match e.opt_str("nu_kind") {
        Some((line, v)) if v != "two_zone" => {
            e.err(Some(line), "nu_kind", "variable_exponent experiments need nu_kind = two_zone");
            return None;
        }
        None => {
            e.err(None, "nu_kind", "required field is missing (expected nu_kind = two_zone)");
            return None;
        }
        _ => {}
    }
    let inside = e.req_f64("nu_inside");
    let outside = e.req_f64("nu_outside");
    let zone = e.rect(["zone_ax", "zone_bx", "zone_ay", "zone_by"], "exponent zone", true);
    let (inside, outside, zone) = (inside?, outside?, zone?);
    let mut ok = true;
    if !(inside.1 > 0.0) {
        e.err(Some(inside.0), "nu_inside", format!("must be > 0, got {}", inside.1));
        ok = false;
    }
    if !(outside.1 > 0.0) {
        e.err(Some(outside.0), "nu_outside", format!("must be > 0, got {}", outside.1));
        ok = false;
    }
    ok.then_some(NuSpec::TwoZone { inside: inside.1, outside: outside.1, zone })
}

fn parse_single_grid(e: &mut Entries) -> Option<Vec<(usize, usize)>> {
    if let Some((line, _)) = e.raw("ladder") {
        e.err(Some(line), "ladder", "this experiment kind takes a single grid (nx, ny)");
    }
    let nx = match e.opt_usize("nx") {
        Some(v) => Some(v),
        None => {
            if !e.map.contains_key("nx") {
                e.err(None, "nx", "required field is missing");
            }
            None
        }
    };
    let ny = match e.opt_usize("ny") {
        Some(v) => Some(v),
        None => {
            if !e.map.contains_key("ny") {
                e.err(None, "ny", "required field is missing");
            }
            None
        }
    };
    let ((lx, nx), (ly, ny)) = (nx?, ny?);
    let mut ok = true;
    if nx < 3 {
        e.err(Some(lx), "nx", format!("must be >= 3, got {nx}"));
        ok = false;
    }
    if ny < 3 {
        e.err(Some(ly), "ny", format!("must be >= 3, got {ny}"));
        ok = false;
    }
    ok.then_some(vec![(nx, ny)])
}

fn parse_ladder(e: &mut Entries) -> Option<Vec<(usize, usize)>> {
    for key in ["nx", "ny"] {
        if let Some((line, _)) = e.raw(key) {
            e.err(Some(line), key, "this experiment kind takes 'ladder', not a single grid");
        }
    }
    let Some((line, list)) = e.opt_list_usize("ladder") else {
        if !e.map.contains_key("ladder") {
            e.err(None, "ladder", "required field is missing");
        }
        return None;
    };
    if list.is_empty() || list.iter().any(|&v| v < 3) {
        e.err(Some(line), "ladder", "entries must all be >= 3");
        return None;
    }
    if list.windows(2).any(|w| w[0] >= w[1]) {
        e.err(Some(line), "ladder", "entries must be strictly increasing");
        return None;
    }
    Some(list.into_iter().map(|v| (v, v)).collect())
}

fn parse_n_list(e: &mut Entries, required: bool) -> Option<Vec<u64>> {
    let Some((line, list)) = e.opt_list_u64("n_list") else {
        if required && !e.map.contains_key("n_list") {
            e.err(None, "n_list", "required field is missing");
        }
        return None;
    };
    if list.is_empty() || list.iter().any(|&v| v < 1) {
        e.err(Some(line), "n_list", "entries must all be >= 1");
        return None;
    }
    if list.windows(2).any(|w| w[0] >= w[1]) {
        e.err(Some(line), "n_list", "entries must be strictly increasing");
        return None;
    }
    Some(list)
}

/// Parse and validate a config text; on failure every detected problem is
/// reported with its field name and, where available, line number.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut e = lex(text);

    let kind = match e.opt_str("kind") {
        Some((line, v)) => match ExperimentKind::parse(&v) {
            Some(k) => Some(k),
            None => {
                e.err(Some(line), "kind", format!("unknown experiment kind '{v}'"));
                None
            }
        },
        None => {
            e.err(None, "kind", "required field is missing");
            None
        }
    };

    let domain = e.rect(["ax", "bx", "ay", "by"], "domain", true);

    let lambda = match e.req_f64("lambda") {
        Some((line, v)) => {
            if v >= 0.0 && v.is_finite() {
                Some(v)
            } else {
                e.err(Some(line), "lambda", format!("must be >= 0, got {v}"));
                None
            }
        }
        None => None,
    };

    let picard_tol = match e.opt_f64("picard_tol") {
        Some((line, v)) if !(v > 0.0) => {
            e.err(Some(line), "picard_tol", format!("must be > 0, got {v}"));
            1e-9
        }
        Some((_, v)) => v,
        None => 1e-9,
    };
    let linear_tol = match e.opt_f64("linear_tol") {
        Some((line, v)) if !(v > 0.0) => {
            e.err(Some(line), "linear_tol", format!("must be > 0, got {v}"));
            1e-12
        }
        Some((_, v)) => v,
        None => 1e-12,
    };
    let picard_maxiter = e.opt_usize("picard_maxiter").map(|(_, v)| v).unwrap_or(2000);
    let relaxation = match e.opt_f64("relaxation") {
        Some((line, v)) => {
            if v > 0.0 && v <= 1.0 {
                Some(v)
            } else {
                e.err(Some(line), "relaxation", format!("must lie in (0, 1], got {v}"));
                None
            }
        }
        None => None,
    };
    let out = e.opt_str("out").map(|(_, v)| v);
    let scaling_tol = match e.opt_f64("scaling_tol") {
        Some((line, v)) if !(v > 0.0) => {
            e.err(Some(line), "scaling_tol", format!("must be > 0, got {v}"));
            1e-3
        }
        Some((_, v)) => v,
        None => 1e-3,
    };

    let mut grids = None;
    let mut nu = None;
    let mut source = None;
    let mut n = None;
    let mut n_list = None;
    let mut t = None;
    let mut window = None;

    if let Some(kind) = kind {
        match kind {
            ExperimentKind::Manufactured => {
                grids = parse_ladder(&mut e);
            }
            ExperimentKind::SequenceStudy => {
                grids = parse_single_grid(&mut e);
                nu = parse_constant_nu(&mut e);
                source = parse_source(&mut e);
                n_list = parse_n_list(&mut e, true);
                window = e.rect(["window_ax", "window_bx", "window_ay", "window_by"], "window", true);
            }
            ExperimentKind::RegularitySweep => {
                grids = parse_ladder(&mut e);
                nu = parse_constant_nu(&mut e);
                source = parse_source(&mut e);
                n = match e.opt_u64("n") {
                    Some((line, v)) if v < 1 => {
                        e.err(Some(line), "n", "must be >= 1");
                        None
                    }
                    Some((_, v)) => Some(v),
                    None => {
                        e.err(None, "n", "required field is missing");
                        None
                    }
                };
            }
            ExperimentKind::ScalingCheck => {
                grids = parse_single_grid(&mut e);
                nu = parse_constant_nu(&mut e);
                source = parse_source(&mut e);
                n = e.opt_u64("n").map(|(_, v)| v);
                n_list = parse_n_list(&mut e, false);
                if n.is_none() && n_list.is_none() {
                    e.err(None, "n", "scaling_check needs 'n' or 'n_list'");
                }
                t = match e.req_f64("t") {
                    Some((line, v)) if !(v > 0.0) => {
                        e.err(Some(line), "t", format!("must be > 0, got {v}"));
                        None
                    }
                    Some((_, v)) => Some(v),
                    None => None,
                };
            }
            ExperimentKind::VariableExponent => {
                grids = parse_single_grid(&mut e);
                nu = parse_two_zone_nu(&mut e);
                source = parse_source(&mut e);
                n_list = parse_n_list(&mut e, true);
                window = e.rect(["window_ax", "window_bx", "window_ay", "window_by"], "window", true);
            }
            ExperimentKind::UniquenessProbe => {
                grids = parse_single_grid(&mut e);
                nu = parse_constant_nu(&mut e);
                source = parse_source(&mut e);
                n = match e.opt_u64("n") {
                    Some((line, v)) if v < 1 => {
                        e.err(Some(line), "n", "must be >= 1");
                        None
                    }
                    Some((_, v)) => Some(v),
                    None => {
                        e.err(None, "n", "required field is missing");
                        None
                    }
                };
            }
        }
    }

    // any remaining unconsumed key is not applicable to this kind
    let leftover: Vec<String> = e
        .map
        .keys()
        .filter(|k| !e.consumed.contains(*k))
        .cloned()
        .collect();
    for key in leftover {
        let line = e.map[&key].0;
        let kind_name = kind.map(|k| k.name()).unwrap_or("this");
        e.err(Some(line), &key, format!("not applicable to kind '{kind_name}'"));
    }

    if !e.errors.is_empty() {
        return Err(ConfigError::Invalid(e.errors));
    }

    Ok(ExperimentConfig {
        kind: kind.expect("validated"),
        domain: domain.expect("validated"),
        grids: grids.expect("validated"),
        lambda: lambda.expect("validated"),
        nu,
        source,
        n,
        n_list,
        t,
        scaling_tol,
        window,
        picard_tol,
        picard_maxiter,
        relaxation,
        linear_tol,
        out,
    })
}

impl ExperimentConfig {
    /// Canonical key/value echo of the parsed config, in schema order, with
    /// floats rendered at 17 significant digits.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = Vec::new();
        let mut push = |k: &str, v: String| out.push((k.to_string(), v));
        push("kind", self.kind.name().to_string());
        push("ax", fmt_f64(self.domain.ax));
        push("bx", fmt_f64(self.domain.bx));
        push("ay", fmt_f64(self.domain.ay));
        push("by", fmt_f64(self.domain.by));
        if self.grids.len() == 1 {
            push("nx", self.grids[0].0.to_string());
            push("ny", self.grids[0].1.to_string());
        } else {
            let ladder: Vec<String> = self.grids.iter().map(|g| g.0.to_string()).collect();
            push("ladder", ladder.join(","));
        }
        push("lambda", fmt_f64(self.lambda));
        match &self.nu {
            Some(NuSpec::Constant(nu)) => push("nu", fmt_f64(*nu)),
            Some(NuSpec::TwoZone { inside, outside, zone }) => {
                push("nu_kind", "two_zone".to_string());
                push("nu_inside", fmt_f64(*inside));
                push("nu_outside", fmt_f64(*outside));
                push("zone_ax", fmt_f64(zone.ax));
                push("zone_bx", fmt_f64(zone.bx));
                push("zone_ay", fmt_f64(zone.ay));
                push("zone_by", fmt_f64(zone.by));
            }
            None => {}
        }
        if let Some(source) = &self.source {
            push("source", source.name().to_string());
            match source {
                SourceSpec::Constant { value } | SourceSpec::ProductOfSines { value } => {
                    push("source_value", fmt_f64(*value));
                }
                SourceSpec::RadialPower { value, gamma } => {
                    push("source_value", fmt_f64(*value));
                    push("gamma", fmt_f64(*gamma));
                }
                SourceSpec::Indicator { value, rect } => {
                    push("source_value", fmt_f64(*value));
                    push("src_ax", fmt_f64(rect.ax));
                    push("src_bx", fmt_f64(rect.bx));
                    push("src_ay", fmt_f64(rect.ay));
                    push("src_by", fmt_f64(rect.by));
                }
            }
        }
        if let Some(n) = self.n {
            push("n", n.to_string());
        }
        if let Some(list) = &self.n_list {
            let rendered: Vec<String> = list.iter().map(|v| v.to_string()).collect();
            push("n_list", rendered.join(","));
        }
        if let Some(t) = self.t {
            push("t", fmt_f64(t));
            push("scaling_tol", fmt_f64(self.scaling_tol));
        }
        if let Some(w) = &self.window {
            push("window_ax", fmt_f64(w.ax));
            push("window_bx", fmt_f64(w.bx));
            push("window_ay", fmt_f64(w.ay));
            push("window_by", fmt_f64(w.by));
        }
        push("picard_tol", fmt_f64(self.picard_tol));
        push("picard_maxiter", self.picard_maxiter.to_string());
        if let Some(omega) = self.relaxation {
            push("relaxation", fmt_f64(omega));
        }
        push("linear_tol", fmt_f64(self.linear_tol));
        if let Some(out_path) = &self.out {
            push("out", out_path.clone());
        }
        out
    }
}
