//! Scenario files: a flat, line-based `key = value` format with three
//! sections. The normative grammar is `docs/config-grammar.md`.

use core::fmt;

use ptphonon_core::math;
use ptphonon_core::{InputCoupling, OpticalConvention, PolynomialForm, SystemParams};

/// Numeric `SystemParams` fields, in the order they appear in metadata.
pub const PARAM_FIELDS: [&str; 11] = [
    "wavelength",
    "cavity_q",
    "gain_loss_ratio",
    "tunneling_rate_ratio",
    "radius",
    "mech_freq",
    "mech_mass",
    "mech_damping",
    "detuning_1",
    "detuning_2",
    "input_power",
];

pub fn get_field(p: &SystemParams, name: &str) -> Option<f64> {
    Some(match name {
        "wavelength" => p.wavelength,
        "cavity_q" => p.cavity_q,
        "gain_loss_ratio" => p.gain_loss_ratio,
        "tunneling_rate_ratio" => p.tunneling_rate_ratio,
        "radius" => p.radius,
        "mech_freq" => p.mech_freq,
        "mech_mass" => p.mech_mass,
        "mech_damping" => p.mech_damping,
        "detuning_1" => p.detuning_1,
        "detuning_2" => p.detuning_2,
        "input_power" => p.input_power,
        _ => return None,
    })
}

pub fn set_field(p: &mut SystemParams, name: &str, value: f64) -> bool {
    let slot = match name {
        "wavelength" => &mut p.wavelength,
        "cavity_q" => &mut p.cavity_q,
        "gain_loss_ratio" => &mut p.gain_loss_ratio,
        "tunneling_rate_ratio" => &mut p.tunneling_rate_ratio,
        "radius" => &mut p.radius,
        "mech_freq" => &mut p.mech_freq,
        "mech_mass" => &mut p.mech_mass,
        "mech_damping" => &mut p.mech_damping,
        "detuning_1" => &mut p.detuning_1,
        "detuning_2" => &mut p.detuning_2,
        "input_power" => &mut p.input_power,
        _ => return false,
    };
    *slot = value;
    true
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CouplingSpec {
    /// `√(2κ)`.
    Gain,
    /// `√(2γ)`, resolved per grid point.
    Loss,
    Fixed(f64),
}

impl CouplingSpec {
    pub fn token(&self) -> String {
        match self {
            CouplingSpec::Gain => "gain".into(),
            CouplingSpec::Loss => "loss".into(),
            CouplingSpec::Fixed(r) => format!("fixed:{}", crate::table::format_float(*r)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
    List,
}

impl Scale {
    pub fn token(self) -> &'static str {
        match self {
            Scale::Linear => "linear",
            Scale::Log => "log",
            Scale::List => "list",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub field: &'static str,
    pub values: Vec<f64>,
    pub scale: Scale,
}

impl Axis {
    pub fn linear(field: &'static str, start: f64, stop: f64, count: usize) -> Self {
        Axis {
            field,
            values: spaced(start, stop, count, Scale::Linear),
            scale: Scale::Linear,
        }
    }

    pub fn log(field: &'static str, start: f64, stop: f64, count: usize) -> Self {
        Axis {
            field,
            values: spaced(start, stop, count, Scale::Log),
            scale: Scale::Log,
        }
    }

    pub fn list(field: &'static str, values: &[f64]) -> Self {
        Axis {
            field,
            values: values.to_vec(),
            scale: Scale::List,
        }
    }
}

/// `start + (stop − start)·i/(count − 1)`, or the same in `ln` space for
/// log axes (pure-Rust `exp`/`ln`, so grids are identical on every platform).
/// Both end points are reproduced exactly.
fn spaced(start: f64, stop: f64, count: usize, scale: Scale) -> Vec<f64> {
    let last = (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i == 0 {
                return start;
            }
            if i == count - 1 {
                return stop;
            }
            match scale {
                Scale::Log => {
                    let (a, b) = (math::ln(start), math::ln(stop));
                    math::exp(a + (b - a) * i as f64 / last)
                }
                _ => start + (stop - start) * i as f64 / last,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    PhotonNumber,
    Displacement,
    Eta,
    Xi,
    Splitting,
    Linewidths,
    Gain,
    ThresholdPower,
    PhononNumber,
    S1,
    S2,
    MaxRealPart,
    RootCount,
    Stable,
}

impl Quantity {
    pub const ALL: [Quantity; 14] = [
        Quantity::PhotonNumber,
        Quantity::Displacement,
        Quantity::Eta,
        Quantity::Xi,
        Quantity::Splitting,
        Quantity::Linewidths,
        Quantity::Gain,
        Quantity::ThresholdPower,
        Quantity::PhononNumber,
        Quantity::S1,
        Quantity::S2,
        Quantity::MaxRealPart,
        Quantity::RootCount,
        Quantity::Stable,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Quantity::PhotonNumber => "photon_number",
            Quantity::Displacement => "displacement",
            Quantity::Eta => "eta",
            Quantity::Xi => "xi",
            Quantity::Splitting => "splitting",
            Quantity::Linewidths => "linewidths",
            Quantity::Gain => "gain",
            Quantity::ThresholdPower => "threshold_power",
            Quantity::PhononNumber => "phonon_number",
            Quantity::S1 => "s1",
            Quantity::S2 => "s2",
            Quantity::MaxRealPart => "max_real_part",
            Quantity::RootCount => "root_count",
            Quantity::Stable => "stable",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        Quantity::ALL.into_iter().find(|q| q.token() == s)
    }

    /// `(column name, unit)` pairs this quantity contributes.
    pub fn columns(self) -> &'static [(&'static str, &'static str)] {
        match self {
            Quantity::PhotonNumber => &[("photon_number", "1")],
            Quantity::Displacement => &[("displacement", "m")],
            Quantity::Eta => &[("eta", "1")],
            Quantity::Xi => &[("xi", "1")],
            Quantity::Splitting => &[("splitting", "Hz")],
            Quantity::Linewidths => &[("gamma_plus", "1/s"), ("gamma_minus", "1/s")],
            Quantity::Gain => &[("gain", "1/s")],
            Quantity::ThresholdPower => &[("threshold_power", "W")],
            Quantity::PhononNumber => &[("phonon_number", "1")],
            Quantity::S1 => &[("s1", "s^-4")],
            Quantity::S2 => &[("s2", "s^-6")],
            Quantity::MaxRealPart => &[("max_real_part", "1/s")],
            Quantity::RootCount => &[("root_count", "1")],
            Quantity::Stable => &[("rh_stable", "1"), ("eig_stable", "1")],
        }
    }

    /// Whether the quantity depends on a particular steady state.
    pub fn per_state(self) -> bool {
        matches!(
            self,
            Quantity::PhotonNumber
                | Quantity::Displacement
                | Quantity::Eta
                | Quantity::Xi
                | Quantity::S1
                | Quantity::S2
                | Quantity::MaxRealPart
                | Quantity::RootCount
                | Quantity::Stable
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: SystemParams,
    /// Absolute `J` (rad/s); overrides `tunneling_rate_ratio` at every point.
    pub tunneling_rate: Option<f64>,
    pub coupling: CouplingSpec,
    pub form: PolynomialForm,
    pub axes: Vec<Axis>,
    pub quantities: Vec<Quantity>,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            params: SystemParams::reference(),
            tunneling_rate: None,
            coupling: CouplingSpec::Gain,
            form: PolynomialForm::AsPrinted,
            axes: Vec::new(),
            quantities: Quantity::ALL.to_vec(),
        }
    }
}

impl Scenario {
    /// Parameters at one grid point with every deferred value resolved.
    pub fn resolve(&self, point: &[f64]) -> SystemParams {
        let mut p = self.params;
        for (axis, v) in self.axes.iter().zip(point) {
            set_field(&mut p, axis.field, *v);
        }
        let gamma =
            p.convention.carrier_factor() * math::SPEED_OF_LIGHT / p.wavelength / p.cavity_q;
        if let Some(j) = self.tunneling_rate {
            p.tunneling_rate_ratio = j / gamma;
        }
        p.input_coupling = match self.coupling {
            CouplingSpec::Gain => InputCoupling::GainCoupled,
            CouplingSpec::Loss => InputCoupling::FixedRate(gamma),
            CouplingSpec::Fixed(r) => InputCoupling::FixedRate(r),
        };
        p
    }

    /// Every grid point, first axis outermost.
    pub fn grid(&self) -> Vec<Vec<f64>> {
        let mut points = vec![Vec::new()];
        for axis in &self.axes {
            points = points
                .into_iter()
                .flat_map(|prefix| {
                    axis.values.iter().map(move |v| {
                        let mut p = prefix.clone();
                        p.push(*v);
                        p
                    })
                })
                .collect();
        }
        points
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub origin: String,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: line {}, column {}: {}",
            self.origin, self.line, self.column, self.message
        )
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Params,
    Sweep,
    Outputs,
}

/// A token with its 1-based column.
#[derive(Clone, Copy)]
struct Tok<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(s: &str, base_column: usize) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (col, (byte, ch)) in s.char_indices().enumerate() {
        if ch == ' ' || ch == '\t' {
            if let Some((b, c)) = start.take() {
                out.push(Tok {
                    text: &s[b..byte],
                    column: base_column + c,
                });
            }
        } else if start.is_none() {
            start = Some((byte, col));
        }
    }
    if let Some((b, c)) = start {
        out.push(Tok {
            text: &s[b..],
            column: base_column + c,
        });
    }
    out
}

/// Decimal literal: `[+-]? (d+ ('.' d*)? | '.' d+) ([eE] [+-]? d+)?`.
pub fn is_number_literal(s: &str) -> bool {
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let int_digits = i - int_start;
    let mut frac_digits = 0;
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let f = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        frac_digits = i - f;
    }
    if int_digits == 0 && frac_digits == 0 {
        return false;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        i += 1;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            i += 1;
        }
        let e = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == e {
            return false;
        }
    }
    i == b.len()
}

struct Parser<'a> {
    origin: &'a str,
    line: usize,
}

impl Parser<'_> {
    fn err(&self, column: usize, message: impl Into<String>) -> ConfigError {
        ConfigError {
            origin: self.origin.to_string(),
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn number(&self, t: Tok<'_>, what: &str) -> Result<f64, ConfigError> {
        if !is_number_literal(t.text) {
            return Err(self.err(
                t.column,
                format!("{what}: expected a decimal number, found `{}`", t.text),
            ));
        }
        let v: f64 = t
            .text
            .parse()
            .map_err(|_| self.err(t.column, format!("{what}: unparsable number `{}`", t.text)))?;
        if !v.is_finite() {
            return Err(self.err(t.column, format!("{what}: `{}` overflows", t.text)));
        }
        Ok(v)
    }

    fn single<'t>(
        &self,
        toks: &[Tok<'t>],
        key: &str,
        value_column: usize,
    ) -> Result<Tok<'t>, ConfigError> {
        match toks {
            [t] => Ok(*t),
            [] => Err(self.err(value_column, format!("key `{key}` has an empty value"))),
            [_, extra, ..] => {
                Err(self.err(extra.column, format!("key `{key}` takes a single value")))
            }
        }
    }
}

/// Applies one `[params]` entry. Shared by files and `--set`.
fn apply_param(
    parser: &Parser<'_>,
    scenario: &mut Scenario,
    key: Tok<'_>,
    value: &str,
    value_column: usize,
) -> Result<(), ConfigError> {
    let toks = tokens(value, value_column);
    let t = parser.single(&toks, key.text, value_column)?;
    match key.text {
        "input_coupling" => {
            scenario.coupling = match t.text {
                "gain" => CouplingSpec::Gain,
                "loss" => CouplingSpec::Loss,
                other => match other.strip_prefix("fixed:") {
                    Some(rate) => {
                        let r = parser.number(
                            Tok {
                                text: rate,
                                column: t.column + 6,
                            },
                            "input_coupling",
                        )?;
                        if r < 0.0 {
                            return Err(parser.err(t.column + 6, "input_coupling: rate must be >= 0"));
                        }
                        CouplingSpec::Fixed(r)
                    }
                    None => {
                        return Err(parser.err(
                            t.column,
                            format!("input_coupling: expected `gain`, `loss` or `fixed:<rate>`, found `{other}`"),
                        ))
                    }
                },
            }
        }
        "convention" => {
            scenario.params.convention = match t.text {
                "cyclic" => OpticalConvention::Cyclic,
                "angular" => OpticalConvention::Angular,
                other => {
                    return Err(parser.err(
                        t.column,
                        format!("convention: expected `cyclic` or `angular`, found `{other}`"),
                    ))
                }
            }
        }
        "polynomial" => {
            scenario.form = match t.text {
                "printed" => PolynomialForm::AsPrinted,
                "consistent" => PolynomialForm::SelfConsistent,
                other => {
                    return Err(parser.err(
                        t.column,
                        format!("polynomial: expected `printed` or `consistent`, found `{other}`"),
                    ))
                }
            }
        }
        "tunneling_rate" => {
            let v = parser.number(t, "tunneling_rate")?;
            if v < 0.0 {
                return Err(parser.err(t.column, "tunneling_rate must be >= 0"));
            }
            scenario.tunneling_rate = Some(v);
        }
        field => {
            if get_field(&scenario.params, field).is_none() {
                return Err(parser.err(key.column, format!("unknown key `{field}` in [params]")));
            }
            let v = parser.number(t, field)?;
            set_field(&mut scenario.params, field, v);
        }
    }
    Ok(())
}

fn parse_axis(parser: &Parser<'_>, value: &str, value_column: usize) -> Result<Axis, ConfigError> {
    let toks = tokens(value, value_column);
    let Some(field_tok) = toks.first() else {
        return Err(parser.err(value_column, "axis: missing field name"));
    };
    let Some(field) = PARAM_FIELDS.iter().copied().find(|f| *f == field_tok.text) else {
        return Err(parser.err(
            field_tok.column,
            format!("axis: `{}` is not a sweepable parameter", field_tok.text),
        ));
    };
    if toks.len() >= 2 && toks[1].text == "list" {
        let values = toks[2..]
            .iter()
            .map(|t| parser.number(*t, "axis value"))
            .collect::<Result<Vec<_>, _>>()?;
        if values.len() < 2 {
            return Err(parser.err(toks[1].column, "axis: a list needs at least 2 values"));
        }
        return Ok(Axis::list(field, &values));
    }
    if toks.len() != 5 {
        let col = toks
            .get(5)
            .map_or(value_column + value.chars().count(), |t| t.column);
        return Err(parser.err(
            col,
            "axis: expected `<field> <start> <stop> <count> <linear|log>` or `<field> list <v1> <v2> ...`",
        ));
    }
    let start = parser.number(toks[1], "axis start")?;
    let stop = parser.number(toks[2], "axis stop")?;
    let count: usize = match toks[3].text.parse() {
        Ok(n) if toks[3].text.bytes().all(|b| b.is_ascii_digit()) => n,
        _ => {
            return Err(parser.err(
                toks[3].column,
                format!("axis count: expected an integer, found `{}`", toks[3].text),
            ))
        }
    };
    if count < 2 {
        return Err(parser.err(toks[3].column, "axis count must be >= 2"));
    }
    match toks[4].text {
        "linear" => Ok(Axis::linear(field, start, stop, count)),
        "log" => {
            if !(start > 0.0 && stop > 0.0) {
                return Err(parser.err(toks[1].column, "log axis needs start > 0 and stop > 0"));
            }
            Ok(Axis::log(field, start, stop, count))
        }
        other => Err(parser.err(
            toks[4].column,
            format!("axis scale: expected `linear` or `log`, found `{other}`"),
        )),
    }
}

fn parse_quantities(
    parser: &Parser<'_>,
    value: &str,
    value_column: usize,
) -> Result<Vec<Quantity>, ConfigError> {
    let mut out = Vec::new();
    let mut col = value_column;
    for piece in value.split(',') {
        let lead = piece
            .chars()
            .take_while(|c| *c == ' ' || *c == '\t')
            .count();
        let name = piece.trim_matches(|c| c == ' ' || c == '\t');
        let at = col + lead;
        if name.is_empty() {
            return Err(parser.err(at, "quantities: empty entry"));
        }
        let q = Quantity::from_token(name)
            .ok_or_else(|| parser.err(at, format!("quantities: unknown quantity `{name}`")))?;
        if out.contains(&q) {
            return Err(parser.err(at, format!("quantities: `{name}` listed twice")));
        }
        out.push(q);
        col += piece.chars().count() + 1;
    }
    Ok(out)
}

/// Splits `key = value`; returns the key token and the trimmed value with its column.
fn split_entry<'a>(
    parser: &Parser<'_>,
    text: &'a str,
    indent: usize,
) -> Result<(Tok<'a>, &'a str, usize), ConfigError> {
    let Some(eq) = text.find('=') else {
        return Err(parser.err(indent + 1, "expected `key = value`"));
    };
    let key = text[..eq].trim_end_matches([' ', '\t']);
    if key.is_empty() {
        return Err(parser.err(indent + 1, "missing key before `=`"));
    }
    if let Some(bad) = key
        .chars()
        .position(|c| !(c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_'))
    {
        return Err(parser.err(indent + 1 + bad, format!("malformed key `{key}`")));
    }
    let after = &text[eq + 1..];
    let lead = after
        .chars()
        .take_while(|c| *c == ' ' || *c == '\t')
        .count();
    let value = after.trim_matches([' ', '\t']);
    let value_column = indent + text[..eq + 1].chars().count() + lead + 1;
    Ok((
        Tok {
            text: key,
            column: indent + 1,
        },
        value,
        value_column,
    ))
}

/// Parses a scenario file. `origin` names the source in diagnostics.
pub fn parse_scenario(text: &str, origin: &str) -> Result<Scenario, ConfigError> {
    let mut scenario = Scenario::default();
    let mut parser = Parser { origin, line: 0 };
    let mut section: Option<Section> = None;
    let mut seen_sections: Vec<Section> = Vec::new();
    let mut seen_keys: Vec<(Section, String)> = Vec::new();
    let mut axes: Vec<Axis> = Vec::new();

    for (idx, raw) in text.split('\n').enumerate() {
        parser.line = idx + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let indent = raw.chars().take_while(|c| *c == ' ' || *c == '\t').count();
        let body = raw.trim_matches([' ', '\t']);
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        if let Some(rest) = body.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return Err(parser.err(indent + 1, "unterminated section header"));
            };
            let s = match name {
                "params" => Section::Params,
                "sweep" => Section::Sweep,
                "outputs" => Section::Outputs,
                other => return Err(parser.err(indent + 2, format!("unknown section `[{other}]`"))),
            };
            if seen_sections.contains(&s) {
                return Err(parser.err(indent + 1, format!("section `[{name}]` appears twice")));
            }
            seen_sections.push(s);
            section = Some(s);
            continue;
        }
        let (key, value, value_column) = split_entry(&parser, body, indent)?;
        let Some(sec) = section else {
            return Err(parser.err(
                key.column,
                format!("key `{}` outside any section", key.text),
            ));
        };
        match sec {
            Section::Params => {
                if seen_keys.iter().any(|(s, k)| *s == sec && k == key.text) {
                    return Err(parser.err(key.column, format!("duplicate key `{}`", key.text)));
                }
                seen_keys.push((sec, key.text.to_string()));
                apply_param(&parser, &mut scenario, key, value, value_column)?;
            }
            Section::Sweep => {
                if key.text != "axis" {
                    return Err(
                        parser.err(key.column, format!("unknown key `{}` in [sweep]", key.text))
                    );
                }
                let axis = parse_axis(&parser, value, value_column)?;
                if axes.len() == 2 {
                    return Err(parser.err(key.column, "at most 2 sweep axes"));
                }
                if axes.iter().any(|a| a.field == axis.field) {
                    return Err(
                        parser.err(value_column, format!("axis `{}` swept twice", axis.field))
                    );
                }
                axes.push(axis);
            }
            Section::Outputs => {
                if key.text != "quantities" {
                    return Err(parser.err(
                        key.column,
                        format!("unknown key `{}` in [outputs]", key.text),
                    ));
                }
                if seen_keys.iter().any(|(s, k)| *s == sec && k == key.text) {
                    return Err(parser.err(key.column, "duplicate key `quantities`"));
                }
                seen_keys.push((sec, key.text.to_string()));
                scenario.quantities = parse_quantities(&parser, value, value_column)?;
            }
        }
    }
    if scenario.tunneling_rate.is_some() {
        if seen_keys.iter().any(|(_, k)| k == "tunneling_rate_ratio") {
            return Err(ConfigError {
                origin: origin.to_string(),
                line: 0,
                column: 0,
                message: "`tunneling_rate` and `tunneling_rate_ratio` are mutually exclusive"
                    .into(),
            });
        }
        if axes.iter().any(|a| a.field == "tunneling_rate_ratio") {
            return Err(ConfigError {
                origin: origin.to_string(),
                line: 0,
                column: 0,
                message: "`tunneling_rate` cannot be combined with a `tunneling_rate_ratio` axis"
                    .into(),
            });
        }
    }
    scenario.axes = axes;
    Ok(scenario)
}

/// Applies `key=value` overrides (the `--set` flag) on top of a scenario.
pub fn apply_overrides(scenario: &mut Scenario, overrides: &[String]) -> Result<(), ConfigError> {
    for (i, item) in overrides.iter().enumerate() {
        let origin = format!("--set #{}", i + 1);
        let parser = Parser {
            origin: &origin,
            line: 1,
        };
        let (key, value, value_column) = split_entry(&parser, item, 0)?;
        apply_param(&parser, scenario, key, value, value_column)?;
        if key.text == "tunneling_rate_ratio" {
            scenario.tunneling_rate = None;
        }
        if key.text == "tunneling_rate" {
            scenario.axes.retain(|a| a.field != "tunneling_rate_ratio");
        }
    }
    Ok(())
}

/// Parses one `--axis` argument, `<field> <start> <stop> <count> <scale>`.
pub fn parse_axis_arg(arg: &str, index: usize) -> Result<Axis, ConfigError> {
    let origin = format!("--axis #{}", index + 1);
    let parser = Parser {
        origin: &origin,
        line: 1,
    };
    parse_axis(
        &parser,
        arg.trim_matches([' ', '\t']),
        1 + arg.chars().take_while(|c| *c == ' ' || *c == '\t').count(),
    )
}
