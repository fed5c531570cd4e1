//! Flag/config-file merging and value parsing.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use dirac_stability::ModelKind;

use crate::cli::{Common, Format};
use crate::error::{CliError, CliResult};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "DIRAC_STABILITY_OUT";

/// Number, list of numbers, or text in a config file.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Scalarish {
    Num(f64),
    List(Vec<f64>),
    Text(String),
}

impl Scalarish {
    fn into_text(self) -> String {
        match self {
            Scalarish::Num(x) => format!("{x}"),
            Scalarish::List(xs) => xs
                .iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(","),
            Scalarish::Text(s) => s,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RangeValue {
    Text(String),
    Segment { start: f64, stop: f64, step: f64 },
    Segments(Vec<RangeValue>),
}

impl RangeValue {
    fn into_text(self) -> String {
        match self {
            RangeValue::Text(s) => s,
            RangeValue::Segment { start, stop, step } => format!("{start}:{stop}:{step}"),
            RangeValue::Segments(v) => v
                .into_iter()
                .map(RangeValue::into_text)
                .collect::<Vec<_>>()
                .join(","),
        }
    }
}

/// Contents of a `--config` JSON file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    model: Option<String>,
    omega: Option<Scalarish>,
    p: Option<Scalarish>,
    p_range: Option<RangeValue>,
    n: Option<usize>,
    scale: Option<f64>,
    out: Option<PathBuf>,
    format: Option<Format>,
    jobs: Option<usize>,
    points: Option<usize>,
    x_max: Option<f64>,
    allow_limit: Option<bool>,
    omega_range: Option<RangeValue>,
    ns: Option<Scalarish>,
    matrix_out: Option<PathBuf>,
}

/// Flags merged over the config file; every field is still optional.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    pub model: Option<String>,
    pub omega: Option<String>,
    pub p: Option<String>,
    pub p_range: Option<String>,
    pub n: Option<usize>,
    pub scale: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub jobs: Option<usize>,
    pub points: Option<usize>,
    pub x_max: Option<f64>,
    pub allow_limit: bool,
    pub omega_range: Option<String>,
    pub ns: Option<String>,
    pub matrix_out: Option<PathBuf>,
}

/// Command-specific flags not covered by [`Common`].
#[derive(Debug, Clone, Default)]
pub struct Extra {
    pub points: Option<usize>,
    pub x_max: Option<f64>,
    pub allow_limit: bool,
    pub omega_range: Option<String>,
    pub ns: Option<String>,
    pub matrix_out: Option<PathBuf>,
}

impl Settings {
    pub fn resolve(common: &Common, extra: Extra) -> CliResult<Self> {
        let file = match &common.config {
            Some(path) => read_config(path)?,
            None => FileConfig::default(),
        };
        Ok(Settings {
            model: common.model.clone().or(file.model),
            omega: common
                .omega
                .clone()
                .or(file.omega.map(Scalarish::into_text)),
            p: common.p.clone().or(file.p.map(Scalarish::into_text)),
            p_range: common
                .p_range
                .clone()
                .or(file.p_range.map(RangeValue::into_text)),
            n: common.n.or(file.n),
            scale: common.scale.or(file.scale),
            out: common.out.clone().or(file.out),
            format: common.format.or(file.format),
            jobs: common.jobs.or(file.jobs),
            points: extra.points.or(file.points),
            x_max: extra.x_max.or(file.x_max),
            allow_limit: extra.allow_limit || file.allow_limit.unwrap_or(false),
            omega_range: extra
                .omega_range
                .or(file.omega_range.map(RangeValue::into_text)),
            ns: extra.ns.or(file.ns.map(Scalarish::into_text)),
            matrix_out: extra.matrix_out.or(file.matrix_out),
        })
    }

    pub fn model(&self) -> CliResult<ModelKind> {
        let raw = self
            .model
            .as_deref()
            .ok_or_else(|| CliError::Config("--model is required".into()))?;
        Ok(raw.parse()?)
    }

    pub fn models_or_both(&self) -> CliResult<Vec<ModelKind>> {
        match &self.model {
            Some(_) => Ok(vec![self.model()?]),
            None => Ok(vec![ModelKind::MassiveThirring, ModelKind::GrossNeveu]),
        }
    }

    pub fn omegas(&self) -> CliResult<Option<Vec<f64>>> {
        self.omega.as_deref().map(parse_list).transpose()
    }

    pub fn single_omega(&self) -> CliResult<f64> {
        match self.omegas()?.as_deref() {
            Some([w]) => Ok(*w),
            Some(_) => Err(CliError::Config(
                "this command takes a single --omega".into(),
            )),
            None => Err(CliError::Config("--omega is required".into())),
        }
    }

    pub fn p(&self) -> CliResult<f64> {
        self.p
            .as_deref()
            .map(parse_real)
            .transpose()
            .map(|p| p.unwrap_or(0.0))
    }

    /// Default degree: 300 for MTM, 400 for GN.
    pub fn n_for(&self, model: ModelKind) -> usize {
        self.n.unwrap_or(match model {
            ModelKind::MassiveThirring => 300,
            ModelKind::GrossNeveu => 400,
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale.unwrap_or(dirac_stability::DEFAULT_SCALE)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Csv)
    }

    /// `--out`, else `$DIRAC_STABILITY_OUT/<default_name>`, else stdout (`None`).
    pub fn destination(&self, default_name: &str) -> Option<PathBuf> {
        self.out.clone().or_else(|| {
            std::env::var_os(OUT_DIR_ENV)
                .filter(|d| !d.is_empty())
                .map(|d| Path::new(&d).join(default_name))
        })
    }
}

fn read_config(path: &Path) -> CliResult<FileConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
}

/// Real number, optionally written as a fraction `a/b`.
pub fn parse_real(s: &str) -> CliResult<f64> {
    let s = s.trim();
    let bad = || CliError::Config(format!("not a number: '{s}'"));
    let value = match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            );
            a / b
        }
        None => s.parse().map_err(|_| bad())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

pub fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',').map(parse_real).collect()
}

/// Values of comma-separated `start:stop:step` segments, stop inclusive.
/// Points are `start + k·step` rounded to 12 decimals, so grids hit 0 exactly.
pub fn parse_range(s: &str) -> CliResult<Vec<f64>> {
    let mut out: Vec<f64> = Vec::new();
    for seg in s.split(',').filter(|seg| !seg.trim().is_empty()) {
        let parts: Vec<&str> = seg.split(':').collect();
        let [start, stop, step] = parts.as_slice() else {
            return Err(CliError::Config(format!(
                "range segment '{seg}' is not start:stop:step"
            )));
        };
        let (start, stop, step) = (parse_real(start)?, parse_real(stop)?, parse_real(step)?);
        if step <= 0.0 {
            return Err(CliError::Config(format!(
                "range step must be positive, got {step}"
            )));
        }
        let count = ((stop - start) / step + 1e-9).floor();
        if count < 0.0 {
            continue;
        }
        for k in 0..=count as usize {
            let v = ((start + k as f64 * step) * 1e12).round() / 1e12;
            if out.last().is_none_or(|&last| v > last) {
                out.push(v);
            }
        }
    }
    if out.is_empty() {
        return Err(dirac_stability::Error::Argument(format!("range '{s}' is empty")).into());
    }
    Ok(out)
}

pub fn parse_usize_list(s: &str) -> CliResult<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| CliError::Config(format!("not a grid degree: '{t}'")))
        })
        .collect()
}

/// Echoed configuration, serialized into every output header.
#[derive(Debug, Clone, Serialize)]
pub struct Echo {
    pub command: &'static str,
    #[serde(flatten)]
    pub fields: serde_json::Map<String, serde_json::Value>,
}

impl Echo {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            fields: serde_json::Map::new(),
        }
    }

    pub fn with<T: Serialize>(mut self, key: &str, value: T) -> Self {
        self.fields.insert(
            key.to_string(),
            serde_json::to_value(value).expect("plain data"),
        );
        self
    }
}
