//! Flat TOML scenario files with unit-tagged quantities.
//!
//! ```toml
//! route = "tf_finite"
//! N = 10667
//! T = "0.25 EF"
//! alpha = 9.0
//! lambda_y = 1.0
//! lambda_z = 1.0
//! omega_ratio = 1.0
//! excited = [{ offset = "0 Omega", dipole_sq = 1.0 }]
//! grid = "auto"
//! ```

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::model::{fermi_energy, ExcitedLine, LightSpec, TrapSpec};
use crate::spectrum::{GridSpec, Kernel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Exact,
    TfZero,
    TfFinite,
    McOracle,
    Compare,
}

impl Route {
    pub fn name(&self) -> &'static str {
        match self {
            Route::Exact => "exact",
            Route::TfZero => "tf_zero",
            Route::TfFinite => "tf_finite",
            Route::McOracle => "mc_oracle",
            Route::Compare => "compare",
        }
    }
}

impl FromStr for Route {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exact" => Ok(Route::Exact),
            "tf_zero" => Ok(Route::TfZero),
            "tf_finite" => Ok(Route::TfFinite),
            "mc_oracle" => Ok(Route::McOracle),
            "compare" => Ok(Route::Compare),
            other => Err(format!(
                "unknown route `{other}` (expected exact, tf_zero, tf_finite, mc_oracle or compare)"
            )),
        }
    }
}

/// Temperature with its unit tag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Temperature {
    /// k_B T / E_F.
    FermiUnits(f64),
    /// k_B T / ħΩ_g.
    TrapUnits(f64),
}

impl Temperature {
    /// k_B T in ħΩ_g for a gas of `n` atoms in `trap`.
    pub fn absolute(&self, n: u64, trap: &TrapSpec) -> Result<f64> {
        match *self {
            Temperature::TrapUnits(t) => Ok(t),
            Temperature::FermiUnits(t) => Ok(t * fermi_energy(n, trap.lambda_y, trap.lambda_z)?),
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            Temperature::FermiUnits(t) | Temperature::TrapUnits(t) => t == 0.0,
        }
    }

    fn tagged(&self) -> String {
        match *self {
            Temperature::FermiUnits(t) => format!("{t:?} EF"),
            Temperature::TrapUnits(t) => format!("{t:?} hbarOmega"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GridChoice {
    Auto,
    Explicit(GridSpec),
}

impl GridChoice {
    pub fn parse(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s == "auto" {
            return Ok(GridChoice::Auto);
        }
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected \"auto\" or \"min:max:points\", got `{s}`"));
        }
        let min: f64 = parts[0].trim().parse().map_err(|_| format!("bad grid minimum `{}`", parts[0]))?;
        let max: f64 = parts[1].trim().parse().map_err(|_| format!("bad grid maximum `{}`", parts[1]))?;
        let points: usize = parts[2].trim().parse().map_err(|_| format!("bad point count `{}`", parts[2]))?;
        GridSpec::new(min, max, points)
            .map(GridChoice::Explicit)
            .map_err(|e| e.to_string())
    }

    fn tagged(&self) -> String {
        match self {
            GridChoice::Auto => "auto".into(),
            GridChoice::Explicit(g) => format!("{:?}:{:?}:{}", g.min, g.max, g.points),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Broadening {
    pub kernel: Kernel,
    pub width: f64,
}

impl Broadening {
    pub fn parse(s: &str) -> std::result::Result<Self, String> {
        let (k, w) = s
            .split_once(':')
            .ok_or_else(|| format!("expected \"kernel:width\", got `{s}`"))?;
        let kernel = Kernel::parse(k).ok_or_else(|| format!("unknown kernel `{k}` (gaussian or lorentzian)"))?;
        let width: f64 = w.trim().parse().map_err(|_| format!("bad width `{w}`"))?;
        if !(width > 0.0 && width.is_finite()) {
            return Err(format!("width must be positive, got {width}"));
        }
        Ok(Self { kernel, width })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (csv or json)")),
        }
    }
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub route: Route,
    pub n_atoms: u64,
    pub temperature: Temperature,
    pub trap: TrapSpec,
    pub light: LightSpec,
    pub grid: GridChoice,
    pub broaden: Option<Broadening>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
}

const KNOWN_KEYS: [&str; 14] = [
    "route",
    "N",
    "T",
    "alpha",
    "lambda_y",
    "lambda_z",
    "omega_ratio",
    "excited",
    "grid",
    "broaden",
    "output",
    "format",
    "seed",
    "samples",
];

fn required<'a>(table: &'a Table, key: &str) -> Result<&'a Value> {
    table
        .get(key)
        .ok_or_else(|| Error::config(key, "required field is missing"))
}

fn as_str<'a>(v: &'a Value, field: &str) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| Error::config(field, format!("expected a string, got {}", v.type_str())))
}

fn as_f64(v: &Value, field: &str) -> Result<f64> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        other => Err(Error::config(field, format!("expected a number, got {}", other.type_str()))),
    }
}

fn as_u64(v: &Value, field: &str) -> Result<u64> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        Value::Integer(i) => Err(Error::config(field, format!("must be non-negative, got {i}"))),
        other => Err(Error::config(field, format!("expected an integer, got {}", other.type_str()))),
    }
}

fn positive(v: f64, field: &str) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::config(field, format!("must be positive and finite, got {v}")))
    }
}

/// Splits `"<value> <unit>"`.
fn tagged_quantity(s: &str, field: &str, units: &[&str]) -> Result<(f64, String)> {
    let mut parts = s.split_whitespace();
    let (Some(value), Some(unit), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(Error::config(
            field,
            format!("expected \"<value> <unit>\" with unit one of {units:?}, got `{s}`"),
        ));
    };
    let value: f64 = value
        .parse()
        .map_err(|_| Error::config(field, format!("bad number `{value}`")))?;
    if !units.contains(&unit) {
        return Err(Error::config(field, format!("unknown unit `{unit}`, expected one of {units:?}")));
    }
    Ok((value, unit.to_string()))
}

fn parse_excited(v: &Value) -> Result<Vec<ExcitedLine>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::config("excited", "expected an array of tables"))?;
    if arr.is_empty() {
        return Err(Error::config("excited", "at least one excited line is required"));
    }
    arr.iter()
        .enumerate()
        .map(|(i, item)| {
            let path = format!("excited[{i}]");
            let t = item
                .as_table()
                .ok_or_else(|| Error::config(&path, "expected a table { offset, dipole_sq }"))?;
            if let Some(k) = t.keys().find(|k| *k != "offset" && *k != "dipole_sq") {
                return Err(Error::config(format!("{path}.{k}"), "unknown key"));
            }
            let off_field = format!("{path}.offset");
            let offset_s = as_str(
                t.get("offset")
                    .ok_or_else(|| Error::config(&off_field, "required field is missing"))?,
                &off_field,
            )?;
            let (offset, _) = tagged_quantity(offset_s, &off_field, &["Omega"])?;
            if !offset.is_finite() {
                return Err(Error::config(&off_field, "must be finite"));
            }
            let d_field = format!("{path}.dipole_sq");
            let dipole_sq = as_f64(
                t.get("dipole_sq")
                    .ok_or_else(|| Error::config(&d_field, "required field is missing"))?,
                &d_field,
            )?;
            if !(dipole_sq >= 0.0 && dipole_sq.is_finite()) {
                return Err(Error::config(&d_field, format!("must be non-negative, got {dipole_sq}")));
            }
            Ok(ExcitedLine { offset, dipole_sq })
        })
        .collect()
}

impl ScenarioConfig {
    /// Parses and validates a scenario file.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::config("<document>", e.message().to_string()))?;
        if let Some(k) = table.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(Error::config(k.as_str(), "unknown key"));
        }

        let route: Route = as_str(required(&table, "route")?, "route")?
            .parse()
            .map_err(|e| Error::config("route", e))?;
        let n_atoms = as_u64(required(&table, "N")?, "N")?;
        if n_atoms == 0 {
            return Err(Error::config("N", "must be at least 1"));
        }
        let (t, unit) = tagged_quantity(as_str(required(&table, "T")?, "T")?, "T", &["EF", "hbarOmega"])?;
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::config("T", format!("must be non-negative, got {t}")));
        }
        let temperature = if unit == "EF" {
            Temperature::FermiUnits(t)
        } else {
            Temperature::TrapUnits(t)
        };
        let alpha = positive(as_f64(required(&table, "alpha")?, "alpha")?, "alpha")?;
        let lambda_y = positive(as_f64(required(&table, "lambda_y")?, "lambda_y")?, "lambda_y")?;
        let lambda_z = positive(as_f64(required(&table, "lambda_z")?, "lambda_z")?, "lambda_z")?;
        let omega_ratio = positive(as_f64(required(&table, "omega_ratio")?, "omega_ratio")?, "omega_ratio")?;
        let lines = parse_excited(required(&table, "excited")?)?;

        let grid = match table.get("grid") {
            None => GridChoice::Auto,
            Some(v) => GridChoice::parse(as_str(v, "grid")?).map_err(|e| Error::config("grid", e))?,
        };
        let broaden = match table.get("broaden") {
            None => None,
            Some(v) => Some(Broadening::parse(as_str(v, "broaden")?).map_err(|e| Error::config("broaden", e))?),
        };
        let output = table
            .get("output")
            .map(|v| as_str(v, "output").map(PathBuf::from))
            .transpose()?;
        let format = match table.get("format") {
            None => Format::Csv,
            Some(v) => as_str(v, "format")?.parse().map_err(|e| Error::config("format", e))?,
        };
        let seed = table.get("seed").map(|v| as_u64(v, "seed")).transpose()?;
        let samples = table.get("samples").map(|v| as_u64(v, "samples")).transpose()?;

        let trap = TrapSpec::new(lambda_y, lambda_z, omega_ratio).map_err(|e| Error::config("omega_ratio", e.to_string()))?;
        let light = LightSpec::new(alpha, lines).map_err(|e| Error::config("excited", e.to_string()))?;
        let cfg = Self {
            route,
            n_atoms,
            temperature,
            trap,
            light,
            grid,
            broaden,
            output,
            format,
            seed,
            samples,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Cross-field checks; also run after command-line overrides.
    pub fn validate(&self) -> Result<()> {
        if self.route == Route::McOracle {
            if self.seed.is_none() {
                return Err(Error::config("seed", "required for the mc_oracle route"));
            }
            match self.samples {
                None => return Err(Error::config("samples", "required for the mc_oracle route")),
                Some(0) => return Err(Error::config("samples", "must be positive")),
                Some(_) => {}
            }
        } else if self.samples.is_some() {
            return Err(Error::config("samples", "only used by the mc_oracle route"));
        }
        if self.broaden.is_some() && !matches!(self.route, Route::Exact | Route::Compare) {
            return Err(Error::config("broaden", "only the exact and compare routes take a broadening kernel"));
        }
        Ok(())
    }

    /// Canonical TOML text; parsing it gives back an equal configuration.
    pub fn to_toml_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "route = \"{}\"", self.route.name());
        let _ = writeln!(s, "N = {}", self.n_atoms);
        let _ = writeln!(s, "T = \"{}\"", self.temperature.tagged());
        let _ = writeln!(s, "alpha = {:?}", self.light.alpha);
        let _ = writeln!(s, "lambda_y = {:?}", self.trap.lambda_y);
        let _ = writeln!(s, "lambda_z = {:?}", self.trap.lambda_z);
        let _ = writeln!(s, "omega_ratio = {:?}", self.trap.omega_ratio);
        let lines: Vec<String> = self
            .light
            .lines
            .iter()
            .map(|l| format!("{{ offset = \"{:?} Omega\", dipole_sq = {:?} }}", l.offset, l.dipole_sq))
            .collect();
        let _ = writeln!(s, "excited = [{}]", lines.join(", "));
        let _ = writeln!(s, "grid = \"{}\"", self.grid.tagged());
        if let Some(b) = &self.broaden {
            let _ = writeln!(s, "broaden = \"{}:{:?}\"", b.kernel.name(), b.width);
        }
        if let Some(o) = &self.output {
            let _ = writeln!(s, "output = {}", Value::String(o.display().to_string()));
        }
        let _ = writeln!(s, "format = \"{}\"", self.format.extension());
        if let Some(seed) = self.seed {
            let _ = writeln!(s, "seed = {seed}");
        }
        if let Some(n) = self.samples {
            let _ = writeln!(s, "samples = {n}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
route = "tf_finite"
N = 10667
T = "0.25 EF"
alpha = 9.0
lambda_y = 1.0
lambda_z = 1.0
omega_ratio = 1.0
excited = [{ offset = "0 Omega", dipole_sq = 1.0 }]
"#;

    #[test]
    fn parses_minimal_config() {
        let c = ScenarioConfig::from_toml_str(BASE).unwrap();
        assert_eq!(c.route, Route::TfFinite);
        assert_eq!(c.temperature, Temperature::FermiUnits(0.25));
        assert_eq!(c.grid, GridChoice::Auto);
        assert_eq!(c.format, Format::Csv);
    }

    #[test]
    fn canonical_text_round_trips() {
        let text = format!("{BASE}grid = \"-10:250:501\"\nseed = 3\noutput = \"a b.csv\"\n");
        let c = ScenarioConfig::from_toml_str(&text).unwrap();
        let again = ScenarioConfig::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn unknown_and_untagged_fields_are_named() {
        let err = ScenarioConfig::from_toml_str(&format!("{BASE}colour = 1\n")).unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "colour"));
        let err = ScenarioConfig::from_toml_str(&BASE.replace("\"0.25 EF\"", "\"0.25\"")).unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "T"));
        let err = ScenarioConfig::from_toml_str(&BASE.replace("\"0 Omega\"", "\"0 Hz\"")).unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "excited[0].offset"));
    }

    #[test]
    fn mc_route_needs_seed_and_samples() {
        let text = BASE.replace("tf_finite", "mc_oracle");
        let err = ScenarioConfig::from_toml_str(&text).unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "seed"));
        let err = ScenarioConfig::from_toml_str(&format!("{text}seed = 1\n")).unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "samples"));
        assert!(ScenarioConfig::from_toml_str(&format!("{text}seed = 1\nsamples = 10000\n")).is_ok());
    }

    #[test]
    fn grid_and_broadening_strings() {
        assert_eq!(GridChoice::parse("auto").unwrap(), GridChoice::Auto);
        let GridChoice::Explicit(g) = GridChoice::parse("-5:5:11").unwrap() else { panic!() };
        assert_eq!((g.min, g.max, g.points), (-5.0, 5.0, 11));
        assert!(GridChoice::parse("5:-5:11").is_err());
        let b = Broadening::parse("gaussian:0.5").unwrap();
        assert_eq!((b.kernel, b.width), (Kernel::Gaussian, 0.5));
        assert!(Broadening::parse("boxcar:1").is_err());
        assert!(Broadening::parse("lorentzian:-1").is_err());
    }
}
