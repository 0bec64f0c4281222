//! Scenario files, figure presets and the route dispatcher.

mod config;
mod presets;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use config::{Broadening, Format, GridChoice, Route, ScenarioConfig, Temperature};
pub use presets::{preset, PRESET_NAMES};

use crate::error::{Error, Result};
use crate::exact::{auto_line_grid, broaden, deposit_lines, exact_line_list, stick_grid, LineList, Truncation};
use crate::finite_temperature::{auto_grid, spectrum_finite_t};
use crate::model::{ExcitedLine, GasState, LightSpec, TrapSpec};
use crate::oracles::{mc_phase_space_spectrum, McConfig};
use crate::spectrum::{GridSpec, Spectrum, SpectrumMeta};
use crate::thomas_fermi::{default_grid, tf_lineshape_t0, TfZeroTParams, DEFAULT_POINTS};

/// Grid points used for auto-sized Monte Carlo histograms.
pub const MC_AUTO_POINTS: usize = 401;

/// Version string written into every output header.
pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// One named spectrum in an output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumBlock {
    pub name: String,
    pub spectrum: Spectrum,
}

/// Everything a run produces: the inputs, derived scalars and the spectra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumFile {
    pub code_version: String,
    /// Canonical scenario text; empty for bare spectra.
    pub config: String,
    /// Derived scalars (W, delta_paper, E_F, k_BT, μ, seed, ...).
    pub header: BTreeMap<String, f64>,
    pub blocks: Vec<SpectrumBlock>,
    /// Line list sidecar for the exact and compare routes.
    #[serde(skip)]
    pub lines: Option<LineList>,
}

impl SpectrumFile {
    /// Wraps a single spectrum with no scenario attached.
    pub fn from_spectrum(spectrum: Spectrum) -> Self {
        Self {
            code_version: CODE_VERSION.into(),
            config: String::new(),
            header: BTreeMap::new(),
            blocks: vec![SpectrumBlock {
                name: "total".into(),
                spectrum,
            }],
            lines: None,
        }
    }

    pub fn block(&self, name: &str) -> Option<&Spectrum> {
        self.blocks.iter().find(|b| b.name == name).map(|b| &b.spectrum)
    }
}

fn require_zero_temperature(cfg: &ScenarioConfig) -> Result<()> {
    if cfg.temperature.is_zero() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "the {} route is a T = 0 calculation; use tf_finite or mc_oracle for T > 0",
            cfg.route.name()
        )))
    }
}

fn explicit_values(grid: GridChoice) -> Option<Vec<f64>> {
    match grid {
        GridChoice::Auto => None,
        GridChoice::Explicit(g) => Some(g.values()),
    }
}

/// Union of two grids' ranges sampled at `step`, anchored on `a.min`.
fn union_grid(a: GridSpec, lo: f64, hi: f64, step: f64) -> Result<GridSpec> {
    let below = ((a.min - lo) / step).ceil().max(0.0);
    let above = ((hi - a.max) / step).ceil().max(0.0);
    let min = a.min - below * step;
    let max = a.max + above * step;
    GridSpec::new(min, max, ((max - min) / step).round() as usize + 1)
}

fn exact_spectrum(cfg: &ScenarioConfig, lines: &LineList, grid: &[f64]) -> Result<Spectrum> {
    match cfg.broaden {
        Some(b) => broaden(lines, b.kernel, b.width, grid),
        None => deposit_lines(lines, grid),
    }
}

fn exact_grid(cfg: &ScenarioConfig, lines: &LineList) -> Result<GridSpec> {
    match cfg.broaden {
        Some(b) => auto_line_grid(lines, b.width),
        None => stick_grid(lines),
    }
}

fn difference(exact: &Spectrum, tf: &Spectrum) -> Result<Spectrum> {
    let peak = tf.peak_value();
    let scale = if peak > 0.0 { 1.0 / peak } else { 1.0 };
    let values = exact
        .intensity
        .iter()
        .zip(&tf.intensity)
        .map(|(e, t)| (e - t) * scale)
        .collect();
    let mut meta = SpectrumMeta {
        method: "difference".into(),
        ..SpectrumMeta::default()
    };
    meta.extras.insert("tf_peak".into(), peak);
    Spectrum::new(exact.grid.clone(), values, meta)
}

struct RouteOutput {
    blocks: Vec<(String, Spectrum)>,
    lines: Option<LineList>,
}

fn run_route(cfg: &ScenarioConfig, trap: &TrapSpec, light: &LightSpec, gas: &GasState) -> Result<RouteOutput> {
    let n = cfg.n_atoms;
    match cfg.route {
        Route::Exact => {
            require_zero_temperature(cfg)?;
            let lines = exact_line_list(trap, light, n, Truncation::default())?;
            let grid = match explicit_values(cfg.grid) {
                Some(g) => g,
                None => exact_grid(cfg, &lines)?.values(),
            };
            let s = exact_spectrum(cfg, &lines, &grid)?;
            Ok(RouteOutput {
                blocks: vec![("spectrum".into(), s)],
                lines: Some(lines),
            })
        }
        Route::TfZero => {
            require_zero_temperature(cfg)?;
            let grid = match explicit_values(cfg.grid) {
                Some(g) => g,
                None => default_grid(&TfZeroTParams::new(trap, light, n)?, light)?.values(),
            };
            Ok(RouteOutput {
                blocks: vec![("spectrum".into(), tf_lineshape_t0(&grid, trap, light, n)?)],
                lines: None,
            })
        }
        Route::TfFinite => {
            let grid = match explicit_values(cfg.grid) {
                Some(g) => g,
                None => auto_grid(trap, light, gas, DEFAULT_POINTS)?.values(),
            };
            Ok(RouteOutput {
                blocks: vec![("spectrum".into(), spectrum_finite_t(&grid, trap, light, gas)?)],
                lines: None,
            })
        }
        Route::McOracle => {
            let grid = match explicit_values(cfg.grid) {
                Some(g) => g,
                None => {
                    let g = if gas.temperature > 0.0 {
                        auto_grid(trap, light, gas, MC_AUTO_POINTS)?
                    } else {
                        default_grid(&TfZeroTParams::new(trap, light, n)?, light)?
                    };
                    GridSpec::new(g.min, g.max, MC_AUTO_POINTS)?.values()
                }
            };
            let (Some(seed), Some(samples)) = (cfg.seed, cfg.samples) else {
                return Err(Error::config("seed", "mc_oracle needs seed and samples"));
            };
            let run = mc_phase_space_spectrum(trap, light, gas, &McConfig::new(samples, seed), &grid)?;
            let mut s = run.spectrum;
            s.meta.extras.insert("atom_estimate".into(), run.atom_estimate);
            s.meta.extras.insert("atom_estimate_sigma".into(), run.atom_estimate_sigma);
            Ok(RouteOutput {
                blocks: vec![("spectrum".into(), s)],
                lines: None,
            })
        }
        Route::Compare => {
            require_zero_temperature(cfg)?;
            let lines = exact_line_list(trap, light, n, Truncation::default())?;
            let grid = match explicit_values(cfg.grid) {
                Some(g) => g,
                None => {
                    let tf = default_grid(&TfZeroTParams::new(trap, light, n)?, light)?;
                    let base = exact_grid(cfg, &lines)?;
                    union_grid(base, tf.min, tf.max, base.step())?.values()
                }
            };
            let exact = exact_spectrum(cfg, &lines, &grid)?;
            let mut tf = tf_lineshape_t0(&grid, trap, light, n)?;
            tf.normalize_to(exact.integral());
            let diff = difference(&exact, &tf)?;
            Ok(RouteOutput {
                blocks: vec![("exact".into(), exact), ("tf".into(), tf), ("difference".into(), diff)],
                lines: Some(lines),
            })
        }
    }
}

/// Runs a validated scenario. Configurations with several excited lines
/// produce one block set per line (detuning relative to that line's offset)
/// followed by the summed spectrum.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<SpectrumFile> {
    cfg.validate()?;
    let trap = cfg.trap;
    let t = cfg.temperature.absolute(cfg.n_atoms, &trap)?;
    let gas = GasState::new(cfg.n_atoms, t, &trap)?;
    log::info!(
        "route {} with N = {}, k_BT = {t:.6} ħΩ, μ = {:.6} ħΩ",
        cfg.route.name(),
        cfg.n_atoms,
        gas.chemical_potential
    );

    let mut blocks = Vec::new();
    let mut lines = None;
    if cfg.light.lines.len() > 1 {
        for (i, l) in cfg.light.lines.iter().enumerate() {
            let single = LightSpec::new(
                cfg.light.alpha,
                vec![ExcitedLine {
                    offset: 0.0,
                    dipole_sq: l.dipole_sq,
                }],
            )?;
            let out = run_route(cfg, &trap, &single, &gas)?;
            for (name, s) in out.blocks {
                let name = if name == "spectrum" {
                    format!("excited[{i}]")
                } else {
                    format!("excited[{i}].{name}")
                };
                blocks.push(SpectrumBlock { name, spectrum: s });
            }
        }
    }
    let out = run_route(cfg, &trap, &cfg.light, &gas)?;
    for (name, s) in out.blocks {
        let name = if name == "spectrum" { "total".to_string() } else { name };
        blocks.push(SpectrumBlock { name, spectrum: s });
    }
    if out.lines.is_some() {
        lines = out.lines;
    }

    let tf = TfZeroTParams::new(&trap, &cfg.light, cfg.n_atoms)?;
    let mut header = BTreeMap::new();
    header.insert("W".into(), tf.half_width);
    header.insert("delta_paper".into(), tf.delta_paper);
    header.insert("fermi_energy".into(), gas.fermi_energy);
    header.insert("temperature".into(), gas.temperature);
    header.insert("chemical_potential".into(), gas.chemical_potential);
    header.insert("m_ex".into(), trap.m_ex());
    header.insert("target_weight".into(), cfg.n_atoms as f64 * cfg.light.total_dipole_sq());
    if cfg.route == Route::McOracle {
        if let (Some(seed), Some(samples)) = (cfg.seed, cfg.samples) {
            header.insert("seed".into(), seed as f64);
            header.insert("samples".into(), samples as f64);
        }
    }
    for b in &blocks {
        for w in &b.spectrum.meta.warnings {
            log::warn!("{}: {w}", b.name);
        }
    }
    Ok(SpectrumFile {
        code_version: CODE_VERSION.into(),
        config: cfg.to_toml_string(),
        header,
        blocks,
        lines,
    })
}
