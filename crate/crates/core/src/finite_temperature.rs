//! Finite-temperature Thomas–Fermi lineshape.
//!
//! Integrating the Fermi–Dirac phase-space density over the transverse
//! momenta leaves a one-dimensional integral over the scaled radius
//! y = (βV)^{1/2}:
//!
//!   I(ω) = 2T^{5/2}/(πα λ_yλ_z) ∫₀^∞ y² ln{1 + exp[βμ − y² − p(δ + m_ex T y²)²]} dy
//!
//! with δ = ω − ω_0 − α², p = β/4α² and m_ex = 1 − Ω_ex²/Ω_g². The prefactor
//! makes the frequency integral equal N; spectra are additionally normalized
//! on their grid so the sampled integral is exactly N·Σ|d_ex|².

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{GasState, LightSpec, TrapSpec};
use crate::numerics::{integrate, softplus, QuadOptions};
use crate::spectrum::{GridSpec, Spectrum, SpectrumMeta};

pub use crate::model::mex_from_ratio;

/// Log-argument below which the integrand is dropped.
const LOG_CUTOFF: f64 = 40.0;
/// Relative contour that bounds auto-chosen grids.
pub const GRID_CONTOUR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteTParams {
    pub temperature: f64,
    pub alpha: f64,
    /// βμ.
    pub beta_mu: f64,
    /// β/(4α²), in Ω_g⁻².
    pub p: f64,
    pub m_ex: f64,
    /// Recoil-shifted centre relative to the electronic offset.
    pub omega_max: f64,
    /// 1/(λ_yλ_z).
    pub aniso_factor: f64,
}

impl FiniteTParams {
    pub fn new(trap: &TrapSpec, light: &LightSpec, gas: &GasState) -> Result<Self> {
        if !(gas.temperature > 0.0) {
            return Err(Error::domain(format!(
                "finite-temperature lineshape needs T > 0 (got {}); use the zero-temperature closed form",
                gas.temperature
            )));
        }
        if !trap.equal_frequencies() && !trap.is_isotropic() {
            return Err(Error::Unsupported(
                "Ω_ex ≠ Ω_g is only handled for isotropic traps".into(),
            ));
        }
        let beta = 1.0 / gas.temperature;
        Ok(Self {
            temperature: gas.temperature,
            alpha: light.alpha,
            beta_mu: beta * gas.chemical_potential,
            p: beta / (4.0 * light.alpha * light.alpha),
            m_ex: mex_from_ratio(trap.omega_ratio),
            omega_max: light.recoil(),
            aniso_factor: 1.0 / trap.anisotropy_product(),
        })
    }

    fn prefactor(&self) -> f64 {
        2.0 * self.temperature.powf(2.5) / (std::f64::consts::PI * self.alpha) * self.aniso_factor
    }

    fn log_argument(&self, y: f64, delta: f64) -> f64 {
        let s = y * y;
        let shift = delta + self.m_ex * self.temperature * s;
        self.beta_mu - s - self.p * shift * shift
    }

    /// Points in y where the log-argument crosses zero or peaks.
    fn features(&self, delta: f64, y_cut: f64) -> Vec<f64> {
        let mt = self.m_ex * self.temperature;
        let (a, b, c) = (
            self.p * mt * mt,
            1.0 + 2.0 * self.p * delta * mt,
            self.p * delta * delta - self.beta_mu,
        );
        let mut s_points = Vec::with_capacity(3);
        if a == 0.0 {
            if b != 0.0 {
                s_points.push(-c / b);
            }
        } else {
            let disc = b * b - 4.0 * a * c;
            if disc >= 0.0 {
                let q = -0.5 * (b + b.signum() * disc.sqrt());
                s_points.push(q / a);
                if q != 0.0 {
                    s_points.push(c / q);
                }
            }
            s_points.push(-b / (2.0 * a));
        }
        s_points
            .into_iter()
            .filter(|&s| s > 0.0)
            .map(f64::sqrt)
            .filter(|&y| y < y_cut)
            .collect()
    }

    /// Absolutely normalized intensity per unit |d|² at detuning δ from ω_0 + α².
    pub fn unit_intensity(&self, delta: f64) -> f64 {
        let y_cut = (self.beta_mu.max(0.0) + LOG_CUTOFF).sqrt();
        let breaks = self.features(delta, y_cut);
        let r = integrate(
            |y| y * y * softplus(self.log_argument(y, delta)),
            0.0,
            y_cut,
            &breaks,
            QuadOptions {
                abs_tol: 0.0,
                rel_tol: 1e-8,
                max_intervals: 500,
            },
        );
        self.prefactor() * r.value
    }
}

/// Raw finite-T intensity at absolute detuning `omega` summed over excited lines.
/// Its frequency integral is N·Σ|d_ex|² up to quadrature error.
pub fn lineshape_finite_t(omega: f64, params: &FiniteTParams, light: &LightSpec) -> f64 {
    light
        .lines
        .iter()
        .map(|l| l.dipole_sq * params.unit_intensity(omega - l.offset - params.omega_max))
        .sum()
}

/// Grid bounded by the 10⁻⁶ contour of the lineshape, `points` long. Symmetric
/// about ω_0 + α² when m_ex = 0 and a single line is present.
pub fn auto_grid(trap: &TrapSpec, light: &LightSpec, gas: &GasState, points: usize) -> Result<GridSpec> {
    let params = FiniteTParams::new(trap, light, gas)?;
    let t = gas.temperature;
    let v_max = gas.chemical_potential.max(0.0) + LOG_CUTOFF * t;
    let doppler = light.kappa() * (2.0 * v_max).sqrt();
    let shift = -params.m_ex * v_max;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for l in &light.lines {
        let c = l.offset + params.omega_max;
        lo = lo.min(c + shift.min(0.0) - doppler);
        hi = hi.max(c + shift.max(0.0) + doppler);
    }

    let coarse = GridSpec::new(lo, hi, 801)?.values();
    let values: Vec<f64> = coarse
        .par_iter()
        .map(|&w| lineshape_finite_t(w, &params, light))
        .collect();
    let peak = values.iter().cloned().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::Numerical("finite-temperature lineshape vanished on the scan grid".into()));
    }
    let first = values.iter().position(|&v| v > GRID_CONTOUR * peak).unwrap_or(0);
    let last = values
        .iter()
        .rposition(|&v| v > GRID_CONTOUR * peak)
        .unwrap_or(values.len() - 1);
    let step = coarse[1] - coarse[0];
    let mut lo = coarse[first] - step;
    let mut hi = coarse[last] + step;
    if params.m_ex == 0.0 && light.lines.len() == 1 {
        let c = light.lines[0].offset + params.omega_max;
        let half = (c - lo).max(hi - c);
        lo = c - half;
        hi = c + half;
    }
    GridSpec::new(lo, hi, points)
}

/// Finite-temperature spectrum on `grid`, normalized to N·Σ|d_ex|².
pub fn spectrum_finite_t(
    grid: &[f64],
    trap: &TrapSpec,
    light: &LightSpec,
    gas: &GasState,
) -> Result<Spectrum> {
    let params = FiniteTParams::new(trap, light, gas)?;
    let intensity: Vec<f64> = grid
        .par_iter()
        .map(|&w| lineshape_finite_t(w, &params, light))
        .collect();
    let target = gas.n_atoms as f64 * light.total_dipole_sq();
    let mut meta = SpectrumMeta {
        method: "tf_finite".into(),
        target_weight: target,
        ..SpectrumMeta::default()
    };
    meta.extras.insert("beta_mu".into(), params.beta_mu);
    meta.extras.insert("m_ex".into(), params.m_ex);
    meta.extras.insert("p".into(), params.p);
    meta.extras.insert("omega_max".into(), params.omega_max);
    meta.extras.insert("aniso_factor".into(), params.aniso_factor);
    meta.extras.insert("temperature".into(), gas.temperature);
    meta.extras.insert("chemical_potential".into(), gas.chemical_potential);
    meta.extras.insert("fermi_energy".into(), gas.fermi_energy);
    let mut s = Spectrum::new(grid.to_vec(), intensity, meta)?;
    let raw = s.integral();
    s.meta.extras.insert("raw_integral".into(), raw);
    if !(raw > 0.0) {
        s.meta.warnings.push("lineshape vanished on the grid; not normalized".into());
        return Ok(s);
    }
    if (raw / target - 1.0).abs() > 1e-2 {
        s.meta
            .warnings
            .push(format!("grid captures {:.4} of the sum rule before normalization", raw / target));
    }
    s.normalize_to(target);
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(n: u64, t_over_ef: f64, ratio: f64) -> (TrapSpec, LightSpec, GasState) {
        let trap = TrapSpec::new(1.0, 1.0, ratio).unwrap();
        let light = LightSpec::single(9.0).unwrap();
        let gas = GasState::with_reduced_temperature(n, t_over_ef, &trap).unwrap();
        (trap, light, gas)
    }

    #[test]
    fn mex_examples() {
        assert_eq!(mex_from_ratio(1.0), 0.0);
        assert_eq!(mex_from_ratio(2.0), -3.0);
        assert_eq!(mex_from_ratio(0.5), 0.75);
    }

    #[test]
    fn zero_temperature_is_rejected() {
        let (trap, light, _) = setup(100, 0.1, 1.0);
        let gas = GasState::new(100, 0.0, &trap).unwrap();
        assert!(matches!(FiniteTParams::new(&trap, &light, &gas), Err(Error::Domain(_))));
    }

    #[test]
    fn anisotropic_unequal_frequencies_unsupported() {
        let trap = TrapSpec::new(2.0, 2.0, 1.1).unwrap();
        let light = LightSpec::single(3.0).unwrap();
        let gas = GasState::with_reduced_temperature(100, 0.2, &trap).unwrap();
        assert!(matches!(FiniteTParams::new(&trap, &light, &gas), Err(Error::Unsupported(_))));
    }

    #[test]
    fn raw_integral_matches_atom_number() {
        for (t, ratio) in [(0.1, 1.0), (0.25, 1.2), (0.25, 0.8), (2.0, 1.0)] {
            let (trap, light, gas) = setup(10_667, t, ratio);
            let grid = auto_grid(&trap, &light, &gas, 2001).unwrap().values();
            let s = spectrum_finite_t(&grid, &trap, &light, &gas).unwrap();
            let raw = s.meta.extras["raw_integral"];
            assert!((raw / 10_667.0 - 1.0).abs() < 1e-4, "T={t} ratio={ratio} raw={raw}");
            assert!((s.integral() / 10_667.0 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_without_trap_change() {
        let (trap, light, gas) = setup(500, 0.3, 1.0);
        let p = FiniteTParams::new(&trap, &light, &gas).unwrap();
        for d in [0.5, 7.0, 30.0] {
            let a = lineshape_finite_t(81.0 + d, &p, &light);
            let b = lineshape_finite_t(81.0 - d, &p, &light);
            assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()));
        }
    }

    #[test]
    fn anisotropic_factor_scales_intensity() {
        // same μ, T: the lineshape is proportional to 1/(λ_yλ_z)
        let light = LightSpec::single(2.0).unwrap();
        let iso = TrapSpec::isotropic();
        let aniso = TrapSpec::new(2.0, 3.0, 1.0).unwrap();
        let gas = GasState {
            n_atoms: 1,
            temperature: 0.7,
            fermi_energy: 1.0,
            chemical_potential: 2.0,
        };
        let a = lineshape_finite_t(5.0, &FiniteTParams::new(&iso, &light, &gas).unwrap(), &light);
        let b = lineshape_finite_t(5.0, &FiniteTParams::new(&aniso, &light, &gas).unwrap(), &light);
        assert!((a / b - 6.0).abs() < 1e-12);
    }
}
