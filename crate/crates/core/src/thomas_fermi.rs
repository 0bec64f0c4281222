//! Semiclassical (Thomas–Fermi) lineshape at zero temperature.
//!
//! Each phase-space cell (r, k) holds (2π)⁻³ f(H_g) atoms. With equal ground
//! and excited trap frequencies the transition frequency depends only on k_x,
//! ω = ω_0 + α² + κ k_x, so the line is the Doppler profile of the momentum
//! distribution. At T = 0 that distribution is ∝ (1 − k²/K_F²)^{3/2} and its
//! one-dimensional marginal gives the (1 − z²)^{5/2} lineshape with support
//! half-width W = κ K_F = 2α √E_F.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{fd_occupation, fermi_energy, LightSpec, TrapSpec};
use crate::numerics::{integrate, QuadOptions};
use crate::spectrum::{GridSpec, Spectrum, SpectrumMeta};

/// Default number of grid points for the closed-form route.
pub const DEFAULT_POINTS: usize = 2001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TfZeroTParams {
    pub n_atoms: u64,
    pub alpha: f64,
    pub lambda_y: f64,
    pub lambda_z: f64,
    pub fermi_energy: f64,
    /// K_F = √(2E_F) in (MΩ_g/ħ)^{1/2}.
    pub k_fermi: f64,
    /// α(6Nλ_yλ_z)^{1/6}, the half-width as printed alongside the closed form.
    pub delta_paper: f64,
    /// Support half-width of the Doppler marginal, ħκK_F/M = 2α(6Nλ_yλ_z)^{1/6}.
    pub half_width: f64,
}

impl TfZeroTParams {
    pub fn new(trap: &TrapSpec, light: &LightSpec, n_atoms: u64) -> Result<Self> {
        let ef = fermi_energy(n_atoms, trap.lambda_y, trap.lambda_z)?;
        let k_fermi = (2.0 * ef).sqrt();
        let sixth = (6.0 * n_atoms as f64 * trap.lambda_y * trap.lambda_z).powf(1.0 / 6.0);
        Ok(Self {
            n_atoms,
            alpha: light.alpha,
            lambda_y: trap.lambda_y,
            lambda_z: trap.lambda_z,
            fermi_energy: ef,
            k_fermi,
            delta_paper: light.alpha * sixth,
            half_width: light.kappa() * k_fermi,
        })
    }
}

/// Phase-space number density (2π)⁻³ / (e^{β(H_g − μ)} + 1).
pub fn phase_space_density(
    r: [f64; 3],
    k: [f64; 3],
    mu: f64,
    temperature: f64,
    trap: &TrapSpec,
) -> f64 {
    fd_occupation(trap.hamiltonian(r, k), mu, temperature) / (2.0 * PI).powi(3)
}

/// Zero-temperature momentum distribution (8N/π²K_F³)(1 − k²/K_F²)^{3/2}.
pub fn momentum_distribution_t0(k_mag: f64, n_atoms: u64, k_fermi: f64) -> f64 {
    let u = k_mag / k_fermi;
    if u >= 1.0 {
        return 0.0;
    }
    8.0 * n_atoms as f64 / (PI * PI * k_fermi.powi(3)) * (1.0 - u * u).powf(1.5)
}

/// Default grid: `DEFAULT_POINTS` points spanning every line centre ± 1.2W.
pub fn default_grid(params: &TfZeroTParams, light: &LightSpec) -> Result<GridSpec> {
    let recoil = light.recoil();
    let (lo, hi) = light.lines.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), l| {
        (lo.min(l.offset + recoil), hi.max(l.offset + recoil))
    });
    let span = 1.2 * params.half_width;
    GridSpec::new(lo - span, hi + span, DEFAULT_POINTS)
}

/// Closed-form T = 0 lineshape (16N/5πW) Σ|d_ex|² [1 − (ω − ω_max)²/W²]^{5/2}.
pub fn tf_lineshape_t0(
    grid: &[f64],
    trap: &TrapSpec,
    light: &LightSpec,
    n_atoms: u64,
) -> Result<Spectrum> {
    if !trap.equal_frequencies() {
        return Err(Error::Unsupported(format!(
            "closed-form lineshape needs Ω_ex = Ω_g (got ratio {}); use the finite-temperature route",
            trap.omega_ratio
        )));
    }
    let p = TfZeroTParams::new(trap, light, n_atoms)?;
    let w = p.half_width;
    let amplitude = 16.0 * n_atoms as f64 / (5.0 * PI * w);
    let intensity = grid
        .iter()
        .map(|&omega| {
            light
                .lines
                .iter()
                .map(|l| {
                    let z = (omega - l.offset - light.recoil()) / w;
                    if z.abs() >= 1.0 {
                        0.0
                    } else {
                        l.dipole_sq * amplitude * (1.0 - z * z).powf(2.5)
                    }
                })
                .sum()
        })
        .collect();
    let mut meta = SpectrumMeta {
        method: "tf_zero".into(),
        target_weight: n_atoms as f64 * light.total_dipole_sq(),
        ..SpectrumMeta::default()
    };
    meta.extras.insert("W".into(), w);
    meta.extras.insert("delta_paper".into(), p.delta_paper);
    meta.extras.insert("fermi_energy".into(), p.fermi_energy);
    meta.extras.insert("k_fermi".into(), p.k_fermi);
    meta.extras.insert("omega_max".into(), light.recoil());
    Spectrum::new(grid.to_vec(), intensity, meta)
}

/// Doppler profile obtained by integrating the T = 0 momentum distribution
/// over the transverse momenta at fixed k_x = (ω − α²)/κ. Independent of the
/// closed form; it is absolutely normalized to N for a unit dipole.
pub fn doppler_marginal_oracle(grid: &[f64], n_atoms: u64, k_fermi: f64, alpha: f64) -> Result<Spectrum> {
    if !(k_fermi > 0.0 && alpha > 0.0) {
        return Err(Error::domain("K_F and alpha must be positive"));
    }
    let kappa = std::f64::consts::SQRT_2 * alpha;
    let center = alpha * alpha;
    let intensity = grid
        .iter()
        .map(|&omega| {
            let kx = (omega - center) / kappa;
            let reach_sq = k_fermi * k_fermi - kx * kx;
            if reach_sq <= 0.0 {
                return 0.0;
            }
            let transverse = integrate(
                |kp| 2.0 * PI * kp * momentum_distribution_t0((kx * kx + kp * kp).sqrt(), n_atoms, k_fermi),
                0.0,
                reach_sq.sqrt(),
                &[],
                QuadOptions {
                    abs_tol: 0.0,
                    rel_tol: 1e-12,
                    max_intervals: 200,
                },
            );
            transverse.value / kappa
        })
        .collect();
    let mut meta = SpectrumMeta {
        method: "doppler_marginal_oracle".into(),
        target_weight: n_atoms as f64,
        ..SpectrumMeta::default()
    };
    meta.extras.insert("W".into(), kappa * k_fermi);
    Spectrum::new(grid.to_vec(), intensity, meta)
}
