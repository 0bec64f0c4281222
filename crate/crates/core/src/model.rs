//! Dimensionless description of the trapped gas and its Fermi statistics.
//!
//! Units throughout the crate: ħ = M = Ω_g = 1. Energies and temperatures
//! (k_B T) are in ħΩ_g, detunings in Ω_g, wave vectors in (MΩ_g/ħ)^{1/2}.
//! With this choice the photon wave number is κ = √2·α and the recoil
//! shift ħκ²/2M equals α².

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{find_root, integrate, QuadOptions};

/// Trap geometry and the excited/ground trap-frequency ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapSpec {
    /// Ground-state trap frequency along x in rad/s. Only used to convert
    /// outputs to physical units; the numerics run with Ω_g = 1.
    pub omega_g: f64,
    pub lambda_y: f64,
    pub lambda_z: f64,
    /// Ω_ex / Ω_g.
    pub omega_ratio: f64,
}

impl TrapSpec {
    pub fn new(lambda_y: f64, lambda_z: f64, omega_ratio: f64) -> Result<Self> {
        Self::with_frequency(1.0, lambda_y, lambda_z, omega_ratio)
    }

    pub fn with_frequency(
        omega_g: f64,
        lambda_y: f64,
        lambda_z: f64,
        omega_ratio: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("omega_g", omega_g),
            ("lambda_y", lambda_y),
            ("lambda_z", lambda_z),
            ("omega_ratio", omega_ratio),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            omega_g,
            lambda_y,
            lambda_z,
            omega_ratio,
        })
    }

    pub fn isotropic() -> Self {
        Self {
            omega_g: 1.0,
            lambda_y: 1.0,
            lambda_z: 1.0,
            omega_ratio: 1.0,
        }
    }

    /// Cylindrically symmetric trap, λ_y = λ_z = λ, equal ground/excited frequencies.
    pub fn cylindrical(lambda: f64) -> Result<Self> {
        Self::new(lambda, lambda, 1.0)
    }

    /// m_ex = 1 − (Ω_ex/Ω_g)².
    pub fn m_ex(&self) -> f64 {
        mex_from_ratio(self.omega_ratio)
    }

    pub fn anisotropy_product(&self) -> f64 {
        self.lambda_y * self.lambda_z
    }

    pub fn equal_frequencies(&self) -> bool {
        self.omega_ratio == 1.0
    }

    pub fn is_isotropic(&self) -> bool {
        self.lambda_y == 1.0 && self.lambda_z == 1.0
    }

    /// Trap potential V(r) = (x² + λ_y² y² + λ_z² z²)/2 of the ground state.
    pub fn potential(&self, r: [f64; 3]) -> f64 {
        0.5 * (r[0] * r[0]
            + self.lambda_y * self.lambda_y * r[1] * r[1]
            + self.lambda_z * self.lambda_z * r[2] * r[2])
    }

    /// Ground-state single-atom Hamiltonian H_g(r, ħk) = k²/2 + V(r).
    pub fn hamiltonian(&self, r: [f64; 3], k: [f64; 3]) -> f64 {
        0.5 * (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) + self.potential(r)
    }
}

/// m_ex = 1 − ratio² for a ratio Ω_ex/Ω_g.
pub fn mex_from_ratio(omega_ratio: f64) -> f64 {
    1.0 - omega_ratio * omega_ratio
}

/// One excited electronic state: transition offset ω_{0,ex} (Ω_g units,
/// relative to a common reference) and squared dipole |d_ex|².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExcitedLine {
    pub offset: f64,
    pub dipole_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LightSpec {
    /// Lamb–Dicke parameter κ(ħ/2MΩ_g)^{1/2}.
    pub alpha: f64,
    pub lines: Vec<ExcitedLine>,
}

impl LightSpec {
    pub fn new(alpha: f64, lines: Vec<ExcitedLine>) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
        }
        if lines.is_empty() {
            return Err(Error::domain("at least one excited line is required"));
        }
        for (i, l) in lines.iter().enumerate() {
            if !(l.dipole_sq >= 0.0 && l.dipole_sq.is_finite()) {
                return Err(Error::domain(format!(
                    "line {i}: dipole_sq must be non-negative, got {}",
                    l.dipole_sq
                )));
            }
            if !l.offset.is_finite() {
                return Err(Error::domain(format!("line {i}: offset must be finite")));
            }
        }
        Ok(Self { alpha, lines })
    }

    /// A single excited state at zero offset with unit dipole.
    pub fn single(alpha: f64) -> Result<Self> {
        Self::new(
            alpha,
            vec![ExcitedLine {
                offset: 0.0,
                dipole_sq: 1.0,
            }],
        )
    }

    pub fn total_dipole_sq(&self) -> f64 {
        self.lines.iter().map(|l| l.dipole_sq).sum()
    }

    /// Photon wave number κ in units of (MΩ_g/ħ)^{1/2}.
    pub fn kappa(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.alpha
    }

    /// Recoil shift α²Ω_g = ħκ²/2M.
    pub fn recoil(&self) -> f64 {
        self.alpha * self.alpha
    }
}

/// Atom number, temperature and the derived Fermi quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasState {
    pub n_atoms: u64,
    /// k_B T in ħΩ_g.
    pub temperature: f64,
    pub fermi_energy: f64,
    pub chemical_potential: f64,
}

impl GasState {
    /// Builds the gas state, solving for μ(T) in the Thomas–Fermi continuum.
    pub fn new(n_atoms: u64, temperature: f64, trap: &TrapSpec) -> Result<Self> {
        let fermi_energy = fermi_energy(n_atoms, trap.lambda_y, trap.lambda_z)?;
        let chemical_potential =
            chemical_potential(n_atoms, temperature, trap.lambda_y, trap.lambda_z)?;
        Ok(Self {
            n_atoms,
            temperature,
            fermi_energy,
            chemical_potential,
        })
    }

    /// Same as [`GasState::new`] with the temperature given as k_B T / E_F.
    pub fn with_reduced_temperature(n_atoms: u64, t_over_ef: f64, trap: &TrapSpec) -> Result<Self> {
        let ef = fermi_energy(n_atoms, trap.lambda_y, trap.lambda_z)?;
        Self::new(n_atoms, t_over_ef * ef, trap)
    }

    /// βE_F (infinite at T = 0).
    pub fn degeneracy(&self) -> f64 {
        self.fermi_energy / self.temperature
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.temperature
    }
}

fn check_atoms_and_anisotropy(n: u64, lambda_y: f64, lambda_z: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("atom number must be at least 1"));
    }
    if !(lambda_y > 0.0 && lambda_z > 0.0) {
        return Err(Error::domain(format!(
            "anisotropies must be positive, got ({lambda_y}, {lambda_z})"
        )));
    }
    Ok(())
}

/// E_F = (6 λ_y λ_z N)^{1/3} in ħΩ_g.
pub fn fermi_energy(n: u64, lambda_y: f64, lambda_z: f64) -> Result<f64> {
    check_atoms_and_anisotropy(n, lambda_y, lambda_z)?;
    Ok((6.0 * lambda_y * lambda_z * n as f64).cbrt())
}

/// Fermi–Dirac occupation 1/(e^{(ε−μ)/T} + 1); a step function at T = 0.
pub fn fd_occupation(energy: f64, mu: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return match energy.partial_cmp(&mu) {
            Some(std::cmp::Ordering::Less) => 1.0,
            Some(std::cmp::Ordering::Equal) => 0.5,
            _ => 0.0,
        };
    }
    let x = (energy - mu) / temperature;
    if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// Thomas–Fermi density of states g(ε) = ε²/(2λ_yλ_z).
pub fn density_of_states(energy: f64, lambda_y: f64, lambda_z: f64) -> f64 {
    if energy <= 0.0 {
        0.0
    } else {
        energy * energy / (2.0 * lambda_y * lambda_z)
    }
}

/// N(μ, T) = ∫ g(ε) f(ε) dε over the continuum.
pub fn atom_number(mu: f64, temperature: f64, lambda_y: f64, lambda_z: f64) -> f64 {
    let norm = 2.0 * lambda_y * lambda_z;
    if temperature <= 0.0 {
        return if mu > 0.0 { mu.powi(3) / (3.0 * norm) } else { 0.0 };
    }
    let cut = mu.max(0.0) + 40.0 * temperature;
    let body = integrate(
        |e| e * e * fd_occupation(e, mu, temperature),
        0.0,
        cut,
        &[mu],
        QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-13,
            max_intervals: 4000,
        },
    );
    // beyond the cut f ≈ e^{-(ε-μ)/T}; integrate ε² times that exactly
    let t = temperature;
    let tail = t * (-(cut - mu) / t).exp() * (cut * cut + 2.0 * cut * t + 2.0 * t * t);
    (body.value + tail) / norm
}

/// Chemical potential from the continuum normalization N = ∫ g f dε.
pub fn chemical_potential(n: u64, temperature: f64, lambda_y: f64, lambda_z: f64) -> Result<f64> {
    let ef = fermi_energy(n, lambda_y, lambda_z)?;
    if !(temperature >= 0.0) || !temperature.is_finite() {
        return Err(Error::domain(format!(
            "temperature must be non-negative, got {temperature}"
        )));
    }
    if temperature == 0.0 {
        return Ok(ef);
    }
    let target = n as f64;
    let residual = |mu: f64| atom_number(mu, temperature, lambda_y, lambda_z) / target - 1.0;
    let hi = 2.0 * ef;
    let mut lo = -50.0 * temperature;
    let mut expansions = 0;
    while residual(lo) >= 0.0 {
        expansions += 1;
        if expansions > 60 {
            return Err(Error::Numerical(format!(
                "could not bracket chemical potential for N={n}, T={temperature}"
            )));
        }
        lo *= 2.0;
    }
    let scale = ef + temperature;
    find_root(residual, lo, hi, 1e-12 * scale)
}

/// Low-temperature expansion μ ≈ E_F(1 − (π²/3)(k_BT/E_F)²).
pub fn sommerfeld_mu(n: u64, temperature: f64, lambda_y: f64, lambda_z: f64) -> Result<f64> {
    let ef = fermi_energy(n, lambda_y, lambda_z)?;
    if temperature > ef {
        log::warn!(
            "Sommerfeld expansion used outside the degenerate regime (βE_F = {:.3})",
            ef / temperature
        );
    }
    let r = temperature / ef;
    Ok(ef * (1.0 - std::f64::consts::PI.powi(2) / 3.0 * r * r))
}

/// Non-degenerate limit μ ≈ k_BT ln((βE_F)³/6).
pub fn classical_mu(n: u64, temperature: f64, lambda_y: f64, lambda_z: f64) -> Result<f64> {
    let ef = fermi_energy(n, lambda_y, lambda_z)?;
    Ok(temperature * ((ef / temperature).powi(3) / 6.0).ln())
}
