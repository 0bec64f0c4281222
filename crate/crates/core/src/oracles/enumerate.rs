//! Brute-force listing of the trap's single-particle states.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapState {
    pub n_x: u32,
    pub n_y: u32,
    pub n_z: u32,
    /// Full level energy (n_x + λ_y n_y + λ_z n_z) + (1 + λ_y + λ_z)/2 in ħΩ_g.
    pub energy: f64,
}

impl TrapState {
    /// Excitation above the zero-point energy.
    pub fn excitation(&self, lambda_y: f64, lambda_z: f64) -> f64 {
        self.energy - 0.5 * (1.0 + lambda_y + lambda_z)
    }
}

/// Every state with n_x + λ_y n_y + λ_z n_z ≤ `bound`, sorted by energy and
/// then lexicographically by (n_x, n_y, n_z).
pub fn enumerate_states(bound: f64, lambda_y: f64, lambda_z: f64) -> Result<Vec<TrapState>> {
    if !(bound >= 0.0) {
        return Err(Error::domain("enumeration bound must be non-negative"));
    }
    if !(lambda_y > 0.0 && lambda_z > 0.0) {
        return Err(Error::domain("anisotropies must be positive"));
    }
    let zero_point = 0.5 * (1.0 + lambda_y + lambda_z);
    let tol = 1e-9;
    let mut states = Vec::new();
    let mut n_x = 0u32;
    while n_x as f64 <= bound + tol {
        let mut n_y = 0u32;
        while n_x as f64 + lambda_y * n_y as f64 <= bound + tol {
            let mut n_z = 0u32;
            loop {
                let e = n_x as f64 + lambda_y * n_y as f64 + lambda_z * n_z as f64;
                if e > bound + tol {
                    break;
                }
                states.push(TrapState {
                    n_x,
                    n_y,
                    n_z,
                    energy: e + zero_point,
                });
                n_z += 1;
            }
            n_y += 1;
        }
        n_x += 1;
    }
    states.sort_by(|a, b| {
        a.energy
            .total_cmp(&b.energy)
            .then((a.n_x, a.n_y, a.n_z).cmp(&(b.n_x, b.n_y, b.n_z)))
    });
    Ok(states)
}
