//! Rejection sampling of the Fermi–Dirac phase-space density, histogramming
//! each atom's transition frequency ω = ω_0 + α² + κk_x − m_ex V(r).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{fd_occupation, GasState, LightSpec, TrapSpec};
use crate::spectrum::{bin_widths, Spectrum, SpectrumMeta};

/// Acceptance rates below this abort the run.
pub const MIN_ACCEPTANCE: f64 = 1e-4;
/// The sampled region reaches this many k_BT above max(μ, 0).
pub const BOX_MARGIN_KT: f64 = 20.0;
const STREAMS: u64 = 64;
const PILOT_PROPOSALS: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    /// Accepted samples to draw.
    pub samples: u64,
    pub seed: u64,
    /// Upper bound on f(H); the proposal is accepted with probability f/bound.
    pub envelope_bound: f64,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            envelope_bound: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McRun {
    pub spectrum: Spectrum,
    pub proposals: u64,
    pub accepted: u64,
    /// Phase-space volume of the sampling box in units of (2π)³ cells.
    pub box_cells: f64,
    /// Acceptance rate × box volume: an estimate of N.
    pub atom_estimate: f64,
    pub atom_estimate_sigma: f64,
}

/// Uniform proposals over the phase-space region H_g ≤ E_box. In the scaled
/// coordinates (x, λ_y y, λ_z z, k) this region is a 6-ball of radius
/// √(2E_box), so a proposal's energy is E_box·U^{1/3} and its direction is
/// uniform on the 5-sphere. The direction is independent of the accept test
/// and is only drawn for accepted points.
struct Sampler {
    e_box: f64,
    mu: f64,
    temperature: f64,
    bound: f64,
}

impl Sampler {
    /// Returns (k_x, V) for an accepted proposal.
    fn propose(&self, rng: &mut ChaCha8Rng) -> Option<(f64, f64)> {
        let h = self.e_box * rng.random::<f64>().cbrt();
        let f = fd_occupation(h, self.mu, self.temperature);
        if rng.random::<f64>() * self.bound >= f {
            return None;
        }
        let g: [f64; 6] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let norm_sq: f64 = g.iter().map(|v| v * v).sum();
        let position_sq: f64 = g[..3].iter().map(|v| v * v).sum();
        let kx = (2.0 * h / norm_sq).sqrt() * g[3];
        Some((kx, h * position_sq / norm_sq))
    }
}

struct StreamTally {
    proposals: u64,
    accepted: u64,
    counts: Vec<Vec<u64>>,
    outside: Vec<u64>,
}

/// Monte Carlo estimate of the lineshape on `grid` (bin centres), normalized
/// so every sample carries N·|d_ex|²/samples. Deterministic for a given seed.
pub fn mc_phase_space_spectrum(
    trap: &TrapSpec,
    light: &LightSpec,
    gas: &GasState,
    mc: &McConfig,
    grid: &[f64],
) -> Result<McRun> {
    if mc.samples == 0 {
        return Err(Error::domain("sample count must be positive"));
    }
    if !(mc.envelope_bound >= 1.0) {
        return Err(Error::domain("envelope bound must be at least the peak occupation 1"));
    }
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("histogram grid must be strictly increasing"));
    }
    if !(gas.temperature >= 0.0) {
        return Err(Error::domain("temperature must be non-negative"));
    }
    if !trap.equal_frequencies() && !trap.is_isotropic() {
        return Err(Error::Unsupported(
            "Ω_ex ≠ Ω_g is only handled for isotropic traps".into(),
        ));
    }

    let e_box = gas.chemical_potential.max(0.0) + BOX_MARGIN_KT * gas.temperature;
    if !(e_box > 0.0) {
        return Err(Error::domain("sampling box is empty (μ ≤ 0 at T = 0)"));
    }
    let sampler = Sampler {
        e_box,
        mu: gas.chemical_potential,
        temperature: gas.temperature,
        bound: mc.envelope_bound,
    };
    // (π³/6)(2E)³ / (λ_yλ_z (2π)³)
    let box_cells = e_box.powi(3) / (6.0 * trap.anisotropy_product());

    let edges: Vec<f64> = grid.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let last = grid.len() - 1;
    let lo = grid[0] - 0.5 * (grid[1] - grid[0]);
    let hi = grid[last] + 0.5 * (grid[last] - grid[last - 1]);
    let kappa = light.kappa();
    let m_ex = trap.m_ex();
    let centers: Vec<f64> = light.lines.iter().map(|l| l.offset + light.recoil()).collect();

    let per_stream = mc.samples / STREAMS;
    let extra = mc.samples % STREAMS;
    let tallies: Vec<Result<StreamTally>> = (0..STREAMS)
        .into_par_iter()
        .map(|stream| {
            let target = per_stream + u64::from(stream < extra);
            let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
            rng.set_stream(stream);
            let mut tally = StreamTally {
                proposals: 0,
                accepted: 0,
                counts: vec![vec![0; grid.len()]; centers.len()],
                outside: vec![0; centers.len()],
            };
            while tally.accepted < target {
                tally.proposals += 1;
                if tally.proposals == PILOT_PROPOSALS
                    && (tally.accepted as f64) < MIN_ACCEPTANCE * PILOT_PROPOSALS as f64
                {
                    return Err(Error::Envelope {
                        rate: tally.accepted as f64 / PILOT_PROPOSALS as f64,
                        min: MIN_ACCEPTANCE,
                    });
                }
                let Some((kx, v)) = sampler.propose(&mut rng) else { continue };
                tally.accepted += 1;
                let delta = kappa * kx - m_ex * v;
                for (i, c) in centers.iter().enumerate() {
                    let w = c + delta;
                    if w < lo || w >= hi {
                        tally.outside[i] += 1;
                        continue;
                    }
                    let bin = edges.partition_point(|&e| e <= w);
                    tally.counts[i][bin] += 1;
                }
            }
            Ok(tally)
        })
        .collect();

    let mut proposals = 0;
    let mut accepted = 0;
    let mut counts = vec![vec![0u64; grid.len()]; centers.len()];
    let mut outside = vec![0u64; centers.len()];
    for t in tallies {
        let t = t?;
        proposals += t.proposals;
        accepted += t.accepted;
        for (acc, c) in counts.iter_mut().zip(&t.counts) {
            acc.iter_mut().zip(c).for_each(|(a, b)| *a += b);
        }
        outside.iter_mut().zip(&t.outside).for_each(|(a, b)| *a += b);
    }
    let rate = accepted as f64 / proposals as f64;
    if rate < MIN_ACCEPTANCE {
        return Err(Error::Envelope {
            rate,
            min: MIN_ACCEPTANCE,
        });
    }

    let n = gas.n_atoms as f64;
    let widths = bin_widths(grid);
    let mut intensity = vec![0.0; grid.len()];
    let mut clipped = 0.0;
    for ((line, c), out) in light.lines.iter().zip(&counts).zip(&outside) {
        let per_sample = n * line.dipole_sq / accepted as f64;
        for (i, &k) in c.iter().enumerate() {
            intensity[i] += per_sample * k as f64 / widths[i];
        }
        clipped += per_sample * *out as f64;
    }

    let mut meta = SpectrumMeta {
        method: "mc_oracle".into(),
        target_weight: n * light.total_dipole_sq(),
        clipped_weight: clipped,
        ..SpectrumMeta::default()
    };
    meta.extras.insert("seed".into(), mc.seed as f64);
    meta.extras.insert("samples".into(), mc.samples as f64);
    meta.extras.insert("acceptance_rate".into(), rate);
    meta.extras.insert("m_ex".into(), m_ex);
    meta.extras.insert("temperature".into(), gas.temperature);
    meta.extras.insert("chemical_potential".into(), gas.chemical_potential);
    let spectrum = Spectrum::new(grid.to_vec(), intensity, meta)?;
    let cells = box_cells / mc.envelope_bound;
    Ok(McRun {
        spectrum,
        proposals,
        accepted,
        box_cells,
        atom_estimate: rate * cells,
        atom_estimate_sigma: cells * (rate * (1.0 - rate) / proposals as f64).sqrt(),
    })
}
