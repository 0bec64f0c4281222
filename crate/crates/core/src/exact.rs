//! Exact zero-temperature line list from the discrete trap levels.
//!
//! Atoms fill the levels n_x + λ_y n_y + λ_z n_z from the bottom. Absorption
//! changes the x quantum number by the sideband index m; the weight of each
//! sideband is the occupied-state count at fixed n_x times the squared recoil
//! matrix element |⟨n_x+m| e^{iκx} |n_x⟩|².

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{LightSpec, TrapSpec};
use crate::numerics::ln_factorial;
use crate::spectrum::{bin_widths, GridSpec, Kernel, Spectrum, SpectrumMeta};

/// Two level energies closer than this are one shell.
pub const LEVEL_TIE_TOLERANCE: f64 = 1e-9;

/// Number of (n_y, n_z) pairs with λ_y n_y + λ_z n_z ≤ `budget`.
fn transverse_count(budget: f64, lambda_y: f64, lambda_z: f64) -> u64 {
    if budget < -LEVEL_TIE_TOLERANCE {
        return 0;
    }
    let budget = budget + LEVEL_TIE_TOLERANCE;
    let ny_max = (budget / lambda_y).floor() as u64;
    (0..=ny_max)
        .map(|ny| {
            let rest = budget - lambda_y * ny as f64;
            if rest < 0.0 {
                0
            } else {
                (rest / lambda_z).floor() as u64 + 1
            }
        })
        .sum()
}

/// K_x: number of occupied (n_y, n_z) pairs for fixed n_x below the Fermi number.
pub fn degeneracy_kx(n_x: u32, n_fermi: u32, lambda_y: f64, lambda_z: f64) -> u64 {
    if n_x > n_fermi {
        return 0;
    }
    transverse_count((n_fermi - n_x) as f64, lambda_y, lambda_z)
}

/// Closed form of K_x for λ_y = λ_z = λ: ([q]+1)([q]+2)/2 with q = (n_F − n_x)/λ.
pub fn degeneracy_kx_cylindric(n_x: u32, n_fermi: u32, lambda: f64) -> u64 {
    if n_x > n_fermi {
        return 0;
    }
    let q = ((n_fermi - n_x) as f64 / lambda + LEVEL_TIE_TOLERANCE).floor() as u64;
    (q + 1) * (q + 2) / 2
}

/// Ground-state filling of the trap levels by N fermions at T = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellFilling {
    /// Smallest integer n_F with at least N states at n_x + λ_y n_y + λ_z n_z ≤ n_F.
    pub n_fermi: u32,
    /// Energy (above the zero point, ħΩ_g units) of the highest occupied level.
    pub top_level: f64,
    /// Fraction of the top level's degenerate states that is occupied.
    pub top_shell_fraction: f64,
    pub top_shell_states: u64,
    /// Occupied weight per n_x; sums to N.
    pub occupancy: Vec<f64>,
}

impl ShellFilling {
    pub fn total(&self) -> f64 {
        self.occupancy.iter().sum()
    }
}

fn check_filling_inputs(n: u64, lambda_y: f64, lambda_z: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("atom number must be at least 1"));
    }
    if !(lambda_y > 0.0 && lambda_z > 0.0) {
        return Err(Error::domain("anisotropies must be positive"));
    }
    Ok(())
}

/// Fills N atoms into the trap levels, uniformly sharing the top shell if it
/// is only partly occupied.
pub fn shell_filling(n: u64, lambda_y: f64, lambda_z: f64) -> Result<ShellFilling> {
    check_filling_inputs(n, lambda_y, lambda_z)?;
    let count_below = |e: f64| -> u64 {
        let nx_max = (e + LEVEL_TIE_TOLERANCE).floor().max(-1.0);
        if nx_max < 0.0 {
            return 0;
        }
        (0..=nx_max as u64)
            .map(|nx| transverse_count(e - nx as f64, lambda_y, lambda_z))
            .sum()
    };

    // energy cut that surely holds N states
    let mut cut = (6.0 * lambda_y * lambda_z * n as f64).cbrt().max(1.0);
    while count_below(cut) < n {
        cut *= 1.5;
    }

    let mut energies = Vec::new();
    let nx_max = (cut + LEVEL_TIE_TOLERANCE).floor() as u64;
    for nx in 0..=nx_max {
        let ny_max = ((cut - nx as f64) / lambda_y + LEVEL_TIE_TOLERANCE).floor() as u64;
        for ny in 0..=ny_max {
            let base = nx as f64 + lambda_y * ny as f64;
            let mut nz = 0u64;
            while base + lambda_z * nz as f64 <= cut + LEVEL_TIE_TOLERANCE {
                energies.push(base + lambda_z * nz as f64);
                nz += 1;
            }
        }
    }
    energies.sort_by(f64::total_cmp);
    let top_level = energies[(n - 1) as usize];

    let full_cut = top_level - 2.0 * LEVEL_TIE_TOLERANCE;
    let below = count_below(full_cut);
    let through = count_below(top_level);
    let top_shell_states = through - below;
    let top_shell_fraction = (n - below) as f64 / top_shell_states as f64;

    let n_fermi = (top_level - LEVEL_TIE_TOLERANCE).ceil().max(0.0) as u32;
    let nx_top = (top_level + LEVEL_TIE_TOLERANCE).floor() as u64;
    let occupancy = (0..=nx_top)
        .map(|nx| {
            let full = transverse_count(full_cut - nx as f64, lambda_y, lambda_z);
            let upto = transverse_count(top_level - nx as f64, lambda_y, lambda_z);
            full as f64 + top_shell_fraction * (upto - full) as f64
        })
        .collect();

    Ok(ShellFilling {
        n_fermi,
        top_level,
        top_shell_fraction,
        top_shell_states,
        occupancy,
    })
}

/// Fermi number n_F and the occupied fraction of the outermost shell.
pub fn fermi_number(n: u64, lambda_y: f64, lambda_z: f64) -> Result<(u32, f64)> {
    let f = shell_filling(n, lambda_y, lambda_z)?;
    Ok((f.n_fermi, f.top_shell_fraction))
}

/// Squared recoil matrix element |⟨n+m| e^{iκx} |n⟩|² for Lamb–Dicke parameter α.
///
/// Evaluated as e^{−α²} α^{2|m|} (n_<!/n_>!) [L_{n_<}^{|m|}(α²)]² with the
/// Laguerre polynomial from its three-term recurrence. The recurrence is
/// rescaled whenever it grows large and all factorials and powers are
/// combined in the log domain.
pub fn franck_condon_factor(n: u32, m: i64, alpha: f64) -> Result<f64> {
    if n as i64 + m < 0 {
        return Err(Error::domain(format!("final level n+m = {} is negative", n as i64 + m)));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::domain(format!("alpha must be non-negative, got {alpha}")));
    }
    Ok(fc_unchecked(n as u64, m, alpha * alpha))
}

pub(crate) fn fc_unchecked(n: u64, m: i64, x: f64) -> f64 {
    let k = m.unsigned_abs();
    let lower = if m >= 0 { n } else { n - k };
    if x == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let (laguerre, log_scale) = scaled_laguerre(lower, k as f64, x);
    if laguerre == 0.0 {
        return 0.0;
    }
    let log_w = -x + k as f64 * x.ln() + ln_factorial(lower) - ln_factorial(lower + k)
        + 2.0 * (laguerre.abs().ln() + log_scale);
    log_w.exp()
}

/// Generalized Laguerre L_n^{k}(x) as `value · e^{log_scale}`.
fn scaled_laguerre(n: u64, k: f64, x: f64) -> (f64, f64) {
    const BIG: f64 = 1e150;
    let mut prev = 1.0;
    if n == 0 {
        return (prev, 0.0);
    }
    let mut cur = 1.0 + k - x;
    let mut log_scale = 0.0;
    for i in 1..n {
        let fi = i as f64;
        let next = ((2.0 * fi + 1.0 + k - x) * cur - (fi + k) * prev) / (fi + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            prev /= BIG;
            cur /= BIG;
            log_scale += BIG.ln();
        }
    }
    (cur, log_scale)
}

/// How far to carry the sideband sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Truncation {
    /// Stop past the classical sideband edge once a sideband's weight drops
    /// below `tolerance` times the total, capped at 4α² + 10α + n_F.
    Adaptive { tolerance: f64 },
    /// Use sidebands up to and including this m.
    Fixed(i64),
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::Adaptive { tolerance: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    /// Index into `LightSpec::lines`.
    pub excited: usize,
    /// Sideband index.
    pub m: i64,
    /// ω_{0,ex} offset + mΩ_g.
    pub detuning: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineList {
    pub lines: Vec<Line>,
    pub total_weight: f64,
    /// N·Σ|d_ex|² minus `total_weight`: the weight cut off by truncation.
    pub truncated_weight: f64,
    pub n_fermi: u32,
    pub m_min: i64,
    pub m_max: i64,
}

impl LineList {
    /// Sideband weights (m, weight) of one excited state, in increasing m.
    pub fn envelope(&self, excited: usize) -> Vec<(i64, f64)> {
        self.lines
            .iter()
            .filter(|l| l.excited == excited)
            .map(|l| (l.m, l.weight))
            .collect()
    }
}

/// Count of strict interior local maxima of a sequence.
pub fn interior_local_maxima(values: &[f64]) -> usize {
    values
        .windows(3)
        .filter(|w| w[1] > w[0] && w[1] > w[2])
        .count()
}

/// Builds the T = 0 line list for Ω_ex = Ω_g.
pub fn exact_line_list(
    trap: &TrapSpec,
    light: &LightSpec,
    n: u64,
    truncation: Truncation,
) -> Result<LineList> {
    if !trap.equal_frequencies() {
        return Err(Error::Unsupported(format!(
            "exact summation requires Ω_ex = Ω_g (got ratio {}); use the Thomas-Fermi finite-temperature route",
            trap.omega_ratio
        )));
    }
    let filling = shell_filling(n, trap.lambda_y, trap.lambda_z)?;
    let x = light.alpha * light.alpha;
    let n_top = filling.occupancy.len() as i64 - 1;
    let m_min = -n_top;
    let atoms = n as f64;

    let row = |m: i64| -> f64 {
        filling
            .occupancy
            .iter()
            .enumerate()
            .filter(|(nx, _)| *nx as i64 + m >= 0)
            .map(|(nx, occ)| occ * fc_unchecked(nx as u64, m, x))
            .sum()
    };

    let cap = (4.0 * x + 10.0 * light.alpha).ceil() as i64 + filling.n_fermi as i64;
    let mut envelope = Vec::new();
    match truncation {
        Truncation::Fixed(m_max) => {
            for m in m_min..=m_max.max(m_min) {
                envelope.push(row(m));
            }
        }
        Truncation::Adaptive { tolerance } => {
            let edge = x + 2.0 * light.alpha * (n_top as f64 + 0.5).sqrt();
            let mut m = m_min;
            loop {
                let w = row(m);
                envelope.push(w);
                if m as f64 > edge && w < tolerance * 1e-6 * atoms {
                    break;
                }
                if m >= cap {
                    log::warn!("sideband sum reached its cap m = {cap}");
                    break;
                }
                m += 1;
            }
        }
    }
    let m_max = m_min + envelope.len() as i64 - 1;

    let mut lines = Vec::with_capacity(envelope.len() * light.lines.len());
    for (ex, line) in light.lines.iter().enumerate() {
        for (i, &w) in envelope.iter().enumerate() {
            let m = m_min + i as i64;
            lines.push(Line {
                excited: ex,
                m,
                detuning: line.offset + m as f64,
                weight: line.dipole_sq * w,
            });
        }
    }
    let total_weight: f64 = lines.iter().map(|l| l.weight).sum();
    Ok(LineList {
        lines,
        total_weight,
        truncated_weight: atoms * light.total_dipole_sq() - total_weight,
        n_fermi: filling.n_fermi,
        m_min,
        m_max,
    })
}

/// Grid covering every line carrying more than 10⁻¹² of the total weight,
/// padded by six kernel widths, sampled at a fifth of a width.
pub fn auto_line_grid(lines: &LineList, width: f64) -> Result<GridSpec> {
    let floor = 1e-12 * lines.total_weight;
    let significant = lines.lines.iter().filter(|l| l.weight > floor);
    let (lo, hi) = significant.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), l| {
        (lo.min(l.detuning), hi.max(l.detuning))
    });
    if !lo.is_finite() {
        return Err(Error::domain("line list carries no weight"));
    }
    let (lo, hi) = (lo - 6.0 * width, hi + 6.0 * width);
    let points = ((hi - lo) / (0.2 * width)).ceil() as usize + 1;
    GridSpec::new(lo, hi, points)
}

/// Unit-spaced grid spanning every line above 10⁻¹² of the total weight,
/// one Ω_g step beyond the outermost lines and aligned with the first line.
pub fn stick_grid(lines: &LineList) -> Result<GridSpec> {
    let floor = 1e-12 * lines.total_weight;
    let significant: Vec<&Line> = lines.lines.iter().filter(|l| l.weight > floor).collect();
    let Some(first) = significant.first() else {
        return Err(Error::domain("line list carries no weight"));
    };
    let anchor = first.detuning;
    let (lo, hi) = significant.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), l| {
        (lo.min(l.detuning), hi.max(l.detuning))
    });
    let lo = anchor + (lo - anchor).floor() - 1.0;
    let hi = anchor + (hi - anchor).ceil() + 1.0;
    GridSpec::new(lo, hi, (hi - lo).round() as usize + 1)
}

/// Unbroadened lines as a density: each weight is shared linearly between the
/// two grid points around its detuning and divided by the bin width, so a
/// line sitting on a unit-spaced grid point contributes its weight per Ω_g.
pub fn deposit_lines(lines: &LineList, grid: &[f64]) -> Result<Spectrum> {
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("stick grid must be strictly increasing with at least two points"));
    }
    let widths = bin_widths(grid);
    let mut intensity = vec![0.0; grid.len()];
    let mut clipped = 0.0;
    let (g0, g1) = (grid[0], grid[grid.len() - 1]);
    for l in &lines.lines {
        if l.detuning < g0 || l.detuning > g1 {
            clipped += l.weight;
            continue;
        }
        let i = grid.partition_point(|&g| g <= l.detuning).clamp(1, grid.len() - 1);
        let (a, b) = (grid[i - 1], grid[i]);
        let right = (l.detuning - a) / (b - a);
        intensity[i - 1] += l.weight * (1.0 - right) / widths[i - 1];
        intensity[i] += l.weight * right / widths[i];
    }
    let mut meta = SpectrumMeta {
        method: "exact".into(),
        target_weight: lines.total_weight,
        clipped_weight: clipped,
        ..SpectrumMeta::default()
    };
    if clipped > 1e-12 * lines.total_weight {
        meta.warnings.push(format!("grid does not cover all lines; clipped weight {clipped:.6e}"));
    }
    if lines.lines.is_empty() {
        meta.warnings.push("empty line list".into());
    }
    meta.extras.insert("n_fermi".into(), lines.n_fermi as f64);
    meta.extras.insert("truncated_weight".into(), lines.truncated_weight);
    Spectrum::new(grid.to_vec(), intensity, meta)
}

/// Replaces each delta line by a unit-normalized kernel of the given width.
pub fn broaden(lines: &LineList, kernel: Kernel, width: f64, grid: &[f64]) -> Result<Spectrum> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::domain(format!("broadening width must be positive, got {width}")));
    }
    let mut meta = SpectrumMeta {
        method: "exact".into(),
        kernel: Some(kernel),
        width: Some(width),
        target_weight: lines.total_weight,
        ..SpectrumMeta::default()
    };
    if lines.lines.is_empty() {
        meta.warnings.push("empty line list".into());
        return Spectrum::new(grid.to_vec(), vec![0.0; grid.len()], meta);
    }
    if grid.len() < 2 {
        return Err(Error::domain("broadening grid needs at least two points"));
    }
    let (g0, g1) = (grid[0], grid[grid.len() - 1]);
    let clipped: f64 = lines
        .lines
        .iter()
        .map(|l| {
            l.weight * (kernel.cdf(g0 - l.detuning, width) + 1.0 - kernel.cdf(g1 - l.detuning, width))
        })
        .sum();
    let uncovered = lines
        .lines
        .iter()
        .any(|l| l.weight > 0.0 && (l.detuning - 6.0 * width < g0 || l.detuning + 6.0 * width > g1));
    if uncovered && clipped > 1e-12 * lines.total_weight {
        log::warn!("broadening grid clips {clipped:.3e} of the line weight");
        meta.warnings
            .push(format!("grid does not cover all lines ± 6 widths; clipped weight {clipped:.6e}"));
    }
    meta.clipped_weight = clipped;

    let active: Vec<&Line> = lines.lines.iter().filter(|l| l.weight > 0.0).collect();
    let reach = match kernel {
        Kernel::Gaussian => 40.0 * width,
        Kernel::Lorentzian => f64::INFINITY,
    };
    let intensity = grid
        .par_iter()
        .map(|&w| {
            active
                .iter()
                .filter(|l| (w - l.detuning).abs() <= reach)
                .map(|l| l.weight * kernel.eval(w - l.detuning, width))
                .sum()
        })
        .collect();
    meta.extras.insert("n_fermi".into(), lines.n_fermi as f64);
    meta.extras.insert("truncated_weight".into(), lines.truncated_weight);
    Spectrum::new(grid.to_vec(), intensity, meta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fermi_number_examples() {
        assert_eq!(fermi_number(20, 1.0, 1.0).unwrap(), (3, 1.0));
        assert_eq!(fermi_number(20, 20.0, 20.0).unwrap(), (19, 1.0));
        assert_eq!(fermi_number(35, 1.0, 1.0).unwrap(), (4, 1.0));
        assert_eq!(fermi_number(1, 1.0, 1.0).unwrap(), (0, 1.0));
    }

    #[test]
    fn partially_filled_shell() {
        // shells of the isotropic trap hold 1, 3, 6 states: N = 7 puts 3 atoms in a 6-fold shell
        let f = shell_filling(7, 1.0, 1.0).unwrap();
        assert_eq!(f.n_fermi, 2);
        assert_eq!(f.top_shell_states, 6);
        assert!((f.top_shell_fraction - 0.5).abs() < 1e-15);
        assert!((f.total() - 7.0).abs() < 1e-12);
        // top shell (n_x, n_y, n_z) with sum 2: n_x = 0 has 3 of them, n_x = 1 two, n_x = 2 one
        assert_eq!(f.occupancy, vec![1.0 + 2.0 + 1.5, 1.0 + 1.0, 0.5]);
    }

    #[test]
    fn incommensurate_anisotropy_shells() {
        let f = shell_filling(50, 1.0, std::f64::consts::SQRT_2).unwrap();
        assert!((f.total() - 50.0).abs() < 1e-9);
        assert!(f.top_shell_fraction > 0.0 && f.top_shell_fraction <= 1.0);
    }

    #[test]
    fn kx_examples() {
        assert_eq!(degeneracy_kx(2, 4, 1.0, 1.0), 6);
        assert_eq!(degeneracy_kx(0, 19, 20.0, 20.0), 1);
        assert_eq!(degeneracy_kx(0, 4, 1.0, 2.0), 9);
        assert_eq!(degeneracy_kx(5, 4, 1.0, 1.0), 0);
        assert_eq!(degeneracy_kx_cylindric(2, 4, 1.0), 6);
    }

    #[test]
    fn closed_shells_sum_to_n() {
        for (n, lam) in [(20u64, 1.0), (20, 20.0), (35, 1.0), (196, 5.0)] {
            let (nf, frac) = fermi_number(n, lam, lam).unwrap();
            assert_eq!(frac, 1.0, "N={n} λ={lam}");
            let total: u64 = (0..=nf).map(|nx| degeneracy_kx(nx, nf, lam, lam)).sum();
            assert_eq!(total, n);
        }
    }

    #[test]
    fn fc_poisson_ladder() {
        let alpha: f64 = 1.7;
        let x = alpha * alpha;
        let mut fact = 1.0;
        for m in 0..12i64 {
            if m > 0 {
                fact *= m as f64;
            }
            let expected = (-x).exp() * x.powi(m as i32) / fact;
            let got = franck_condon_factor(0, m, alpha).unwrap();
            assert!((got / expected - 1.0).abs() < 1e-13, "m={m}");
        }
    }

    #[test]
    fn fc_two_term_example() {
        let got = franck_condon_factor(1, 0, 2f64.sqrt()).unwrap();
        assert!((got - (-2f64).exp()).abs() < 1e-15);
        assert!((got - 0.135_335_283_236_612_7).abs() < 1e-15);
    }

    #[test]
    fn fc_domain_error() {
        assert!(franck_condon_factor(2, -3, 1.0).is_err());
        assert!(franck_condon_factor(2, -2, 1.0).is_ok());
    }

    #[test]
    fn fc_handles_large_arguments() {
        // n = 100, |m| = 400, α² = 200 overflows any direct evaluation
        for m in [-100i64, 0, 200, 400] {
            let w = franck_condon_factor(100, m, 200f64.sqrt()).unwrap();
            assert!(w.is_finite() && (0.0..=1.0).contains(&w), "m={m} w={w}");
        }
    }

    #[test]
    fn fc_rows_are_unitary() {
        for n in [0u32, 3, 17] {
            for alpha in [0.3, 2.0, 9.0] {
                let total: f64 = (-(n as i64)..2000)
                    .map(|m| franck_condon_factor(n, m, alpha).unwrap())
                    .sum();
                assert!((total - 1.0).abs() < 1e-11, "n={n} α={alpha} Σ={total}");
            }
        }
    }

    #[test]
    fn single_atom_is_poisson() {
        let trap = TrapSpec::isotropic();
        let light = LightSpec::single(1.5).unwrap();
        let list = exact_line_list(&trap, &light, 1, Truncation::default()).unwrap();
        assert_eq!(list.m_min, 0);
        assert_eq!(list.n_fermi, 0);
        for l in &list.lines {
            let expected = franck_condon_factor(0, l.m, 1.5).unwrap();
            assert_eq!(l.weight, expected);
        }
    }

    #[test]
    fn lowest_sideband_is_minus_n_fermi() {
        let trap = TrapSpec::cylindrical(1.0).unwrap();
        let light = LightSpec::single(3.0).unwrap();
        let list = exact_line_list(&trap, &light, 35, Truncation::default()).unwrap();
        assert_eq!(list.m_min, -4);
        assert!(list.lines.iter().all(|l| l.detuning >= -4.0));
    }

    #[test]
    fn unequal_frequencies_are_rejected() {
        let trap = TrapSpec::new(1.0, 1.0, 1.1).unwrap();
        let light = LightSpec::single(3.0).unwrap();
        assert!(matches!(
            exact_line_list(&trap, &light, 10, Truncation::default()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn broaden_single_line_peak() {
        let list = LineList {
            lines: vec![Line {
                excited: 0,
                m: 0,
                detuning: 0.0,
                weight: 2.5,
            }],
            total_weight: 2.5,
            truncated_weight: 0.0,
            n_fermi: 0,
            m_min: 0,
            m_max: 0,
        };
        let grid = GridSpec::centered(0.0, 5.0, 1001).unwrap().values();
        let s = broaden(&list, Kernel::Gaussian, 0.5, &grid).unwrap();
        let expected = 2.5 / (0.5 * (2.0 * std::f64::consts::PI).sqrt());
        assert!((s.peak_value() - expected).abs() < 1e-12);
        assert_eq!(s.peak_position(), Some(0.0));
        assert!((s.integral() - 2.5).abs() < 1e-6);
    }

    #[test]
    fn broaden_two_resolved_lines() {
        let mk = |d: f64| Line {
            excited: 0,
            m: d as i64,
            detuning: d,
            weight: 1.0,
        };
        let list = LineList {
            lines: vec![mk(-10.0), mk(10.0)],
            total_weight: 2.0,
            truncated_weight: 0.0,
            n_fermi: 0,
            m_min: -10,
            m_max: 10,
        };
        let grid = GridSpec::centered(0.0, 20.0, 4001).unwrap().values();
        let s = broaden(&list, Kernel::Gaussian, 0.5, &grid).unwrap();
        let at = |x: f64| s.intensity[s.grid.iter().position(|&g| (g - x).abs() < 1e-9).unwrap()];
        assert!((at(-10.0) - at(10.0)).abs() < 1e-14);
        assert!(at(0.0) < 1e-50);
    }

    #[test]
    fn broaden_empty_and_bad_width() {
        let empty = LineList {
            lines: vec![],
            total_weight: 0.0,
            truncated_weight: 0.0,
            n_fermi: 0,
            m_min: 0,
            m_max: 0,
        };
        let grid = vec![0.0, 1.0, 2.0];
        let s = broaden(&empty, Kernel::Gaussian, 0.5, &grid).unwrap();
        assert!(s.intensity.iter().all(|&v| v == 0.0));
        assert_eq!(s.meta.warnings.len(), 1);
        assert!(broaden(&empty, Kernel::Gaussian, 0.0, &grid).is_err());
    }

    #[test]
    fn broaden_records_clipping() {
        let list = LineList {
            lines: vec![Line {
                excited: 0,
                m: 0,
                detuning: 0.0,
                weight: 1.0,
            }],
            total_weight: 1.0,
            truncated_weight: 0.0,
            n_fermi: 0,
            m_min: 0,
            m_max: 0,
        };
        let grid = GridSpec::new(0.0, 5.0, 101).unwrap().values();
        let s = broaden(&list, Kernel::Gaussian, 0.5, &grid).unwrap();
        assert!((s.meta.clipped_weight - 0.5).abs() < 1e-9);
        assert!(!s.meta.warnings.is_empty());
    }

    #[test]
    fn local_maxima_counting() {
        assert_eq!(interior_local_maxima(&[0.0, 1.0, 0.0, 2.0, 1.0]), 2);
        assert_eq!(interior_local_maxima(&[1.0, 2.0, 3.0]), 0);
        assert_eq!(interior_local_maxima(&[]), 0);
    }
}
