//! Sampled spectra on a detuning grid, plus the moment and shape statistics
//! used to compare lineshapes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform detuning grid specification (Ω_g units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && max > min) {
            return Err(Error::domain(format!("grid bounds must satisfy min < max, got {min}:{max}")));
        }
        if points < 2 {
            return Err(Error::domain("grid needs at least two points"));
        }
        Ok(Self { min, max, points })
    }

    /// Grid centred on `center` spanning ± `half_width`.
    pub fn centered(center: f64, half_width: f64, points: usize) -> Result<Self> {
        Self::new(center - half_width, center + half_width, points)
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.points - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        let step = self.step();
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.max
                } else {
                    self.min + step * i as f64
                }
            })
            .collect()
    }
}

/// Broadening kernel for delta lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    /// Normal density, `width` is the standard deviation.
    Gaussian,
    /// Cauchy density, `width` is the half width at half maximum.
    Lorentzian,
}

impl Kernel {
    pub fn name(&self) -> &'static str {
        match self {
            Kernel::Gaussian => "gaussian",
            Kernel::Lorentzian => "lorentzian",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" | "gauss" => Some(Kernel::Gaussian),
            "lorentzian" | "lorentz" | "cauchy" => Some(Kernel::Lorentzian),
            _ => None,
        }
    }

    /// Unit-normalized kernel value at offset `x`.
    pub fn eval(&self, x: f64, width: f64) -> f64 {
        match self {
            Kernel::Gaussian => {
                let z = x / width;
                (-0.5 * z * z).exp() / (width * (2.0 * std::f64::consts::PI).sqrt())
            }
            Kernel::Lorentzian => width / (std::f64::consts::PI * (x * x + width * width)),
        }
    }

    /// Kernel mass on `(-inf, x]`.
    pub fn cdf(&self, x: f64, width: f64) -> f64 {
        match self {
            Kernel::Gaussian => {
                0.5 * statrs::function::erf::erfc(-x / (width * std::f64::consts::SQRT_2))
            }
            Kernel::Lorentzian => 0.5 + (x / width).atan() / std::f64::consts::PI,
        }
    }
}

/// Normalization and provenance record attached to every spectrum.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SpectrumMeta {
    /// Which engine produced the data.
    pub method: String,
    pub kernel: Option<Kernel>,
    pub width: Option<f64>,
    /// Weight the spectrum is meant to carry, N·Σ|d_ex|².
    pub target_weight: f64,
    /// Trapezoidal integral of the sampled intensity.
    pub integral: f64,
    /// Weight that fell outside the grid (broadening or histogramming).
    pub clipped_weight: f64,
    pub warnings: Vec<String>,
    /// Engine-specific numbers (βμ, m_ex, W, ...).
    pub extras: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub grid: Vec<f64>,
    pub intensity: Vec<f64>,
    pub meta: SpectrumMeta,
}

/// Trapezoidal integral of samples `y` on abscissae `x`.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// Widths of histogram bins centred on the grid points; interior edges are
/// midpoints and the end bins are symmetric about their grid point.
pub fn bin_widths(grid: &[f64]) -> Vec<f64> {
    let n = grid.len();
    if n < 2 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|i| {
            let left = if i == 0 { grid[1] - grid[0] } else { grid[i] - grid[i - 1] };
            let right = if i + 1 == n { grid[n - 1] - grid[n - 2] } else { grid[i + 1] - grid[i] };
            0.5 * (left + right)
        })
        .collect()
}

impl Spectrum {
    pub fn new(grid: Vec<f64>, intensity: Vec<f64>, meta: SpectrumMeta) -> Result<Self> {
        if grid.len() != intensity.len() {
            return Err(Error::domain("grid and intensity lengths differ"));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("grid must be strictly increasing"));
        }
        let mut s = Self {
            grid,
            intensity,
            meta,
        };
        s.meta.integral = s.integral();
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn integral(&self) -> f64 {
        trapezoid(&self.grid, &self.intensity)
    }

    /// Rescales the intensity so its trapezoidal integral equals `total`.
    pub fn normalize_to(&mut self, total: f64) {
        let current = self.integral();
        if current > 0.0 {
            let scale = total / current;
            self.intensity.iter_mut().for_each(|v| *v *= scale);
        }
        self.meta.integral = self.integral();
    }

    /// Copy scaled to unit peak height.
    pub fn peak_normalized(&self) -> Vec<f64> {
        let peak = self.peak_value();
        if peak > 0.0 {
            self.intensity.iter().map(|v| v / peak).collect()
        } else {
            self.intensity.clone()
        }
    }

    pub fn peak_index(&self) -> Option<usize> {
        self.intensity
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
    }

    pub fn peak_value(&self) -> f64 {
        self.peak_index().map_or(0.0, |i| self.intensity[i])
    }

    /// Grid position of the largest sample.
    pub fn peak_position(&self) -> Option<f64> {
        self.peak_index().map(|i| self.grid[i])
    }

    /// Raw moment ∫ ω^k I dω / ∫ I dω.
    fn normalized_moment(&self, f: impl Fn(f64) -> f64) -> f64 {
        let total = self.integral();
        let y: Vec<f64> = self
            .grid
            .iter()
            .zip(&self.intensity)
            .map(|(&w, &v)| f(w) * v)
            .collect();
        trapezoid(&self.grid, &y) / total
    }

    pub fn mean(&self) -> f64 {
        self.normalized_moment(|w| w)
    }

    pub fn central_moment(&self, order: i32) -> f64 {
        let mean = self.mean();
        self.normalized_moment(|w| (w - mean).powi(order))
    }

    pub fn variance(&self) -> f64 {
        self.central_moment(2)
    }

    /// Fourth standardized moment minus 3.
    pub fn excess_kurtosis(&self) -> f64 {
        let var = self.variance();
        self.central_moment(4) / (var * var) - 3.0
    }

    /// Full width at half maximum, from linear interpolation of the outermost
    /// half-maximum crossings.
    pub fn fwhm(&self) -> Option<f64> {
        let peak = self.peak_value();
        if peak <= 0.0 {
            return None;
        }
        let half = 0.5 * peak;
        let first = self.intensity.iter().position(|&v| v >= half)?;
        let last = self.intensity.iter().rposition(|&v| v >= half)?;
        if first == 0 || last + 1 == self.len() {
            return None;
        }
        let cross = |i: usize, j: usize| {
            let (x0, x1) = (self.grid[i], self.grid[j]);
            let (y0, y1) = (self.intensity[i], self.intensity[j]);
            x0 + (half - y0) * (x1 - x0) / (y1 - y0)
        };
        Some(cross(last, last + 1) - cross(first - 1, first))
    }

    /// Per-sample masses I_i·Δ_i with the bins of [`bin_widths`].
    pub fn bin_masses(&self) -> Vec<f64> {
        bin_widths(&self.grid)
            .iter()
            .zip(&self.intensity)
            .map(|(w, v)| w * v)
            .collect()
    }

    /// Kolmogorov–Smirnov distance between two spectra on the same grid,
    /// each treated as a probability density.
    pub fn ks_distance(&self, other: &Spectrum) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::domain("KS distance needs spectra on a shared grid"));
        }
        let a = self.bin_masses();
        let b = other.bin_masses();
        let (ta, tb): (f64, f64) = (a.iter().sum(), b.iter().sum());
        let mut ca = 0.0;
        let mut cb = 0.0;
        let mut worst: f64 = 0.0;
        for (x, y) in a.iter().zip(&b) {
            ca += x / ta;
            cb += y / tb;
            worst = worst.max((ca - cb).abs());
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_spectrum(center: f64, sigma: f64) -> Spectrum {
        let grid = GridSpec::centered(center, 12.0 * sigma, 4001).unwrap().values();
        let intensity = grid
            .iter()
            .map(|&w| Kernel::Gaussian.eval(w - center, sigma))
            .collect();
        Spectrum::new(grid, intensity, SpectrumMeta::default()).unwrap()
    }

    #[test]
    fn gaussian_statistics() {
        let s = gaussian_spectrum(3.0, 2.0);
        assert!((s.integral() - 1.0).abs() < 1e-10);
        assert!((s.mean() - 3.0).abs() < 1e-10);
        assert!((s.variance() - 4.0).abs() < 1e-8);
        assert!(s.excess_kurtosis().abs() < 1e-6);
        let fwhm = s.fwhm().unwrap();
        assert!((fwhm - 2.0 * (2.0 * 2f64.ln()).sqrt() * 2.0).abs() < 1e-3);
        assert!((s.peak_position().unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn kernels_are_unit_normalized() {
        let g = GridSpec::centered(0.0, 4000.0, 400_001).unwrap().values();
        for k in [Kernel::Gaussian, Kernel::Lorentzian] {
            let y: Vec<f64> = g.iter().map(|&x| k.eval(x, 0.5)).collect();
            let total = trapezoid(&g, &y);
            let expected = k.cdf(4000.0, 0.5) - k.cdf(-4000.0, 0.5);
            assert!((total - expected).abs() < 1e-6, "{k:?}");
        }
        assert!((Kernel::Gaussian.cdf(0.0, 1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(1.0, 0.0, 10).is_err());
        assert!(GridSpec::new(0.0, 1.0, 1).is_err());
        assert!(Spectrum::new(vec![0.0, 0.0], vec![1.0, 1.0], SpectrumMeta::default()).is_err());
        assert!(Spectrum::new(vec![0.0, 1.0], vec![1.0], SpectrumMeta::default()).is_err());
    }

    #[test]
    fn ks_distance_of_shifted_gaussians() {
        let grid = GridSpec::centered(0.0, 20.0, 8001).unwrap().values();
        let mk = |c: f64| {
            let y = grid.iter().map(|&w| Kernel::Gaussian.eval(w - c, 1.0)).collect();
            Spectrum::new(grid.clone(), y, SpectrumMeta::default()).unwrap()
        };
        let d = mk(0.0).ks_distance(&mk(0.1)).unwrap();
        // 2Φ(0.05) − 1
        assert!((d - 0.039_877_8).abs() < 1e-3, "{d}");
        assert_eq!(mk(0.0).ks_distance(&mk(0.0)).unwrap(), 0.0);
    }
}
