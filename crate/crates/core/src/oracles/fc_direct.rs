//! Verbatim evaluation of the sideband weight
//!
//!   n!(n+m)! e^{−α²} (α²)^{2n+m} [Σ_j (−α^{−2})^j / (j!(n−j)!(n+m−j)!)]²
//!
//! The bracketed sum and the factorial/power prefactor are formed as exact
//! rationals; only e^{−α²} is approximated, by a fixed-point Taylor series
//! carried to the requested number of decimal digits plus guard digits.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

const GUARD_DIGITS: u32 = 12;

/// Rational p/q with big-integer parts, q > 0.
#[derive(Debug, Clone)]
struct Ratio {
    num: BigInt,
    den: BigInt,
}

impl Ratio {
    fn from_int(v: BigInt) -> Self {
        Self {
            num: v,
            den: BigInt::one(),
        }
    }

    /// Exact value of a finite f64.
    fn from_f64(v: f64) -> Self {
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mantissa, exp) = if exp_bits == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_bits - 1075)
        };
        let mut num = BigInt::from(mantissa) * sign;
        let mut den = BigInt::one();
        if exp >= 0 {
            num <<= exp as usize;
        } else {
            den <<= (-exp) as usize;
        }
        Self { num, den }.reduced()
    }

    fn reduced(self) -> Self {
        let g = self.num.gcd(&self.den);
        if g.is_zero() || g.is_one() {
            return self;
        }
        Self {
            num: self.num / &g,
            den: self.den / &g,
        }
    }

    fn mul(&self, o: &Ratio) -> Ratio {
        Ratio {
            num: &self.num * &o.num,
            den: &self.den * &o.den,
        }
        .reduced()
    }

    fn add(&self, o: &Ratio) -> Ratio {
        Ratio {
            num: &self.num * &o.den + &o.num * &self.den,
            den: &self.den * &o.den,
        }
        .reduced()
    }

    fn pow(&self, e: u32) -> Ratio {
        Ratio {
            num: num_traits::pow(self.num.clone(), e as usize),
            den: num_traits::pow(self.den.clone(), e as usize),
        }
    }
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// A decimal floating value `significand · 10^exponent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decimal {
    pub significand: BigInt,
    pub exponent: i64,
}

impl Decimal {
    pub fn zero() -> Self {
        Self {
            significand: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.significand.is_zero()
    }

    /// Correctly rounded conversion through the decimal string.
    pub fn to_f64(&self) -> f64 {
        format!("{}e{}", self.significand, self.exponent)
            .parse()
            .unwrap_or(f64::NAN)
    }

    /// |self − other| / |other| evaluated exactly, returned as f64.
    pub fn relative_difference(&self, other: &Decimal) -> f64 {
        if other.is_zero() {
            return if self.is_zero() { 0.0 } else { f64::INFINITY };
        }
        let e = self.exponent.min(other.exponent);
        let scale = |d: &Decimal| &d.significand * num_traits::pow(BigInt::from(10), (d.exponent - e) as usize);
        let a = scale(self);
        let b = scale(other);
        let diff = (&a - &b).abs();
        if diff.is_zero() {
            return 0.0;
        }
        // ratio diff/|b| to 17 digits
        let shift = digit_count(&b.abs()) as i64 - digit_count(&diff) as i64 + 20;
        let q = if shift >= 0 {
            diff * num_traits::pow(BigInt::from(10), shift as usize) / b.abs()
        } else {
            diff / (b.abs() * num_traits::pow(BigInt::from(10), (-shift) as usize))
        };
        Decimal {
            significand: q,
            exponent: -shift,
        }
        .to_f64()
    }

    pub fn significant_digits(&self) -> u32 {
        digit_count(&self.significand.abs())
    }
}

fn digit_count(v: &BigInt) -> u32 {
    if v.is_zero() {
        1
    } else {
        v.to_string().trim_start_matches('-').len() as u32
    }
}

/// e^{x} for exact rational x ≥ 0 as a fixed-point integer round(e^x · 10^digits).
fn exp_fixed(x: &Ratio, digits: u32) -> BigInt {
    let scale = num_traits::pow(BigInt::from(10), digits as usize);
    let mut term = scale.clone();
    let mut sum = scale;
    let mut k: u64 = 1;
    loop {
        term = term * &x.num / (&x.den * k);
        if term.is_zero() {
            break;
        }
        sum += &term;
        k += 1;
    }
    sum
}

/// High-precision evaluation of the sideband weight for lower level `n`,
/// sideband `m` and Lamb–Dicke parameter `alpha`.
///
/// `alpha²` is taken as the exact square of the binary value of `alpha`.
pub fn fc_direct_sum(n: u32, m: i64, alpha: f64, precision_digits: u32) -> Result<Decimal> {
    if n as i64 + m < 0 {
        return Err(Error::domain(format!("final level n+m = {} is negative", n as i64 + m)));
    }
    if precision_digits < 30 {
        return Err(Error::domain("oracle precision must be at least 30 digits"));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::domain("alpha must be positive"));
    }
    let n = n as u64;
    let nm = (n as i64 + m) as u64;
    let a = Ratio::from_f64(alpha);
    let x = a.mul(&a);
    let inv_neg_x = Ratio {
        num: -x.den.clone(),
        den: x.num.clone(),
    };

    // Σ_j (−1/x)^j / (j!(n−j)!(n+m−j)!)
    let j_max = n.min(nm);
    let mut sum = Ratio::from_int(BigInt::zero());
    for j in 0..=j_max {
        let denom = factorial(j) * factorial(n - j) * factorial(nm - j);
        let term = inv_neg_x.pow(j as u32).mul(&Ratio {
            num: BigInt::one(),
            den: denom,
        });
        sum = sum.add(&term);
    }
    if sum.num.is_zero() {
        return Ok(Decimal::zero());
    }

    // (α²)^{2n+m} with 2n + m = n + (n + m)
    let prefactor = Ratio::from_int(factorial(n) * factorial(nm)).mul(&x.pow((n + nm) as u32));
    let r = prefactor.mul(&sum.mul(&sum));

    // weight = r / e^{x}; e^{x} ≥ 1 so its fixed-point form keeps `digits` significant digits
    let digits = precision_digits + GUARD_DIGITS;
    let e_fixed = exp_fixed(&x, digits);
    // value = r.num · 10^digits / (r.den · e_fixed)
    let num = r.num.abs() * num_traits::pow(BigInt::from(10), digits as usize);
    let den = &r.den * &e_fixed;
    let shift = digit_count(&den) as i64 - digit_count(&num) as i64 + precision_digits as i64 + 5;
    let q = if shift >= 0 {
        num * num_traits::pow(BigInt::from(10), shift as usize) / den
    } else {
        num / (den * num_traits::pow(BigInt::from(10), (-shift) as usize))
    };
    Ok(Decimal {
        significand: q,
        exponent: -shift,
    })
}

/// Convenience: the oracle value rounded to f64.
pub fn fc_direct_sum_f64(n: u32, m: i64, alpha: f64, precision_digits: u32) -> Result<f64> {
    fc_direct_sum(n, m, alpha, precision_digits).map(|d| d.to_f64())
}
