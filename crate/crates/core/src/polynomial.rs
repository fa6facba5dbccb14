//! Rook polynomials with arbitrary-precision nonnegative coefficients.

use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// `r_0 + r_1 x + ... + r_d x^d`, coefficient `k` counting `k`-rook placements.
///
/// Stored without trailing zeros. The zero polynomial (empty coefficient
/// list) exists only as an accumulator; no board has it as its rook
/// polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RookPolynomial {
    coeffs: Vec<BigUint>,
}

impl RookPolynomial {
    pub fn zero() -> Self {
        RookPolynomial { coeffs: Vec::new() }
    }

    /// The rook polynomial of any board without cells.
    pub fn one() -> Self {
        RookPolynomial { coeffs: vec![BigUint::one()] }
    }

    pub fn from_coeffs(coeffs: Vec<BigUint>) -> Self {
        let mut p = RookPolynomial { coeffs };
        p.trim();
        p
    }

    pub fn from_u64s(coeffs: &[u64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigUint::from(c)).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    /// Coefficient of `x^k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> BigUint {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Closed form for the full `m x n` rectangle:
    /// `sum_k C(m,k) C(n,k) k! x^k`.
    ///
    /// Each term comes from the previous one by the exact ratio
    /// `(m-k)(n-k)/(k+1)`.
    pub fn rectangular(m: usize, n: usize) -> Self {
        let top = m.min(n);
        let mut coeffs = Vec::with_capacity(top + 1);
        let mut term = BigUint::one();
        coeffs.push(term.clone());
        for k in 0..top {
            term *= BigUint::from((m - k) as u64) * BigUint::from((n - k) as u64);
            term /= BigUint::from((k + 1) as u64);
            coeffs.push(term.clone());
        }
        RookPolynomial { coeffs }
    }

    /// Returns `self + scalar * x^power * p`.
    pub fn shift_add(&self, p: &RookPolynomial, scalar: &BigUint, power: usize) -> Self {
        let mut out = self.clone();
        out.add_scaled_shifted(p, scalar, power);
        out
    }

    /// In-place `self += scalar * x^power * p`.
    pub fn add_scaled_shifted(&mut self, p: &RookPolynomial, scalar: &BigUint, power: usize) {
        if scalar.is_zero() || p.is_zero() {
            return;
        }
        let len = power + p.coeffs.len();
        if self.coeffs.len() < len {
            self.coeffs.resize(len, BigUint::zero());
        }
        for (k, c) in p.coeffs.iter().enumerate() {
            self.coeffs[power + k] += c * scalar;
        }
    }

    /// Comma-separated coefficients, e.g. `1,12,36,24`.
    pub fn to_machine_string(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        self.coeffs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
    }

    /// Parses the comma-separated machine form.
    pub fn from_machine_string(s: &str) -> Option<Self> {
        s.split(',')
            .map(|part| BigUint::from_str(part.trim()).ok())
            .collect::<Option<Vec<_>>>()
            .map(Self::from_coeffs)
    }
}

impl Mul for &RookPolynomial {
    type Output = RookPolynomial;

    /// Convolution of the coefficient sequences.
    fn mul(self, rhs: &RookPolynomial) -> RookPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return RookPolynomial::zero();
        }
        let mut coeffs = vec![BigUint::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        RookPolynomial::from_coeffs(coeffs)
    }
}

impl Mul for RookPolynomial {
    type Output = RookPolynomial;

    fn mul(self, rhs: RookPolynomial) -> RookPolynomial {
        &self * &rhs
    }
}

impl Add for &RookPolynomial {
    type Output = RookPolynomial;

    fn add(self, rhs: &RookPolynomial) -> RookPolynomial {
        self.shift_add(rhs, &BigUint::one(), 0)
    }
}

/// Ascending powers, zero terms omitted: `1 + 12x + 36x^2 + 24x^3`.
impl fmt::Display for RookPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let unit = c.is_one();
            match k {
                0 => write!(f, "{c}")?,
                1 if unit => f.write_str("x")?,
                1 => write!(f, "{c}x")?,
                _ if unit => write!(f, "x^{k}")?,
                _ => write!(f, "{c}x^{k}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}
