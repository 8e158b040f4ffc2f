//! Complex polynomials in the monomial basis.
//!
//! Every polynomial family in the crate is a [`CPoly`]. Besides the
//! arithmetic needed by the recurrences, this module provides the star
//! involution `p*(z) = z^k conj(p(1/conj z))`, exact division by `z - 1`,
//! and a companion-matrix root finder tuned for zeros on the unit circle.

use std::f64::consts::TAU;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::max_nan;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Complex polynomial; `coeffs[j]` multiplies `z^j`.
///
/// Trailing (highest-degree) exact zeros are trimmed, so the leading stored
/// coefficient is nonzero unless the polynomial is zero, stored as `[0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CPoly {
    coeffs: Vec<Complex64>,
}

impl CPoly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == ZERO {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![ZERO] }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(ONE)
    }

    /// `z^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![ZERO; k + 1];
        coeffs[k] = ONE;
        Self { coeffs }
    }

    /// `a z + b`.
    pub fn linear(a: Complex64, b: Complex64) -> Self {
        Self::new(vec![b, a])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == ZERO
    }

    /// Coefficient of `z^j`, zero beyond the degree.
    pub fn coeff(&self, j: usize) -> Complex64 {
        self.coeffs.get(j).copied().unwrap_or(ZERO)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.coeffs.len() - 1]
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// Value and first derivative at `z`.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Star conjugate of formal degree `k`: `z^k conj(p(1/conj z))`.
    pub fn star(&self, k: usize) -> Result<Self> {
        if self.degree() > k && !self.is_zero() {
            return Err(Error::DegreeOverflow {
                degree: self.degree(),
                formal: k,
            });
        }
        Ok(Self::new(
            (0..=k).map(|j| self.coeff(k - j).conj()).collect(),
        ))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Multiplication by `z`.
    pub fn shift(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(ZERO);
        coeffs.extend_from_slice(&self.coeffs);
        Self { coeffs }
    }

    /// Synthetic division by `z - 1`; returns quotient and remainder `p(1)`.
    pub fn div_by_z_minus_one(&self) -> (Self, Complex64) {
        let n = self.degree();
        if n == 0 {
            return (Self::zero(), self.coeffs[0]);
        }
        let mut quotient = vec![ZERO; n];
        let mut carry = ZERO;
        for j in (1..=n).rev() {
            carry += self.coeffs[j];
            quotient[j - 1] = carry;
        }
        (Self::new(quotient), carry + self.coeffs[0])
    }

    /// Exact division by `z - 1`; fails if `|p(1)| > rel_tol * max(1, ||p||_1)`.
    pub fn exact_div_by_z_minus_one(&self, rel_tol: f64) -> Result<Self> {
        let (quotient, remainder) = self.div_by_z_minus_one();
        let residual = remainder.norm();
        if residual.is_nan() || residual > rel_tol * self.norm1().max(1.0) {
            return Err(Error::NonExactDivision {
                remainder: remainder.norm(),
            });
        }
        Ok(quotient)
    }

    /// Sum of coefficient moduli.
    pub fn norm1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Largest coefficientwise deviation from `other`.
    pub fn max_coeff_diff(&self, other: &CPoly) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|j| (self.coeff(j) - other.coeff(j)).norm())
            .fold(0.0, max_nan)
    }

    /// All zeros with their angles on `(0, 2 pi]`.
    pub fn roots(&self) -> Result<ZeroSet> {
        roots(self)
    }
}

impl Add for &CPoly {
    type Output = CPoly;
    fn add(self, rhs: &CPoly) -> CPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        CPoly::new((0..n).map(|j| self.coeff(j) + rhs.coeff(j)).collect())
    }
}

impl Sub for &CPoly {
    type Output = CPoly;
    fn sub(self, rhs: &CPoly) -> CPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        CPoly::new((0..n).map(|j| self.coeff(j) - rhs.coeff(j)).collect())
    }
}

impl Neg for &CPoly {
    type Output = CPoly;
    fn neg(self) -> CPoly {
        self.scale(-ONE)
    }
}

impl Mul for &CPoly {
    type Output = CPoly;
    fn mul(self, rhs: &CPoly) -> CPoly {
        let mut out = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        CPoly::new(out)
    }
}

/// Zeros of a polynomial sorted by angle.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    pub zeros: Vec<Complex64>,
    /// Arguments in `(0, 2 pi]`, ascending; a zero at `z = 1` gets `2 pi`.
    pub angles: Vec<f64>,
    /// `| |z| - 1 |` per zero.
    pub radial_residuals: Vec<f64>,
}

impl ZeroSet {
    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn max_radial_residual(&self) -> f64 {
        self.radial_residuals.iter().copied().fold(0.0, max_nan)
    }

    /// Smallest pairwise distance between zeros (infinite for fewer than two).
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.zeros.len() {
            for j in i + 1..self.zeros.len() {
                best = best.min((self.zeros[i] - self.zeros[j]).norm());
            }
        }
        best
    }
}

fn angle_in_half_open(z: Complex64) -> f64 {
    let theta = z.im.atan2(z.re);
    if theta <= 0.0 {
        theta + TAU
    } else {
        theta
    }
}

// Parlett-Reinsch balancing with powers of two.
fn balance(m: &mut DMatrix<Complex64>) {
    let n = m.nrows();
    let radix = 2.0f64;
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += m[(j, i)].norm();
                    row += m[(i, j)].norm();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let total = col + row;
            let mut f = 1.0;
            let mut g = row / radix;
            while col < g {
                f *= radix;
                col *= radix * radix;
            }
            g = row * radix;
            while col > g {
                f /= radix;
                col /= radix * radix;
            }
            if (col + row) / f < 0.95 * total {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

/// Roots via eigenvalues of the balanced companion matrix, each polished by
/// up to five Newton steps.
pub fn roots(p: &CPoly) -> Result<ZeroSet> {
    let n = p.degree();
    if n == 0 {
        return Err(Error::InvalidParameter(
            "root finding needs degree >= 1".into(),
        ));
    }
    let lead = p.leading();
    let mut companion = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = ONE;
    }
    for i in 0..n {
        companion[(i, n - 1)] = -p.coeff(i) / lead;
    }
    balance(&mut companion);
    let schur = nalgebra::linalg::Schur::try_new(companion, f64::EPSILON, 10_000)
        .ok_or(Error::NoConvergence { terms: 10_000 })?;
    let eig = schur.eigenvalues().ok_or(Error::NoConvergence { terms: 10_000 })?;

    let mut zeros = Vec::with_capacity(n);
    for &z0 in eig.iter() {
        let mut z = z0;
        let scale = |z: Complex64| {
            let r = z.norm().max(1.0);
            p.coeffs()
                .iter()
                .enumerate()
                .map(|(j, c)| c.norm() * r.powi(j as i32))
                .sum::<f64>()
        };
        let mut resid = p.eval(z).norm() / scale(z);
        for _ in 0..5 {
            let (v, dv) = p.eval_with_derivative(z);
            if dv.norm() == 0.0 {
                break;
            }
            let candidate = z - v / dv;
            let cand_resid = p.eval(candidate).norm() / scale(candidate);
            if cand_resid < resid {
                z = candidate;
                resid = cand_resid;
            } else {
                break;
            }
        }
        if resid >= 1e-8 {
            return Err(Error::IllConditioned { residual: resid });
        }
        zeros.push(z);
    }
    let mut with_angles: Vec<(f64, Complex64)> =
        zeros.into_iter().map(|z| (angle_in_half_open(z), z)).collect();
    with_angles.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(ZeroSet {
        angles: with_angles.iter().map(|a| a.0).collect(),
        radial_residuals: with_angles.iter().map(|a| (a.1.norm() - 1.0).abs()).collect(),
        zeros: with_angles.into_iter().map(|a| a.1).collect(),
    })
}

/// One failed inequality in an interlacing chain.
#[derive(Debug, Clone, PartialEq)]
pub struct InterlacingViolation {
    /// Position in the merged chain `theta'_1 < theta_1 < theta'_2 < ...`.
    pub position: usize,
    pub left: f64,
    pub right: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterlacingReport {
    pub interlaced: bool,
    pub violations: Vec<InterlacingViolation>,
}

/// Default angular tolerance for [`check_interlacing`].
pub const INTERLACING_TOL: f64 = 1e-10;

/// Checks `b_1 < a_1 < b_2 < ... < a_k < b_(k+1)` on the angles, where `a`
/// holds the `k` zeros of one polynomial and `b` the `k + 1` zeros of the next.
pub fn check_interlacing(a: &ZeroSet, b: &ZeroSet) -> Result<InterlacingReport> {
    check_interlacing_with_tol(a, b, INTERLACING_TOL)
}

pub fn check_interlacing_with_tol(
    a: &ZeroSet,
    b: &ZeroSet,
    tol: f64,
) -> Result<InterlacingReport> {
    if b.len() != a.len() + 1 {
        return Err(Error::SizeMismatch {
            expected: a.len() + 1,
            got: b.len(),
        });
    }
    let mut chain = Vec::with_capacity(a.len() + b.len());
    for i in 0..a.len() {
        chain.push(b.angles[i]);
        chain.push(a.angles[i]);
    }
    chain.push(b.angles[a.len()]);
    let violations: Vec<_> = chain
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] - w[0] <= tol)
        .map(|(position, w)| InterlacingViolation {
            position,
            left: w[0],
            right: w[1],
        })
        .collect();
    Ok(InterlacingReport {
        interlaced: violations.is_empty(),
        violations,
    })
}
