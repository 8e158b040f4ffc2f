//! Complex q-arithmetic: powers of `q`, q-Pochhammer symbols and `2phi1` series.
//!
//! Conventions follow the usual basic-hypergeometric notation:
//!
//! ```text
//! (a; q)_k   = prod_{j=0}^{k-1} (1 - a q^j)
//! (a; q)_-m  = 1 / (a q^-m; q)_m
//! 2phi1(A, B; C; q, z) = sum_j (A;q)_j (B;q)_j / ((C;q)_j (q;q)_j) z^j
//! ```
//!
//! All sums run over ascending `j` so results are reproducible bit for bit.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default truncation threshold for infinite products and series.
pub const DEFAULT_TOL: f64 = 1e-15;

/// Largest accepted base `q`.
pub const Q_MAX: f64 = 0.999;

/// Hard cap on the number of terms summed by [`phi21_series`].
pub const MAX_SERIES_TERMS: usize = 1_000_000;

// Relative size below which a denominator factor counts as vanishing.
const DEGENERATE_FACTOR: f64 = 1e-14;

/// The parameter record `(q, b)` with `b = lambda - i eta` and `eta_q = eta ln q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QBParams {
    q: f64,
    lambda: f64,
    eta: f64,
    eta_q: f64,
    tol: f64,
}

impl QBParams {
    /// Builds parameters from the real and imaginary parts of `b`.
    ///
    /// `b_im` is the imaginary part of `b` itself, so `eta = -b_im`.
    /// Accepts `lambda > -1/2`; families that need `lambda > 0` check it
    /// with [`QBParams::require_positive_lambda`].
    pub fn new(q: f64, b_re: f64, b_im: f64) -> Result<Self> {
        Self::from_lambda_eta(q, b_re, -b_im)
    }

    pub fn from_lambda_eta(q: f64, lambda: f64, eta: f64) -> Result<Self> {
        validate_q(q)?;
        if !lambda.is_finite() || !eta.is_finite() {
            return Err(Error::InvalidParameter("b must be finite".into()));
        }
        if lambda <= -0.5 {
            return Err(Error::InvalidParameter(
                "lambda must exceed -1/2".into(),
            ));
        }
        Ok(Self {
            q,
            lambda,
            eta,
            eta_q: eta * q.ln(),
            tol: DEFAULT_TOL,
        })
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::InvalidParameter(
                "tol must lie in (0, 1)".into(),
            ));
        }
        self.tol = tol;
        Ok(self)
    }

    /// Rejects `lambda <= 0`, which every chain-sequence and OPUC construction needs.
    pub fn require_positive_lambda(&self) -> Result<()> {
        if self.lambda > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter("lambda must be positive".into()))
        }
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn eta_q(&self) -> f64 {
        self.eta_q
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `b = lambda - i eta`.
    pub fn b(&self) -> Complex64 {
        Complex64::new(self.lambda, -self.eta)
    }

    /// `q^a = exp(a ln q)`.
    pub fn qpow(&self, a: Complex64) -> Complex64 {
        qpow(self.q, a)
    }

    /// `q^(lambda + shift) cos(eta_q)`, the real part of `q^(b + shift)`.
    pub fn q_lambda_cos(&self, shift: f64) -> f64 {
        self.q.powf(self.lambda + shift) * self.eta_q.cos()
    }
}

pub(crate) fn validate_q(q: f64) -> Result<()> {
    if q.is_finite() && q > 0.0 && q <= Q_MAX {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "q must lie in (0, {Q_MAX}], got {q}"
        )))
    }
}

/// `q^a` for complex `a` through the (real) logarithm of `q`.
pub fn qpow(q: f64, a: Complex64) -> Complex64 {
    (a * q.ln()).exp()
}

/// Finite q-Pochhammer symbol `(a; q)_k`.
pub fn qpoch_finite(a: Complex64, q: f64, k: usize) -> Complex64 {
    let mut prod = Complex64::new(1.0, 0.0);
    let mut aqj = a;
    for _ in 0..k {
        prod *= Complex64::new(1.0, 0.0) - aqj;
        aqj *= q;
    }
    prod
}

/// `(a; q)_n` for any integer `n`, using `(a; q)_-m = 1 / (a q^-m; q)_m`.
pub fn qpoch_signed(a: Complex64, q: f64, n: i64) -> Complex64 {
    if n >= 0 {
        qpoch_finite(a, q, n as usize)
    } else {
        let m = n.unsigned_abs() as usize;
        qpoch_finite(a * q.powi(-(m as i32)), q, m).inv()
    }
}

/// `f64::max` that propagates NaN, so a failed evaluation never reads as a small residual.
pub fn max_nan(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Infinite q-Pochhammer symbol `(a; q)_inf`, truncated once `|a| q^j < tol`.
pub fn qpoch_infinite(a: Complex64, q: f64, tol: f64) -> Complex64 {
    let mut prod = Complex64::new(1.0, 0.0);
    let mut aqj = a;
    while aqj.norm() >= tol {
        prod *= Complex64::new(1.0, 0.0) - aqj;
        aqj *= q;
    }
    prod
}

/// `prod_j (1 - a_j q^n) / prod_j (1 - b_j q^n)` over `n >= 0`, taken factor by
/// factor so that the individual products may underflow without harm.
pub fn qpoch_infinite_ratio(num: &[Complex64], den: &[Complex64], q: f64, tol: f64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let mut prod = one;
    let mut qn = 1.0;
    let largest = num.iter().chain(den).map(|a| a.norm()).fold(0.0, f64::max);
    while largest * qn >= tol {
        let mut factor = one;
        for a in num {
            factor *= one - a * qn;
        }
        for b in den {
            factor /= one - b * qn;
        }
        prod *= factor;
        qn *= q;
    }
    prod
}

/// `|(a; q)_inf|^2 / |(c; q)_inf|^2`, factor by factor in real arithmetic.
pub fn qpoch_modsq_ratio(a: Complex64, c: Complex64, q: f64, tol: f64) -> f64 {
    let largest = a.norm().max(c.norm());
    let mut prod = 1.0;
    let mut qn = 1.0;
    while largest * qn >= tol {
        let num = (1.0 - a.re * qn).powi(2) + (a.im * qn).powi(2);
        let den = (1.0 - c.re * qn).powi(2) + (c.im * qn).powi(2);
        prod *= num / den;
        qn *= q;
    }
    prod
}

fn check_lower(c: Complex64, q: f64, count: usize) -> Result<()> {
    let mut cqj = c;
    for index in 0..count {
        let factor = Complex64::new(1.0, 0.0) - cqj;
        if factor.norm() <= DEGENERATE_FACTOR * (1.0 + cqj.norm()) {
            return Err(Error::DegenerateLowerParameter { index });
        }
        cqj *= q;
    }
    Ok(())
}

/// Coefficients `t_j`, `j = 0..=k`, of the terminating series
/// `2phi1(q^-k, B; C; q, z) = sum_j t_j z^j`.
pub fn phi21_terminating_terms(
    k: usize,
    upper_b: Complex64,
    lower_c: Complex64,
    q: f64,
) -> Result<Vec<Complex64>> {
    check_lower(lower_c, q, k)?;
    let one = Complex64::new(1.0, 0.0);
    let mut terms = Vec::with_capacity(k + 1);
    let mut term = one;
    terms.push(term);
    let q_minus_k = q.powi(-(k as i32));
    let mut qj = 1.0;
    for _ in 0..k {
        let num = (1.0 - q_minus_k * qj) * (one - upper_b * qj);
        let den = (one - lower_c * qj) * (1.0 - q * qj);
        term = term * num / den;
        terms.push(term);
        qj *= q;
    }
    Ok(terms)
}

/// Terminating `2phi1(q^-k, B; C; q, z)` as a finite sum of `k + 1` terms.
pub fn phi21_terminating(
    k: usize,
    upper_b: Complex64,
    lower_c: Complex64,
    q: f64,
    z: Complex64,
) -> Result<Complex64> {
    let terms = phi21_terminating_terms(k, upper_b, lower_c, q)?;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut zj = Complex64::new(1.0, 0.0);
    for t in terms {
        sum += t * zj;
        zj *= z;
    }
    Ok(sum)
}

/// Convergent `2phi1(A, B; C; q, z)` for `|z| < 1`.
///
/// Terms are accumulated until one falls below `tol (1 + |partial sum|)`.
pub fn phi21_series(
    upper_a: Complex64,
    upper_b: Complex64,
    lower_c: Complex64,
    q: f64,
    z: Complex64,
    tol: f64,
) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut term = one;
    let mut qj = 1.0;
    for j in 0..MAX_SERIES_TERMS {
        if term.norm() < tol * (1.0 + sum.norm()) {
            return Ok(sum);
        }
        sum += term;
        let den_factor = one - lower_c * qj;
        if den_factor.norm() <= DEGENERATE_FACTOR * (1.0 + (lower_c * qj).norm()) {
            return Err(Error::DegenerateLowerParameter { index: j });
        }
        term = term * (one - upper_a * qj) * (one - upper_b * qj) / (den_factor * (1.0 - q * qj))
            * z;
        qj *= q;
    }
    Err(Error::NoConvergence {
        terms: MAX_SERIES_TERMS,
    })
}

/// Ratio `f_k(z)` of neighbouring `2phi1` series for the `(b, c, d)` family:
///
/// ```text
/// f_k(z) = 2phi1(q^(k+1), q^-b; q^(c-b+k+2); q, q^d z) / 2phi1(q^k, q^-b; q^(c-b+k+1); q, q^d z)
/// ```
pub fn contiguous_ratio_f(
    k: usize,
    q: f64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
    z: Complex64,
) -> Result<Complex64> {
    validate_q(q)?;
    let kf = k as f64;
    let arg = qpow(q, d) * z;
    let upper = qpow(q, -b);
    let num = phi21_series(
        Complex64::new(q.powf(kf + 1.0), 0.0),
        upper,
        qpow(q, c - b + kf + 2.0),
        q,
        arg,
        DEFAULT_TOL,
    )?;
    let den = phi21_series(
        Complex64::new(q.powf(kf), 0.0),
        upper,
        qpow(q, c - b + kf + 1.0),
        q,
        arg,
        DEFAULT_TOL,
    )?;
    if den.norm() < 1e-14 {
        return Err(Error::DivisionByNearZero { modulus: den.norm() });
    }
    Ok(num / den)
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn qpoch_finite_step(re in -2.0f64..2.0, im in -2.0f64..2.0, q in 0.05f64..0.95, k in 0usize..50) {
            let a = Complex64::new(re, im);
            let lhs = qpoch_finite(a, q, k + 1);
            let rhs = qpoch_finite(a, q, k) * (1.0 - a * q.powi(k as i32));
            prop_assert!((lhs - rhs).norm() < 1e-14 * lhs.norm().max(1.0));
        }

        #[test]
        fn qpoch_infinite_telescopes(r in 0.0f64..2.0, phase in 0.0f64..std::f64::consts::TAU, q in 0.1f64..0.9) {
            let a = Complex64::from_polar(r, phase);
            let full = qpoch_infinite(a, q, DEFAULT_TOL);
            let split = qpoch_finite(a, q, 5) * qpoch_infinite(a * q.powi(5), q, DEFAULT_TOL);
            prop_assert!((full - split).norm() < 1e-14 * full.norm().max(1.0));
        }
    }
}
