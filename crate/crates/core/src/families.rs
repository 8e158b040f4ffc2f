//! Polynomial families built from terminating `2phi1` series.
//!
//! The general monic family `B_k^(b,c,d)` is biorthogonal with respect to a
//! moment functional `L^(b,c,d)` with closed-form moments. Three special
//! choices of `(b, c, d)` matter here:
//!
//! * Pastro polynomials: `(b, b + conj b - 1, b + 1/2)`;
//! * `P_k(b; z)`: `(b - 1, b + conj b - 2, b)`;
//! * the self-inversive `R_k(b; z)`, a rescaling of `P_k` that satisfies a
//!   real-coefficient-style recurrence driven by `c_k` and `d_(k+1)`.
//!
//! Functionals are always applied to polynomials through linearity on the
//! closed-form moments, never through quadrature.

use num_complex::Complex64;

use crate::chainseq::{c_coeff, d_coeff};
use crate::cpoly::CPoly;
use crate::error::{Error, Result};
use crate::qcore::{
    phi21_series, phi21_terminating_terms, qpoch_finite, qpoch_infinite, qpoch_infinite_ratio, qpoch_signed, qpow,
    validate_q, QBParams, DEFAULT_TOL,
};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const MONIC_TOL: f64 = 1e-12;

fn is_non_positive_integer(z: Complex64, start: f64) -> bool {
    let r = z.re.round();
    z.im.abs() < 1e-14 && (z.re - r).abs() < 1e-14 && r <= start
}

/// Parameters `(q, b, c, d)` of the general biorthogonal family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BFamilyParams {
    pub q: f64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl BFamilyParams {
    /// Validates `b` not in `{-1, -2, ...}` and `c - b + 1` not in `{0, -1, ...}`.
    pub fn new(q: f64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        validate_q(q)?;
        if is_non_positive_integer(b, -1.0) {
            return Err(Error::DegenerateParameters(format!(
                "b = {b} is a negative integer"
            )));
        }
        if is_non_positive_integer(c - b + 1.0, 0.0) {
            return Err(Error::DegenerateParameters(format!(
                "c - b + 1 = {} is a non-positive integer",
                c - b + 1.0
            )));
        }
        Ok(Self { q, b, c, d })
    }

    /// Pastro choice `(b, b + conj b - 1, b + 1/2)`.
    pub fn pastro(params: &QBParams) -> Result<Self> {
        let b = params.b();
        Self::new(params.q(), b, b + b.conj() - 1.0, b + 0.5)
    }

    /// Choice `(b - 1, b + conj b - 2, b)` giving `P_k(b; z)`.
    pub fn p_family(params: &QBParams) -> Result<Self> {
        let b = params.b();
        Self::new(params.q(), b - 1.0, b + b.conj() - 2.0, b)
    }

    fn qp(&self, a: Complex64) -> Complex64 {
        qpow(self.q, a)
    }

    /// Whether the integral representation of the moments applies:
    /// `Re(c + 2) > Re(d) > 0`.
    pub fn has_integral_representation(&self) -> bool {
        (self.c.re + 2.0) > self.d.re && self.d.re > 0.0
    }

    /// Recurrence coefficient `C_k`, `k >= 1`.
    pub fn cfrak(&self, k: usize) -> Complex64 {
        let kf = k as f64;
        (1.0 - self.qp(self.c - self.b + kf)) / (1.0 - self.qp(self.b + kf))
            * self.qp(self.b - self.d + 1.0)
    }

    /// Recurrence coefficient `D_(k+1)`, `k >= 1`.
    pub fn dfrak(&self, k: usize) -> Complex64 {
        let kf = k as f64;
        (1.0 - self.q.powf(kf)) * (1.0 - self.qp(self.c + kf + 1.0))
            / ((1.0 - self.qp(self.b + kf)) * (1.0 - self.qp(self.b + kf + 1.0)))
            * self.qp(self.b - self.d + 1.0)
    }

    /// `rho_k^(b,c) = (q;q)_k (q^(c+2);q)_k / ((q^(b+1);q)_k (q^(c-b+2);q)_k)`.
    pub fn rho_k(&self, k: usize) -> Complex64 {
        let q = self.q;
        qpoch_finite(Complex64::new(q, 0.0), q, k) * qpoch_finite(self.qp(self.c + 2.0), q, k)
            / (qpoch_finite(self.qp(self.b + 1.0), q, k)
                * qpoch_finite(self.qp(self.c - self.b + 2.0), q, k))
    }

    /// `rho^(b,c)`, the normalisation in front of the integral representation.
    pub fn rho_total(&self) -> Complex64 {
        let q = self.q;
        qpoch_infinite_ratio(
            &[Complex64::new(q, 0.0), self.qp(self.c + 2.0)],
            &[self.qp(self.b + 1.0), self.qp(self.c - self.b + 2.0)],
            q,
            DEFAULT_TOL,
        )
    }

    /// `L^(b,c,d)[zeta^-j] = (q^-b;q)_j / (q^(c-b+2);q)_j q^(j d)` for any integer `j`.
    pub fn l_moment(&self, j: i64) -> Result<Complex64> {
        let q = self.q;
        let num = qpoch_signed(self.qp(-self.b), q, j);
        let den = qpoch_signed(self.qp(self.c - self.b + 2.0), q, j);
        if den.norm() <= 1e-300 || !den.is_finite() || !num.is_finite() {
            return Err(Error::DegenerateParameters(format!(
                "moment {j} has a vanishing denominator"
            )));
        }
        Ok(num / den * self.qp(self.d * j as f64))
    }

    /// `L[zeta^-j p(zeta)]` by linearity over the closed-form moments.
    pub fn apply_l(&self, p: &CPoly, j: i64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, &cm) in p.coeffs().iter().enumerate() {
            acc += cm * self.l_moment(j - m as i64)?;
        }
        Ok(acc)
    }

    /// Monic `B_k` from the terminating `2phi1`, plus the deviation of the
    /// computed leading coefficient from one.
    pub fn bcd_poly_with_deviation(&self, k: usize) -> Result<(CPoly, f64)> {
        let q = self.q;
        let kf = k as f64;
        let b = self.b;
        let c = self.c;
        let d = self.d;
        let den = qpoch_finite(self.qp(b + 1.0), q, k);
        if den.norm() < 1e-300 {
            return Err(Error::DegenerateParameters(
                "(q^(b+1); q)_k vanishes".into(),
            ));
        }
        let prefactor = qpoch_finite(self.qp(c - b + 1.0), q, k) / den * self.qp((b - d + 1.0) * kf);
        let terms = phi21_terminating_terms(k, self.qp(b + 1.0), self.qp(-c + b - kf), q)
            .map_err(|e| Error::DegenerateParameters(e.to_string()))?;
        let w = self.qp(-c + d - 1.0);
        let mut wj = ONE;
        let mut coeffs = Vec::with_capacity(k + 1);
        for t in terms {
            coeffs.push(prefactor * t * wj);
            wj *= w;
        }
        Ok(normalize_monic(coeffs))
    }

    /// Monic `B_k^(b,c,d)` from its explicit hypergeometric form.
    pub fn bcd_poly(&self, k: usize) -> Result<CPoly> {
        Ok(self.bcd_poly_with_deviation(k)?.0)
    }

    /// `B_0, ..., B_kmax` from the three-term recurrence
    /// `B_(k+1) = (z + C_(k+1)) B_k - D_(k+1) z B_(k-1)`.
    pub fn bcd_poly_by_recurrence(&self, kmax: usize) -> Result<Vec<CPoly>> {
        let mut seq = vec![CPoly::one()];
        if kmax == 0 {
            return Ok(seq);
        }
        seq.push(CPoly::linear(ONE, self.cfrak(1)));
        for k in 1..kmax {
            let next = &(&seq[k] * &CPoly::linear(ONE, self.cfrak(k + 1)))
                - &seq[k - 1].shift().scale(self.dfrak(k));
            if !next.leading().is_finite() {
                return Err(Error::DegenerateParameters(format!(
                    "recurrence broke down at k = {}",
                    k + 1
                )));
            }
            seq.push(next);
        }
        Ok(seq)
    }
}

fn normalize_monic(coeffs: Vec<Complex64>) -> (CPoly, f64) {
    let mut coeffs = coeffs;
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let deviation = (lead - ONE).norm();
    if deviation > MONIC_TOL {
        for c in coeffs.iter_mut() {
            *c /= lead;
        }
    }
    coeffs[n] = ONE;
    (CPoly::new(coeffs), deviation)
}

/// Pastro polynomial `Phi_k^(b)`, orthogonal for `lambda > -1/2`.
pub fn pastro_poly(params: &QBParams, k: usize) -> Result<CPoly> {
    BFamilyParams::pastro(params)?.bcd_poly(k)
}

/// `rho_k^(b, b + conj b - 1)`, the squared norm of `Phi_k^(b)`.
pub fn pastro_norm(params: &QBParams, k: usize) -> Result<f64> {
    Ok(BFamilyParams::pastro(params)?.rho_k(k).re)
}

/// `P_k(b; z) = B_k^(b-1, b+conj b-2, b)(z)`.
pub fn p_poly(params: &QBParams, k: usize) -> Result<CPoly> {
    BFamilyParams::p_family(params)?.bcd_poly(k)
}

/// `(q^lambda cos eta_q; q)_k`.
pub fn real_prefactor(params: &QBParams, k: usize) -> f64 {
    (0..k).map(|j| 1.0 - params.q_lambda_cos(j as f64)).product()
}

/// `R_0, ..., R_kmax` from
/// `R_(k+1) = [(1 + i c_(k+1)) z + (1 - i c_(k+1))] R_k - 4 d_(k+1) z R_(k-1)`.
pub fn r_poly(params: &QBParams, kmax: usize) -> Result<Vec<CPoly>> {
    params.require_positive_lambda()?;
    Ok(three_term(params, kmax, CPoly::one(), None))
}

/// `Q_0, ..., Q_kmax`: same recurrence as `R_k` with `Q_0 = 0`, `Q_1 = 2 d_1`.
pub fn q_poly(params: &QBParams, d1: f64, kmax: usize) -> Result<Vec<CPoly>> {
    params.require_positive_lambda()?;
    if d1 == 0.0 || !d1.is_finite() {
        return Err(Error::InvalidParameter("d1 must be a nonzero real".into()));
    }
    Ok(three_term(
        params,
        kmax,
        CPoly::zero(),
        Some(CPoly::constant(Complex64::new(2.0 * d1, 0.0))),
    ))
}

fn three_term(params: &QBParams, kmax: usize, first: CPoly, second: Option<CPoly>) -> Vec<CPoly> {
    let factor = |k: usize| {
        let c = c_coeff(params, k);
        CPoly::linear(Complex64::new(1.0, c), Complex64::new(1.0, -c))
    };
    let mut seq = vec![first];
    if kmax == 0 {
        return seq;
    }
    seq.push(second.unwrap_or_else(|| factor(1)));
    for k in 1..kmax {
        let four_d = Complex64::new(4.0 * d_coeff(params, k), 0.0);
        let next = &(&seq[k] * &factor(k + 1)) - &seq[k - 1].shift().scale(four_d);
        seq.push(next);
    }
    seq
}

/// `R_k(b; z)` from its explicit form
/// `(q^conj b;q)_k / (q^lambda cos eta_q;q)_k 2phi1(q^-k, q^b; q^(1-conj b-k); q, q^(1-conj b) z)`.
pub fn r_poly_closed_form(params: &QBParams, k: usize) -> Result<CPoly> {
    params.require_positive_lambda()?;
    let q = params.q();
    let b = params.b();
    let bc = b.conj();
    let kf = k as f64;
    let prefactor = qpoch_finite(params.qpow(bc), q, k) / real_prefactor(params, k);
    let terms = phi21_terminating_terms(k, params.qpow(b), params.qpow(1.0 - bc - kf), q)?;
    let w = params.qpow(1.0 - bc);
    let mut wj = ONE;
    let mut coeffs = Vec::with_capacity(k + 1);
    for t in terms {
        coeffs.push(prefactor * t * wj);
        wj *= w;
    }
    Ok(CPoly::new(coeffs))
}

/// `nu_j = N^(b)[zeta^-j]` for the functional with free constant `d1`.
pub fn n_moment(params: &QBParams, d1: f64, j: i64) -> Complex64 {
    let q = params.q();
    let b = params.b();
    2.0 * d1 * (1.0 - params.q_lambda_cos(0.0)) / (1.0 - params.qpow(b))
        * qpoch_signed(params.qpow(-b), q, j)
        / qpoch_signed(params.qpow(b.conj()), q, j)
        * params.qpow(b * j as f64)
}

/// `N^(b)[zeta^power p(zeta)]` by linearity.
pub fn apply_n(params: &QBParams, d1: f64, p: &CPoly, power: i64) -> Complex64 {
    p.coeffs()
        .iter()
        .enumerate()
        .map(|(m, &cm)| cm * n_moment(params, d1, -(power + m as i64)))
        .fold(Complex64::new(0.0, 0.0), |acc, v| acc + v)
}

/// `gamma_0, ..., gamma_kmax` with `gamma_0 = nu_0` and
/// `gamma_k = 4 d_(k+1) / (1 + i c_(k+1)) gamma_(k-1)`.
pub fn gamma_seq(params: &QBParams, d1: f64, kmax: usize) -> Vec<Complex64> {
    let mut seq = vec![n_moment(params, d1, 0)];
    for k in 1..=kmax {
        let ratio = 4.0 * d_coeff(params, k) / Complex64::new(1.0, c_coeff(params, k + 1));
        seq.push(ratio * seq[k - 1]);
    }
    seq
}

/// Moments `nu_j`, `|j| <= jmax`, and `gamma_k`, `k <= kmax`, of `N^(b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NMomentData {
    pub d1: f64,
    jmax: i64,
    nu: Vec<Complex64>,
    pub gamma: Vec<Complex64>,
}

impl NMomentData {
    pub fn new(params: &QBParams, d1: f64, jmax: usize, kmax: usize) -> Result<Self> {
        params.require_positive_lambda()?;
        if d1 == 0.0 || !d1.is_finite() {
            return Err(Error::InvalidParameter("d1 must be a nonzero real".into()));
        }
        let jmax = jmax as i64;
        Ok(Self {
            d1,
            jmax,
            nu: (-jmax..=jmax).map(|j| n_moment(params, d1, j)).collect(),
            gamma: gamma_seq(params, d1, kmax),
        })
    }

    /// `nu_j` for `|j| <= jmax`.
    pub fn nu(&self, j: i64) -> Option<Complex64> {
        (j.abs() <= self.jmax).then(|| self.nu[(j + self.jmax) as usize])
    }
}

/// Limit of `R_k(b; z)` for `|z| < 1`:
/// `(q^conj b;q)_inf / (q^lambda cos eta_q;q)_inf (q^b z;q)_inf / (z;q)_inf`.
pub fn r_asymptotic_limit(params: &QBParams, z: Complex64) -> Complex64 {
    let q = params.q();
    let tol = params.tol();
    let b = params.b();
    qpoch_infinite(params.qpow(b.conj()), q, tol)
        / qpoch_infinite(Complex64::new(params.q_lambda_cos(0.0), 0.0), q, tol)
        * qpoch_infinite(params.qpow(b) * z, q, tol)
        / qpoch_infinite(z, q, tol)
}

/// Limit of `Q_k(b; z) / R_k(b; z)` for `|z| < 1`:
/// `2 d1 (1 - q^lambda cos eta_q) / (1 - q^conj b) 2phi1(q, q^(1-b); q^(conj b+1); q, q^b z)`.
pub fn qr_ratio_limit(params: &QBParams, d1: f64, z: Complex64) -> Result<Complex64> {
    let q = params.q();
    let b = params.b();
    let series = phi21_series(
        Complex64::new(q, 0.0),
        params.qpow(1.0 - b),
        params.qpow(b.conj() + 1.0),
        q,
        params.qpow(b) * z,
        params.tol(),
    )?;
    Ok(2.0 * d1 * (1.0 - params.q_lambda_cos(0.0)) / (1.0 - params.qpow(b.conj())) * series)
}
