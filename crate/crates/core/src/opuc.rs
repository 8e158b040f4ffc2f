//! Monic orthogonal polynomials on the unit circle for the weights
//!
//! ```text
//! hat:    |(e^it; q)_inf|^2   / |(q^b e^it; q)_inf|^2
//! check:  |(q e^it; q)_inf|^2 / |(q^b e^it; q)_inf|^2
//! pastro: |(q^1/2 e^it; q)_inf|^2 / |(q^(b+1/2) e^it; q)_inf|^2
//! ```
//!
//! The hat and check families are assembled from the self-inversive `R_k`
//! and a parameter sequence of the chain `d_(k+1)`: the minimal one for the
//! hat weight, the maximal one for the check weight, and the minimal one of
//! the chain with `d_1 = (1 - t) M_1` when a mass `t` sits at `z = 1`.

use num_complex::Complex64;

use crate::chainseq::{c_coeff, maximal_params, minimal_params, modified_minimal_params};
use crate::cpoly::CPoly;
use crate::error::{Error, Result};
use crate::families::{
    n_moment, pastro_norm, pastro_poly, p_poly, r_poly, real_prefactor, BFamilyParams,
};
use crate::qcore::{
    max_nan, phi21_series, qpoch_finite, qpoch_infinite_ratio, qpoch_modsq_ratio, QBParams,
};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Relative remainder tolerated by the exact divisions by `z - 1`.
pub const DIVISION_TOL: f64 = 1e-10;

/// Which probability measure on the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureFamily {
    Hat,
    Check,
    /// `(1 - t) check + t delta_1`, `0 <= t < 1`.
    CheckWithMass { t: f64 },
    Pastro,
}

/// A normalised measure: density w.r.t. `d theta / 2 pi` plus an optional
/// point mass at `z = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureSpec {
    pub family: MeasureFamily,
    pub params: QBParams,
    pub norm_const: f64,
    /// Mass of the atom at `z = 1`, if any.
    pub point_mass: Option<f64>,
}

impl MeasureSpec {
    pub fn new(family: MeasureFamily, params: QBParams) -> Result<Self> {
        let point_mass = match family {
            MeasureFamily::CheckWithMass { t } => {
                if !(0.0..1.0).contains(&t) {
                    return Err(Error::InvalidParameter("t must lie in [0, 1)".into()));
                }
                (t > 0.0).then_some(t)
            }
            _ => None,
        };
        Ok(Self {
            family,
            params,
            norm_const: norm_constant(family, &params)?,
            point_mass,
        })
    }

    /// Density at angle `theta` with respect to `d theta / 2 pi`.
    pub fn weight(&self, theta: f64) -> f64 {
        weight_density(self, theta)
    }

    /// Fraction of the total mass carried by the continuous part.
    pub fn continuous_mass(&self) -> f64 {
        1.0 - self.point_mass.unwrap_or(0.0)
    }
}

/// Normalisation constant turning the bare weight into a probability density.
pub fn norm_constant(family: MeasureFamily, params: &QBParams) -> Result<f64> {
    let q = params.q();
    let tol = params.tol();
    let b = params.b();
    let bc = b.conj();
    let ratio = |num: &[Complex64], den: &[Complex64]| qpoch_infinite_ratio(num, den, q, tol);
    let qc = Complex64::new(q, 0.0);
    let q2l = params.qpow(b + bc);
    match family {
        MeasureFamily::Hat => {
            params.require_positive_lambda()?;
            let v = ratio(&[qc, q2l], &[params.qpow(b + 1.0), params.qpow(bc + 1.0)])
                / (2.0 * (1.0 - params.q_lambda_cos(0.0)));
            Ok(v.re)
        }
        MeasureFamily::Check | MeasureFamily::CheckWithMass { .. } => {
            params.require_positive_lambda()?;
            let v = (1.0 - params.qpow(bc)) / check_series(params)?
                * ratio(&[qc, q2l], &[params.qpow(b), params.qpow(bc)]);
            Ok(v.re)
        }
        MeasureFamily::Pastro => {
            let v = ratio(
                &[qc, params.qpow(b + bc + 1.0)],
                &[params.qpow(b + 1.0), params.qpow(bc + 1.0)],
            );
            Ok(v.re)
        }
    }
}

/// `2phi1(q, q^(1-b); q^(conj b+1); q, q^b)`.
pub(crate) fn check_series(params: &QBParams) -> Result<Complex64> {
    let q = params.q();
    let b = params.b();
    phi21_series(
        Complex64::new(q, 0.0),
        params.qpow(1.0 - b),
        params.qpow(b.conj() + 1.0),
        q,
        params.qpow(b),
        params.tol(),
    )
}

/// Density of `spec` at `theta` w.r.t. `d theta / 2 pi` (continuous part only).
pub fn weight_density(spec: &MeasureSpec, theta: f64) -> f64 {
    let params = &spec.params;
    let q = params.q();
    let tol = params.tol();
    let zeta = Complex64::from_polar(1.0, theta);
    let (sigma, shift) = match spec.family {
        MeasureFamily::Hat => (ONE, 0.0),
        MeasureFamily::Check | MeasureFamily::CheckWithMass { .. } => (Complex64::new(q, 0.0), 0.0),
        MeasureFamily::Pastro => (Complex64::new(q.sqrt(), 0.0), 0.5),
    };
    let a = sigma * zeta;
    let c = params.qpow(params.b() + shift) * zeta;
    spec.continuous_mass() * spec.norm_const * qpoch_modsq_ratio(a, c, q, tol)
}

/// Monic OPUC with their Verblunsky coefficients and norms.
#[derive(Debug, Clone, PartialEq)]
pub struct OPUCSequence {
    /// `Phi_0, ..., Phi_kmax`.
    pub monic: Vec<CPoly>,
    /// `alpha_(k-1) = -conj(Phi_k(0))`, entry `k - 1` for `k = 1..=kmax`.
    pub verblunsky: Vec<Complex64>,
    /// `kappa_k^-2 = prod_(j<k) (1 - |alpha_j|^2)`, `k = 0..=kmax`.
    pub kappa_inv_sq: Vec<f64>,
    /// Verblunsky coefficients from the family's closed form, when it has one.
    pub closed_verblunsky: Option<Vec<Complex64>>,
    /// `kappa_k^-2` from the family's closed form, when it has one.
    pub closed_kappa_inv_sq: Option<Vec<f64>>,
    /// `tau_k = Phi_k(1) / Phi_k*(1)` (check families only).
    pub tau: Option<Vec<Complex64>>,
}

/// Largest residuals of the structural OPUC identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpucResiduals {
    /// `Phi_k - (z Phi_(k-1) - conj(alpha_(k-1)) Phi*_(k-1))`, coefficientwise.
    pub szego_recurrence: f64,
    pub max_verblunsky_modulus: f64,
    /// Closed-form vs evaluated Verblunsky coefficients.
    pub closed_verblunsky: Option<f64>,
    /// Closed-form vs product-formula `kappa^-2`.
    pub closed_kappa: Option<f64>,
    /// Largest `|leading coefficient - 1|`.
    pub monic_deviation: f64,
}

impl OPUCSequence {
    fn from_monic(monic: Vec<CPoly>) -> Self {
        let verblunsky: Vec<Complex64> = monic.iter().skip(1).map(|p| -p.coeff(0).conj()).collect();
        let mut kappa_inv_sq = Vec::with_capacity(monic.len());
        let mut acc = 1.0;
        kappa_inv_sq.push(acc);
        for a in &verblunsky {
            acc *= 1.0 - a.norm_sqr();
            kappa_inv_sq.push(acc);
        }
        Self {
            monic,
            verblunsky,
            kappa_inv_sq,
            closed_verblunsky: None,
            closed_kappa_inv_sq: None,
            tau: None,
        }
    }

    pub fn kmax(&self) -> usize {
        self.monic.len() - 1
    }

    /// `Phi_k*`.
    pub fn star(&self, k: usize) -> CPoly {
        self.monic[k].star(k).expect("Phi_k has degree k")
    }

    /// `kappa_k` from the product formula.
    pub fn kappa(&self, k: usize) -> f64 {
        self.kappa_inv_sq[k].powf(-0.5)
    }

    /// Orthonormal `phi_k = kappa_k Phi_k`.
    pub fn orthonormal(&self, k: usize) -> CPoly {
        self.monic[k].scale(Complex64::new(self.kappa(k), 0.0))
    }

    pub fn orthonormal_all(&self) -> Vec<CPoly> {
        (0..=self.kmax()).map(|k| self.orthonormal(k)).collect()
    }

    pub fn residuals(&self) -> OpucResiduals {
        let mut szego = 0.0f64;
        for k in 1..=self.kmax() {
            let predicted = &self.monic[k - 1].shift()
                - &self.star(k - 1).scale(self.verblunsky[k - 1].conj());
            szego = max_nan(szego, self.monic[k].max_coeff_diff(&predicted));
        }
        let closed_verblunsky = self.closed_verblunsky.as_ref().map(|closed| {
            closed
                .iter()
                .zip(&self.verblunsky)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, max_nan)
        });
        let closed_kappa = self.closed_kappa_inv_sq.as_ref().map(|closed| {
            closed
                .iter()
                .zip(&self.kappa_inv_sq)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, max_nan)
        });
        OpucResiduals {
            szego_recurrence: szego,
            max_verblunsky_modulus: self.verblunsky.iter().map(|a| a.norm()).fold(0.0, max_nan),
            closed_verblunsky,
            closed_kappa,
            monic_deviation: self
                .monic
                .iter()
                .map(|p| (p.leading() - ONE).norm())
                .fold(0.0, max_nan),
        }
    }
}

fn qb_ratio(params: &QBParams, k: usize) -> Complex64 {
    // (q^b; q)_k / (q^conj b; q)_k
    let b = params.b();
    qpoch_finite(params.qpow(b), params.q(), k) / qpoch_finite(params.qpow(b.conj()), params.q(), k)
}

/// Monic OPUC for the hat weight, `Phi_0..Phi_kmax`.
pub fn hat_opuc(params: &QBParams, kmax: usize) -> Result<OPUCSequence> {
    params.require_positive_lambda()?;
    let q = params.q();
    let b = params.b();
    let bc = b.conj();
    let r = r_poly(params, kmax + 1)?;
    let ell = minimal_params(params, kmax)?;
    let mut monic = Vec::with_capacity(kmax + 1);
    for k in 0..=kmax {
        let two_one_minus_ell = Complex64::new(2.0 * (1.0 - ell[k]), 0.0);
        let numerator = &r[k + 1] - &r[k].scale(two_one_minus_ell);
        let scale = real_prefactor(params, k + 1) / qpoch_finite(params.qpow(b), q, k + 1);
        monic.push(numerator.exact_div_by_z_minus_one(DIVISION_TOL)?.scale(scale));
    }
    let mut seq = OPUCSequence::from_monic(monic);

    let closed_alpha = (1..=kmax)
        .map(|k| {
            let kf = k as f64;
            let bracket = 1.0
                - 2.0 * ell[k] * (1.0 - params.q_lambda_cos(kf)) / (1.0 - params.qpow(bc + kf));
            -bracket * qb_ratio(params, k)
        })
        .collect();
    let closed_kappa = (0..=kmax)
        .map(|k| {
            let kf = k as f64;
            let num = qpoch_finite(Complex64::new(q, 0.0), q, k)
                * qpoch_finite(params.qpow(b + bc), q, k);
            let den = qpoch_finite(params.qpow(b + 1.0), q, k) * qpoch_finite(params.qpow(bc + 1.0), q, k);
            (num / den).re * (1.0 - params.q_lambda_cos(kf)) / (1.0 - params.q_lambda_cos(0.0))
                * (1.0 - ell[k])
        })
        .collect();
    seq.closed_verblunsky = Some(closed_alpha);
    seq.closed_kappa_inv_sq = Some(closed_kappa);
    Ok(seq)
}

/// Monic OPUC for `(1 - t) check + t delta_1`; `t = 0` is the plain check weight.
pub fn check_opuc(params: &QBParams, t: f64, kmax: usize) -> Result<OPUCSequence> {
    params.require_positive_lambda()?;
    if !(0.0..1.0).contains(&t) {
        return Err(Error::InvalidParameter("t must lie in [0, 1)".into()));
    }
    let q = params.q();
    let b = params.b();
    let bc = b.conj();
    let r = r_poly(params, kmax)?;
    // g[i] = g_(i+1): maximal parameters for t = 0, modified minimal ones otherwise
    let g = if t == 0.0 {
        maximal_params(params, kmax)?
    } else {
        modified_minimal_params(params, t, kmax)?
    };
    let mut monic = Vec::with_capacity(kmax + 1);
    monic.push(CPoly::one());
    for k in 1..=kmax {
        let two_one_minus_g = Complex64::new(2.0 * (1.0 - g[k - 1]), 0.0);
        let bracket = &r[k] - &r[k - 1].scale(two_one_minus_g);
        let scale = real_prefactor(params, k) / qpoch_finite(params.qpow(b), q, k);
        monic.push(bracket.scale(scale));
    }
    let mut seq = OPUCSequence::from_monic(monic);

    let closed_alpha = (1..=kmax)
        .map(|k| {
            let kf = k as f64 - 1.0;
            let bracket = 1.0
                - 2.0 * g[k - 1] * (1.0 - params.q_lambda_cos(kf)) / (1.0 - params.qpow(bc + kf));
            bracket * qb_ratio(params, k - 1)
        })
        .collect();
    seq.closed_verblunsky = Some(closed_alpha);
    if t == 0.0 {
        let closed_kappa = (0..=kmax)
            .map(|k| {
                let kf = k as f64;
                let num = qpoch_finite(Complex64::new(q, 0.0), q, k)
                    * qpoch_finite(params.qpow(b + bc), q, k);
                let den = qpoch_finite(params.qpow(b), q, k) * qpoch_finite(params.qpow(bc), q, k);
                (num / den).re * (1.0 - params.q_lambda_cos(0.0)) / (1.0 - params.q_lambda_cos(kf))
                    * g[0]
                    / g[k]
            })
            .collect();
        seq.closed_kappa_inv_sq = Some(closed_kappa);
    }
    let tau = (0..=kmax)
        .map(|k| seq.monic[k].eval(ONE) / seq.star(k).eval(ONE))
        .collect();
    seq.tau = Some(tau);
    Ok(seq)
}

/// Pastro polynomials as an OPUC sequence; the closed-form norms are
/// `rho_k^(b, b + conj b - 1)`.
pub fn pastro_opuc(params: &QBParams, kmax: usize) -> Result<OPUCSequence> {
    let monic = (0..=kmax)
        .map(|k| pastro_poly(params, k))
        .collect::<Result<Vec<_>>>()?;
    let mut seq = OPUCSequence::from_monic(monic);
    seq.closed_kappa_inv_sq = Some(
        (0..=kmax)
            .map(|k| pastro_norm(params, k))
            .collect::<Result<Vec<_>>>()?,
    );
    Ok(seq)
}

/// OPUC for any [`MeasureFamily`].
pub fn opuc_for(family: MeasureFamily, params: &QBParams, kmax: usize) -> Result<OPUCSequence> {
    match family {
        MeasureFamily::Hat => hat_opuc(params, kmax),
        MeasureFamily::Check => check_opuc(params, 0.0, kmax),
        MeasureFamily::CheckWithMass { t } => check_opuc(params, t, kmax),
        MeasureFamily::Pastro => pastro_opuc(params, kmax),
    }
}

/// Closed-form moment `int zeta^-j d mu` of a normalised measure.
///
/// Hat moments come from the functional `N` through
/// `(1 + c_1^2) / (4 d_1) N[zeta^-j (1 - zeta^-1)]`, Pastro moments are those
/// of `L^(b, b + conj b - 1, b + 1/2)`, and check moments telescope from
/// `nu_j = m_j - m_(j-1)`, valid for the choice `d_1 = M_1`.
pub fn measure_moment(family: MeasureFamily, params: &QBParams, j: i64) -> Result<Complex64> {
    match family {
        MeasureFamily::Hat => {
            params.require_positive_lambda()?;
            let c1 = c_coeff(params, 1);
            let d1 = 0.5;
            Ok((1.0 + c1 * c1) / (4.0 * d1) * (n_moment(params, d1, j) - n_moment(params, d1, j + 1)))
        }
        MeasureFamily::Check => {
            params.require_positive_lambda()?;
            let m1 = crate::chainseq::initial_maximal_param(params)?;
            let mut acc = ONE;
            for i in 1..=j.unsigned_abs() as i64 {
                acc += n_moment(params, m1, i);
            }
            Ok(if j < 0 { acc.conj() } else { acc })
        }
        MeasureFamily::CheckWithMass { t } => {
            if !(0.0..1.0).contains(&t) {
                return Err(Error::InvalidParameter("t must lie in [0, 1)".into()));
            }
            Ok(measure_moment(MeasureFamily::Check, params, j)? * (1.0 - t) + t)
        }
        MeasureFamily::Pastro => BFamilyParams::pastro(params)?.l_moment(j),
    }
}

/// Residuals of the kernel-polynomial identities for the check weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdIdentityReport {
    /// `max |A_k - P_k|` coefficientwise.
    pub a_minus_p: f64,
    /// `max_j | -Im(tau alpha) / (1 - Re(tau alpha)) - c_j |`, `j = 1..=k`.
    pub c_relation: f64,
    /// `max_j | |1 - tau alpha|^2 / (2 (1 - Re(tau alpha))) - M_j |`, `j = 1..=k`.
    pub m_relation: f64,
}

impl CdIdentityReport {
    pub fn max_residual(&self) -> f64 {
        max_nan(max_nan(self.a_minus_p, self.c_relation), self.m_relation)
    }
}

/// Monic kernel polynomial `A_k = (z Phi_k - tau_k Phi_k*) / (z - 1)` of the
/// check weight, proportional to the Christoffel-Darboux kernel `K_k(z, 1)`.
pub fn kernel_polynomial(seq: &OPUCSequence, k: usize) -> Result<CPoly> {
    let tau = seq
        .tau
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("sequence carries no tau values".into()))?;
    let numerator = &seq.monic[k].shift() - &seq.star(k).scale(tau[k]);
    numerator.exact_div_by_z_minus_one(DIVISION_TOL)
}

/// Checks `A_k = P_k` and the relations tying `tau_(j-1) alpha_(j-1)` to
/// `c_j` and `M_j` for `j <= k`.
pub fn cd_identity_check(params: &QBParams, k: usize) -> Result<CdIdentityReport> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let seq = check_opuc(params, 0.0, k)?;
    let a_k = kernel_polynomial(&seq, k)?;
    let a_minus_p = a_k.max_coeff_diff(&p_poly(params, k)?);
    let max = maximal_params(params, k)?;
    let tau = seq.tau.as_ref().expect("check sequences carry tau");
    let mut c_relation = 0.0f64;
    let mut m_relation = 0.0f64;
    for j in 1..=k {
        let ta = tau[j - 1] * seq.verblunsky[j - 1];
        let denom = 1.0 - ta.re;
        c_relation = max_nan(c_relation, (-ta.im / denom - c_coeff(params, j)).abs());
        m_relation = max_nan(m_relation, (0.5 * (ONE - ta).norm_sqr() / denom - max[j - 1]).abs());
    }
    Ok(CdIdentityReport {
        a_minus_p,
        c_relation,
        m_relation,
    })
}

/// Which weight a Szegő function belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SzegoFamily {
    Hat,
    Check,
}

/// Szegő function `D(z)` of the normalised hat or check measure.
pub fn szego_function(family: SzegoFamily, params: &QBParams, z: Complex64) -> Result<Complex64> {
    params.require_positive_lambda()?;
    let q = params.q();
    let tol = params.tol();
    let b = params.b();
    let ratio = |num: &[Complex64], den: &[Complex64]| qpoch_infinite_ratio(num, den, q, tol);
    let qc = Complex64::new(q, 0.0);
    let q2l = Complex64::new(q.powf(2.0 * params.lambda()), 0.0);
    let one_minus = 1.0 - params.q_lambda_cos(0.0);
    let qbz = params.qpow(b) * z;
    match family {
        SzegoFamily::Hat => {
            let shifted = params.qpow(b + 1.0);
            let sq = ratio(&[qc, q2l], &[shifted, shifted.conj()]).re / (2.0 * one_minus);
            Ok(sq.sqrt() * ratio(&[z], &[qbz]))
        }
        SzegoFamily::Check => {
            let m1 = crate::chainseq::initial_maximal_param(params)?;
            let qb = params.qpow(b);
            let sq = 2.0 * m1 * one_minus * ratio(&[qc, q2l], &[qb, qb.conj()]).re;
            Ok(sq.sqrt() * ratio(&[z * q], &[qbz]))
        }
    }
}

/// `1 / (kappa_k Phi_k*(z))`, whose limit is the Szegő function.
pub fn szego_approximant(seq: &OPUCSequence, k: usize, z: Complex64) -> Complex64 {
    let v = seq.star(k).eval(z) * seq.kappa(k);
    if v == ZERO {
        Complex64::new(f64::INFINITY, 0.0)
    } else {
        v.inv()
    }
}
