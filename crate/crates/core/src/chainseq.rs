//! Recurrence coefficients `c_k`, the positive chain sequence `d_(k+1)` and
//! its minimal, maximal and point-mass-modified parameter sequences.
//!
//! A parameter sequence `g` of the chain `d` satisfies
//! `(1 - g_k) g_(k+1) = d_(k+1)` with every `g_k` in `[0, 1)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::{max_nan, phi21_series, phi21_terminating, QBParams};

// Slack allowed when checking that a parameter stays inside its interval.
const RANGE_SLACK: f64 = 1e-12;

/// `c_k = q^(lambda+k-1) sin(eta_q) / (1 - q^(lambda+k-1) cos(eta_q))`, `k >= 1`.
pub fn c_coeff(params: &QBParams, k: usize) -> f64 {
    let s = params.q().powf(params.lambda() + k as f64 - 1.0);
    s * params.eta_q().sin() / (1.0 - s * params.eta_q().cos())
}

/// `d_(k+1)` for `k >= 1` (the `k = 0` value of the closed form is `0`).
pub fn d_coeff(params: &QBParams, k: usize) -> f64 {
    let q = params.q();
    let lambda = params.lambda();
    let kf = k as f64;
    (1.0 - q.powf(kf)) * (1.0 - q.powf(2.0 * lambda + kf - 1.0))
        / (4.0 * (1.0 - params.q_lambda_cos(kf - 1.0)) * (1.0 - params.q_lambda_cos(kf)))
}

fn check_range(
    name: &'static str,
    index: usize,
    value: f64,
    allow_zero: bool,
    allow_one: bool,
) -> Result<()> {
    let low_ok = if allow_zero {
        value >= -RANGE_SLACK
    } else {
        value > -RANGE_SLACK
    };
    let high_ok = if allow_one {
        value <= 1.0 + RANGE_SLACK
    } else {
        value < 1.0 + RANGE_SLACK
    };
    if value.is_finite() && low_ok && high_ok {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange { name, index, value })
    }
}

/// Minimal parameters `ell_1, ..., ell_(kmax+1)` by forward recursion from `ell_1 = 0`.
///
/// Entry `i` holds `ell_(i+1)`.
pub fn minimal_params(params: &QBParams, kmax: usize) -> Result<Vec<f64>> {
    params.require_positive_lambda()?;
    let mut ell = Vec::with_capacity(kmax + 1);
    ell.push(0.0);
    for k in 1..=kmax {
        let next = d_coeff(params, k) / (1.0 - ell[k - 1]);
        check_range("ell", k + 1, next, true, false)?;
        ell.push(next);
    }
    Ok(ell)
}

/// `ell_(k+1)` from the ratio of terminating `2phi1` values at `z = 1`:
///
/// ```text
/// 1 - ell_(k+1) = (1 - q^(conj b + k)) / (2 (1 - q^(lambda+k) cos eta_q))
///                 * 2phi1(q^-(k+1), q^b; q^(-conj b - k); q, q^(1 - conj b))
///                 / 2phi1(q^-k,     q^b; q^(1 - conj b - k); q, q^(1 - conj b))
/// ```
pub fn minimal_param_closed_form(params: &QBParams, k: usize) -> Result<f64> {
    params.require_positive_lambda()?;
    let q = params.q();
    let b = params.b();
    let bc = b.conj();
    let kf = k as f64;
    let qb = params.qpow(b);
    let z = params.qpow(1.0 - bc);
    let num = phi21_terminating(k + 1, qb, params.qpow(-bc - kf), q, z)?;
    let den = phi21_terminating(k, qb, params.qpow(1.0 - bc - kf), q, z)?;
    let ratio = (1.0 - params.qpow(bc + kf)) / (2.0 * (1.0 - params.q_lambda_cos(kf))) * num / den;
    Ok(1.0 - ratio.re)
}

fn max_ratio_series(params: &QBParams, k: usize) -> Result<Complex64> {
    let q = params.q();
    let b = params.b();
    let bc = b.conj();
    let kf = k as f64;
    phi21_series(
        Complex64::new(q.powf(kf), 0.0),
        params.qpow(1.0 - b),
        params.qpow(bc + kf),
        q,
        params.qpow(b),
        params.tol(),
    )
}

/// `M_(k+1)` from its closed form as a ratio of convergent `2phi1` series.
pub fn maximal_param_closed_form(params: &QBParams, k: usize) -> Result<f64> {
    params.require_positive_lambda()?;
    let bc = params.b().conj();
    let kf = k as f64;
    let num = max_ratio_series(params, k)?;
    let den = max_ratio_series(params, k + 1)?;
    let value = 0.5 * (1.0 - params.qpow(bc + kf)) / (1.0 - params.q_lambda_cos(kf)) * num / den;
    Ok(value.re)
}

/// `M_1`, the first maximal parameter.
pub fn initial_maximal_param(params: &QBParams) -> Result<f64> {
    maximal_param_closed_form(params, 0)
}

/// Maximal parameters `M_1, ..., M_(kmax+1)`, each from its closed form.
///
/// Entry `i` holds `M_(i+1)`.
pub fn maximal_params(params: &QBParams, kmax: usize) -> Result<Vec<f64>> {
    params.require_positive_lambda()?;
    (0..=kmax)
        .map(|k| {
            let m = maximal_param_closed_form(params, k)?;
            check_range("M", k + 1, m, false, true)?;
            Ok(m)
        })
        .collect()
}

/// `M_1, ..., M_(kmax+1)` by forward recursion from the closed-form `M_1`.
///
/// This direction is numerically unstable; it is kept as a consistency check.
pub fn maximal_params_by_recursion(params: &QBParams, kmax: usize) -> Result<Vec<f64>> {
    let mut seq = vec![initial_maximal_param(params)?];
    for k in 1..=kmax {
        let prev = seq[k - 1];
        seq.push(d_coeff(params, k) / (1.0 - prev));
    }
    Ok(seq)
}

/// Minimal parameters `m_1, ..., m_(kmax+1)` of the chain `{d_1, d_2, d_3, ...}`
/// with `d_1 = (1 - t) M_1`; entry `i` holds `m_(i+1)`.
pub fn modified_minimal_params(params: &QBParams, t: f64, kmax: usize) -> Result<Vec<f64>> {
    params.require_positive_lambda()?;
    if !(0.0..1.0).contains(&t) {
        return Err(Error::InvalidParameter("t must lie in [0, 1)".into()));
    }
    let d1 = (1.0 - t) * initial_maximal_param(params)?;
    let mut seq = Vec::with_capacity(kmax + 1);
    check_range("m", 1, d1, false, false)?;
    seq.push(d1);
    for k in 1..=kmax {
        let next = d_coeff(params, k) / (1.0 - seq[k - 1]);
        check_range("m", k + 1, next, false, false)?;
        seq.push(next);
    }
    Ok(seq)
}

/// Everything the chain sequence contributes for one parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainData {
    c: Vec<f64>,
    d: Vec<f64>,
    ell: Vec<f64>,
    max: Vec<f64>,
    modified: Option<(f64, Vec<f64>)>,
}

impl ChainData {
    /// Sequences up to `c_(kmax+1)`, `d_(kmax+1)`, `ell_(kmax+1)`, `M_(kmax+1)`
    /// and, when `t` is given, `m_(kmax+1)`.
    pub fn new(params: &QBParams, kmax: usize, t: Option<f64>) -> Result<Self> {
        params.require_positive_lambda()?;
        let modified = match t {
            Some(t) => Some((t, modified_minimal_params(params, t, kmax)?)),
            None => None,
        };
        Ok(Self {
            c: (1..=kmax + 1).map(|k| c_coeff(params, k)).collect(),
            d: (1..=kmax).map(|k| d_coeff(params, k)).collect(),
            ell: minimal_params(params, kmax)?,
            max: maximal_params(params, kmax)?,
            modified,
        })
    }

    /// Largest `k` for which every accessor is defined.
    pub fn kmax(&self) -> usize {
        self.ell.len() - 1
    }

    /// `c_k`, `1 <= k <= kmax + 1`.
    pub fn c(&self, k: usize) -> f64 {
        self.c[k - 1]
    }

    /// `d_(k+1)`, `1 <= k <= kmax`.
    pub fn d(&self, k: usize) -> f64 {
        self.d[k - 1]
    }

    /// `ell_k`, `1 <= k <= kmax + 1`.
    pub fn ell(&self, k: usize) -> f64 {
        self.ell[k - 1]
    }

    /// `M_k`, `1 <= k <= kmax + 1`.
    pub fn max_param(&self, k: usize) -> f64 {
        self.max[k - 1]
    }

    /// `(t, m)` where `m[i] = m_(i+1)`.
    pub fn modified(&self) -> Option<(f64, &[f64])> {
        self.modified.as_ref().map(|(t, m)| (*t, m.as_slice()))
    }

    /// Largest residual of `(1 - g_k) g_(k+1) = d_(k+1)` over both parameter sequences.
    pub fn chain_identity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for k in 1..=self.kmax() {
            let d = self.d(k);
            worst = max_nan(worst, ((1.0 - self.ell(k)) * self.ell(k + 1) - d).abs());
            worst = max_nan(worst, ((1.0 - self.max_param(k)) * self.max_param(k + 1) - d).abs());
        }
        worst
    }
}
