//! Named invariant checks over one parameter set, as run by `qopuc verify`.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::chainseq::ChainData;
use crate::cpoly::{check_interlacing, CPoly};
use crate::error::Result;
use crate::families::{n_moment, r_poly};
use crate::opuc::{
    cd_identity_check, check_opuc, hat_opuc, opuc_for, szego_function, MeasureFamily, MeasureSpec,
    SzegoFamily,
};
use crate::qcore::{max_nan, QBParams};
use crate::quadlab::{gram_matrix_auto_capped, hermitian_deviation, identity_deviation};

/// Outcome of one check: passes when `residual < threshold`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl CheckResult {
    fn new(name: impl Into<String>, outcome: Result<f64>, threshold: f64) -> Self {
        let residual = outcome.unwrap_or(f64::INFINITY);
        Self {
            name: name.into(),
            residual,
            threshold,
            passed: residual < threshold,
        }
    }
}

const BOUNDARY_ANGLES: usize = 64;
const GRAM_TOL: f64 = 1e-12;
/// Node budget of the Gram checks; weights close to singular at `z = 1` (q near 1) exhaust it.
const GRAM_MAX_NODES: usize = 1 << 15;

/// Runs every check at `params` up to degree `kmax`; `t` adds the checks for
/// the check weight with a mass `t` at `z = 1`.
///
/// Fails only on invalid input; a check that cannot be evaluated is reported
/// with an infinite residual.
pub fn run_suite(params: &QBParams, kmax: usize, t: Option<f64>) -> Result<Vec<CheckResult>> {
    params.require_positive_lambda()?;
    if let Some(t) = t {
        MeasureSpec::new(MeasureFamily::CheckWithMass { t }, *params)?;
    }
    let mut out = Vec::new();

    let hat = hat_opuc(params, kmax);
    let check = check_opuc(params, 0.0, kmax);
    for (label, seq) in [("hat", &hat), ("check", &check)] {
        let res = seq.as_ref().map(|s| s.residuals()).map_err(Clone::clone);
        out.push(CheckResult::new(
            format!("{label}.szego_recurrence"),
            res.clone().map(|r| r.szego_recurrence),
            1e-10,
        ));
        out.push(CheckResult::new(
            format!("{label}.verblunsky_closed_form"),
            res.clone().map(|r| r.closed_verblunsky.unwrap_or(0.0)),
            1e-11,
        ));
        out.push(CheckResult::new(
            format!("{label}.kappa_closed_form"),
            res.clone().map(|r| r.closed_kappa.unwrap_or(0.0)),
            1e-10,
        ));
        out.push(CheckResult::new(
            format!("{label}.verblunsky_modulus"),
            res.map(|r| r.max_verblunsky_modulus),
            1.0,
        ));
    }

    let chain = ChainData::new(params, kmax, t);
    out.push(CheckResult::new(
        "chain.identity",
        chain.as_ref().map(|c| c.chain_identity_residual()).map_err(Clone::clone),
        1e-13,
    ));
    out.push(CheckResult::new(
        "chain.minimal_below_maximal",
        chain.map(|c| {
            (1..=c.kmax() + 1)
                .map(|k| max_nan(c.ell(k) - c.max_param(k), 0.0))
                .fold(0.0, max_nan)
        }),
        f64::MIN_POSITIVE,
    ));

    let mut families = vec![
        ("hat", MeasureFamily::Hat),
        ("check", MeasureFamily::Check),
        ("pastro", MeasureFamily::Pastro),
    ];
    if let Some(t) = t.filter(|&t| t > 0.0) {
        families.push(("check_t", MeasureFamily::CheckWithMass { t }));
    }
    for (label, family) in families {
        let gram = (|| {
            let spec = MeasureSpec::new(family, *params)?;
            let orthonormal = opuc_for(family, params, kmax)?.orthonormal_all();
            gram_matrix_auto_capped(&spec, &orthonormal, GRAM_TOL, GRAM_MAX_NODES).map(|(g, _)| g)
        })();
        out.push(CheckResult::new(
            format!("{label}.gram_identity"),
            gram.as_ref().map(identity_deviation).map_err(Clone::clone),
            1e-8,
        ));
        out.push(CheckResult::new(
            format!("{label}.gram_hermitian"),
            gram.map(|g| hermitian_deviation(&g)),
            1e-12,
        ));
    }

    if kmax >= 1 {
        out.push(CheckResult::new(
            "check.kernel_identity",
            cd_identity_check(params, kmax).map(|r| r.max_residual()),
            1e-10,
        ));
    }

    for (label, family, szego) in [
        ("hat", MeasureFamily::Hat, SzegoFamily::Hat),
        ("check", MeasureFamily::Check, SzegoFamily::Check),
    ] {
        let residual = (|| {
            let spec = MeasureSpec::new(family, *params)?;
            let mut worst = 0.0f64;
            for m in 0..BOUNDARY_ANGLES {
                let theta = TAU * m as f64 / BOUNDARY_ANGLES as f64;
                let d = szego_function(szego, params, Complex64::from_polar(1.0, theta))?;
                worst = max_nan(worst, (d.norm_sqr() - spec.weight(theta)).abs());
            }
            Ok(worst)
        })();
        out.push(CheckResult::new(format!("{label}.boundary_szego"), residual, 1e-10));
    }

    let r = r_poly(params, kmax);
    out.push(CheckResult::new(
        "r.self_inversive",
        r.as_ref().map_err(Clone::clone).and_then(|r| {
            r.iter().enumerate().try_fold(0.0f64, |acc, (k, p)| {
                Ok(max_nan(acc, p.max_coeff_diff(&p.star(k)?)))
            })
        }),
        1e-10,
    ));
    let zeros = r.and_then(|r| r.iter().skip(1).map(CPoly::roots).collect::<Result<Vec<_>>>());
    out.push(CheckResult::new(
        "r.zeros_on_circle",
        zeros
            .as_ref()
            .map(|z| z.iter().map(|s| s.max_radial_residual()).fold(0.0, max_nan))
            .map_err(Clone::clone),
        1e-8,
    ));
    out.push(CheckResult::new(
        "r.zeros_interlace",
        zeros.and_then(|z| {
            z.windows(2).try_fold(0.0f64, |acc, w| {
                Ok(acc + check_interlacing(&w[0], &w[1])?.violations.len() as f64)
            })
        }),
        0.5,
    ));

    let d1 = 0.5;
    let symmetry = (-6i64..=6)
        .map(|j| (n_moment(params, d1, j) + n_moment(params, d1, 1 - j).conj()).norm())
        .fold(0.0, max_nan);
    out.push(CheckResult::new("n.moment_symmetry", Ok(symmetry), 1e-14));

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_parameters_pass() {
        let p = QBParams::new(0.5, 0.8, -0.6).unwrap();
        let report = run_suite(&p, 8, Some(0.3)).unwrap();
        for c in &report {
            assert!(c.passed, "{c:?}");
        }
        assert!(report.iter().any(|c| c.name == "check_t.gram_identity"));
    }

    #[test]
    fn rejects_non_positive_lambda() {
        let p = QBParams::new(0.5, -0.1, 0.0).unwrap();
        assert!(run_suite(&p, 4, None).is_err());
    }
}
