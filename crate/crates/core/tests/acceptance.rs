//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.
//!
//! Run with `cargo test -p qopuc --test acceptance`.

use std::f64::consts::TAU;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qopuc::chainseq::{maximal_params, ChainData};
use qopuc::cpoly::check_interlacing;
use qopuc::families::{
    n_moment, pastro_poly, q_poly, qr_ratio_limit, r_asymptotic_limit, r_poly, BFamilyParams,
};
use qopuc::opuc::{
    cd_identity_check, check_opuc, hat_opuc, norm_constant, opuc_for, szego_approximant,
    szego_function, MeasureFamily, MeasureSpec, SzegoFamily,
};
use qopuc::quadlab::{auto_refine, auto_refine_raw, gram_matrix_auto, l_density, n_density};
use qopuc::{CPoly, QBParams};

const QS: [f64; 3] = [0.3, 0.5, 0.9];
const BS: [(f64, f64); 4] = [(0.8, 0.0), (0.8, -0.3), (1.2, -0.6), (0.2, -0.1)];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn params(q: f64, re: f64, im: f64) -> QBParams {
    QBParams::new(q, re, im).expect("valid parameters")
}

fn grid() -> impl Iterator<Item = QBParams> {
    QS.into_iter()
        .flat_map(|q| BS.into_iter().map(move |(re, im)| params(q, re, im)))
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn below(value: f64, tol: f64, what: &str) -> Outcome {
    Outcome {
        passed: value < tol,
        detail: format!("{what} = {value:.3e} (tol {tol:.0e})"),
    }
}

fn all(parts: Vec<Outcome>) -> Outcome {
    Outcome {
        passed: parts.iter().all(|o| o.passed),
        detail: parts.into_iter().map(|o| o.detail).collect::<Vec<_>>().join("; "),
    }
}

fn fail(err: qopuc::Error) -> Outcome {
    Outcome {
        passed: false,
        detail: format!("error: {err}"),
    }
}

type Criterion = fn() -> Result<Outcome, qopuc::Error>;

fn hat_anchor() -> Result<Outcome, qopuc::Error> {
    let mut worst = 0.0f64;
    for q in QS {
        let seq = hat_opuc(&params(q, 1.0, 0.0), 20)?;
        for k in 1..=20usize {
            worst = worst.max((seq.verblunsky[k - 1] - c(-1.0 / (k as f64 + 1.0), 0.0)).norm());
        }
    }
    Ok(below(worst, 1e-12, "max |alpha_(k-1) + 1/(k+1)|"))
}

fn check_anchor() -> Result<Outcome, qopuc::Error> {
    let mut alpha = 0.0f64;
    let mut kappa = 0.0f64;
    let mut poly = 0.0f64;
    let mut max = 0.0f64;
    for q in QS {
        let p = params(q, 1.0, 0.0);
        let seq = check_opuc(&p, 0.0, 20)?;
        alpha = seq.verblunsky.iter().map(|a| a.norm()).fold(alpha, f64::max);
        kappa = seq.kappa_inv_sq.iter().map(|k| (k - 1.0).abs()).fold(kappa, f64::max);
        for (k, phi) in seq.monic.iter().enumerate() {
            poly = poly.max(phi.max_coeff_diff(&CPoly::monomial(k)));
        }
        max = maximal_params(&p, 20)?.iter().map(|m| (m - 0.5).abs()).fold(max, f64::max);
    }
    Ok(all(vec![
        below(alpha, 1e-12, "max |alpha|"),
        below(kappa, 1e-12, "max |kappa^-2 - 1|"),
        below(poly, 1e-12, "max |Phi_k - z^k|"),
        below(max, 1e-12, "max |M_k - 1/2|"),
    ]))
}

fn szego_recurrence() -> Result<Outcome, qopuc::Error> {
    let mut worst = 0.0f64;
    for p in grid() {
        for seq in [hat_opuc(&p, 15)?, check_opuc(&p, 0.0, 15)?] {
            worst = worst.max(seq.residuals().szego_recurrence);
        }
    }
    Ok(below(worst, 1e-10, "max recurrence residual"))
}

fn closed_verblunsky() -> Result<Outcome, qopuc::Error> {
    let mut worst = 0.0f64;
    let mut modulus = 0.0f64;
    for p in grid() {
        for seq in [hat_opuc(&p, 15)?, check_opuc(&p, 0.0, 15)?] {
            let res = seq.residuals();
            worst = worst.max(res.closed_verblunsky.unwrap_or(f64::INFINITY));
            modulus = modulus.max(res.max_verblunsky_modulus);
        }
    }
    Ok(all(vec![
        below(worst, 1e-11, "max |closed - evaluated|"),
        below(modulus, 1.0, "max |alpha|"),
    ]))
}

fn closed_kappa() -> Result<Outcome, qopuc::Error> {
    let mut worst = 0.0f64;
    for p in grid() {
        for seq in [hat_opuc(&p, 15)?, check_opuc(&p, 0.0, 15)?] {
            worst = worst.max(seq.residuals().closed_kappa.unwrap_or(f64::INFINITY));
        }
    }
    Ok(below(worst, 1e-10, "max |closed - product|"))
}

fn gram_identity() -> Result<Outcome, qopuc::Error> {
    let desk = params(0.5, 0.8, -0.6);
    let pastro = params(0.5, 0.3, -0.2);
    let cases = [
        ("hat", MeasureFamily::Hat, desk),
        ("check", MeasureFamily::Check, desk),
        ("check t=0.3", MeasureFamily::CheckWithMass { t: 0.3 }, desk),
        ("pastro", MeasureFamily::Pastro, pastro),
    ];
    let mut parts = Vec::new();
    for (label, family, p) in cases {
        let start = Instant::now();
        let spec = MeasureSpec::new(family, p)?;
        let phis = opuc_for(family, &p, 8)?.orthonormal_all();
        let (g, n) = gram_matrix_auto(&spec, &phis, 1e-12)?;
        let dev = qopuc::quadlab::identity_deviation(&g);
        let elapsed = start.elapsed();
        let mut o = below(dev, 1e-8, &format!("{label} |G - I| (N = {n}, {elapsed:.2?})"));
        o.passed &= elapsed < Duration::from_secs(10);
        parts.push(o);
    }
    Ok(all(parts))
}

fn chain_identities() -> Result<Outcome, qopuc::Error> {
    let mut identity = 0.0f64;
    let mut order = f64::NEG_INFINITY;
    let mut limit = 0.0f64;
    for (re, im) in BS {
        let chain = ChainData::new(&params(0.5, re, im), 60, None)?;
        identity = identity.max(chain.chain_identity_residual());
        for k in 1..=61 {
            order = order.max(chain.ell(k) - chain.max_param(k));
        }
        limit = limit
            .max((chain.ell(61) - 0.5).abs())
            .max((chain.max_param(61) - 0.5).abs());
    }
    Ok(all(vec![
        below(identity, 1e-13, "max chain identity residual"),
        Outcome {
            passed: order < 0.0,
            detail: format!("max (ell_k - M_k) = {order:.3e} (must be negative)"),
        },
        below(limit, 1e-2, "max |g_61 - 1/2|"),
    ]))
}

fn r_zeros() -> Result<Outcome, qopuc::Error> {
    let mut radial = 0.0f64;
    let mut separation = f64::INFINITY;
    let mut violations = 0usize;
    for p in grid() {
        let r = r_poly(&p, 15)?;
        let zeros = r.iter().skip(1).map(CPoly::roots).collect::<Result<Vec<_>, _>>()?;
        for z in &zeros {
            radial = radial.max(z.max_radial_residual());
            separation = separation.min(z.min_separation());
        }
        for w in zeros.windows(2) {
            violations += check_interlacing(&w[0], &w[1])?.violations.len();
        }
    }
    Ok(all(vec![
        below(radial, 1e-8, "max ||z| - 1|"),
        Outcome {
            passed: separation > 1e-6,
            detail: format!("min zero separation = {separation:.3e}"),
        },
        Outcome {
            passed: violations == 0,
            detail: format!("interlacing violations = {violations}"),
        },
    ]))
}

fn kernel_identity() -> Result<Outcome, qopuc::Error> {
    let mut worst_a = 0.0f64;
    let mut worst_rel = 0.0f64;
    for p in grid() {
        for k in 1..=10 {
            let r = cd_identity_check(&p, k)?;
            worst_a = worst_a.max(r.a_minus_p);
            worst_rel = worst_rel.max(r.c_relation).max(r.m_relation);
        }
    }
    Ok(all(vec![
        below(worst_a, 1e-10, "max |A_k - P_k|"),
        below(worst_rel, 1e-10, "max tau/alpha relation residual"),
    ]))
}

fn moments() -> Result<Outcome, qopuc::Error> {
    let families = [
        BFamilyParams::new(0.5, c(0.3, -0.2), c(-0.4, 0.0), c(0.8, -0.2))?,
        BFamilyParams::new(0.5, c(-0.2, -0.6), c(-0.4, 0.0), c(0.8, -0.6))?,
        BFamilyParams::new(0.5, c(0.3, 0.1), c(0.5, -0.2), c(0.7, 0.3))?,
    ];
    let mut l_worst = 0.0f64;
    for fam in &families {
        for j in -6i64..=6 {
            let closed = fam.l_moment(j)?;
            let (quad, _) = auto_refine_raw(
                |z| z.powi(-(j as i32)) * l_density(fam, z).expect("representable"),
                1e-14,
            )?;
            l_worst = l_worst.max((closed - quad).norm());
        }
    }
    let p = params(0.5, 0.8, -0.3);
    let d1 = 0.5;
    let mut n_worst = 0.0f64;
    let mut symmetry = 0.0f64;
    for j in -6i64..=6 {
        let (quad, _) = auto_refine_raw(|z| z.powi(-(j as i32)) * n_density(&p, d1, z), 1e-14)?;
        n_worst = n_worst.max((n_moment(&p, d1, j) - quad).norm());
        symmetry = symmetry.max((n_moment(&p, d1, j) + n_moment(&p, d1, 1 - j).conj()).norm());
    }
    Ok(all(vec![
        below(l_worst, 1e-8, "max |L closed - quadrature|"),
        below(n_worst, 1e-8, "max |nu closed - quadrature|"),
        below(symmetry, 1e-14, "max |nu_j + conj(nu_(1-j))|"),
    ]))
}

fn limits() -> Result<Outcome, qopuc::Error> {
    let real = params(0.5, 0.8, 0.0);
    let z = c(0.2, 0.0);
    let r20 = (r_poly(&real, 20)?[20].eval(z) - r_asymptotic_limit(&real, z)).norm();

    let p = params(0.5, 0.8, -0.6);
    let d1 = 0.5;
    let z = c(0.3, 0.0);
    let r60 = r_poly(&p, 60)?[60].eval(z);
    let q60 = q_poly(&p, d1, 60)?[60].eval(z);
    let ratio = (q60 / r60 - qr_ratio_limit(&p, d1, z)?).norm();

    // the hat weight vanishes at z = 1, so its Verblunsky coefficients decay
    // like 1/k and so does this error; the check weight converges geometrically
    let z = c(0.3, 0.2);
    let check = check_opuc(&p, 0.0, 80)?;
    let check_szego = (szego_approximant(&check, 80, z) - szego_function(SzegoFamily::Check, &p, z)?).norm();
    let hat = hat_opuc(&p, 80)?;
    let hat_szego = (szego_approximant(&hat, 80, z) - szego_function(SzegoFamily::Hat, &p, z)?).norm();
    Ok(all(vec![
        below(r20, 1e-5, "|R_20 - limit|"),
        below(ratio, 1e-6, "|Q_60/R_60 - limit|"),
        below(check_szego, 1e-6, "check |1/(kappa_80 Phi*_80) - D|"),
        below(hat_szego, 1e-6, "hat |1/(kappa_80 Phi*_80) - D|"),
    ]))
}

fn boundary_szego() -> Result<Outcome, qopuc::Error> {
    let mut worst = 0.0f64;
    for p in grid() {
        for (family, szego) in [
            (MeasureFamily::Hat, SzegoFamily::Hat),
            (MeasureFamily::Check, SzegoFamily::Check),
        ] {
            let spec = MeasureSpec::new(family, p)?;
            for m in 0..64 {
                let theta = TAU * m as f64 / 64.0;
                let d = szego_function(szego, &p, Complex64::from_polar(1.0, theta))?;
                worst = worst.max((d.norm_sqr() - spec.weight(theta)).abs());
            }
        }
    }
    Ok(below(worst, 1e-10, "max ||D|^2 - w|"))
}

/// `[n; j]_q` from the product of `(1 - q^i)` factors.
fn gaussian_binomial(n: usize, j: usize, q: f64) -> f64 {
    let fact = |m: usize| (1..=m).map(|i| 1.0 - q.powi(i as i32)).product::<f64>();
    fact(n) / (fact(j) * fact(n - j))
}

fn rogers_szego() -> Result<Outcome, qopuc::Error> {
    let q: f64 = 0.5;
    let phi = pastro_poly(&params(q, 40.0, 0.0), 4)?;
    let want = CPoly::from_real(
        &(0..=4)
            .map(|j| gaussian_binomial(4, j, q) * q.powf((4 - j) as f64 / 2.0))
            .collect::<Vec<_>>(),
    );
    Ok(below(phi.max_coeff_diff(&want), 1e-8, "max coefficient error"))
}

fn normalizations() -> Result<Outcome, qopuc::Error> {
    let mut mass = 0.0f64;
    for p in grid() {
        for family in [MeasureFamily::Hat, MeasureFamily::Check] {
            let spec = MeasureSpec::new(family, p)?;
            let (v, _) = auto_refine(&spec, |_| c(1.0, 0.0), 1e-12)?;
            mass = mass.max((v - 1.0).norm());
        }
    }
    let mut anchor = 0.0f64;
    for q in QS {
        let p = params(q, 1.0, 0.0);
        anchor = anchor
            .max((norm_constant(MeasureFamily::Hat, &p)? - 0.5).abs())
            .max((norm_constant(MeasureFamily::Check, &p)? - 1.0).abs());
    }
    Ok(all(vec![
        below(mass, 1e-9, "max |total mass - 1|"),
        below(anchor, 1e-12, "max anchor error at b = 1"),
    ]))
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 14] = [
        ("hat weight anchor at b = 1", hat_anchor),
        ("check weight anchor at b = 1", check_anchor),
        ("Szego recurrence", szego_recurrence),
        ("closed-form Verblunsky coefficients", closed_verblunsky),
        ("closed-form kappa^-2", closed_kappa),
        ("quadrature orthonormality", gram_identity),
        ("chain sequence identities", chain_identities),
        ("zeros of R_k", r_zeros),
        ("kernel polynomial identity", kernel_identity),
        ("moment cross-checks", moments),
        ("limits", limits),
        ("boundary Szego identity", boundary_szego),
        ("Rogers-Szego limit", rogers_szego),
        ("normalizations", normalizations),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run().unwrap_or_else(fail);
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {:>2}. {name}: {}", i + 1, outcome.detail);
        if !outcome.passed {
            failures += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
