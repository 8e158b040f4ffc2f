use num_complex::Complex64;
use qopuc::chainseq::{c_coeff, d_coeff, initial_maximal_param, maximal_params, modified_minimal_params};
use qopuc::families::{n_moment, pastro_norm, pastro_poly};
use qopuc::opuc::{check_opuc, norm_constant, MeasureFamily, MeasureSpec};
use qopuc::qcore::qpoch_infinite;
use qopuc::quadlab::{
    auto_refine, auto_refine_raw, gram_matrix, gram_matrix_auto, identity_deviation, QuadGrid,
};
use qopuc::{CPoly, QBParams};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

fn params(q: f64, re: f64, im: f64) -> QBParams {
    QBParams::new(q, re, im).unwrap()
}

#[test]
fn pastro_norms_by_quadrature() {
    let p = params(0.5, 0.3, -0.2);
    let spec = MeasureSpec::new(MeasureFamily::Pastro, p).unwrap();
    for k in [2, 3] {
        let phi = pastro_poly(&p, k).unwrap();
        let (v, _) = auto_refine(&spec, |z| phi.eval(z).norm_sqr().into(), 1e-14).unwrap();
        assert!((v.re - pastro_norm(&p, k).unwrap()).abs() < 1e-8, "k={k}");
        assert!(v.im.abs() < 1e-14);
    }
}

#[test]
fn hat_moments_from_n_functional() {
    // int zeta^-j d mu_hat = (1 + c_1^2) / (4 d_1) N[zeta^-j (1 - zeta^-1)]
    let p = params(0.5, 0.8, -0.6);
    let spec = MeasureSpec::new(MeasureFamily::Hat, p).unwrap();
    let c1 = c_coeff(&p, 1);
    for d1 in [0.5, 0.3] {
        for j in 0..=4i64 {
            let (quad, _) = auto_refine(&spec, |z| z.powi(-(j as i32)), 1e-14).unwrap();
            let closed =
                (1.0 + c1 * c1) / (4.0 * d1) * (n_moment(&p, d1, j) - n_moment(&p, d1, j + 1));
            assert!((quad - closed).norm() < 1e-9, "d1={d1} j={j}: {quad} vs {closed}");
        }
    }
}

#[test]
fn hat_norm_constant_is_reciprocal_mass() {
    let p = params(0.5, 0.8, -0.6);
    let q = p.q();
    let (mass, _) = auto_refine_raw(
        |z| {
            let num = qpoch_infinite(z, q, 1e-16).norm_sqr();
            let den = qpoch_infinite(p.qpow(p.b()) * z, q, 1e-16).norm_sqr();
            (num / den).into()
        },
        1e-14,
    )
    .unwrap();
    let rho = norm_constant(MeasureFamily::Hat, &p).unwrap();
    assert!((rho - 1.0 / mass.re).abs() < 1e-9);
}

#[test]
fn check_gram_diagonal_matches_closed_kappa() {
    let p = params(0.5, 0.8, -0.6);
    let seq = check_opuc(&p, 0.0, 8).unwrap();
    let spec = MeasureSpec::new(MeasureFamily::Check, p).unwrap();
    let (g, _) = gram_matrix_auto(&spec, &seq.monic, 1e-13).unwrap();
    let closed = seq.closed_kappa_inv_sq.as_ref().unwrap();
    for j in 0..=8 {
        for k in 0..=8 {
            let want = if j == k { closed[k] } else { 0.0 };
            assert!((g[(j, k)] - want).norm() < 1e-10, "({j}, {k})");
        }
    }
}

#[test]
fn lebesgue_anchor_gram_is_identity() {
    let p = params(0.5, 1.0, 0.0);
    let spec = MeasureSpec::new(MeasureFamily::Check, p).unwrap();
    let seq = check_opuc(&p, 0.0, 8).unwrap();
    let g = gram_matrix(&spec, &seq.orthonormal_all(), &QuadGrid::new(64).unwrap());
    assert!(identity_deviation(&g) < 1e-14);
}

#[test]
fn mass_at_one_gram_is_identity() {
    for t in [0.1, 0.3, 0.7] {
        let p = params(0.5, 0.8, -0.3);
        let spec = MeasureSpec::new(MeasureFamily::CheckWithMass { t }, p).unwrap();
        let seq = check_opuc(&p, t, 8).unwrap();
        let (g, _) = gram_matrix_auto(&spec, &seq.orthonormal_all(), 1e-13).unwrap();
        assert!(identity_deviation(&g) < 1e-8, "t={t}");
    }
}

#[test]
fn zero_mass_reproduces_maximal_sequence() {
    let p = params(0.5, 1.2, -0.6);
    let m = modified_minimal_params(&p, 0.0, 12).unwrap();
    let big_m = maximal_params(&p, 12).unwrap();
    // forward recursion from M_1 loses digits geometrically; stay in the stable range
    for (a, b) in m.iter().zip(&big_m) {
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
}

#[test]
fn total_mass_converges_by_1024_nodes() {
    let spec = MeasureSpec::new(MeasureFamily::Check, params(0.5, 0.8, -0.6)).unwrap();
    let (v, n) = auto_refine(&spec, |_| ONE, 1e-12).unwrap();
    assert!((v - 1.0).norm() < 1e-12);
    assert!(n <= 1024);
}

#[test]
fn slowly_decaying_products_converge_below_cap() {
    let spec = MeasureSpec::new(MeasureFamily::Hat, params(0.9, 0.8, 0.0)).unwrap();
    let (v, n) = auto_refine(&spec, |_| ONE, 1e-12).unwrap();
    assert!((v - 1.0).norm() < 1e-10);
    assert!(n < 1 << 20);
}

/// `Q_k(1) / R_k(1)` with `d_1 = 1/2`: both satisfy `y_(k+1) = 2 y_k - 4 d_(k+1) y_(k-1)` at `z = 1`.
fn qr_ratio_at_one(p: &QBParams, k: usize) -> f64 {
    let (mut r_prev, mut r) = (1.0f64, 2.0);
    let (mut q_prev, mut q) = (0.0f64, 1.0);
    // R_1(1) = 2 since (1 + i c_1) + (1 - i c_1) = 2; Q_1 = 2 d_1 = 1
    for j in 1..k {
        let d = d_coeff(p, j);
        let r_next = 2.0 * r - 4.0 * d * r_prev;
        let q_next = 2.0 * q - 4.0 * d * q_prev;
        let scale = r_next.abs();
        (r_prev, r) = (r / scale, r_next / scale);
        (q_prev, q) = (q / scale, q_next / scale);
    }
    q / r
}

#[test]
fn initial_maximal_param_from_continued_fraction() {
    // the ratio tends to 1 / (2 M_1) like 1/k; one Richardson step removes the leading term
    for (re, im) in [(0.8, -0.6), (1.2, -0.4), (0.3, 0.0)] {
        let p = params(0.5, re, im);
        let k = 50_000;
        let extrapolated = 2.0 * qr_ratio_at_one(&p, 2 * k) - qr_ratio_at_one(&p, k);
        let m1 = initial_maximal_param(&p).unwrap();
        assert!((extrapolated - 1.0 / (2.0 * m1)).abs() < 1e-7, "b={re}{im:+}i");
    }
}

#[test]
fn monic_pastro_gram_is_diagonal() {
    let p = params(0.5, 0.3, -0.2);
    let spec = MeasureSpec::new(MeasureFamily::Pastro, p).unwrap();
    let polys: Vec<CPoly> = (0..=6).map(|k| pastro_poly(&p, k).unwrap()).collect();
    let (g, _) = gram_matrix_auto(&spec, &polys, 1e-13).unwrap();
    for j in 0..=6 {
        for k in 0..=6 {
            let want = if j == k { pastro_norm(&p, k).unwrap() } else { 0.0 };
            assert!((g[(j, k)] - want).norm() < 1e-10, "({j}, {k})");
        }
    }
}
