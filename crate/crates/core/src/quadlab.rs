//! Trapezoidal quadrature on the unit circle.
//!
//! All weights in this crate are real-analytic and periodic, so the uniform
//! rule `(1/N) sum f(e^(i theta_m)) w(theta_m)` converges geometrically in `N`.
//! Sums are reduced pairwise over a tree fixed by node index.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::cpoly::CPoly;
use crate::error::{Error, Result};
use crate::families::BFamilyParams;
use crate::opuc::MeasureSpec;
use crate::qcore::{max_nan, qpoch_infinite_ratio, qpoch_modsq_ratio, QBParams, DEFAULT_TOL};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// First grid size tried by the refining routines.
pub const START_NODES: usize = 256;
/// Largest grid size the refining routines will use.
pub const MAX_NODES: usize = 1 << 20;

const PAIRWISE_BLOCK: usize = 32;

/// Sum in a fixed binary tree; the result does not depend on evaluation order.
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    if values.len() <= PAIRWISE_BLOCK {
        return values.iter().fold(ZERO, |acc, &v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Uniform nodes `theta_m = 2 pi m / N`, `N` a power of two.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadGrid {
    nodes: Vec<Complex64>,
}

impl QuadGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "number of nodes must be a power of two, got {n}"
            )));
        }
        let nodes = (0..n).map(|m| Complex64::from_polar(1.0, Self::angle(n, m))).collect();
        Ok(Self { nodes })
    }

    fn angle(n: usize, m: usize) -> f64 {
        TAU * m as f64 / n as f64
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn theta(&self, m: usize) -> f64 {
        Self::angle(self.len(), m)
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    /// `(1/N) sum f(zeta_m)`: the normalised arc-length mean.
    pub fn circle_mean<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Complex64 {
        let values: Vec<Complex64> = self.nodes.iter().map(|&z| f(z)).collect();
        pairwise_sum(&values) / self.len() as f64
    }
}

/// A grid with the measure's density cached at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGrid {
    grid: QuadGrid,
    weights: Vec<f64>,
    point_mass: Option<f64>,
}

impl WeightedGrid {
    pub fn new(spec: &MeasureSpec, grid: QuadGrid) -> Self {
        let weights = (0..grid.len()).map(|m| spec.weight(grid.theta(m))).collect();
        Self {
            grid,
            weights,
            point_mass: spec.point_mass,
        }
    }

    pub fn with_nodes(spec: &MeasureSpec, n: usize) -> Result<Self> {
        Ok(Self::new(spec, QuadGrid::new(n)?))
    }

    /// The grid with twice the nodes; cached weights are reused at the even nodes.
    pub fn doubled(&self, spec: &MeasureSpec) -> Self {
        let grid = QuadGrid::new(2 * self.grid.len()).expect("power of two");
        let weights = (0..grid.len())
            .map(|m| {
                if m % 2 == 0 {
                    self.weights[m / 2]
                } else {
                    spec.weight(grid.theta(m))
                }
            })
            .collect();
        Self {
            grid,
            weights,
            point_mass: self.point_mass,
        }
    }

    pub fn grid(&self) -> &QuadGrid {
        &self.grid
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `int f d mu`, including the atom at `z = 1` if there is one.
    pub fn integrate<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Complex64 {
        let values: Vec<Complex64> = self
            .grid
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| f(z) * w)
            .collect();
        let mut total = pairwise_sum(&values) / self.grid.len() as f64;
        if let Some(t) = self.point_mass {
            total += f(ONE) * t;
        }
        total
    }
}

/// `int f d mu` on `grid`.
pub fn integrate<F: Fn(Complex64) -> Complex64>(spec: &MeasureSpec, f: F, grid: &QuadGrid) -> Complex64 {
    WeightedGrid::new(spec, grid.clone()).integrate(f)
}

fn refine<F>(tol: f64, mut at: F) -> Result<(Complex64, usize)>
where
    F: FnMut(usize) -> Result<Complex64>,
{
    let mut n = START_NODES;
    let mut prev = at(n)?;
    while n < MAX_NODES {
        n *= 2;
        let next = at(n)?;
        if !next.is_finite() {
            return Err(Error::NoConvergence { terms: n });
        }
        if (next - prev).norm() < tol {
            return Ok((next, n));
        }
        prev = next;
    }
    Err(Error::NoConvergence { terms: n })
}

/// Doubles `N` from 256 until two successive values differ by less than `tol`.
pub fn auto_refine<F: Fn(Complex64) -> Complex64>(
    spec: &MeasureSpec,
    f: F,
    tol: f64,
) -> Result<(Complex64, usize)> {
    let mut wgrid: Option<WeightedGrid> = None;
    refine(tol, |n| {
        let next = match wgrid.take() {
            Some(g) => g.doubled(spec),
            None => WeightedGrid::with_nodes(spec, n)?,
        };
        let value = next.integrate(&f);
        wgrid = Some(next);
        Ok(value)
    })
}

/// [`auto_refine`] for a plain circle mean `(1/2 pi) int f(e^(i theta)) d theta`.
pub fn auto_refine_raw<F: Fn(Complex64) -> Complex64>(f: F, tol: f64) -> Result<(Complex64, usize)> {
    refine(tol, |n| Ok(QuadGrid::new(n)?.circle_mean(&f)))
}

/// `G_jk = int conj(p_j) p_k d mu`.
pub fn gram_matrix(spec: &MeasureSpec, polys: &[CPoly], grid: &QuadGrid) -> DMatrix<Complex64> {
    gram_on(&WeightedGrid::new(spec, grid.clone()), polys)
}

fn gram_on(wgrid: &WeightedGrid, polys: &[CPoly]) -> DMatrix<Complex64> {
    let values: Vec<Vec<Complex64>> = polys
        .iter()
        .map(|p| wgrid.grid.nodes.iter().map(|&z| p.eval(z)).collect())
        .collect();
    let at_one: Vec<Complex64> = polys.iter().map(|p| p.eval(ONE)).collect();
    let n = polys.len();
    let scale = 1.0 / wgrid.grid.len() as f64;
    let mut g = DMatrix::from_element(n, n, ZERO);
    for j in 0..n {
        for k in j..n {
            let terms: Vec<Complex64> = values[j]
                .iter()
                .zip(&values[k])
                .zip(&wgrid.weights)
                .map(|((a, b), &w)| a.conj() * b * w)
                .collect();
            let mut entry = pairwise_sum(&terms) * scale;
            if let Some(t) = wgrid.point_mass {
                entry += at_one[j].conj() * at_one[k] * t;
            }
            g[(j, k)] = entry;
            g[(k, j)] = entry.conj();
        }
    }
    g
}

/// Gram matrix refined until successive grids agree entrywise within `tol`.
pub fn gram_matrix_auto(
    spec: &MeasureSpec,
    polys: &[CPoly],
    tol: f64,
) -> Result<(DMatrix<Complex64>, usize)> {
    gram_matrix_auto_capped(spec, polys, tol, MAX_NODES)
}

/// [`gram_matrix_auto`] with a smaller node budget.
pub fn gram_matrix_auto_capped(
    spec: &MeasureSpec,
    polys: &[CPoly],
    tol: f64,
    max_nodes: usize,
) -> Result<(DMatrix<Complex64>, usize)> {
    let mut n = START_NODES;
    let mut wgrid = WeightedGrid::with_nodes(spec, n)?;
    let mut prev = gram_on(&wgrid, polys);
    while n < max_nodes {
        n *= 2;
        wgrid = wgrid.doubled(spec);
        let next = gram_on(&wgrid, polys);
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NoConvergence { terms: n });
        }
        if max_entry_diff(&next, &prev) < tol {
            return Ok((next, n));
        }
        prev = next;
    }
    Err(Error::NoConvergence { terms: n })
}

fn max_entry_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, max_nan)
}

/// `max |G - I|` entrywise.
pub fn identity_deviation(g: &DMatrix<Complex64>) -> f64 {
    let id = DMatrix::<Complex64>::identity(g.nrows(), g.ncols());
    max_entry_diff(g, &id)
}

/// `max |G - G^H|` entrywise.
pub fn hermitian_deviation(g: &DMatrix<Complex64>) -> f64 {
    max_entry_diff(g, &g.adjoint())
}

/// Density of the integral representation of `L^(b,c,d)` w.r.t. `d theta / 2 pi`:
///
/// ```text
/// rho^(b,c) (q^(d-b) zeta; q)_inf (q^(b-d+1) / zeta; q)_inf
///           / ((q^d zeta; q)_inf (q^(c+2-d) / zeta; q)_inf)
/// ```
///
/// Valid when `Re(c + 2) > Re(d) > 0`.
pub fn l_density(family: &BFamilyParams, zeta: Complex64) -> Result<Complex64> {
    if !family.has_integral_representation() {
        return Err(Error::InvalidParameter(
            "integral representation needs Re(c + 2) > Re(d) > 0".into(),
        ));
    }
    let q = family.q;
    let qp = |a: Complex64| crate::qcore::qpow(q, a);
    let (b, c, d) = (family.b, family.c, family.d);
    let inv = zeta.inv();
    Ok(family.rho_total()
        * qpoch_infinite_ratio(
            &[qp(d - b) * zeta, qp(b - d + 1.0) * inv],
            &[qp(d) * zeta, qp(c + 2.0 - d) * inv],
            q,
            DEFAULT_TOL,
        ))
}

/// Density of the integral representation of `N^(b)` with free constant `d1`:
///
/// ```text
/// 2 d1 (1 - q^lambda cos eta_q) (q;q)_inf (q^(b + conj b);q)_inf / ((q^b;q)_inf (q^conj b;q)_inf)
///     |(q zeta; q)_inf|^2 / |(q^b zeta; q)_inf|^2 (1 - zeta)
/// ```
pub fn n_density(params: &QBParams, d1: f64, zeta: Complex64) -> Complex64 {
    let q = params.q();
    let tol = params.tol();
    let b = params.b();
    let ratio = |num: &[Complex64], den: &[Complex64]| qpoch_infinite_ratio(num, den, q, tol);
    let constant = 2.0 * d1 * (1.0 - params.q_lambda_cos(0.0))
        * ratio(
            &[Complex64::new(q, 0.0), params.qpow(b + b.conj())],
            &[params.qpow(b), params.qpow(b.conj())],
        );
    constant * qpoch_modsq_ratio(zeta * q, params.qpow(b) * zeta, q, tol) * (1.0 - zeta)
}
