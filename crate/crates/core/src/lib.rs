//! Orthogonal polynomials on the unit circle built from basic hypergeometric
//! functions.
//!
//! The crate is organised bottom-up:
//!
//! * [`qcore`]: complex powers of `q`, q-Pochhammer symbols, `2phi1` series;
//! * [`cpoly`]: complex polynomials, the star involution, root finding;
//! * [`chainseq`]: recurrence coefficients and chain-sequence parameters;
//! * [`families`]: the biorthogonal `B_k^(b,c,d)`, Pastro, `P_k`, `R_k`, `Q_k`
//!   polynomials and their moment functionals;
//! * [`opuc`]: the monic OPUC for the two weights, their Verblunsky
//!   coefficients, norms, measures and Szegő functions;
//! * [`quadlab`]: the trapezoidal quadrature used to check all of the above;
//! * [`verify`]: named invariant checks run by the command-line tool.

pub mod chainseq;
pub mod cpoly;
pub mod error;
pub mod families;
pub mod opuc;
pub mod qcore;
pub mod quadlab;
pub mod verify;

pub use cpoly::{CPoly, ZeroSet};
pub use error::{Error, Result};
pub use qcore::QBParams;
