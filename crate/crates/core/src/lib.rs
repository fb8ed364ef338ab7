//! Numerical toolkit for boundary blow-up (large) solutions of k-Hessian
//! equations S_k(D²u) = b(x) f(u), u = ∞ on ∂Ω.
//!
//! Modules, bottom up:
//!
//! * [`hessian`]: σ_k algebra, Γ_k membership, radial spectra, Jacobi eigenvalues.
//! * [`profile`]: Keller–Osserman profiles Φ/φ, Ψ/ψ, limit constants C_f, C_m, amplitudes ξ.
//! * [`radial`]: radial blow-up IVP, monotone exhaustion BVP, torsion solution w.
//! * [`fd`]: 2D Shortley–Weller finite differences for k = 1 on disks and ellipses.
//! * [`barrier`]: explicit barriers near ∂Ω and certification of their inequalities.
//! * [`report`]: asymptotics reports and CSV/JSON export.
//! * [`cli`]: config-driven experiment runner behind the `hessian-blowup` binary.

// `!(x > 0.0)` rejects NaN as well; index loops mirror the stencil formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod barrier;
pub mod cli;
pub mod error;
pub mod fd;
pub mod hessian;
pub mod profile;
pub mod quadrature;
pub mod radial;
pub mod report;

pub use error::{Error, Result};
