//! Independent finite-difference band-edge solver.
//!
//! A dense three-point discretization of `−d²/dx² + V(x)` with Dirichlet or
//! (anti)periodic boundary conditions, solved by bisection on Sturm counts.
//! The solver shares no code with the algebraic spectrum machinery, so an
//! agreement between the two is meaningful evidence.
//!
//! Boundary conditions follow the periodicity structure of each family:
//!
//! * family III potentials are entire with period `2K`, so band edges are
//!   the union of the periodic and antiperiodic eigenvalues on one period
//!   (a `4K` cell folds both into a single periodic problem);
//! * family II potentials have period `2K` but an inverse-square wall at
//!   every multiple of `2K`; the states with edge character vanish at the
//!   walls, so a Dirichlet problem on the truncated double period
//!   `(ε, 4K−ε)` captures them (truncation error is linear in `ε` and is
//!   removed by Richardson extrapolation in the margin);
//! * family I potentials have period `4K` and the same kind of walls, but
//!   their band-edge states *diverge* at the walls — the truncated
//!   Dirichlet spectrum is reported for completeness and must **not**
//!   contain the algebraic edges.

use crate::elliptic::complete_k;
use crate::error::{QesError, Result};
use crate::model::{potential_value, Family, ModelParams};

/// Boundary condition of the discretized eigenproblem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bc {
    /// Dirichlet walls on a truncated cell (families I and II).
    DirichletTruncated,
    /// Periodic closure over one `2K` period (family III).
    Periodic2K,
    /// Antiperiodic closure over one `2K` period (family III).
    Antiperiodic2K,
    /// Periodic closure over a `4K` double period (family III); its spectrum
    /// is the union of the periodic and antiperiodic `2K` problems.
    Periodic4K,
}

impl std::fmt::Display for Bc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Bc::DirichletTruncated => "dirichlet-truncated",
            Bc::Periodic2K => "periodic-2K",
            Bc::Antiperiodic2K => "antiperiodic-2K",
            Bc::Periodic4K => "periodic-4K",
        };
        f.write_str(s)
    }
}

/// Symmetric (possibly bordered) tridiagonal discretization of
/// `−d²/dx² + V` on a uniform grid.
#[derive(Debug, Clone)]
pub struct DiscretizedOperator {
    /// Grid abscissae.
    pub xs: Vec<f64>,
    /// Grid step.
    pub h: f64,
    /// Diagonal entries `2/h² + V(xᵢ)`.
    pub diag: Vec<f64>,
    /// Off-diagonal entries (all `−1/h²`).
    pub offdiag: Vec<f64>,
    /// Corner entry linking first and last grid point (`0` for Dirichlet,
    /// `−1/h²` periodic, `+1/h²` antiperiodic).
    pub corner: f64,
    /// Boundary condition the operator was built with.
    pub bc: Bc,
}

/// Build the finite-difference operator with the default truncation margin
/// `ε = 10⁻³·K`.
///
/// Grid conventions:
///
/// * `DirichletTruncated` — `N` interior points of `(a, b)` with
///   `h = (b−a)/(N+1)`, walls at `a = ε` and `b = L−ε` where `L = 2K` for
///   family I and `L = 4K` (the full period) for family II;
/// * `Periodic2K`/`Antiperiodic2K` — `N` points `x_i = i·h`, `h = 2K/N`;
/// * `Periodic4K` — `N` points `x_i = i·h`, `h = 4K/N`.
///
/// # Errors
///
/// `Constraint` for `N < 100` or a boundary condition incompatible with the
/// family (Dirichlet is for families I/II, the periodic closures for
/// family III); `Domain` if a grid point hits a potential singularity.
pub fn discretize(params: &ModelParams, n: usize, bc: Bc) -> Result<DiscretizedOperator> {
    let kq = complete_k(params.m)?;
    discretize_with_margin(params, n, bc, 1e-3 * kq)
}

/// [`discretize`] with an explicit Dirichlet truncation margin.
///
/// The margin is the wall offset `ε`; it is ignored for the periodic
/// closures. Halving the margin at fixed `N` exposes the linear-in-`ε`
/// truncation error, which [`richardson_linear`] then removes.
pub fn discretize_with_margin(
    params: &ModelParams,
    n: usize,
    bc: Bc,
    margin: f64,
) -> Result<DiscretizedOperator> {
    if n < 100 {
        return Err(QesError::Constraint(format!(
            "grid must have at least 100 points, got {n}"
        )));
    }
    let kq = complete_k(params.m)?;
    let compatible = match (params.family, bc) {
        (Family::I | Family::II, Bc::DirichletTruncated) => true,
        (Family::III, Bc::Periodic2K | Bc::Antiperiodic2K | Bc::Periodic4K) => true,
        _ => false,
    };
    if !compatible {
        return Err(QesError::Constraint(format!(
            "boundary condition {bc} is incompatible with family {}",
            params.family
        )));
    }

    let (xs, h, corner) = match bc {
        Bc::DirichletTruncated => {
            if !(margin > 0.0) || !margin.is_finite() || margin >= kq {
                return Err(QesError::Constraint(format!(
                    "truncation margin must lie in (0, K); got {margin}"
                )));
            }
            let span = match params.family {
                Family::I => 2.0 * kq,
                Family::II => 4.0 * kq,
                Family::III => unreachable!("rejected above"),
            };
            let (a, b) = (margin, span - margin);
            let h = (b - a) / (n + 1) as f64;
            let xs: Vec<f64> = (1..=n).map(|i| a + h * i as f64).collect();
            (xs, h, 0.0)
        }
        Bc::Periodic2K | Bc::Antiperiodic2K | Bc::Periodic4K => {
            let span = if bc == Bc::Periodic4K { 4.0 * kq } else { 2.0 * kq };
            let h = span / n as f64;
            let xs: Vec<f64> = (0..n).map(|i| h * i as f64).collect();
            let sign = if bc == Bc::Antiperiodic2K { 1.0 } else { -1.0 };
            (xs, h, sign / (h * h))
        }
    };

    let inv_h2 = 1.0 / (h * h);
    let mut diag = Vec::with_capacity(n);
    for &x in &xs {
        diag.push(2.0 * inv_h2 + potential_value(params, x)?);
    }
    let offdiag = vec![-inv_h2; n - 1];

    Ok(DiscretizedOperator {
        xs,
        h,
        diag,
        offdiag,
        corner,
        bc,
    })
}

/// Number of eigenvalues of the (bordered) tridiagonal operator strictly
/// below `lam`, by counting negative pivots of the `LDLᵀ` factorization.
///
/// The corner entries only touch the last row and column, so the factorization
/// runs down the tridiagonal part while propagating the last-column fill; the
/// final pivot collects the accumulated Schur complement.
fn count_below(op: &DiscretizedOperator, lam: f64) -> usize {
    let n = op.diag.len();
    let tiny = 1e-300;
    if n == 1 {
        return usize::from(op.diag[0] - lam < 0.0);
    }
    let mut count = 0usize;
    let mut d = op.diag[0] - lam;
    // Fill of the last column: starts as the corner entry in row 0.
    let mut fill = op.corner;
    // Schur complement accumulated into the last diagonal entry.
    let mut schur = 0.0_f64;
    for i in 0..n - 1 {
        if d.abs() < tiny {
            d = -tiny;
        }
        if d < 0.0 {
            count += 1;
        }
        schur += fill * fill / d;
        let l = op.offdiag[i] / d;
        let mut next_fill = -l * fill;
        if i + 1 == n - 2 {
            next_fill += op.offdiag[n - 2];
        }
        // In a 2×2 system the corner and the off-diagonal coincide in the
        // same entry; the construction never produces n = 2 (N ≥ 100).
        fill = next_fill;
        if i + 1 < n - 1 {
            d = op.diag[i + 1] - lam - op.offdiag[i] * l;
        }
    }
    let last = op.diag[n - 1] - lam - schur;
    if last < 0.0 {
        count += 1;
    }
    count
}

/// The smallest `count` eigenvalues of the discretized operator, ascending,
/// by bisection on the Sturm pivot counts within Gershgorin bounds.
///
/// # Errors
///
/// `Constraint` if `count` exceeds the matrix dimension; `Numerical` if a
/// bisection fails to bracket (inconsistent pivot counts).
pub fn lowest_eigenvalues(op: &DiscretizedOperator, count: usize) -> Result<Vec<f64>> {
    let n = op.diag.len();
    if count > n {
        return Err(QesError::Constraint(format!(
            "requested {count} eigenvalues from a dimension-{n} operator"
        )));
    }
    if count == 0 {
        return Ok(Vec::new());
    }

    // Gershgorin interval for the whole spectrum.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut radius = 0.0;
        if i > 0 {
            radius += op.offdiag[i - 1].abs();
        }
        if i + 1 < n {
            radius += op.offdiag[i].abs();
        }
        if i == 0 || i == n - 1 {
            radius += op.corner.abs();
        }
        lo = lo.min(op.diag[i] - radius);
        hi = hi.max(op.diag[i] + radius);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(QesError::Numerical(
            "non-finite Gershgorin bounds for the discretized operator".into(),
        ));
    }

    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let want = k + 1;
        let (mut a, mut b) = (lo, hi);
        if count_below(op, b) < want {
            return Err(QesError::Numerical(format!(
                "eigenvalue {k} not bracketed by the Gershgorin bound"
            )));
        }
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if count_below(op, mid) >= want {
                b = mid;
            } else {
                a = mid;
            }
            if (b - a) <= 1e-13 * a.abs().max(b.abs()).max(1.0) {
                break;
            }
        }
        out.push(0.5 * (a + b));
    }
    Ok(out)
}

/// Second-order Richardson extrapolation for a quantity with `O(h²)` error:
/// combine values at step `h` (`coarse`) and `h/2` (`fine`).
#[must_use]
pub fn richardson_h2(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// First-order Richardson extrapolation for a quantity with `O(ε)` error:
/// combine values at margin `ε` (`coarse`) and `ε/2` (`fine`).
#[must_use]
pub fn richardson_linear(coarse: f64, fine: f64) -> f64 {
    2.0 * fine - coarse
}
