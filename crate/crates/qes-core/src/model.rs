//! Model definition: the three elliptic potential families, parameter
//! canonicalization, the catalog of algebraizable sectors, and the gauge
//! factor connecting the Schrödinger problem to its polynomial form.
//!
//! Families
//! --------
//! With `sn = sn(x|m)` etc. and `k² = m`, `k′² = 1 − m`:
//!
//! * **I**   `V = (B² + A(A+1)) dn²/sn² − 2B(A+½) cn/sn²` — singular at
//!   `x ≡ 0 (mod 2K)`; principal cell `(0, 2K)`; period `4K`.
//! * **II**  `V = B(B+1) dn²/sn² − A(A+1) dn²` — singular at
//!   `x ≡ 0 (mod 2K)` (the `1/sn²` term vanishes when `B ∈ {0, −1}`);
//!   period `2K`.
//! * **III** `V = m(B² − A(A+1)) cn² + 2Bm(A+½) sn·cn` — smooth on all of
//!   `ℝ`; period `2K`.
//!
//! Canonical parameter sector
//! --------------------------
//! The potentials are invariant (up to translation) under reflections of the
//! coupling parameters, so parameters are normalized once on construction:
//!
//! * family I:   `A ≥ −½, B ≥ 0`, reflection `(A,B) → (−A−1, −B)`;
//! * family II:  `A ≥ −½, B ≥ −½`, reflection `(A,B) → (−A−1, −B−1)`;
//!   a `B < −½` with admissible `A` is kept as given, with a warning;
//! * family III: `A ≥ −½`, reflection `(A,B) → (−A−1, −B)`.
//!
//! Algebraizable sectors
//! ---------------------
//! Each family supports a finite catalog of parameter patterns (`1.1`–`1.6`,
//! `2.1`–`2.2`, `3.1`–`3.3`) for which an `(n+1)`-dimensional invariant
//! polynomial subspace exists.  [`catalog_rows`] returns every admissible
//! sector, with its generator coefficients and the constant term `d` of the
//! algebraic operator.

use num_complex::Complex64;
use num_rational::Rational64;

use crate::elliptic::{complete_k, jacobi_elliptic};
use crate::error::{QesError, Result};

/// Tolerance for float-valued integrality and inequality checks on the
/// coupling parameters when no exact rational form is available.
const PARAM_TOL: f64 = 1e-9;

/// Proximity to a potential pole (in units of `|sn|`) treated as singular.
const POLE_TOL: f64 = 1e-12;

/// The three potential families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `V = (B²+A(A+1)) dn²/sn² − 2B(A+½) cn/sn²`
    I,
    /// `V = B(B+1) dn²/sn² − A(A+1) dn²`
    II,
    /// `V = m(B²−A(A+1)) cn² + 2Bm(A+½) sn·cn`
    III,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::I => "I",
            Family::II => "II",
            Family::III => "III",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = QesError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(Family::I),
            "II" | "2" => Ok(Family::II),
            "III" | "3" => Ok(Family::III),
            other => Err(QesError::Constraint(format!(
                "unknown family '{other}' (expected I, II or III)"
            ))),
        }
    }
}

/// Identifier of one algebraizable sector of the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RowId {
    R11,
    R12,
    R13,
    R14,
    R15,
    R16,
    R21,
    R22,
    R31,
    R32,
    R33,
}

impl RowId {
    /// All rows, in catalog order.
    pub const ALL: [RowId; 11] = [
        RowId::R11,
        RowId::R12,
        RowId::R13,
        RowId::R14,
        RowId::R15,
        RowId::R16,
        RowId::R21,
        RowId::R22,
        RowId::R31,
        RowId::R32,
        RowId::R33,
    ];

    /// Family this row belongs to.
    #[must_use]
    pub fn family(self) -> Family {
        match self {
            RowId::R11 | RowId::R12 | RowId::R13 | RowId::R14 | RowId::R15 | RowId::R16 => {
                Family::I
            }
            RowId::R21 | RowId::R22 => Family::II,
            RowId::R31 | RowId::R32 | RowId::R33 => Family::III,
        }
    }
}

impl std::fmt::Display for RowId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RowId::R11 => "1.1",
            RowId::R12 => "1.2",
            RowId::R13 => "1.3",
            RowId::R14 => "1.4",
            RowId::R15 => "1.5",
            RowId::R16 => "1.6",
            RowId::R21 => "2.1",
            RowId::R22 => "2.2",
            RowId::R31 => "3.1",
            RowId::R32 => "3.2",
            RowId::R33 => "3.3",
        })
    }
}

impl std::str::FromStr for RowId {
    type Err = QesError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1.1" => Ok(RowId::R11),
            "1.2" => Ok(RowId::R12),
            "1.3" => Ok(RowId::R13),
            "1.4" => Ok(RowId::R14),
            "1.5" => Ok(RowId::R15),
            "1.6" => Ok(RowId::R16),
            "2.1" => Ok(RowId::R21),
            "2.2" => Ok(RowId::R22),
            "3.1" => Ok(RowId::R31),
            "3.2" => Ok(RowId::R32),
            "3.3" => Ok(RowId::R33),
            other => Err(QesError::Constraint(format!(
                "unknown sector id '{other}' (expected e.g. '1.1')"
            ))),
        }
    }
}

/// Canonicalized model parameters.
///
/// Produced by [`make_model`] / [`make_model_exact`]; all downstream
/// operations take the parameters from here, so the canonical sector is
/// enforced in exactly one place.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Potential family.
    pub family: Family,
    /// Coupling `A` (canonicalized).
    pub a: f64,
    /// Coupling `B` (canonicalized).
    pub b: f64,
    /// Elliptic parameter `m = k²`, strictly inside `(0, 1)`.
    pub m: f64,
    /// Exact rational value of `A` when the input was rational.
    pub a_rat: Option<Rational64>,
    /// Exact rational value of `B` when the input was rational.
    pub b_rat: Option<Rational64>,
    /// Human-readable notes emitted during canonicalization.
    pub warnings: Vec<String>,
}

impl ModelParams {
    /// Real quarter period `K(m)`.
    pub fn quarter_period(&self) -> Result<f64> {
        complete_k(self.m)
    }
}

/// One admissible algebraizable sector for a concrete model.
///
/// Bundles the sector identity, the dimension parameter `n` (the invariant
/// subspace has dimension `n+1`), the family constants `(C₊₊, C₀₀, C₋₋)` of
/// the quartic `Q(ξ) = C₊₊ξ⁴ + C₀₀ξ² + C₋₋`, the sector constants
/// `(C₊, C₀, C₋)` of the linear part `R(ξ) = C₊ξ² + C₀ξ + C₋`, the chosen
/// root pair `(ξ₁, ξ₂)` of `Q`, and the operator constant `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraizationRow {
    /// Which catalog sector this is.
    pub row_id: RowId,
    /// Invariant subspace dimension minus one (degree cap of the polynomial
    /// part).
    pub n: usize,
    /// Quartic coefficient of `ξ⁴`.
    pub cpp: f64,
    /// Quartic coefficient of `ξ²`.
    pub c00: f64,
    /// Quartic constant coefficient.
    pub cmm: f64,
    /// Linear-part coefficient of `ξ²`.
    pub cp: Complex64,
    /// Linear-part coefficient of `ξ⁰`.
    pub cm: Complex64,
    /// Linear-part coefficient of `ξ¹`.
    pub c0: Complex64,
    /// First root of the quartic used by the factorized representation.
    pub xi1: Complex64,
    /// Second root (the `t`-map sends `ξ₂ ↦ ∞`).
    pub xi2: Complex64,
    /// Constant term of the algebraic operator.
    pub d: Complex64,
    /// The canonicalized model this row belongs to.
    pub params: ModelParams,
}

/// Value of the algebraizing coordinate at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XiValue {
    /// Regular point with the given coordinate value.
    Regular(f64),
    /// The coordinate map has a pole here (family III at `cn = 0`).
    Pole,
}

fn check_common(m: f64, a: f64, b: f64) -> Result<()> {
    if !m.is_finite() || m <= 0.0 || m >= 1.0 {
        return Err(QesError::Domain(format!(
            "elliptic parameter must satisfy 0 < m < 1, got m={m}"
        )));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(QesError::Domain(format!(
            "couplings must be finite, got A={a}, B={b}"
        )));
    }
    Ok(())
}

fn in_region(family: Family, a: f64, b: f64) -> bool {
    match family {
        Family::I => a >= -0.5 - PARAM_TOL && b >= -PARAM_TOL,
        Family::II => a >= -0.5 - PARAM_TOL && b >= -0.5 - PARAM_TOL,
        Family::III => a >= -0.5 - PARAM_TOL,
    }
}

fn reflect(
    family: Family,
    a: f64,
    b: f64,
    a_rat: Option<Rational64>,
    b_rat: Option<Rational64>,
) -> (f64, f64, Option<Rational64>, Option<Rational64>) {
    let one = Rational64::from_integer(1);
    match family {
        Family::I | Family::III => (-a - 1.0, -b, a_rat.map(|r| -r - one), b_rat.map(|r| -r)),
        Family::II => (
            -a - 1.0,
            -b - 1.0,
            a_rat.map(|r| -r - one),
            b_rat.map(|r| -r - one),
        ),
    }
}

fn make_model_impl(
    family: Family,
    a: f64,
    b: f64,
    m: f64,
    a_rat: Option<Rational64>,
    b_rat: Option<Rational64>,
) -> Result<ModelParams> {
    check_common(m, a, b)?;
    let mut warnings = Vec::new();
    let (a, b, a_rat, b_rat) = if in_region(family, a, b) {
        (a, b, a_rat, b_rat)
    } else {
        let (ra, rb, ra_rat, rb_rat) = reflect(family, a, b, a_rat, b_rat);
        if in_region(family, ra, rb) {
            warnings.push(format!(
                "parameters (A={a}, B={b}) mapped to the equivalent canonical sector (A={ra}, B={rb})"
            ));
            (ra, rb, ra_rat, rb_rat)
        } else if family == Family::II && a >= -0.5 - PARAM_TOL {
            warnings.push(format!(
                "B={b} lies below the canonical range B >= -1/2; keeping it as given \
                 (the spectrum coincides with that of the reflected parameters)"
            ));
            (a, b, a_rat, b_rat)
        } else {
            return Err(QesError::Constraint(format!(
                "parameters (A={a}, B={b}) lie outside the admissible domain of family {family} \
                 and are not equivalent to an interior point"
            )));
        }
    };
    Ok(ModelParams {
        family,
        a,
        b,
        m,
        a_rat,
        b_rat,
        warnings,
    })
}

/// Build a canonicalized model from floating-point couplings.
///
/// Applies the family reflection at most once to move `(A, B)` into the
/// canonical sector (recording a warning when it does); integrality tests in
/// [`catalog_rows`] then use a `1e-9` tolerance.
///
/// # Errors
///
/// `Domain` for non-finite couplings or `m ∉ (0,1)`; `Constraint` when the
/// parameters cannot be mapped into the canonical sector.
pub fn make_model(family: Family, a: f64, b: f64, m: f64) -> Result<ModelParams> {
    make_model_impl(family, a, b, m, None, None)
}

/// Build a canonicalized model from exact rational couplings.
///
/// Identical to [`make_model`], but integrality and restriction tests in
/// [`catalog_rows`] become exact.
pub fn make_model_exact(
    family: Family,
    a: Rational64,
    b: Rational64,
    m: f64,
) -> Result<ModelParams> {
    let af = *a.numer() as f64 / *a.denom() as f64;
    let bf = *b.numer() as f64 / *b.denom() as f64;
    make_model_impl(family, af, bf, m, Some(a), Some(b))
}

/// Potential value `V(x)` for the model.
///
/// Families I and II are singular on the lattice `x ≡ 0 (mod 2K)`; requests
/// within `1e-12` of a pole return a `Domain` error naming the point.
/// Family III is entire.
pub fn potential_value(params: &ModelParams, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(QesError::Domain(format!("coordinate must be finite, got x={x}")));
    }
    let t = jacobi_elliptic(x, params.m)?;
    let (a, b, m) = (params.a, params.b, params.m);
    match params.family {
        Family::I => {
            if t.sn.abs() < POLE_TOL {
                return Err(QesError::Domain(format!(
                    "potential of family I is singular at x={x} (pole of 1/sn^2)"
                )));
            }
            let s2 = t.sn * t.sn;
            Ok((b * b + a * (a + 1.0)) * t.dn * t.dn / s2 - 2.0 * b * (a + 0.5) * t.cn / s2)
        }
        Family::II => {
            if t.sn.abs() < POLE_TOL && b * (b + 1.0) != 0.0 {
                return Err(QesError::Domain(format!(
                    "potential of family II is singular at x={x} (pole of 1/sn^2)"
                )));
            }
            let dn2 = t.dn * t.dn;
            let sing = if b * (b + 1.0) == 0.0 {
                0.0
            } else {
                b * (b + 1.0) * dn2 / (t.sn * t.sn)
            };
            Ok(sing - a * (a + 1.0) * dn2)
        }
        Family::III => Ok(m * (b * b - a * (a + 1.0)) * t.cn * t.cn
            + 2.0 * b * m * (a + 0.5) * t.sn * t.cn),
    }
}

/// Algebraizing coordinate `ξ(x)`: family I `−cn`, family II `−cn/dn`,
/// family III `sn/cn` (with a [`XiValue::Pole`] at `cn = 0`).
pub fn xi_of_x(family: Family, x: f64, m: f64) -> Result<XiValue> {
    let t = jacobi_elliptic(x, m)?;
    Ok(match family {
        Family::I => XiValue::Regular(-t.cn),
        Family::II => XiValue::Regular(-t.cn / t.dn),
        Family::III => {
            if t.cn.abs() < POLE_TOL {
                XiValue::Pole
            } else {
                XiValue::Regular(t.sn / t.cn)
            }
        }
    })
}

/// Family constants `(C₊₊, C₀₀, C₋₋)` of the quartic `Q(ξ)`.
#[must_use]
pub fn family_constants(family: Family, m: f64) -> (f64, f64, f64) {
    match family {
        Family::I => (-m, 2.0 * m - 1.0, 1.0 - m),
        Family::II => (m, -(1.0 + m), 1.0),
        Family::III => (1.0 - m, 2.0 - m, 1.0),
    }
}

/// Truth value of "`v` is a non-negative integer", exact when a rational
/// witness is present, within `1e-9` otherwise; returns the integer.
fn nonneg_integer(v: f64, v_rat: Option<Rational64>) -> Option<usize> {
    if let Some(r) = v_rat {
        if r.is_integer() && *r.numer() >= 0 {
            return Some(*r.numer() as usize);
        }
        return None;
    }
    let nearest = v.round();
    if (v - nearest).abs() <= PARAM_TOL && nearest >= 0.0 {
        Some(nearest as usize)
    } else {
        None
    }
}

/// Truth value of "`v ≥ 0`", exact when possible, within `1e-9` otherwise.
fn nonneg(v: f64, v_rat: Option<Rational64>) -> bool {
    match v_rat {
        Some(r) => r >= Rational64::from_integer(0),
        None => v >= -PARAM_TOL,
    }
}

/// Offset a possibly-rational value by a rational constant, keeping track of
/// both representations.
fn offset(
    v: f64,
    v_rat: Option<Rational64>,
    num: i64,
    den: i64,
) -> (f64, Option<Rational64>) {
    let shift = Rational64::new(num, den);
    (
        v + num as f64 / den as f64,
        v_rat.map(|r| r + shift),
    )
}

/// Operator constant `d` for one sector.
fn sector_d(
    family: Family,
    n: usize,
    cp: Complex64,
    cm: Complex64,
    c0: Complex64,
    m: f64,
) -> Complex64 {
    let nf = n as f64;
    let kp2 = 1.0 - m;
    match family {
        Family::I => {
            c0 * 0.25 * (c0 - 4.0 * kp2 * (nf + 1.0))
                + cp / (2.0 * m) * (m * cm - kp2 * cp)
                + nf * (nf + 2.0) * kp2 / 2.0
        }
        Family::II => {
            let half = cp / (2.0 * m.sqrt());
            half * half - c0 * 0.5 * (nf + 1.0) + nf * (nf + 2.0) * (1.0 + m) / 4.0
        }
        Family::III => {
            let q = cp / kp2.sqrt();
            (q * q - nf * (nf + 2.0) * (2.0 - m) - 2.0 * c0 * (nf + 1.0)) * 0.25
        }
    }
}

/// All admissible algebraizable sectors of the catalog for this model, in
/// catalog order.  Returns an empty vector when no sector applies.
#[must_use]
pub fn catalog_rows(params: &ModelParams) -> Vec<AlgebraizationRow> {
    let (a, b, m) = (params.a, params.b, params.m);
    let (ar, br) = (params.a_rat, params.b_rat);
    let k = m.sqrt();
    let kp = (1.0 - m).sqrt();
    let kp2 = 1.0 - m;
    let (cpp, c00, cmm) = family_constants(params.family, m);

    let real_pair = (Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0));
    let imag_pair_i = (Complex64::new(0.0, kp / k), Complex64::new(0.0, -kp / k));
    let imag_pair_iii = (Complex64::new(0.0, 1.0 / kp), Complex64::new(0.0, -1.0 / kp));

    let re = |v: f64| Complex64::new(v, 0.0);
    let mut rows = Vec::new();
    let mut push = |row_id: RowId,
                    n: usize,
                    cp: Complex64,
                    cm: Complex64,
                    c0: Complex64,
                    roots: (Complex64, Complex64)| {
        let d = sector_d(params.family, n, cp, cm, c0, m);
        rows.push(AlgebraizationRow {
            row_id,
            n,
            cpp,
            c00,
            cmm,
            cp,
            cm,
            c0,
            xi1: roots.0,
            xi2: roots.1,
            d,
            params: params.clone(),
        });
    };

    match params.family {
        Family::I => {
            let b_minus_a = (b - a, ar.and_then(|x| br.map(|y| y - x)));
            let a_minus_b_p1 = (a - b + 1.0, ar.and_then(|x| br.map(|y| x - y + 1)));
            // 1.1: n = A, needs B - A >= 0.
            if let Some(n) = nonneg_integer(a, ar) {
                if nonneg(b_minus_a.0, b_minus_a.1) {
                    push(
                        RowId::R11,
                        n,
                        re(2.0 * m * b),
                        re(2.0 * kp2 * b),
                        re(a),
                        real_pair,
                    );
                }
            }
            // 1.2: n = A - 1, needs B - A >= 0.
            let (v, vr) = offset(a, ar, -1, 1);
            if let Some(n) = nonneg_integer(v, vr) {
                if nonneg(b_minus_a.0, b_minus_a.1) {
                    push(
                        RowId::R12,
                        n,
                        re(2.0 * m * b),
                        re(2.0 * kp2 * b),
                        re(a + 1.0),
                        real_pair,
                    );
                }
            }
            // 1.3: n = B - 1, needs A - B + 1 >= 0.
            let (v, vr) = offset(b, br, -1, 1);
            if let Some(n) = nonneg_integer(v, vr) {
                if nonneg(a_minus_b_p1.0, a_minus_b_p1.1) {
                    push(
                        RowId::R13,
                        n,
                        Complex64::new(2.0 * m * (a + 0.5), -k * kp),
                        Complex64::new(2.0 * kp2 * (a + 0.5), k * kp),
                        re(b),
                        imag_pair_i,
                    );
                }
            }
            // 1.4: n = A - 1/2, needs B - A >= 0.
            let (v, vr) = offset(a, ar, -1, 2);
            if let Some(n) = nonneg_integer(v, vr) {
                if nonneg(b_minus_a.0, b_minus_a.1) {
                    push(
                        RowId::R14,
                        n,
                        Complex64::new(2.0 * m * b, -k * kp),
                        Complex64::new(2.0 * kp2 * b, k * kp),
                        re(a + 0.5),
                        imag_pair_i,
                    );
                }
            }
            // 1.5: n = B - 1/2, needs A - B + 1 >= 0.
            let (v, vr) = offset(b, br, -1, 2);
            if let Some(n) = nonneg_integer(v, vr) {
                if nonneg(a_minus_b_p1.0, a_minus_b_p1.1) {
                    push(
                        RowId::R15,
                        n,
                        re(2.0 * m * (a + 0.5)),
                        re(2.0 * kp2 * (a + 0.5)),
                        re(b - 0.5),
                        real_pair,
                    );
                }
            }
            // 1.6: n = B - 3/2, needs A - B + 1 >= 0.
            let (v, vr) = offset(b, br, -3, 2);
            if let Some(n) = nonneg_integer(v, vr) {
                if nonneg(a_minus_b_p1.0, a_minus_b_p1.1) {
                    push(
                        RowId::R16,
                        n,
                        re(2.0 * m * (a + 0.5)),
                        re(2.0 * kp2 * (a + 0.5)),
                        re(b + 0.5),
                        real_pair,
                    );
                }
            }
        }
        Family::II => {
            // 2.1: n = A - 1/2, no extra restriction.
            let (v, vr) = offset(a, ar, -1, 2);
            if let Some(n) = nonneg_integer(v, vr) {
                push(
                    RowId::R21,
                    n,
                    re(-2.0 * m * (b + 0.5)),
                    re(2.0 * (b + 0.5)),
                    re(-kp2 * (a + 0.5)),
                    real_pair,
                );
                // 2.2: same n, needs B <= 0.
                let b_ok = match br {
                    Some(r) => r <= Rational64::from_integer(0),
                    None => b <= PARAM_TOL,
                };
                if b_ok {
                    push(
                        RowId::R22,
                        n,
                        re(2.0 * m * (b + 0.5)),
                        re(-2.0 * (b + 0.5)),
                        re(-kp2 * (a + 0.5)),
                        real_pair,
                    );
                }
            }
        }
        Family::III => {
            // 3.1: n = A.
            if let Some(n) = nonneg_integer(a, ar) {
                push(
                    RowId::R31,
                    n,
                    re(-2.0 * kp2 * b),
                    re(-2.0 * b),
                    re(-a * m),
                    imag_pair_iii,
                );
            }
            // 3.2: n = A - 1.
            let (v, vr) = offset(a, ar, -1, 1);
            if let Some(n) = nonneg_integer(v, vr) {
                push(
                    RowId::R32,
                    n,
                    re(-2.0 * kp2 * b),
                    re(-2.0 * b),
                    re(-(a + 1.0) * m),
                    imag_pair_iii,
                );
            }
            // 3.3: n = A - 1/2.
            let (v, vr) = offset(a, ar, -1, 2);
            if let Some(n) = nonneg_integer(v, vr) {
                push(
                    RowId::R33,
                    n,
                    Complex64::new(-2.0 * kp2 * b, kp),
                    Complex64::new(-2.0 * b, kp),
                    re(-(a + 0.5) * m),
                    imag_pair_iii,
                );
            }
        }
    }
    rows
}

/// Shifted operator constant `d₁ = d + n(n+2)(C₀₀ − Ĉ₀₀)/12`, where `Ĉ₀₀`
/// is the middle quartic coefficient after the root-pair Möbius change of
/// variable.
#[must_use]
pub fn shift_d(row: &AlgebraizationRow) -> Complex64 {
    let diff = row.xi1 - row.xi2;
    let hat_c00 = (6.0 * (row.xi1 * row.xi2).powu(2) * row.cpp
        + (row.xi1 * row.xi1 + row.xi2 * row.xi2 + 4.0 * row.xi1 * row.xi2) * row.c00
        + 6.0 * row.cmm)
        / (diff * diff);
    let nf = row.n as f64;
    row.d + nf * (nf + 2.0) * (Complex64::new(row.c00, 0.0) - hat_c00) / 12.0
}

/// Quartic `Q(ξ) = C₊₊ξ⁴ + C₀₀ξ² + C₋₋` of the row's family.
#[inline]
#[must_use]
pub fn quartic(row: &AlgebraizationRow, xi: f64) -> f64 {
    (row.cpp * xi * xi + row.c00) * xi * xi + row.cmm
}

/// Gauge factor `μ(x) = Q(ξ)^{−n/4} · exp(∫₀^ξ R(τ)/(2Q(τ)) dτ)` on the
/// regular branch through `ξ₀ = 0`, with `R(τ) = C₊τ² + C₀τ + C₋`.
///
/// The integral is evaluated by adaptive Simpson quadrature along the real
/// segment `[0, ξ(x)]` to an absolute tolerance of `1e-12`.
///
/// # Errors
///
/// `Domain` when `x` sits at a pole of the coordinate map; `Numerical` if
/// quadrature fails to converge within its refinement budget.
pub fn gauge_mu(row: &AlgebraizationRow, x: f64) -> Result<Complex64> {
    let xi = match xi_of_x(row.params.family, x, row.params.m)? {
        XiValue::Regular(v) => v,
        XiValue::Pole => {
            return Err(QesError::Domain(format!(
                "gauge factor undefined at x={x}: coordinate map has a pole there"
            )))
        }
    };
    let f = |t: f64| {
        let q = (row.cpp * t * t + row.c00) * t * t + row.cmm;
        (row.cp * (t * t) + row.c0 * t + row.cm) / (2.0 * q)
    };
    let integral = adaptive_simpson(&f, 0.0, xi, 1e-12)?;
    let q = quartic(row, xi);
    if q <= 0.0 {
        return Err(QesError::Domain(format!(
            "gauge factor undefined at x={x}: quartic is non-positive there"
        )));
    }
    Ok(q.powf(-(row.n as f64) / 4.0) * integral.exp())
}

/// Adaptive Simpson quadrature of a complex-valued integrand over a real
/// interval.
fn adaptive_simpson(
    f: &dyn Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<Complex64> {
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    fn simpson(f: &dyn Fn(f64) -> Complex64, a: f64, fa: Complex64, b: f64, fb: Complex64) -> (Complex64, Complex64) {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> Complex64,
        a: f64,
        fa: Complex64,
        b: f64,
        fb: Complex64,
        whole: Complex64,
        fm: Complex64,
        tol: f64,
        depth: u32,
    ) -> Result<Complex64> {
        let mid = 0.5 * (a + b);
        let (left, flm) = simpson(f, a, fa, mid, fm);
        let (right, frm) = simpson(f, mid, fm, b, fb);
        let delta = left + right - whole;
        if delta.norm() <= 15.0 * tol || (b - a).abs() < 1e-14 {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(QesError::Numerical(
                "adaptive quadrature failed to converge within its refinement budget".into(),
            ));
        }
        Ok(recurse(f, a, fa, mid, fm, left, flm, tol / 2.0, depth - 1)?
            + recurse(f, mid, fm, b, fb, right, frm, tol / 2.0, depth - 1)?)
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, fm, tol, 48)
}
