//! Exactly-solvable limits of the periodic models.
//!
//! At the degenerate values of the elliptic modulus the elliptic functions
//! collapse to hyperbolic (`m → 1`) or trigonometric (`m → 0`) functions and
//! the periodic potentials turn into classical exactly-solvable wells whose
//! *complete* spectrum and eigenfunctions are available in closed form:
//!
//! * `V1` — hyperbolic limit of family I:
//!   `(B² + A(A+1))/sinh²x − 2B(A+½)·cosh x/sinh²x` on `(0, ∞)`,
//!   energies `−(A−r)²`;
//! * `V2` — trigonometric limit of family I:
//!   `(B² + A(A+1))/sin²x − 2B(A+½)·cos x/sin²x` on `(0, π)`,
//!   energies `+(A−r)²`;
//! * `V3` — hyperbolic limit of family II (a generalized Pöschl–Teller
//!   well): `B(B+1)/sinh²x − A(A+1)/cosh²x` on `(0, ∞)`,
//!   energies `−(A+B−2r)²`;
//! * `V4` — hyperbolic limit of family III:
//!   `(B² − A(A+1))·sech²x + 2B(A+½)·sech x·tanh x` on all of `ℝ`,
//!   energies `−(A−r)²`.
//!
//! The eigenfunctions are Jacobi polynomials dressed with the appropriate
//! gauge prefactor; for `V4` the polynomial parameters are a complex
//! conjugate pair and the argument is imaginary, yet the dressed result is
//! real after a constant phase is absorbed.
//!
//! [`limit_scan`] drives the algebraic band-edge solver along a sequence of
//! moduli approaching a limit and reports the distance of every tracked
//! level to its nearest exactly-solvable target, demonstrating that the
//! algebraic spectra collapse onto the closed-form ones.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::jacobi_poly;
use crate::error::{QesError, Result};
use crate::model::{catalog_rows, make_model, Family, ModelParams, RowId};
use crate::recurrence::{band_edges, monic_recurrence};
use crate::wavefunction::fmt_g;

/// Tolerance for detecting coordinate singularities of the limit potentials.
const SINGULARITY_TOL: f64 = 1e-12;

/// Which exactly-solvable well a limit collapses onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EsTag {
    /// Hyperbolic limit of family I (`m → 1`).
    V1,
    /// Trigonometric limit of family I (`m → 0`).
    V2,
    /// Hyperbolic limit of family II (`m → 1`).
    V3,
    /// Hyperbolic limit of family III (`m → 1`).
    V4,
}

impl std::fmt::Display for EsTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            EsTag::V1 => "V1",
            EsTag::V2 => "V2",
            EsTag::V3 => "V3",
            EsTag::V4 => "V4",
        };
        f.write_str(s)
    }
}

/// An exactly-solvable comparison class: the well shape plus its couplings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ESClass {
    /// Well shape.
    pub tag: EsTag,
    /// Coupling `A` inherited from the periodic model.
    pub a: f64,
    /// Coupling `B` inherited from the periodic model.
    pub b: f64,
}

impl std::fmt::Display for ESClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}(A={}, B={})", self.tag, self.a, self.b)
    }
}

/// Modulus limit a scan approaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitTarget {
    /// `m → 1` (hyperbolic degeneration).
    UnitModulus,
    /// `m → 0` (trigonometric degeneration).
    ZeroModulus,
}

impl std::fmt::Display for LimitTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LimitTarget::UnitModulus => f.write_str("k1"),
            LimitTarget::ZeroModulus => f.write_str("k0"),
        }
    }
}

impl std::str::FromStr for LimitTarget {
    type Err = QesError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "k1" | "m1" | "1" | "unit" => Ok(LimitTarget::UnitModulus),
            "k0" | "m0" | "0" | "zero" => Ok(LimitTarget::ZeroModulus),
            other => Err(QesError::Constraint(format!(
                "unknown limit target '{other}' (expected k1 or k0)"
            ))),
        }
    }
}

/// The exactly-solvable class a family collapses onto in a given limit.
///
/// # Errors
///
/// `Constraint` when the limit is not an exactly-solvable comparison
/// target: family III at `m → 0` degenerates to free-particle motion and
/// family II at `m → 0` is not covered.
pub fn es_class_for(family: Family, target: LimitTarget, a: f64, b: f64) -> Result<ESClass> {
    let tag = match (family, target) {
        (Family::I, LimitTarget::UnitModulus) => EsTag::V1,
        (Family::I, LimitTarget::ZeroModulus) => EsTag::V2,
        (Family::II, LimitTarget::UnitModulus) => EsTag::V3,
        (Family::III, LimitTarget::UnitModulus) => EsTag::V4,
        (Family::III, LimitTarget::ZeroModulus) => {
            return Err(QesError::Constraint(
                "family III at m -> 0 is a free particle limit; no bound comparison class"
                    .into(),
            ));
        }
        (Family::II, LimitTarget::ZeroModulus) => {
            return Err(QesError::Constraint(
                "family II at m -> 0 has no exactly-solvable comparison class".into(),
            ));
        }
    };
    Ok(ESClass { tag, a, b })
}

/// Closed-form limit potential.
///
/// # Errors
///
/// `Domain` outside the well's natural domain (`V1`, `V3`: `x > 0`;
/// `V2`: `0 < x < π`; `V4`: all of `ℝ`) or at a singular endpoint.
pub fn es_potential(cls: &ESClass, x: f64) -> Result<f64> {
    let (a, b) = (cls.a, cls.b);
    match cls.tag {
        EsTag::V1 => {
            if x <= 0.0 || x.sinh().abs() < SINGULARITY_TOL {
                return Err(QesError::Domain(format!(
                    "V1 is defined on (0, inf); x = {x} is outside or singular"
                )));
            }
            let (s2, c) = (x.sinh() * x.sinh(), x.cosh());
            Ok((b * b + a * (a + 1.0)) / s2 - 2.0 * b * (a + 0.5) * c / s2)
        }
        EsTag::V2 => {
            if x <= 0.0 || x >= std::f64::consts::PI || x.sin().abs() < SINGULARITY_TOL {
                return Err(QesError::Domain(format!(
                    "V2 is defined on (0, pi); x = {x} is outside or singular"
                )));
            }
            let (s2, c) = (x.sin() * x.sin(), x.cos());
            Ok((b * b + a * (a + 1.0)) / s2 - 2.0 * b * (a + 0.5) * c / s2)
        }
        EsTag::V3 => {
            if x <= 0.0 || x.sinh().abs() < SINGULARITY_TOL {
                return Err(QesError::Domain(format!(
                    "V3 is defined on (0, inf); x = {x} is outside or singular"
                )));
            }
            let (s2, c2) = (x.sinh() * x.sinh(), x.cosh() * x.cosh());
            Ok(b * (b + 1.0) / s2 - a * (a + 1.0) / c2)
        }
        EsTag::V4 => {
            let sech = 1.0 / x.cosh();
            Ok((b * b - a * (a + 1.0)) * sech * sech
                + 2.0 * b * (a + 0.5) * sech * x.tanh())
        }
    }
}

/// Closed-form energy of level `r` of an exactly-solvable class.
#[must_use]
pub fn es_energy(cls: &ESClass, r: usize) -> f64 {
    let rf = r as f64;
    match cls.tag {
        EsTag::V1 | EsTag::V4 => -(cls.a - rf) * (cls.a - rf),
        EsTag::V2 => (cls.a - rf) * (cls.a - rf),
        EsTag::V3 => {
            let q = cls.a + cls.b - 2.0 * rf;
            -q * q
        }
    }
}

/// Closed-form eigenfunction of level `r`, up to overall normalization.
///
/// The gauge prefactor multiplies a Jacobi polynomial:
///
/// * `V1`: `(cosh x − 1)^{(B−A)/2} (cosh x + 1)^{−(B+A)/2}
///   P_r^{(B−A−½, −B−A−½)}(cosh x)`;
/// * `V2`: the same with `cosh x ↦ cos x` (prefactor base `|cos x − 1|`);
/// * `V3`: `(cosh 2x − 1)^{−B/2} (cosh 2x + 1)^{−A/2}
///   P_r^{(−B−½, −A−½)}(cosh 2x)`;
/// * `V4`: `sech^A x · exp(−B·atan(sinh x)) ·
///   P_r^{(−iB−A−½, iB−A−½)}(i·sinh x)`, multiplied by the constant phase
///   `(−i)^r` so the returned values are real.
///
/// # Errors
///
/// `Domain` outside the class domain (same rules as [`es_potential`]).
pub fn es_eigenfunction(cls: &ESClass, r: usize, x: f64) -> Result<Complex64> {
    // Domain screening shares the potential's rules.
    es_potential(cls, x)?;
    let (a, b) = (cls.a, cls.b);
    let re = |v: f64| Complex64::new(v, 0.0);
    match cls.tag {
        EsTag::V1 | EsTag::V2 => {
            let c = if cls.tag == EsTag::V1 { x.cosh() } else { x.cos() };
            // |c − 1| keeps the base positive on both branches (cosh x > 1,
            // cos x < 1); the dropped sign is a constant phase.
            let pre =
                (c - 1.0).abs().powf((b - a) / 2.0) * (c + 1.0).powf(-(b + a) / 2.0);
            let p = jacobi_poly(r, re(b - a - 0.5), re(-b - a - 0.5), re(c));
            Ok(pre * p)
        }
        EsTag::V3 => {
            let c = (2.0 * x).cosh();
            let pre = (c - 1.0).powf(-b / 2.0) * (c + 1.0).powf(-a / 2.0);
            let p = jacobi_poly(r, re(-b - 0.5), re(-a - 0.5), re(c));
            Ok(pre * p)
        }
        EsTag::V4 => {
            let s = x.sinh();
            let pre = (1.0 / x.cosh()).powf(a) * (-b * s.atan()).exp();
            let alpha = Complex64::new(-a - 0.5, -b);
            let beta = Complex64::new(-a - 0.5, b);
            let p = jacobi_poly(r, alpha, beta, Complex64::new(0.0, s));
            // (−i)^r undoes the phase the imaginary argument introduces.
            let phase = Complex64::new(0.0, -1.0).powu(r as u32);
            Ok(pre * p * phase)
        }
    }
}

/// One tracked level at one modulus of a [`limit_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitLevel {
    /// Index of the level in the sorted algebraic spectrum.
    pub slot: usize,
    /// Algebraic band-edge energy at this modulus.
    pub energy: Complex64,
    /// Index `r` of the matched exactly-solvable level.
    pub es_index: usize,
    /// Energy of the matched exactly-solvable level.
    pub es_energy: f64,
    /// `|energy − es_energy|`.
    pub gap: f64,
}

/// All tracked levels at one modulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitStep {
    /// Elliptic parameter of this step.
    pub m: f64,
    /// Tracked levels, ordered by slot.
    pub levels: Vec<LimitLevel>,
}

/// Convergence table of a modulus scan toward an exactly-solvable limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitScan {
    /// The comparison class the spectra collapse onto.
    pub class: ESClass,
    /// One entry per scanned modulus, in scan order.
    pub steps: Vec<LimitStep>,
    /// Largest gap remaining at the final (closest) modulus.
    pub final_max_gap: f64,
}

impl LimitScan {
    /// Render the table as CSV with columns
    /// `m, level_index, e_re, e_im, e_es, abs_gap`.
    #[must_use]
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,level_index,e_re,e_im,e_es,abs_gap\n");
        for step in &self.steps {
            for lv in &step.levels {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    fmt_g(step.m),
                    lv.slot,
                    fmt_g(lv.energy.re),
                    fmt_g(lv.energy.im),
                    fmt_g(lv.es_energy),
                    fmt_g(lv.gap),
                ));
            }
        }
        out
    }
}

/// Collect the sorted algebraic spectrum (with root multiplicities) of all
/// selected sectors at one modulus.
fn sorted_spectrum(
    params: &ModelParams,
    rows: Option<&[RowId]>,
) -> Result<Vec<Complex64>> {
    let mut sectors = catalog_rows(params);
    if let Some(filter) = rows {
        sectors.retain(|r| filter.contains(&r.row_id));
    }
    if sectors.is_empty() {
        return Err(QesError::Constraint(format!(
            "no admissible algebraization for family {} with A={}, B={}",
            params.family, params.a, params.b
        )));
    }
    let mut energies = Vec::new();
    for row in &sectors {
        let rec = monic_recurrence(row)?;
        for edge in band_edges(&rec)? {
            for _ in 0..edge.multiplicity_hint {
                energies.push(edge.energy);
            }
        }
    }
    energies.sort_by(|p, q| p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im)));
    Ok(energies)
}

/// Drive the algebraic solver along a modulus sequence approaching an
/// exactly-solvable limit and report, per step and per level, the distance to
/// the matched closed-form level.
///
/// Level identity is the position in the `(Re, Im)`-sorted spectrum: the
/// band edges vary continuously in the modulus, so the sorted order is
/// stable between steps except where levels merge — and merging levels end
/// up at the same closed-form target anyway. The number of levels must stay
/// constant across the scan. The exactly-solvable index of each level is
/// assigned by the nearest-energy rule at the modulus closest to the limit
/// (the final sequence entry), where the assignment is sharp; seeding at the
/// coarse end would mis-assign whenever the spectrum is still complex there
/// while the limit is real.
///
/// # Errors
///
/// * `Constraint` — modulus sequence empty, outside `(0,1)`, or not strictly
///   monotone toward the target; unsupported family/limit combination; no
///   admissible sector.
/// * `Numerical` — the level count changes along the scan (the message names
///   the modulus).
pub fn limit_scan(
    family: Family,
    a: f64,
    b: f64,
    rows: Option<&[RowId]>,
    target: LimitTarget,
    m_seq: &[f64],
) -> Result<LimitScan> {
    if m_seq.is_empty() {
        return Err(QesError::Constraint("empty modulus sequence".into()));
    }
    for &m in m_seq {
        if !(m > 0.0 && m < 1.0) {
            return Err(QesError::Constraint(format!(
                "modulus sequence entries must lie in (0,1); got {m}"
            )));
        }
    }
    for w in m_seq.windows(2) {
        let toward = match target {
            LimitTarget::UnitModulus => w[1] > w[0],
            LimitTarget::ZeroModulus => w[1] < w[0],
        };
        if !toward {
            return Err(QesError::Constraint(format!(
                "modulus sequence must approach {target} strictly monotonically; \
                 {} does not follow {}",
                w[1], w[0]
            )));
        }
    }

    // Canonical couplings come from the model builder; the comparison class
    // must use the same representative the band-edge solver sees.
    let probe = make_model(family, a, b, m_seq[0])?;
    let class = es_class_for(family, target, probe.a, probe.b)?;

    // Collect the sorted spectra, guarding the level count step to step.
    let mut spectra: Vec<Vec<Complex64>> = Vec::with_capacity(m_seq.len());
    for &m in m_seq {
        let params = make_model(family, a, b, m)?;
        let energies = sorted_spectrum(&params, rows)?;
        if let Some(prev) = spectra.last() {
            if energies.len() != prev.len() {
                return Err(QesError::Numerical(format!(
                    "level tracking lost a root at m = {m}: {} levels after {}",
                    energies.len(),
                    prev.len()
                )));
            }
        }
        spectra.push(energies);
    }

    // Nearest-energy assignment at the finest modulus.
    let finest = spectra.last().expect("non-empty sequence");
    let r_max = finest.len() + 4;
    let assignment: Vec<usize> = finest
        .iter()
        .map(|&e| {
            (0..=r_max)
                .min_by(|&p, &q| {
                    let dp = (e - es_energy(&class, p)).norm();
                    let dq = (e - es_energy(&class, q)).norm();
                    dp.total_cmp(&dq)
                })
                .expect("non-empty candidate range")
        })
        .collect();

    let steps: Vec<LimitStep> = m_seq
        .iter()
        .zip(&spectra)
        .map(|(&m, energies)| {
            let levels = energies
                .iter()
                .enumerate()
                .map(|(slot, &e)| {
                    let r = assignment[slot];
                    let e_es = es_energy(&class, r);
                    LimitLevel {
                        slot,
                        energy: e,
                        es_index: r,
                        es_energy: e_es,
                        gap: (e - e_es).norm(),
                    }
                })
                .collect();
            LimitStep { m, levels }
        })
        .collect();

    let final_max_gap = steps
        .last()
        .expect("at least one step")
        .levels
        .iter()
        .map(|lv| lv.gap)
        .fold(0.0_f64, f64::max);

    Ok(LimitScan {
        class,
        steps,
        final_max_gap,
    })
}

/// Default modulus sequence approaching a limit geometrically:
/// `1 − 10⁻ʲ` (or `10⁻ʲ`), `j = 1..=levels`.
#[must_use]
pub fn default_m_sequence(target: LimitTarget, levels: u32) -> Vec<f64> {
    (1..=levels)
        .map(|j| {
            let eps = 10f64.powi(-(j as i32));
            match target {
                LimitTarget::UnitModulus => 1.0 - eps,
                LimitTarget::ZeroModulus => eps,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavefunction::{assemble, default_grid, fit_constant};
    use approx::assert_relative_eq;

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        let h = (hi - lo) / (n - 1) as f64;
        (0..n).map(|i| lo + h * i as f64).collect()
    }

    /// Relative 5-point-stencil residual of an exactly-solvable level.
    fn es_residual(cls: &ESClass, r: usize, xs: &[f64]) -> f64 {
        let h = xs[1] - xs[0];
        let psi: Vec<Complex64> = xs
            .iter()
            .map(|&x| es_eigenfunction(cls, r, x).expect("interior point"))
            .collect();
        let e = es_energy(cls, r);
        let mut worst = 0.0_f64;
        let mut amp = 0.0_f64;
        for i in 2..xs.len() - 2 {
            let lap = (-psi[i - 2] + 16.0 * psi[i - 1] - 30.0 * psi[i] + 16.0 * psi[i + 1]
                - psi[i + 2])
                / (12.0 * h * h);
            let v = es_potential(cls, xs[i]).expect("interior point");
            let res = -lap + (v - e) * psi[i];
            worst = worst.max(res.norm());
            amp = amp.max(psi[i].norm());
        }
        worst / amp
    }

    #[test]
    fn potential_values_match_closed_forms() {
        let v4 = ESClass { tag: EsTag::V4, a: 0.0, b: 1.0 };
        assert_relative_eq!(es_potential(&v4, 0.0).unwrap(), 1.0, max_relative = 1e-15);

        let v2 = ESClass { tag: EsTag::V2, a: 0.0, b: 0.5 };
        assert_relative_eq!(
            es_potential(&v2, std::f64::consts::FRAC_PI_2).unwrap(),
            0.25,
            max_relative = 1e-15
        );
    }

    #[test]
    fn singular_endpoints_are_domain_errors() {
        let v1 = ESClass { tag: EsTag::V1, a: 1.0, b: 1.5 };
        assert!(matches!(es_potential(&v1, 0.0), Err(QesError::Domain(_))));
        assert!(matches!(es_potential(&v1, -1.0), Err(QesError::Domain(_))));
        let v2 = ESClass { tag: EsTag::V2, a: 0.0, b: 0.5 };
        assert!(matches!(
            es_potential(&v2, std::f64::consts::PI),
            Err(QesError::Domain(_))
        ));
        let v3 = ESClass { tag: EsTag::V3, a: 0.5, b: -1.0 };
        assert!(matches!(es_potential(&v3, 0.0), Err(QesError::Domain(_))));
        assert!(es_potential(&ESClass { tag: EsTag::V4, a: 1.0, b: 0.3 }, -7.0).is_ok());
    }

    #[test]
    fn energies_match_closed_forms() {
        // Ladder head of the Pöschl–Teller well: −(A+B)².
        let v3 = ESClass { tag: EsTag::V3, a: 0.5, b: -2.0 };
        assert_relative_eq!(es_energy(&v3, 0), -2.25, max_relative = 1e-15);
        // First excited hyperbolic-I level sits at zero when A = 1.
        let v1 = ESClass { tag: EsTag::V1, a: 1.0, b: 1.5 };
        assert_eq!(es_energy(&v1, 1), 0.0);
        // V4 ground level vanishes when A = 0.
        let v4 = ESClass { tag: EsTag::V4, a: 0.0, b: 1.0 };
        assert_eq!(es_energy(&v4, 0), 0.0);
        // Trigonometric energies are the sign-flipped hyperbolic ones.
        let v2 = ESClass { tag: EsTag::V2, a: 1.0, b: 1.5 };
        assert_eq!(es_energy(&v2, 2), 1.0);
    }

    #[test]
    fn eigenfunctions_satisfy_the_schroedinger_equation() {
        let cases: Vec<(ESClass, f64, f64)> = vec![
            (ESClass { tag: EsTag::V1, a: 1.0, b: 1.5 }, 0.5, 4.0),
            (ESClass { tag: EsTag::V1, a: 3.0, b: 1.2 }, 0.5, 4.0),
            (ESClass { tag: EsTag::V2, a: 1.0, b: 1.5 }, 0.4, std::f64::consts::PI - 0.4),
            (ESClass { tag: EsTag::V3, a: 0.5, b: -1.0 }, 0.4, 3.0),
            (ESClass { tag: EsTag::V3, a: 1.5, b: -2.0 }, 0.4, 3.0),
            (ESClass { tag: EsTag::V4, a: 1.0, b: 0.1 }, -3.0, 3.0),
            (ESClass { tag: EsTag::V4, a: 0.0, b: 1.0 }, -3.0, 3.0),
        ];
        for (cls, lo, hi) in cases {
            let xs = grid(lo, hi, 2001);
            for r in 0..3 {
                let res = es_residual(&cls, r, &xs);
                assert!(
                    res < 1e-6,
                    "residual {res:.2e} too large for {cls} level {r}"
                );
            }
        }
    }

    #[test]
    fn hyperbolic_ground_state_reduces_to_sqrt_tanh_half() {
        let cls = ESClass { tag: EsTag::V1, a: 0.0, b: 0.5 };
        let xs = grid(0.3, 3.0, 57);
        let got: Vec<Complex64> = xs
            .iter()
            .map(|&x| es_eigenfunction(&cls, 0, x).unwrap())
            .collect();
        let reference: Vec<Complex64> = xs
            .iter()
            .map(|&x| Complex64::new((x / 2.0).tanh().sqrt(), 0.0))
            .collect();
        let (_, dev) = fit_constant(&got, &reference);
        assert!(dev < 1e-12, "deviation {dev:.2e}");
    }

    #[test]
    fn poschl_teller_ground_state_reduces_to_cosech_pow_sqrt_sech() {
        let cls = ESClass { tag: EsTag::V3, a: 0.5, b: -2.0 };
        let xs = grid(0.3, 3.0, 57);
        let got: Vec<Complex64> = xs
            .iter()
            .map(|&x| es_eigenfunction(&cls, 0, x).unwrap())
            .collect();
        let reference: Vec<Complex64> = xs
            .iter()
            .map(|&x| {
                Complex64::new(
                    (1.0 / x.sinh()).powf(cls.b) * (1.0 / x.cosh()).sqrt(),
                    0.0,
                )
            })
            .collect();
        let (_, dev) = fit_constant(&got, &reference);
        assert!(dev < 1e-12, "deviation {dev:.2e}");
    }

    #[test]
    fn sech_well_degenerate_level_collapses_onto_the_ground_shape() {
        // A = 1: levels r = 0 and r = 2 share the energy −1, and the r = 2
        // polynomial factor degenerates to the constant −(1/4 + B²)/2, so the
        // two dressed states are proportional (phase (−i)² flips the sign).
        let b = 0.3;
        let cls = ESClass { tag: EsTag::V4, a: 1.0, b };
        assert_eq!(es_energy(&cls, 2), es_energy(&cls, 0));
        let xs = grid(-3.0, 3.0, 61);
        let got: Vec<Complex64> = xs
            .iter()
            .map(|&x| es_eigenfunction(&cls, 2, x).unwrap())
            .collect();
        let reference: Vec<Complex64> = xs
            .iter()
            .map(|&x| es_eigenfunction(&cls, 0, x).unwrap())
            .collect();
        let (ratio, dev) = fit_constant(&got, &reference);
        assert!(dev < 1e-12, "deviation {dev:.2e}");
        let expected = Complex64::new((0.25 + b * b) / 2.0, 0.0);
        assert!((ratio - expected).norm() < 1e-12, "ratio {ratio}");
    }

    #[test]
    fn sech_well_states_are_real() {
        let cls = ESClass { tag: EsTag::V4, a: 1.0, b: 0.1 };
        for r in 0..4 {
            let mut max_abs = 0.0_f64;
            let mut max_im = 0.0_f64;
            for &x in &grid(-3.0, 3.0, 101) {
                let v = es_eigenfunction(&cls, r, x).unwrap();
                max_abs = max_abs.max(v.norm());
                max_im = max_im.max(v.im.abs());
            }
            assert!(
                max_im <= 1e-10 * max_abs,
                "imaginary residue {max_im:.2e} vs amplitude {max_abs:.2e} at level {r}"
            );
        }
    }

    #[test]
    fn scan_of_family_iii_collapses_onto_the_sech_well() {
        let m_seq: Vec<f64> = (1..=7).map(|j| 1.0 - 10f64.powi(-j)).collect();
        let scan = limit_scan(
            Family::III,
            1.0,
            0.1,
            None,
            LimitTarget::UnitModulus,
            &m_seq,
        )
        .unwrap();
        assert_eq!(scan.class.tag, EsTag::V4);
        // Sectors with n = 1 and n = 0 contribute 2 + 1 = 3 levels.
        assert_eq!(scan.steps[0].levels.len(), 3);
        assert!(
            scan.final_max_gap < 1e-3,
            "final gap {:.2e}",
            scan.final_max_gap
        );
        // Gaps decay monotonically over the last five steps.
        for slot in 0..3 {
            for w in scan.steps[scan.steps.len() - 5..].windows(2) {
                let g0 = w[0].levels[slot].gap;
                let g1 = w[1].levels[slot].gap;
                assert!(
                    g1 <= g0 + 1e-14,
                    "slot {slot}: gap grew from {g0:.3e} to {g1:.3e}"
                );
            }
        }
    }

    #[test]
    fn scan_seeds_expected_level_indices() {
        let m_seq: Vec<f64> = (1..=5).map(|j| 1.0 - 10f64.powi(-j)).collect();
        let scan = limit_scan(
            Family::III,
            1.0,
            0.0,
            None,
            LimitTarget::UnitModulus,
            &m_seq,
        )
        .unwrap();
        // Edges tend to {−1, −1, 0}; the matched closed-form energies must be
        // two at −1 and one at 0.
        let last = scan.steps.last().unwrap();
        let mut es: Vec<f64> = last.levels.iter().map(|lv| lv.es_energy).collect();
        es.sort_by(f64::total_cmp);
        assert_eq!(es, vec![-1.0, -1.0, 0.0]);
    }

    #[test]
    fn scan_rejects_unsupported_limits() {
        let seq = [0.5, 0.1, 0.01];
        let err = limit_scan(Family::III, 1.0, 0.0, None, LimitTarget::ZeroModulus, &seq)
            .unwrap_err();
        assert!(matches!(&err, QesError::Constraint(msg) if msg.contains("free particle")));
        let err = limit_scan(Family::II, 0.5, -1.0, None, LimitTarget::ZeroModulus, &seq)
            .unwrap_err();
        assert!(matches!(err, QesError::Constraint(_)));
    }

    #[test]
    fn scan_rejects_bad_modulus_sequences() {
        let err = limit_scan(
            Family::III,
            1.0,
            0.0,
            None,
            LimitTarget::UnitModulus,
            &[0.9, 0.5],
        )
        .unwrap_err();
        assert!(matches!(err, QesError::Constraint(_)));
        let err = limit_scan(
            Family::III,
            1.0,
            0.0,
            None,
            LimitTarget::UnitModulus,
            &[],
        )
        .unwrap_err();
        assert!(matches!(err, QesError::Constraint(_)));
        let err = limit_scan(
            Family::III,
            1.0,
            0.0,
            None,
            LimitTarget::UnitModulus,
            &[0.5, 1.5],
        )
        .unwrap_err();
        assert!(matches!(err, QesError::Constraint(_)));
    }

    #[test]
    fn scan_rejects_empty_sector_selection() {
        let err = limit_scan(
            Family::III,
            1.0,
            0.0,
            Some(&[RowId::R11]),
            LimitTarget::UnitModulus,
            &[0.9, 0.99],
        )
        .unwrap_err();
        assert!(matches!(&err, QesError::Constraint(msg) if msg.contains("no admissible")));
    }

    #[test]
    fn csv_table_has_one_row_per_level_per_step() {
        let m_seq = [0.9, 0.99];
        let scan =
            limit_scan(Family::III, 1.0, 0.0, None, LimitTarget::UnitModulus, &m_seq).unwrap();
        let csv = scan.to_csv();
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines[0], "m,level_index,e_re,e_im,e_es,abs_gap");
        assert_eq!(lines.len(), 1 + 2 * 3);
    }

    #[test]
    fn assembled_state_converges_to_the_sech_well_state() {
        // Family III at m = 1 − 10⁻⁶: the lowest edge's eigenfunction must
        // agree pointwise with the sech-well ground state, and the highest
        // with level 1, after constant matching.
        let m = 1.0 - 1e-6;
        let params = make_model(Family::III, 1.0, 0.1, m).unwrap();
        let row = catalog_rows(&params)
            .into_iter()
            .find(|r| r.row_id == RowId::R31)
            .unwrap();
        let rec = monic_recurrence(&row).unwrap();
        let edges = band_edges(&rec).unwrap();
        assert_eq!(edges.len(), 2);
        let xs = grid(-2.0, 2.0, 401);
        let cls = ESClass { tag: EsTag::V4, a: 1.0, b: 0.1 };
        for (edge, r) in [(&edges[0], 0usize), (&edges[1], 1usize)] {
            let wf = assemble(&row, edge, &xs).unwrap();
            let reference: Vec<Complex64> = xs
                .iter()
                .map(|&x| es_eigenfunction(&cls, r, x).unwrap())
                .collect();
            let (_, dev) = fit_constant(&wf.psi, &reference);
            assert!(
                dev < 1e-3,
                "level {r}: pointwise deviation {dev:.2e} at m = {m}"
            );
        }
        // The default family III grid also supports assembly at this modulus.
        let g = default_grid(Family::III, m, 501, None).unwrap();
        assert!(g.len() > 400);
    }
}
