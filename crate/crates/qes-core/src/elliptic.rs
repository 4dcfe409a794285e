//! Elliptic building blocks: the complete elliptic integral, the Jacobi
//! elliptic triple `(sn, cn, dn)`, and Jacobi polynomials with complex
//! parameters.
//!
//! Conventions
//! -----------
//! * All routines use the *parameter* `m = k²` (square of the modulus), so
//!   `dn² = 1 − m·sn²` and the real quarter period is `K(m)`.
//! * [`complete_k`] is valid for `0 ≤ m < 1`; the integral diverges as
//!   `m → 1`.
//! * [`jacobi_elliptic`] accepts the closed interval `0 ≤ m ≤ 1`; the two
//!   endpoints reduce to trigonometric (`m = 0`) and hyperbolic (`m = 1`)
//!   functions.
//! * [`jacobi_poly`] evaluates `P_r^{(α,β)}(z)` for arbitrary complex
//!   `α, β, z` through the three-term degree recurrence, falling back to the
//!   finite hypergeometric sum whenever a recurrence pivot comes close to
//!   vanishing (as happens for the negative half-integer parameter pairs used
//!   elsewhere in this crate).

use num_complex::Complex64;

use crate::error::{QesError, Result};

/// Simultaneous values of the three Jacobi elliptic functions at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticTriple {
    /// `sn(x|m)`
    pub sn: f64,
    /// `cn(x|m)`
    pub cn: f64,
    /// `dn(x|m)`
    pub dn: f64,
}

/// Complete elliptic integral of the first kind `K(m)` via the
/// arithmetic–geometric mean.
///
/// `K(m) = ∫₀^{π/2} dθ / √(1 − m sin²θ) = π / (2·AGM(1, √(1−m)))`.
///
/// The AGM iteration converges quadratically; the result carries full
/// `f64` precision (relative error at the few-ulp level).
///
/// # Errors
///
/// `Domain` if `m` is not finite or lies outside `[0, 1)`.
pub fn complete_k(m: f64) -> Result<f64> {
    if !m.is_finite() || !(0.0..1.0).contains(&m) {
        return Err(QesError::Domain(format!(
            "complete elliptic integral requires 0 <= m < 1, got m={m}"
        )));
    }
    let mut a = 1.0_f64;
    let mut b = (1.0 - m).sqrt();
    for _ in 0..64 {
        if (a - b).abs() <= 2.0 * f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    Ok(std::f64::consts::PI / (a + b))
}

/// Jacobi elliptic functions `sn, cn, dn` of real argument.
///
/// Uses the descending Landen (Gauss) transformation: an ascending AGM table
/// is built from `(1, √(1−m))`, the amplitude is seeded at the deepest level
/// as `φ_N = 2^N a_N x` and halved back with
/// `φ_{i−1} = (φ_i + asin(clamp(c_i/a_i · sin φ_i))) / 2`.
/// Then `sn = sin φ₀`, `cn = cos φ₀`, and `dn` is recovered through the
/// cancellation-free identity `dn = √(cn² + (1−m) sn²)` (`dn > 0` for all
/// real arguments when `m < 1`).
///
/// The argument is first reduced modulo the real period `4K(m)`, so large
/// arguments do not degrade accuracy.
///
/// # Errors
///
/// `Domain` if `x` is not finite or `m` lies outside `[0, 1]`.
pub fn jacobi_elliptic(x: f64, m: f64) -> Result<EllipticTriple> {
    if !x.is_finite() {
        return Err(QesError::Domain(format!(
            "elliptic function argument must be finite, got x={x}"
        )));
    }
    if !m.is_finite() || !(0.0..=1.0).contains(&m) {
        return Err(QesError::Domain(format!(
            "elliptic function parameter requires 0 <= m <= 1, got m={m}"
        )));
    }
    if m == 0.0 {
        return Ok(EllipticTriple {
            sn: x.sin(),
            cn: x.cos(),
            dn: 1.0,
        });
    }
    if m == 1.0 {
        let sech = 1.0 / x.cosh();
        return Ok(EllipticTriple {
            sn: x.tanh(),
            cn: sech,
            dn: sech,
        });
    }

    // Reduce modulo the real period 4K so the seeded amplitude stays small.
    let quarter = complete_k(m)?;
    let period = 4.0 * quarter;
    let x = x - (x / period).round() * period;

    const MAX_LEVELS: usize = 32;
    let mut a = [0.0_f64; MAX_LEVELS];
    let mut c = [0.0_f64; MAX_LEVELS];
    a[0] = 1.0;
    c[0] = m.sqrt();
    let mut b = (1.0 - m).sqrt();
    let mut depth = 0;
    for i in 1..MAX_LEVELS {
        a[i] = 0.5 * (a[i - 1] + b);
        c[i] = 0.5 * (a[i - 1] - b);
        b = (a[i - 1] * b).sqrt();
        depth = i;
        if c[i].abs() <= f64::EPSILON * a[i] {
            break;
        }
    }

    let mut phi = (1u64 << depth) as f64 * a[depth] * x;
    for i in (1..=depth).rev() {
        let s = ((c[i] / a[i]) * phi.sin()).clamp(-1.0, 1.0);
        phi = 0.5 * (phi + s.asin());
    }

    let sn = phi.sin();
    let cn = phi.cos();
    let dn = (cn * cn + (1.0 - m) * sn * sn).sqrt();
    Ok(EllipticTriple { sn, cn, dn })
}

/// Jacobi polynomial `P_r^{(α,β)}(z)` with complex degree-independent
/// parameters and complex argument.
///
/// Evaluation runs the three-term recurrence in the degree,
///
/// ```text
/// 2r(r+α+β)(2r+α+β−2) P_r
///   = (2r+α+β−1)[(2r+α+β)(2r+α+β−2) z + α²−β²] P_{r−1}
///   − 2(r+α−1)(r+β−1)(2r+α+β) P_{r−2},
/// ```
///
/// starting from `P₀ = 1`, `P₁ = (α−β)/2 + (1 + (α+β)/2) z`.  Whenever a
/// pivot `2r(r+α+β)(2r+α+β−2)` is negligibly small relative to the natural
/// scale `(1+|α|+|β|+r)³`, the routine switches to the explicit finite sum
/// ([`jacobi_poly_series`]), which has no pivots and remains valid for the
/// degenerate parameter combinations (`α+β` a negative integer) that the
/// recurrence cannot traverse.
#[must_use]
pub fn jacobi_poly(r: usize, alpha: Complex64, beta: Complex64, z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    if r == 0 {
        return one;
    }
    let p1 = 0.5 * (alpha - beta) + (0.5 * (alpha + beta) + 1.0) * z;
    if r == 1 {
        return p1;
    }
    let scale = 1.0 + alpha.norm() + beta.norm() + r as f64;
    let pivot_floor = 1e-8 * scale * scale * scale;
    let s = alpha + beta;
    let mut pm1 = one;
    let mut p = p1;
    for rr in 2..=r {
        let rf = rr as f64;
        let pivot = 2.0 * rf * (rf + s) * (2.0 * rf + s - 2.0);
        if pivot.norm() < pivot_floor {
            return jacobi_poly_series(r, alpha, beta, z);
        }
        let c2 = (2.0 * rf + s - 1.0)
            * ((2.0 * rf + s) * (2.0 * rf + s - 2.0) * z + alpha * alpha - beta * beta);
        let c3 = 2.0 * (rf + alpha - 1.0) * (rf + beta - 1.0) * (2.0 * rf + s);
        let next = (c2 * p - c3 * pm1) / pivot;
        pm1 = p;
        p = next;
    }
    p
}

/// Jacobi polynomial through the explicit finite sum
///
/// ```text
/// P_r^{(α,β)}(z) = Σ_{s=0}^{r} C(r+α, r−s) C(r+β, s) ((z−1)/2)^s ((z+1)/2)^{r−s},
/// ```
///
/// where `C(w, k) = Π_{i=1..k} (w−k+i)/i` is the generalized binomial
/// coefficient.  Pivot-free; used directly as a cross-check oracle and as the
/// fallback of [`jacobi_poly`] for degenerate parameters.
#[must_use]
pub fn jacobi_poly_series(r: usize, alpha: Complex64, beta: Complex64, z: Complex64) -> Complex64 {
    let half_minus = 0.5 * (z - 1.0);
    let half_plus = 0.5 * (z + 1.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for s in 0..=r {
        acc += binom_c(r as f64 + alpha, r - s)
            * binom_c(r as f64 + beta, s)
            * half_minus.powu(s as u32)
            * half_plus.powu((r - s) as u32);
    }
    acc
}

/// Generalized binomial coefficient `C(w, k) = Π_{i=1..k} (w−k+i)/i` for
/// complex `w` and non-negative integer `k`.
fn binom_c(w: Complex64, k: usize) -> Complex64 {
    let mut out = Complex64::new(1.0, 0.0);
    for i in 1..=k {
        out = out * (w - (k - i) as f64) / i as f64;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Frozen reference values for `K(m)`, computed with an independent
    /// implementation of the defining integral.
    const K_REFERENCE: [(f64, f64); 5] = [
        (0.1, 1.612_441_348_720_219_2),
        (0.3, 1.713_889_448_178_791),
        (0.5, 1.854_074_677_301_371_9),
        (0.8, 2.257_205_326_820_853_8),
        (0.9, 2.578_092_113_348_173_3),
    ];

    /// Frozen reference values `(x, m, sn, cn, dn)` for the elliptic triple,
    /// computed with an independent implementation.
    #[allow(clippy::excessive_precision)]
    const SNCNDN_REFERENCE: [(f64, f64, f64, f64, f64); 6] = [
        (
            0.7,
            0.3,
            0.632_304_776_310_864_57,
            0.774_719_736_326_929_81,
            0.938_113_639_681_430_36,
        ),
        (
            1.3,
            0.8,
            0.886_968_649_472_331_23,
            0.461_829_638_344_302_02,
            0.608_793_308_013_962_03,
        ),
        (
            2.5,
            0.6,
            0.936_423_207_698_175_77,
            -0.350_872_592_381_136_61,
            0.688_379_942_800_889_43,
        ),
        (
            -0.9,
            0.15,
            -0.773_627_556_253_519_75,
            0.633_640_595_452_348_85,
            0.954_057_157_947_458_27,
        ),
        (
            7.3,
            0.4,
            0.188_337_823_935_030_98,
            0.982_104_304_071_322_76,
            0.992_880_428_667_101_13,
        ),
        (
            3.7103,
            0.5,
            -0.002_150_642_910_427_931_3,
            -0.999_997_687_364_861_72,
            0.999_998_843_683_099_44,
        ),
    ];

    #[test]
    fn complete_k_matches_reference_values() {
        for &(m, expect) in &K_REFERENCE {
            let got = complete_k(m).unwrap();
            assert_abs_diff_eq!(got, expect, epsilon = 1e-14 * expect);
        }
    }

    #[test]
    fn complete_k_half_to_thirteen_digits() {
        assert_abs_diff_eq!(
            complete_k(0.5).unwrap(),
            1.854_074_677_301_372,
            epsilon = 1e-13
        );
    }

    #[test]
    fn complete_k_domain_errors() {
        assert!(matches!(complete_k(1.0), Err(QesError::Domain(_))));
        assert!(matches!(complete_k(1.5), Err(QesError::Domain(_))));
        assert!(matches!(complete_k(-0.1), Err(QesError::Domain(_))));
        assert!(matches!(complete_k(f64::NAN), Err(QesError::Domain(_))));
        assert_abs_diff_eq!(
            complete_k(0.0).unwrap(),
            std::f64::consts::FRAC_PI_2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn jacobi_elliptic_matches_reference_values() {
        for &(x, m, sn, cn, dn) in &SNCNDN_REFERENCE {
            let t = jacobi_elliptic(x, m).unwrap();
            assert_abs_diff_eq!(t.sn, sn, epsilon = 1e-12);
            assert_abs_diff_eq!(t.cn, cn, epsilon = 1e-12);
            assert_abs_diff_eq!(t.dn, dn, epsilon = 1e-12);
        }
    }

    #[test]
    fn jacobi_elliptic_pythagorean_identities() {
        // 10_000 points spread over several periods and the full m range.
        let ms = [0.0, 0.02, 0.1, 0.35, 0.5, 0.75, 0.9, 0.99, 1.0];
        let mut worst = 0.0_f64;
        for (i, &m) in ms.iter().enumerate() {
            for j in 0..1112 {
                let x = -12.0 + 24.0 * (j as f64 + 0.37 * i as f64) / 1112.0;
                let t = jacobi_elliptic(x, m).unwrap();
                let e1 = (t.sn * t.sn + t.cn * t.cn - 1.0).abs();
                let e2 = (t.dn * t.dn + m * t.sn * t.sn - 1.0).abs();
                worst = worst.max(e1).max(e2);
            }
        }
        assert!(worst < 1e-12, "identity residual {worst}");
    }

    #[test]
    fn jacobi_elliptic_periodicity() {
        for &m in &[0.1, 0.5, 0.9] {
            let kq = complete_k(m).unwrap();
            for j in 0..40 {
                let x = -3.0 + 0.17 * j as f64;
                let a = jacobi_elliptic(x, m).unwrap();
                let b = jacobi_elliptic(x + 4.0 * kq, m).unwrap();
                assert_abs_diff_eq!(a.sn, b.sn, epsilon = 1e-10);
                assert_abs_diff_eq!(a.cn, b.cn, epsilon = 1e-10);
                // dn has the shorter period 2K.
                let c = jacobi_elliptic(x + 2.0 * kq, m).unwrap();
                assert_abs_diff_eq!(a.dn, c.dn, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn jacobi_elliptic_special_arguments() {
        // m = 0: trigonometric.
        let t = jacobi_elliptic(0.9, 0.0).unwrap();
        assert_abs_diff_eq!(t.sn, 0.9_f64.sin(), epsilon = 1e-15);
        assert_abs_diff_eq!(t.cn, 0.9_f64.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(t.dn, 1.0, epsilon = 1e-15);
        // m = 1: hyperbolic.
        let t = jacobi_elliptic(0.9, 1.0).unwrap();
        assert_abs_diff_eq!(t.sn, 0.9_f64.tanh(), epsilon = 1e-15);
        assert_abs_diff_eq!(t.cn, 1.0 / 0.9_f64.cosh(), epsilon = 1e-15);
        assert_abs_diff_eq!(t.dn, t.cn, epsilon = 1e-15);
        // Quarter period: sn(K) = 1, cn(K) = 0, dn(K) = sqrt(1-m).
        for &m in &[0.2, 0.5, 0.8] {
            let kq = complete_k(m).unwrap();
            let t = jacobi_elliptic(kq, m).unwrap();
            assert_abs_diff_eq!(t.sn, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(t.cn, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(t.dn, (1.0 - m).sqrt(), epsilon = 1e-12);
        }
        // Origin.
        let t = jacobi_elliptic(0.0, 0.37).unwrap();
        assert_eq!((t.sn, t.cn, t.dn), (0.0, 1.0, 1.0));
    }

    #[test]
    fn jacobi_elliptic_derivative_relations() {
        // sn' = cn dn,  cn' = -sn dn,  dn' = -m sn cn  (central differences).
        let h = 1e-5;
        for &m in &[0.15, 0.5, 0.85] {
            for j in 0..25 {
                let x = -2.0 + 0.33 * j as f64;
                let p = jacobi_elliptic(x + h, m).unwrap();
                let q = jacobi_elliptic(x - h, m).unwrap();
                let t = jacobi_elliptic(x, m).unwrap();
                assert_abs_diff_eq!((p.sn - q.sn) / (2.0 * h), t.cn * t.dn, epsilon = 1e-6);
                assert_abs_diff_eq!((p.cn - q.cn) / (2.0 * h), -t.sn * t.dn, epsilon = 1e-6);
                assert_abs_diff_eq!((p.dn - q.dn) / (2.0 * h), -m * t.sn * t.cn, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn jacobi_elliptic_near_unit_modulus() {
        // The descending Landen chain must stay accurate at m = 1 - 1e-9,
        // where the hyperbolic limit is a good independent approximation for
        // moderate |x|.
        let m = 1.0 - 1e-9;
        for j in 0..20 {
            let x = -4.0 + 0.4 * j as f64;
            let t = jacobi_elliptic(x, m).unwrap();
            assert_abs_diff_eq!(t.sn, x.tanh(), epsilon = 1e-7);
            assert_abs_diff_eq!(t.cn, 1.0 / x.cosh(), epsilon = 1e-7);
        }
    }

    #[test]
    fn jacobi_elliptic_domain_errors() {
        assert!(matches!(
            jacobi_elliptic(f64::INFINITY, 0.5),
            Err(QesError::Domain(_))
        ));
        assert!(matches!(
            jacobi_elliptic(1.0, -0.2),
            Err(QesError::Domain(_))
        ));
        assert!(matches!(
            jacobi_elliptic(1.0, 1.2),
            Err(QesError::Domain(_))
        ));
    }

    #[test]
    fn jacobi_poly_real_reference_value() {
        // P_3^{(0.5,-0.3)}(0.7), frozen from an independent evaluation of the
        // finite sum in exact rational arithmetic.
        let v = jacobi_poly(
            3,
            Complex64::new(0.5, 0.0),
            Complex64::new(-0.3, 0.0),
            Complex64::new(0.7, 0.0),
        );
        assert_abs_diff_eq!(v.re, 0.215_032_999_999_999_95, epsilon = 1e-14);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn jacobi_poly_complex_conjugate_parameters_give_real_values() {
        // P_2^{(-iB-A-1/2, iB-A-1/2)}(i sinh x) is real for real A, B, x.
        let (a, b, x) = (2.5, 0.7, 0.4_f64);
        let alpha = Complex64::new(-a - 0.5, -b);
        let beta = Complex64::new(-a - 0.5, b);
        let z = Complex64::new(0.0, x.sinh());
        let v = jacobi_poly(2, alpha, beta, z);
        assert_abs_diff_eq!(v.re, -0.552_828_046_957_273_01, epsilon = 1e-14);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn jacobi_poly_value_at_one_is_binomial() {
        // P_r^{(α,β)}(1) = C(r+α, r).
        let alpha = Complex64::new(0.8, -0.3);
        let beta = Complex64::new(-1.7, 0.9);
        let one = Complex64::new(1.0, 0.0);
        for r in 0..7 {
            let v = jacobi_poly(r, alpha, beta, one);
            let expect = binom_c(r as f64 + alpha, r);
            assert!((v - expect).norm() < 1e-12 * (1.0 + expect.norm()));
        }
    }

    #[test]
    fn jacobi_poly_recurrence_agrees_with_series() {
        // Pseudo-random complex parameters away from degenerate pivots.
        let mut state = 0x9e37_79b9_7f4a_7c15_u64;
        let mut next = move || {
            state = state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1);
            ((state >> 11) as f64) / ((1u64 << 53) as f64) * 2.0 - 1.0
        };
        for _ in 0..50 {
            let alpha = Complex64::new(3.0 * next(), 3.0 * next());
            let beta = Complex64::new(3.0 * next(), 3.0 * next());
            let z = Complex64::new(2.0 * next(), 2.0 * next());
            for r in 0..=6 {
                let a = jacobi_poly(r, alpha, beta, z);
                let b = jacobi_poly_series(r, alpha, beta, z);
                assert!(
                    (a - b).norm() <= 1e-9 * (1.0 + b.norm()),
                    "degree {r}: recurrence {a} vs series {b}"
                );
            }
        }
    }

    #[test]
    fn jacobi_poly_degenerate_parameters_use_series_fallback() {
        // α+β = -3 makes the degree-2 pivot vanish; the fallback must still
        // return the series value instead of dividing by ~0.
        let alpha = Complex64::new(-1.5, -0.4);
        let beta = Complex64::new(-1.5, 0.4);
        let z = Complex64::new(0.3, 1.1);
        let a = jacobi_poly(2, alpha, beta, z);
        let b = jacobi_poly_series(2, alpha, beta, z);
        assert!((a - b).norm() < 1e-12 * (1.0 + b.norm()));
        assert!(a.is_finite());
    }
}
