//! Acceptance sweep: one test — and one pass/fail line — per release
//! criterion. Each test prints its measured numbers so a `--nocapture` run
//! doubles as a verification report.

use std::time::Instant;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Signed;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use qes_core::elliptic::{complete_k, jacobi_elliptic};
use qes_core::fixtures::{
    assembled_eigenfunction_suite, degeneracy_suite, limit_suite, oracle_suite,
    reference_eigenfunction_suite, residual_halving_factor, spectrum_suite, CheckOutcome,
};
use qes_core::model::{catalog_rows, make_model_exact, AlgebraizationRow, Family, RowId};
use qes_core::recurrence::{band_edges, critical_polynomial, monic_recurrence, poly_family};

const MODULI: [f64; 3] = [0.1, 0.5, 0.9];

fn assert_all_pass(outcomes: &[CheckOutcome]) {
    let mut ok = true;
    for o in outcomes {
        let verdict = if o.pass { "pass" } else { "FAIL" };
        println!("  [{verdict}] {} — {}", o.label, o.detail);
        ok &= o.pass;
    }
    assert!(ok, "at least one check failed (see lines above)");
}

#[test]
fn criterion_1_closed_form_spectra_at_three_moduli() {
    let t0 = Instant::now();
    let outcomes = spectrum_suite(&MODULI).expect("spectrum suite runs");
    let dt = t0.elapsed().as_secs_f64();
    assert_all_pass(&outcomes);
    // 16 fixtures, 3 moduli, each fixture budgeted at < 1 s.
    println!("criterion 1: {} checks in {dt:.3} s", outcomes.len());
    assert!(dt < 48.0, "spectrum sweep took {dt:.1} s");
}

#[test]
fn criterion_2_eigenfunction_residuals_and_stencil_order() {
    let t0 = Instant::now();
    let printed = reference_eigenfunction_suite(&MODULI, 1e-3).expect("reference suite runs");
    let assembled = assembled_eigenfunction_suite(&MODULI, 1e-3).expect("assembly suite runs");
    let factor = residual_halving_factor().expect("halving factor evaluates");
    let dt = t0.elapsed().as_secs_f64();
    assert_all_pass(&printed);
    assert_all_pass(&assembled);
    println!(
        "criterion 2: {} closed-form + {} assembled residual checks, \
         halving factor {factor:.2}, {dt:.2} s",
        printed.len(),
        assembled.len()
    );
    assert!(
        (12.0..=20.0).contains(&factor),
        "stencil halving factor {factor:.2} outside [12, 20]"
    );
    assert!(dt < 10.0, "residual sweep took {dt:.1} s");
}

/// One random model constructed to make a chosen sector admissible.
/// Returns the model's couplings and modulus; the target row is implied by
/// the cycle index. Drawn couplings are exact rationals so admissibility is
/// decided without float tolerance.
fn random_admissible(
    rng: &mut ChaCha8Rng,
    target: RowId,
) -> (Family, Rational64, Rational64, f64) {
    let n = Rational64::from_integer(rng.gen_range(0..=4));
    // Slack above the row's coupling constraint, in quarter steps.
    let u = Rational64::new(rng.gen_range(0..=8), 4);
    let free = Rational64::new(rng.gen_range(-12..=12), 4);
    let half = Rational64::new(1, 2);
    let one = Rational64::from_integer(1);
    let m = rng.gen_range(0.05..0.95);
    let (family, a, b) = match target {
        RowId::R11 => (Family::I, n, n + u),
        RowId::R12 => (Family::I, n + one, n + one + u),
        RowId::R13 => (Family::I, n + u, n + one),
        RowId::R14 => (Family::I, n + half, n + half + u),
        RowId::R15 => (Family::I, n - half + u, n + half),
        RowId::R16 => (Family::I, n + half + u, n + one + half),
        RowId::R21 => (Family::II, n + half, free),
        RowId::R22 => (Family::II, n + half, -free.abs()),
        RowId::R31 => (Family::III, n, free),
        RowId::R32 => (Family::III, n + one, free),
        RowId::R33 => (Family::III, n + half, free),
    };
    (family, a, b, m)
}

const ALL_ROWS: [RowId; 11] = [
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

/// Draw models until `count` of them have every admissible sector
/// non-degenerate, cycling the targeted sector for coverage.
fn draw_models(seed: u64, count: usize) -> Vec<Vec<AlgebraizationRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        assert!(attempts < 20 * count, "admissible draws too rare");
        let target = ALL_ROWS[out.len() % ALL_ROWS.len()];
        let (family, a, b, m) = random_admissible(&mut rng, target);
        let Ok(params) = make_model_exact(family, a, b, m) else {
            continue;
        };
        let rows = catalog_rows(&params);
        if !rows.iter().any(|r| r.row_id == target) {
            continue;
        }
        // A draw only counts when every admissible sector is non-degenerate
        // (vanishing pivots are rejected by the recurrence constructor).
        if rows.iter().all(|r| monic_recurrence(r).is_ok()) {
            out.push(rows);
        }
    }
    out
}

#[test]
fn criterion_3_truncation_and_zero_structure_on_random_draws() {
    let models = draw_models(42, 100);
    let mut sectors = 0usize;
    let mut edges = 0usize;
    let mut worst = 0.0_f64;
    for rows in &models {
        for row in rows {
            let rec = monic_recurrence(row).expect("non-degenerate by construction");
            assert_eq!(
                rec.rho[0],
                Complex64::new(0.0, 0.0),
                "rho_0 != 0 in sector {} of {}",
                row.row_id,
                row.params.family
            );
            assert_eq!(
                rec.rho[rec.n + 1],
                Complex64::new(0.0, 0.0),
                "rho_(n+1) != 0 in sector {} of {}",
                row.row_id,
                row.params.family
            );
            let coeffs = critical_polynomial(&rec);
            sectors += 1;
            for edge in band_edges(&rec).expect("edges solve") {
                // |P_(n+1)(E)| measured against the coefficient scale at E.
                let value = *poly_family(&rec, edge.energy)
                    .expect("family evaluates")
                    .last()
                    .expect("n+2 members");
                let grow = edge.energy.norm().max(1.0);
                let scale: f64 = coeffs
                    .iter()
                    .enumerate()
                    .map(|(p, c)| c.norm() * grow.powi(p as i32))
                    .sum();
                let rel = value.norm() / scale;
                worst = worst.max(rel);
                assert!(
                    rel < 1e-8,
                    "|P(E)| = {rel:.2e} of scale at edge {} in sector {}",
                    edge.energy,
                    row.row_id
                );
                edges += 1;
            }
        }
    }
    println!(
        "criterion 3: 100 draws, {sectors} sectors, {edges} edges; \
         boundary rhos exactly zero, worst |P(E)|/scale = {worst:.2e}"
    );
}

#[test]
fn criterion_4_catalog_cross_check_logs_only_the_known_typo() {
    let models = draw_models(43, 50);
    let mut logged = Vec::new();
    let mut clean_rows = 0usize;
    for rows in &models {
        for row in rows {
            let rec = monic_recurrence(row).expect("non-degenerate by construction");
            if rec.mismatch_log.is_empty() {
                clean_rows += 1;
            }
            for mm in &rec.mismatch_log {
                assert_eq!(
                    (mm.row_id, mm.quantity),
                    (RowId::R13, "lambda"),
                    "unexpected catalog mismatch in sector {} ({} at j={})",
                    mm.row_id,
                    mm.quantity,
                    mm.j
                );
                logged.push(mm.clone());
            }
        }
    }
    // The only tolerated disagreement is the diagonal coefficient of sector
    // 1.3, whose catalog closed form carries a known sign defect in its
    // imaginary part; it must actually show up in the sweep.
    assert!(
        !logged.is_empty(),
        "expected the sector 1.3 diagonal mismatch to appear over 50 draws"
    );
    println!(
        "criterion 4: 50 draws, {clean_rows} sectors clean, {} logged mismatches, \
         all at sector 1.3 diagonal:",
        logged.len()
    );
    let mut seen = std::collections::BTreeSet::new();
    for mm in &logged {
        if seen.insert((mm.j, format!("{:.6e}", mm.derived.im))) {
            println!(
                "  (row 1.3, j={}) derived {:+.9}{:+.9}i vs catalog {:+.9}{:+.9}i",
                mm.j, mm.derived.re, mm.derived.im, mm.reference.re, mm.reference.im
            );
        }
    }
}

#[test]
fn criterion_5_exactly_solvable_limits() {
    let t0 = Instant::now();
    let outcomes = limit_suite().expect("limit suite runs");
    let dt = t0.elapsed().as_secs_f64();
    assert_all_pass(&outcomes);
    println!("criterion 5: {} limit scans in {dt:.2} s", outcomes.len());
    assert!(dt < 30.0, "limit sweep took {dt:.1} s");
}

#[test]
fn criterion_6_finite_difference_oracle_agreement() {
    let t0 = Instant::now();
    let outcomes = oracle_suite(4000).expect("oracle suite runs");
    let dt = t0.elapsed().as_secs_f64();
    assert_all_pass(&outcomes);
    println!("criterion 6: {} oracle checks in {dt:.2} s", outcomes.len());
    assert!(dt < 60.0, "oracle sweep took {dt:.1} s");
}

#[test]
fn criterion_7_special_function_identities() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_pyth = 0.0_f64;
    let mut worst_period = 0.0_f64;
    let mut worst_deriv = 0.0_f64;
    for _ in 0..10_000 {
        let m = rng.gen_range(0.001..0.999);
        let x = rng.gen_range(-10.0..10.0);
        let t = jacobi_elliptic(x, m).expect("in-domain evaluation");
        worst_pyth = worst_pyth
            .max((t.sn * t.sn + t.cn * t.cn - 1.0).abs())
            .max((t.dn * t.dn + m * t.sn * t.sn - 1.0).abs());

        let kq = complete_k(m).expect("in-domain modulus");
        let s = jacobi_elliptic(x + 2.0 * kq, m).expect("in-domain evaluation");
        worst_period = worst_period
            .max((s.sn + t.sn).abs())
            .max((s.cn + t.cn).abs())
            .max((s.dn - t.dn).abs());

        let h = 1e-5;
        let up = jacobi_elliptic(x + h, m).expect("in-domain evaluation");
        let dn = jacobi_elliptic(x - h, m).expect("in-domain evaluation");
        worst_deriv = worst_deriv
            .max(((up.sn - dn.sn) / (2.0 * h) - t.cn * t.dn).abs())
            .max(((up.cn - dn.cn) / (2.0 * h) + t.sn * t.dn).abs())
            .max(((up.dn - dn.dn) / (2.0 * h) + m * t.sn * t.cn).abs());
    }
    let k_half = complete_k(0.5).expect("in-domain modulus");
    let k_dev = (k_half - 1.854_074_677_301_371_9).abs();
    let dt = t0.elapsed().as_secs_f64();
    println!(
        "criterion 7: 10^4 points; Pythagorean dev {worst_pyth:.2e}, \
         period dev {worst_period:.2e}, derivative dev {worst_deriv:.2e}, \
         K(0.5) dev {k_dev:.2e}, {dt:.2} s"
    );
    assert!(worst_pyth < 1e-12, "Pythagorean identity dev {worst_pyth:.2e}");
    assert!(worst_period < 1e-10, "period relation dev {worst_period:.2e}");
    assert!(worst_deriv < 1e-6, "derivative identity dev {worst_deriv:.2e}");
    assert!(k_dev < 1e-13, "K(0.5) dev {k_dev:.2e}");
    assert!(dt < 5.0, "special-function sweep took {dt:.1} s");
}

#[test]
fn criterion_8_degenerate_level_structure() {
    let outcomes = degeneracy_suite().expect("degeneracy suite runs");
    assert_all_pass(&outcomes);
    println!("criterion 8: {} degeneracy checks", outcomes.len());
}
