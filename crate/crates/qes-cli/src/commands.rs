//! The five subcommands: spectrum, poly, wavefunction, limit, verify.
//!
//! Every command resolves the configuration into exact model parameters,
//! delegates the mathematics to the library, and renders one deterministic
//! report (CSV or JSON) — identical configurations produce byte-identical
//! output.

use num_complex::Complex64;
use qes_core::error::{QesError, Result};
use qes_core::eslimit::{default_m_sequence, limit_scan, LimitScan, LimitTarget};
use qes_core::fixtures::{
    assembled_eigenfunction_suite, degeneracy_suite, fixture_window, limit_suite, oracle_suite,
    reference_eigenfunction_suite, residual_halving_factor, spectrum_fixtures, spectrum_suite,
    stencil_residual, CheckOutcome,
};
use qes_core::model::{
    catalog_rows, make_model_exact, potential_value, AlgebraizationRow, ModelParams,
};
use qes_core::recurrence::{
    band_edges, critical_polynomial, monic_recurrence, BandEdgeSolution, MonicRecurrence,
};
use qes_core::wavefunction::{assemble, default_grid, SampledWavefunction};
use serde_json::{json, Value};

use crate::config::{
    resolve_model, resolve_precision, resolve_rows, OutputFormat, ResolvedModel, RunConfig,
};
use crate::render::{complex_json, fmt_complex_sig, fmt_sig, json_report};

/// Relative cluster width when merging coincident edges into the union
/// multiset.
const UNION_CLUSTER_TOL: f64 = 1e-8;

/// Step of the uniform audit window on which header residuals are measured.
const RESIDUAL_STEP: f64 = 1e-3;

/// What a command produced: the report text, where to put it, stderr notes,
/// and the process exit code.
#[derive(Debug)]
pub struct CommandOutcome {
    /// Rendered report.
    pub text: String,
    /// Output file; stdout when `None`.
    pub path: Option<String>,
    /// Notes for stderr (decimal snaps, parameter canonicalization).
    pub warnings: Vec<String>,
    /// Process exit code (0 unless `verify` found failures).
    pub exit_code: i32,
}

/// Resolved model plus the selected admissible sectors.
#[derive(Debug)]
struct ModelContext {
    resolved: ResolvedModel,
    params: ModelParams,
    rows: Vec<AlgebraizationRow>,
    format: OutputFormat,
    precision: usize,
    warnings: Vec<String>,
}

impl ModelContext {
    /// Common `family=… A=… B=… m=…` fragment of CSV comment headers.
    fn header_fragment(&self) -> String {
        format!(
            "family={} A={} B={} m={}",
            self.resolved.family,
            self.resolved.a,
            self.resolved.b,
            fmt_sig(self.resolved.m, self.precision),
        )
    }

    /// The model echo block of JSON reports.
    fn model_json(&self) -> Value {
        json!({
            "family": self.resolved.family.to_string(),
            "A": self.resolved.a.to_string(),
            "B": self.resolved.b.to_string(),
            "m": self.resolved.m,
        })
    }

    fn outcome(&self, text: String, exit_code: i32) -> CommandOutcome {
        CommandOutcome {
            text,
            path: None,
            warnings: self.warnings.clone(),
            exit_code,
        }
    }
}

/// Resolve the configuration and select the sectors to operate on.
fn model_context(cfg: &RunConfig) -> Result<ModelContext> {
    let resolved = resolve_model(cfg)?;
    let precision = resolve_precision(cfg)?;
    let filter = resolve_rows(cfg)?;
    let params = make_model_exact(resolved.family, resolved.a, resolved.b, resolved.m)?;
    let all = catalog_rows(&params);
    if all.is_empty() {
        return Err(QesError::Constraint(format!(
            "no admissible algebraization for family {} with A={}, B={}",
            resolved.family, resolved.a, resolved.b
        )));
    }
    let rows = match &filter {
        None => all,
        Some(ids) => {
            for id in ids {
                if id.family() != params.family {
                    return Err(QesError::Constraint(format!(
                        "sector {id} belongs to family {}, the model is family {}",
                        id.family(),
                        params.family
                    )));
                }
                if !all.iter().any(|r| r.row_id == *id) {
                    return Err(QesError::Constraint(format!(
                        "sector {id} is not admissible for family {} with A={}, B={}",
                        resolved.family, resolved.a, resolved.b
                    )));
                }
            }
            all.into_iter()
                .filter(|r| ids.contains(&r.row_id))
                .collect()
        }
    };
    let mut warnings = resolved.warnings.clone();
    warnings.extend(params.warnings.iter().cloned());
    Ok(ModelContext {
        resolved,
        params,
        rows,
        format: cfg.output.format,
        precision,
        warnings,
    })
}

/// One sector with its recurrence and band edges solved.
struct SolvedRow {
    row: AlgebraizationRow,
    rec: MonicRecurrence,
    edges: Vec<BandEdgeSolution>,
}

fn solve_rows(rows: &[AlgebraizationRow]) -> Result<Vec<SolvedRow>> {
    rows.iter()
        .map(|row| {
            let rec = monic_recurrence(row)?;
            let edges = band_edges(&rec)?;
            Ok(SolvedRow {
                row: row.clone(),
                rec,
                edges,
            })
        })
        .collect()
}

/// One cluster of the union multiset: a representative energy and how many
/// edge occurrences (root multiplicities included) fell into it.
struct UnionEntry {
    energy: Complex64,
    multiplicity: usize,
}

/// Merge all edges of all sectors into the sorted union multiset, clustering
/// energies closer than `1e-8` relative.
fn union_multiset(solved: &[SolvedRow]) -> Vec<UnionEntry> {
    let mut all: Vec<Complex64> = Vec::new();
    for s in solved {
        for edge in &s.edges {
            for _ in 0..edge.multiplicity_hint {
                all.push(edge.energy);
            }
        }
    }
    all.sort_by(|p, q| p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im)));
    let scale = all.iter().map(|e| e.norm()).fold(1.0_f64, f64::max);
    let tol = UNION_CLUSTER_TOL * scale;
    let mut out: Vec<UnionEntry> = Vec::new();
    for e in all {
        match out.last_mut() {
            Some(last) if (e - last.energy).norm() <= tol => last.multiplicity += 1,
            _ => out.push(UnionEntry {
                energy: e,
                multiplicity: 1,
            }),
        }
    }
    out
}

/// Distinct band edges of all sectors, sorted by `(Re, Im)` energy (ties by
/// catalog order), as `(sector index, edge index)` pairs.
fn level_list(solved: &[SolvedRow]) -> Vec<(usize, usize)> {
    let mut levels: Vec<(usize, usize)> = solved
        .iter()
        .enumerate()
        .flat_map(|(si, s)| (0..s.edges.len()).map(move |ei| (si, ei)))
        .collect();
    levels.sort_by(|&(sa, ea), &(sb, eb)| {
        let p = solved[sa].edges[ea].energy;
        let q = solved[sb].edges[eb].energy;
        p.re.total_cmp(&q.re)
            .then(p.im.total_cmp(&q.im))
            .then(sa.cmp(&sb))
            .then(ea.cmp(&eb))
    });
    levels
}

/// Band-edge energies of every selected sector plus their union multiset.
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<CommandOutcome> {
    let ctx = model_context(cfg)?;
    let solved = solve_rows(&ctx.rows)?;
    let union = union_multiset(&solved);
    let d = ctx.precision;

    let text = match ctx.format {
        OutputFormat::Csv => {
            let mut out = format!("# spectrum {}\n", ctx.header_fragment());
            out.push_str("section,row,index,re_energy,im_energy,multiplicity\n");
            for s in &solved {
                for (i, edge) in s.edges.iter().enumerate() {
                    out.push_str(&format!(
                        "edge,{},{},{},{},{}\n",
                        s.row.row_id,
                        i,
                        fmt_sig(edge.energy.re, d),
                        fmt_sig(edge.energy.im, d),
                        edge.multiplicity_hint,
                    ));
                }
            }
            for (i, u) in union.iter().enumerate() {
                out.push_str(&format!(
                    "union,,{},{},{},{}\n",
                    i,
                    fmt_sig(u.energy.re, d),
                    fmt_sig(u.energy.im, d),
                    u.multiplicity,
                ));
            }
            out
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = solved
                .iter()
                .map(|s| {
                    json!({
                        "row": s.row.row_id.to_string(),
                        "n": s.rec.n,
                        "edges": s.edges.iter().map(|e| json!({
                            "energy": complex_json(e.energy),
                            "multiplicity": e.multiplicity_hint,
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let union: Vec<Value> = union
                .iter()
                .map(|u| {
                    json!({
                        "energy": complex_json(u.energy),
                        "multiplicity": u.multiplicity,
                    })
                })
                .collect();
            json_report(
                json!({
                    "command": "spectrum",
                    "model": ctx.model_json(),
                    "rows": rows,
                    "union": union,
                    "warnings": ctx.warnings,
                }),
                d,
            )
        }
    };
    Ok(ctx.outcome(text, 0))
}

/// Recurrence tables (λ, ρ, ω), critical-polynomial coefficients, and the
/// table-vs-derivation mismatch log per sector.
pub fn cmd_poly(cfg: &RunConfig) -> Result<CommandOutcome> {
    let ctx = model_context(cfg)?;
    let solved = solve_rows(&ctx.rows)?;
    let d = ctx.precision;

    let text = match ctx.format {
        OutputFormat::Csv => {
            let mut out = format!("# poly {}\n", ctx.header_fragment());
            out.push_str(
                "section,row,quantity,index,re_value,im_value,re_reference,im_reference\n",
            );
            for s in &solved {
                let table_line = |quantity: &str, idx: usize, v: Complex64| {
                    format!(
                        "table,{},{},{},{},{},,\n",
                        s.row.row_id,
                        quantity,
                        idx,
                        fmt_sig(v.re, d),
                        fmt_sig(v.im, d),
                    )
                };
                for (j, &v) in s.rec.lambda.iter().enumerate() {
                    out.push_str(&table_line("lambda", j, v));
                }
                for (j, &v) in s.rec.rho.iter().enumerate() {
                    out.push_str(&table_line("rho", j, v));
                }
                for (j, &v) in s.rec.omega.iter().enumerate() {
                    out.push_str(&table_line("omega", j, v));
                }
                for (p, &v) in critical_polynomial(&s.rec).iter().enumerate() {
                    out.push_str(&table_line("critical_coefficient", p, v));
                }
            }
            // The mismatch section is always present, even when empty.
            for s in &solved {
                for mm in &s.rec.mismatch_log {
                    out.push_str(&format!(
                        "mismatch,{},{},{},{},{},{},{}\n",
                        mm.row_id,
                        mm.quantity,
                        mm.j,
                        fmt_sig(mm.derived.re, d),
                        fmt_sig(mm.derived.im, d),
                        fmt_sig(mm.reference.re, d),
                        fmt_sig(mm.reference.im, d),
                    ));
                }
            }
            out
        }
        OutputFormat::Json => {
            let complex_vec =
                |v: &[Complex64]| v.iter().copied().map(complex_json).collect::<Vec<_>>();
            let rows: Vec<Value> = solved
                .iter()
                .map(|s| {
                    json!({
                        "row": s.row.row_id.to_string(),
                        "n": s.rec.n,
                        "lambda": complex_vec(&s.rec.lambda),
                        "rho": complex_vec(&s.rec.rho),
                        "omega": complex_vec(&s.rec.omega),
                        "critical_polynomial": complex_vec(&critical_polynomial(&s.rec)),
                    })
                })
                .collect();
            let mismatch_log: Vec<Value> = solved
                .iter()
                .flat_map(|s| &s.rec.mismatch_log)
                .map(|mm| {
                    json!({
                        "row": mm.row_id.to_string(),
                        "quantity": mm.quantity,
                        "j": mm.j,
                        "derived": complex_json(mm.derived),
                        "reference": complex_json(mm.reference),
                    })
                })
                .collect();
            json_report(
                json!({
                    "command": "poly",
                    "model": ctx.model_json(),
                    "rows": rows,
                    "mismatch_log": mismatch_log,
                    "warnings": ctx.warnings,
                }),
                d,
            )
        }
    };
    Ok(ctx.outcome(text, 0))
}

/// Output grid: the explicit domain override or the family default.
fn output_grid(ctx: &ModelContext, cfg: &RunConfig) -> Result<Vec<f64>> {
    match cfg.grid.domain {
        Some([lo, hi]) => {
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(QesError::Constraint(format!(
                    "grid domain must be a finite interval [lo, hi] with hi > lo, got [{lo}, {hi}]"
                )));
            }
            if cfg.grid.n < 2 {
                return Err(QesError::Constraint(format!(
                    "grid needs at least 2 points, got {}",
                    cfg.grid.n
                )));
            }
            let h = (hi - lo) / (cfg.grid.n - 1) as f64;
            Ok((0..cfg.grid.n).map(|i| lo + h * i as f64).collect())
        }
        None => default_grid(
            ctx.params.family,
            ctx.params.m,
            cfg.grid.n,
            cfg.grid.epsilon,
        ),
    }
}

/// Operator residual of an assembled edge, measured on the uniform audit
/// window (independent of the output grid).
fn audit_residual(ctx: &ModelContext, s: &SolvedRow, edge: &BandEdgeSolution) -> Result<f64> {
    let xs = fixture_window(ctx.params.family, ctx.params.m, RESIDUAL_STEP)?;
    let wf = assemble(&s.row, edge, &xs)?;
    stencil_residual(&ctx.params, &xs, &wf.psi, wf.energy)
}

/// One band-edge eigenfunction sampled on the output grid.
pub fn cmd_wavefunction(cfg: &RunConfig, level: usize) -> Result<CommandOutcome> {
    let ctx = model_context(cfg)?;
    let solved = solve_rows(&ctx.rows)?;
    let levels = level_list(&solved);
    if level >= levels.len() {
        return Err(QesError::Constraint(format!(
            "level {level} out of range: the model has {} band edges (0..={})",
            levels.len(),
            levels.len() - 1
        )));
    }
    let (si, ei) = levels[level];
    let s = &solved[si];
    let edge = &s.edges[ei];
    let xs = output_grid(&ctx, cfg)?;
    let wf = assemble(&s.row, edge, &xs)?;
    let residual = audit_residual(&ctx, s, edge)?;
    let d = ctx.precision;

    let text = match ctx.format {
        OutputFormat::Csv => {
            let mut out = format!("# level={} of {}\n", level, levels.len());
            out.push_str(&format!(
                "# {} row={} E={} residual={}\n",
                ctx.header_fragment(),
                wf.row_id,
                fmt_complex_sig(wf.energy, d),
                fmt_sig(residual, d),
            ));
            out.push_str("x,re_psi,im_psi,V\n");
            for (x, p) in wf.xs.iter().zip(&wf.psi) {
                let v = potential_value(&ctx.params, *x)?;
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt_sig(*x, d),
                    fmt_sig(p.re, d),
                    fmt_sig(p.im, d),
                    fmt_sig(v, d),
                ));
            }
            out
        }
        OutputFormat::Json => {
            let sample_json = wavefunction_samples(&ctx.params, &wf)?;
            json_report(
                json!({
                    "command": "wavefunction",
                    "model": ctx.model_json(),
                    "level": level,
                    "levels": levels.len(),
                    "row": wf.row_id.to_string(),
                    "energy": complex_json(wf.energy),
                    "residual": residual,
                    "samples": sample_json,
                    "warnings": ctx.warnings,
                }),
                d,
            )
        }
    };
    Ok(ctx.outcome(text, 0))
}

/// Column arrays of a sampled eigenfunction for the JSON report.
fn wavefunction_samples(params: &ModelParams, wf: &SampledWavefunction) -> Result<Value> {
    let mut potential = Vec::with_capacity(wf.xs.len());
    for &x in &wf.xs {
        potential.push(potential_value(params, x)?);
    }
    Ok(json!({
        "x": wf.xs,
        "re_psi": wf.psi.iter().map(|p| p.re).collect::<Vec<_>>(),
        "im_psi": wf.psi.iter().map(|p| p.im).collect::<Vec<_>>(),
        "potential": potential,
    }))
}

/// Track the algebraic spectrum along the default modulus sequence toward an
/// exactly-solvable limit.
pub fn cmd_limit(cfg: &RunConfig, target: &str) -> Result<CommandOutcome> {
    let ctx = model_context(cfg)?;
    let target: LimitTarget = target.parse()?;
    let filter = resolve_rows(cfg)?;
    let a = ctx.resolved.a;
    let b = ctx.resolved.b;
    let scan = limit_scan(
        ctx.resolved.family,
        *a.numer() as f64 / *a.denom() as f64,
        *b.numer() as f64 / *b.denom() as f64,
        filter.as_deref(),
        target,
        &default_m_sequence(target, 9),
    )?;
    let d = ctx.precision;

    let text = match ctx.format {
        OutputFormat::Csv => {
            let mut out = format!(
                "# limit {} target={} class={} class_A={} class_B={} final_max_gap={}\n",
                ctx.header_fragment(),
                target,
                scan.class.tag,
                fmt_sig(scan.class.a, d),
                fmt_sig(scan.class.b, d),
                fmt_sig(scan.final_max_gap, d),
            );
            out.push_str("m,level_index,e_re,e_im,e_es,abs_gap\n");
            for step in &scan.steps {
                for lv in &step.levels {
                    out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        fmt_sig(step.m, d),
                        lv.slot,
                        fmt_sig(lv.energy.re, d),
                        fmt_sig(lv.energy.im, d),
                        fmt_sig(lv.es_energy, d),
                        fmt_sig(lv.gap, d),
                    ));
                }
            }
            out
        }
        OutputFormat::Json => json_report(
            json!({
                "command": "limit",
                "model": ctx.model_json(),
                "target": target.to_string(),
                "class": {
                    "tag": scan.class.tag.to_string(),
                    "A": scan.class.a,
                    "B": scan.class.b,
                },
                "steps": limit_steps_json(&scan),
                "final_max_gap": scan.final_max_gap,
                "warnings": ctx.warnings,
            }),
            d,
        ),
    };
    Ok(ctx.outcome(text, 0))
}

fn limit_steps_json(scan: &LimitScan) -> Vec<Value> {
    scan.steps
        .iter()
        .map(|step| {
            json!({
                "m": step.m,
                "levels": step.levels.iter().map(|lv| json!({
                    "slot": lv.slot,
                    "energy": complex_json(lv.energy),
                    "es_index": lv.es_index,
                    "es_energy": lv.es_energy,
                    "gap": lv.gap,
                })).collect::<Vec<_>>(),
            })
        })
        .collect()
}

/// Run the closed-form, limit, degeneracy and oracle suites and report every
/// check; exit 0 iff all pass.
pub fn cmd_verify(cfg: &RunConfig) -> Result<CommandOutcome> {
    let n = cfg.grid.n;
    let precision = resolve_precision(cfg)?;
    if n < 100 {
        return Err(QesError::Constraint(format!(
            "the finite-difference oracle needs at least 100 grid points, got N={n} \
             (raise --grid-n)"
        )));
    }
    let ms = [0.1, 0.5, 0.9];
    let mut checks: Vec<CheckOutcome> = Vec::new();
    checks.extend(spectrum_suite(&ms)?);
    checks.extend(reference_eigenfunction_suite(&ms, RESIDUAL_STEP)?);
    checks.extend(assembled_eigenfunction_suite(&ms, RESIDUAL_STEP)?);
    let factor = residual_halving_factor()?;
    checks.push(CheckOutcome {
        label: "stencil order: residual drop under step halving".into(),
        pass: (12.0..=20.0).contains(&factor),
        detail: format!("factor {factor:.2} (fourth-order target 16, accepted 12..20)"),
    });
    checks.extend(limit_suite()?);
    checks.extend(oracle_suite(n)?);
    checks.extend(degeneracy_suite()?);

    let passed = checks.iter().filter(|c| c.pass).count();
    let all_pass = passed == checks.len();

    // Fixtures whose closed-form spectrum leaves the real axis cannot be
    // cross-checked against the real-symmetric oracle; they are covered by
    // residual checks only.
    let mut residual_only: Vec<Value> = Vec::new();
    for fixture in spectrum_fixtures() {
        let complex_at: Vec<f64> = ms
            .iter()
            .copied()
            .filter(|&m| (fixture.energies)(m).iter().any(|e| e.im != 0.0))
            .collect();
        if !complex_at.is_empty() {
            residual_only.push(json!({
                "fixture": fixture.label,
                "complex_at_m": complex_at,
                "status": "residual-only",
            }));
        }
    }

    let report = json!({
        "command": "verify",
        "grid_n": n,
        "checks": checks.iter().map(|c| json!({
            "label": c.label,
            "pass": c.pass,
            "detail": c.detail,
        })).collect::<Vec<_>>(),
        "residual_only": residual_only,
        "summary": {
            "total": checks.len(),
            "passed": passed,
            "failed": checks.len() - passed,
            "all_pass": all_pass,
        },
    });
    Ok(CommandOutcome {
        text: json_report(report, precision),
        path: None,
        warnings: Vec::new(),
        exit_code: if all_pass { 0 } else { 3 },
    })
}
