//! approximation → linearization → verification → eigensolve.

use std::collections::BTreeMap;
use std::time::Instant;

use ratlin::aaa::{aaa_approximate, barycentric_eval, set_valued_aaa, BarycentricApprox, SampleSet, SampledFunction};
use ratlin::blockfullrank::BfrParts;
use ratlin::cork::{
    build_cork_aaa, build_trimmed_cork, check_sufficient_minimality, cork_as_bfr, cork_transfer, low_rank_factorize,
    low_rank_factorize_exact, BasisRelation, BfrView, CorkMode, CorkModel, CorkPencil,
};
use ratlin::eigsolve::{recover_and_filter, residual_against_nonlinear, solve_cork, Classification, NlepModel};
use ratlin::exactalg::{ExactField, GaussRational, RatMatrix, Rational};
use ratlin::smithmcmillan::{pole_zero_in, SmithMcMillan};
use ratlin::sysmat::{check_linearization_at_infinity, check_linearization_in, LinearizationReport, RegionSpec, SystemMatrix};
use ratlin::Error;

use crate::config::{Mode, PencilKind, PipelineConfig};
use crate::error::{CliError, CliResult, Context};
use crate::problem::{approx_to_c64, mat_c64, mat_exact};
use crate::report::{
    ApproximationSummary, ConditionSummary, EigenpairRow, LinearizationSummary, MinimalitySummary, PencilSummary, PlotRow,
    PointMultiplicities, RunReport, StructureSummary, TermMinimality,
};

struct Timer {
    enabled: bool,
    spans: BTreeMap<String, f64>,
}

impl Timer {
    fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if self.enabled {
            *self.spans.entry(name.to_string()).or_default() += start.elapsed().as_secs_f64() * 1e3;
        }
        out
    }
}

/// Everything a run produces besides the report itself.
pub struct RunOutput {
    pub report: RunReport,
    pub plot: Vec<PlotRow>,
}

pub fn run(cfg: &PipelineConfig) -> CliResult<RunOutput> {
    let mut report = RunReport::new(cfg.echo());
    let mut timer = Timer { enabled: cfg.output.timings, spans: BTreeMap::new() };
    let mut plot = Vec::new();
    let real = cfg.problem.is_real()?;
    match (cfg.mode, real) {
        (Mode::VerifyLinearization, true) => verify::<Rational>(cfg, &mut report, &mut timer)?,
        (Mode::VerifyLinearization, false) => verify::<GaussRational>(cfg, &mut report, &mut timer)?,
        (Mode::SolveRep, true) => solve_rep::<Rational>(cfg, &mut report, &mut timer)?,
        (Mode::SolveRep, false) => solve_rep::<GaussRational>(cfg, &mut report, &mut timer)?,
        (Mode::SolveNlep, _) => plot = solve_nlep(cfg, &mut report, &mut timer)?,
    }
    if timer.enabled {
        report.timings_ms = Some(timer.spans);
    }
    Ok(RunOutput { report, plot })
}

fn field_name<F: ExactField>() -> String {
    if F::from_parts(Rational::from_integer(0.into()), Rational::from_integer(1.into())).is_some() {
        "Q(i)".into()
    } else {
        "Q".into()
    }
}

fn region_label<F: ExactField>(region: &RegionSpec<F>) -> String {
    let list = |v: &[F]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
    match region {
        RegionSpec::Cofinite(ex) if ex.is_empty() => "C".into(),
        RegionSpec::Cofinite(ex) => format!("C \\ {{{}}}", list(ex)),
        RegionSpec::FiniteSet(p) => format!("{{{}}}", list(p)),
        RegionSpec::Infinity { grade } => format!("infinity (grade {grade})"),
    }
}

fn linearization_summary<F: ExactField>(
    check: &str,
    region: String,
    res: ratlin::Result<LinearizationReport<F>>,
) -> LinearizationSummary {
    let field = field_name::<F>();
    match res {
        Ok(r) => LinearizationSummary {
            check: check.into(),
            field,
            region,
            is_linearization: r.is_linearization,
            rank_condition: Some(r.rank_condition),
            pole_match: Some(r.pole_match),
            zero_match: Some(r.zero_match),
            witness: r.witness.map(|w| w.to_string()),
            error: None,
        },
        Err(e) => LinearizationSummary {
            check: check.into(),
            field,
            region,
            is_linearization: false,
            rank_condition: None,
            pole_match: None,
            zero_match: None,
            witness: None,
            error: Some(e.to_string()),
        },
    }
}

fn linearization_detail(s: &LinearizationSummary) -> String {
    match (&s.error, &s.witness) {
        (Some(e), _) => format!("{} in {}: {e}", s.field, s.region),
        (None, Some(w)) if !s.is_linearization => format!("fails in {} over {} at {w}", s.region, s.field),
        _ => format!("{} over {}", if s.is_linearization { "holds" } else { "fails" }, s.region),
    }
}

/// Poles and zeros of `r` at its candidate points inside the region.
fn structure<F: ExactField>(r: &RatMatrix<F>, region: &RegionSpec<F>) -> StructureSummary {
    let cands = SmithMcMillan::new(r).candidate_points();
    let points: Vec<F> = cands.points.iter().filter(|x| region.contains(x)).cloned().collect();
    let rep = pole_zero_in(r, &points);
    let fmt = |v: Vec<(F, Vec<usize>)>| {
        v.into_iter().map(|(p, m)| PointMultiplicities { point: p.to_string(), multiplicities: m }).collect()
    };
    StructureSummary {
        check: "smith_mcmillan".into(),
        poles: fmt(rep.poles()),
        zeros: fmt(rep.zeros()),
        unresolved: cands.unresolved.iter().map(|p| p.to_string()).collect(),
    }
}

fn verify<F: ExactField>(cfg: &PipelineConfig, report: &mut RunReport, timer: &mut Timer) -> CliResult<()> {
    let pp = cfg.problem.pencil_problem()?;
    let ep = pp.exact::<F>()?;
    let label = region_label(&ep.region);

    let finite = timer.time("finite_condition", || ep.parts.check_finite_condition(&ep.region));
    let cond = match finite {
        Ok(c) => ConditionSummary {
            check: "finite_rank_condition".into(),
            passed: c.passed,
            grade: None,
            reason: c.witness.map(|w| format!("rank drops at {w}")),
        },
        Err(e) => ConditionSummary { check: "finite_rank_condition".into(), passed: false, grade: None, reason: Some(e.to_string()) },
    };
    report.check("finite_rank_condition", cond.passed, cond.reason.clone().unwrap_or_else(|| format!("holds on {label}")));
    report.finite_condition = Some(cond);

    let sys = ep.parts.assemble().context("system matrix")?;
    let lin = timer.time("linearization", || check_linearization_in(&sys, &ep.target, &ep.region));
    let lin = linearization_summary("linearization_oracle", label, lin);
    report.check("linearization_in_region", lin.is_linearization, linearization_detail(&lin));
    report.linearization = Some(lin);
    report.structure = Some(timer.time("structure", || structure(&ep.target, &ep.region)));

    if pp.infinity {
        infinity_checks(report, timer, &ep.parts, &sys, &ep.target, true);
    }
    Ok(())
}

/// Condition and linearization at infinity. As checks when `enforce`,
/// otherwise reported only.
fn infinity_checks<F: ExactField>(
    report: &mut RunReport,
    timer: &mut Timer,
    parts: &BfrParts<F>,
    sys: &SystemMatrix<F>,
    target: &RatMatrix<F>,
    enforce: bool,
) {
    let inf = timer.time("infinity", || parts.check_infinity_condition());
    let summary = match &inf {
        Ok(c) => ConditionSummary {
            check: "infinity_condition".into(),
            passed: c.passed,
            grade: Some(c.grade),
            reason: c.failure.map(|f| f.to_string()),
        },
        Err(e) => ConditionSummary { check: "infinity_condition".into(), passed: false, grade: None, reason: Some(e.to_string()) },
    };
    if enforce {
        let detail = match (&summary.reason, summary.grade) {
            (Some(r), _) => r.clone(),
            (None, Some(g)) => format!("holds with grade {g}"),
            _ => String::new(),
        };
        report.check("infinity_condition", summary.passed, detail);
    }
    if let Ok(c) = inf {
        if c.passed {
            let res = timer.time("linearization_at_infinity", || check_linearization_at_infinity(sys, target, c.grade));
            let lin = linearization_summary("linearization_oracle", format!("infinity (grade {})", c.grade), res);
            if enforce {
                report.check("linearization_at_infinity", lin.is_linearization, linearization_detail(&lin));
            }
            report.linearization_at_infinity = Some(lin);
        }
    }
    report.infinity = Some(summary);
}

fn solve_rep<F: ExactField>(cfg: &PipelineConfig, report: &mut RunReport, timer: &mut Timer) -> CliResult<()> {
    let rel = cfg.problem.relation(cfg.linearization.basis)?;
    let model = cfg.problem.cork_model(&rel, mat_c64)?;
    let exact_terms = cfg.problem.rational_terms::<F>()?;
    let approxs = exact_terms.iter().map(approx_to_c64).collect::<CliResult<Vec<_>>>()?;
    solve_numeric(cfg, report, timer, &model, &rel, &approxs, None)?;
    if cfg.linearization.exact_check {
        let exact_model = cfg.problem.cork_model(&rel, mat_exact::<F>)?;
        exact_check(cfg, report, timer, &exact_model, &exact_terms, &rel)?;
    }
    Ok(())
}

fn solve_nlep(cfg: &PipelineConfig, report: &mut RunReport, timer: &mut Timer) -> CliResult<Vec<PlotRow>> {
    let rel = cfg.problem.relation(cfg.linearization.basis)?;
    let model = cfg.problem.cork_model(&rel, mat_c64)?;
    let functions = cfg.problem.functions()?;
    let mut plot = Vec::new();
    let mut approxs: Vec<BarycentricApprox> = Vec::new();
    if !cfg.problem.terms.is_empty() {
        let sampling = cfg.sampling().ok_or_else(|| CliError::Config("nonlinear terms need a sampling set".into()))?;
        let points = sampling.points(cfg.seed)?;
        let mut sampled = Vec::with_capacity(cfg.problem.terms.len());
        for (i, t) in cfg.problem.terms.iter().enumerate() {
            let (name, values) = match (&t.function, &t.samples) {
                (Some(name), None) => {
                    let f = ratlin::aaa::ScalarFunction::parse(name).context(format!("term {i}"))?;
                    let v = points.iter().map(|&z| f.eval(z)).collect::<ratlin::Result<Vec<_>>>().context(format!("sampling term {i}"))?;
                    (f.name(), v)
                }
                (None, Some(v)) => (format!("samples[{i}]"), v.clone()),
                _ => return Err(CliError::Problem(format!("term {i}: give exactly one of function or samples"))),
            };
            sampled.push(SampledFunction { name, values });
        }
        approxs = timer.time("aaa", || -> CliResult<Vec<BarycentricApprox>> {
            if cfg.aaa.set_valued {
                let set = SampleSet::new(points.clone(), sampled.clone()).context("sample set")?;
                set_valued_aaa(&set, cfg.aaa.tol, cfg.aaa.max_m).context("set-valued AAA")
            } else {
                sampled
                    .iter()
                    .map(|f| {
                        let set = SampleSet::new(points.clone(), vec![f.clone()]).context("sample set")?;
                        aaa_approximate(&set, cfg.aaa.tol, cfg.aaa.max_m).context(format!("AAA for {}", f.name))
                    })
                    .collect()
            }
        })?;
        for (f, r) in sampled.iter().zip(&approxs) {
            let scale = f.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let scale = if scale > 0.0 { scale } else { 1.0 };
            let mut worst: f64 = 0.0;
            for (&z, &g) in points.iter().zip(&f.values) {
                let abs_error = (g - barycentric_eval(r, z)).norm();
                worst = worst.max(abs_error / scale);
                plot.push(PlotRow { function: f.name.clone(), point: z, abs_error, rel_error: abs_error / scale });
            }
            report.approximation.push(ApproximationSummary {
                function: f.name.clone(),
                m: r.m(),
                max_rel_error: worst,
                samples: points.len(),
            });
        }
    }
    let nlep = match functions {
        Some(fs) => Some(NlepModel::new(model.clone(), rel.clone(), fs).context("nonlinear model")?),
        None => None,
    };
    solve_numeric(cfg, report, timer, &model, &rel, &approxs, nlep.as_ref())?;
    if cfg.linearization.exact_check {
        let exact_model: CorkModel<GaussRational> = model.rationalize().context("rationalizing the model")?;
        let exact_terms = approxs.iter().map(|r| r.rationalize()).collect::<ratlin::Result<Vec<_>>>().context("rationalizing")?;
        exact_check(cfg, report, timer, &exact_model, &exact_terms, &rel)?;
    }
    Ok(plot)
}

fn pencil_summary(p: &CorkPencil, ranks: Vec<usize>) -> PencilSummary {
    PencilSummary {
        mode: match p.mode {
            CorkMode::Polynomial => "polynomial",
            CorkMode::Full => "full",
            CorkMode::Trimmed => "trimmed",
        }
        .into(),
        dim: p.dim(),
        n: p.n,
        k: p.k,
        state_sizes: p.state_sizes.clone(),
        term_ranks: ranks,
    }
}

fn solve_numeric(
    cfg: &PipelineConfig,
    report: &mut RunReport,
    timer: &mut Timer,
    model: &CorkModel,
    rel: &BasisRelation,
    approxs: &[BarycentricApprox],
    nlep: Option<&NlepModel>,
) -> CliResult<()> {
    let trimmed = cfg.linearization.kind == PencilKind::Trimmed && !model.terms().is_empty();
    let factors: Vec<_> = if trimmed {
        model.terms().iter().map(|(c, d)| low_rank_factorize(c, d, cfg.linearization.low_rank_tol)).collect()
    } else {
        Vec::new()
    };
    let pencil = timer.time("pencil", || {
        if trimmed {
            build_trimmed_cork(model, approxs, rel, &factors)
        } else {
            build_cork_aaa(model, approxs, rel)
        }
    });
    let pencil = pencil.context("building the pencil")?;
    let ranks = if trimmed { factors.iter().map(|f| f.rank()).collect() } else { vec![model.n(); model.terms().len()] };
    report.pencil = Some(pencil_summary(&pencil, ranks));

    if !model.terms().is_empty() {
        let fs = trimmed.then_some(factors.as_slice());
        let res = check_sufficient_minimality(model, approxs, fs, cfg.linearization.minimality_tol);
        let summary = match res {
            Ok(r) => MinimalitySummary {
                check: "sufficient_minimality".into(),
                certified_minimal: r.certified_minimal,
                not_applicable: None,
                disjoint_states: Some(r.disjoint_states),
                disjoint_witness: r.disjoint_witness,
                terms: r
                    .terms
                    .into_iter()
                    .map(|t| TermMinimality {
                        irreducible: t.irreducible,
                        common_root: t.common_root,
                        coefficient_condition: t.coefficient_condition,
                        coefficient_witness: t.coefficient_witness,
                        state_eigenvalues: t.state_eigenvalues,
                    })
                    .collect(),
            },
            Err(e @ Error::SingularTermPencil(_)) => MinimalitySummary {
                check: "sufficient_minimality".into(),
                certified_minimal: false,
                not_applicable: Some(e.to_string()),
                disjoint_states: None,
                disjoint_witness: None,
                terms: Vec::new(),
            },
            Err(e) => return Err(CliError::Core { context: "minimality conditions".into(), source: e }),
        };
        if cfg.linearization.require_certificate {
            let detail = match &summary.not_applicable {
                Some(why) => format!("not certified: {why}"),
                None if summary.certified_minimal => "certified minimal in C".into(),
                None => "conditions not met; minimality undetermined".into(),
            };
            report.check("sufficient_minimality", summary.certified_minimal, detail);
        }
        report.minimality = Some(summary);
    }

    let pairs = timer.time("eigensolve", || solve_cork(&pencil)).context("eigensolve")?;
    let kept = recover_and_filter(&pairs, &pencil, model, rel, approxs, &cfg.target);
    let scalar = model.n() == 1;
    let mut worst: f64 = 0.0;
    let mut scored = 0;
    for p in kept {
        let value = p.value.finite().expect("filtered pairs are finite");
        let vector = p.recovered_vector.unwrap_or_default();
        let residual_nonlinear = match (nlep, p.classification) {
            (Some(m), Classification::Eigenvalue) => residual_against_nonlinear(m, value, &vector).ok(),
            _ => None,
        };
        if p.classification == Classification::Eigenvalue {
            scored += 1;
            // relative residuals of a 1x1 matrix are 1 at every point
            let judged = if scalar {
                vec![pairs.iter().find(|q| q.value == p.value).and_then(|q| q.residual)]
            } else {
                vec![p.residual, residual_nonlinear]
            };
            for r in judged.into_iter().flatten() {
                worst = worst.max(if r.is_nan() { f64::INFINITY } else { r });
            }
        }
        report.eigenpairs.push(EigenpairRow {
            value,
            classification: p.classification.label().into(),
            residual: p.residual,
            residual_nonlinear,
            vector,
        });
    }
    let detail = if scored == 0 {
        "no eigenvalues in the target region".to_string()
    } else {
        let kind = if scalar { "pencil backward error" } else { "residual" };
        format!("max {kind} {worst:.3e} over {scored} eigenvalues (threshold {:.1e})", cfg.residual_tol)
    };
    report.check("residuals", worst <= cfg.residual_tol, detail);
    Ok(())
}

/// The exact oracle on the rationalized pencil over all of `C`, plus the
/// poles and zeros of the rationalized `R` and the (reported only) state of
/// the condition at infinity.
fn exact_check<F: ExactField>(
    cfg: &PipelineConfig,
    report: &mut RunReport,
    timer: &mut Timer,
    model: &CorkModel<F>,
    approxs: &[BarycentricApprox<F>],
    rel: &BasisRelation,
) -> CliResult<()> {
    let trimmed = cfg.linearization.kind == PencilKind::Trimmed && !model.terms().is_empty();
    let pencil = if trimmed {
        let factors: Vec<_> = model.terms().iter().map(|(c, d)| low_rank_factorize_exact(c, d)).collect();
        build_trimmed_cork(model, approxs, rel, &factors)
    } else {
        build_cork_aaa(model, approxs, rel)
    }
    .context("exact pencil")?;
    let parts = cork_as_bfr(&pencil, rel, BfrView::StateMatrix).context("block view of the pencil")?;
    let sys = parts.assemble().context("system matrix")?;
    let want = cork_transfer(model, approxs, rel).context("exact transfer function")?;
    let region = RegionSpec::Cofinite(Vec::new());
    let res = timer.time("exact_linearization", || check_linearization_in(&sys, &want, &region));
    let lin = linearization_summary("linearization_oracle", region_label(&region), res);
    report.check("exact_linearization", lin.is_linearization, linearization_detail(&lin));
    report.linearization = Some(lin);
    report.structure = Some(timer.time("structure", || structure(&want, &region)));
    infinity_checks(report, timer, &parts, &sys, &want, false);
    Ok(())
}
