use serde::Serialize;

use spiral_core::criteria::{
    corollary_all, criterion_all, ClassKind, CriterionId, SpiralClassParams, Variant, Verdict, VerdictSet,
};
use spiral_core::discrepancy::{discrepancy_report, CriterionGrid, DiscrepancyRow, Subject, SubjectSummary};
use spiral_core::disk::{verify_on_disk, DiskGrid, DEFAULT_TOLERANCE};
use spiral_core::scan::{scan, CriticalQ, QStarStatus, ScanGrid, ScanRow};
use spiral_core::series::{
    integral_transform, pascal_coefficient, theta_series_adaptive, PascalParams, PowerSeries, RTauParams,
};
use spiral_core::soundness::{criterion_target, soundness_sweep, SoundnessOutcome};
use spiral_core::summation::identity_reports;

use crate::args::{
    CheckArgs, ClassArgs, Cli, CoeffsArgs, Command, Format, IdentitiesArgs, RTauArgs, ReportArgs, ScanArgs, SeriesArg,
    VariantArg, VerifyDiskArgs,
};
use crate::emit::{csv, json, num, sig17, table};
use crate::{CliError, Output, EXIT_NOT_SATISFIED, EXIT_OK};

const MAX_COEFFS: usize = 1_000_000;

pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Coeffs(a) => coeffs(cli, a),
        Command::Identities(a) => identities(cli, a),
        Command::Check(a) => check(cli, a),
        Command::VerifyDisk(a) => verify_disk(cli, a),
        Command::Scan(a) => scan_cmd(cli, a),
        Command::DiscrepancyReport(a) => report(cli, a),
    }
}

fn invalid(name: &str, reason: impl std::fmt::Display) -> CliError {
    CliError { kind: "invalid_parameter", message: format!("invalid parameter `{name}`: {reason}") }
}

fn ok(body: String) -> Output {
    Output { body, status: EXIT_OK }
}

fn angle(cli: &Cli, x: f64) -> f64 {
    if cli.degrees {
        x.to_radians()
    } else {
        x
    }
}

fn class_params(cli: &Cli, a: &ClassArgs) -> Result<SpiralClassParams, CliError> {
    Ok(SpiralClassParams::new(angle(cli, a.xi), a.gamma, a.rho)?)
}

fn rtau_params(a: &RTauArgs) -> Result<RTauParams, CliError> {
    Ok(RTauParams::new(num_complex::Complex64::new(a.tau_re, a.tau_im), a.vartheta, a.delta)?)
}

fn positive_tol(name: &str, tol: f64) -> Result<f64, CliError> {
    if tol.is_finite() && tol > 0.0 {
        Ok(tol)
    } else {
        Err(invalid(name, format!("must be finite and > 0, got {tol}")))
    }
}

#[derive(Serialize)]
struct RTauOut {
    tau_re: f64,
    tau_im: f64,
    vartheta: f64,
    delta: f64,
}

impl From<&RTauParams> for RTauOut {
    fn from(r: &RTauParams) -> Self {
        Self { tau_re: r.tau().re, tau_im: r.tau().im, vartheta: r.vartheta(), delta: r.delta() }
    }
}

#[derive(Serialize)]
struct CoeffRow {
    n: usize,
    phi_n: f64,
}

#[derive(Serialize)]
struct CoeffsOut {
    command: &'static str,
    m: f64,
    q: f64,
    n_max: usize,
    coefficients: Vec<CoeffRow>,
}

fn coeffs(cli: &Cli, a: &CoeffsArgs) -> Result<Output, CliError> {
    let p = PascalParams::new(a.m, a.q)?;
    if !(2..=MAX_COEFFS).contains(&a.n) {
        return Err(invalid("n", format!("must satisfy 2 <= n <= {MAX_COEFFS}, got {}", a.n)));
    }
    let rows: Vec<CoeffRow> = (2..=a.n).map(|n| CoeffRow { n, phi_n: pascal_coefficient(n, &p) }).collect();
    let body = match cli.format {
        Format::Json => json(&CoeffsOut { command: "coeffs", m: p.m(), q: p.q(), n_max: a.n, coefficients: rows })?,
        Format::Csv => {
            csv(&["n", "phi_n"], &rows.iter().map(|r| vec![r.n.to_string(), num(r.phi_n)]).collect::<Vec<_>>())?
        }
        Format::Human => {
            table(&["n", "phi_n"], &rows.iter().map(|r| vec![r.n.to_string(), sig17(r.phi_n)]).collect::<Vec<_>>())
        }
    };
    Ok(ok(body))
}

#[derive(Serialize)]
struct IdentityRow {
    identity: &'static str,
    m: f64,
    q: f64,
    closed_form: f64,
    oracle_sum: f64,
    truncation_order: usize,
    abs_error: f64,
    /// `abs_error / max(1, |closed_form|)`.
    rel_error: f64,
}

#[derive(Serialize)]
struct IdentitiesOut {
    command: &'static str,
    rows: Vec<IdentityRow>,
}

fn identities(cli: &Cli, a: &IdentitiesArgs) -> Result<Output, CliError> {
    let defaults = CriterionGrid::default();
    let ms = if a.m.is_empty() { defaults.m } else { a.m.clone() };
    let qs = if a.q.is_empty() { defaults.q } else { a.q.clone() };
    let mut rows = Vec::new();
    for &m in &ms {
        for &q in &qs {
            let p = PascalParams::new(m, q)?;
            for r in identity_reports(&p)? {
                rows.push(IdentityRow {
                    identity: r.identity.label(),
                    m: r.m,
                    q: r.q,
                    closed_form: r.closed_form,
                    oracle_sum: r.truncated,
                    truncation_order: r.truncation_order,
                    abs_error: r.abs_error,
                    rel_error: r.abs_error / r.closed_form.abs().max(1.0),
                });
            }
        }
    }
    let header = ["identity", "m", "q", "closed_form", "oracle_sum", "truncation_order", "abs_error", "rel_error"];
    let cells = |f: fn(f64) -> String| -> Vec<Vec<String>> {
        rows.iter()
            .map(|r| {
                vec![
                    r.identity.to_owned(),
                    num(r.m),
                    num(r.q),
                    f(r.closed_form),
                    f(r.oracle_sum),
                    r.truncation_order.to_string(),
                    f(r.abs_error),
                    f(r.rel_error),
                ]
            })
            .collect()
    };
    let body = match cli.format {
        Format::Json => json(&IdentitiesOut { command: "identities", rows })?,
        Format::Csv => csv(&header, &cells(num))?,
        Format::Human => table(&header, &cells(sig17)),
    };
    Ok(ok(body))
}

#[derive(Serialize)]
struct ParamsOut {
    m: f64,
    q: f64,
    xi: f64,
    gamma: f64,
    rho: f64,
}

#[derive(Serialize)]
struct VerdictOut {
    variant: &'static str,
    lhs: f64,
    rhs: f64,
    margin: f64,
    satisfied: bool,
}

impl From<&Verdict> for VerdictOut {
    fn from(v: &Verdict) -> Self {
        Self { variant: v.variant.label(), lhs: v.lhs, rhs: v.rhs, margin: v.margin, satisfied: v.satisfied }
    }
}

#[derive(Serialize)]
struct CheckOut {
    command: &'static str,
    criterion: &'static str,
    theorem: &'static str,
    params: ParamsOut,
    rtau: Option<RTauOut>,
    verdicts: Vec<VerdictOut>,
    /// Largest pairwise gap between the three variants' lhs.
    disagreement: f64,
    /// Direct variant; decides the exit status.
    satisfied: bool,
}

fn selected(variant: VariantArg) -> Vec<Variant> {
    match variant {
        VariantArg::Paper => vec![Variant::Paper],
        VariantArg::Rederived => vec![Variant::Rederived],
        VariantArg::Direct => vec![Variant::Direct],
        VariantArg::All => Variant::ALL.to_vec(),
    }
}

fn check(cli: &Cli, a: &CheckArgs) -> Result<Output, CliError> {
    let p = PascalParams::new(a.m, a.q)?;
    let mut c = class_params(cli, &a.class)?;
    let id = match a.criterion {
        Subject::Theorem(id) => id,
        Subject::Corollary(cor) => cor.criterion(),
    };
    let r = if id.needs_rtau() { Some(rtau_params(&a.rtau)?) } else { None };
    let set: VerdictSet = match a.criterion {
        Subject::Theorem(id) => criterion_all(id, &p, &c, r.as_ref())?,
        Subject::Corollary(cor) => {
            c = c.without_rho();
            corollary_all(cor, &p, &c, r.as_ref())?
        }
    };
    let verdicts: Vec<VerdictOut> = selected(a.variant).iter().map(|v| set.get(*v).into()).collect();
    let satisfied = set.direct.satisfied;
    let out = CheckOut {
        command: "check",
        criterion: a.criterion.label(),
        theorem: id.label(),
        params: ParamsOut { m: p.m(), q: p.q(), xi: c.xi(), gamma: c.gamma(), rho: c.rho() },
        rtau: r.as_ref().map(RTauOut::from),
        verdicts,
        disagreement: set.disagreement,
        satisfied,
    };
    let header = ["criterion", "variant", "lhs", "rhs", "margin", "satisfied", "disagreement"];
    let cells = |f: fn(f64) -> String| -> Vec<Vec<String>> {
        out.verdicts
            .iter()
            .map(|v| {
                vec![
                    out.criterion.to_owned(),
                    v.variant.to_owned(),
                    f(v.lhs),
                    f(v.rhs),
                    f(v.margin),
                    v.satisfied.to_string(),
                    f(out.disagreement),
                ]
            })
            .collect()
    };
    let body = match cli.format {
        Format::Json => json(&out)?,
        Format::Csv => csv(&header, &cells(num))?,
        Format::Human => {
            let mut s = table(&header, &cells(sig17));
            s.push_str(&format!("direct variant satisfied: {satisfied}\n"));
            s
        }
    };
    Ok(Output { body, status: if satisfied { EXIT_OK } else { EXIT_NOT_SATISFIED } })
}

#[derive(Serialize)]
struct DiskParamsOut {
    m: Option<f64>,
    q: Option<f64>,
    xi: f64,
    gamma: f64,
    rho: f64,
}

#[derive(Serialize)]
struct GridOut {
    radii: Vec<f64>,
    angles_per_ring: usize,
    points: usize,
}

#[derive(Serialize)]
struct PointOut {
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct VerifyOut {
    command: &'static str,
    series: &'static str,
    class: &'static str,
    params: DiskParamsOut,
    rtau: Option<RTauOut>,
    order: usize,
    truncated: bool,
    grid: GridOut,
    tolerance: f64,
    /// `null` when the functional's denominator vanished at the witness.
    min_value: Option<f64>,
    witness: PointOut,
    pass: bool,
    singular: bool,
    /// `no_violation_found` on pass (grid evidence only), `counterexample`
    /// on failure (the witness is a concrete violating point).
    evidence: &'static str,
}

fn class_label(class: ClassKind) -> &'static str {
    match class {
        ClassKind::S => "S",
        ClassKind::K => "K",
    }
}

fn verify_disk(cli: &Cli, a: &VerifyDiskArgs) -> Result<Output, CliError> {
    let c = class_params(cli, &a.class_params)?;
    let tolerance = positive_tol("tol", a.tol)?;
    let defaults = DiskGrid::default();
    let grid = DiskGrid::new(
        a.radii.clone().unwrap_or_else(|| defaults.radii().to_vec()),
        a.angles.unwrap_or(defaults.angles_per_ring()),
    )?;
    let pascal = |series: SeriesArg| -> Result<PascalParams, CliError> {
        let need = |name: &str, v: Option<f64>| {
            v.ok_or_else(|| invalid(name, format!("required for --series {}", series.label())))
        };
        Ok(PascalParams::new(need("m", a.m)?, need("q", a.q)?)?)
    };
    let mut rtau = None;
    let (label, f) = match (&a.coeffs, a.series) {
        (Some(co), _) => {
            if let Some(bad) = co.iter().find(|x| !x.is_finite()) {
                return Err(invalid("coeffs", format!("coefficients must be finite, got {bad}")));
            }
            ("coeffs", PowerSeries::from_real(co))
        }
        (None, SeriesArg::Identity) => ("identity", PowerSeries::identity()),
        (None, SeriesArg::Theta) => ("theta", theta_series_adaptive(&pascal(SeriesArg::Theta)?)?),
        (None, SeriesArg::Integral) => {
            ("integral", integral_transform(&theta_series_adaptive(&pascal(SeriesArg::Integral)?)?))
        }
        (None, SeriesArg::Lambda) => {
            let r = rtau_params(&a.rtau)?;
            rtau = Some(r);
            ("lambda", criterion_target(CriterionId::LambdaRtauInS, &pascal(SeriesArg::Lambda)?, Some(&r))?.0)
        }
    };
    let class: ClassKind = a.class.into();
    let rep = verify_on_disk(&f, &c, class, &grid, tolerance)?;
    let out = VerifyOut {
        command: "verify-disk",
        series: label,
        class: class_label(class),
        params: DiskParamsOut { m: a.m, q: a.q, xi: c.xi(), gamma: c.gamma(), rho: c.rho() },
        rtau: rtau.as_ref().map(RTauOut::from),
        order: f.order(),
        truncated: f.is_truncated(),
        grid: GridOut { radii: grid.radii().to_vec(), angles_per_ring: grid.angles_per_ring(), points: grid.len() },
        tolerance,
        min_value: rep.min_value.is_finite().then_some(rep.min_value),
        witness: PointOut { re: rep.witness.re, im: rep.witness.im },
        pass: rep.pass,
        singular: rep.singular,
        evidence: if rep.pass { "no_violation_found" } else { "counterexample" },
    };
    let header = ["series", "class", "min_value", "witness_re", "witness_im", "pass", "singular", "points_checked"];
    let cells = |f: fn(f64) -> String| {
        vec![vec![
            out.series.to_owned(),
            out.class.to_owned(),
            f(rep.min_value),
            f(rep.witness.re),
            f(rep.witness.im),
            rep.pass.to_string(),
            rep.singular.to_string(),
            rep.points_checked.to_string(),
        ]]
    };
    let body = match cli.format {
        Format::Json => json(&out)?,
        Format::Csv => csv(&header, &cells(num))?,
        Format::Human => {
            let mut s = table(&header, &cells(sig17));
            s.push_str(if rep.pass {
                "no violation found on the grid\n"
            } else {
                "violation found at the witness point\n"
            });
            s
        }
    };
    Ok(Output { body, status: if rep.pass { EXIT_OK } else { EXIT_NOT_SATISFIED } })
}

#[derive(Serialize)]
struct ScanRowOut {
    criterion: &'static str,
    variant: &'static str,
    m: f64,
    xi: f64,
    gamma: f64,
    rho: f64,
    status: &'static str,
    /// The bracket end when `status` is `satisfied_for_all`, `null` on error.
    q_star: Option<f64>,
    iterations: Option<usize>,
    residual_margin: Option<f64>,
    error: Option<CliError>,
}

#[derive(Serialize)]
struct ScanOut {
    command: &'static str,
    criterion: &'static str,
    rtau: Option<RTauOut>,
    tol: f64,
    rows: Vec<ScanRowOut>,
}

fn scan_row(row: &ScanRow) -> ScanRowOut {
    let (status, q_star, iterations, residual_margin, error) = match &row.outcome {
        Ok(CriticalQ { q_star, iterations, residual_margin, status }) => (
            match status {
                QStarStatus::Interior => "interior",
                QStarStatus::SatisfiedForAll => "satisfied_for_all",
            },
            Some(*q_star),
            Some(*iterations),
            Some(*residual_margin),
            None,
        ),
        Err(e) => ("error", None, None, None, Some(CliError::from(e.clone()))),
    };
    ScanRowOut {
        criterion: row.criterion.label(),
        variant: row.variant.label(),
        m: row.m,
        xi: row.xi,
        gamma: row.gamma,
        rho: row.rho,
        status,
        q_star,
        iterations,
        residual_margin,
        error,
    }
}

fn scan_cmd(cli: &Cli, a: &ScanArgs) -> Result<Output, CliError> {
    let tol = positive_tol("tol", a.tol)?;
    let grid = ScanGrid {
        m: a.m.clone(),
        xi: a.xi.iter().map(|&x| angle(cli, x)).collect(),
        gamma: a.gamma.clone(),
        rho: a.rho.clone(),
    };
    let r = if a.criterion.needs_rtau() { Some(rtau_params(&a.rtau)?) } else { None };
    let per_variant: Vec<Vec<ScanRow>> = selected(a.variant)
        .into_iter()
        .map(|v| scan(a.criterion, v, &grid, r.as_ref(), tol))
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::with_capacity(grid.len() * per_variant.len());
    for i in 0..grid.len() {
        for v in &per_variant {
            rows.push(scan_row(&v[i]));
        }
    }
    let header = ["criterion", "variant", "m", "xi", "gamma", "rho", "q_star", "iterations", "residual_margin"];
    let cells = |f: fn(f64) -> String| -> Vec<Vec<String>> {
        rows.iter()
            .map(|r| {
                let q_star = match r.status {
                    "interior" => f(r.q_star.unwrap_or(f64::NAN)),
                    other => other.to_owned(),
                };
                vec![
                    r.criterion.to_owned(),
                    r.variant.to_owned(),
                    num(r.m),
                    num(r.xi),
                    num(r.gamma),
                    num(r.rho),
                    q_star,
                    r.iterations.map(|i| i.to_string()).unwrap_or_default(),
                    r.residual_margin.map(f).unwrap_or_default(),
                ]
            })
            .collect()
    };
    let body = match cli.format {
        Format::Json => json(&ScanOut {
            command: "scan",
            criterion: a.criterion.label(),
            rtau: r.as_ref().map(RTauOut::from),
            tol,
            rows,
        })?,
        Format::Csv => csv(&header, &cells(num))?,
        Format::Human => table(&header, &cells(sig17)),
    };
    Ok(ok(body))
}

#[derive(Serialize)]
struct SampleOut {
    m: f64,
    q: f64,
    xi: f64,
    gamma: f64,
    rho: f64,
    rtau: Option<RTauOut>,
}

#[derive(Serialize)]
struct SoundnessSummary {
    criterion: &'static str,
    samples: usize,
    passed: usize,
    /// Smallest functional minimum over the samples, `null` if singular.
    worst_min_value: Option<f64>,
    worst: Option<SampleOut>,
}

#[derive(Serialize)]
struct SoundnessOut {
    seed: u64,
    samples_per_criterion: usize,
    disk_tolerance: f64,
    results: Vec<SoundnessSummary>,
}

#[derive(Serialize)]
struct ReportOut {
    command: &'static str,
    threshold: f64,
    rtau: RTauOut,
    grid: CriterionGrid,
    summaries: Vec<SubjectSummary>,
    flagged_rows: Vec<DiscrepancyRow>,
    soundness: SoundnessOut,
}

fn summarize(id: CriterionId, outcomes: &[SoundnessOutcome]) -> SoundnessSummary {
    let worst = outcomes.iter().min_by(|a, b| a.report.min_value.total_cmp(&b.report.min_value));
    SoundnessSummary {
        criterion: id.label(),
        samples: outcomes.len(),
        passed: outcomes.iter().filter(|o| o.report.pass).count(),
        worst_min_value: worst.and_then(|o| o.report.min_value.is_finite().then_some(o.report.min_value)),
        worst: worst.map(|o| {
            let s = &o.sample;
            SampleOut {
                m: s.pascal.m(),
                q: s.pascal.q(),
                xi: s.class_params.xi(),
                gamma: s.class_params.gamma(),
                rho: s.class_params.rho(),
                rtau: s.rtau.as_ref().map(RTauOut::from),
            }
        }),
    }
}

fn report(cli: &Cli, a: &ReportArgs) -> Result<Output, CliError> {
    let threshold = positive_tol("tol", a.tol)?;
    let r = rtau_params(&a.rtau)?;
    let mut grid = CriterionGrid::default();
    let pick = |given: &[f64], slot: &mut Vec<f64>| {
        if !given.is_empty() {
            *slot = given.to_vec();
        }
    };
    pick(&a.m, &mut grid.m);
    pick(&a.q, &mut grid.q);
    pick(&a.xi.iter().map(|&x| angle(cli, x)).collect::<Vec<_>>(), &mut grid.xi);
    pick(&a.gamma, &mut grid.gamma);
    pick(&a.rho, &mut grid.rho);

    let rep = discrepancy_report(&grid, &r, threshold)?;
    let disk = DiskGrid::default();
    let mut results = Vec::new();
    if a.samples > 0 {
        for id in CriterionId::ALL {
            let outcomes = soundness_sweep(id, a.samples, a.seed, &disk, DEFAULT_TOLERANCE)?;
            results.push(summarize(id, &outcomes));
        }
    }
    let sound = results.iter().all(|s| s.passed == s.samples);
    let out = ReportOut {
        command: "discrepancy-report",
        threshold,
        rtau: (&r).into(),
        grid,
        summaries: rep.summaries,
        flagged_rows: rep.flagged_rows,
        soundness: SoundnessOut {
            seed: a.seed,
            samples_per_criterion: a.samples,
            disk_tolerance: DEFAULT_TOLERANCE,
            results,
        },
    };
    let body = match cli.format {
        Format::Json => json(&out)?,
        Format::Csv => {
            let header = [
                "subject",
                "m",
                "q",
                "xi",
                "gamma",
                "rho",
                "paper_lhs",
                "rederived_lhs",
                "direct_lhs",
                "paper_gap",
                "rederived_gap",
            ];
            let rows: Vec<Vec<String>> = out
                .flagged_rows
                .iter()
                .map(|r| {
                    let mut row = vec![r.subject.label().to_owned()];
                    row.extend(
                        [
                            r.m,
                            r.q,
                            r.xi,
                            r.gamma,
                            r.rho,
                            r.paper_lhs,
                            r.rederived_lhs,
                            r.direct_lhs,
                            r.paper_gap,
                            r.rederived_gap,
                        ]
                        .into_iter()
                        .map(num),
                    );
                    row
                })
                .collect();
            csv(&header, &rows)?
        }
        Format::Human => {
            let rows: Vec<Vec<String>> = out
                .summaries
                .iter()
                .map(|s| {
                    vec![
                        s.subject.label().to_owned(),
                        s.points.to_string(),
                        s.flagged.to_string(),
                        sig17(s.max_paper_gap),
                        sig17(s.max_rederived_gap),
                    ]
                })
                .collect();
            let mut s = table(&["subject", "points", "flagged", "max_paper_gap", "max_rederived_gap"], &rows);
            if !out.soundness.results.is_empty() {
                s.push('\n');
                let rows: Vec<Vec<String>> = out
                    .soundness
                    .results
                    .iter()
                    .map(|r| {
                        vec![
                            r.criterion.to_owned(),
                            format!("{}/{}", r.passed, r.samples),
                            r.worst_min_value.map(sig17).unwrap_or_else(|| "-inf".into()),
                        ]
                    })
                    .collect();
                s.push_str(&table(&["criterion", "disk_passed", "worst_min_value"], &rows));
            }
            s
        }
    };
    Ok(Output { body, status: if sound { EXIT_OK } else { EXIT_NOT_SATISFIED } })
}
