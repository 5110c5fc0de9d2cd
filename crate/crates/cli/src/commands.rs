//! One function per subcommand: parse, run, write the run directory.

use std::fmt::Write as _;
use std::path::Path;

use dioph_core::approx_functions::{dual, dual_asymptotic, kg_series_verdict, parse_function, partial_sum_diagnostic, ApproxFunction, SeriesKind};
use dioph_core::best_approx::{check_growth_props, compute_best_approx_with, sequence_csv, SequenceDoc};
use dioph_core::khintchine::{construct_eta as greedy_eta, construct_eta_from_indices, verify_construction};
use dioph_core::metric_lab::{
    asymptotic_directions, exceptional_test, measure_estimate_asymptotic, measure_estimate_uniform,
    measure_estimate_uniform_at, projection_measure_check, SampleConfig, Subspace,
};
use dioph_core::numerics::{parse_matrix_json, parse_rational, parse_scalar, MatrixNM, VectorN};
use dioph_core::report::ExperimentReport;
use dioph_core::transference::{cassels_solve_with, jarnik_uniform_check, minimal_admissible_q, JarnikCase};
use dioph_core::Error;
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{CliError, CliResult, RunDir};
use crate::{
    BestApproxArgs, Common, ConstructEtaArgs, DirectionsArgs, FunctionsArgs, JarnikCaseArg, MeasureArgs, MeasureMode,
    TransferArgs, TransferMode,
};

const SEQUENCE_SCHEMA: &str = "docs/schemas/sequence.v1.json";
const SEQUENCE_CSV: &str = "csv:sequence/1";
const REPORT_SCHEMA: &str = "docs/schemas/report.v1.json";
const CURVE_CSV: &str = "csv:curve/1";
const CERTIFICATE_SCHEMA: &str = "docs/schemas/certificate.v1.json";
const CONSTRUCTION_SCHEMA: &str = "docs/schemas/construction.v1.json";
const DIRECTIONS_SCHEMA: &str = "docs/schemas/directions.v1.json";
const FUNCTION_TABLE_CSV: &str = "csv:function-table/1";
const SERIES_SCHEMA: &str = "docs/schemas/series.v1.json";

fn parameters(common: &Common, args: &impl Serialize) -> Value {
    json!({"common": common, "command": args})
}

fn print_summary(v: Value) {
    println!("{}", serde_json::to_string(&v).expect("summary serializes"));
}

fn load_matrix(path: &Path, bits: u32) -> CliResult<MatrixNM> {
    if !path.exists() {
        return Err(CliError::validation(format!("matrix file not found: {}", path.display())));
    }
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(parse_matrix_json(&text, bits)?)
}

fn matrix_or_golden(path: Option<&Path>, bits: u32) -> CliResult<MatrixNM> {
    match path {
        Some(p) => load_matrix(p, bits),
        None => Ok(MatrixNM::scalar(parse_scalar("golden", bits)?)),
    }
}

fn parse_vector(text: &str, bits: u32) -> CliResult<VectorN> {
    let entries = text
        .split(',')
        .map(|s| parse_scalar(s.trim(), bits))
        .collect::<dioph_core::Result<Vec<_>>>()?;
    Ok(VectorN::new(entries)?)
}

fn write_report(run: &mut RunDir, r: &ExperimentReport) -> CliResult<()> {
    run.write("report.json", REPORT_SCHEMA, &r.to_json())?;
    if !r.curve.is_empty() {
        run.write("curve.csv", CURVE_CSV, &r.curve_csv())?;
    }
    Ok(())
}

pub fn best_approx(common: &Common, a: &BestApproxArgs, argv: &[String]) -> CliResult<()> {
    if a.tmax == 0 {
        return Err(CliError::validation("--tmax must be at least 1"));
    }
    let theta = load_matrix(&a.matrix, common.precision)?;
    let seq = compute_best_approx_with(&theta, a.tmax, common.budget)?;
    let mut run = RunDir::create(&common.out)?;
    run.write("sequence.csv", SEQUENCE_CSV, &sequence_csv(&seq))?;
    run.write("sequence.json", SEQUENCE_SCHEMA, &SequenceDoc::new(&seq).to_json())?;
    // Too short or trivially singular sequences have no lags to check.
    if let Ok(r) = check_growth_props(&seq) {
        run.write("growth.json", REPORT_SCHEMA, &r.to_json())?;
    }
    run.finish("best-approx", argv, parameters(common, a))?;
    print_summary(json!({
        "records": seq.len(),
        "last_norm": seq.records.last().map(|r| r.norm),
        "trivially_singular": seq.is_trivially_singular(),
        "witness": seq.trivially_singular_witness,
    }));
    Ok(())
}

pub fn transfer(common: &Common, a: &TransferArgs, argv: &[String]) -> CliResult<()> {
    let theta = load_matrix(&a.matrix, common.precision)?;
    let eta = parse_vector(&a.eta, common.precision)?;
    let mut run = RunDir::create(&common.out)?;
    match a.mode {
        TransferMode::Cassels => {
            let y = parse_rational(a.y_bound.as_deref().ok_or_else(|| CliError::validation("cassels mode needs --Y"))?)?;
            let q = match &a.q_bound {
                Some(q) => parse_rational(q)?,
                None => minimal_admissible_q(&theta, &y)?,
            };
            let cert = cassels_solve_with(&theta, &eta, &y, &q, common.budget)?;
            run.write("certificate.json", CERTIFICATE_SCHEMA, &cert.to_json())?;
            run.finish("transfer", argv, parameters(common, a))?;
            print_summary(json!({
                "witness_q": cert.witness_q,
                "achieved": cert.achieved.to_decimal(20),
                "conclusion_bound": cert.conclusion_bound.to_string(),
            }));
        }
        TransferMode::Jarnik => {
            let psi = parse_function(a.psi.as_deref().ok_or_else(|| CliError::validation("jarnik mode needs --psi"))?)?;
            let case = match a.case {
                JarnikCaseArg::AllLarge => JarnikCase::AllLarge,
                JarnikCaseArg::SampledUnbounded => JarnikCase::SampledUnbounded,
            };
            let r = jarnik_uniform_check(&theta, &eta, &psi, a.t_lo, a.t_hi, case)?;
            write_report(&mut run, &r)?;
            run.finish("transfer", argv, parameters(common, a))?;
            print_summary(json!({"status": r.status, "summary": r.summary}));
        }
    }
    Ok(())
}

pub fn construct_eta(common: &Common, a: &ConstructEtaArgs, argv: &[String]) -> CliResult<()> {
    if a.tmax == 0 {
        return Err(CliError::validation("--tmax must be at least 1"));
    }
    let theta = matrix_or_golden(a.matrix.as_deref(), common.precision)?;
    let phi = parse_function(&a.phi)?;
    let seq = compute_best_approx_with(&theta, a.tmax, common.budget)?;
    let c = match &a.indices {
        Some(ix) => construct_eta_from_indices(&seq, ix)?,
        None => greedy_eta(&seq, &phi, a.depth, a.gap)?,
    };
    let doc = c.to_json()?;
    let mut run = RunDir::create(&common.out)?;
    run.write_json("construction.json", CONSTRUCTION_SCHEMA, &doc)?;
    let holds = doc["invariants_status"] == "pass";
    let (zl, zh) = c.control_zone();
    let (lo, hi) = (a.t_lo.unwrap_or(zl), a.t_hi.unwrap_or(zh));
    let verification = verify_construction(&c, &phi, lo, hi);
    if let Ok(r) = &verification {
        run.write("verification.json", REPORT_SCHEMA, &r.to_json())?;
    }
    run.finish("construct-eta", argv, parameters(common, a))?;
    if !holds {
        // The construction's bounds are theorems; a failed check is a bug.
        return Err(Error::InternalContradiction("a construction invariant failed; see construction.json".into()).into());
    }
    let r = verification?;
    print_summary(json!({
        "indices": c.indices,
        "invariants_status": doc["invariants_status"],
        "control_zone": [zl, zh],
        "ratio": r.get("ratio"),
    }));
    Ok(())
}

fn sample_config(common: &Common, a: &MeasureArgs, dim: usize) -> CliResult<SampleConfig> {
    let mut cfg = match &a.basis {
        Some(b) => {
            let basis = b
                .split(';')
                .map(|v| {
                    v.split(',')
                        .map(|x| x.trim().parse::<f64>().map_err(|e| CliError::validation(format!("basis entry {x:?}: {e}"))))
                        .collect::<CliResult<Vec<f64>>>()
                })
                .collect::<CliResult<Vec<_>>>()?;
            let anchor = a.center.clone().unwrap_or_else(|| vec![0.0; dim]);
            SampleConfig::on_subspace(common.seed, a.samples, a.radius, Subspace { anchor, basis })
        }
        None => {
            let mut c = SampleConfig::torus(dim, common.seed, a.samples);
            c.radius = a.radius;
            if let Some(center) = &a.center {
                c.center = center.clone();
            }
            c
        }
    };
    cfg.budget = common.budget;
    Ok(cfg)
}

pub fn measure(common: &Common, a: &MeasureArgs, argv: &[String]) -> CliResult<()> {
    if a.samples == 0 {
        return Err(CliError::validation("--samples must be at least 1"));
    }
    let theta = matrix_or_golden(a.matrix.as_deref(), common.precision)?;
    let cfg = sample_config(common, a, theta.n())?;
    let g = || -> CliResult<ApproxFunction> {
        Ok(parse_function(a.g.as_deref().ok_or_else(|| CliError::validation("this mode needs --g"))?)?)
    };
    let r = match a.mode {
        MeasureMode::Uniform => match &a.checkpoints {
            Some(pts) => measure_estimate_uniform_at(&theta, &g()?, a.t_lo, pts, &cfg)?,
            None => measure_estimate_uniform(&theta, &g()?, a.t_lo, a.t_hi, &cfg)?,
        },
        MeasureMode::Asymptotic => measure_estimate_asymptotic(&theta, &g()?, a.t_hi, a.k_min, &cfg)?,
        MeasureMode::Projection => {
            let u = a.u.as_ref().ok_or_else(|| CliError::validation("projection mode needs --u"))?;
            projection_measure_check(&cfg, &VectorN::from_ints(u)?, a.sigma)?
        }
    };
    let mut run = RunDir::create(&common.out)?;
    write_report(&mut run, &r)?;
    run.finish("measure", argv, parameters(common, a))?;
    print_summary(json!({"status": r.status, "summary": r.summary}));
    Ok(())
}

pub fn directions(common: &Common, a: &DirectionsArgs, argv: &[String]) -> CliResult<()> {
    if a.tmax == 0 {
        return Err(CliError::validation("--tmax must be at least 1"));
    }
    let theta = matrix_or_golden(a.matrix.as_deref(), common.precision)?;
    let seq = compute_best_approx_with(&theta, a.tmax, common.budget)?;
    let d = asymptotic_directions(&seq, a.tail, a.tol)?;
    let mut run = RunDir::create(&common.out)?;
    run.write_json("directions.json", DIRECTIONS_SCHEMA, &serde_json::to_value(&d).expect("directions serialize"))?;
    let mut summary = json!({"clusters": d.directions.len(), "tail_records": d.tail_records});
    if let Some(v) = &a.exceptional {
        let v = parse_vector(&v.join(","), common.precision)?;
        let r = exceptional_test(&v, &seq, a.xi, a.delta)?;
        run.write("exceptional.json", REPORT_SCHEMA, &r.to_json())?;
        summary["exceptional_count"] = r.get("count").cloned().unwrap_or(Value::Null);
    }
    run.finish("directions", argv, parameters(common, a))?;
    print_summary(summary);
    Ok(())
}

fn cell(x: dioph_core::Result<f64>) -> String {
    match x {
        Ok(v) => format!("{v:.16e}"),
        Err(_) => "NA".into(),
    }
}

fn verdict_json(f: &ApproxFunction, which: SeriesKind, n_max: u64) -> Value {
    match kg_series_verdict(f, which) {
        Ok(v) => {
            let diag = partial_sum_diagnostic(f, which, n_max).ok();
            json!({
                "verdict": v,
                "partial_sums_consistent": diag.as_ref().map(|d| d.passed()),
                "partial_sums": diag.map(|d| serde_json::to_value(&d).expect("report serializes")),
            })
        }
        Err(e) => json!({"verdict": Value::Null, "reason": e.to_string()}),
    }
}

pub fn functions(common: &Common, a: &FunctionsArgs, argv: &[String]) -> CliResult<()> {
    if !(a.t_min > 0.0 && a.t_max > a.t_min && a.t_max.is_finite()) {
        return Err(CliError::validation("need 0 < --t-min < --t-max"));
    }
    if a.points < 2 {
        return Err(CliError::validation("--points must be at least 2"));
    }
    let f = parse_function(&a.f)?;
    let g = dual(&f);
    let mut csv = String::from(
        "# float64 columns in 17 significant digits; g by monotone bisection at relative tolerance 1e-12; g_asym is the closed dual form\n",
    );
    csv.push_str(if a.dual { "T,f,g,g_asym,g_over_g_asym\n" } else { "T,f\n" });
    let step = (a.t_max / a.t_min).ln() / (a.points - 1) as f64;
    for i in 0..a.points {
        let t = if i + 1 == a.points { a.t_max } else { a.t_min * (step * i as f64).exp() };
        let _ = write!(csv, "{t:.16e},{}", cell(f.eval_f64(t)));
        if a.dual {
            let gv = g.eval_f64(t);
            let ga = dual_asymptotic(&f, t);
            let q = match (&gv, &ga) {
                (Ok(x), Ok(y)) => Ok(x / y),
                _ => Err(Error::Unsupported("no closed form".into())),
            };
            let _ = write!(csv, ",{},{},{}", cell(gv), cell(ga), cell(q));
        }
        csv.push('\n');
    }
    let series = json!({
        "function": f.to_json(),
        "dual": g.to_json(),
        "khintchine_groshev": verdict_json(&f, SeriesKind::KhintchineGroshev, a.series_n),
        "kleinbock_wadleigh": verdict_json(&g, SeriesKind::KleinbockWadleigh, a.series_n),
    });
    let mut run = RunDir::create(&common.out)?;
    run.write("table.csv", FUNCTION_TABLE_CSV, &csv)?;
    run.write_json("series.json", SERIES_SCHEMA, &series)?;
    run.finish("functions", argv, parameters(common, a))?;
    print_summary(json!({
        "rows": a.points,
        "khintchine_groshev": series["khintchine_groshev"]["verdict"],
        "kleinbock_wadleigh": series["kleinbock_wadleigh"]["verdict"],
    }));
    Ok(())
}
