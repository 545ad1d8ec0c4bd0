//! The subcommands, as library functions writing into an output directory.

use std::fs;
use std::path::{Path, PathBuf};

use angular_qudit_core::interference::fringe_grid;
use angular_qudit_core::{
    adaptive_measurement_set, embed_pathway_state, expectation_values, logarithmic_negativity,
    negativity_lower_bound, oam_projectors, pathway_to_oam, slm_capacity, tomographically_complete_set,
    verify_certificate, visibility_from_fringes, CMatrix, Complex64, DensityMatrix, FringeGrid,
    MeasurementOperator, RateNormalization, SlmSpec, SolverConfig, SolverStatus,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::formats::{CertificateJson, DensityJson, FringeTable, Metadata, GENERATOR};
use crate::scenario::{Case, Embedding, FileFormat, MeasurementKind, Scenario, WitnessSpec};

/// Files written and text for the terminal.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub report: Vec<String>,
    pub warnings: Vec<String>,
}

fn write_file(out: &Path, name: &str, contents: &str, outcome: &mut Outcome) -> CliResult<()> {
    fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let path = out.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    outcome.files.push(path);
    Ok(())
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("summary serializes") + "\n"
}

fn float(x: f64) -> String {
    format!("{x:?}")
}

/// Full parameter set of one case, for file headers.
pub fn case_metadata(scenario: &Scenario, case: &Case) -> Metadata {
    let mut m = Metadata::default();
    let st = &scenario.state;
    m.push("scenario", &scenario.name);
    m.push("N", scenario.mask.slits);
    m.push("M", scenario.idler_slits());
    m.push("alpha", scenario.mask.alpha.expr());
    m.push("alpha_rad", float(scenario.mask.alpha.value()));
    m.push("beta", case.beta.expr());
    m.push("beta_rad", float(case.beta.value()));
    m.push("V", float(st.visibility));
    m.push("theta", case.phase.expr());
    m.push("theta_rad", float(case.phase.value()));
    m.push("model", st.model.as_str());
    m.push("convention", st.convention.as_str());
    match &st.weights {
        None => m.push("weights", "uniform"),
        Some(w) => m.push(
            "weights",
            w.iter().map(|x| float(*x)).collect::<Vec<_>>().join(";"),
        ),
    }
    m.push("spectrum", scenario.spectrum.kind.as_str());
    m.push("L", scenario.spectrum.truncation);
    if let Some(sigma) = scenario.spectrum.sigma {
        m.push("sigma", float(sigma));
    }
    if let Some(norm) = case.normalization {
        match norm {
            RateNormalization::PeakNormalized => m.push("normalization", "peak"),
            RateNormalization::Raw {
                normalization_constant,
            } => {
                m.push("normalization", "raw");
                m.push("C", float(normalization_constant));
            }
        }
    }
    m
}

#[derive(Debug, Serialize)]
struct RowSummary {
    l_i: i64,
    peak_l_s: i64,
    peak_rate: f64,
    /// Cycles per unit of `l_s`, from the envelope-corrected row.
    fringe_frequency: Option<f64>,
    fringe_period: Option<f64>,
}

#[derive(Debug, Serialize)]
struct CaseSummary {
    file: String,
    beta: String,
    theta: String,
    visibility_estimate: f64,
    flat: bool,
    rows: Vec<RowSummary>,
}

#[derive(Debug, Serialize)]
struct SimulateSummary {
    generator: &'static str,
    scenario: String,
    cases: Vec<CaseSummary>,
}

/// Builds the fringe grid of every case of a scenario with a scan section.
pub fn fringe_grids(scenario: &Scenario) -> CliResult<Vec<(Case, FringeGrid)>> {
    let scan = scenario
        .scan
        .as_ref()
        .ok_or_else(|| CliError::validation("`scan`: the scenario has no scan section"))?;
    let cases = scenario.cases()?;
    let [lo, hi] = scan.l_s;
    cases
        .into_iter()
        .map(|case| {
            let norm = case.normalization.expect("scan cases carry a normalization");
            let grid = fringe_grid(
                &case.state,
                &case.mask_s,
                &case.mask_i,
                &case.spectrum,
                &scan.l_i,
                lo..=hi,
                norm,
            )?;
            if let Some(bad) = grid.rates.iter().find(|r| !r.is_finite() || **r < 0.0) {
                return Err(CliError::Numerical(format!(
                    "case{}: rate {bad} is not a finite non-negative number",
                    case.suffix
                )));
            }
            Ok((case, grid))
        })
        .collect()
}

pub fn simulate(scenario: &Scenario, out: &Path, format: Option<FileFormat>) -> CliResult<Outcome> {
    let format = format.or(scenario.outputs.format).unwrap_or(FileFormat::Csv);
    let grids = fringe_grids(scenario)?;
    let mut outcome = Outcome::default();
    let mut cases = Vec::new();
    for (case, grid) in &grids {
        let table = FringeTable::new(case_metadata(scenario, case), grid);
        let (name, text) = match format {
            FileFormat::Csv => (format!("{}{}.csv", scenario.stem(), case.suffix), table.to_csv()),
            FileFormat::Json => (
                format!("{}{}.json", scenario.stem(), case.suffix),
                table.to_json(),
            ),
        };
        write_file(out, &name, &text, &mut outcome)?;
        let vis = visibility_from_fringes(grid);
        let rows: Vec<RowSummary> = (0..grid.rows())
            .map(|r| {
                let (peak_l_s, peak_rate) = grid.peak(r);
                let f = grid.fringe_frequency(r).ok();
                RowSummary {
                    l_i: grid.l_i[r],
                    peak_l_s,
                    peak_rate,
                    fringe_frequency: f,
                    fringe_period: f.map(|f| 1.0 / f),
                }
            })
            .collect();
        outcome.report.push(format!(
            "{name}: beta={} theta={} V_est={:.6}{}",
            case.beta,
            case.phase,
            vis.visibility,
            if vis.flat { " (flat)" } else { "" }
        ));
        for row in &rows {
            let period = row.fringe_period.map_or("n/a".to_string(), |p| format!("{p:.4}"));
            outcome.report.push(format!(
                "  l_i={}: peak at l_s={} (rate {:.6e}), fringe period {period}",
                row.l_i, row.peak_l_s, row.peak_rate
            ));
        }
        cases.push(CaseSummary {
            file: name,
            beta: case.beta.to_string(),
            theta: case.phase.to_string(),
            visibility_estimate: vis.visibility,
            flat: vis.flat,
            rows,
        });
    }
    let summary = SimulateSummary {
        generator: GENERATOR,
        scenario: scenario.name.clone(),
        cases,
    };
    write_file(
        out,
        &format!("{}_summary.json", scenario.stem()),
        &to_pretty(&summary),
        &mut outcome,
    )?;
    Ok(outcome)
}

pub fn export_density(scenario: &Scenario, out: &Path, format: Option<FileFormat>) -> CliResult<Outcome> {
    let format = format.or(scenario.outputs.format).unwrap_or(FileFormat::Json);
    let cases = scenario.cases()?;
    let mut outcome = Outcome::default();
    for case in &cases {
        let mut meta = case_metadata(scenario, case);
        meta.push("purity", float(case.state.purity()));
        let json = DensityJson::new(meta, &case.state);
        let stem = format!("{}{}_density", scenario.stem(), case.suffix);
        write_file(out, &format!("{stem}.json"), &json.to_json(), &mut outcome)?;
        if format == FileFormat::Csv {
            write_file(
                out,
                &format!("{stem}_real.csv"),
                &json.part_csv(false),
                &mut outcome,
            )?;
            write_file(
                out,
                &format!("{stem}_imag.csv"),
                &json.part_csv(true),
                &mut outcome,
            )?;
        }
        outcome.report.push(format!(
            "{stem}: dim {}, theta={}, purity {:.6}",
            case.state.dim(),
            case.phase,
            case.state.purity()
        ));
    }
    Ok(outcome)
}

/// Witness state of one case on the truncated OAM basis.
pub fn witness_state(case: &Case, w: &WitnessSpec) -> CliResult<DensityMatrix> {
    let result = match w.embedding {
        Embedding::Direct => embed_pathway_state(&case.state, w.l_max),
        Embedding::Diffraction => {
            pathway_to_oam(&case.state, &case.mask_s, &case.mask_i, &case.spectrum, w.l_max).map(|e| e.state)
        }
    };
    result.map_err(|e| match e {
        angular_qudit_core::Error::NumericalInconsistency { .. } => CliError::from(e),
        _ => CliError::validation(format!("`witness.embedding`: {e}")),
    })
}

/// Measurement operators of the configured kind for `state`.
pub fn measurement_set(
    state: &DensityMatrix,
    w: &WitnessSpec,
    seed: u64,
) -> CliResult<Vec<MeasurementOperator>> {
    let dims = state.bipartition().expect("witness states are bipartite");
    let l = w.l_max;
    let ops = match w.measurements {
        MeasurementKind::Complete => tomographically_complete_set(dims),
        MeasurementKind::Diagonal => {
            let pairs: Vec<(i64, i64)> = (-l..=l).flat_map(|ls| (-l..=l).map(move |li| (ls, li))).collect();
            oam_projectors(l, &pairs)?
        }
        MeasurementKind::Adaptive => {
            let d = state.dim();
            let probabilities: Vec<f64> = (0..d).map(|k| state.entry(k, k).re).collect();
            adaptive_measurement_set(l, &probabilities, w.top_k)?
        }
        MeasurementKind::Random => random_local_projectors(dims, w.count.unwrap_or(0), seed)?,
    };
    Ok(ops)
}

fn random_unit_vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..d)
            .map(|_| {
                let (u1, u2): (f64, f64) = (rng.gen_range(f64::EPSILON..1.0), rng.gen());
                let r = (-2.0 * u1.ln()).sqrt();
                let t = std::f64::consts::TAU * u2;
                Complex64::new(r * t.cos(), r * t.sin())
            })
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Products of Haar-random local rank-one projectors.
pub fn random_local_projectors(
    dims: (usize, usize),
    count: usize,
    seed: u64,
) -> CliResult<Vec<MeasurementOperator>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let a = random_unit_vector(&mut rng, dims.0);
            let b = random_unit_vector(&mut rng, dims.1);
            let pa = CMatrix::outer(&a, &a).hermitian_part();
            let pb = CMatrix::outer(&b, &b).hermitian_part();
            Ok(MeasurementOperator::product(&pa, &pb, format!("R{k}"))?)
        })
        .collect()
}

/// How far a certified bound may sit above the exact value of the state
/// the data came from before it counts as a numerical failure.
const SOUNDNESS_SLACK: f64 = 1e-6;

#[derive(Debug, Serialize)]
struct WitnessCaseSummary {
    file: String,
    beta: String,
    theta: String,
    dims: [usize; 2],
    embedding: &'static str,
    measurement_set: &'static str,
    measurements: usize,
    status: &'static str,
    iterations: usize,
    bound: f64,
    objective: f64,
    /// Log negativity of the state the data were taken from.
    exact_log_negativity: f64,
    verified: bool,
    warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
struct WitnessSummary {
    generator: &'static str,
    scenario: String,
    cases: Vec<WitnessCaseSummary>,
}

pub fn witness(scenario: &Scenario, out: &Path, seed: u64) -> CliResult<Outcome> {
    let w = scenario
        .witness
        .as_ref()
        .ok_or_else(|| CliError::validation("`witness`: the scenario has no witness section"))?;
    let cases = scenario.cases()?;
    let mut prepared = Vec::with_capacity(cases.len());
    for case in cases {
        let state = witness_state(&case, w)?;
        let ops = measurement_set(&state, w, seed)?;
        prepared.push((case, state, ops));
    }
    let cfg = SolverConfig {
        tolerance: w.tolerance,
        max_iterations: w.max_iterations,
        ..SolverConfig::default()
    };
    let mut outcome = Outcome::default();
    let mut summaries = Vec::new();
    for (case, state, ops) in &prepared {
        let data = expectation_values(state, ops)?;
        let cert = negativity_lower_bound(ops, &data, &cfg)?;
        let check = verify_certificate(&cert, ops, &data, w.verify_tolerance);
        let name = format!("{}{}_certificate.json", scenario.stem(), case.suffix);
        if !check.passed {
            return Err(CliError::Verification(format!(
                "{name}: {}",
                check.problems.join("; ")
            )));
        }
        let mut warnings = Vec::new();
        if w.measurements == MeasurementKind::Diagonal {
            warnings.push(
                "diagonal OAM projectors alone are reproduced by the dephased, separable state; \
                 no entanglement can be certified from them"
                    .to_string(),
            );
        }
        match cert.status {
            SolverStatus::Optimal => {}
            SolverStatus::Feasible => {
                warnings.push("solver did not fully converge; bound is valid but may be loose".into())
            }
            SolverStatus::MaxIterations => warnings.push(format!(
                "solver hit the iteration limit ({}); bound is valid but may be loose",
                w.max_iterations
            )),
            SolverStatus::Infeasible => {
                warnings.push("measurement data are inconsistent with any state".into())
            }
        }
        let exact = logarithmic_negativity(state)?;
        if cert.bound > exact + SOUNDNESS_SLACK {
            return Err(CliError::Numerical(format!(
                "{name}: certified bound {} exceeds the exact log negativity {exact} of the source state",
                cert.bound
            )));
        }
        write_file(
            out,
            &name,
            &CertificateJson::new(&cert, ops, &data).to_json(),
            &mut outcome,
        )?;
        outcome.report.push(format!(
            "{name}: bound {:.6} (exact {:.6}), status {}, {} iterations, {} measurements",
            cert.bound,
            exact,
            cert.status.as_str(),
            cert.iterations,
            ops.len()
        ));
        outcome
            .warnings
            .extend(warnings.iter().map(|m| format!("{name}: {m}")));
        summaries.push(WitnessCaseSummary {
            file: name,
            beta: case.beta.to_string(),
            theta: case.phase.to_string(),
            dims: [cert.dims.0, cert.dims.1],
            embedding: match w.embedding {
                Embedding::Direct => "direct",
                Embedding::Diffraction => "diffraction",
            },
            measurement_set: w.measurements.as_str(),
            measurements: ops.len(),
            status: cert.status.as_str(),
            iterations: cert.iterations,
            bound: cert.bound,
            objective: cert.objective,
            exact_log_negativity: exact,
            verified: check.passed,
            warnings,
        });
    }
    let summary = WitnessSummary {
        generator: GENERATOR,
        scenario: scenario.name.clone(),
        cases: summaries,
    };
    write_file(
        out,
        &format!("{}_witness_summary.json", scenario.stem()),
        &to_pretty(&summary),
        &mut outcome,
    )?;
    Ok(outcome)
}

#[derive(Debug, Serialize)]
struct CapacityJson {
    generator: &'static str,
    pixel_diameter: f64,
    pixel_size_um: f64,
    alpha_min: f64,
    beta: f64,
    n_max: u64,
    d_max: u64,
}

pub fn slm_capacity_report(
    pixel_diameter: f64,
    pixel_size_um: f64,
    out: Option<&Path>,
    format: Option<FileFormat>,
) -> CliResult<Outcome> {
    let spec =
        SlmSpec::new(pixel_diameter, pixel_size_um).map_err(|e| CliError::validation(e.to_string()))?;
    let cap = slm_capacity(&spec);
    let mut outcome = Outcome::default();
    outcome.report.push(format!(
        "alpha_min = {:.6} rad, N_max = {}, D_max = {}",
        cap.alpha_min, cap.n_max, cap.d_max
    ));
    if let Some(out) = out {
        let json = CapacityJson {
            generator: GENERATOR,
            pixel_diameter,
            pixel_size_um,
            alpha_min: cap.alpha_min,
            beta: cap.beta,
            n_max: cap.n_max,
            d_max: cap.d_max,
        };
        match format.unwrap_or(FileFormat::Json) {
            FileFormat::Json => write_file(out, "slm_capacity.json", &to_pretty(&json), &mut outcome)?,
            FileFormat::Csv => {
                let text = format!(
                    "# generator={GENERATOR}\npixel_diameter,pixel_size_um,alpha_min,beta,n_max,d_max\n{},{},{},{},{},{}\n",
                    float(pixel_diameter),
                    float(pixel_size_um),
                    float(cap.alpha_min),
                    float(cap.beta),
                    cap.n_max,
                    cap.d_max
                );
                write_file(out, "slm_capacity.csv", &text, &mut outcome)?
            }
        }
    }
    Ok(outcome)
}

/// Re-checks a certificate file; fails with a verification error.
pub fn verify_certificate_file(path: &Path, tolerance: f64) -> CliResult<Outcome> {
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(CliError::validation("`tolerance`: must lie in (0, 1)"));
    }
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let (cert, ops, data) = CertificateJson::from_json(&text)?.decode()?;
    let check = verify_certificate(&cert, &ops, &data, tolerance);
    if !check.passed {
        return Err(CliError::Verification(format!(
            "{}: {}",
            path.display(),
            check.problems.join("; ")
        )));
    }
    let mut outcome = Outcome::default();
    outcome.report.push(format!(
        "{}: certificate valid, bound {:.6} from {} measurements (||H|| = {:.3e}, min slack eigenvalue {:.3e})",
        path.display(),
        cert.bound,
        ops.len(),
        check.operator_norm,
        check.min_slack_eigenvalue
    ));
    Ok(outcome)
}
