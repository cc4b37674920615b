use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use serde_json::{json, Value};
use way_core::bounds::{
    bound_report, difference_form_minimum, divisions_within, optimal_probe_distribution,
    optimal_probe_state, ratio_and_cv, ratio_of_distribution, simplex_grid_minimize,
    simplex_grid_size, BOUND_SLACK,
};
use way_core::ensemble::{run_suite_on, SuiteConfig};
use way_core::linalg::{operator_modulus, spectral_decompose};
use way_core::measurement::report_states;
use way_core::models::{random_model_ensemble, DimChoice, EnsembleSpec, ModelChecks, Observed};
use way_core::{ComplexMatrix, Execution, LawKind, StateVector, Tolerances, WayError};

use crate::report::{fmt_num, sha256_hex, CheckResult, Measurement, ReportBody};
use crate::schema::{LoadedModel, ModelFile};

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalOpts {
    pub tol: Option<f64>,
    pub seed: u64,
}

struct Input {
    loaded: LoadedModel,
    checksum: String,
}

fn load(path: &Path, opts: &GlobalOpts) -> Result<Input> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let text =
        std::str::from_utf8(&bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    let file = ModelFile::parse(text).with_context(|| format!("{}", path.display()))?;
    let loaded = file
        .build(opts.tol)
        .with_context(|| format!("{}", path.display()))?;
    Ok(Input {
        loaded,
        checksum: sha256_hex(&bytes),
    })
}

fn states_of(loaded: &LoadedModel, seed: u64) -> Vec<StateVector> {
    if loaded.states.is_empty() {
        report_states(loaded.model.process.dim_h(), seed)
    } else {
        loaded.states.clone()
    }
}

fn number_list(xs: &[f64]) -> Value {
    Value::Array(
        xs.iter()
            .map(|&x| fmt_num(x).map_or(Value::Null, Value::String))
            .collect(),
    )
}

fn num(x: f64) -> Value {
    fmt_num(x).map_or(Value::Null, Value::String)
}

fn flag_text(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

pub fn validate(path: &Path, opts: &GlobalOpts) -> Result<ReportBody> {
    let Input { loaded, checksum } = load(path, opts)?;
    let model = &loaded.model;
    let tol = loaded.tol;
    let states = states_of(&loaded, opts.seed);
    let checks = ModelChecks::run_on(
        &model.process,
        &model.observable,
        &model.conserved,
        &tol,
        &states,
    )?;

    let mut body = ReportBody::new("validate", opts.seed);
    body.model = Some(model.name.clone());
    body.model_checksum = Some(checksum);

    for outcome in checks.evaluate(&model.expected) {
        let e = &outcome.expectation;
        let name = format!("expect:{}", e.key);
        let mut row = match (e.expected, outcome.observed) {
            (way_core::models::Expected::Value { value, tolerance }, Some(Observed::Value(v))) => {
                CheckResult {
                    name,
                    value: fmt_num(v),
                    tolerance: fmt_num(tolerance),
                    pass: outcome.pass,
                    detail: format!("expected {}", fmt_num(value).unwrap_or_default()),
                }
            }
            (way_core::models::Expected::Flag(want), Some(Observed::Flag(got))) => {
                CheckResult::flag(
                    name,
                    outcome.pass,
                    format!("expected {}, observed {}", flag_text(want), flag_text(got)),
                )
            }
            (_, None) => bail!("unknown expectation key `{}`", e.key),
            _ => CheckResult::flag(name, false, "expectation type does not match the check"),
        };
        if !e.note.is_empty() {
            row.detail = format!("{}; {}", row.detail, e.note);
        }
        body.checks.push(row);
    }
    body.checks.push(CheckResult::at_most(
        "povm_normalization",
        checks.povm_normalization,
        tol.validation,
    ));
    for (i, r) in checks.pairs.iter().enumerate() {
        let detail = match &r.verdict {
            way_core::Verdict::Consistent => "CONSISTENT".to_string(),
            way_core::Verdict::TheoremViolation(v) => {
                format!("THEOREM_VIOLATION: {}", v.join("; "))
            }
        };
        body.checks.push(CheckResult::flag(
            format!("pair{i}.verdict"),
            r.verdict.is_consistent(),
            detail,
        ));
    }

    let m = &mut body.measurements;
    m.push(Measurement::flag("precise", checks.precise));
    m.push(Measurement::number(
        "max_basis_noise",
        checks.max_basis_noise,
    ));
    m.push(Measurement::flag("nondisturbing", checks.nondisturbing));
    m.push(Measurement::number(
        "max_basis_disturbance",
        checks.max_basis_disturbance,
    ));
    m.push(Measurement::flag("araki_yanase", checks.araki_yanase));
    if let Some(res) = checks.araki_yanase_residual {
        m.push(Measurement::number("araki_yanase_residual", res));
    }
    m.push(Measurement::flag("repeatable", checks.repeatable));
    m.push(Measurement::number(
        "repeatability_deviation",
        checks.repeatability_deviation,
    ));
    m.push(Measurement::count("states", states.len()));
    for (i, r) in checks.pairs.iter().enumerate() {
        let p = format!("pair{i}");
        m.push(Measurement::text(format!("{p}.kind"), r.kind.as_str()));
        m.push(Measurement::flag(format!("{p}.conserved"), r.conserved));
        m.push(Measurement::number(
            format!("{p}.conservation_residual"),
            r.conservation_residual,
        ));
        m.push(Measurement::flag(format!("{p}.yanase"), r.yanase));
        m.push(Measurement::number(
            format!("{p}.yanase_residual"),
            r.yanase_residual,
        ));
        m.push(Measurement::number(
            format!("{p}.commutator_a_l1"),
            r.commutator_a_l1,
        ));
        m.push(Measurement::number(
            format!("{p}.commutator_a_abs_l1"),
            r.commutator_a_abs_l1,
        ));
        m.push(Measurement::number(
            format!("{p}.l2_min_abs_eigenvalue"),
            r.l2_min_abs_eigenvalue,
        ));
        m.push(Measurement::flag(
            format!("{p}.l2_invertible"),
            r.l2_invertible,
        ));
        if let Some(id) = r.identity_residual {
            m.push(Measurement::number(
                format!("{p}.identity_residual"),
                id.modulus_form,
            ));
        }
    }
    Ok(body.finish())
}

pub fn bound(path: &Path, psi: Option<usize>, opts: &GlobalOpts) -> Result<ReportBody> {
    let Input { loaded, checksum } = load(path, opts)?;
    let model = &loaded.model;
    let tol = loaded.tol;
    let pairs: Vec<usize> = (0..model.conserved.len())
        .filter(|&i| model.conserved[i].kind() == LawKind::Multiplicative)
        .collect();
    ensure!(
        !pairs.is_empty(),
        "model has no multiplicative conserved pair"
    );
    let all_states = states_of(&loaded, opts.seed);
    let selected: Vec<(usize, StateVector)> = match psi {
        Some(j) => {
            ensure!(
                j < all_states.len(),
                "--psi {j} out of range: {} states available",
                all_states.len()
            );
            vec![(j, all_states[j].clone())]
        }
        None => all_states.into_iter().enumerate().collect(),
    };

    let mut body = ReportBody::new("bound", opts.seed);
    body.model = Some(model.name.clone());
    body.model_checksum = Some(checksum);

    for &i in &pairs {
        let c = &model.conserved[i];
        let mut general = f64::INFINITY;
        let mut yanase: Option<f64> = None;
        let mut hr = f64::INFINITY;
        let mut applicable = true;
        for (j, psi) in &selected {
            match bound_report(&model.process, &model.observable, c, psi, &tol) {
                Ok(r) => {
                    general = general.min(r.general_margin());
                    hr = hr.min(r.hr_margin());
                    if let Some(y) = r.yanase_margin() {
                        yanase = Some(yanase.map_or(y, |x| x.min(y)));
                    }
                    body.rows.push(json!({
                        "pair": i,
                        "psi": j,
                        "epsilon_sq": num(r.epsilon_sq),
                        "rhs_general": num(r.rhs_general),
                        "rhs_yanase": r.rhs_yanase.map_or(Value::Null, num),
                        "ratio_r": num(r.ratio_r),
                        "cv": num(r.cv),
                        "kernel": false,
                        "pass": !r.is_violation(),
                    }));
                }
                Err(WayError::KernelState) => {
                    body.rows
                        .push(json!({ "pair": i, "psi": j, "kernel": true, "pass": true }));
                }
                Err(WayError::ConservationViolated { residual }) => {
                    body.checks.push(
                        CheckResult::at_most(
                            format!("pair{i}.modulus_conservation"),
                            residual,
                            tol.validation,
                        )
                        .with_detail("|L1|⊗|L2| does not commute with U; bounds do not apply"),
                    );
                    applicable = false;
                    break;
                }
                Err(e) => return Err(e.into()),
            }
        }
        if !applicable {
            continue;
        }
        if general.is_finite() {
            body.checks.push(CheckResult::nonnegative(
                format!("pair{i}.general_bound"),
                general,
                BOUND_SLACK,
            ));
            body.checks.push(CheckResult::nonnegative(
                format!("pair{i}.heisenberg_robertson"),
                hr,
                BOUND_SLACK,
            ));
        }
        if let Some(y) = yanase {
            body.checks.push(CheckResult::nonnegative(
                format!("pair{i}.yanase_bound"),
                y,
                BOUND_SLACK,
            ));
        }
    }
    let kernel_rows = body
        .rows
        .iter()
        .filter(|r| r["kernel"] == Value::Bool(true))
        .count();
    body.measurements
        .push(Measurement::count("states", selected.len()));
    body.measurements
        .push(Measurement::count("kernel_rows", kernel_rows));
    Ok(body.finish())
}

#[derive(Debug, Clone)]
pub struct EnsembleArgs {
    pub dims: DimChoice,
    pub count: usize,
    pub yanase: bool,
    pub states: usize,
    pub export: Option<PathBuf>,
}

pub fn ensemble(args: &EnsembleArgs, opts: &GlobalOpts) -> Result<ReportBody> {
    let mut tol = Tolerances::default();
    if let Some(v) = opts.tol {
        tol.validation = v;
    }
    ensure!(tol.is_valid(), "--tol must be positive and finite");
    let spec = EnsembleSpec {
        dims: args.dims,
        count: args.count,
        seed: opts.seed,
        yanase: args.yanase,
        invertible_l2: true,
    };
    let mut config = SuiteConfig::new(spec);
    config.states_per_model = args.states;
    let models = random_model_ensemble(&spec, Execution::Parallel);
    if let Some(dir) = &args.export {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        for (i, m) in models.iter().enumerate() {
            let path = dir.join(format!("model-{i:04}.json"));
            fs::write(&path, ModelFile::from_named(m, &[]).to_pretty_json())
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
    }
    let summary = run_suite_on(&models, &config, &tol, Execution::Parallel)?;

    let mut body = ReportBody::new("ensemble", opts.seed);
    body.checks.push(
        CheckResult::flag("violations", summary.violations.is_empty(), "")
            .with_detail(format!("{} violations", summary.violations.len())),
    );
    if summary.models > 0 {
        body.checks.push(CheckResult::nonnegative(
            "general_bound",
            summary.min_general_margin,
            config.bound_slack,
        ));
        if summary.min_yanase_margin.is_finite() {
            body.checks.push(CheckResult::nonnegative(
                "yanase_bound",
                summary.min_yanase_margin,
                config.bound_slack,
            ));
        }
        body.checks.push(CheckResult::nonnegative(
            "heisenberg_robertson",
            summary.min_hr_margin,
            config.bound_slack,
        ));
        body.checks.push(CheckResult::at_most(
            "identity_residual",
            summary.max_identity_residual,
            config.identity_tolerance,
        ));
    }
    body.checks.push(CheckResult::flag(
        "contrapositive",
        summary.contrapositive_hits == 0,
        format!(
            "{} models precise with ‖[A,|L1|]‖ above threshold",
            summary.contrapositive_hits
        ),
    ));

    let m = &mut body.measurements;
    m.push(Measurement::text("dims", dims_label(args.dims)));
    m.push(Measurement::flag("yanase", args.yanase));
    m.push(Measurement::count("models", summary.models));
    m.push(Measurement::count(
        "states_evaluated",
        summary.states_evaluated,
    ));
    m.push(Measurement::count("kernel_states", summary.kernel_states));
    m.push(Measurement::count("precise_models", summary.precise_models));
    if summary.models > 0 {
        m.push(Measurement::number(
            "max_conservation_residual",
            summary.max_conservation_residual,
        ));
        m.push(Measurement::number(
            "max_yanase_residual",
            summary.max_yanase_residual,
        ));
    }
    for o in &summary.outcomes {
        body.rows.push(json!({
            "model": o.index,
            "dim_h": o.dim_h,
            "dim_k": o.dim_k,
            "states": o.states,
            "kernel_states": o.kernel_states,
            "conservation_residual": num(o.conservation_residual),
            "identity_residual": o.identity_residual.map_or(Value::Null, num),
            "min_general_margin": num(o.min_general_margin),
            "min_yanase_margin": o.min_yanase_margin.map_or(Value::Null, num),
            "min_hr_margin": num(o.min_hr_margin),
            "commutator_a_abs_l1": num(o.commutator_a_abs_l1),
            "violations": o.violations.len(),
        }));
    }
    body.notes = summary
        .violations
        .iter()
        .map(|v| format!("model {}: {}", v.model_index, v.message))
        .collect();
    Ok(body.finish())
}

fn dims_label(d: DimChoice) -> String {
    match d {
        DimChoice::Fixed { dim_h, dim_k } => format!("{dim_h}x{dim_k}"),
        DimChoice::Uniform { min, max } => format!("{min}-{max}"),
    }
}

/// `AxB` for fixed factor dimensions or `min-max` for a uniform range.
pub fn parse_dims(s: &str) -> std::result::Result<DimChoice, String> {
    let parse = |t: &str| -> std::result::Result<usize, String> {
        let n: usize = t
            .trim()
            .parse()
            .map_err(|_| format!("invalid dimension `{t}`"))?;
        if (1..=8).contains(&n) {
            Ok(n)
        } else {
            Err(format!("dimension {n} outside 1..=8"))
        }
    };
    if let Some((a, b)) = s.split_once(['x', 'X']) {
        return Ok(DimChoice::Fixed {
            dim_h: parse(a)?,
            dim_k: parse(b)?,
        });
    }
    if let Some((a, b)) = s.split_once('-') {
        let (min, max) = (parse(a)?, parse(b)?);
        if min > max {
            return Err(format!("empty range {min}-{max}"));
        }
        return Ok(DimChoice::Uniform { min, max });
    }
    Err(format!("expected AxB or MIN-MAX, got `{s}`"))
}

/// `diag:v1,v2,...`.
pub fn parse_l2_spec(s: &str) -> Result<ComplexMatrix> {
    let Some(rest) = s.strip_prefix("diag:") else {
        bail!("--l2-spec must look like diag:1,2,5");
    };
    let values = rest
        .split(',')
        .map(|t| {
            let v: f64 = t
                .trim()
                .parse()
                .with_context(|| format!("invalid number `{t}` in --l2-spec"))?;
            ensure!(v.is_finite(), "non-finite value in --l2-spec");
            Ok(v)
        })
        .collect::<Result<Vec<f64>>>()?;
    ensure!(!values.is_empty(), "--l2-spec has no values");
    Ok(ComplexMatrix::diag(&values))
}

/// Largest simplex grid evaluated by `optimize`.
const GRID_BUDGET: u128 = 5_000_000;
const GRID_DIVISIONS: usize = 1000;

pub fn optimize(
    model: Option<&Path>,
    l2_spec: Option<&str>,
    pair: usize,
    opts: &GlobalOpts,
) -> Result<ReportBody> {
    let mut body = ReportBody::new("optimize", opts.seed);
    let (l2, tol) = match (model, l2_spec) {
        (Some(path), None) => {
            let Input { loaded, checksum } = load(path, opts)?;
            let c = loaded
                .model
                .conserved
                .get(pair)
                .with_context(|| format!("model has no conserved pair {pair}"))?;
            body.model = Some(loaded.model.name.clone());
            body.model_checksum = Some(checksum);
            (c.l2().clone(), loaded.tol)
        }
        (None, Some(spec)) => {
            let mut tol = Tolerances::default();
            if let Some(v) = opts.tol {
                tol.validation = v;
            }
            ensure!(tol.is_valid(), "--tol must be positive and finite");
            body.model = Some(spec.to_string());
            (parse_l2_spec(spec)?, tol)
        }
        _ => bail!("give exactly one of a model file or --l2-spec"),
    };

    let opt = match optimal_probe_state(&l2, &tol) {
        Ok(o) => o,
        Err(WayError::ConstantModulus) => {
            bail!("|L2| has a single eigenvalue, so R is identically 1 and there is nothing to optimize")
        }
        Err(WayError::NonPositiveSpectrum) => {
            bail!("|L2| has a zero eigenvalue; R is defined only for a strictly positive spectrum")
        }
        Err(e) => return Err(e.into()),
    };
    let spec = spectral_decompose(&operator_modulus(&l2, &tol)?, &tol)?;
    let levels = spec.eigenvalues.clone();
    let dist = optimal_probe_distribution(&levels)?;
    let d = levels.len();
    let divisions = divisions_within(d, GRID_DIVISIONS, GRID_BUDGET);
    let grid = simplex_grid_minimize(d, divisions, Execution::Parallel, |p| {
        ratio_of_distribution(&levels, p)
    });
    let at_state = ratio_and_cv(&l2, &opt.state, &tol)?;
    let gap = grid.value - dist.r_min;

    body.checks.push(
        CheckResult::at_most("oracle_agreement", gap.abs(), 1e-4).with_detail(format!(
            "grid minimum {}",
            fmt_num(grid.value).unwrap_or_default()
        )),
    );
    body.checks
        .push(CheckResult::nonnegative("grid_not_below_r_min", gap, 1e-12));
    body.checks.push(CheckResult::at_most(
        "r_at_xi_min",
        (at_state.ratio - dist.r_min).abs(),
        1e-10,
    ));
    body.checks.push(CheckResult::at_most(
        "ratio_cv_identity",
        (at_state.ratio - 1.0 / (1.0 + at_state.cv * at_state.cv)).abs(),
        1e-10,
    ));

    let m = &mut body.measurements;
    m.push(Measurement {
        name: "levels".into(),
        value: number_list(&levels),
    });
    m.push(Measurement {
        name: "probabilities".into(),
        value: number_list(&dist.probabilities),
    });
    m.push(Measurement {
        name: "xi_min".into(),
        value: Value::Array(
            opt.state
                .amplitudes()
                .iter()
                .map(|z| json!([num(z.re), num(z.im)]))
                .collect(),
        ),
    });
    m.push(Measurement::number("r_min", dist.r_min));
    m.push(Measurement::number("ratio_at_xi_min", at_state.ratio));
    m.push(Measurement::number("cv_at_xi_min", at_state.cv));
    m.push(Measurement::number("grid_minimum", grid.value));
    m.push(Measurement {
        name: "grid_point".into(),
        value: number_list(&grid.point),
    });
    m.push(Measurement::count("grid_divisions", divisions));
    m.push(Measurement::text(
        "grid_points",
        simplex_grid_size(d, divisions).to_string(),
    ));
    m.push(Measurement::number(
        "difference_form_value",
        difference_form_minimum(opt.l_min, opt.l_max),
    ));
    body.notes.push(format!(
        "oracle: simplex grid with {} divisions gives R = {}, r_min = 4·l_min·l_max/(l_min+l_max)² = {}",
        divisions,
        fmt_num(grid.value).unwrap_or_default(),
        fmt_num(dist.r_min).unwrap_or_default(),
    ));
    body.notes.push(format!(
        "4·l_min·l_max/(l_max−l_min)² = {} is not the attained minimum",
        fmt_num(difference_form_minimum(opt.l_min, opt.l_max)).unwrap_or_default()
    ));
    Ok(body.finish())
}
