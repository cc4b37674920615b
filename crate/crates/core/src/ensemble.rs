//! Bound and contrapositive checks over a random conserving ensemble.

use crate::bounds::{verify_way_consistency_on, BOUND_SLACK};
use crate::error::Result;
use crate::linalg::{StateVector, Tolerances};
use crate::measurement::report_states;
use crate::models::{random_model_ensemble, EnsembleSpec, NamedModel};
use crate::par::{map_indexed, Execution};

/// Thresholds of the contrapositive check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContrapositiveThresholds {
    pub precise: f64,
    pub conserving: f64,
    pub yanase: f64,
    pub l2_min_singular: f64,
    pub commutator: f64,
}

impl Default for ContrapositiveThresholds {
    fn default() -> Self {
        ContrapositiveThresholds {
            precise: 1e-8,
            conserving: 1e-9,
            yanase: 1e-9,
            l2_min_singular: 1e-6,
            commutator: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub spec: EnsembleSpec,
    /// Haar states per model, appended to the computational basis.
    pub states_per_model: usize,
    pub state_seed: u64,
    pub bound_slack: f64,
    pub identity_tolerance: f64,
    pub contrapositive: ContrapositiveThresholds,
}

impl SuiteConfig {
    pub fn new(spec: EnsembleSpec) -> Self {
        SuiteConfig {
            spec,
            states_per_model: 20,
            state_seed: spec.seed,
            bound_slack: BOUND_SLACK,
            identity_tolerance: 1e-9,
            contrapositive: ContrapositiveThresholds::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteViolation {
    pub model_index: usize,
    pub message: String,
}

/// Per-model extremes; margins are `lhs − rhs` minima over the states.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelOutcome {
    pub index: usize,
    pub dim_h: usize,
    pub dim_k: usize,
    pub states: usize,
    pub kernel_states: usize,
    pub max_basis_noise: f64,
    pub conservation_residual: f64,
    pub yanase_residual: f64,
    pub l2_min_abs_eigenvalue: f64,
    pub commutator_a_abs_l1: f64,
    pub identity_residual: Option<f64>,
    pub min_general_margin: f64,
    pub min_yanase_margin: Option<f64>,
    pub min_hr_margin: f64,
    pub contrapositive_hit: bool,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSummary {
    pub models: usize,
    pub states_evaluated: usize,
    pub kernel_states: usize,
    pub precise_models: usize,
    pub max_identity_residual: f64,
    pub max_conservation_residual: f64,
    pub max_yanase_residual: f64,
    pub min_general_margin: f64,
    pub min_yanase_margin: f64,
    pub min_hr_margin: f64,
    pub contrapositive_hits: usize,
    pub outcomes: Vec<ModelOutcome>,
    pub violations: Vec<SuiteViolation>,
}

impl SuiteSummary {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn states_for(model: &NamedModel, config: &SuiteConfig, index: usize) -> Vec<StateVector> {
    let dim = model.process.dim_h();
    let mut states = report_states(dim, config.state_seed.wrapping_add(index as u64));
    states.truncate(dim + config.states_per_model);
    states
}

/// Runs every check on one model of the ensemble.
pub fn evaluate_model(
    index: usize,
    model: &NamedModel,
    config: &SuiteConfig,
    tol: &Tolerances,
) -> Result<ModelOutcome> {
    let pair = &model.conserved[0];
    let states = states_for(model, config, index);
    let report = verify_way_consistency_on(&model.process, &model.observable, pair, tol, &states)?;
    let th = &config.contrapositive;
    let mut violations = Vec::new();

    if let crate::bounds::Verdict::TheoremViolation(details) = &report.verdict {
        violations.extend(details.iter().cloned());
    }
    let identity_residual = report.identity_residual.map(|r| r.modulus_form);
    match identity_residual {
        Some(r) if r > config.identity_tolerance => {
            violations.push(format!("commutator identity residual {r:.3e}"));
        }
        None => violations.push(format!(
            "no bound rows: conservation residual {:.3e}",
            report.conservation_residual
        )),
        _ => {}
    }

    let mut min_general_margin = f64::INFINITY;
    let mut min_yanase_margin: Option<f64> = None;
    let mut min_hr_margin = f64::INFINITY;
    let mut kernel_states = 0;
    for row in &report.rows {
        let Some(r) = &row.report else {
            kernel_states += 1;
            continue;
        };
        min_general_margin = min_general_margin.min(r.general_margin());
        min_hr_margin = min_hr_margin.min(r.hr_margin());
        if let Some(m) = r.yanase_margin() {
            min_yanase_margin = Some(min_yanase_margin.map_or(m, |x| x.min(m)));
        }
        if r.general_margin() < -config.bound_slack {
            violations.push(format!(
                "state {}: ε² = {:.6e} < general bound {:.6e}",
                row.state_index, r.epsilon_sq, r.rhs_general
            ));
        }
        if let Some(m) = r.yanase_margin() {
            if m < -config.bound_slack {
                violations.push(format!(
                    "state {}: ε² = {:.6e} < Yanase bound {:.6e}",
                    row.state_index,
                    r.epsilon_sq,
                    r.rhs_yanase.unwrap_or(0.0)
                ));
            }
        }
        if r.hr_margin() < -config.bound_slack {
            violations.push(format!(
                "state {}: Heisenberg-Robertson {:.6e} < {:.6e}",
                row.state_index, r.hr_lhs, r.hr_rhs
            ));
        }
    }

    let contrapositive_hit = report.max_basis_noise <= th.precise
        && report.conservation_residual <= th.conserving
        && report.yanase_residual <= th.yanase
        && report.l2_min_abs_eigenvalue >= th.l2_min_singular
        && report.commutator_a_abs_l1 >= th.commutator;
    if contrapositive_hit {
        violations.push(format!(
            "precise, conserving, Yanase meter, invertible L2 but ‖[A,|L1|]‖ = {:.3e}",
            report.commutator_a_abs_l1
        ));
    }

    Ok(ModelOutcome {
        index,
        dim_h: model.process.dim_h(),
        dim_k: model.process.dim_k(),
        states: states.len(),
        kernel_states,
        max_basis_noise: report.max_basis_noise,
        conservation_residual: report.conservation_residual,
        yanase_residual: report.yanase_residual,
        l2_min_abs_eigenvalue: report.l2_min_abs_eigenvalue,
        commutator_a_abs_l1: report.commutator_a_abs_l1,
        identity_residual,
        min_general_margin,
        min_yanase_margin,
        min_hr_margin,
        contrapositive_hit,
        violations,
    })
}

/// Evaluates already generated models; outcomes are in model order.
pub fn run_suite_on(
    models: &[NamedModel],
    config: &SuiteConfig,
    tol: &Tolerances,
    exec: Execution,
) -> Result<SuiteSummary> {
    let outcomes = map_indexed(exec, models.len(), |i| {
        evaluate_model(i, &models[i], config, tol)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(summarize(outcomes))
}

/// Generates the ensemble described by `config.spec` and evaluates it.
pub fn run_master_suite(
    config: &SuiteConfig,
    tol: &Tolerances,
    exec: Execution,
) -> Result<SuiteSummary> {
    let models = random_model_ensemble(&config.spec, exec);
    run_suite_on(&models, config, tol, exec)
}

fn summarize(outcomes: Vec<ModelOutcome>) -> SuiteSummary {
    let fold_max = |f: &dyn Fn(&ModelOutcome) -> f64| outcomes.iter().map(f).fold(0.0, f64::max);
    let fold_min =
        |f: &dyn Fn(&ModelOutcome) -> f64| outcomes.iter().map(f).fold(f64::INFINITY, f64::min);
    let violations = outcomes
        .iter()
        .flat_map(|o| {
            o.violations.iter().map(|m| SuiteViolation {
                model_index: o.index,
                message: m.clone(),
            })
        })
        .collect();
    SuiteSummary {
        models: outcomes.len(),
        states_evaluated: outcomes.iter().map(|o| o.states - o.kernel_states).sum(),
        kernel_states: outcomes.iter().map(|o| o.kernel_states).sum(),
        precise_models: outcomes
            .iter()
            .filter(|o| o.max_basis_noise <= 1e-8)
            .count(),
        max_identity_residual: fold_max(&|o| o.identity_residual.unwrap_or(f64::INFINITY)),
        max_conservation_residual: fold_max(&|o| o.conservation_residual),
        max_yanase_residual: fold_max(&|o| o.yanase_residual),
        min_general_margin: fold_min(&|o| o.min_general_margin),
        min_yanase_margin: fold_min(&|o| o.min_yanase_margin.unwrap_or(f64::INFINITY)),
        min_hr_margin: fold_min(&|o| o.min_hr_margin),
        contrapositive_hits: outcomes.iter().filter(|o| o.contrapositive_hit).count(),
        outcomes,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::DimChoice;

    fn small_config(count: usize) -> SuiteConfig {
        SuiteConfig::new(EnsembleSpec {
            count,
            seed: 11,
            ..EnsembleSpec::default()
        })
    }

    #[test]
    fn small_ensemble_has_no_violations() {
        let summary = run_master_suite(
            &small_config(8),
            &Tolerances::default(),
            Execution::Sequential,
        )
        .unwrap();
        assert!(summary.passed(), "{:?}", summary.violations);
        assert_eq!(summary.models, 8);
        assert!(summary.max_identity_residual <= 1e-9);
        assert!(summary.min_general_margin >= -1e-8);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let config = small_config(6);
        let tol = Tolerances::default();
        let a = run_master_suite(&config, &tol, Execution::Sequential).unwrap();
        let b = run_master_suite(&config, &tol, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn state_count_per_model() {
        let mut config = small_config(2);
        config.spec.dims = DimChoice::Fixed { dim_h: 3, dim_k: 2 };
        config.states_per_model = 5;
        let summary =
            run_master_suite(&config, &Tolerances::default(), Execution::Sequential).unwrap();
        assert!(summary.outcomes.iter().all(|o| o.states == 8));
    }
}
