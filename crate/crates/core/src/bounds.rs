//! Noise lower bounds under multiplicative conservation laws.
//!
//! For a process conserving `L₁⊗L₂`, the noise operator `N` satisfies
//!
//! ```text
//! [N, |L₁|⊗|L₂|] = U†(|L₁|⊗[M,|L₂|])U − [A,|L₁|]⊗|L₂|
//! ```
//!
//! and the Heisenberg–Robertson relation for `N` and `|L₁|⊗|L₂|` turns this
//! into a lower bound on `ε(A,ψ)²`. Under Yanase's condition `[M,|L₂|] = 0`
//! the bound factorizes into an object term and the probe ratio
//! `R = ⟨|L₂|⟩²/⟨|L₂|²⟩ = 1/(1 + CV²)`.
//!
//! The minimum of `R` over probe states sits on the two extreme eigenvalues
//! `l_m < l_M` of `|L₂|` with probabilities `l_M/(l_m+l_M)` and
//! `l_m/(l_m+l_M)`, where `R = 4 l_m l_M / (l_m + l_M)²`. The alternative
//! closed form `4 l_m l_M / (l_M − l_m)²` is not a minimum of `R` (it exceeds
//! 1 whenever `l_M < 3 l_m`); [`difference_form_minimum`] exposes it only so
//! that the discrepancy can be demonstrated.

use num_complex::Complex64;

use crate::conservation::{
    check_yanase, conservation_residual, exponentiate_additive, ConservedPair, LawKind,
};
use crate::error::{Result, WayError};
use crate::linalg::{
    operator_modulus, spectral_decompose, tensor, CVector, ComplexMatrix, StateVector, Tolerances,
};
use crate::measurement::MeasuringProcess;
use crate::par::{map_indexed, Execution};

/// Relative floor below which a bound denominator counts as zero.
pub const KERNEL_FLOOR: f64 = 1e-12;
/// Slack allowed when comparing `ε²` to a lower bound.
pub const BOUND_SLACK: f64 = 1e-8;
/// `‖[A,|L₁|]‖` above this is treated as a genuine non-commutation.
pub const COMMUTATOR_FLOOR: f64 = 1e-4;
/// Smallest `|eigenvalue|` of `L₂` for it to count as invertible.
pub const INVERTIBILITY_FLOOR: f64 = 1e-6;

fn require_multiplicative(c: &ConservedPair) -> Result<()> {
    if c.kind() != LawKind::Multiplicative {
        return Err(WayError::KindMismatch {
            expected: "multiplicative",
        });
    }
    Ok(())
}

/// The identity and the bounds only use `[U, |L₁|⊗|L₂|] = 0`, which follows
/// from multiplicative conservation.
fn require_conserving(p: &MeasuringProcess, c: &ConservedPair, tol: &Tolerances) -> Result<()> {
    require_multiplicative(c)?;
    if c.l1().dim() != p.dim_h() || c.l2().dim() != p.dim_k() {
        return Err(WayError::DimensionMismatch {
            expected: p.dim_h() * p.dim_k(),
            found: c.l1().dim() * c.l2().dim(),
        });
    }
    let k = tensor(c.abs_l1(), c.abs_l2());
    let residual = k.commutator(p.unitary())?.spectral_norm();
    if residual > tol.validation * k.spectral_norm().max(1.0) {
        return Err(WayError::ConservationViolated { residual });
    }
    Ok(())
}

/// `[A,|L₁|]⊗|L₂| − U†(|L₁|⊗[M,|L₂|])U`.
pub fn bound_operator(
    p: &MeasuringProcess,
    a: &ComplexMatrix,
    c: &ConservedPair,
) -> Result<ComplexMatrix> {
    let object = tensor(&a.commutator(c.abs_l1())?, c.abs_l2());
    let probe = tensor(c.abs_l1(), &p.meter().commutator(c.abs_l2())?);
    let u = p.unitary();
    Ok(&object - &(&(&u.adjoint() * &probe) * u))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResidual {
    /// `‖[N,K] − (U†(|L₁|⊗[M,|L₂|])U − [A,|L₁|]⊗|L₂|)‖`, `K = |L₁|⊗|L₂|`.
    pub modulus_form: f64,
    /// Residual of the variant `[A,|L₁|]⊗L₂ − U†(|L₁|⊗[M,|L₂|])U`.
    pub printed_form: f64,
}

pub fn commutator_identity_residual(
    p: &MeasuringProcess,
    a: &ComplexMatrix,
    c: &ConservedPair,
    tol: &Tolerances,
) -> Result<IdentityResidual> {
    require_conserving(p, c, tol)?;
    let n = p.noise_operator(a)?;
    let k = tensor(c.abs_l1(), c.abs_l2());
    let lhs = n.commutator(&k)?;
    let comm_a = a.commutator(c.abs_l1())?;
    let u = p.unitary();
    let probe_term = &(&u.adjoint() * &tensor(c.abs_l1(), &p.meter().commutator(c.abs_l2())?)) * u;
    let modulus_rhs = &probe_term - &tensor(&comm_a, c.abs_l2());
    let printed_rhs = &tensor(&comm_a, c.l2()) - &probe_term;
    Ok(IdentityResidual {
        modulus_form: (&lhs - &modulus_rhs).spectral_norm(),
        printed_form: (&lhs - &printed_rhs).spectral_norm(),
    })
}

fn squared_norm_expectation(op: &ComplexMatrix, v: &CVector) -> Result<f64> {
    Ok(op.apply(v)?.norm_squared())
}

fn guard_denominator(value: f64, op_norm: f64) -> Result<f64> {
    if value <= KERNEL_FLOOR * op_norm * op_norm {
        return Err(WayError::KernelState);
    }
    Ok(value)
}

/// General lower bound on `ε(A,ψ)²`.
pub fn bound_general(
    p: &MeasuringProcess,
    a: &ComplexMatrix,
    c: &ConservedPair,
    psi: &StateVector,
    tol: &Tolerances,
) -> Result<f64> {
    require_conserving(p, c, tol)?;
    let l1_sq = guard_denominator(
        squared_norm_expectation(c.abs_l1(), psi.amplitudes())?,
        c.l1().spectral_norm(),
    )?;
    let l2_sq = guard_denominator(
        squared_norm_expectation(c.abs_l2(), p.xi().amplitudes())?,
        c.l2().spectral_norm(),
    )?;
    let phi = p.initial_state(psi)?;
    let numerator = bound_operator(p, a, c)?.expectation(&phi)?.norm_sqr();
    Ok(numerator / (4.0 * l1_sq * l2_sq))
}

/// Lower bound on `ε(A,ψ)²` valid under Yanase's condition:
/// `|⟨ψ|[A,|L₁|]|ψ⟩|² R(|L₂|) / (4⟨ψ||L₁|²|ψ⟩)`.
pub fn bound_yanase(
    a: &ComplexMatrix,
    l1: &ComplexMatrix,
    l2: &ComplexMatrix,
    psi: &StateVector,
    xi: &StateVector,
    tol: &Tolerances,
) -> Result<f64> {
    let abs_l1 = operator_modulus(l1, tol)?;
    let l1_sq = guard_denominator(
        squared_norm_expectation(&abs_l1, psi.amplitudes())?,
        l1.spectral_norm(),
    )?;
    let ratio = ratio_and_cv(l2, xi, tol)?.ratio;
    let comm = a.commutator(&abs_l1)?.expectation(psi.amplitudes())?;
    Ok(comm.norm_sqr() * ratio / (4.0 * l1_sq))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioCv {
    /// `⟨|L₂|⟩² / ⟨|L₂|²⟩`.
    pub ratio: f64,
    /// `σ(|L₂|) / ⟨|L₂|⟩`.
    pub cv: f64,
}

pub fn ratio_and_cv(l2: &ComplexMatrix, xi: &StateVector, tol: &Tolerances) -> Result<RatioCv> {
    let abs_l2 = operator_modulus(l2, tol)?;
    let mean = abs_l2.expectation(xi.amplitudes())?.re;
    let second = guard_denominator(
        squared_norm_expectation(&abs_l2, xi.amplitudes())?,
        l2.spectral_norm(),
    )?;
    let variance = (second - mean * mean).max(0.0);
    Ok(RatioCv {
        ratio: mean * mean / second,
        cv: variance.sqrt() / mean,
    })
}

/// `R` for a distribution `probabilities` over `levels`.
pub fn ratio_of_distribution(levels: &[f64], probabilities: &[f64]) -> f64 {
    let mean: f64 = levels.iter().zip(probabilities).map(|(l, p)| l * p).sum();
    let second: f64 = levels
        .iter()
        .zip(probabilities)
        .map(|(l, p)| l * l * p)
        .sum();
    mean * mean / second
}

pub fn variance_of_distribution(levels: &[f64], probabilities: &[f64]) -> f64 {
    let mean: f64 = levels.iter().zip(probabilities).map(|(l, p)| l * p).sum();
    let second: f64 = levels
        .iter()
        .zip(probabilities)
        .map(|(l, p)| l * l * p)
        .sum();
    (second - mean * mean).max(0.0)
}

/// `4 l_m l_M / (l_M − l_m)²`; not the minimum of `R` (see module docs).
pub fn difference_form_minimum(l_min: f64, l_max: f64) -> f64 {
    4.0 * l_min * l_max / ((l_max - l_min) * (l_max - l_min))
}

fn validate_levels(levels: &[f64], strict: bool) -> Result<()> {
    if levels.len() < 2 {
        return Err(WayError::TooFewLevels);
    }
    if levels.iter().any(|&l| !l.is_finite() || l <= 0.0) {
        return Err(WayError::NonPositiveEigenvalue);
    }
    let ordered = levels
        .windows(2)
        .all(|w| if strict { w[0] < w[1] } else { w[0] <= w[1] });
    if !ordered {
        return Err(WayError::NotAscending);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeDistribution {
    pub levels: Vec<f64>,
    pub probabilities: Vec<f64>,
    /// `R` at `probabilities`, equal to `4 l₁ l_d / (l₁ + l_d)²`.
    pub r_min: f64,
}

/// The `R`-minimizing distribution over strictly ascending positive levels.
pub fn optimal_probe_distribution(levels: &[f64]) -> Result<ProbeDistribution> {
    validate_levels(levels, true)?;
    let d = levels.len();
    let (lo, hi) = (levels[0], levels[d - 1]);
    let mut probabilities = vec![0.0; d];
    probabilities[0] = hi / (lo + hi);
    probabilities[d - 1] = lo / (lo + hi);
    let r_min = ratio_of_distribution(levels, &probabilities);
    Ok(ProbeDistribution {
        levels: levels.to_vec(),
        probabilities,
        r_min,
    })
}

#[derive(Debug, Clone)]
pub struct ProbeOptimum {
    pub l_min: f64,
    pub l_max: f64,
    /// Probability on the `l_min` eigenspace.
    pub p_min: f64,
    /// Probability on the `l_max` eigenspace.
    pub p_max: f64,
    pub r_min: f64,
    pub state: StateVector,
}

/// `ξ_min = √(l_M/(l_m+l_M)) |m⟩ + √(l_m/(l_m+l_M)) |M⟩`.
pub fn optimal_probe_state(l2: &ComplexMatrix, tol: &Tolerances) -> Result<ProbeOptimum> {
    let abs_l2 = operator_modulus(l2, tol)?;
    let spec = spectral_decompose(&abs_l2, tol)?;
    if !spec.kernel_clusters(tol).is_empty() {
        return Err(WayError::NonPositiveSpectrum);
    }
    if spec.len() < 2 {
        return Err(WayError::ConstantModulus);
    }
    let last = spec.len() - 1;
    let dist = optimal_probe_distribution(&spec.eigenvalues)?;
    let (p_min, p_max) = (dist.probabilities[0], dist.probabilities[last]);
    let m = &spec.cluster_basis(0)[0];
    let big = &spec.cluster_basis(last)[0];
    let amplitudes =
        m * Complex64::new(p_min.sqrt(), 0.0) + big * Complex64::new(p_max.sqrt(), 0.0);
    let state = StateVector::normalized(amplitudes.iter().copied().collect())?;
    Ok(ProbeOptimum {
        l_min: spec.eigenvalues[0],
        l_max: spec.eigenvalues[last],
        p_min,
        p_max,
        r_min: dist.r_min,
        state,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridOptimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub evaluated: usize,
}

/// Number of points on the simplex grid with `divisions` steps in `d` coordinates.
pub fn simplex_grid_size(d: usize, divisions: usize) -> u128 {
    // C(divisions + d − 1, d − 1)
    let mut acc: u128 = 1;
    for i in 1..d as u128 {
        acc = acc * (divisions as u128 + i) / i;
    }
    acc
}

/// Largest number of divisions (capped at `preferred`) keeping the grid under `max_points`.
pub fn divisions_within(d: usize, preferred: usize, max_points: u128) -> usize {
    let mut n = preferred;
    while n > 1 && simplex_grid_size(d, n) > max_points {
        n = n * 3 / 4;
    }
    n
}

/// Exhaustive minimization of `objective` over `{p : p_i = k_i/divisions, Σ k_i = divisions}`.
/// Ties keep the first point in lexicographic order of `k`.
pub fn simplex_grid_minimize<F>(
    d: usize,
    divisions: usize,
    exec: Execution,
    objective: F,
) -> GridOptimum
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    assert!(d >= 1 && divisions >= 1);
    let step = 1.0 / divisions as f64;
    let slices = map_indexed(exec, divisions + 1, |k0| {
        let mut counts = vec![0usize; d];
        counts[0] = k0;
        let mut best = GridOptimum {
            point: Vec::new(),
            value: f64::INFINITY,
            evaluated: 0,
        };
        let mut point = vec![0.0; d];
        fill(
            &mut counts,
            1,
            divisions - k0,
            step,
            &mut point,
            &objective,
            &mut best,
        );
        best
    });
    let mut total = 0;
    let mut best: Option<GridOptimum> = None;
    for slice in slices {
        total += slice.evaluated;
        if best.as_ref().is_none_or(|b| slice.value < b.value) {
            best = Some(slice);
        }
    }
    let mut best = best.expect("at least one slice");
    best.evaluated = total;
    best
}

fn fill<F: Fn(&[f64]) -> f64>(
    counts: &mut [usize],
    pos: usize,
    remaining: usize,
    step: f64,
    point: &mut [f64],
    objective: &F,
    best: &mut GridOptimum,
) {
    let d = counts.len();
    if pos == d - 1 || d == 1 {
        if d == 1 && remaining != 0 {
            return;
        }
        if d > 1 {
            counts[pos] = remaining;
        }
        for (x, &k) in point.iter_mut().zip(counts.iter()) {
            *x = k as f64 * step;
        }
        let value = objective(point);
        best.evaluated += 1;
        if value < best.value {
            best.value = value;
            best.point = point.to_vec();
        }
        return;
    }
    for k in 0..=remaining {
        counts[pos] = k;
        fill(counts, pos + 1, remaining - k, step, point, objective, best);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceCheck {
    /// `(1/2, 0, …, 0, 1/2)`.
    pub distribution: Vec<f64>,
    pub variance: f64,
    /// `R` at the variance maximizer.
    pub ratio_at_distribution: f64,
    /// Largest variance found on the simplex grid.
    pub grid_max_variance: f64,
    pub grid_divisions: usize,
    pub confirmed: bool,
}

/// Variance maximizer `(1/2, 0, …, 0, 1/2)`, confirmed against a simplex grid.
pub fn variance_maximizer_check(levels: &[f64], exec: Execution) -> Result<VarianceCheck> {
    validate_levels(levels, false)?;
    let d = levels.len();
    let mut distribution = vec![0.0; d];
    distribution[0] = 0.5;
    distribution[d - 1] += 0.5;
    let variance = variance_of_distribution(levels, &distribution);
    let divisions = divisions_within(d, 1000, 2_000_000);
    let grid = simplex_grid_minimize(d, divisions, exec, |p| -variance_of_distribution(levels, p));
    let grid_max_variance = -grid.value;
    let scale = levels[d - 1] * levels[d - 1];
    Ok(VarianceCheck {
        ratio_at_distribution: ratio_of_distribution(levels, &distribution),
        confirmed: grid_max_variance <= variance + 1e-12 * scale,
        distribution,
        variance,
        grid_max_variance,
        grid_divisions: divisions,
    })
}

/// Per-state noise and bound values.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub epsilon_sq: f64,
    pub rhs_general: f64,
    /// Present only when Yanase's condition holds.
    pub rhs_yanase: Option<f64>,
    pub ratio_r: f64,
    pub cv: f64,
    pub commutator_a_abs_l1: f64,
    pub yanase_residual: f64,
    /// `σ(N)² σ(|L₁|⊗|L₂|)²`.
    pub hr_lhs: f64,
    /// `¼ |⟨[N, |L₁|⊗|L₂|]⟩|²`.
    pub hr_rhs: f64,
}

impl BoundReport {
    pub fn general_margin(&self) -> f64 {
        self.epsilon_sq - self.rhs_general
    }

    pub fn yanase_margin(&self) -> Option<f64> {
        self.rhs_yanase.map(|r| self.epsilon_sq - r)
    }

    pub fn hr_margin(&self) -> f64 {
        self.hr_lhs - self.hr_rhs
    }

    pub fn is_violation(&self) -> bool {
        self.general_margin() < -BOUND_SLACK
            || self.yanase_margin().is_some_and(|m| m < -BOUND_SLACK)
            || self.hr_margin() < -BOUND_SLACK
    }
}

/// Evaluates `ε²`, both bounds, `R`, `CV` and the Heisenberg–Robertson step.
pub fn bound_report(
    p: &MeasuringProcess,
    a: &ComplexMatrix,
    c: &ConservedPair,
    psi: &StateVector,
    tol: &Tolerances,
) -> Result<BoundReport> {
    let rhs_general = bound_general(p, a, c, psi, tol)?;
    let yanase_residual = check_yanase(p, c.l2(), tol)?;
    let yanase_holds = yanase_residual <= tol.validation * c.l2().spectral_norm().max(1.0);
    let rc = ratio_and_cv(c.l2(), p.xi(), tol)?;
    let rhs_yanase = if yanase_holds {
        Some(bound_yanase(a, c.l1(), c.l2(), psi, p.xi(), tol)?)
    } else {
        None
    };

    let phi = p.initial_state(psi)?;
    let n = p.noise_operator(a)?;
    let k = tensor(c.abs_l1(), c.abs_l2());
    let n_phi = n.apply(&phi)?;
    let epsilon_sq = n_phi.norm_squared();
    let mean_n = phi.dotc(&n_phi).re;
    let k_phi = k.apply(&phi)?;
    let mean_k = phi.dotc(&k_phi).re;
    let var_n = (epsilon_sq - mean_n * mean_n).max(0.0);
    let var_k = (k_phi.norm_squared() - mean_k * mean_k).max(0.0);
    let comm = n.commutator(&k)?.expectation(&phi)?;

    Ok(BoundReport {
        epsilon_sq,
        rhs_general,
        rhs_yanase,
        ratio_r: rc.ratio,
        cv: rc.cv,
        commutator_a_abs_l1: a.commutator(c.abs_l1())?.spectral_norm(),
        yanase_residual,
        hr_lhs: var_n * var_k,
        hr_rhs: 0.25 * comm.norm_sqr(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Consistent,
    TheoremViolation(Vec<String>),
}

impl Verdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Verdict::Consistent)
    }
}

#[derive(Debug, Clone)]
pub struct BoundRow {
    pub state_index: usize,
    /// `None` when the state lies in the kernel of a conserved factor.
    pub report: Option<BoundReport>,
}

#[derive(Debug, Clone)]
pub struct WayReport {
    pub kind: LawKind,
    pub precise: bool,
    pub nondisturbing: bool,
    pub max_basis_noise: f64,
    pub max_basis_disturbance: f64,
    pub conservation_residual: f64,
    pub conserved: bool,
    pub yanase_residual: f64,
    pub yanase: bool,
    pub commutator_a_l1: f64,
    pub commutator_a_abs_l1: f64,
    pub l2_min_abs_eigenvalue: f64,
    pub l2_invertible: bool,
    /// Commutator identity on the multiplicative pair used for bounds.
    pub identity_residual: Option<IdentityResidual>,
    pub rows: Vec<BoundRow>,
    pub verdict: Verdict,
}

/// Runs every check and compares the numerics with the theorem conclusions.
pub fn verify_way_consistency(
    p: &MeasuringProcess,
    a: &ComplexMatrix,
    c: &ConservedPair,
    tol: &Tolerances,
) -> Result<WayReport> {
    let states = p.report_states();
    verify_way_consistency_on(p, a, c, tol, &states)
}

pub fn verify_way_consistency_on(
    p: &MeasuringProcess,
    a: &ComplexMatrix,
    c: &ConservedPair,
    tol: &Tolerances,
    states: &[StateVector],
) -> Result<WayReport> {
    let max_basis_noise = p.basis_noise(a)?.into_iter().fold(0.0, f64::max);
    let max_basis_disturbance = p.basis_disturbance(a)?.into_iter().fold(0.0, f64::max);
    let precise = max_basis_noise <= tol.validation;
    let nondisturbing = max_basis_disturbance <= tol.validation;
    let conservation_residual = conservation_residual(p, c)?;
    let conserved = conservation_residual <= tol.validation * c.total().spectral_norm().max(1.0);
    let yanase_residual = check_yanase(p, c.l2(), tol)?;
    let yanase = yanase_residual <= tol.validation * c.l2().spectral_norm().max(1.0);
    let commutator_a_l1 = a.commutator(c.l1())?.spectral_norm();
    let commutator_a_abs_l1 = a.commutator(c.abs_l1())?.spectral_norm();
    let l2_min_abs_eigenvalue = c.l2_min_abs_eigenvalue();
    let l2_invertible = l2_min_abs_eigenvalue >= INVERTIBILITY_FLOOR;

    let mut violations = Vec::new();
    match c.kind() {
        LawKind::Multiplicative => {
            if precise
                && nondisturbing
                && conserved
                && l2_invertible
                && commutator_a_abs_l1 > COMMUTATOR_FLOOR
            {
                violations.push(format!(
                    "nondestructive precise measurement under invertible multiplicative law \
                     but ‖[A,|L1|]‖ = {commutator_a_abs_l1:.3e}"
                ));
            }
            if precise
                && conserved
                && yanase
                && l2_invertible
                && commutator_a_abs_l1 > COMMUTATOR_FLOOR
            {
                violations.push(format!(
                    "precise measurement with Yanase meter but ‖[A,|L1|]‖ = {commutator_a_abs_l1:.3e}"
                ));
            }
        }
        LawKind::Additive => {
            if precise && nondisturbing && conserved && commutator_a_l1 > COMMUTATOR_FLOOR {
                violations.push(format!(
                    "nondestructive precise measurement under additive law but ‖[A,L1]‖ = {commutator_a_l1:.3e}"
                ));
            }
        }
    }

    let mut identity_residual = None;
    let mut rows = Vec::new();
    let bound_pair = match c.kind() {
        LawKind::Multiplicative => c.clone(),
        LawKind::Additive => exponentiate_additive(c, tol)?,
    };
    // Bounds need [U, |L₁|⊗|L₂|] = 0; otherwise no rows are produced.
    match commutator_identity_residual(p, a, &bound_pair, tol) {
        Ok(res) => {
            let scale = 1.0 + bound_operator(p, a, &bound_pair)?.spectral_norm();
            if res.modulus_form > 1e-9 * scale {
                violations.push(format!(
                    "commutator identity residual {:.3e}",
                    res.modulus_form
                ));
            }
            identity_residual = Some(res);
            for (state_index, psi) in states.iter().enumerate() {
                let report = match bound_report(p, a, &bound_pair, psi, tol) {
                    Ok(r) => Some(r),
                    Err(WayError::KernelState) => None,
                    Err(e) => return Err(e),
                };
                if let Some(r) = &report {
                    if r.is_violation() {
                        violations.push(format!(
                            "state {state_index}: ε² = {:.6e} below bound {:.6e}",
                            r.epsilon_sq,
                            r.rhs_general.max(r.rhs_yanase.unwrap_or(0.0))
                        ));
                    }
                }
                rows.push(BoundRow {
                    state_index,
                    report,
                });
            }
        }
        Err(WayError::ConservationViolated { .. }) => {}
        Err(e) => return Err(e),
    }

    let verdict = if violations.is_empty() {
        Verdict::Consistent
    } else {
        Verdict::TheoremViolation(violations)
    };

    Ok(WayReport {
        kind: c.kind(),
        precise,
        nondisturbing,
        max_basis_noise,
        max_basis_disturbance,
        conservation_residual,
        conserved,
        yanase_residual,
        yanase,
        commutator_a_l1,
        commutator_a_abs_l1,
        l2_min_abs_eigenvalue,
        l2_invertible,
        identity_residual,
        rows,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantStateReport {
    /// `‖U(ρ₁⊗ρ₂)U† − ρ₁⊗ρ₂‖`.
    pub invariance_residual: f64,
    pub rho2_min_eigenvalue: f64,
    pub commutator_a_rho1: f64,
    pub precise: bool,
    pub nondisturbing: bool,
    /// All hypotheses hold, so `[A, ρ₁] = 0` is required.
    pub applies: bool,
    pub consistent: bool,
}

fn validate_density(rho: &ComplexMatrix, tol: &Tolerances) -> Result<f64> {
    if rho.ensure_hermitian(tol.validation).is_err() {
        return Err(WayError::NotDensityOperator {
            reason: "not Hermitian",
        });
    }
    if (rho.trace().re - 1.0).abs() > tol.validation || rho.trace().im.abs() > tol.validation {
        return Err(WayError::NotDensityOperator {
            reason: "trace differs from 1",
        });
    }
    let spec = spectral_decompose(rho, tol)?;
    let min = spec.eigenvalues[0];
    if min < -tol.validation {
        return Err(WayError::NotDensityOperator {
            reason: "negative eigenvalue",
        });
    }
    Ok(min)
}

/// Checks whether `U` leaves `ρ₁⊗ρ₂` invariant and, if so, whether `[A, ρ₁] = 0`
/// follows as required for an invertible `ρ₂` and a nondestructive precise measurement.
pub fn check_invariant_state(
    p: &MeasuringProcess,
    rho1: &ComplexMatrix,
    rho2: &ComplexMatrix,
    a: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<InvariantStateReport> {
    if rho1.dim() != p.dim_h() {
        return Err(WayError::DimensionMismatch {
            expected: p.dim_h(),
            found: rho1.dim(),
        });
    }
    if rho2.dim() != p.dim_k() {
        return Err(WayError::DimensionMismatch {
            expected: p.dim_k(),
            found: rho2.dim(),
        });
    }
    validate_density(rho1, tol)?;
    let rho2_min_eigenvalue = validate_density(rho2, tol)?;
    let joint = tensor(rho1, rho2);
    let u = p.unitary();
    let evolved = &(u * &joint) * &u.adjoint();
    let invariance_residual = (&evolved - &joint).spectral_norm();
    let commutator_a_rho1 = a.commutator(rho1)?.spectral_norm();
    let precise = p.is_precise(a, tol)?;
    let nondisturbing = p.is_nondisturbing(a, tol)?;
    let applies = invariance_residual <= tol.validation
        && rho2_min_eigenvalue > INVERTIBILITY_FLOOR
        && precise
        && nondisturbing;
    Ok(InvariantStateReport {
        invariance_residual,
        rho2_min_eigenvalue,
        commutator_a_rho1,
        precise,
        nondisturbing,
        applies,
        consistent: !applies || commutator_a_rho1 <= COMMUTATOR_FLOOR,
    })
}
