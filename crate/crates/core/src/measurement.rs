//! Measuring processes `(K, |ξ⟩, U, M)` and their operational properties.
//!
//! A process couples an object system `H` to a probe `K` prepared in `|ξ⟩`,
//! evolves the pair with `U`, then reads the meter `M` on the probe. Meter
//! outcomes are the eigenvalue clusters of `M`; any set of outcomes is a
//! subset of that finite list.

use num_complex::Complex64;

use crate::error::{FailedCondition, Result, WayError};
use crate::linalg::{
    on_first, on_second, partial_inner, spectral_decompose, CVector, ComplexMatrix,
    SpectralDecomposition, StateVector, Tolerances, ZERO,
};
use crate::random::{haar_state, rng_for};

/// Seed of the random ψ-ensemble used by report-style checks.
pub const REPORT_SEED: u64 = 0;
/// Number of Haar-random states added to the computational basis in reports.
pub const REPORT_RANDOM_STATES: usize = 20;

#[derive(Debug, Clone)]
pub struct MeasuringProcess {
    dim_h: usize,
    xi: StateVector,
    u: ComplexMatrix,
    meter: ComplexMatrix,
    meter_spectrum: SpectralDecomposition,
    tol: Tolerances,
}

impl MeasuringProcess {
    /// Validates unitarity of `u`, Hermiticity of `meter` and dimensions.
    pub fn new(
        dim_h: usize,
        xi: StateVector,
        u: ComplexMatrix,
        meter: ComplexMatrix,
        tol: Tolerances,
    ) -> Result<Self> {
        let dim_k = xi.dim();
        if meter.dim() != dim_k {
            return Err(WayError::DimensionMismatch {
                expected: dim_k,
                found: meter.dim(),
            });
        }
        if u.dim() != dim_h * dim_k {
            return Err(WayError::DimensionMismatch {
                expected: dim_h * dim_k,
                found: u.dim(),
            });
        }
        u.ensure_unitary(tol.validation)?;
        let meter_spectrum = spectral_decompose(&meter, &tol)?;
        Ok(MeasuringProcess {
            dim_h,
            xi,
            u,
            meter,
            meter_spectrum,
            tol,
        })
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn dim_k(&self) -> usize {
        self.xi.dim()
    }

    pub fn xi(&self) -> &StateVector {
        &self.xi
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn meter(&self) -> &ComplexMatrix {
        &self.meter
    }

    pub fn meter_spectrum(&self) -> &SpectralDecomposition {
        &self.meter_spectrum
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// Same process with a different probe state.
    pub fn with_probe_state(&self, xi: StateVector) -> Result<Self> {
        if xi.dim() != self.dim_k() {
            return Err(WayError::DimensionMismatch {
                expected: self.dim_k(),
                found: xi.dim(),
            });
        }
        Ok(MeasuringProcess { xi, ..self.clone() })
    }

    fn check_object_state(&self, psi: &StateVector) -> Result<()> {
        if psi.dim() != self.dim_h {
            return Err(WayError::DimensionMismatch {
                expected: self.dim_h,
                found: psi.dim(),
            });
        }
        Ok(())
    }

    fn check_object_observable(&self, a: &ComplexMatrix) -> Result<()> {
        if a.dim() != self.dim_h {
            return Err(WayError::DimensionMismatch {
                expected: self.dim_h,
                found: a.dim(),
            });
        }
        a.ensure_hermitian(self.tol.validation)
    }

    /// `|ψ⊗ξ⟩`.
    pub fn initial_state(&self, psi: &StateVector) -> Result<CVector> {
        self.check_object_state(psi)?;
        Ok(psi.tensor(&self.xi))
    }

    /// `U|ψ⊗ξ⟩`.
    pub fn evolve(&self, psi: &StateVector) -> Result<CVector> {
        self.u.apply(&self.initial_state(psi)?)
    }

    /// Heisenberg-picture meter `U†(I⊗M)U`.
    pub fn evolved_meter(&self) -> ComplexMatrix {
        let m = on_second(self.dim_h, &self.meter);
        &(&self.u.adjoint() * &m) * &self.u
    }

    pub fn output_distribution(&self, psi: &StateVector) -> Result<OutcomeDistribution> {
        let out = self.evolve(psi)?;
        let outcomes = self
            .meter_spectrum
            .eigenvalues
            .iter()
            .zip(&self.meter_spectrum.projectors)
            .map(|(&mu, proj)| {
                let projected = on_second(self.dim_h, proj)
                    .apply(&out)
                    .expect("dims checked");
                (mu, projected.norm_squared())
            })
            .collect();
        Ok(OutcomeDistribution { outcomes })
    }

    /// Effects `Π_μ = ⟨ξ|U†(I⊗E^M(μ))U|ξ⟩`.
    pub fn povm(&self) -> Povm {
        let elements = self
            .meter_spectrum
            .eigenvalues
            .iter()
            .zip(&self.meter_spectrum.projectors)
            .map(|(&mu, proj)| {
                let heisenberg = &(&self.u.adjoint() * &on_second(self.dim_h, proj)) * &self.u;
                let effect =
                    partial_inner(&self.xi, &heisenberg, self.dim_h).expect("dims checked");
                (mu, effect)
            })
            .collect();
        Povm { elements }
    }

    /// `N = U†(I⊗M)U − A⊗I`.
    pub fn noise_operator(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_object_observable(a)?;
        Ok(&self.evolved_meter() - &on_first(a, self.dim_k()))
    }

    /// `ε(A, ψ) = ‖N|ψ⊗ξ⟩‖`.
    pub fn rms_noise(&self, a: &ComplexMatrix, psi: &StateVector) -> Result<f64> {
        let n = self.noise_operator(a)?;
        Ok(n.apply(&self.initial_state(psi)?)?.norm())
    }

    /// `D = U†(B⊗I)U − B⊗I`.
    pub fn disturbance_operator(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_object_observable(b)?;
        let lifted = on_first(b, self.dim_k());
        Ok(&(&(&self.u.adjoint() * &lifted) * &self.u) - &lifted)
    }

    /// `η(B, ψ) = ‖D|ψ⊗ξ⟩‖`.
    pub fn rms_disturbance(&self, b: &ComplexMatrix, psi: &StateVector) -> Result<f64> {
        let d = self.disturbance_operator(b)?;
        Ok(d.apply(&self.initial_state(psi)?)?.norm())
    }

    fn basis_profile(&self, op: &ComplexMatrix) -> Vec<f64> {
        (0..self.dim_h)
            .map(|i| {
                let state = StateVector::basis(self.dim_h, i).tensor(&self.xi);
                op.apply(&state).expect("dims checked").norm()
            })
            .collect()
    }

    /// `‖N(e_i⊗ξ)‖` for every computational basis vector `e_i`.
    pub fn basis_noise(&self, a: &ComplexMatrix) -> Result<Vec<f64>> {
        Ok(self.basis_profile(&self.noise_operator(a)?))
    }

    /// `‖D(e_i⊗ξ)‖` for every computational basis vector `e_i`.
    pub fn basis_disturbance(&self, b: &ComplexMatrix) -> Result<Vec<f64>> {
        Ok(self.basis_profile(&self.disturbance_operator(b)?))
    }

    pub fn is_precise(&self, a: &ComplexMatrix, tol: &Tolerances) -> Result<bool> {
        Ok(first_above(&self.basis_noise(a)?, tol.validation).is_none())
    }

    pub fn is_nondisturbing(&self, b: &ComplexMatrix, tol: &Tolerances) -> Result<bool> {
        Ok(first_above(&self.basis_disturbance(b)?, tol.validation).is_none())
    }

    /// Computational basis followed by the seeded Haar ensemble.
    pub fn report_states(&self) -> Vec<StateVector> {
        report_states(self.dim_h, REPORT_SEED)
    }

    pub fn check_repeatability(
        &self,
        a: &ComplexMatrix,
        tol: &Tolerances,
    ) -> Result<RepeatabilityReport> {
        self.check_repeatability_on(a, tol, &self.report_states())
    }

    /// Compares `‖(E^A(Γ)⊗E^M(Δ))U|ψ⊗ξ⟩‖²` with `Pr{x ∈ Δ∩Γ}` for every
    /// pair of eigenvalue clusters and every supplied state.
    pub fn check_repeatability_on(
        &self,
        a: &ComplexMatrix,
        tol: &Tolerances,
        states: &[StateVector],
    ) -> Result<RepeatabilityReport> {
        self.check_object_observable(a)?;
        let a_spec = spectral_decompose(a, tol)?;
        let meter_lifted: Vec<ComplexMatrix> = self
            .meter_spectrum
            .projectors
            .iter()
            .map(|p| on_second(self.dim_h, p))
            .collect();
        let a_lifted: Vec<ComplexMatrix> = a_spec
            .projectors
            .iter()
            .map(|p| on_first(p, self.dim_k()))
            .collect();
        // Meter cluster `d` and observable cluster `g` intersect when their values agree.
        let intersection: Vec<Option<usize>> = self
            .meter_spectrum
            .eigenvalues
            .iter()
            .map(|&mu| {
                a_spec.find_cluster(
                    mu,
                    tol.validation
                        .max(tol.cluster_gap * a_spec.spectral_radius()),
                )
            })
            .collect();

        let mut tables = Vec::with_capacity(states.len());
        let mut max_deviation = 0.0f64;
        for psi in states {
            let out = self.evolve(psi)?;
            let meter_probs: Vec<f64> = meter_lifted
                .iter()
                .map(|p| p.apply(&out).expect("dims checked").norm_squared())
                .collect();
            let mut joint = vec![vec![0.0; a_lifted.len()]; meter_lifted.len()];
            let mut expected = vec![vec![0.0; a_lifted.len()]; meter_lifted.len()];
            for (d, pm) in meter_lifted.iter().enumerate() {
                let after_meter = pm.apply(&out).expect("dims checked");
                for (g, pa) in a_lifted.iter().enumerate() {
                    joint[d][g] = pa.apply(&after_meter).expect("dims checked").norm_squared();
                    expected[d][g] = if intersection[d] == Some(g) {
                        meter_probs[d]
                    } else {
                        0.0
                    };
                    max_deviation = max_deviation.max((joint[d][g] - expected[d][g]).abs());
                }
            }
            tables.push(JointTable { joint, expected });
        }
        Ok(RepeatabilityReport {
            meter_values: self.meter_spectrum.eigenvalues.clone(),
            observable_values: a_spec.eigenvalues.clone(),
            tables,
            max_deviation,
            satisfied: max_deviation <= tol.validation,
        })
    }

    /// Succeeds exactly when the process precisely and nondestructively
    /// measures `a`, returning the probe vectors `X_{μρρ'}`.
    pub fn detect_araki_yanase(
        &self,
        a: &ComplexMatrix,
        tol: &Tolerances,
    ) -> Result<ArakiYanaseDecomposition> {
        let noise = self.basis_noise(a)?;
        if let Some(i) = first_above(&noise, tol.validation) {
            return Err(WayError::NotPreciseOrDisturbing {
                condition: FailedCondition::Precise,
                basis_index: i,
                residual: noise[i],
            });
        }
        let disturbance = self.basis_disturbance(a)?;
        if let Some(i) = first_above(&disturbance, tol.validation) {
            return Err(WayError::NotPreciseOrDisturbing {
                condition: FailedCondition::Nondisturbing,
                basis_index: i,
                residual: disturbance[i],
            });
        }

        let a_spec = spectral_decompose(a, tol)?;
        let dim_k = self.dim_k();
        let mut probe_vectors = Vec::with_capacity(a_spec.len());
        let mut reconstruction = 0.0f64;
        for k in 0..a_spec.len() {
            let basis = a_spec.cluster_basis(k);
            let mut per_rho = Vec::with_capacity(basis.len());
            for phi in basis {
                let out = self.u.apply(&phi.kronecker(self.xi.amplitudes()))?;
                let xs: Vec<CVector> = basis
                    .iter()
                    .map(|phi_prime| contract_first(phi_prime, &out, dim_k))
                    .collect();
                let mut rebuilt = CVector::zeros(out.len());
                for (phi_prime, x) in basis.iter().zip(&xs) {
                    rebuilt += phi_prime.kronecker(x);
                }
                reconstruction = reconstruction.max((&out - rebuilt).norm());
                per_rho.push(xs);
            }
            probe_vectors.push(per_rho);
        }

        let mut distinguishability = 0.0f64;
        for mu in 0..probe_vectors.len() {
            for nu in (mu + 1)..probe_vectors.len() {
                for x in probe_vectors[mu].iter().flatten() {
                    for y in probe_vectors[nu].iter().flatten() {
                        distinguishability = distinguishability.max(x.dotc(y).norm());
                    }
                }
            }
        }

        let mut meter_residual = 0.0f64;
        for (mu, per_rho) in a_spec.eigenvalues.iter().zip(&probe_vectors) {
            for x in per_rho.iter().flatten() {
                let mx = self.meter.apply(x)?;
                meter_residual = meter_residual.max((mx - x * Complex64::new(*mu, 0.0)).norm());
            }
        }

        let residuals = ArakiYanaseResiduals {
            reconstruction,
            distinguishability,
            meter: meter_residual,
        };
        let scale = 1.0 + a.spectral_norm() + self.meter.spectral_norm();
        let worst = residuals.max();
        if worst > 100.0 * tol.validation * scale {
            return Err(WayError::StructureMismatch { residual: worst });
        }

        Ok(ArakiYanaseDecomposition {
            eigenvalues: a_spec.eigenvalues.clone(),
            object_projectors: a_spec.projectors.clone(),
            object_bases: (0..a_spec.len())
                .map(|k| a_spec.cluster_basis(k).to_vec())
                .collect(),
            probe_vectors,
            residuals,
        })
    }
}

fn first_above(values: &[f64], threshold: f64) -> Option<usize> {
    values.iter().position(|&v| v > threshold)
}

/// `(⟨φ|⊗I) v` for `v` on `H⊗K`.
fn contract_first(phi: &CVector, v: &CVector, dim_k: usize) -> CVector {
    let mut out = CVector::from_element(dim_k, ZERO);
    for (i, c) in phi.iter().enumerate() {
        let c = c.conj();
        for k in 0..dim_k {
            out[k] += c * v[i * dim_k + k];
        }
    }
    out
}

/// Computational basis of `dim` followed by `REPORT_RANDOM_STATES` Haar states.
pub fn report_states(dim: usize, seed: u64) -> Vec<StateVector> {
    let mut rng = rng_for(seed, dim as u64);
    (0..dim)
        .map(|i| StateVector::basis(dim, i))
        .chain((0..REPORT_RANDOM_STATES).map(|_| haar_state(dim, &mut rng)))
        .collect()
}

#[derive(Debug, Clone)]
pub struct OutcomeDistribution {
    /// `(meter eigenvalue, probability)` per eigenvalue cluster, ascending.
    pub outcomes: Vec<(f64, f64)>,
}

impl OutcomeDistribution {
    pub fn probability_of(&self, value: f64, tol: f64) -> Option<f64> {
        self.outcomes
            .iter()
            .find(|(mu, _)| (mu - value).abs() <= tol)
            .map(|(_, p)| *p)
    }

    pub fn total(&self) -> f64 {
        self.outcomes.iter().map(|(_, p)| p).sum()
    }
}

#[derive(Debug, Clone)]
pub struct Povm {
    pub elements: Vec<(f64, ComplexMatrix)>,
}

impl Povm {
    /// `‖Σ Π_μ − I‖`.
    pub fn normalization_residual(&self) -> f64 {
        let dim = self.elements[0].1.dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for (_, e) in &self.elements {
            sum = &sum + e;
        }
        (&sum - &ComplexMatrix::identity(dim)).spectral_norm()
    }

    /// Most negative eigenvalue over all effects (0 if all are PSD).
    pub fn positivity_defect(&self, tol: &Tolerances) -> f64 {
        self.elements
            .iter()
            .map(|(_, e)| {
                spectral_decompose(e, tol)
                    .map(|s| (-s.eigenvalues[0]).max(0.0))
                    .unwrap_or(f64::INFINITY)
            })
            .fold(0.0, f64::max)
    }

    /// `⟨ψ|Π_μ|ψ⟩` per effect.
    pub fn probabilities(&self, psi: &StateVector) -> Result<Vec<(f64, f64)>> {
        self.elements
            .iter()
            .map(|(mu, e)| Ok((*mu, e.expectation(psi.amplitudes())?.re)))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct JointTable {
    /// `joint[d][g] = Pr{x ∈ Δ_d, y ∈ Γ_g}`.
    pub joint: Vec<Vec<f64>>,
    /// `expected[d][g] = Pr{x ∈ Δ_d ∩ Γ_g}`.
    pub expected: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct RepeatabilityReport {
    pub meter_values: Vec<f64>,
    pub observable_values: Vec<f64>,
    pub tables: Vec<JointTable>,
    pub max_deviation: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArakiYanaseResiduals {
    /// `max ‖U|φ_{μρ}⊗ξ⟩ − Σ_ρ' |φ_{μρ'}⊗X_{μρρ'}⟩‖`.
    pub reconstruction: f64,
    /// `max |⟨X_{μρρ'}|X_{νσσ'}⟩|` over `μ ≠ ν`.
    pub distinguishability: f64,
    /// `max ‖(M − μ)X_{μρρ'}‖`.
    pub meter: f64,
}

impl ArakiYanaseResiduals {
    pub fn max(&self) -> f64 {
        self.reconstruction
            .max(self.distinguishability)
            .max(self.meter)
    }
}

#[derive(Debug, Clone)]
pub struct ArakiYanaseDecomposition {
    pub eigenvalues: Vec<f64>,
    pub object_projectors: Vec<ComplexMatrix>,
    /// Orthonormal `φ_{μρ}` for each eigenvalue `μ`.
    pub object_bases: Vec<Vec<CVector>>,
    /// `probe_vectors[μ][ρ][ρ']`, unnormalized.
    pub probe_vectors: Vec<Vec<Vec<CVector>>>,
    pub residuals: ArakiYanaseResiduals,
}
