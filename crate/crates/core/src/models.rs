//! Canonical measuring processes and seeded random ensembles.

use rand::Rng;

use crate::bounds::{verify_way_consistency_on, WayReport};
use crate::conservation::{project_onto_commutant, random_conserving_unitary, ConservedPair};
use crate::error::{Result, WayError};
use crate::linalg::{operator_modulus, tensor, ComplexMatrix, StateVector, Tolerances};
use crate::measurement::MeasuringProcess;
use crate::par::{map_indexed, Execution};
use crate::random::{haar_state, hermitian_with_spectrum, random_hermitian, rng_for};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Expected {
    Flag(bool),
    Value { value: f64, tolerance: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observed {
    Flag(bool),
    Value(f64),
}

impl Expected {
    pub fn matches(&self, observed: Observed) -> bool {
        match (*self, observed) {
            (Expected::Flag(want), Observed::Flag(got)) => want == got,
            (Expected::Value { value, tolerance }, Observed::Value(got)) => {
                (got - value).abs() <= tolerance
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expectation {
    /// Check name, e.g. `precise` or `pair0.commutator_a_abs_l1`.
    pub key: String,
    pub expected: Expected,
    pub note: String,
}

impl Expectation {
    pub fn flag(key: &str, value: bool, note: &str) -> Self {
        Expectation {
            key: key.to_string(),
            expected: Expected::Flag(value),
            note: note.to_string(),
        }
    }

    pub fn value(key: &str, value: f64, tolerance: f64, note: &str) -> Self {
        Expectation {
            key: key.to_string(),
            expected: Expected::Value { value, tolerance },
            note: note.to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NamedModel {
    pub name: String,
    pub process: MeasuringProcess,
    pub observable: ComplexMatrix,
    pub conserved: Vec<ConservedPair>,
    pub expected: Vec<Expectation>,
}

impl NamedModel {
    pub fn run_checks(&self, tol: &Tolerances) -> Result<ModelChecks> {
        ModelChecks::run(&self.process, &self.observable, &self.conserved, tol)
    }

    /// Evaluates every declared expectation.
    pub fn evaluate_expectations(&self, tol: &Tolerances) -> Result<Vec<ExpectationOutcome>> {
        let checks = self.run_checks(tol)?;
        Ok(checks.evaluate(&self.expected))
    }
}

#[derive(Debug, Clone)]
pub struct ExpectationOutcome {
    pub expectation: Expectation,
    /// `None` when the key names no known check.
    pub observed: Option<Observed>,
    pub pass: bool,
}

/// Every verdict that a model file can declare expectations about.
#[derive(Debug, Clone)]
pub struct ModelChecks {
    pub precise: bool,
    pub nondisturbing: bool,
    pub max_basis_noise: f64,
    pub max_basis_disturbance: f64,
    pub araki_yanase: bool,
    /// Largest structure residual when the decomposition exists.
    pub araki_yanase_residual: Option<f64>,
    pub repeatable: bool,
    pub repeatability_deviation: f64,
    pub povm_normalization: f64,
    pub pairs: Vec<WayReport>,
}

impl ModelChecks {
    pub fn run(
        process: &MeasuringProcess,
        observable: &ComplexMatrix,
        pairs: &[ConservedPair],
        tol: &Tolerances,
    ) -> Result<Self> {
        Self::run_on(process, observable, pairs, tol, &process.report_states())
    }

    /// As [`ModelChecks::run`] with an explicit ψ-ensemble.
    pub fn run_on(
        process: &MeasuringProcess,
        observable: &ComplexMatrix,
        pairs: &[ConservedPair],
        tol: &Tolerances,
        states: &[StateVector],
    ) -> Result<Self> {
        let noise = process.basis_noise(observable)?;
        let disturbance = process.basis_disturbance(observable)?;
        let max_basis_noise = noise.iter().copied().fold(0.0, f64::max);
        let max_basis_disturbance = disturbance.iter().copied().fold(0.0, f64::max);
        let araki_yanase_residual = match process.detect_araki_yanase(observable, tol) {
            Ok(d) => Some(d.residuals.max()),
            Err(WayError::NotPreciseOrDisturbing { .. })
            | Err(WayError::StructureMismatch { .. }) => None,
            Err(e) => return Err(e),
        };
        let repeatability = process.check_repeatability_on(observable, tol, states)?;
        let pairs = pairs
            .iter()
            .map(|c| verify_way_consistency_on(process, observable, c, tol, states))
            .collect::<Result<Vec<_>>>()?;
        Ok(ModelChecks {
            precise: max_basis_noise <= tol.validation,
            nondisturbing: max_basis_disturbance <= tol.validation,
            max_basis_noise,
            max_basis_disturbance,
            araki_yanase: araki_yanase_residual.is_some(),
            araki_yanase_residual,
            repeatable: repeatability.satisfied,
            repeatability_deviation: repeatability.max_deviation,
            povm_normalization: process.povm().normalization_residual(),
            pairs,
        })
    }

    pub fn observed(&self, key: &str) -> Option<Observed> {
        let flag = |b: bool| Some(Observed::Flag(b));
        let value = |v: f64| Some(Observed::Value(v));
        match key {
            "precise" => return flag(self.precise),
            "nondisturbing" => return flag(self.nondisturbing),
            "araki_yanase" => return flag(self.araki_yanase),
            "repeatable" => return flag(self.repeatable),
            "max_basis_noise" => return value(self.max_basis_noise),
            "max_basis_disturbance" => return value(self.max_basis_disturbance),
            _ => {}
        }
        let (head, field) = key.split_once('.')?;
        let index: usize = head.strip_prefix("pair")?.parse().ok()?;
        let r = self.pairs.get(index)?;
        match field {
            "conserved" => flag(r.conserved),
            "yanase" => flag(r.yanase),
            "l2_invertible" => flag(r.l2_invertible),
            "consistent" => flag(r.verdict.is_consistent()),
            "conservation_residual" => value(r.conservation_residual),
            "yanase_residual" => value(r.yanase_residual),
            "commutator_a_l1" => value(r.commutator_a_l1),
            "commutator_a_abs_l1" => value(r.commutator_a_abs_l1),
            "l2_min_abs_eigenvalue" => value(r.l2_min_abs_eigenvalue),
            _ => None,
        }
    }

    pub fn evaluate(&self, expectations: &[Expectation]) -> Vec<ExpectationOutcome> {
        expectations
            .iter()
            .map(|e| {
                let observed = self.observed(&e.key);
                ExpectationOutcome {
                    expectation: e.clone(),
                    observed,
                    pass: observed.is_some_and(|o| e.expected.matches(o)),
                }
            })
            .collect()
    }
}

/// `|a₁⟩⟨a₁|⊗I + |a₂⟩⟨a₂|⊗σx` with `a₁ ↔ +1`, `a₂ ↔ −1` of σz.
pub fn cnot_unitary() -> ComplexMatrix {
    let p1 = ComplexMatrix::diag(&[1.0, 0.0]);
    let p2 = ComplexMatrix::diag(&[0.0, 1.0]);
    &tensor(&p1, &ComplexMatrix::identity(2)) + &tensor(&p2, &ComplexMatrix::pauli_x())
}

/// CNOT coupling, probe in `ξ₁`, meter σz.
pub fn cnot_process() -> MeasuringProcess {
    MeasuringProcess::new(
        2,
        StateVector::basis(2, 0),
        cnot_unitary(),
        ComplexMatrix::pauli_z(),
        Tolerances::default(),
    )
    .expect("CNOT model is valid")
}

fn cnot_expectations() -> Vec<Expectation> {
    vec![
        Expectation::flag("precise", true, "U|a_i⊗ξ1⟩ = |a_i⊗ξ_i⟩"),
        Expectation::flag("nondisturbing", true, "U commutes with σz⊗I"),
        Expectation::flag("araki_yanase", true, "nondestructive precise measurement"),
        Expectation::flag(
            "repeatable",
            true,
            "follows from preciseness and nondisturbance",
        ),
    ]
}

pub fn build_cnot_model() -> NamedModel {
    NamedModel {
        name: "cnot".to_string(),
        process: cnot_process(),
        observable: ComplexMatrix::pauli_z(),
        conserved: Vec::new(),
        expected: cnot_expectations(),
    }
}

/// CNOT with the pair `(σx, σx)`.
///
/// `|σx| = I`, so `[A, |L₁|] = 0` while `‖[A, L₁]‖ = 2`. The CNOT coupling
/// maps `σx⊗σx` to `σx⊗I`, so the pair is not conserved (`‖[U, L₁⊗L₂]‖ = 2`);
/// `|L₁|⊗|L₂| = I` still commutes with `U`.
pub fn build_example1() -> NamedModel {
    let tol = Tolerances::default();
    let x = ComplexMatrix::pauli_x();
    let pair = ConservedPair::multiplicative(x.clone(), x, &tol).expect("Hermitian");
    let mut expected = cnot_expectations();
    expected.extend([
        Expectation::flag(
            "pair0.conserved",
            false,
            "CNOT (σx⊗σx) CNOT = σx⊗I; residual is exactly 2",
        ),
        Expectation::value("pair0.conservation_residual", 2.0, 1e-10, "‖[U, σx⊗σx]‖"),
        Expectation::value("pair0.commutator_a_l1", 2.0, 1e-10, "‖[σz, σx]‖ = ‖2iσy‖"),
        Expectation::value("pair0.commutator_a_abs_l1", 0.0, 1e-12, "|σx| = I"),
        Expectation::flag("pair0.l2_invertible", true, "σx is invertible"),
        Expectation::flag("pair0.consistent", true, "no theorem conclusion violated"),
    ]);
    NamedModel {
        name: "example1".to_string(),
        process: cnot_process(),
        observable: ComplexMatrix::pauli_z(),
        conserved: vec![pair],
        expected,
    }
}

/// `|ã⟩⟨ã|` with `ã = (a₁ + a₂)/√2`; also `|ξ̃⟩⟨ξ̃|` on the probe.
pub fn plus_projector() -> ComplexMatrix {
    ComplexMatrix::from_real(2, &[0.5, 0.5, 0.5, 0.5]).expect("2×2")
}

/// CNOT with `(L₁, |ξ̃⟩⟨ξ̃|)`, conserved for every `L₁`; `L₂` is singular.
pub fn build_example2(l1: Option<ComplexMatrix>) -> Result<NamedModel> {
    let tol = Tolerances::default();
    let default_l1 = l1.is_none();
    let l1 = l1.unwrap_or_else(plus_projector);
    if l1.dim() != 2 {
        return Err(WayError::DimensionMismatch {
            expected: 2,
            found: l1.dim(),
        });
    }
    l1.ensure_hermitian(tol.validation)?;
    let pair = ConservedPair::multiplicative(l1, plus_projector(), &tol)?;
    let mut expected = cnot_expectations();
    expected.extend([
        Expectation::flag("pair0.conserved", true, "σx|ξ̃⟩ = |ξ̃⟩"),
        Expectation::value(
            "pair0.l2_min_abs_eigenvalue",
            0.0,
            1e-12,
            "rank-1 projector",
        ),
        Expectation::flag("pair0.l2_invertible", false, "L2 is singular"),
        Expectation::flag(
            "pair0.consistent",
            true,
            "theorem hypotheses fail, no conclusion",
        ),
    ]);
    if default_l1 {
        expected.push(Expectation::value(
            "pair0.commutator_a_abs_l1",
            1.0,
            1e-10,
            "‖[σz, |ã⟩⟨ã|]‖",
        ));
    }
    Ok(NamedModel {
        name: "example2".to_string(),
        process: cnot_process(),
        observable: ComplexMatrix::pauli_z(),
        conserved: vec![pair],
        expected,
    })
}

/// Real orthogonal reflection `I − 2vvᵀ`, `v = (1, 1, 1)/√3`.
fn qutrit_frame() -> ComplexMatrix {
    let v = [1.0 / 3f64.sqrt(); 3];
    let entries: Vec<f64> = (0..9)
        .map(|k| {
            let (i, j) = (k / 3, k % 3);
            let delta = if i == j { 1.0 } else { 0.0 };
            delta - 2.0 * v[i] * v[j]
        })
        .collect();
    ComplexMatrix::from_real(3, &entries).expect("3×3")
}

fn in_qutrit_frame(block: &ComplexMatrix) -> ComplexMatrix {
    let f = qutrit_frame();
    &(&f * block) * &f.adjoint()
}

/// Qutrit object with a degenerate observable, qubit probe.
///
/// `A = F diag(1, 1, −1) F†`; the coupling flips the probe on the `−1`
/// eigenspace. Both conserved pairs act on `A`'s eigenspaces block-wise.
pub fn build_qutrit_model() -> NamedModel {
    let tol = Tolerances::default();
    let a = in_qutrit_frame(&ComplexMatrix::diag(&[1.0, 1.0, -1.0]));
    let p_plus = in_qutrit_frame(&ComplexMatrix::diag(&[1.0, 1.0, 0.0]));
    let p_minus = in_qutrit_frame(&ComplexMatrix::diag(&[0.0, 0.0, 1.0]));
    let u = &tensor(&p_plus, &ComplexMatrix::identity(2))
        + &tensor(&p_minus, &ComplexMatrix::pauli_x());
    let process = MeasuringProcess::new(
        3,
        StateVector::basis(2, 0),
        u,
        ComplexMatrix::pauli_z(),
        tol,
    )
    .expect("qutrit model is valid");
    let block = in_qutrit_frame(
        &ComplexMatrix::from_real(3, &[1.0, 2.0, 0.0, 2.0, -1.0, 0.0, 0.0, 0.0, 3.0]).unwrap(),
    );
    let mult =
        ConservedPair::multiplicative(block.clone(), ComplexMatrix::pauli_x(), &tol).unwrap();
    let add = ConservedPair::additive(block, ComplexMatrix::pauli_x(), &tol).unwrap();
    let mut expected = cnot_expectations();
    expected.extend([
        Expectation::flag(
            "pair0.conserved",
            true,
            "L1 is block-diagonal in A's eigenspaces",
        ),
        Expectation::flag("pair0.yanase", true, "|σx| = I"),
        Expectation::flag("pair0.l2_invertible", true, "σx"),
        Expectation::value(
            "pair0.commutator_a_abs_l1",
            0.0,
            1e-9,
            "required by the multiplicative law",
        ),
        Expectation::flag("pair0.consistent", true, ""),
        Expectation::flag(
            "pair1.conserved",
            true,
            "additive law with the same factors",
        ),
        Expectation::value(
            "pair1.commutator_a_l1",
            0.0,
            1e-9,
            "required by the additive law",
        ),
        Expectation::flag("pair1.consistent", true, ""),
    ]);
    NamedModel {
        name: "qutrit".to_string(),
        process,
        observable: a,
        conserved: vec![mult, add],
        expected,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimChoice {
    Fixed {
        dim_h: usize,
        dim_k: usize,
    },
    /// Each factor drawn uniformly from `min..=max`.
    Uniform {
        min: usize,
        max: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleSpec {
    pub dims: DimChoice,
    pub count: usize,
    pub seed: u64,
    /// Meter built block-diagonally in the eigenspaces of `|L₂|`.
    pub yanase: bool,
    /// Keep zero out of the spectrum of `L₂`.
    pub invertible_l2: bool,
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        EnsembleSpec {
            dims: DimChoice::Uniform { min: 2, max: 4 },
            count: 0,
            seed: 0,
            yanase: true,
            invertible_l2: true,
        }
    }
}

const L1_LEVELS: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];
const L2_INVERTIBLE_LEVELS: [f64; 6] = [-3.0, -2.0, -1.0, 1.0, 2.0, 3.0];

fn draw_levels<R: Rng + ?Sized>(levels: &[f64], n: usize, rng: &mut R) -> Vec<f64> {
    (0..n)
        .map(|_| levels[rng.random_range(0..levels.len())])
        .collect()
}

/// Item `index` of the ensemble; depends only on `(spec.seed, index)`.
pub fn random_model(spec: &EnsembleSpec, index: usize) -> NamedModel {
    let tol = Tolerances::default();
    let mut rng = rng_for(spec.seed, index as u64);
    let (dim_h, dim_k) = match spec.dims {
        DimChoice::Fixed { dim_h, dim_k } => (dim_h, dim_k),
        DimChoice::Uniform { min, max } => {
            (rng.random_range(min..=max), rng.random_range(min..=max))
        }
    };
    let l1 = hermitian_with_spectrum(&draw_levels(&L1_LEVELS, dim_h, &mut rng), &mut rng);
    let l2_levels: &[f64] = if spec.invertible_l2 {
        &L2_INVERTIBLE_LEVELS
    } else {
        &L1_LEVELS
    };
    let l2 = hermitian_with_spectrum(&draw_levels(l2_levels, dim_k, &mut rng), &mut rng);
    let unitary_seed: u64 = rng.random();
    let u = random_conserving_unitary(&l1, &l2, unitary_seed, &tol).expect("Hermitian factors");
    let meter = if spec.yanase {
        let abs_l2 = operator_modulus(&l2, &tol).expect("Hermitian");
        project_onto_commutant(&random_hermitian(dim_k, &mut rng), &abs_l2, &tol).expect("dims")
    } else {
        random_hermitian(dim_k, &mut rng)
    };
    let observable = random_hermitian(dim_h, &mut rng);
    let xi = haar_state(dim_k, &mut rng);
    let process =
        MeasuringProcess::new(dim_h, xi, u, meter, tol).expect("generated process is valid");
    let pair = ConservedPair::multiplicative(l1, l2, &tol).expect("Hermitian");

    let mut expected = vec![Expectation::flag(
        "pair0.conserved",
        true,
        "unitary drawn from the commutant of L1⊗L2",
    )];
    if spec.yanase {
        expected.push(Expectation::flag(
            "pair0.yanase",
            true,
            "meter built in |L2| eigenspaces",
        ));
    }
    NamedModel {
        name: format!("random-{}-{}", spec.seed, index),
        process,
        observable,
        conserved: vec![pair],
        expected,
    }
}

pub fn random_model_ensemble(spec: &EnsembleSpec, exec: Execution) -> Vec<NamedModel> {
    map_indexed(exec, spec.count, |i| random_model(spec, i))
}
