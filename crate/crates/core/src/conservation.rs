//! Additive and multiplicative conservation laws.

use crate::error::{Result, WayError};
use crate::linalg::{
    exp_hermitian, exp_i_hermitian, kernel_projector, on_first, on_second, operator_modulus,
    spectral_decompose, tensor, ComplexMatrix, Tolerances,
};
use crate::measurement::MeasuringProcess;
use crate::random::{random_hermitian, rng_for};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawKind {
    /// `[L₁⊗I + I⊗L₂, U] = 0`.
    Additive,
    /// `[L₁⊗L₂, U] = 0`.
    Multiplicative,
}

impl LawKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            LawKind::Additive => "additive",
            LawKind::Multiplicative => "multiplicative",
        }
    }
}

/// A candidate conserved quantity `(L₁, L₂)` with cached moduli and kernels.
#[derive(Debug, Clone)]
pub struct ConservedPair {
    l1: ComplexMatrix,
    l2: ComplexMatrix,
    kind: LawKind,
    abs_l1: ComplexMatrix,
    abs_l2: ComplexMatrix,
    kernel_l1: ComplexMatrix,
    kernel_l2: ComplexMatrix,
}

impl ConservedPair {
    pub fn new(
        l1: ComplexMatrix,
        l2: ComplexMatrix,
        kind: LawKind,
        tol: &Tolerances,
    ) -> Result<Self> {
        let abs_l1 = operator_modulus(&l1, tol)?;
        let abs_l2 = operator_modulus(&l2, tol)?;
        let kernel_l1 = kernel_projector(&l1, tol)?;
        let kernel_l2 = kernel_projector(&l2, tol)?;
        Ok(ConservedPair {
            l1,
            l2,
            kind,
            abs_l1,
            abs_l2,
            kernel_l1,
            kernel_l2,
        })
    }

    pub fn multiplicative(l1: ComplexMatrix, l2: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        Self::new(l1, l2, LawKind::Multiplicative, tol)
    }

    pub fn additive(l1: ComplexMatrix, l2: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        Self::new(l1, l2, LawKind::Additive, tol)
    }

    pub fn l1(&self) -> &ComplexMatrix {
        &self.l1
    }

    pub fn l2(&self) -> &ComplexMatrix {
        &self.l2
    }

    pub fn kind(&self) -> LawKind {
        self.kind
    }

    pub fn abs_l1(&self) -> &ComplexMatrix {
        &self.abs_l1
    }

    pub fn abs_l2(&self) -> &ComplexMatrix {
        &self.abs_l2
    }

    pub fn kernel_l1(&self) -> &ComplexMatrix {
        &self.kernel_l1
    }

    pub fn kernel_l2(&self) -> &ComplexMatrix {
        &self.kernel_l2
    }

    /// `L₁⊗I + I⊗L₂` or `L₁⊗L₂` on the composite space.
    pub fn total(&self) -> ComplexMatrix {
        match self.kind {
            LawKind::Additive => {
                &on_first(&self.l1, self.l2.dim()) + &on_second(self.l1.dim(), &self.l2)
            }
            LawKind::Multiplicative => tensor(&self.l1, &self.l2),
        }
    }

    /// Smallest `|eigenvalue|` of `L₂`.
    pub fn l2_min_abs_eigenvalue(&self) -> f64 {
        self.l2.min_singular_value()
    }
}

/// `‖[L, U]‖` for the pair's total quantity `L`.
pub fn conservation_residual_of(u: &ComplexMatrix, c: &ConservedPair) -> Result<f64> {
    let total = c.total();
    Ok(total.commutator(u)?.spectral_norm())
}

pub fn conservation_residual(p: &MeasuringProcess, c: &ConservedPair) -> Result<f64> {
    if c.l1.dim() != p.dim_h() {
        return Err(WayError::DimensionMismatch {
            expected: p.dim_h(),
            found: c.l1.dim(),
        });
    }
    if c.l2.dim() != p.dim_k() {
        return Err(WayError::DimensionMismatch {
            expected: p.dim_k(),
            found: c.l2.dim(),
        });
    }
    conservation_residual_of(p.unitary(), c)
}

/// `‖[M, |L₂|]‖`.
pub fn check_yanase(p: &MeasuringProcess, l2: &ComplexMatrix, tol: &Tolerances) -> Result<f64> {
    let abs_l2 = operator_modulus(l2, tol)?;
    Ok(p.meter().commutator(&abs_l2)?.spectral_norm())
}

/// `(L₁, L₂) ↦ (exp L₁, exp L₂)`; additive conservation becomes multiplicative.
pub fn exponentiate_additive(c: &ConservedPair, tol: &Tolerances) -> Result<ConservedPair> {
    if c.kind != LawKind::Additive {
        return Err(WayError::KindMismatch {
            expected: "additive",
        });
    }
    ConservedPair::multiplicative(exp_hermitian(&c.l1, tol)?, exp_hermitian(&c.l2, tol)?, tol)
}

/// `Σ_k P_k H P_k` over the eigenprojectors of `generator`.
pub fn project_onto_commutant(
    h: &ComplexMatrix,
    generator: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<ComplexMatrix> {
    h.check_same_dim(generator)?;
    let spec = spectral_decompose(generator, tol)?;
    let mut acc = ComplexMatrix::zeros(h.dim());
    for p in &spec.projectors {
        acc = &acc + &(&(p * h) * p);
    }
    Ok(acc.hermitian_part())
}

/// Seeded `exp(iH′)` with `H′` a Gaussian Hermitian projected onto the
/// commutant of `L₁⊗L₂`.
pub fn random_conserving_unitary(
    l1: &ComplexMatrix,
    l2: &ComplexMatrix,
    seed: u64,
    tol: &Tolerances,
) -> Result<ComplexMatrix> {
    random_commutant_unitary(&tensor(l1, l2), seed, tol)
}

/// Seeded random unitary commuting with an arbitrary Hermitian `generator`.
pub fn random_commutant_unitary(
    generator: &ComplexMatrix,
    seed: u64,
    tol: &Tolerances,
) -> Result<ComplexMatrix> {
    let mut rng = rng_for(seed, generator.dim() as u64);
    let h = random_hermitian(generator.dim(), &mut rng);
    let projected = project_onto_commutant(&h, generator, tol)?;
    exp_i_hermitian(&projected, tol)
}
