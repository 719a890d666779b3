//! Matrix elements `⟨Ω, z_{ρ_r}(θ_r)⋯z_{ρ₁}(θ₁) A z†_{λ_ℓ}(η_ℓ)⋯z†_{λ₁}(η₁)Ω⟩`.
//!
//! `left` lists the creation vertices `(η_i, λ_i)` and `right` the
//! annihilation vertices `(θ_j, ρ_j)`, both in diagram order left to right.

use crate::error::Result;
use crate::fock::{StateSum, ZfEngine, ZfExpr};
use crate::C64;

pub trait MatrixElementOracle: Sync {
    fn element(&self, left: &[(f64, usize)], right: &[(f64, usize)]) -> Result<C64>;
}

fn reversed(word: &[(f64, usize)]) -> Vec<(f64, usize)> {
    word.iter().rev().copied().collect()
}

/// `A = 1`.
pub struct IdentityOracle<'e, 'm> {
    pub engine: &'e ZfEngine<'m>,
}

impl MatrixElementOracle for IdentityOracle<'_, '_> {
    fn element(&self, left: &[(f64, usize)], right: &[(f64, usize)]) -> Result<C64> {
        if left.len() != right.len() {
            return Ok(C64::new(0.0, 0.0));
        }
        let bra = self.engine.word_state(right)?;
        let ket = self.engine.word_state(&reversed(left))?;
        self.engine.state_inner(&bra, &ket)
    }
}

/// `A = |Ω⟩⟨Ω|`.
pub struct VacuumProjector;

impl MatrixElementOracle for VacuumProjector {
    fn element(&self, left: &[(f64, usize)], right: &[(f64, usize)]) -> Result<C64> {
        let v = if left.is_empty() && right.is_empty() { 1.0 } else { 0.0 };
        Ok(C64::new(v, 0.0))
    }
}

/// `A` a finite product of creators and annihilators.
pub struct ZfWordOracle<'e, 'm> {
    pub engine: &'e ZfEngine<'m>,
    pub word: ZfExpr,
}

impl ZfWordOracle<'_, '_> {
    /// The same matrix element through the conjugated expression
    /// `conj⟨Ω, z_{λ₁}⋯z_{λ_ℓ} A* z†_{ρ₁}⋯z†_{ρ_r}Ω⟩`.
    pub fn element_conjugated(&self, left: &[(f64, usize)], right: &[(f64, usize)]) -> Result<C64> {
        let bra = self.engine.word_state(&reversed(left))?;
        let ket = self.engine.normal_order(&self.word.adjoint().then(&ZfExpr::creators(right)))?;
        Ok(self.engine.state_inner(&bra, &ket)?.conj())
    }

    /// `AΩ` in canonical form.
    pub fn on_vacuum(&self) -> Result<StateSum> {
        self.engine.normal_order(&self.word)
    }
}

impl MatrixElementOracle for ZfWordOracle<'_, '_> {
    fn element(&self, left: &[(f64, usize)], right: &[(f64, usize)]) -> Result<C64> {
        let bra = self.engine.word_state(right)?;
        let ket = self.engine.normal_order(&self.word.then(&ZfExpr::creators(&reversed(left))))?;
        self.engine.state_inner(&bra, &ket)
    }
}
