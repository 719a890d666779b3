//! The projector `P_n = (1/n!) Σ_π D_n(π)` at a fixed rapidity tuple.
//!
//! `D_n(π)` mixes the values of a function at all permuted tuples `θ_σ`, so
//! the projector acts on orbit functions `Ψ[σ] = Ψ(θ_σ) ∈ K^{⊗n}`, stored as
//! `n!` blocks ordered by [`perm_rank`]. On such functions
//! `(D(τ_k)Ψ)[σ] = S(θ_{σ(k+1)} − θ_{σ(k)})_{n,k} Ψ[σ∘τ_k]`.
//!
//! Two routes are provided: the factorised sum
//! `Σ_{𝔖_n} = C₂C₃⋯C_n` with `C_m = 1 + τ_{m−1} + τ_{m−1}τ_{m−2} + …`
//! (cosets of `𝔖_{m−1}` in `𝔖_m`), and the brute-force sum over cocycle
//! tensors `(D(π)Ψ)[σ] = S_n^π(θ_σ) Ψ[σπ]`.

use crate::error::{Error, Result};
use crate::fock::perm::{
    all_perms, cocycle_tensor_capped, compose, factorial, perm_rank, permute_tuple, transposition, Perm,
};
use crate::linalg::{apply_two_site, inner, norm2, op_norm_iter, tensor_dim, CMat, ZERO};
use crate::smatrix::SMatrixModel;
use crate::C64;

/// Default enumeration cap on `n` (`n!` orbit blocks).
pub const MAX_N: usize = 8;

/// Iteration cap used when estimating residual operator norms.
pub const RESIDUAL_ITER: usize = 200;

pub struct OrbitSpace<'a> {
    model: &'a SMatrixModel,
    n: usize,
    d: usize,
    block: usize,
    theta: Vec<f64>,
    perms: Vec<Perm>,
    // tau_target[k][r] = rank(σ_r ∘ τ_k)
    tau_target: Vec<Vec<usize>>,
    // smat[k][r] = S(θ_{σ_r(k+1)} − θ_{σ_r(k)})
    smat: Vec<Vec<CMat>>,
    smat_adj: Vec<Vec<CMat>>,
}

impl<'a> OrbitSpace<'a> {
    pub fn new(model: &'a SMatrixModel, theta: &[f64]) -> Result<Self> {
        Self::with_cap(model, theta, MAX_N)
    }

    pub fn with_cap(model: &'a SMatrixModel, theta: &[f64], max_n: usize) -> Result<Self> {
        let n = theta.len();
        if n > max_n {
            return Err(Error::Cap(format!("n = {n} exceeds the permutation enumeration cap n ≤ {max_n}")));
        }
        let d = model.dim_k();
        let block = tensor_dim(d, n).ok_or_else(|| Error::Cap("dim_k^n overflows".into()))?;
        let perms = all_perms(n);
        let mut tau_target = Vec::new();
        let mut smat = Vec::new();
        let mut smat_adj = Vec::new();
        for k in 0..n.saturating_sub(1) {
            let t = transposition(n, k);
            let mut tt = Vec::with_capacity(perms.len());
            let mut sk = Vec::with_capacity(perms.len());
            for s in &perms {
                tt.push(perm_rank(&compose(s, &t)));
                sk.push(model.eval_real(theta[s[k + 1]] - theta[s[k]])?);
            }
            smat_adj.push(sk.iter().map(|m| m.adjoint()).collect());
            tau_target.push(tt);
            smat.push(sk);
        }
        Ok(Self { model, n, d, block, theta: theta.to_vec(), perms, tau_target, smat, smat_adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Length of an orbit function.
    pub fn len(&self) -> usize {
        self.perms.len() * self.block
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The constant orbit function `Ψ[σ] = v`.
    pub fn constant(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.block);
        let mut out = Vec::with_capacity(self.len());
        for _ in 0..self.perms.len() {
            out.extend_from_slice(v);
        }
        out
    }

    /// The block at the identity permutation, i.e. the value at `θ` itself.
    pub fn at_identity<'b>(&self, psi: &'b [C64]) -> &'b [C64] {
        &psi[..self.block]
    }

    pub fn apply_tau(&self, k: usize, psi: &[C64]) -> Vec<C64> {
        let b = self.block;
        let mut out = vec![ZERO; psi.len()];
        for r in 0..self.perms.len() {
            let src = self.tau_target[k][r];
            let dst = &mut out[r * b..(r + 1) * b];
            dst.copy_from_slice(&psi[src * b..(src + 1) * b]);
            apply_two_site(&self.smat[k][r], self.d, self.n, k, dst);
        }
        out
    }

    pub fn apply_tau_adj(&self, k: usize, phi: &[C64]) -> Vec<C64> {
        let b = self.block;
        let mut out = vec![ZERO; phi.len()];
        for r in 0..self.perms.len() {
            // (D(τ)*Φ)[ρ] = S_{ρτ}^* Φ[ρτ]
            let src = self.tau_target[k][r];
            let dst = &mut out[r * b..(r + 1) * b];
            dst.copy_from_slice(&phi[src * b..(src + 1) * b]);
            apply_two_site(&self.smat_adj[k][src], self.d, self.n, k, dst);
        }
        out
    }

    fn coset_sum(&self, m: usize, x: &[C64], adj: bool) -> Vec<C64> {
        // C_m = 1 + τ_{m−1}(1 + τ_{m−2}(1 + … )) in Horner form (1-based τ).
        // The adjoint is 1 + (… (1 + τ*_{m−2}) …)τ*_{m−1}-ordered the other way.
        if !adj {
            let mut r = x.to_vec();
            for i in 1..m {
                let t = self.apply_tau(i - 1, &r);
                r = x.iter().zip(&t).map(|(a, b)| a + b).collect();
            }
            r
        } else {
            let mut acc = x.to_vec();
            let mut cur = x.to_vec();
            for j in (1..m).rev() {
                cur = self.apply_tau_adj(j - 1, &cur);
                acc.iter_mut().zip(&cur).for_each(|(a, b)| *a += b);
            }
            acc
        }
    }

    /// `P_n Ψ` via the coset factorisation.
    pub fn project(&self, psi: &[C64]) -> Vec<C64> {
        let mut r = psi.to_vec();
        for m in (2..=self.n).rev() {
            r = self.coset_sum(m, &r, false);
        }
        let s = 1.0 / factorial(self.n) as f64;
        r.iter_mut().for_each(|z| *z *= s);
        r
    }

    /// `P_n* Φ`, built from the adjoint factors in reverse order.
    pub fn project_adj(&self, phi: &[C64]) -> Vec<C64> {
        let mut r = phi.to_vec();
        for m in 2..=self.n {
            r = self.coset_sum(m, &r, true);
        }
        let s = 1.0 / factorial(self.n) as f64;
        r.iter_mut().for_each(|z| *z *= s);
        r
    }

    /// `D(π)Ψ` from dense cocycle tensors.
    pub fn apply_perm(&self, p: &[usize], psi: &[C64]) -> Result<Vec<C64>> {
        let b = self.block;
        let mut out = vec![ZERO; psi.len()];
        for (r, s) in self.perms.iter().enumerate() {
            let t = cocycle_tensor_capped(self.model, p, &permute_tuple(&self.theta, s), usize::MAX)?;
            let src = perm_rank(&compose(s, p));
            let x = nalgebra::DVector::from_column_slice(&psi[src * b..(src + 1) * b]);
            out[r * b..(r + 1) * b].copy_from_slice((t * x).as_slice());
        }
        Ok(out)
    }

    /// `P_n Ψ` as the plain average of `D(π)Ψ` over all of `𝔖_n`.
    pub fn project_brute(&self, psi: &[C64]) -> Result<Vec<C64>> {
        let mut acc = vec![ZERO; psi.len()];
        for p in &self.perms {
            let t = self.apply_perm(p, psi)?;
            acc.iter_mut().zip(&t).for_each(|(a, b)| *a += b);
        }
        let s = 1.0 / self.perms.len() as f64;
        acc.iter_mut().for_each(|z| *z *= s);
        Ok(acc)
    }

    /// `‖P² − P‖` by bounded power iteration.
    pub fn idempotence_residual(&self) -> f64 {
        op_norm_iter(
            self.len(),
            |v| {
                let p = self.project(v);
                let pp = self.project(&p);
                pp.iter().zip(&p).map(|(a, b)| a - b).collect()
            },
            |v| {
                let p = self.project_adj(v);
                let pp = self.project_adj(&p);
                pp.iter().zip(&p).map(|(a, b)| a - b).collect()
            },
            RESIDUAL_ITER,
        )
    }

    /// `‖P − P*‖` by bounded power iteration.
    pub fn self_adjoint_residual(&self) -> f64 {
        let diff = |v: &[C64]| -> Vec<C64> {
            let a = self.project(v);
            let b = self.project_adj(v);
            a.iter().zip(&b).map(|(x, y)| x - y).collect()
        };
        // P − P* is anti-Hermitian, so its adjoint is its negative.
        op_norm_iter(self.len(), diff, |v| diff(v).into_iter().map(|z| -z).collect(), RESIDUAL_ITER)
    }

    /// `max_k ‖Ψ − D(τ_k)Ψ‖ / ‖Ψ‖`.
    pub fn symmetry_residual(&self, psi: &[C64]) -> f64 {
        let nrm = norm2(psi).max(f64::MIN_POSITIVE);
        (0..self.n.saturating_sub(1))
            .map(|k| {
                let t = self.apply_tau(k, psi);
                norm2(&psi.iter().zip(&t).map(|(a, b)| a - b).collect::<Vec<_>>()) / nrm
            })
            .fold(0.0, f64::max)
    }

    pub fn inner(&self, a: &[C64], b: &[C64]) -> C64 {
        inner(a, b)
    }
}

/// `(P_n v)(θ)` for the constant orbit function `v`.
pub fn project_pn(model: &SMatrixModel, theta: &[f64], v: &[C64]) -> Result<Vec<C64>> {
    let space = OrbitSpace::new(model, theta)?;
    if v.len() != space.block {
        return Err(Error::Config(format!("vector length {} does not match dim_k^n = {}", v.len(), space.block)));
    }
    Ok(space.at_identity(&space.project(&space.constant(v))).to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smatrix::ScatteringFn;
    use crate::spectrum::ParticleSpectrum;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<C64> {
        (0..len).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
    }

    fn diff(a: &[C64], b: &[C64]) -> f64 {
        norm2(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>())
    }

    fn models() -> Vec<SMatrixModel> {
        let spec = ParticleSpectrum::new(vec![1.0, 1.5], vec![0, 1], None).unwrap();
        let sb = |b| ScatteringFn::sinh_blaschke(b, 1.0);
        let omega = vec![vec![sb(0.4), sb(0.25)], vec![sb(0.25), sb(0.3)]];
        vec![
            SMatrixModel::diagonal(spec, omega, None).unwrap(),
            SMatrixModel::sigma_on(3, 1.0, None).unwrap(),
            SMatrixModel::flip(ParticleSpectrum::neutral(2, 1.0).unwrap(), -1.0).unwrap(),
        ]
    }

    #[test]
    fn one_particle_is_identity() {
        let m = SMatrixModel::sigma_on(3, 1.0, None).unwrap();
        let v = vec![C64::new(0.3, 0.1), C64::new(-1.0, 0.0), C64::new(0.0, 2.0)];
        assert_eq!(project_pn(&m, &[0.7], &v).unwrap(), v);
    }

    #[test]
    fn bosonic_pair_is_symmetrised() {
        let m = SMatrixModel::flip(ParticleSpectrum::neutral(1, 1.0).unwrap(), 1.0).unwrap();
        let space = OrbitSpace::new(&m, &[0.2, 1.3]).unwrap();
        // Orbit blocks: [f(θ₁,θ₂), f(θ₂,θ₁)].
        let psi = vec![C64::new(2.0, 0.0), C64::new(5.0, 1.0)];
        let p = space.project(&psi);
        assert!((p[0] - C64::new(3.5, 0.5)).norm() < 1e-15);
        assert!((p[1] - C64::new(3.5, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn pauli_principle_for_minus_flip() {
        let m = SMatrixModel::flip(ParticleSpectrum::neutral(3, 1.0).unwrap(), -1.0).unwrap();
        let v = [C64::new(0.4, -0.2), C64::new(1.0, 0.3), C64::new(-0.7, 0.0)];
        let mut vv = Vec::new();
        for a in &v {
            for b in &v {
                vv.push(a * b);
            }
        }
        let p = project_pn(&m, &[0.9, 0.9], &vv).unwrap();
        assert!(norm2(&p) <= 1e-15);
    }

    #[test]
    fn factorised_and_brute_force_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in models() {
            for n in 1..=4 {
                let th: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let space = OrbitSpace::new(&m, &th).unwrap();
                let psi = random_vec(&mut rng, space.len());
                let a = space.project(&psi);
                let b = space.project_brute(&psi).unwrap();
                assert!(diff(&a, &b) <= 1e-12 * norm2(&psi), "{} n = {n}", m.label());
            }
        }
    }

    #[test]
    fn adjoint_matches_inner_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = &models()[0];
        let th = [0.1, -0.8, 1.4];
        let space = OrbitSpace::new(m, &th).unwrap();
        let x = random_vec(&mut rng, space.len());
        let y = random_vec(&mut rng, space.len());
        for k in 0..2 {
            let l = inner(&space.apply_tau(k, &x), &y);
            let r = inner(&x, &space.apply_tau_adj(k, &y));
            assert!((l - r).norm() < 1e-12);
        }
        let l = inner(&space.project(&x), &y);
        let r = inner(&x, &space.project_adj(&y));
        assert!((l - r).norm() < 1e-12);
    }

    #[test]
    fn projected_functions_are_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = SMatrixModel::sigma_on(4, 1.0, None).unwrap();
        let space = OrbitSpace::new(&m, &[0.3, -0.4, 1.9]).unwrap();
        let psi = space.project(&random_vec(&mut rng, space.len()));
        assert!(space.symmetry_residual(&psi) < 1e-12);
    }

    #[test]
    fn enumeration_cap() {
        let m = SMatrixModel::flip(ParticleSpectrum::neutral(1, 1.0).unwrap(), 1.0).unwrap();
        assert!(matches!(OrbitSpace::new(&m, &[0.0; 9]), Err(Error::Cap(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn projector_is_orthogonal(seed in 0u64..10_000, n in 2usize..6, which in 0usize..3) {
            let m = &models()[which];
            if m.dim_k() == 3 && n == 5 {
                return Ok(());
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let th: Vec<f64> = (0..n).map(|i| i as f64 * 0.9 - 1.5 + rng.gen_range(-0.3..0.3)).collect();
            let space = OrbitSpace::new(m, &th).unwrap();
            prop_assert!(space.idempotence_residual() <= 1e-11);
            prop_assert!(space.self_adjoint_residual() <= 1e-11);
            let v = random_vec(&mut rng, space.len());
            let p = space.project(&v);
            prop_assert!(diff(&space.project(&p), &p) <= 1e-12 * norm2(&v));
        }
    }
}
